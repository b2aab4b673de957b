#include "cpg/linkfree.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace cpg {

// ---------------------------------------------------------------------------
// Claim vectors.

ClaimVectors::ClaimVectors(std::vector<State> universe, Color d)
    : universe_(std::move(universe)), d_(d) {
  std::sort(universe_.begin(), universe_.end());
  universe_.erase(std::unique(universe_.begin(), universe_.end()), universe_.end());
  if (universe_.size() > 64) throw ResourceError("cap-vectors", "claim universe exceeds 64 states");
  for (size_t i = 0; i < universe_.size(); ++i) index_[universe_[i]] = i;
  std::vector<uint64_t> empty(static_cast<size_t>(d_) + 1, 0);
  keys_.intern(empty);
  vecs_.push_back(empty);
}

bool ClaimVectors::member(uint32_t vec, Color i, State q) const {
  auto it = index_.find(q);
  if (it == index_.end()) return false;
  return (vecs_.at(vec)[static_cast<size_t>(i)] >> it->second) & 1;
}

std::vector<State> ClaimVectors::component(uint32_t vec, Color i) const {
  std::vector<State> out;
  uint64_t mask = vecs_.at(vec)[static_cast<size_t>(i)];
  for (size_t b = 0; b < universe_.size(); ++b)
    if ((mask >> b) & 1) out.push_back(universe_[b]);
  return out;
}

uint32_t ClaimVectors::intern(const std::vector<std::set<State>>& sets) {
  if (sets.size() != static_cast<size_t>(d_) + 1) throw UsageError("claim vector arity mismatch");
  std::vector<uint64_t> key(static_cast<size_t>(d_) + 1, 0);
  for (size_t i = 0; i <= static_cast<size_t>(d_); ++i) {
    for (State q : sets[i]) {
      auto it = index_.find(q);
      if (it == index_.end()) continue;  // outside the universe: never claimable nor checked
      key[i] |= 1ull << it->second;
    }
  }
  uint32_t before = static_cast<uint32_t>(keys_.size());
  uint32_t id = keys_.intern(key);
  if (id == before) vecs_.push_back(key);
  return id;
}

const std::vector<uint32_t>& ClaimVectors::enumerate_all(size_t cap) {
  if (enumerated_) return all_;
  double subsets = std::pow(2.0, static_cast<double>(universe_.size()));
  double total = std::pow(subsets, static_cast<double>(d_) + 1);
  if (total > static_cast<double>(cap))
    throw ResourceError("cap-vectors", "claim enumeration needs " + std::to_string(total) +
                                           " vectors, cap is " + std::to_string(cap));
  size_t nsub = 1ull << universe_.size();
  std::vector<uint64_t> key(static_cast<size_t>(d_) + 1, 0);
  std::function<void(size_t)> rec = [&](size_t i) {
    if (i == key.size()) {
      uint32_t before = static_cast<uint32_t>(keys_.size());
      uint32_t id = keys_.intern(key);
      if (id == before) vecs_.push_back(key);
      all_.push_back(id);
      return;
    }
    for (uint64_t m = 0; m < nsub; ++m) {
      key[i] = m;
      rec(i + 1);
    }
  };
  rec(0);
  std::sort(all_.begin(), all_.end());
  all_.erase(std::unique(all_.begin(), all_.end()), all_.end());
  enumerated_ = true;
  return all_;
}

std::string ClaimVectors::name(uint32_t vec) const {
  std::ostringstream os;
  os << "(";
  for (Color i = 0; i <= d_; ++i) {
    if (i) os << ";";
    uint64_t mask = vecs_.at(vec)[static_cast<size_t>(i)];
    bool first = true;
    for (size_t b = 0; b < universe_.size(); ++b)
      if ((mask >> b) & 1) {
        if (!first) os << ",";
        os << universe_[b];
        first = false;
      }
  }
  os << ")";
  return os.str();
}

// ---------------------------------------------------------------------------
// The link-free machine.

namespace {

struct LfLetter {
  LetterId rk = 0;
  uint32_t vec = kNoId;      // claim vector, if any
  LetterId pending = kNoId;  // stored push letter at a q! step

  friend bool operator==(const LfLetter&, const LfLetter&) = default;
};

struct LfLetterHash {
  size_t operator()(const LfLetter& l) const {
    size_t h = l.rk;
    hash_mix(h, l.vec);
    hash_mix(h, l.pending);
    return h;
  }
};

struct LfState {
  enum class Kind : uint8_t { Bang, Query, Jump, TT, FF };
  Kind kind = Kind::TT;
  State base = 0;
  Color color = 0;  // Jump only

  friend bool operator==(const LfState&, const LfState&) = default;
};

struct LfStateHash {
  size_t operator()(const LfState& s) const {
    size_t h = static_cast<size_t>(s.kind);
    hash_mix(h, s.base);
    hash_mix(h, static_cast<size_t>(s.color));
    return h;
  }
};

}  // namespace

struct LinkFree::Impl {
  CpdaGameSpec rk;
  std::function<Color(State, LetterId)> link_rank;
  std::function<int(LetterId)> link_order_of;
  std::shared_ptr<ClaimVectors> vectors;
  Color d = 0;
  int n = 1;
  size_t vec_cap = 0;

  // Letters extend the rank-aware alphabet and states extend its table, so
  // plain ids coincide on both sides.
  AlphabetRef alphabet;
  StateTableRef states;
  Interner<LfLetter, LfLetterHash> letters;
  std::vector<LetterId> letter_by_idx;
  std::unordered_map<LetterId, LfLetter> letter_info;
  Interner<LfState, LfStateHash> protocol;
  std::vector<State> protocol_by_idx;
  std::unordered_map<State, LfState> state_info;
  State tt_state = kNoId, ff_state = kNoId;

  LetterId intern_lf_letter(const LfLetter& l) {
    if (l.vec == kNoId && l.pending == kNoId) return l.rk;
    uint32_t before = static_cast<uint32_t>(letters.size());
    uint32_t idx = letters.intern(l);
    if (idx == before) {
      std::ostringstream name;
      name << alphabet->name(l.rk);
      if (l.vec != kNoId) name << "|" << vectors->name(l.vec);
      if (l.pending != kNoId) name << "|push:" << alphabet->name(l.pending);
      LetterId id = alphabet->add(name.str(), alphabet->is_bottom(l.rk));
      letter_by_idx.push_back(id);
      letter_info.emplace(id, l);
      return id;
    }
    return letter_by_idx.at(idx);
  }

  LfLetter view(LetterId l) const {
    auto it = letter_info.find(l);
    if (it != letter_info.end()) return it->second;
    return LfLetter{l, kNoId, kNoId};
  }

  State intern_protocol(const LfState& s) {
    uint32_t before = static_cast<uint32_t>(protocol.size());
    uint32_t idx = protocol.intern(s);
    if (idx == before) {
      std::ostringstream name;
      Owner owner = Owner::Eloise;
      Color color = std::max<Color>(d, 1);
      switch (s.kind) {
        case LfState::Kind::Bang:
          name << states->name(s.base) << "!";
          owner = Owner::Eloise;
          color = d;
          break;
        case LfState::Kind::Query:
          name << states->name(s.base) << "?";
          owner = Owner::Abelard;
          color = d;
          break;
        case LfState::Kind::Jump:
          name << states->name(s.base) << "^" << s.color;
          owner = Owner::Abelard;
          color = s.color;
          break;
        case LfState::Kind::TT:
          name << "tt";
          color = 0;
          break;
        case LfState::Kind::FF:
          name << "ff";
          color = 1;
          break;
      }
      State id = states->add(name.str(), owner, color);
      protocol_by_idx.push_back(id);
      state_info.emplace(id, s);
      return id;
    }
    return protocol_by_idx.at(idx);
  }
};

State LinkFree::tt() const { return impl->tt_state; }
State LinkFree::ff() const { return impl->ff_state; }

bool LinkFree::is_protocol_state(State q) const { return impl->state_info.count(q) > 0; }

State LinkFree::base_of(State q) const {
  auto it = impl->state_info.find(q);
  return it == impl->state_info.end() ? q : it->second.base;
}

LetterId LinkFree::plain(LetterId rk_letter) const { return rk_letter; }

LetterId LinkFree::with_vector(LetterId rk_letter, uint32_t vec) const {
  return impl->intern_lf_letter(LfLetter{rk_letter, vec, kNoId});
}

std::optional<uint32_t> LinkFree::vector_of(LetterId lf_letter) const {
  auto v = impl->view(lf_letter);
  return v.vec == kNoId ? std::nullopt : std::optional<uint32_t>(v.vec);
}

LetterId LinkFree::rk_letter_of(LetterId lf_letter) const { return impl->view(lf_letter).rk; }

LinkFree transform_linkfree(const CpdaGameSpec& rk_spec,
                            std::function<Color(State, LetterId)> link_rank,
                            std::function<int(LetterId)> link_order_of,
                            std::vector<State> claim_universe, Color d, size_t vec_cap) {
  auto im = std::make_shared<LinkFree::Impl>();
  im->rk = rk_spec;
  im->link_rank = std::move(link_rank);
  im->link_order_of = std::move(link_order_of);
  im->vectors = std::make_shared<ClaimVectors>(std::move(claim_universe), d);
  im->d = d;
  im->n = rk_spec.cpda.order;
  im->vec_cap = vec_cap;
  im->alphabet = rk_spec.cpda.alphabet;
  im->states = rk_spec.cpda.states;
  im->tt_state = im->intern_protocol(LfState{LfState::Kind::TT, 0, 0});
  im->ff_state = im->intern_protocol(LfState{LfState::Kind::FF, 0, 0});

  LinkFree lf;
  lf.impl = im;
  lf.vectors = im->vectors;
  lf.out = rk_spec;
  lf.out.max_color = std::max<Color>(d, 1);

  auto rk_delta = rk_spec.cpda.delta;
  int n = im->n;
  lf.out.cpda.delta = [im, rk_delta, n](State q, LetterId observed) -> std::vector<TransitionRule> {
    std::vector<TransitionRule> out;
    LfLetter L = im->view(observed);
    auto st = im->state_info.find(q);
    if (st != im->state_info.end()) {
      switch (st->second.kind) {
        case LfState::Kind::TT:
        case LfState::Kind::FF:
          out.push_back({q, std::nullopt, StackOp::id()});
          return out;
        case LfState::Kind::Jump:
          out.push_back({st->second.base, std::nullopt, StackOp::pop(n)});
          return out;
        case LfState::Kind::Bang: {
          if (L.pending == kNoId) return out;
          State query = im->intern_protocol(LfState{LfState::Kind::Query, st->second.base, 0});
          for (uint32_t vec : im->vectors->enumerate_all(im->vec_cap)) {
            LetterId pushed = im->intern_lf_letter(LfLetter{L.pending, vec, kNoId});
            out.push_back({query, std::nullopt, StackOp::push1(pushed, 1)});
          }
          return out;
        }
        case LfState::Kind::Query: {
          out.push_back({st->second.base, std::nullopt, StackOp::id()});
          if (L.vec == kNoId) return out;
          for (Color i = 0; i <= im->d; ++i) {
            for (State r : im->vectors->component(L.vec, i)) {
              State ji = im->intern_protocol(LfState{LfState::Kind::Jump, r, i});
              out.push_back({ji, std::nullopt, StackOp::id()});
            }
          }
          return out;
        }
      }
    }

    // Base states mirror the rank-aware rules index-for-index.
    for (const auto& rule : rk_delta(q, L.rk)) {
      auto combine = [&](std::optional<LetterId> rew,
                         LetterId pending) -> std::optional<LetterId> {
        if (!rew && pending == L.pending) return std::nullopt;
        LetterId base = rew ? *rew : L.rk;
        return im->intern_lf_letter(LfLetter{base, L.vec, pending});
      };
      if (rule.op.kind == OpKind::Push1 && rule.op.level == n) {
        State bang = im->intern_protocol(LfState{LfState::Kind::Bang, rule.target, 0});
        out.push_back({bang, combine(rule.rewrite, rule.op.letter), StackOp::id()});
      } else if (rule.op.kind == OpKind::Collapse && im->link_order_of(L.rk) == n) {
        if (L.vec == kNoId) {
          // No claim recorded: never reachable along simulation plays.
          out.push_back({im->ff_state, std::nullopt, StackOp::id()});
          continue;
        }
        Color l = im->link_rank(q, observed);
        bool good = l != kNoLink && im->vectors->member(L.vec, l, rule.target);
        out.push_back({good ? im->tt_state : im->ff_state, std::nullopt, StackOp::id()});
      } else {
        TransitionRule r2 = rule;
        r2.rewrite = combine(rule.rewrite, kNoId);
        out.push_back(r2);
      }
    }
    return out;
  };
  return lf;
}

Config nu_linkfree(const LinkFree& lf, const CpdaGameSpec& rk_spec,
                   const std::function<std::set<State>(const HOStack&)>& winners_after_collapse,
                   const Config& c) {
  auto im = lf.impl;
  int n = rk_spec.cpda.order;
  std::function<HOStack(const HOStack&, const std::vector<HOStack>&)> walk =
      [&](const HOStack& s, const std::vector<HOStack>& top_prefix) -> HOStack {
    if (s.order() == 1) {
      std::vector<StackSymbol> sy = s.symbols();
      for (size_t i = 0; i < sy.size(); ++i) {
        if (!sy[i].link || sy[i].link->order != n) continue;
        int k = sy[i].link->target_height;
        HOStack target;
        if (n == 1) {
          std::vector<StackSymbol> trunc(sy.begin(), sy.begin() + k);
          target = HOStack::leaf(std::move(trunc));
        } else {
          std::vector<HOStack> kept(top_prefix.begin(), top_prefix.begin() + k);
          target = HOStack::node(std::move(kept));
        }
        std::set<State> winners = winners_after_collapse(target);
        std::vector<std::set<State>> sets(static_cast<size_t>(im->d) + 1, winners);
        sy[i].letter = lf.with_vector(sy[i].letter, im->vectors->intern(sets));
        sy[i].link = CollapseLink{1, static_cast<int>(i)};
      }
      return HOStack::leaf(std::move(sy));
    }
    std::vector<HOStack> ms = s.members();
    for (auto& m : ms) m = walk(m, top_prefix);
    return HOStack::node(std::move(ms));
  };

  if (n == 1) return Config{c.state, walk(c.stack, {})};
  std::vector<HOStack> ms = c.stack.members();
  for (size_t j = 0; j < ms.size(); ++j) {
    std::vector<HOStack> prefix(c.stack.members().begin(), c.stack.members().begin() + j);
    ms[j] = walk(ms[j], prefix);
  }
  return Config{c.state, HOStack::node(std::move(ms))};
}

// ---------------------------------------------------------------------------
// Region lift.

namespace {

struct LfRegionLift : StackAutomatonBase {
  LinkFree lf;
  StackAutomatonRef under;
  std::vector<State> state_universe;
  int n = 1;

  uint64_t initial() const override { return under->initial(); }
  uint64_t read(uint64_t st, ASym a) const override { return under->read(st, a); }

  uint64_t read_linked(uint64_t st, ASym a, int e, uint64_t target) const override {
    if (e < n) return under->read_linked(st, a, e, target);
    // n-link: the image carries the acceptance closure of the target as its
    // claimed sets, and a dummy 1-link to the symbol directly below.
    std::set<State> winners = acc_set(*under, target, 1, state_universe);
    std::vector<std::set<State>> sets(static_cast<size_t>(lf.vectors->max_color()) + 1, winners);
    LetterId annotated = lf.with_vector(a.id, lf.vectors->intern(sets));
    return under->read_linked(st, ASym::letter(annotated), 1, st);
  }

  bool is_final(uint64_t st) const override { return under->is_final(st); }
  bool reads_state_suffix() const override { return true; }
};

}  // namespace

StackAutomatonRef lift_region_linkfree(const LinkFree& lf, StackAutomatonRef lf_region,
                                       std::vector<State> state_universe) {
  auto out = std::make_shared<LfRegionLift>();
  out->lf = lf;
  out->under = std::move(lf_region);
  out->state_universe = std::move(state_universe);
  out->n = lf.impl->n;
  return out;
}

}  // namespace cpg
