#include "cpg/rankaware.hpp"

#include <algorithm>
#include <sstream>

namespace cpg {

// ---------------------------------------------------------------------------
// Indexed stacks (reference semantics).

namespace {

struct IdxSym {
  int64_t index = 0;       // step at which the symbol last stopped being top_1
  int64_t link_birth = 0;  // step at which its link was created
};

struct IdxStack {
  int order = 1;
  std::vector<IdxStack> subs;
  std::vector<IdxSym> syms;

  static IdxStack mirror(const HOStack& s) {
    IdxStack t;
    t.order = s.order();
    if (s.order() == 1) {
      t.syms.assign(s.symbols().size(), IdxSym{});
    } else {
      for (const auto& m : s.members()) t.subs.push_back(mirror(m));
    }
    return t;
  }

  IdxStack& top_sub(int i) {  // the top (i-1)-stack, i >= 2
    IdxStack* s = this;
    while (s->order >= i) s = &s->subs.back();
    return *s;
  }
  IdxStack& top_leaf() {
    IdxStack* s = this;
    while (s->order > 1) s = &s->subs.back();
    return *s;
  }
  IdxSym& top_sym() { return top_leaf().syms.back(); }
  const IdxSym& top_sym() const { return const_cast<IdxStack*>(this)->top_sym(); }

  void apply(const StackOp& op, const HOStack& before, int64_t step) {
    switch (op.kind) {
      case OpKind::Id:
      case OpKind::Rewrite:
        return;
      case OpKind::Pop: {
        IdxStack& lvl = op.level == order ? *this : top_sub(op.level + 1);
        if (op.level == 1) {
          lvl.top_leaf().syms.pop_back();
        } else {
          lvl.subs.pop_back();
        }
        return;
      }
      case OpKind::Push1: {
        top_sym().index = step;
        top_leaf().syms.push_back(IdxSym{-1, step});
        return;
      }
      case OpKind::Push: {
        IdxStack& lvl = op.level == order ? *this : top_sub(op.level + 1);
        IdxStack copy = lvl.subs.back();
        lvl.subs.push_back(std::move(copy));
        // The buried ex-top (the lower copy's top symbol) gets this step.
        lvl.subs[lvl.subs.size() - 2].top_leaf().syms.back().index = step;
        return;
      }
      case OpKind::Collapse: {
        const StackSymbol& t = before.top_symbol();
        int e = t.link->order;
        int keep = t.link->target_height;
        IdxStack& lvl = e == order ? *this : top_sub(e + 1);
        if (e == 1) {
          lvl.top_leaf().syms.resize(static_cast<size_t>(keep));
        } else {
          lvl.subs.resize(static_cast<size_t>(keep));
        }
        return;
      }
    }
  }
};

// Index of the top symbol of pop_k(s) / collapse(s), or nullopt if undefined.
std::optional<int64_t> exposed_by(const IdxStack& is, const HOStack& s, const StackOp& op,
                                  const Alphabet& ab) {
  auto popped = apply(op, s, ab);
  if (!popped) return std::nullopt;
  IdxStack t = is;
  t.apply(op, s, 0);
  return t.top_sym().index;
}

}  // namespace

RankTrace track_path(const CpdaGameSpec& spec, const std::vector<Config>& path) {
  if (path.empty()) throw UsageError("track_path: empty path");
  RankTrace out;
  std::vector<Color> colors;
  for (const auto& c : path) colors.push_back(spec.color(c.state));
  auto window_min = [&](int64_t from, size_t to) {
    Color m = colors[static_cast<size_t>(from)];
    for (size_t i = static_cast<size_t>(from); i <= to; ++i) m = std::min(m, colors[i]);
    return m;
  };

  IdxStack idx = IdxStack::mirror(path[0].stack);
  std::vector<IdxStack> snapshots{idx};
  for (size_t t = 1; t < path.size(); ++t) {
    auto moves = successors_with_moves(spec.cpda, path[t - 1]);
    const Move* used = nullptr;
    for (const auto& [m, cfg] : moves)
      if (cfg == path[t]) {
        used = &m;
        break;
      }
    if (!used) throw UsageError("track_path: invalid edge at step " + std::to_string(t));
    HOStack pre = path[t - 1].stack;
    if (used->rewrite) pre = *apply(StackOp::rewrite(*used->rewrite), pre, *spec.cpda.alphabet);
    idx.apply(used->op, pre, static_cast<int64_t>(t));
    snapshots.push_back(idx);
  }

  for (size_t m = 0; m < path.size(); ++m) {
    RankTraceRow row;
    row.theta = window_min(0, m);
    const HOStack& s = path[m].stack;
    const IdxStack& is = snapshots[m];
    const StackSymbol& top = s.top_symbol();
    row.top_link_order = top.link ? top.link->order : 0;
    if (top.link) {
      int64_t b = is.top_sym().link_birth;
      row.link = {static_cast<size_t>(b), window_min(b, m)};
      auto ca = exposed_by(is, s, StackOp::collapse(), *spec.cpda.alphabet);
      if (ca) row.collapse = {static_cast<size_t>(*ca), window_min(*ca, m)};
    }
    row.pop.resize(static_cast<size_t>(s.order()));
    for (int k = 1; k <= s.order(); ++k) {
      auto pa = exposed_by(is, s, StackOp::pop(k), *spec.cpda.alphabet);
      if (pa) row.pop[static_cast<size_t>(k) - 1] = {static_cast<size_t>(*pa), window_min(*pa, m)};
    }
    out.rows.push_back(std::move(row));
  }
  return out;
}

std::string trace_to_text(const RankTrace& t) {
  std::ostringstream os;
  for (size_t i = 0; i < t.rows.size(); ++i) {
    const auto& r = t.rows[i];
    os << "v" << i << " theta=" << r.theta;
    if (r.link) os << " link=(v" << r.link->first << "," << r.link->second << ")";
    if (r.collapse) os << " collapse=(v" << r.collapse->first << "," << r.collapse->second << ")";
    for (size_t k = 0; k < r.pop.size(); ++k)
      if (r.pop[k])
        os << " pop" << (k + 1) << "=(v" << r.pop[k]->first << "," << r.pop[k]->second << ")";
    os << "\n";
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// The rank-aware transform.

namespace {

struct RkLetter {
  LetterId base = 0;
  RankAnn ann;
  int link_order = 0;

  friend bool operator==(const RkLetter&, const RkLetter&) = default;
};

struct RkLetterHash {
  size_t operator()(const RkLetter& l) const {
    size_t h = l.base;
    hash_mix(h, static_cast<size_t>(l.link_order));
    hash_mix(h, static_cast<size_t>(l.ann.mc + 7));
    hash_mix(h, static_cast<size_t>(l.ann.ml + 7));
    for (Color c : l.ann.tau) hash_mix(h, static_cast<size_t>(c + 7));
    return h;
  }
};

struct RepairInfoHash {
  size_t operator()(const RepairInfo& r) const {
    size_t h = static_cast<size_t>(r.k);
    hash_mix(h, static_cast<size_t>(r.u + 7));
    for (Color c : r.upper) hash_mix(h, static_cast<size_t>(c + 7));
    hash_mix(h, static_cast<size_t>(r.rho + 7));
    hash_mix(h, static_cast<size_t>(r.theta + 7));
    return h;
  }
};

std::string ann_name(const RankAnn& a) {
  std::ostringstream os;
  os << "{" << (a.mc == kLoop ? std::string("o") : std::to_string(a.mc)) << ",";
  if (a.ml == kLoop)
    os << "o";
  else if (a.ml == kNoLink)
    os << "+";
  else
    os << a.ml;
  os << ",";
  if (a.unsettled()) {
    os << "o";
  } else {
    for (size_t i = 0; i < a.tau.size(); ++i) os << (i ? "." : "") << a.tau[i];
  }
  os << "}";
  return os.str();
}

}  // namespace

struct RankAware::Impl {
  CpdaGameSpec in;
  int n = 1;
  Color d = 0;
  AlphabetRef alphabet = std::make_shared<Alphabet>();
  StateTableRef plain_states = std::make_shared<StateTable>();
  Interner<RkLetter, RkLetterHash> letters;
  Interner<uint64_t> plains;  // key = q * (d+1) + theta
  Interner<RepairInfo, RepairInfoHash> repairs;
  Normalized norm;

  LetterId intern_letter(const RkLetter& l) {
    uint32_t before = static_cast<uint32_t>(letters.size());
    LetterId id = letters.intern(l);
    if (id == before) {
      std::ostringstream name;
      name << in.cpda.alphabet->name(l.base) << "~" << ann_name(l.ann) << "e" << l.link_order;
      alphabet->add(name.str(), in.cpda.alphabet->is_bottom(l.base));
    }
    return id;
  }

  State intern_plain(State q, Color theta) {
    uint64_t key = static_cast<uint64_t>(q) * static_cast<uint64_t>(d + 1) +
                   static_cast<uint64_t>(theta);
    uint32_t before = static_cast<uint32_t>(plains.size());
    State id = plains.intern(key);
    if (id == before)
      plain_states->add(in.cpda.states->name(q) + "@" + std::to_string(theta),
                        in.cpda.states->owner(q), in.cpda.states->color(q));
    return id;
  }

  RankAnn repaired(const RepairInfo& r, const RankAnn& exposed) const {
    RankAnn out;
    if (exposed.unsettled()) {
      if (exposed.mc != kLoop || (exposed.ml != kLoop && exposed.ml != kNoLink))
        throw UsageError("mixed unsettled annotation");
      out.mc = r.theta;
      out.ml = exposed.ml == kNoLink ? kNoLink : r.theta;
      out.tau.assign(static_cast<size_t>(n), r.theta);
      return out;
    }
    out.mc = std::min({exposed.mc, r.u, r.rho});
    out.ml = exposed.ml == kNoLink ? kNoLink : std::min({exposed.ml, r.u, r.rho});
    out.tau.resize(static_cast<size_t>(n));
    for (int i = 1; i <= n; ++i) {
      if (i <= r.k) {
        out.tau[static_cast<size_t>(i) - 1] =
            std::min({exposed.tau[static_cast<size_t>(i) - 1], r.u, r.rho});
      } else {
        out.tau[static_cast<size_t>(i) - 1] =
            std::min(r.upper[static_cast<size_t>(i - r.k) - 1], r.rho);
      }
    }
    return out;
  }
};

Config RankAware::nu(const Config& c) const {
  auto& im = *impl;
  Color rq = im.in.color(c.state);
  int n = im.n;
  std::function<HOStack(const HOStack&, bool)> walk = [&](const HOStack& s,
                                                          bool contains_top) -> HOStack {
    if (s.order() == 1) {
      std::vector<StackSymbol> sy = s.symbols();
      for (size_t i = 0; i < sy.size(); ++i) {
        bool top = contains_top && i + 1 == sy.size();
        int e = sy[i].link ? sy[i].link->order : 0;
        RankAnn ann;
        if (top) {
          ann.mc = rq;
          ann.ml = e == n ? rq : kNoLink;
          ann.tau.assign(static_cast<size_t>(n), rq);
        } else {
          ann.mc = kLoop;
          ann.ml = e == n ? kLoop : kNoLink;
        }
        sy[i].letter = im.intern_letter(RkLetter{sy[i].letter, ann, e});
      }
      return HOStack::leaf(std::move(sy));
    }
    std::vector<HOStack> ms = s.members();
    for (size_t i = 0; i < ms.size(); ++i)
      ms[i] = walk(ms[i], contains_top && i + 1 == ms.size());
    return HOStack::node(std::move(ms));
  };
  return Config{im.intern_plain(c.state, rq), walk(c.stack, true)};
}

Config RankAware::zeta(const Config& c) const {
  auto& im = *impl;
  auto pr = im.norm.project(c.state);
  if (!pr) throw UsageError("zeta on helper state");
  State base = static_cast<State>(im.plains.at(pr->first) / static_cast<uint64_t>(im.d + 1));
  return Config{base, map_letters(c.stack, [&](LetterId l) { return im.letters.at(l).base; })};
}

RankAnn RankAware::effective_ann(State q, LetterId observed) const {
  LetterId eff = impl->norm.effective_top(q, observed);
  return impl->letters.at(eff).ann;
}

int RankAware::link_order_of(LetterId l) const { return impl->letters.at(l).link_order; }

Color RankAware::link_rank(State q, LetterId observed) const {
  return effective_ann(q, observed).ml;
}

State RankAware::base_state(State q) const {
  auto pr = impl->norm.project(q);
  if (!pr) throw UsageError("base_state on helper");
  return static_cast<State>(impl->plains.at(pr->first) / static_cast<uint64_t>(impl->d + 1));
}

Color RankAware::theta_of(State q) const {
  auto pr = impl->norm.project(q);
  if (!pr) throw UsageError("theta on helper");
  return static_cast<Color>(impl->plains.at(pr->first) % static_cast<uint64_t>(impl->d + 1));
}

LetterId RankAware::letter_base(LetterId l) const { return impl->letters.at(l).base; }

State RankAware::plain_state(State base, Color theta) const {
  return impl->intern_plain(base, theta);
}

LetterId RankAware::intern_letter(LetterId base, const RankAnn& ann, int link_order) const {
  return impl->intern_letter(RkLetter{base, ann, link_order});
}

std::vector<State> RankAware::collapse_claim_universe(
    const std::vector<std::pair<State, TransitionRule>>& collapse_rules) const {
  auto& im = *impl;
  std::set<State> out;
  for (const auto& [q, rule] : collapse_rules) {
    Color rho = im.in.color(rule.target);
    for (Color theta2 = 0; theta2 <= std::min(rho, im.d); ++theta2) {
      for (int k = 1; k <= im.n; ++k) {
        std::vector<Color> upper(static_cast<size_t>(im.n - k), 0);
        std::function<void(size_t)> rec = [&](size_t i) {
          if (i == upper.size()) {
            for (Color u = 0; u <= im.d; ++u) {
              RepairInfo r{k, u, upper, rho, theta2};
              uint32_t fn = im.repairs.intern(r);
              State plain = im.intern_plain(rule.target, theta2);
              out.insert(im.norm.pend_state_for_repair(plain, fn));
            }
            return;
          }
          for (Color c = 0; c <= im.d; ++c) {
            upper[i] = c;
            rec(i + 1);
          }
        };
        rec(0);
      }
    }
  }
  return std::vector<State>(out.begin(), out.end());
}

std::vector<State> RankAware::pop_claim_universe(
    const std::vector<std::pair<State, TransitionRule>>& pop_rules) const {
  auto& im = *impl;
  std::set<State> out;
  for (const auto& [q, rule] : pop_rules) {
    Color rho = im.in.color(rule.target);
    for (Color theta2 = 0; theta2 <= std::min(rho, im.d); ++theta2) {
      for (Color u = 0; u <= im.d; ++u) {
        RepairInfo r{im.n, u, {}, rho, theta2};
        uint32_t fn = im.repairs.intern(r);
        State plain = im.intern_plain(rule.target, theta2);
        out.insert(im.norm.pend_state_for_repair(plain, fn));
      }
    }
  }
  return std::vector<State>(out.begin(), out.end());
}

RankAware rank_aware(const CpdaGameSpec& spec) {
  auto im = std::make_shared<RankAware::Impl>();
  im->in = spec;
  im->n = spec.cpda.order;
  im->d = spec.max_color;

  CompositeCpda comp;
  comp.order = spec.cpda.order;
  comp.alphabet = im->alphabet;
  comp.states = im->plain_states;
  comp.repair_apply = [im](uint32_t fn, LetterId observed) -> LetterId {
    const RepairInfo& r = im->repairs.at(fn);
    const RkLetter& ex = im->letters.at(observed);
    return im->intern_letter(RkLetter{ex.base, im->repaired(r, ex.ann), ex.link_order});
  };
  comp.delta = [im](State qs, LetterId letter) -> std::vector<CompositeRule> {
    uint64_t key = im->plains.at(qs);
    State q = static_cast<State>(key / static_cast<uint64_t>(im->d + 1));
    Color theta = static_cast<Color>(key % static_cast<uint64_t>(im->d + 1));
    const RkLetter cur = im->letters.at(letter);
    if (cur.ann.unsettled()) throw UsageError("unsettled annotation on an effective top");
    std::vector<CompositeRule> out;
    int n = im->n;
    for (const auto& rule : im->in.cpda.delta(q, cur.base)) {
      LetterId gamma = rule.rewrite ? *rule.rewrite : cur.base;
      Color rho = im->in.color(rule.target);
      Color theta2 = std::min(theta, rho);
      CompositeRule cr;
      cr.target = im->intern_plain(rule.target, theta2);
      auto minc = [](Color a, Color b) { return a == kNoLink ? kNoLink : std::min(a, b); };
      switch (rule.op.kind) {
        case OpKind::Id: {
          RankAnn ann = cur.ann;
          ann.mc = std::min(ann.mc, rho);
          ann.ml = minc(ann.ml, rho);
          for (auto& t : ann.tau) t = std::min(t, rho);
          cr.ops.push_back(
              StackOp::rewrite(im->intern_letter(RkLetter{gamma, ann, cur.link_order})));
          cr.ops.push_back(StackOp::id());
          break;
        }
        case OpKind::Push1: {
          int e = rule.op.level;
          RankAnn nb;
          // A 1-link targets the former top symbol itself, whose ancestor
          // becomes the current step; higher links target top_e(pop_e).
          nb.mc = e == 1 ? rho : std::min(cur.ann.tau[static_cast<size_t>(e) - 1], rho);
          nb.ml = e == n ? rho : kNoLink;
          nb.tau.resize(static_cast<size_t>(n));
          nb.tau[0] = rho;
          for (int i = 2; i <= n; ++i)
            nb.tau[static_cast<size_t>(i) - 1] =
                std::min(cur.ann.tau[static_cast<size_t>(i) - 1], rho);
          if (rule.rewrite)
            cr.ops.push_back(
                StackOp::rewrite(im->intern_letter(RkLetter{gamma, cur.ann, cur.link_order})));
          cr.ops.push_back(StackOp::push1(im->intern_letter(RkLetter{rule.op.letter, nb, e}), e));
          break;
        }
        case OpKind::Push: {
          int j = rule.op.level;
          RankAnn nb = cur.ann;
          nb.mc = std::min(nb.mc, rho);
          nb.ml = minc(nb.ml, rho);
          for (int i = 1; i <= n; ++i)
            nb.tau[static_cast<size_t>(i) - 1] =
                i == j ? rho : std::min(nb.tau[static_cast<size_t>(i) - 1], rho);
          cr.ops.push_back(
              StackOp::rewrite(im->intern_letter(RkLetter{gamma, cur.ann, cur.link_order})));
          cr.ops.push_back(StackOp::push(j));
          cr.ops.push_back(
              StackOp::rewrite(im->intern_letter(RkLetter{gamma, nb, cur.link_order})));
          break;
        }
        case OpKind::Pop: {
          int k = rule.op.level;
          if (rule.rewrite)
            cr.ops.push_back(
                StackOp::rewrite(im->intern_letter(RkLetter{gamma, cur.ann, cur.link_order})));
          cr.ops.push_back(StackOp::pop(k));
          RepairInfo r{k, cur.ann.tau[static_cast<size_t>(k) - 1],
                       std::vector<Color>(cur.ann.tau.begin() + k, cur.ann.tau.end()), rho,
                       theta2};
          cr.repair = im->repairs.intern(r);
          break;
        }
        case OpKind::Collapse: {
          if (cur.link_order == 0) continue;
          int k = cur.link_order;
          if (rule.rewrite)
            cr.ops.push_back(
                StackOp::rewrite(im->intern_letter(RkLetter{gamma, cur.ann, cur.link_order})));
          cr.ops.push_back(StackOp::collapse());
          RepairInfo r{k, cur.ann.mc,
                       std::vector<Color>(cur.ann.tau.begin() + k, cur.ann.tau.end()), rho,
                       theta2};
          cr.repair = im->repairs.intern(r);
          break;
        }
        case OpKind::Rewrite:
          throw UsageError("rewrite in op slot");
      }
      out.push_back(std::move(cr));
    }
    return out;
  };

  Color rho0 = spec.color(spec.cpda.initial_state);
  comp.initial_state = im->intern_plain(spec.cpda.initial_state, rho0);
  comp.initial_stack = spec.cpda.initial_stack;  // placeholder until nu below

  RankAware rk;
  rk.impl = im;
  im->norm = normalize(comp);
  rk.out.cpda = im->norm.cpda;
  rk.out.max_color = spec.max_color;
  Config nu0 = rk.nu({spec.cpda.initial_state, spec.cpda.initial_stack});
  rk.out.cpda.initial_state = nu0.state;
  rk.out.cpda.initial_stack = nu0.stack;
  return rk;
}

// ---------------------------------------------------------------------------
// Region lift through nu.

namespace {

struct LiftState {
  uint64_t r = 0;
  bool has_buffer = false;
  LetterId base = 0;
  int link_order = 0;
  uint64_t target = 0;
  std::vector<int8_t> brackets;  // +1 open, -1 close after the buffered symbol
  bool done = false;
  bool final_bit = false;

  friend bool operator==(const LiftState&, const LiftState&) = default;
};

struct LiftStateHash {
  size_t operator()(const LiftState& s) const {
    size_t h = s.r;
    hash_mix(h, s.has_buffer);
    hash_mix(h, s.base);
    hash_mix(h, static_cast<size_t>(s.link_order));
    hash_mix(h, s.target);
    for (int8_t b : s.brackets) hash_mix(h, static_cast<size_t>(b + 2));
    hash_mix(h, static_cast<size_t>(s.done * 2 + s.final_bit));
    return h;
  }
};

struct RkLift : StackAutomatonBase {
  RankAware rk;
  StackAutomatonRef under;
  mutable Interner<LiftState, LiftStateHash> states;

  uint64_t intern(const LiftState& s) const { return states.intern(s); }

  // Underlying state with the buffered symbol flushed as an internal symbol
  // plus the trailing brackets.
  uint64_t project(uint64_t id) const {
    LiftState s = states.at(id);
    uint64_t r = s.r;
    if (s.has_buffer) {
      int e = s.link_order;
      RankAnn ann;
      ann.mc = kLoop;
      ann.ml = e == rk.out.cpda.order ? kLoop : kNoLink;
      LetterId img = rk.intern_letter(s.base, ann, e);
      if (e == 0) {
        r = under->read(r, ASym::letter(img));
      } else {
        r = under->read_linked(r, ASym::letter(img), e, project(s.target));
      }
    }
    for (int8_t b : s.brackets) r = under->read(r, b > 0 ? ASym::open() : ASym::close());
    return r;
  }

  uint64_t initial() const override { return intern(LiftState{under->initial()}); }

  uint64_t read(uint64_t id, ASym a) const override {
    LiftState s = states.at(id);
    if (s.done) return id;
    switch (a.kind) {
      case ASym::Kind::Open:
      case ASym::Kind::Close: {
        if (!s.has_buffer) {
          s.r = under->read(s.r, a);
        } else {
          s.brackets.push_back(a.kind == ASym::Kind::Open ? 1 : -1);
        }
        return intern(s);
      }
      case ASym::Kind::Letter:
        return read_linked(id, a, 0, 0);
      case ASym::Kind::StateL: {
        uint64_t r = s.r;
        if (s.has_buffer) {
          Color rq = rk.impl->in.color(a.id);
          int n = rk.out.cpda.order;
          RankAnn ann;
          ann.mc = rq;
          ann.ml = s.link_order == n ? rq : kNoLink;
          ann.tau.assign(static_cast<size_t>(n), rq);
          LetterId img = rk.intern_letter(s.base, ann, s.link_order);
          if (s.link_order == 0) {
            r = under->read(r, ASym::letter(img));
          } else {
            r = under->read_linked(r, ASym::letter(img), s.link_order, project(s.target));
          }
          for (int8_t b : s.brackets) r = under->read(r, b > 0 ? ASym::open() : ASym::close());
        }
        r = under->read(r, ASym::state(rk.plain_state(a.id, rk.impl->in.color(a.id))));
        LiftState out;
        out.r = r;
        out.done = true;
        out.final_bit = under->is_final(r);
        return intern(out);
      }
    }
    throw UsageError("bad symbol");
  }

  uint64_t read_linked(uint64_t id, ASym a, int e, uint64_t target) const override {
    LiftState s = states.at(id);
    if (s.done) return id;
    LiftState out;
    out.r = project(id);
    out.has_buffer = true;
    out.base = a.id;
    out.link_order = e;
    out.target = target;
    return intern(out);
  }

  bool is_final(uint64_t id) const override {
    const LiftState& s = states.at(id);
    if (!s.done) throw UsageError("is_final before the control state");
    return s.final_bit;
  }
  bool reads_state_suffix() const override { return true; }
};

}  // namespace

StackAutomatonRef lift_region_rankaware(const RankAware& rk, StackAutomatonRef rk_region) {
  auto out = std::make_shared<RkLift>();
  out->rk = rk;
  out->under = std::move(rk_region);
  return out;
}

std::vector<std::pair<State, TransitionRule>> enumerate_rules(
    const CpdaGameSpec& spec, const std::function<bool(const TransitionRule&)>& want) {
  std::vector<std::pair<State, TransitionRule>> out;
  for (State q = 0; q < spec.cpda.states->size(); ++q)
    for (LetterId a = 0; a < spec.cpda.alphabet->size(); ++a)
      for (const auto& r : spec.cpda.delta(q, a))
        if (want(r)) out.emplace_back(q, r);
  return out;
}

}  // namespace cpg
