#include "cpg/orderreduce.hpp"

#include <algorithm>
#include <sstream>

namespace cpg {

namespace {

std::string tag_name(const TildeTag& t, const StateTable& st, const ClaimVectors& vecs) {
  std::ostringstream os;
  switch (t.kind) {
    case TildeTag::Kind::TT: return "TT";
    case TildeTag::Kind::FF: return "FF";
    case TildeTag::Kind::Main:
      os << "m(" << st.name(t.q) << "," << vecs.name(t.rvec) << "," << t.theta
         << (t.bottom ? ",b" : "") << ")";
      break;
    case TildeTag::Kind::Pend:
      os << "p(" << st.name(t.q) << "," << vecs.name(t.rvec) << "," << t.theta
         << (t.bottom ? ",b" : "") << "->" << st.name(t.push_target) << ")";
      break;
    case TildeTag::Kind::Claim:
      os << "c(" << st.name(t.q) << "," << vecs.name(t.rvec) << "," << t.theta
         << (t.bottom ? ",b" : "") << "->" << st.name(t.push_target) << ","
         << vecs.name(t.rvec2) << ")";
      break;
    case TildeTag::Kind::Jump:
      os << "j(" << st.name(t.q) << "," << vecs.name(t.rvec) << "," << t.theta
         << (t.bottom ? ",b" : "") << "#" << t.jump_color << ")";
      break;
  }
  return os.str();
}

Owner tag_owner(const TildeTag& t, const CpdaGameSpec& src) {
  switch (t.kind) {
    case TildeTag::Kind::Main: return src.owner(t.q);
    case TildeTag::Kind::Pend: return Owner::Eloise;
    case TildeTag::Kind::Claim: return Owner::Abelard;
    case TildeTag::Kind::Jump: return Owner::Abelard;
    default: return Owner::Eloise;
  }
}

Color tag_color(const TildeTag& t, const CpdaGameSpec& src, Color d) {
  switch (t.kind) {
    case TildeTag::Kind::Main: return src.color(t.q);
    case TildeTag::Kind::Pend:
    case TildeTag::Kind::Claim: return d;
    case TildeTag::Kind::Jump: return t.jump_color;
    case TildeTag::Kind::TT: return 0;
    case TildeTag::Kind::FF: return 1;
  }
  return d;
}

}  // namespace

// ---------------------------------------------------------------------------
// Finite simulation game (order-1 inputs).

TildeFinite::TildeFinite(CpdaGameSpec source, std::shared_ptr<ClaimVectors> vectors,
                         size_t vec_cap, size_t game_cap)
    : source_(std::move(source)), vectors_(std::move(vectors)), vec_cap_(vec_cap),
      game_cap_(game_cap) {
  if (source_.cpda.order != 1) throw UsageError("TildeFinite expects an order-1 source");
}

uint32_t TildeFinite::vertex(const TildeTag& tag, LetterId letter) {
  VKey key{tag, letter};
  uint32_t before = static_cast<uint32_t>(verts_.size());
  uint32_t id = verts_.intern(key);
  if (id == before) {
    if (game_.size() >= game_cap_)
      throw ResourceError("cap-base-game", "finite simulation game exceeds " +
                                               std::to_string(game_cap_) + " vertices");
    game_.add(tag_owner(tag, source_), tag_color(tag, source_, source_.max_color),
              tag_name(tag, *source_.cpda.states, *vectors_) + "/" +
                  source_.cpda.alphabet->name(letter));
    solved_ = false;
  }
  return id;
}

void TildeFinite::edges_for(uint32_t v) {
  const VKey key = verts_.at(v);
  const TildeTag& t = key.tag;
  LetterId a = key.letter;
  const auto& ab = *source_.cpda.alphabet;
  Color d = source_.max_color;
  auto add = [&](uint32_t w) { game_.add_edge(v, w); };

  switch (t.kind) {
    case TildeTag::Kind::TT:
    case TildeTag::Kind::FF:
      add(v);
      return;
    case TildeTag::Kind::Jump: {
      TildeTag m{TildeTag::Kind::Main, t.q, t.rvec, t.theta, t.bottom, 0, 0, 0, 0};
      add(vertex(m, a));
      return;
    }
    case TildeTag::Kind::Pend: {
      for (uint32_t vec : vectors_->enumerate_all(vec_cap_)) {
        TildeTag c = t;
        c.kind = TildeTag::Kind::Claim;
        c.rvec2 = vec;
        add(vertex(c, a));
      }
      return;
    }
    case TildeTag::Kind::Claim: {
      TildeTag pursue{TildeTag::Kind::Main, t.push_target, t.rvec2,
                      source_.color(t.push_target), false, 0, 0, 0, 0};
      add(vertex(pursue, t.push_letter));
      for (Color i = 0; i <= d; ++i) {
        for (State s : vectors_->component(t.rvec2, i)) {
          Color th = std::min({t.theta, i, source_.color(s)});
          TildeTag j{TildeTag::Kind::Jump, s, t.rvec, th, t.bottom, 0, 0, 0, i};
          add(vertex(j, a));
        }
      }
      return;
    }
    case TildeTag::Kind::Main: {
      bool tt_edge = false, ff_edge = false;
      for (const auto& rule : source_.cpda.delta(t.q, a)) {
        // Move definedness: a rewrite must stay on the same side of bottom.
        if (rule.rewrite && ab.is_bottom(*rule.rewrite) != ab.is_bottom(a)) continue;
        LetterId alpha = rule.rewrite ? *rule.rewrite : a;
        Color rho = source_.color(rule.target);
        switch (rule.op.kind) {
          case OpKind::Id: {
            TildeTag m{TildeTag::Kind::Main, rule.target, t.rvec, std::min(t.theta, rho),
                       t.bottom, 0, 0, 0, 0};
            add(vertex(m, alpha));
            break;
          }
          case OpKind::Push1: {
            if (rule.op.level != 1) throw UsageError("order-1 reduce: push1 level");
            TildeTag p{TildeTag::Kind::Pend, t.q, t.rvec, t.theta, t.bottom,
                       rule.target, rule.op.letter, 0, 0};
            add(vertex(p, alpha));
            break;
          }
          case OpKind::Pop: {
            if (t.bottom) break;  // popping the bottom level is undefined
            if (vectors_->member(t.rvec, t.theta, rule.target)) {
              tt_edge = true;
            } else {
              ff_edge = true;
            }
            break;
          }
          case OpKind::Collapse:
            throw UsageError("order-1 reduce requires a collapse-free machine");
          default:
            throw UsageError("order-1 reduce: unexpected op");
        }
      }
      if (tt_edge) add(vertex(TildeTag{TildeTag::Kind::TT, 0, 0, 0, false, 0, 0, 0, 0}, a));
      if (ff_edge) add(vertex(TildeTag{TildeTag::Kind::FF, 0, 0, 0, false, 0, 0, 0, 0}, a));
      if (game_.succ[v].empty()) {
        // Dead-end main (stuck simulated configuration): the stuck player
        // loses, mirroring the dead-end completion convention.
        TildeTag sink = game_.vertices[v].owner == Owner::Eloise
                            ? TildeTag{TildeTag::Kind::FF, 0, 0, 0, false, 0, 0, 0, 0}
                            : TildeTag{TildeTag::Kind::TT, 0, 0, 0, false, 0, 0, 0, 0};
        add(vertex(sink, a));
      }
      return;
    }
  }
}

void TildeFinite::explore() {
  while (expanded_ < game_.size()) {
    edges_for(static_cast<uint32_t>(expanded_));
    ++expanded_;
  }
}

const FiniteParityGame& TildeFinite::game() {
  explore();
  return game_;
}

const FiniteSolve& TildeFinite::solution() {
  explore();
  if (!solved_) {
    solve_ = solve_finite(game_);
    solved_ = true;
  }
  return solve_;
}

Owner TildeFinite::winner(uint32_t v) {
  solution();
  return solve_.winner[v];
}

const TildeTag& TildeFinite::tag_of(uint32_t v) const { return verts_.at(v).tag; }
LetterId TildeFinite::letter_of(uint32_t v) const { return verts_.at(v).letter; }

// ---------------------------------------------------------------------------
// Order reduction for order >= 2 inputs.

struct Reduction::Impl {
  CpdaGameSpec src;
  std::shared_ptr<ClaimVectors> vectors;
  Color d = 0;
  int n = 1;
  size_t vec_cap = 0;
  StateTableRef table = std::make_shared<StateTable>();
  mutable Interner<TildeTag, TildeTagHash> tags;
  mutable std::vector<State> by_idx;

  State intern(const TildeTag& t) const {
    uint32_t before = static_cast<uint32_t>(tags.size());
    uint32_t idx = tags.intern(t);
    if (idx == before) {
      State id = const_cast<StateTable&>(*table).add(tag_name(t, *src.cpda.states, *vectors),
                                                     tag_owner(t, src), tag_color(t, src, d));
      by_idx.push_back(id);
      return id;
    }
    return by_idx.at(idx);
  }
};

State Reduction::intern_tag(const TildeTag& t) const { return impl->intern(t); }

const TildeTag& Reduction::tag_of(State q) const { return impl->tags.at(q); }

bool Reduction::is_tilde_state(State q) const { return q < impl->tags.size(); }

Config Reduction::initial_tilde() const {
  const auto& src = impl->src;
  TildeTag t{TildeTag::Kind::Main, src.cpda.initial_state, impl->vectors->empty_vector(),
             src.color(src.cpda.initial_state), true, 0, 0, 0, 0};
  if (input_order == 1) throw UsageError("initial_tilde on an order-1 reduction");
  return Config{impl->intern(t), src.cpda.initial_stack.members().back()};
}

std::vector<State> Reduction::mains_over(const std::vector<State>& lf_targets,
                                         size_t vec_cap) const {
  std::vector<State> out;
  const auto& all = impl->vectors->enumerate_all(vec_cap);
  for (State q : lf_targets) {
    for (uint32_t vec : all) {
      for (Color theta = 0; theta <= impl->d; ++theta) {
        for (int b = 0; b < 2; ++b) {
          TildeTag t{TildeTag::Kind::Main, q, vec, theta, b == 1, 0, 0, 0, 0};
          out.push_back(impl->intern(t));
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Reduction reduce_once(const CpdaGameSpec& lf_spec, std::vector<State> pop_universe, Color d,
                      size_t vec_cap, size_t game_cap) {
  Reduction red;
  red.input_order = lf_spec.cpda.order;
  red.source = lf_spec;
  red.vectors = std::make_shared<ClaimVectors>(std::move(pop_universe), d);

  if (lf_spec.cpda.order == 1) {
    red.finite = std::make_shared<TildeFinite>(lf_spec, red.vectors, vec_cap, game_cap);
    return red;
  }

  auto im = std::make_shared<Reduction::Impl>();
  im->src = lf_spec;
  im->vectors = red.vectors;
  im->d = d;
  im->n = lf_spec.cpda.order;
  im->vec_cap = vec_cap;
  red.impl = im;

  CpdaGameSpec tilde;
  tilde.cpda.order = lf_spec.cpda.order - 1;
  tilde.cpda.alphabet = lf_spec.cpda.alphabet;
  tilde.cpda.states = im->table;
  tilde.max_color = std::max<Color>(d, 1);
  int n = im->n;

  tilde.cpda.delta = [im, n](State qs, LetterId observed) -> std::vector<TransitionRule> {
    std::vector<TransitionRule> out;
    const TildeTag t = im->tags.at(qs);
    const auto& src = im->src;
    const auto& ab = *src.cpda.alphabet;
    Color d = im->d;
    switch (t.kind) {
      case TildeTag::Kind::TT:
      case TildeTag::Kind::FF:
        out.push_back({qs, std::nullopt, StackOp::id()});
        return out;
      case TildeTag::Kind::Jump: {
        TildeTag m{TildeTag::Kind::Main, t.q, t.rvec, t.theta, t.bottom, 0, 0, 0, 0};
        out.push_back({im->intern(m), std::nullopt, StackOp::id()});
        return out;
      }
      case TildeTag::Kind::Pend: {
        for (uint32_t vec : im->vectors->enumerate_all(im->vec_cap)) {
          TildeTag c = t;
          c.kind = TildeTag::Kind::Claim;
          c.rvec2 = vec;
          out.push_back({im->intern(c), std::nullopt, StackOp::id()});
        }
        return out;
      }
      case TildeTag::Kind::Claim: {
        TildeTag pursue{TildeTag::Kind::Main, t.push_target, t.rvec2,
                        src.color(t.push_target), false, 0, 0, 0, 0};
        out.push_back({im->intern(pursue), std::nullopt, StackOp::id()});
        for (Color i = 0; i <= d; ++i) {
          for (State s : im->vectors->component(t.rvec2, i)) {
            Color th = std::min({t.theta, i, src.color(s)});
            TildeTag j{TildeTag::Kind::Jump, s, t.rvec, th, t.bottom, 0, 0, 0, i};
            out.push_back({im->intern(j), std::nullopt, StackOp::id()});
          }
        }
        return out;
      }
      case TildeTag::Kind::Main: {
        bool tt_edge = false, ff_edge = false;
        for (const auto& rule : src.cpda.delta(t.q, observed)) {
          Color rho = src.color(rule.target);
          if (rule.op.kind == OpKind::Pop && rule.op.level == n) {
            if (t.bottom) continue;
            if (rule.rewrite && ab.is_bottom(*rule.rewrite) != ab.is_bottom(observed)) continue;
            if (im->vectors->member(t.rvec, t.theta, rule.target)) {
              tt_edge = true;
            } else {
              ff_edge = true;
            }
          } else if (rule.op.kind == OpKind::Push && rule.op.level == n) {
            TildeTag p{TildeTag::Kind::Pend, t.q, t.rvec, t.theta, t.bottom,
                       rule.target, 0, 0, 0};
            out.push_back({im->intern(p), rule.rewrite, StackOp::id()});
          } else if (rule.op.kind == OpKind::Push1 && rule.op.level == n) {
            throw UsageError("order reduction requires a link-free machine");
          } else {
            TildeTag m{TildeTag::Kind::Main, rule.target, t.rvec, std::min(t.theta, rho),
                       t.bottom, 0, 0, 0, 0};
            out.push_back({im->intern(m), rule.rewrite, rule.op});
          }
        }
        if (tt_edge)
          out.push_back({im->intern(TildeTag{TildeTag::Kind::TT, 0, 0, 0, false, 0, 0, 0, 0}),
                         std::nullopt, StackOp::id()});
        if (ff_edge)
          out.push_back({im->intern(TildeTag{TildeTag::Kind::FF, 0, 0, 0, false, 0, 0, 0, 0}),
                         std::nullopt, StackOp::id()});
        return out;
      }
    }
    return out;
  };

  Config init = red.initial_tilde();
  tilde.cpda.initial_state = init.state;
  tilde.cpda.initial_stack = init.stack;
  red.tilde = tilde;
  return red;
}

}  // namespace cpg
