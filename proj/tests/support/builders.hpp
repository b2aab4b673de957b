#pragma once

// Shared fixtures: the paper-style example machines and random generators
// used across the test suites.

#include <map>
#include <memory>
#include <vector>

#include "cpg/game.hpp"

namespace cpgtest {

using namespace cpg;

struct TableSpecBuilder {
  CpdaGameSpec spec;
  std::shared_ptr<std::map<std::pair<State, LetterId>, std::vector<TransitionRule>>> table =
      std::make_shared<std::map<std::pair<State, LetterId>, std::vector<TransitionRule>>>();

  TableSpecBuilder(int order, AlphabetRef alphabet, StateTableRef states, State initial) {
    spec.cpda.order = order;
    spec.cpda.alphabet = std::move(alphabet);
    spec.cpda.states = std::move(states);
    spec.cpda.initial_state = initial;
    spec.cpda.initial_stack = HOStack::bottom(order, spec.cpda.alphabet->bottom());
    auto t = table;
    spec.cpda.delta = [t](State q, LetterId a) -> std::vector<TransitionRule> {
      auto it = t->find({q, a});
      return it == t->end() ? std::vector<TransitionRule>{} : it->second;
    };
  }

  void rule(State from, LetterId top, State to, std::optional<LetterId> rew, StackOp op) {
    (*table)[{from, top}].push_back({to, rew, op});
  }

  CpdaGameSpec finish() {
    Color d = 0;
    for (State q = 0; q < spec.cpda.states->size(); ++q)
      d = std::max(d, spec.cpda.states->color(q));
    spec.max_color = d;
    return spec;
  }
};

/// The 2-CPDA of the paper's a^n b^n c^n example. Colours: q_sharp -> 0,
/// everything else 1; all states owned by Eloise. With `absorbing`, q_sharp
/// gets an explicit self-loop (the reachability-game variant).
inline CpdaGameSpec anbncn(bool absorbing) {
  auto ab = std::make_shared<Alphabet>();
  LetterId bot = ab->add("_", true);
  LetterId alpha = ab->add("a");
  auto st = std::make_shared<StateTable>();
  State qa_t = st->add("qa~", Owner::Eloise, 1);
  State qa = st->add("qa", Owner::Eloise, 1);
  State qb_t = st->add("qb~", Owner::Eloise, 1);
  State qb = st->add("qb", Owner::Eloise, 1);
  State qc_t = st->add("qc~", Owner::Eloise, 1);
  State qc = st->add("qc", Owner::Eloise, 1);
  State qs = st->add("q#", Owner::Eloise, 0);

  TableSpecBuilder b(2, ab, st, qa_t);
  b.rule(qa_t, bot, qa, std::nullopt, StackOp::push1(alpha, 1));
  b.rule(qa, alpha, qa, std::nullopt, StackOp::push1(alpha, 1));
  b.rule(qa, alpha, qb_t, std::nullopt, StackOp::push(2));
  b.rule(qb_t, alpha, qb, std::nullopt, StackOp::pop(1));
  b.rule(qb, alpha, qb, std::nullopt, StackOp::pop(1));
  b.rule(qb, bot, qc_t, std::nullopt, StackOp::pop(2));
  b.rule(qc_t, alpha, qc, std::nullopt, StackOp::pop(1));
  b.rule(qc, alpha, qc, std::nullopt, StackOp::pop(1));
  b.rule(qc, bot, qs, std::nullopt, StackOp::id());
  if (absorbing) b.rule(qs, bot, qs, std::nullopt, StackOp::id());
  return b.finish();
}

/// Random exploration helpers.
inline HOStack random_stack(Rng& rng, const Alphabet& ab, int order, int ops) {
  std::vector<LetterId> letters;
  for (LetterId a = 0; a < ab.size(); ++a)
    if (!ab.is_bottom(a)) letters.push_back(a);
  HOStack s = HOStack::bottom(order, ab.bottom());
  for (int i = 0; i < ops; ++i) {
    StackOp op;
    switch (rng.below(5)) {
      case 0: op = StackOp::push1(letters[rng.below(letters.size())], rng.range(1, order)); break;
      case 1: op = order >= 2 ? StackOp::push(rng.range(2, order)) : StackOp::id(); break;
      case 2: op = StackOp::pop(rng.range(1, order)); break;
      case 3: op = StackOp::rewrite(letters[rng.below(letters.size())]); break;
      default: op = StackOp::collapse(); break;
    }
    auto t = apply(op, s, ab);
    if (t) s = std::move(*t);
  }
  return s;
}

}  // namespace cpgtest
