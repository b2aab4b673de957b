#include "cpg/regsets.hpp"

#include "doctest.h"
#include "support/builders.hpp"
#include "support/flatten_oracle.hpp"

using namespace cpg;
using namespace cpgtest;

namespace {

AlphabetRef small_alphabet() {
  auto ab = std::make_shared<Alphabet>();
  ab->add("_", true);
  ab->add("a");
  ab->add("b");
  return ab;
}

DenseStackAutomaton random_automaton(Rng& rng, uint32_t R, uint32_t L, uint32_t Q) {
  DenseStackAutomaton a(R, L, Q, true);
  a.set_initial(static_cast<uint32_t>(rng.below(R)));
  for (uint32_t r = 0; r < R; ++r) {
    a.set_final(r, rng.chance(0.4));
    for (LetterId l = 0; l < L; ++l) a.set2(r, ASym::letter(l), static_cast<uint32_t>(rng.below(R)));
    a.set2(r, ASym::open(), static_cast<uint32_t>(rng.below(R)));
    a.set2(r, ASym::close(), static_cast<uint32_t>(rng.below(R)));
    for (State q = 0; q < Q; ++q) a.set2(r, ASym::state(q), static_cast<uint32_t>(rng.below(R)));
    for (LetterId l = 0; l < L; ++l)
      for (uint32_t t = 0; t < R; ++t) a.set3(r, l, t, static_cast<uint32_t>(rng.below(R)));
  }
  return a;
}

// Slow reference: encoding from the word-level oracle, run as a plain loop.
bool slow_accepts(const DenseStackAutomaton& aut, const HOStack& s, State q) {
  WordStack w = WordStack::from(s);
  std::vector<uint32_t> after(w.word.size() + 1);
  after[0] = static_cast<uint32_t>(aut.initial());
  for (size_t i = 0; i < w.word.size(); ++i) {
    const auto& t = w.word[i];
    size_t pos = i + 1;
    auto it = w.target.find(pos);
    if (t.kind == FlattenEncoding::Tok::Open) {
      after[pos] = aut.get2(after[pos - 1], ASym::open());
    } else if (t.kind == FlattenEncoding::Tok::Close) {
      after[pos] = aut.get2(after[pos - 1], ASym::close());
    } else if (it == w.target.end()) {
      after[pos] = aut.get2(after[pos - 1], ASym::letter(t.letter));
    } else {
      after[pos] = aut.get3(after[pos - 1], t.letter, after[it->second]);
    }
  }
  return aut.final_state(aut.get2(after[w.word.size()], ASym::state(q)));
}

}  // namespace

TEST_CASE("accepts: trivial and parity-counter automata") {
  auto ab = small_alphabet();
  uint32_t L = static_cast<uint32_t>(ab->size());

  DenseStackAutomaton all(1, L, 2, true);
  all.set_final(0, true);
  Rng rng(1);
  for (int i = 0; i < 30; ++i) {
    Config c{static_cast<State>(rng.below(2)), random_stack(rng, *ab, 2, 15)};
    CHECK(accepts(all, c));
  }

  // Counts non-bottom letters mod 2.
  DenseStackAutomaton par(2, L, 1, true);
  for (uint32_t r = 0; r < 2; ++r) {
    par.set2(r, ASym::open(), r);
    par.set2(r, ASym::close(), r);
    par.set2(r, ASym::letter(ab->bottom()), r);
    par.set2(r, ASym::letter(ab->find("a")), 1 - r);
    par.set2(r, ASym::letter(ab->find("b")), 1 - r);
    for (uint32_t t = 0; t < 2; ++t) {
      par.set3(r, ab->find("a"), t, 1 - r);
      par.set3(r, ab->find("b"), t, 1 - r);
      par.set3(r, ab->bottom(), t, r);
    }
    par.set2(r, ASym::state(0), r);
  }
  par.set_final(1, true);
  Config one{0, stack_from_text("[[ _ a@(1,1) ]]", *ab)};
  Config two{0, stack_from_text("[[ _ a@(1,1) a@(1,2) ]]", *ab)};
  CHECK(accepts(par, one));
  CHECK(!accepts(par, two));
}

TEST_CASE("acceptance equals the slow reference interpreter") {
  auto ab = small_alphabet();
  Rng rng(88);
  for (int trial = 0; trial < 100; ++trial) {
    auto aut = random_automaton(rng, static_cast<uint32_t>(rng.range(2, 4)),
                                static_cast<uint32_t>(ab->size()), 2);
    for (int i = 0; i < 10; ++i) {
      HOStack s = random_stack(rng, *ab, rng.range(1, 3), 20);
      State q = static_cast<State>(rng.below(2));
      CHECK(accepts(aut, Config{q, s}) == slow_accepts(aut, s, q));
    }
  }
}

TEST_CASE("boolean algebra") {
  auto ab = small_alphabet();
  Rng rng(5150);
  auto a1 = random_automaton(rng, 2, static_cast<uint32_t>(ab->size()), 2);
  auto a2 = random_automaton(rng, 3, static_cast<uint32_t>(ab->size()), 2);
  auto a3 = random_automaton(rng, 2, static_cast<uint32_t>(ab->size()), 2);

  auto uni = boolean(a1, a2, BoolKind::Union);
  auto inter = boolean(a1, a2, BoolKind::Intersection);
  CHECK(uni.num_states() == a1.num_states() * a2.num_states());
  CHECK(inter.num_states() == a1.num_states() * a2.num_states());

  auto notnot = complement(complement(a1));
  auto a1_and_not = boolean(a1, complement(a1), BoolKind::Intersection);
  auto demorgan_l = complement(boolean(a1, a3, BoolKind::Union));
  auto demorgan_r = boolean(complement(a1), complement(a3), BoolKind::Intersection);

  for (int i = 0; i < 500; ++i) {
    Config c{static_cast<State>(rng.below(2)), random_stack(rng, *ab, rng.range(1, 2), 12)};
    bool b1 = accepts(a1, c), b2 = accepts(a2, c), b3 = accepts(a3, c);
    CHECK(accepts(uni, c) == (b1 || b2));
    CHECK(accepts(inter, c) == (b1 && b2));
    CHECK(accepts(notnot, c) == b1);
    CHECK(!accepts(a1_and_not, c));
    CHECK(accepts(demorgan_l, c) == !(b1 || b3));
    CHECK(accepts(demorgan_r, c) == accepts(demorgan_l, c));
  }
}

TEST_CASE("specialize fixes the control-state letter") {
  auto ab = small_alphabet();
  Rng rng(220);
  auto aut = random_automaton(rng, 3, static_cast<uint32_t>(ab->size()), 3);
  auto all_final = [&] {
    DenseStackAutomaton a(1, static_cast<uint32_t>(ab->size()), 3, true);
    a.set_final(0, true);
    return a;
  }();
  for (State q = 0; q < 3; ++q) {
    auto sp = specialize(aut, q);
    auto spall = specialize(all_final, q);
    for (int i = 0; i < 200; ++i) {
      HOStack s = random_stack(rng, *ab, rng.range(1, 2), 10);
      CHECK(accepts_stack(sp, s) == accepts(aut, Config{q, s}));
      CHECK(accepts_stack(spall, s));
    }
  }
  // An automaton accepting only q1 configurations rejects everything at q2.
  DenseStackAutomaton only1(2, static_cast<uint32_t>(ab->size()), 3, true);
  for (uint32_t r = 0; r < 2; ++r) {
    for (LetterId l = 0; l < ab->size(); ++l) {
      only1.set2(r, ASym::letter(l), r);
      for (uint32_t t = 0; t < 2; ++t) only1.set3(r, l, t, r);
    }
    only1.set2(r, ASym::open(), r);
    only1.set2(r, ASym::close(), r);
    only1.set2(r, ASym::state(0), 0);
    only1.set2(r, ASym::state(1), 1);
    only1.set2(r, ASym::state(2), 0);
  }
  only1.set_final(1, true);
  auto sp2 = specialize(only1, 2);
  for (int i = 0; i < 50; ++i)
    CHECK(!accepts_stack(sp2, random_stack(rng, *ab, 2, 10)));
}

TEST_CASE("oracle product agrees with direct oracle evaluation") {
  auto ab = small_alphabet();
  uint32_t L = static_cast<uint32_t>(ab->size());

  // Oracle 1: the member's top letter is 'a'. A small DFA over 1-stacks.
  DenseStackAutomaton topa(3, L, 2, false);
  // state 0: neutral / last was not a; 1: last was a; start at 0.
  for (uint32_t r = 0; r < 3; ++r) {
    topa.set2(r, ASym::open(), r == 2 ? 2u : 0u);
    topa.set2(r, ASym::close(), r);
    topa.set2(r, ASym::letter(ab->bottom()), 0);
    topa.set2(r, ASym::letter(ab->find("a")), 1);
    topa.set2(r, ASym::letter(ab->find("b")), 0);
    for (LetterId l = 0; l < L; ++l)
      for (uint32_t t = 0; t < 3; ++t)
        topa.set3(r, l, t, topa.get2(r, ASym::letter(l)));
    for (State q = 0; q < 2; ++q) topa.set2(r, ASym::state(q), r);
  }
  topa.set_final(1, true);

  // ob: parity of the number of members satisfying the oracle; also checks
  // the control state.
  OracleAutomaton ob;
  ob.num_states = 2;
  ob.initial = 0;
  ob.num_oracles = 1;
  ob.delta = [](uint32_t p, const std::vector<bool>& bits) { return bits[0] ? 1 - p : p; };
  ob.accepts_state = [](uint32_t p, State q) { return p == 1 && q == 0; };

  auto prod = compile_oracle_product(ob, {&topa}, 2, L, 2);
  CHECK(prod.num_states() == 3u * 2u * 3u + 2u);  // (n+1)*|P|*|C1| + sinks

  Rng rng(321);
  auto bit = [&](uint32_t, const HOStack& m) {
    return m.top_symbol().letter == ab->find("a");
  };
  for (int i = 0; i < 200; ++i) {
    Config c{static_cast<State>(rng.below(2)), random_stack(rng, *ab, 2, 14)};
    CHECK(accepts(prod, c) == oracle_eval(ob, c, bit));
  }

  // k = 0 oracles: a plain automaton over the bracket skeleton.
  OracleAutomaton counter;
  counter.num_states = 3;
  counter.initial = 0;
  counter.num_oracles = 0;
  counter.delta = [](uint32_t p, const std::vector<bool>&) { return (p + 1) % 3; };
  counter.accepts_state = [](uint32_t p, State) { return p == 2; };
  auto prod0 = compile_oracle_product(counter, {}, 2, L, 2);
  for (int i = 0; i < 100; ++i) {
    Config c{static_cast<State>(rng.below(2)), random_stack(rng, *ab, 2, 14)};
    CHECK(accepts(prod0, c) == (c.stack.height() % 3 == 2));
  }

  // Positional bottom oracle: accept iff the play of bits ever saw the first
  // member flagged (sanity: p ends 1 iff at least one member, trivially true)
  // and the first member's oracle bit matters only there.
  OracleAutomaton bo;
  bo.num_states = 2;
  bo.initial = 0;
  bo.num_oracles = 2;
  bo.bottom_oracle = 0;
  bo.delta = [](uint32_t p, const std::vector<bool>& bits) {
    // Remember whether the bottom member's top letter was 'a'.
    return bits[0] ? (bits[1] ? 1u : 0u) : p;
  };
  bo.accepts_state = [](uint32_t p, State) { return p == 1; };
  auto prodb = compile_oracle_product(bo, {&topa}, 2, L, 2);
  CHECK(prodb.num_states() == 3u * 2u * 3u * 2u + 2u);
  for (int i = 0; i < 200; ++i) {
    Config c{static_cast<State>(rng.below(2)), random_stack(rng, *ab, 2, 14)};
    CHECK(accepts(prodb, c) == oracle_eval(bo, c, bit));
  }
}

TEST_CASE("automaton json round trip") {
  auto ab = small_alphabet();
  Rng rng(808);
  auto aut = random_automaton(rng, 3, static_cast<uint32_t>(ab->size()), 2);
  auto back = automaton_from_json(automaton_to_json(aut));
  for (int i = 0; i < 100; ++i) {
    Config c{static_cast<State>(rng.below(2)), random_stack(rng, *ab, 2, 10)};
    CHECK(accepts(aut, c) == accepts(back, c));
  }
  CHECK(automaton_to_json(aut) == automaton_to_json(back));
}

namespace {

// Joint walk of A and A': every reachable A'-vertex projects through chi
// onto the corresponding A-vertex, the projected successor sets agree, and
// F-membership matches direct acceptance of the projected configuration.
void check_annotation(const CpdaGameSpec& spec, const DenseStackAutomaton& b, size_t budget) {
  auto res = annotate_with_regular_test(spec.cpda, b);
  auto zeta = [&](const Config& c) {
    return Config{res.chi(c.state), map_letters(c.stack, res.letter_base)};
  };
  auto key = [&](const Config& c) {
    return std::to_string(c.state) + "|" + stack_to_text(c.stack, *spec.cpda.alphabet);
  };
  std::set<std::string> seen;  // keyed on the A' side
  auto pkey = [&](const Config& c) {
    return std::to_string(c.state) + "|" + stack_to_text(c.stack, *res.cpda.alphabet);
  };
  std::vector<std::pair<Config, Config>> queue{{spec.cpda.initial(), res.cpda.initial()}};
  size_t checked = 0;
  while (!queue.empty() && checked < budget) {
    auto [v, vp] = queue.back();
    queue.pop_back();
    if (!seen.insert(pkey(vp)).second) continue;
    ++checked;
    Config z = zeta(vp);
    REQUIRE(key(z) == key(v));
    CHECK(res.in_F(vp.state) == accepts(b, z));
    auto sa = successors(spec.cpda, v);
    auto sp = successors(res.cpda, vp);
    std::set<std::string> saks;
    for (const auto& w : sa) saks.insert(key(w));
    std::set<std::string> spks;
    std::map<std::string, Config> rep;
    for (const auto& wp : sp) {
      Config wz = zeta(wp);
      spks.insert(key(wz));
      rep[key(wz)] = wp;
      for (const auto& w : sa)
        if (key(w) == key(wz)) queue.push_back({w, wp});
    }
    CHECK(saks == spks);
  }
  CHECK(checked >= budget);
}

}  // namespace

TEST_CASE("regular-test annotation at order 1: stack height parity") {
  auto ab = small_alphabet();
  auto st = std::make_shared<StateTable>();
  State q0 = st->add("q0");
  State q1 = st->add("q1");
  TableSpecBuilder bld(1, ab, st, q0);
  bld.rule(q0, ab->bottom(), q0, std::nullopt, StackOp::push1(ab->find("a"), 1));
  bld.rule(q0, ab->find("a"), q0, std::nullopt, StackOp::push1(ab->find("a"), 1));
  bld.rule(q0, ab->find("a"), q0, std::nullopt, StackOp::push1(ab->find("b"), 1));
  bld.rule(q0, ab->find("b"), q1, std::nullopt, StackOp::push1(ab->find("a"), 1));
  bld.rule(q1, ab->find("a"), q0, std::nullopt, StackOp::pop(1));
  bld.rule(q1, ab->find("b"), q1, {ab->find("a")}, StackOp::pop(1));
  bld.rule(q1, ab->find("a"), q1, std::nullopt, StackOp::collapse());
  auto spec = bld.finish();

  // b: the number of symbols is even (any control state).
  uint32_t L = static_cast<uint32_t>(ab->size());
  DenseStackAutomaton b(2, L, 2, true);
  for (uint32_t r = 0; r < 2; ++r) {
    b.set2(r, ASym::open(), r);
    b.set2(r, ASym::close(), r);
    for (LetterId l = 0; l < L; ++l) {
      b.set2(r, ASym::letter(l), 1 - r);
      for (uint32_t t = 0; t < 2; ++t) b.set3(r, l, t, 1 - r);
    }
    for (State q = 0; q < 2; ++q) b.set2(r, ASym::state(q), r);
  }
  b.set_final(0, true);
  check_annotation(spec, b, 400);
}

TEST_CASE("regular-test annotation at order 2 with 2-links, |R| = 3") {
  auto ab = small_alphabet();
  auto st = std::make_shared<StateTable>();
  State q0 = st->add("q0");
  State q1 = st->add("q1");
  TableSpecBuilder bld(2, ab, st, q0);
  LetterId a = ab->find("a"), bb = ab->find("b");
  bld.rule(q0, ab->bottom(), q0, std::nullopt, StackOp::push1(a, 1));
  bld.rule(q0, a, q0, std::nullopt, StackOp::push1(a, 1));
  bld.rule(q0, a, q1, std::nullopt, StackOp::push(2));
  bld.rule(q1, a, q1, std::nullopt, StackOp::push1(bb, 2));
  bld.rule(q1, bb, q0, {a}, StackOp::push1(bb, 2));
  bld.rule(q0, bb, q1, std::nullopt, StackOp::collapse());
  bld.rule(q1, bb, q1, std::nullopt, StackOp::pop(1));
  bld.rule(q1, a, q0, std::nullopt, StackOp::pop(2));
  auto spec = bld.finish();

  // b over configurations, |R| = 3: counts 'b'-letters mod 3, accepts 0 at q0
  // and 1 at q1.
  uint32_t L = static_cast<uint32_t>(ab->size());
  DenseStackAutomaton b(3, L, 2, true);
  for (uint32_t r = 0; r < 3; ++r) {
    b.set2(r, ASym::open(), r);
    b.set2(r, ASym::close(), r);
    b.set2(r, ASym::letter(ab->bottom()), r);
    b.set2(r, ASym::letter(a), r);
    b.set2(r, ASym::letter(bb), (r + 1) % 3);
    for (uint32_t t = 0; t < 3; ++t) {
      b.set3(r, ab->bottom(), t, r);
      b.set3(r, a, t, (r + t) % 3);  // link-sensitive on purpose
      b.set3(r, bb, t, (r + 1 + t) % 3);
    }
    b.set2(r, ASym::state(q0), r == 0 ? 4 % 3 : (r + 2) % 3);
    b.set2(r, ASym::state(q1), (r + 1) % 3);
  }
  b.set_final(1, true);
  check_annotation(spec, b, 1000);
}
