#include "cpg/rankaware.hpp"

#include "doctest.h"
#include "support/builders.hpp"

using namespace cpg;
using namespace cpgtest;

namespace {

// The order-3 indexed-stack walk from the worked figure: twelve operations
// with the displayed colours.
struct FigurePath {
  CpdaGameSpec spec;
  std::vector<Config> path;
};

FigurePath figure_path() {
  auto ab = std::make_shared<Alphabet>();
  ab->add("_", true);
  LetterId a = ab->add("a");
  LetterId b = ab->add("b");
  LetterId g = ab->add("g");
  std::vector<Color> colors = {3, 0, 1, 5, 3, 2, 4, 6, 5, 6, 4, 3, 2};
  auto st = std::make_shared<StateTable>();
  for (size_t i = 0; i < colors.size(); ++i)
    st->add("s" + std::to_string(i), Owner::Eloise, colors[i]);

  struct Step {
    std::optional<LetterId> rew;
    StackOp op;
  };
  std::vector<Step> steps = {
      {std::nullopt, StackOp::push1(b, 1)}, {a, StackOp::push(2)},
      {std::nullopt, StackOp::pop(1)},      {std::nullopt, StackOp::push1(a, 1)},
      {std::nullopt, StackOp::push1(b, 2)}, {std::nullopt, StackOp::push(3)},
      {std::nullopt, StackOp::push1(g, 3)}, {std::nullopt, StackOp::push(2)},
      {std::nullopt, StackOp::pop(1)},      {std::nullopt, StackOp::collapse()},
      {std::nullopt, StackOp::pop(3)},      {std::nullopt, StackOp::push1(g, 1)},
  };

  HOStack s0 = stack_from_text("[[[ _ a@(1,1) ]][[ _ ]]]", *ab);
  TableSpecBuilder bld(3, ab, st, 0);
  std::vector<Config> path{{0, s0}};
  for (size_t i = 0; i < steps.size(); ++i) {
    HOStack cur = path.back().stack;
    LetterId top = cur.top_symbol().letter;
    bld.rule(static_cast<State>(i), top, static_cast<State>(i + 1), steps[i].rew, steps[i].op);
    HOStack next = cur;
    if (steps[i].rew) next = *apply(StackOp::rewrite(*steps[i].rew), next, *ab);
    auto res = apply(steps[i].op, next, *ab);
    REQUIRE(res);
    path.push_back({static_cast<State>(i + 1), *res});
  }
  return {bld.finish(), path};
}

}  // namespace

TEST_CASE("track_path reproduces the worked figure's ranks") {
  auto fp = figure_path();
  auto trace = track_path(fp.spec, fp.path);
  REQUIRE(trace.rows.size() == 13);

  // Link-ancestors and ranks.
  REQUIRE(trace.rows[8].link);
  CHECK(trace.rows[8].link->first == 7);
  CHECK(trace.rows[8].link->second == 5);
  REQUIRE(trace.rows[11].link);
  CHECK(trace.rows[11].link->first == 5);
  CHECK(trace.rows[11].link->second == 2);

  // Collapse-ancestors and ranks.
  REQUIRE(trace.rows[8].collapse);
  CHECK(trace.rows[8].collapse->first == 6);
  CHECK(trace.rows[8].collapse->second == 4);
  REQUIRE(trace.rows[9].collapse);
  CHECK(trace.rows[9].collapse->first == 2);
  CHECK(trace.rows[9].collapse->second == 1);

  // Pop-ranks at v9 for k = 3, 2, 1.
  REQUIRE(trace.rows[9].pop[2]);
  CHECK(trace.rows[9].pop[2]->first == 6);
  CHECK(trace.rows[9].pop[2]->second == 4);
  REQUIRE(trace.rows[9].pop[1]);
  CHECK(trace.rows[9].pop[1]->first == 8);
  CHECK(trace.rows[9].pop[1]->second == 5);
  REQUIRE(trace.rows[9].pop[0]);
  CHECK(trace.rows[9].pop[0]->first == 5);
  CHECK(trace.rows[9].pop[0]->second == 2);

  // Pop-ranks at v12.
  CHECK(trace.rows[12].pop[2]->second == 0);
  CHECK(trace.rows[12].pop[1]->second == 1);
  CHECK(trace.rows[12].pop[0]->first == 12);
  CHECK(trace.rows[12].pop[0]->second == 2);

  // The dump format stays stable for golden comparisons.
  auto text = trace_to_text(trace);
  CHECK(text.find("v8 theta=0 link=(v7,5) collapse=(v6,4)") != std::string::npos);

  CHECK_THROWS_AS(track_path(fp.spec, {fp.path[0], fp.path[5]}), UsageError);
}

namespace {

CpdaGameSpec random_collapsible_game(Rng& rng, int order, int nstates, int ncolors) {
  auto ab = std::make_shared<Alphabet>();
  ab->add("_", true);
  ab->add("x");
  ab->add("y");
  auto st = std::make_shared<StateTable>();
  for (int i = 0; i < nstates; ++i)
    st->add("q" + std::to_string(i), rng.chance(0.5) ? Owner::Eloise : Owner::Abelard,
            static_cast<Color>(rng.below(static_cast<uint64_t>(ncolors))));
  TableSpecBuilder bld(order, ab, st, 0);
  std::vector<LetterId> letters = {ab->find("x"), ab->find("y")};
  for (State q = 0; q < st->size(); ++q) {
    for (LetterId a = 0; a < ab->size(); ++a) {
      int nrules = rng.range(1, 3);
      for (int r = 0; r < nrules; ++r) {
        State to = static_cast<State>(rng.below(st->size()));
        std::optional<LetterId> rew;
        if (rng.chance(0.3)) rew = letters[rng.below(2)];
        StackOp op;
        switch (rng.below(6)) {
          case 0:
          case 1: op = StackOp::push1(letters[rng.below(2)], rng.range(1, order)); break;
          case 2: op = order >= 2 ? StackOp::push(rng.range(2, order)) : StackOp::id(); break;
          case 3: op = StackOp::pop(rng.range(1, order)); break;
          case 4: op = StackOp::collapse(); break;
          default: op = StackOp::id(); break;
        }
        bld.rule(q, a, to, rew, op);
      }
    }
  }
  return bld.finish();
}

}  // namespace

TEST_CASE("rank-aware machine stores exactly the tracked ranks") {
  Rng rng(271828);
  int games = 0, positions = 0;
  while (games < 20) {
    int order = rng.range(1, 3);
    auto spec = random_collapsible_game(rng, order, rng.range(2, 4), rng.range(2, 4));
    auto rk = rank_aware(spec);
    ++games;

    for (int walk = 0; walk < 50; ++walk) {
      std::vector<Config> path{spec.cpda.initial()};
      for (int step = 0; step < 14; ++step) {
        auto morig = successors_with_moves(spec.cpda, path.back());
        if (morig.empty()) break;
        size_t pick = rng.below(morig.size());
        path.push_back(morig[pick].second);
      }
      auto trace = track_path(spec, path);
      positions += static_cast<int>(path.size());

      // Replay the rank-aware machine along the same path and compare the
      // stored annotation with the tracked ranks at every position.
      Config rkwalk = rk.out.cpda.initial();
      CHECK(rkwalk == rk.nu(path[0]));
      for (size_t i = 0; i < path.size(); ++i) {
        if (i > 0) {
          auto morig = successors_with_moves(spec.cpda, path[i - 1]);
          auto mrk = successors_with_moves(rk.out.cpda, rkwalk);
          REQUIRE(morig.size() == mrk.size());
          size_t idx = SIZE_MAX;
          for (size_t j = 0; j < morig.size(); ++j)
            if (morig[j].second == path[i]) {
              idx = j;
              break;
            }
          REQUIRE(idx != SIZE_MAX);
          rkwalk = mrk[idx].second;
        }
        CHECK(rk.zeta(rkwalk) == path[i]);
        CHECK(rk.theta_of(rkwalk.state) == trace.rows[i].theta);
        RankAnn ann = rk.effective_ann(rkwalk.state, rkwalk.stack.top_symbol().letter);
        const auto& row = trace.rows[i];
        int n = spec.cpda.order;
        if (row.top_link_order == n) {
          REQUIRE(row.link);
          CHECK(ann.ml == row.link->second);
          CHECK(rk.link_rank(rkwalk.state, rkwalk.stack.top_symbol().letter) == row.link->second);
        } else {
          CHECK(ann.ml == kNoLink);
        }
        if (row.collapse) CHECK(ann.mc == row.collapse->second);
        for (int k = 1; k <= n; ++k)
          if (row.pop[static_cast<size_t>(k) - 1])
            CHECK(ann.tau[static_cast<size_t>(k) - 1] ==
                  row.pop[static_cast<size_t>(k) - 1]->second);
      }
    }
  }
  CHECK(positions >= 1000);
}

TEST_CASE("nu of the initial configuration carries the constant annotation") {
  Rng rng(11);
  auto spec = random_collapsible_game(rng, 2, 3, 3);
  auto rk = rank_aware(spec);
  Config init = rk.nu(spec.cpda.initial());
  RankAnn ann = rk.effective_ann(init.state, init.stack.top_symbol().letter);
  Color rho = spec.color(spec.cpda.initial_state);
  CHECK(ann.mc == rho);
  CHECK(ann.ml == kNoLink);  // bottom has no link
  CHECK(ann.tau == std::vector<Color>(2, rho));
  CHECK(rk.theta_of(init.state) == rho);
}

TEST_CASE("rank-aware state blowup stays within the advertised bound") {
  Rng rng(99);
  for (int i = 0; i < 3; ++i) {
    auto spec = random_collapsible_game(rng, 2, 3, 3);
    auto rk = rank_aware(spec);
    unfold(rk.out.cpda, rk.out.cpda.initial(), 300);
    size_t q = spec.cpda.states->size();
    size_t c = static_cast<size_t>(spec.max_color) + 1;
    size_t bound = q * c;
    for (int k = 0; k < spec.cpda.order + 3; ++k) bound *= (c + 1);
    CHECK(rk.out.cpda.states->size() <= bound);
  }
}

TEST_CASE("region lift through nu agrees with explicit nu plus acceptance") {
  Rng rng(5309);
  CpdaGameSpec spec;
  // Find a game whose reachable part is big enough to be interesting.
  for (int tries = 0; tries < 100; ++tries) {
    spec = random_collapsible_game(rng, 2, 3, 3);
    if (unfold(spec.cpda, spec.cpda.initial(), 100).vertices.size() >= 50) break;
  }
  auto rk = rank_aware(spec);

  // A rolling-hash probe automaton over the rank-aware configurations.
  auto probe = std::make_shared<FuncStackAutomaton>();
  probe->init = 0x9e3779b97f4a7c15ULL;
  probe->read_fn = [](uint64_t st, ASym a) {
    size_t h = st;
    hash_mix(h, static_cast<size_t>(a.kind));
    hash_mix(h, a.id);
    return h;
  };
  probe->read_linked_fn = [](uint64_t st, ASym a, int e, uint64_t t) {
    size_t h = st;
    hash_mix(h, static_cast<size_t>(a.kind));
    hash_mix(h, a.id);
    hash_mix(h, static_cast<size_t>(e));
    hash_mix(h, t);
    return h;
  };
  probe->final_fn = [](uint64_t st) { return (st & 3) == 0; };
  probe->suffix = true;

  auto lifted = lift_region_rankaware(rk, probe);

  auto g = unfold(spec.cpda, spec.cpda.initial(), 200);
  int agree = 0;
  for (const auto& c : g.vertices) {
    CHECK(accepts(*probe, rk.nu(c)) == accepts(*lifted, c));
    ++agree;
  }
  CHECK(agree >= 20);

  for (int i = 0; i < 300; ++i) {
    Config c{static_cast<State>(rng.below(spec.cpda.states->size())),
             random_stack(rng, *spec.cpda.alphabet, 2, 12)};
    CHECK(accepts(*probe, rk.nu(c)) == accepts(*lifted, c));
  }
}
