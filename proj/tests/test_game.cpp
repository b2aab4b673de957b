#include "cpg/game.hpp"

#include <functional>

#include "doctest.h"
#include "support/builders.hpp"
#include "support/finite_oracle.hpp"

using namespace cpg;
using namespace cpgtest;

namespace {

FiniteParityGame random_game(Rng& rng, int max_vertices, int max_color) {
  FiniteParityGame g;
  int n = rng.range(2, max_vertices);
  for (int v = 0; v < n; ++v)
    g.add(rng.chance(0.5) ? Owner::Eloise : Owner::Abelard,
          static_cast<Color>(rng.below(static_cast<uint64_t>(max_color) + 1)),
          "v" + std::to_string(v));
  for (int v = 0; v < n; ++v) {
    int degree = rng.range(1, 3);
    for (int e = 0; e < degree; ++e)
      g.add_edge(static_cast<uint32_t>(v), static_cast<uint32_t>(rng.below(static_cast<uint64_t>(n))));
  }
  return g;
}

// Checks the necessary local-consistency condition of a winner labelling.
void check_local_consistency(const FiniteParityGame& g, const std::vector<Owner>& winner) {
  for (uint32_t v = 0; v < g.size(); ++v) {
    Owner w = winner[v];
    bool exists = false, all = true;
    for (uint32_t s : g.succ[v]) {
      exists |= winner[s] == w;
      all &= winner[s] == w;
    }
    if (g.vertices[v].owner == w) {
      CHECK(exists);
    } else {
      CHECK(all);
    }
  }
}

}  // namespace

TEST_CASE("single-vertex games") {
  FiniteParityGame g;
  auto v = g.add(Owner::Eloise, 0);
  g.add_edge(v, v);
  auto r = solve_finite(g);
  CHECK(r.winner[v] == Owner::Eloise);
  CHECK(r.strategy[v] == v);

  FiniteParityGame h;
  auto u = h.add(Owner::Abelard, 1);
  h.add_edge(u, u);
  auto r2 = solve_finite(h);
  CHECK(r2.winner[u] == Owner::Abelard);
  CHECK(r2.strategy[u] == u);
}

TEST_CASE("zielonka agrees with the strategy-enumeration oracle") {
  Rng rng(9001);
  for (int trial = 0; trial < 200; ++trial) {
    auto g = random_game(rng, 9, 3);
    auto solved = solve_finite(g);
    auto expect = enumerate_solve(g);
    for (uint32_t v = 0; v < g.size(); ++v) CHECK(solved.winner[v] == expect[v]);
    check_local_consistency(g, solved.winner);
    // Winner-owned vertices have a strategy move into their winning set.
    for (uint32_t v = 0; v < g.size(); ++v) {
      if (g.vertices[v].owner != solved.winner[v]) continue;
      REQUIRE(solved.strategy[v] >= 0);
      CHECK(solved.winner[static_cast<uint32_t>(solved.strategy[v])] == solved.winner[v]);
    }
  }
}

TEST_CASE("zielonka strategies actually win") {
  Rng rng(515);
  for (int trial = 0; trial < 120; ++trial) {
    auto g = random_game(rng, 8, 3);
    auto solved = solve_finite(g);
    // Restrict to the strategy of the vertex's winner and look for cycles
    // whose minimum colour favours the loser.
    std::vector<std::vector<uint32_t>> succ(g.size());
    for (uint32_t v = 0; v < g.size(); ++v) {
      if (g.vertices[v].owner == solved.winner[v]) {
        succ[v] = {static_cast<uint32_t>(solved.strategy[v])};
      } else {
        for (uint32_t w : g.succ[v])
          if (solved.winner[w] == solved.winner[v]) succ[v].push_back(w);
      }
    }
    // Any cycle within one winning region must favour that region's winner.
    // Enumerate cycles by DFS over the small graph.
    size_t n = g.size();
    for (uint32_t start = 0; start < n; ++start) {
      std::vector<int> state(n, 0);
      std::vector<uint32_t> path;
      std::function<void(uint32_t)> dfs = [&](uint32_t v) {
        state[v] = 1;
        path.push_back(v);
        for (uint32_t w : succ[v]) {
          if (solved.winner[w] != solved.winner[start]) continue;
          if (state[w] == 1) {
            Color mc = g.vertices[w].color;
            bool in = false;
            for (uint32_t x : path) {
              if (x == w) in = true;
              if (in) mc = std::min(mc, g.vertices[x].color);
            }
            bool even = mc % 2 == 0;
            CHECK(even == (solved.winner[start] == Owner::Eloise));
          } else if (state[w] == 0) {
            dfs(w);
          }
        }
        state[v] = 2;
        path.pop_back();
      };
      if (state[start] == 0) dfs(start);
    }
  }
}

TEST_CASE("solver output is deterministic") {
  Rng rng(77);
  auto g = random_game(rng, 9, 3);
  auto a = solve_finite(g);
  auto b = solve_finite(g);
  CHECK(a.winner == b.winner);
  CHECK(a.strategy == b.strategy);
}

TEST_CASE("pgsolver round trip") {
  Rng rng(4);
  auto g = random_game(rng, 7, 3);
  auto text = to_pgsolver(g);
  auto h = from_pgsolver(text);
  REQUIRE(g.size() == h.size());
  for (uint32_t v = 0; v < g.size(); ++v) {
    CHECK(g.vertices[v].owner == h.vertices[v].owner);
    CHECK(g.vertices[v].color == h.vertices[v].color);
    CHECK(g.succ[v] == h.succ[v]);
  }
}

TEST_CASE("bounded reachability oracle on anbncn") {
  auto spec = complete_deadends(anbncn(true));
  std::set<State> targets{spec.cpda.states->find("q#")};
  CHECK(bounded_reach_oracle(spec, targets, 30, spec.cpda.initial()) == ReachVerdict::EloiseWins);
  // From the initial configuration Eloise needs six moves.
  CHECK(bounded_reach_oracle(spec, targets, 6, spec.cpda.initial()) == ReachVerdict::EloiseWins);
  CHECK(bounded_reach_oracle(spec, targets, 0, spec.cpda.initial()) == ReachVerdict::Unknown);
  Config at_target{spec.cpda.states->find("q#"), HOStack::bottom(2, spec.cpda.alphabet->bottom())};
  CHECK(bounded_reach_oracle(spec, targets, 0, at_target) == ReachVerdict::EloiseWins);
}

TEST_CASE("bounded reachability oracle is monotone in depth") {
  auto spec = complete_deadends(anbncn(true));
  std::set<State> targets{spec.cpda.states->find("q#")};
  ReachVerdict prev = ReachVerdict::Unknown;
  for (int d = 0; d <= 12; d += 3) {
    auto v = bounded_reach_oracle(spec, targets, d, spec.cpda.initial());
    if (prev == ReachVerdict::EloiseWins) CHECK(v == ReachVerdict::EloiseWins);
    prev = v;
  }
}

TEST_CASE("dead-end completion adds losing exits only") {
  auto spec = anbncn(false);
  auto done = complete_deadends(spec);
  // q# had no moves; now it has exactly the sink exit.
  Config sharp{done.cpda.states->find("q#"), HOStack::bottom(2, done.cpda.alphabet->bottom())};
  auto succ = successors(done.cpda, sharp);
  REQUIRE(succ.size() == 1);
  CHECK(done.cpda.states->name(succ[0].state) == "__sinkE");
  CHECK(done.color(succ[0].state) == 1);
  // Sinks self-loop.
  auto s2 = successors(done.cpda, succ[0]);
  REQUIRE(s2.size() == 1);
  CHECK(s2[0] == succ[0]);
}

TEST_CASE("factorize basics") {
  // Constant height: every index is a step, all segments are trivial bumps.
  std::vector<std::pair<int, Color>> flat(6, {3, 1});
  auto f = factorize(flat);
  CHECK(f.steps.size() == 6);
  for (const auto& seg : f.segments) CHECK(seg.bump);

  // Strictly increasing: all stairs.
  std::vector<std::pair<int, Color>> up;
  for (int i = 0; i < 6; ++i) up.push_back({i, 0});
  auto f2 = factorize(up);
  CHECK(f2.steps.size() == 6);
  for (const auto& seg : f2.segments) CHECK(!seg.bump);
}

TEST_CASE("lasso plays: liminf of colours equals liminf of mcol") {
  Rng rng(123);
  for (int trial = 0; trial < 100; ++trial) {
    // Random prefix, then a cycle with net height change zero that never
    // dips below its entry height.
    std::vector<std::pair<int, Color>> prefix;
    int h = 5 + static_cast<int>(rng.below(3));
    int plen = rng.range(1, 6);
    for (int i = 0; i < plen; ++i) {
      prefix.push_back({h, static_cast<Color>(rng.below(4))});
      h += rng.range(0, 1);
    }
    std::vector<std::pair<int, Color>> cycle;
    int clen = rng.range(2, 6);
    int start_h = h;
    int cur = h;
    for (int i = 0; i < clen; ++i) {
      cycle.push_back({cur, static_cast<Color>(rng.below(4))});
      if (i + 1 < clen) {
        int lo = std::max(start_h, cur - 1);
        cur = lo + static_cast<int>(rng.below(2));
      } else {
        cur = start_h;
      }
    }
    Color cyc_min = 100;
    for (auto& [hh, c] : cycle) cyc_min = std::min(cyc_min, c);

    int reps = 8;
    std::vector<std::pair<int, Color>> play = prefix;
    for (int r = 0; r < reps; ++r) play.insert(play.end(), cycle.begin(), cycle.end());
    auto f = factorize(play);

    // Segments that end before the final cycle agree with the infinite
    // factorization; the liminf of mcol is the minimum over the periodic part.
    size_t stable_end = play.size() - cycle.size();
    size_t periodic_begin = prefix.size() + cycle.size();
    Color liminf_mcol = 100;
    for (size_t i = 0; i < f.segments.size(); ++i) {
      if (f.segments[i].begin >= periodic_begin && f.segments[i].end < stable_end)
        liminf_mcol = std::min(liminf_mcol, f.mcol[i]);
    }
    REQUIRE(liminf_mcol != 100);
    CHECK(liminf_mcol == cyc_min);
  }
}
