#pragma once

// Positional-strategy-enumeration oracle for small finite parity games.

#include <vector>

#include "cpg/game.hpp"

namespace cpgtest {

/// v is won by Eloise iff some positional Eloise strategy leaves no reachable
/// cycle with odd minimum colour in the restricted graph.
inline std::vector<cpg::Owner> enumerate_solve(const cpg::FiniteParityGame& g) {
  using namespace cpg;
  size_t n = g.size();
  std::vector<Owner> winner(n, Owner::Abelard);

  std::vector<uint32_t> echoice;  // indices of Eloise vertices
  for (uint32_t v = 0; v < n; ++v)
    if (g.vertices[v].owner == Owner::Eloise) echoice.push_back(v);

  std::vector<size_t> pick(echoice.size(), 0);
  auto advance = [&]() -> bool {
    for (size_t i = 0; i < pick.size(); ++i) {
      if (++pick[i] < g.succ[echoice[i]].size()) return true;
      pick[i] = 0;
    }
    return false;
  };

  do {
    // Restricted successor lists under the current strategy.
    std::vector<std::vector<uint32_t>> succ(n);
    for (uint32_t v = 0; v < n; ++v) {
      if (g.vertices[v].owner == Owner::Abelard) {
        succ[v] = g.succ[v];
      }
    }
    for (size_t i = 0; i < echoice.size(); ++i)
      succ[echoice[i]] = {g.succ[echoice[i]][pick[i]]};

    // Vertices lying on or reaching a bad cycle (odd minimal colour).
    std::vector<bool> bad(n, false);
    for (Color c = 1;; c += 2) {
      bool any = false;
      std::vector<bool> inH(n, false);
      for (uint32_t v = 0; v < n; ++v)
        if (g.vertices[v].color >= c) {
          inH[v] = true;
          if (g.vertices[v].color == c) any = true;
        }
      if (!any) {
        bool higher = false;
        for (uint32_t v = 0; v < n; ++v) higher |= g.vertices[v].color > c;
        if (!higher) break;
        continue;
      }
      // Tarjan-free SCC via repeated DFS (tiny graphs): Kosaraju.
      std::vector<int> comp(n, -1);
      std::vector<uint32_t> order;
      std::vector<bool> vis(n, false);
      std::function<void(uint32_t)> dfs1 = [&](uint32_t v) {
        vis[v] = true;
        for (uint32_t w : succ[v])
          if (inH[w] && !vis[w]) dfs1(w);
        order.push_back(v);
      };
      for (uint32_t v = 0; v < n; ++v)
        if (inH[v] && !vis[v]) dfs1(v);
      std::vector<std::vector<uint32_t>> rev(n);
      for (uint32_t v = 0; v < n; ++v)
        if (inH[v])
          for (uint32_t w : succ[v])
            if (inH[w]) rev[w].push_back(v);
      int nc = 0;
      std::function<void(uint32_t, int)> dfs2 = [&](uint32_t v, int c2) {
        comp[v] = c2;
        for (uint32_t w : rev[v])
          if (comp[w] < 0) dfs2(w, c2);
      };
      for (size_t i = order.size(); i-- > 0;)
        if (comp[order[i]] < 0) dfs2(order[i], nc++);
      // A component is cyclic if it has an internal edge.
      std::vector<bool> cyclic(static_cast<size_t>(nc), false);
      for (uint32_t v = 0; v < n; ++v)
        if (inH[v])
          for (uint32_t w : succ[v])
            if (inH[w] && comp[v] == comp[w]) cyclic[static_cast<size_t>(comp[v])] = true;
      for (uint32_t v = 0; v < n; ++v)
        if (inH[v] && g.vertices[v].color == c && cyclic[static_cast<size_t>(comp[v])]) bad[v] = true;
    }
    // Backward closure: can reach a bad vertex.
    bool changed = true;
    while (changed) {
      changed = false;
      for (uint32_t v = 0; v < n; ++v) {
        if (bad[v]) continue;
        for (uint32_t w : succ[v])
          if (bad[w]) {
            bad[v] = true;
            changed = true;
            break;
          }
      }
    }
    for (uint32_t v = 0; v < n; ++v)
      if (!bad[v]) winner[v] = cpg::Owner::Eloise;
  } while (advance());

  return winner;
}

}  // namespace cpgtest
