#pragma once

#include <set>

#include "cpg/cpda.hpp"

namespace cpg {

/// A CPDA plus owner partition and colouring (owners/colours live in the
/// state table). `max_color` is d; colours are in {0..d}.
struct CpdaGameSpec {
  Cpda cpda;
  Color max_color = 0;

  Owner owner(State q) const { return cpda.states->owner(q); }
  Color color(State q) const { return cpda.states->color(q); }
};

/// Adds, for every state, an always-available exit to a self-looping sink
/// that loses for that state's owner. This changes no winners (the owner
/// never benefits from taking it) and removes all dead-ends, which the
/// reductions assume away.
CpdaGameSpec complete_deadends(const CpdaGameSpec& spec);

// ---------------------------------------------------------------------------
// Finite parity games.

struct FiniteParityGame {
  struct Vertex {
    Owner owner = Owner::Eloise;
    Color color = 0;
    std::string name;
  };
  std::vector<Vertex> vertices;
  std::vector<std::vector<uint32_t>> succ;

  uint32_t add(Owner o, Color c, std::string name = {}) {
    vertices.push_back({o, c, std::move(name)});
    succ.emplace_back();
    return static_cast<uint32_t>(vertices.size() - 1);
  }
  void add_edge(uint32_t u, uint32_t v) { succ[u].push_back(v); }
  size_t size() const { return vertices.size(); }
};

/// Winning sets and positional strategies for both players. strategy[v] is
/// the chosen successor for vertices owned by the winner of v, else -1.
struct FiniteSolve {
  std::vector<Owner> winner;
  std::vector<int64_t> strategy;
};

/// Zielonka recursion; deterministic (lowest-index tie-breaking). Requires a
/// dead-end-free game.
FiniteSolve solve_finite(const FiniteParityGame& g);

std::string to_pgsolver(const FiniteParityGame& g);
FiniteParityGame from_pgsolver(const std::string& text);

// ---------------------------------------------------------------------------
// Bounded reachability oracle.

enum class ReachVerdict { EloiseWins, AbelardWins, Unknown };

/// Backward induction on the depth-D unfolding: EloiseWins only if she can
/// force a visit to a target state within D moves; AbelardWins only if he can
/// keep the play inside explored non-target configurations forever. Both
/// directions are sound; Unknown otherwise. Expects a dead-end-free spec.
ReachVerdict bounded_reach_oracle(const CpdaGameSpec& spec, const std::set<State>& targets,
                                  int depth, const Config& from);

// ---------------------------------------------------------------------------
// Play factorization (steps, bumps, stairs, mcol).

struct PlayFactorization {
  struct Segment {
    size_t begin = 0, end = 0;  // indices into the play
    bool bump = false;          // equal heights at both ends; else a stair
  };
  std::vector<size_t> steps;
  std::vector<Segment> segments;
  std::vector<Color> mcol;  // min colour over each segment (inclusive)
};

/// Factorizes a finite (height, colour) sequence: steps are positions i with
/// height(j) >= height(i) for all j >= i within the sequence.
PlayFactorization factorize(const std::vector<std::pair<int, Color>>& play);

/// Convenience adapter: heights are top-level stack heights, colours come
/// from the owning spec.
PlayFactorization factorize(const CpdaGameSpec& spec, const std::vector<Config>& play);

}  // namespace cpg
