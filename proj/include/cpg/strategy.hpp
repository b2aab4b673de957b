#pragma once

#include "cpg/orderreduce.hpp"

namespace cpg {

/// The transducer's own action: an optional top-rewrite followed by a
/// non-rewrite operation, like a CPDA transition.
struct OwnMove {
  std::optional<LetterId> rewrite;
  StackOp op = StackOp::id();
};

/// CPDA transducer realising a strategy: delta consumes game moves and
/// updates the transducer configuration; tau proposes the next game move.
/// Both are deterministic and may be partial. States are opaque ids; lifted
/// transducers intern structured states behind `ctx`.
struct Transducer {
  int order = 1;
  AlphabetRef sigma;
  HOStack own_init;
  uint64_t r0 = 0;
  std::function<std::optional<std::pair<uint64_t, OwnMove>>(uint64_t, LetterId, const Move&)>
      delta;
  std::function<std::optional<Move>(uint64_t, LetterId)> tau;
  std::shared_ptr<void> ctx;
};

struct TransducerConfig {
  uint64_t state = 0;
  HOStack stack;
};

struct RunResult {
  std::vector<TransducerConfig> configs;
  std::optional<size_t> undefined_at;  // move index where delta was undefined
};

/// The unique run over a play given as its move sequence.
RunResult run_transducer(const Transducer& s, const std::vector<Move>& play);

/// Operational synchronisation check: drives random plays and verifies that
/// every defined delta entry pairs operations of the same kind. Returns a
/// counterexample description, or nullopt if none was found.
std::optional<std::string> check_synchronized(const Transducer& s, const CpdaGameSpec& spec,
                                              int plays, int steps, uint64_t seed);

struct SimulateReport {
  std::vector<Config> play;
  std::vector<Move> moves;
  std::vector<TransducerConfig> own;
  bool undefined_tau = false;   // tau undefined at an Eloise node
  bool illegal_move = false;    // prescription not among the legal moves
  bool undefined_delta = false;
  bool shape_mismatch = false;
  std::string note;

  bool ok() const { return !undefined_tau && !illegal_move && !undefined_delta && !shape_mismatch; }
};

/// Plays `steps` moves from the initial configuration: Eloise follows the
/// transducer, Abelard plays the seeded random policy. Verifies legality of
/// every prescription and the shape correspondence.
SimulateReport simulate(const CpdaGameSpec& spec, const Transducer& s, int steps, uint64_t seed,
                        std::optional<Config> from = std::nullopt);

/// Order-0 embedding of a positional strategy on a finite game: moves are
/// vertex ids, the stack is inert.
Transducer from_positional(const FiniteParityGame& g, const std::vector<int64_t>& strategy,
                           uint32_t root);

// ---------------------------------------------------------------------------
// Strategy lifts along the reduction chain.

/// Finite base of the chain: turns a positional strategy on the simulation
/// game of an order-1 source into an order-1 transducer synchronised with
/// that source (the stack stores the claim-level snapshots).
Transducer lift_strategy_tilde_base(std::shared_ptr<TildeFinite> fin);

/// One order down: turns a transducer for the simulation game (order n-1)
/// into an order-n transducer for the link-free source; the own stack is the
/// stack-of-annotated-stacks memory.
Transducer lift_strategy_tilde(const Reduction& red, Transducer tilde_strategy);

/// Across the link-removal step: reconstructs collapse moves from the
/// per-symbol jump tables stored at claim time.
Transducer lift_strategy_linkfree(const LinkFree& lf,
                                  std::function<Color(State, LetterId)> link_rank,
                                  std::function<int(LetterId)> link_order_of,
                                  Transducer lf_strategy);

/// Across the rank-aware step: embeds the annotation updates so the
/// transducer can read and emit moves of the original machine.
Transducer lift_strategy_rankaware(const RankAware& rk, Transducer rk_strategy);

}  // namespace cpg
