#pragma once

#include "cpg/game.hpp"
#include "cpg/regsets.hpp"

namespace cpg {

constexpr Color kLoop = -1;    // the never-settled marker on initial-stack symbols
constexpr Color kNoLink = -2;  // no n-link

/// Collapse-rank, link-rank and pop-rank annotation of one stack symbol.
/// tau empty encodes the never-settled marker; ml is kNoLink when the symbol
/// has no n-link.
struct RankAnn {
  Color mc = kLoop;
  Color ml = kNoLink;
  std::vector<Color> tau;  // tau[i-1] = pop-rank for i, i = 1..n

  bool unsettled() const { return tau.empty(); }
  friend bool operator==(const RankAnn&, const RankAnn&) = default;
};

// ---------------------------------------------------------------------------
// Reference semantics: indexed stacks along a concrete path.

struct RankTraceRow {
  Color theta = 0;  // min colour visited so far
  int top_link_order = 0;
  std::optional<std::pair<size_t, Color>> link;      // link-ancestor / link-rank
  std::optional<std::pair<size_t, Color>> collapse;  // collapse-ancestor / rank
  // pop[k-1]: pop-ancestor / pop-rank for k, when pop_k is defined
  std::vector<std::optional<std::pair<size_t, Color>>> pop;
};

struct RankTrace {
  std::vector<RankTraceRow> rows;
};

/// Maintains indexed stacks along a valid path and reads off the ancestors
/// and ranks at every position. Throws UsageError on an invalid edge.
RankTrace track_path(const CpdaGameSpec& spec, const std::vector<Config>& path);

std::string trace_to_text(const RankTrace& t);

// ---------------------------------------------------------------------------
// The rank-aware machine.

struct RepairInfo {
  int k = 0;                 // order popped / collapsed
  Color u = 0;               // tau(k) for pops, mc for collapses (pre-op top)
  std::vector<Color> upper;  // pre-op tau(i) for i = k+1..n
  Color rho = 0;             // colour of the target state
  Color theta = 0;           // min colour after the move

  friend bool operator==(const RepairInfo&, const RepairInfo&) = default;
};

class RankAware {
 public:
  CpdaGameSpec out;

  Config nu(const Config& c) const;    // original -> rank-aware
  Config zeta(const Config& c) const;  // rank-aware -> original

  /// Effective (pending-applied) top annotation at a state observing the
  /// given physical top letter; never unsettled.
  RankAnn effective_ann(State q, LetterId observed) const;
  int link_order_of(LetterId l) const;
  Color link_rank(State q, LetterId observed) const;  // kNoLink without n-link

  State base_state(State q) const;
  Color theta_of(State q) const;
  LetterId letter_base(LetterId l) const;
  State plain_state(State base, Color theta) const;
  LetterId intern_letter(LetterId base, const RankAnn& ann, int link_order) const;

  /// All states that can be the target of a collapse move (the claim
  /// universe of the link-free step): pending states over every repair
  /// combination consistent with the enumerated rules.
  std::vector<State> collapse_claim_universe(const std::vector<std::pair<State, TransitionRule>>&
                                                 collapse_rules) const;
  /// Likewise for pop_n moves (the claim universe of the order reduction).
  std::vector<State> pop_claim_universe(
      const std::vector<std::pair<State, TransitionRule>>& pop_rules) const;

  struct Impl;
  std::shared_ptr<Impl> impl;
};

RankAware rank_aware(const CpdaGameSpec& spec);

/// Region lift: accepts (q,s) iff `rk_region` accepts nu(q,s), simulating the
/// image on the fly (one-symbol delay to resolve the top annotation).
StackAutomatonRef lift_region_rankaware(const RankAware& rk, StackAutomatonRef rk_region);

/// All (state, letter)-rules of a finite table-backed spec.
std::vector<std::pair<State, TransitionRule>> enumerate_rules(
    const CpdaGameSpec& spec, const std::function<bool(const TransitionRule&)>& want);

}  // namespace cpg
