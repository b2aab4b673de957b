#pragma once

#include "cpg/rankaware.hpp"

namespace cpg {

struct MaskVecHash {
  size_t operator()(const std::vector<uint64_t>& v) const {
    size_t h = v.size();
    for (uint64_t x : v) hash_mix(h, static_cast<size_t>(x));
    return h;
  }
};

/// Claim vectors (R_0..R_d): interned subsets of a fixed universe of states.
class ClaimVectors {
 public:
  ClaimVectors(std::vector<State> universe, Color d);

  const std::vector<State>& universe() const { return universe_; }
  Color max_color() const { return d_; }

  uint32_t empty_vector() const { return 0; }
  bool member(uint32_t vec, Color i, State q) const;
  std::vector<State> component(uint32_t vec, Color i) const;
  /// All vectors, enumerated canonically; throws ResourceError beyond `cap`.
  const std::vector<uint32_t>& enumerate_all(size_t cap);
  uint32_t intern(const std::vector<std::set<State>>& sets);
  size_t count() const { return vecs_.size(); }
  std::string name(uint32_t vec) const;

 private:
  std::vector<State> universe_;
  std::map<State, size_t> index_;
  Color d_;
  Interner<std::vector<uint64_t>, MaskVecHash> keys_;  // one mask word per colour
  std::vector<std::vector<uint64_t>> vecs_;
  std::vector<uint32_t> all_;
  bool enumerated_ = false;
};

/// The link-free machine: push1(.,n) is replaced by the claim protocol of
/// the simulation game (with the optimisation that the pushed letter is
/// stored in the top symbol), and collapses through n-links become verdict
/// sinks gated by the claimed sets.
class LinkFree {
 public:
  CpdaGameSpec out;  // shares the rank-aware state table and alphabet
  std::shared_ptr<ClaimVectors> vectors;

  State tt() const;
  State ff() const;
  bool is_protocol_state(State q) const;  // q^!, q^?, r^i
  State base_of(State q) const;           // protocol states -> underlying state

  /// Letter views: a link-free letter is a rank-aware letter plus an
  /// optional claim vector and an optional pending push letter.
  LetterId plain(LetterId rk_letter) const;
  LetterId with_vector(LetterId rk_letter, uint32_t vec) const;
  std::optional<uint32_t> vector_of(LetterId lf_letter) const;
  LetterId rk_letter_of(LetterId lf_letter) const;

  struct Impl;
  std::shared_ptr<Impl> impl;
};

/// Builds the simulation machine. `link_rank` gives the effective link rank
/// at a (state, observed top letter) pair; `claim_universe` bounds the
/// vector components (targets of collapse moves).
LinkFree transform_linkfree(const CpdaGameSpec& rk_spec,
                            std::function<Color(State, LetterId)> link_rank,
                            std::function<int(LetterId)> link_order_of,
                            std::vector<State> claim_universe, Color d, size_t vec_cap);

/// The nu embedding: replaces every n-linked symbol by its annotated copy
/// with a dummy 1-link; the claimed set is the set of states winning after
/// collapsing to the link target, supplied by `winners_after_collapse`.
Config nu_linkfree(const LinkFree& lf, const CpdaGameSpec& rk_spec,
                   const std::function<std::set<State>(const HOStack&)>& winners_after_collapse,
                   const Config& c);

/// Region lift: accepts (q,s) iff `lf_region` accepts nu(q,s); the claimed
/// sets are recovered from the acceptance closure of the run itself.
StackAutomatonRef lift_region_linkfree(const LinkFree& lf, StackAutomatonRef lf_region,
                                       std::vector<State> state_universe);

}  // namespace cpg
