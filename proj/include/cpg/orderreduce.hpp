#pragma once

#include "cpg/linkfree.hpp"

namespace cpg {

/// Control-state tags of the simulation game over the abstract view of a
/// link-free machine: main vertices carry the simulated state, the claim
/// vector of the current stack level, the minimal colour since the level was
/// entered, and whether the level is the bottom one.
struct TildeTag {
  enum class Kind : uint8_t { Main, Pend, Claim, Jump, TT, FF };
  Kind kind = Kind::Main;
  State q = 0;
  uint32_t rvec = 0;
  Color theta = 0;
  bool bottom = false;
  State push_target = 0;      // Pend/Claim
  LetterId push_letter = 0;   // Pend/Claim at order 1 (the abstract-pushed letter)
  uint32_t rvec2 = 0;         // Claim
  Color jump_color = 0;       // Jump

  friend bool operator==(const TildeTag&, const TildeTag&) = default;
};

struct TildeTagHash {
  size_t operator()(const TildeTag& t) const {
    size_t h = static_cast<size_t>(t.kind);
    hash_mix(h, t.q);
    hash_mix(h, t.rvec);
    hash_mix(h, static_cast<size_t>(t.theta));
    hash_mix(h, t.bottom);
    hash_mix(h, t.push_target);
    hash_mix(h, t.push_letter);
    hash_mix(h, t.rvec2);
    hash_mix(h, static_cast<size_t>(t.jump_color));
    return h;
  }
};

/// The finite simulation game of an order-1 (collapse-free) input: vertices
/// are (tag, letter) pairs, built lazily from requested roots and solved
/// with the Zielonka solver.
class TildeFinite {
 public:
  TildeFinite(CpdaGameSpec source, std::shared_ptr<ClaimVectors> vectors, size_t vec_cap,
              size_t game_cap);

  uint32_t vertex(const TildeTag& tag, LetterId letter);
  Owner winner(uint32_t v);
  const FiniteParityGame& game();
  const FiniteSolve& solution();
  const TildeTag& tag_of(uint32_t v) const;
  LetterId letter_of(uint32_t v) const;
  const CpdaGameSpec& source() const { return source_; }
  std::shared_ptr<ClaimVectors> vectors() const { return vectors_; }

 private:
  void explore();
  void edges_for(uint32_t v);

  CpdaGameSpec source_;
  std::shared_ptr<ClaimVectors> vectors_;
  size_t vec_cap_, game_cap_;
  struct VKey {
    TildeTag tag;
    LetterId letter;
    friend bool operator==(const VKey&, const VKey&) = default;
  };
  struct VKeyHash {
    size_t operator()(const VKey& k) const {
      size_t h = TildeTagHash{}(k.tag);
      hash_mix(h, k.letter);
      return h;
    }
  };
  Interner<VKey, VKeyHash> verts_;
  FiniteParityGame game_;
  size_t expanded_ = 0;
  bool solved_ = false;
  FiniteSolve solve_;
};

/// The order reduction. For inputs of order >= 2 the result is an
/// order-(n-1) CPDA game over the same stack alphabet; for order-1 inputs it
/// is the finite simulation game.
class Reduction {
 public:
  int input_order = 1;
  CpdaGameSpec source;  // the link-free input
  std::shared_ptr<ClaimVectors> vectors;
  CpdaGameSpec tilde;                   // when input_order >= 2
  std::shared_ptr<TildeFinite> finite;  // when input_order == 1

  State intern_tag(const TildeTag& t) const;
  const TildeTag& tag_of(State q) const;
  bool is_tilde_state(State q) const;
  /// The G-tilde configuration corresponding to the source initial config.
  Config initial_tilde() const;

  /// Structural enumeration of the child-level claim universe: all main
  /// states over the given source-level pop targets.
  std::vector<State> mains_over(const std::vector<State>& lf_targets, size_t vec_cap) const;

  struct Impl;
  std::shared_ptr<Impl> impl;
};

Reduction reduce_once(const CpdaGameSpec& lf_spec, std::vector<State> pop_universe, Color d,
                      size_t vec_cap, size_t game_cap);

}  // namespace cpg
