#pragma once

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cpg/stack.hpp"

namespace cpg {

enum class Owner : uint8_t { Eloise, Abelard };

inline Owner opponent(Owner o) { return o == Owner::Eloise ? Owner::Abelard : Owner::Eloise; }

/// Append-only state registry shared by a CPDA and the game layer. States of
/// constructed machines are interned on demand, so ids are dense and stable
/// for a fixed construction order.
class StateTable {
 public:
  State add(std::string name, Owner owner = Owner::Eloise, Color color = 0) {
    State id = static_cast<State>(names_.size());
    if (!by_name_.emplace(name, id).second) throw UsageError("duplicate state name: " + name);
    names_.push_back(std::move(name));
    owners_.push_back(owner);
    colors_.push_back(color);
    return id;
  }
  size_t size() const { return names_.size(); }
  const std::string& name(State q) const { return names_.at(q); }
  Owner owner(State q) const { return owners_.at(q); }
  Color color(State q) const { return colors_.at(q); }
  State find(const std::string& n) const {
    auto it = by_name_.find(n);
    return it == by_name_.end() ? kNoId : it->second;
  }

 private:
  std::vector<std::string> names_;
  std::vector<Owner> owners_;
  std::vector<Color> colors_;
  std::unordered_map<std::string, State> by_name_;
};

using StateTableRef = std::shared_ptr<StateTable>;

/// Strict transition: an optional top-rewrite followed by a non-rewrite op.
struct TransitionRule {
  State target = 0;
  std::optional<LetterId> rewrite;
  StackOp op = StackOp::id();
};

struct Config {
  State state = 0;
  HOStack stack;

  friend bool operator==(const Config& a, const Config& b) {
    return a.state == b.state && a.stack == b.stack;
  }
  friend bool operator<(const Config& a, const Config& b) {
    if (a.state != b.state) return a.state < b.state;
    return HOStack::compare(a.stack, b.stack) < 0;
  }
};

struct ConfigHash {
  size_t operator()(const Config& c) const {
    size_t h = c.stack.hash();
    hash_mix(h, c.state);
    return h;
  }
};

/// CPDA with an enumerable-function transition map: delta(q, top letter)
/// yields the rules in a deterministic order. Constructed machines back this
/// with closures over lazily interned state/letter spaces.
struct Cpda {
  int order = 1;
  AlphabetRef alphabet;
  StateTableRef states;
  State initial_state = 0;
  HOStack initial_stack;
  std::function<std::vector<TransitionRule>(State, LetterId)> delta;

  Config initial() const { return {initial_state, initial_stack}; }
  std::vector<TransitionRule> rules(State q, LetterId a) const { return delta(q, a); }
};

struct Move {
  State target = 0;
  std::optional<LetterId> rewrite;
  StackOp op = StackOp::id();
};

/// Applies rewrite-then-op; nullopt when either part is undefined.
std::optional<HOStack> apply_rule(const TransitionRule& r, const HOStack& s, const Alphabet& ab);

std::vector<Config> successors(const Cpda& a, const Config& c);
std::vector<std::pair<Move, Config>> successors_with_moves(const Cpda& a, const Config& c);

/// Bounded BFS prefix of the transition graph. Vertices are discovered in
/// BFS order with successors sorted by (state, stack); edges are recorded
/// from expanded vertices to vertices inside the budget.
struct UnfoldGraph {
  std::vector<Config> vertices;
  std::vector<std::pair<uint32_t, uint32_t>> edges;
  std::vector<bool> expanded;
  bool truncated = false;

  int64_t index_of(const Config& c) const;
};

UnfoldGraph unfold(const Cpda& a, const Config& root, size_t limit);

/// Edge-labelled variant: delta keyed additionally by an input letter.
struct InputCpda {
  Cpda cpda;  // cpda.delta must not be used; labelled below
  std::vector<std::string> input_letters;
  std::function<std::vector<std::pair<uint32_t, TransitionRule>>(State, LetterId)> labelled_delta;
};

struct LabelledUnfoldGraph {
  std::vector<Config> vertices;
  std::vector<std::tuple<uint32_t, uint32_t, uint32_t>> edges;  // from, label, to
  bool truncated = false;
  int64_t index_of(const Config& c) const;
};

LabelledUnfoldGraph labelled_unfold(const InputCpda& a, const Config& root, size_t limit);

/// Internal IR for constructions: a target state plus an op sequence that
/// may interleave rewrites (e.g. pop then repair-rewrite). When the trailing
/// rewrite depends on the symbol exposed by the op (the rank-aware repair),
/// `repair` names a rewrite function supplied via CompositeCpda::repair_apply.
struct CompositeRule {
  State target = 0;
  std::vector<StackOp> ops;
  std::optional<uint32_t> repair;
};

struct CompositeCpda {
  int order = 1;
  AlphabetRef alphabet;
  StateTableRef states;
  State initial_state = 0;
  HOStack initial_stack;
  std::function<std::vector<CompositeRule>(State, LetterId)> delta;
  std::function<LetterId(uint32_t, LetterId)> repair_apply;  // (fn, observed top) -> letter
};

/// Strict form of a composite machine. Trailing rewrites are postponed into
/// the next transition via a pending component on the control state, so a
/// one-op composite adds no graph vertices; composites with several
/// non-rewrite ops go through helper states (erased by `project`).
struct Normalized {
  Cpda cpda;
  /// For non-helper states: the original state and the pending rewrite (if
  /// any) still to be applied to the top symbol. Helper states map to nullopt.
  std::function<std::optional<std::pair<State, std::optional<LetterId>>>(State)> project;
  /// Pending-state lookup used by later constructions: the letter the machine
  /// behaves as if the top were rewritten to, given the physical top.
  std::function<std::optional<LetterId>(State)> pending_letter;
  /// Effective top letter at a state given the observed physical top (applies
  /// static and dynamic pendings; identity for plain and helper states).
  std::function<LetterId(State, LetterId)> effective_top;
  /// Interns the pending state for a given target and repair id; used by
  /// constructions to enumerate claim universes.
  std::function<State(State, uint32_t)> pend_state_for_repair;
  std::function<bool(State)> is_helper;
};

Normalized normalize(const CompositeCpda& in);

std::string unfold_to_dot(const UnfoldGraph& g, const Cpda& a);

}  // namespace cpg
