#pragma once

#include <memory>
#include <set>

#include "cpg/cpda.hpp"

namespace cpg {

/// Input symbol of a stack automaton: a stack letter, a bracket, or the
/// trailing control-state letter of a configuration encoding.
struct ASym {
  enum class Kind : uint8_t { Letter, Open, Close, StateL };
  Kind kind = Kind::Letter;
  uint32_t id = 0;

  static ASym letter(LetterId a) { return {Kind::Letter, a}; }
  static ASym open() { return {Kind::Open, 0}; }
  static ASym close() { return {Kind::Close, 0}; }
  static ASym state(State q) { return {Kind::StateL, q}; }
};

/// Deterministic link-aware automaton over flattened stacks (§2.6 model).
/// States are opaque ids so that lazily constructed automata (products,
/// lifts) can intern structured states behind the same interface. On a
/// linked position the automaton additionally receives the run state right
/// after the targeted position.
class StackAutomatonBase {
 public:
  virtual ~StackAutomatonBase() = default;
  virtual uint64_t initial() const = 0;
  virtual uint64_t read(uint64_t st, ASym a) const = 0;
  virtual uint64_t read_linked(uint64_t st, ASym a, int link_order, uint64_t target) const = 0;
  virtual bool is_final(uint64_t st) const = 0;
  /// True for automata over configurations (a control-state letter is read
  /// after the stack word).
  virtual bool reads_state_suffix() const = 0;
};

using StackAutomatonRef = std::shared_ptr<const StackAutomatonBase>;

/// State after reading the stack word (and the control state, for
/// configuration automata).
uint64_t run_on(const StackAutomatonBase& aut, const HOStack& s, std::optional<State> q);
bool accepts(const StackAutomatonBase& aut, const Config& c);
bool accepts_stack(const StackAutomatonBase& aut, const HOStack& s);

/// Closes `depth` pending brackets. For configuration automata, acc_set then
/// gives the control states accepted were the input to end here.
uint64_t close_brackets(const StackAutomatonBase& aut, uint64_t st, int depth);
std::set<State> acc_set(const StackAutomatonBase& aut, uint64_t st, int depth,
                        const std::vector<State>& universe);

// ---------------------------------------------------------------------------
// Dense table-backed automata.

class DenseStackAutomaton : public StackAutomatonBase {
 public:
  DenseStackAutomaton(uint32_t num_states, uint32_t num_letters, uint32_t num_cpda_states,
                      bool state_suffix);

  uint32_t num_states() const { return nstates_; }
  uint32_t num_letters() const { return nletters_; }
  uint32_t num_cpda_states() const { return ncpda_; }

  void set_initial(uint32_t r) { init_ = r; }
  void set_final(uint32_t r, bool f = true) { finals_[r] = f; }
  void set2(uint32_t r, ASym a, uint32_t to) { d2_[idx2(r, a)] = to; }
  void set3(uint32_t r, LetterId a, uint32_t target, uint32_t to) { d3_[idx3(r, a, target)] = to; }
  uint32_t get2(uint32_t r, ASym a) const { return d2_[idx2(r, a)]; }
  uint32_t get3(uint32_t r, LetterId a, uint32_t t) const { return d3_[idx3(r, a, t)]; }
  bool final_state(uint32_t r) const { return finals_[r]; }

  uint64_t initial() const override { return init_; }
  uint64_t read(uint64_t st, ASym a) const override { return d2_[idx2(static_cast<uint32_t>(st), a)]; }
  uint64_t read_linked(uint64_t st, ASym a, int, uint64_t target) const override {
    if (a.kind != ASym::Kind::Letter) throw UsageError("linked non-letter position");
    return d3_[idx3(static_cast<uint32_t>(st), a.id, static_cast<uint32_t>(target))];
  }
  bool is_final(uint64_t st) const override { return finals_[static_cast<size_t>(st)]; }
  bool reads_state_suffix() const override { return suffix_; }

 private:
  size_t idx2(uint32_t r, ASym a) const;
  size_t idx3(uint32_t r, LetterId a, uint32_t t) const {
    return (static_cast<size_t>(r) * nletters_ + a) * nstates_ + t;
  }
  uint32_t nstates_, nletters_, ncpda_;
  bool suffix_;
  uint32_t init_ = 0;
  std::vector<bool> finals_;
  std::vector<uint32_t> d2_;
  std::vector<uint32_t> d3_;
};

enum class BoolKind { Union, Intersection, Complement };

/// Boolean combination; Complement ignores b. Product sizes are exactly
/// |R1|*|R2| (no reachability pruning).
DenseStackAutomaton boolean(const DenseStackAutomaton& a, const DenseStackAutomaton& b,
                            BoolKind kind);
DenseStackAutomaton complement(const DenseStackAutomaton& a);

/// Fixes the trailing control-state letter: accepts s iff `aut` accepts (q,s).
DenseStackAutomaton specialize(const DenseStackAutomaton& aut, State q);

/// Closure-backed automaton for lazily constructed lifts and products.
class FuncStackAutomaton : public StackAutomatonBase {
 public:
  uint64_t init = 0;
  std::function<uint64_t(uint64_t, ASym)> read_fn;
  std::function<uint64_t(uint64_t, ASym, int, uint64_t)> read_linked_fn;
  std::function<bool(uint64_t)> final_fn;
  bool suffix = true;

  uint64_t initial() const override { return init; }
  uint64_t read(uint64_t st, ASym a) const override { return read_fn(st, a); }
  uint64_t read_linked(uint64_t st, ASym a, int e, uint64_t t) const override {
    return read_linked_fn(st, a, e, t);
  }
  bool is_final(uint64_t st) const override { return final_fn(st); }
  bool reads_state_suffix() const override { return suffix; }
};

std::shared_ptr<StackAutomatonBase> lazy_complement(StackAutomatonRef a);
std::shared_ptr<StackAutomatonBase> specialize_lazy(StackAutomatonRef a, State q);

// ---------------------------------------------------------------------------
// Automata with oracles (§6.2) over the members of an order-n stack.

struct OracleAutomaton {
  uint32_t num_states = 0;
  uint32_t initial = 0;
  uint32_t num_oracles = 0;
  /// Index of the positional bottom oracle, if any: its bit is 1 exactly on
  /// the first (bottom) member, independent of the member's value.
  std::optional<uint32_t> bottom_oracle;
  std::function<uint32_t(uint32_t, const std::vector<bool>&)> delta;
  std::function<bool(uint32_t, State)> accepts_state;  // Acc: P -> 2^Q
};

/// Direct evaluation: reads the members bottom-up, oracle bits supplied by
/// the callback (the reference route for compile_oracle_product).
bool oracle_eval(const OracleAutomaton& ob, const Config& c,
                 const std::function<bool(uint32_t, const HOStack&)>& oracle_bit);

/// Synchronised product of the oracle automaton with the oracle DFAs plus a
/// bracket-depth counter; accepts exactly the configurations the oracle
/// automaton accepts. State count: (n+1)*|P|*prod|C_i| (+2 verdict sinks),
/// times 2 when a positional bottom oracle is present.
DenseStackAutomaton compile_oracle_product(const OracleAutomaton& ob,
                                           const std::vector<const DenseStackAutomaton*>& oracles,
                                           int order, uint32_t num_letters,
                                           uint32_t num_cpda_states);

// ---------------------------------------------------------------------------
// Regular-test annotation (the §2.6 closure theorem).

struct AnnotateResult {
  Cpda cpda;                              // A'
  std::function<State(State)> chi;        // erase bookkeeping
  std::function<bool(State)> in_F;        // configuration is in L(b)
  std::function<LetterId(LetterId)> letter_base;  // strip the behaviour tables
};

/// Builds A' whose reachable unfolding is isomorphic (under chi) to a's and
/// whose control states expose membership of the current configuration in
/// L(b). Refuses with a ResourceError when the per-symbol behaviour tables
/// exceed `table_cap` cells.
AnnotateResult annotate_with_regular_test(const Cpda& a, const DenseStackAutomaton& b,
                                          size_t table_cap = 200000);

std::string automaton_to_json(const DenseStackAutomaton& a);
DenseStackAutomaton automaton_from_json(const std::string& text);

}  // namespace cpg
