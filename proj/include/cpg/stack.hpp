#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "cpg/letters.hpp"

namespace cpg {

/// Numeric link (e, k): an e-link whose collapse truncates the enclosing
/// e-stack (top_{e+1} of the whole stack, when the symbol is topmost) to its
/// first k members. Numeric values are copied verbatim by push_j, which is
/// what keeps copies consistent with the shared lower structure.
struct CollapseLink {
  int order = 0;
  int target_height = 0;

  friend bool operator==(const CollapseLink& a, const CollapseLink& b) {
    return a.order == b.order && a.target_height == b.target_height;
  }
  friend auto operator<=>(const CollapseLink&, const CollapseLink&) = default;
};

struct StackSymbol {
  LetterId letter = 0;
  std::optional<CollapseLink> link;

  friend bool operator==(const StackSymbol& a, const StackSymbol& b) {
    return a.letter == b.letter && a.link == b.link;
  }
};

/// Immutable order-n stack; copies share structure. Order-1 stacks hold
/// symbols, higher orders hold stacks of the next order down.
class HOStack {
 public:
  HOStack() = default;  // empty/invalid; only as a container placeholder

  static HOStack bottom(int order, LetterId bottom_letter);
  static HOStack leaf(std::vector<StackSymbol> symbols);
  static HOStack node(std::vector<HOStack> members);

  bool valid() const { return order_ > 0; }
  int order() const { return order_; }
  size_t height() const;
  size_t hash() const { return hash_; }

  const std::vector<StackSymbol>& symbols() const;  // order 1
  const std::vector<HOStack>& members() const;      // order >= 2

  const StackSymbol& top_symbol() const;
  /// top_stack(i) = the top (i-1)-stack, 2 <= i <= order; top_stack(order+1)
  /// is the stack itself.
  HOStack top_stack(int i) const;

  HOStack with_top_member(HOStack m) const;       // replace topmost member
  HOStack with_members(std::vector<HOStack>) const;
  HOStack with_symbols(std::vector<StackSymbol>) const;

  friend bool operator==(const HOStack& a, const HOStack& b);
  friend bool operator!=(const HOStack& a, const HOStack& b) { return !(a == b); }
  /// Total order (deep lexicographic); used for deterministic sorting.
  static int compare(const HOStack& a, const HOStack& b);
  friend bool operator<(const HOStack& a, const HOStack& b) { return compare(a, b) < 0; }

 private:
  int order_ = 0;
  std::shared_ptr<const std::vector<StackSymbol>> syms_;
  std::shared_ptr<const std::vector<HOStack>> subs_;
  size_t hash_ = 0;

  void rehash();
};

struct HOStackHash {
  size_t operator()(const HOStack& s) const { return s.hash(); }
};

enum class OpKind : uint8_t { Pop, Push, Push1, Rewrite, Collapse, Id };

/// One of the six stack operations. `level` is k for Pop, j for Push and the
/// link order e for Push1; `letter` is used by Push1 and Rewrite.
struct StackOp {
  OpKind kind = OpKind::Id;
  int level = 0;
  LetterId letter = 0;

  static StackOp pop(int k) { return {OpKind::Pop, k, 0}; }
  static StackOp push(int j) { return {OpKind::Push, j, 0}; }
  static StackOp push1(LetterId g, int e) { return {OpKind::Push1, e, g}; }
  static StackOp rewrite(LetterId g) { return {OpKind::Rewrite, 0, g}; }
  static StackOp collapse() { return {OpKind::Collapse, 0, 0}; }
  static StackOp id() { return {OpKind::Id, 0, 0}; }

  friend bool operator==(const StackOp& a, const StackOp& b) {
    return a.kind == b.kind && a.level == b.level && a.letter == b.letter;
  }
  /// Same kind in the synchronisation sense: equal op type, equal order for
  /// Pop/Push/Push1 (the pushed/rewritten letter is free).
  static bool same_kind(const StackOp& a, const StackOp& b) {
    if (a.kind != b.kind) return false;
    if (a.kind == OpKind::Pop || a.kind == OpKind::Push || a.kind == OpKind::Push1)
      return a.level == b.level;
    return true;
  }
};

std::string op_to_string(const StackOp& op, const Alphabet& alphabet);

/// Applies a stack operation. Returns nullopt when the operation is
/// undefined on this stack (a recoverable outcome: the game layer treats it
/// as an absent edge). Throws UsageError on out-of-range arguments.
std::optional<HOStack> apply(const StackOp& op, const HOStack& s, const Alphabet& alphabet);

std::variant<StackSymbol, HOStack> top(const HOStack& s, int i);

/// Checks the structural invariants (bottom placement, link soundness).
void validate_stack(const HOStack& s, const Alphabet& alphabet);

/// Well-bracketed word of depth n plus the link-target map. Positions are
/// 1-based; target(i) is the index of the closing bracket of the linked
/// stack (the symbol position itself for 1-links).
struct FlattenEncoding {
  enum class Tok : uint8_t { Open, Close, Letter };
  struct Token {
    Tok kind;
    LetterId letter = 0;
  };
  std::vector<Token> word;            // word[i] is position i+1
  std::map<size_t, size_t> target;    // 1-based -> 1-based

  size_t size() const { return word.size(); }
};

FlattenEncoding flatten(const HOStack& s);
HOStack parse_flatten(const FlattenEncoding& enc, int order);

/// Single-line text form: brackets, letter names, links as `name@(e,k)`.
std::string stack_to_text(const HOStack& s, const Alphabet& alphabet);
HOStack stack_from_text(const std::string& text, const Alphabet& alphabet);

/// The shape alphabet: one bottom and one plain dummy letter.
const AlphabetRef& shape_alphabet();
LetterId shape_letter(bool bottom);

/// Replaces every letter by the dummy symbol, keeping links.
HOStack shape(const HOStack& s, const Alphabet& alphabet);

/// Rewrites every letter through `fn`, keeping structure and links.
HOStack map_letters(const HOStack& s, const std::function<LetterId(LetterId)>& fn);

}  // namespace cpg
