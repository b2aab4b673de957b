#include "cpg/stack.hpp"

#include <algorithm>
#include <cctype>
#include <functional>
#include <sstream>

namespace cpg {

HOStack HOStack::bottom(int order, LetterId bottom_letter) {
  if (order < 1) throw UsageError("stack order must be >= 1");
  HOStack s = leaf({StackSymbol{bottom_letter, std::nullopt}});
  for (int k = 2; k <= order; ++k) s = node({s});
  return s;
}

HOStack HOStack::leaf(std::vector<StackSymbol> symbols) {
  if (symbols.empty()) throw UsageError("1-stack must be non-empty");
  HOStack s;
  s.order_ = 1;
  s.syms_ = std::make_shared<const std::vector<StackSymbol>>(std::move(symbols));
  s.rehash();
  return s;
}

HOStack HOStack::node(std::vector<HOStack> members) {
  if (members.empty()) throw UsageError("stack must be non-empty");
  int sub = members.front().order();
  for (const auto& m : members)
    if (m.order() != sub) throw UsageError("mixed member orders");
  HOStack s;
  s.order_ = sub + 1;
  s.subs_ = std::make_shared<const std::vector<HOStack>>(std::move(members));
  s.rehash();
  return s;
}

void HOStack::rehash() {
  size_t h = static_cast<size_t>(order_) * 0x9e3779b9u;
  if (order_ == 1) {
    for (const auto& sym : *syms_) {
      hash_mix(h, sym.letter);
      if (sym.link) {
        hash_mix(h, static_cast<size_t>(sym.link->order) * 31 + 7);
        hash_mix(h, static_cast<size_t>(sym.link->target_height));
      } else {
        hash_mix(h, 0xabcdu);
      }
    }
  } else {
    for (const auto& m : *subs_) hash_mix(h, m.hash());
  }
  hash_ = h;
}

size_t HOStack::height() const {
  return order_ == 1 ? syms_->size() : subs_->size();
}

const std::vector<StackSymbol>& HOStack::symbols() const {
  if (order_ != 1) throw UsageError("symbols() on order != 1");
  return *syms_;
}

const std::vector<HOStack>& HOStack::members() const {
  if (order_ < 2) throw UsageError("members() on order 1");
  return *subs_;
}

const StackSymbol& HOStack::top_symbol() const {
  const HOStack* s = this;
  while (s->order_ > 1) s = &s->subs_->back();
  return s->syms_->back();
}

HOStack HOStack::top_stack(int i) const {
  if (i < 2 || i > order_ + 1) throw UsageError("top_stack index out of range");
  if (i == order_ + 1) return *this;
  const HOStack* s = this;
  while (s->order_ >= i) s = &s->subs_->back();
  return *s;
}

HOStack HOStack::with_top_member(HOStack m) const {
  std::vector<HOStack> ms = *subs_;
  ms.back() = std::move(m);
  return node(std::move(ms));
}

HOStack HOStack::with_members(std::vector<HOStack> ms) const { return node(std::move(ms)); }
HOStack HOStack::with_symbols(std::vector<StackSymbol> sy) const { return leaf(std::move(sy)); }

bool operator==(const HOStack& a, const HOStack& b) {
  if (a.order_ != b.order_ || a.hash_ != b.hash_) return false;
  if (a.order_ == 0) return true;
  if (a.order_ == 1) return a.syms_ == b.syms_ || *a.syms_ == *b.syms_;
  if (a.subs_ == b.subs_) return true;
  return *a.subs_ == *b.subs_;
}

int HOStack::compare(const HOStack& a, const HOStack& b) {
  if (a.order_ != b.order_) return a.order_ < b.order_ ? -1 : 1;
  if (a.order_ == 0) return 0;
  if (a.order_ == 1) {
    const auto& x = *a.syms_;
    const auto& y = *b.syms_;
    size_t n = std::min(x.size(), y.size());
    for (size_t i = 0; i < n; ++i) {
      if (x[i].letter != y[i].letter) return x[i].letter < y[i].letter ? -1 : 1;
      int lx = x[i].link ? x[i].link->order : 0;
      int ly = y[i].link ? y[i].link->order : 0;
      if (lx != ly) return lx < ly ? -1 : 1;
      int tx = x[i].link ? x[i].link->target_height : 0;
      int ty = y[i].link ? y[i].link->target_height : 0;
      if (tx != ty) return tx < ty ? -1 : 1;
    }
    if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
    return 0;
  }
  if (a.subs_ == b.subs_) return 0;
  const auto& x = *a.subs_;
  const auto& y = *b.subs_;
  size_t n = std::min(x.size(), y.size());
  for (size_t i = 0; i < n; ++i) {
    int c = compare(x[i], y[i]);
    if (c != 0) return c;
  }
  if (x.size() != y.size()) return x.size() < y.size() ? -1 : 1;
  return 0;
}

std::string op_to_string(const StackOp& op, const Alphabet& alphabet) {
  std::ostringstream os;
  switch (op.kind) {
    case OpKind::Pop: os << "pop " << op.level; break;
    case OpKind::Push: os << "push " << op.level; break;
    case OpKind::Push1: os << "push1 " << alphabet.name(op.letter) << " " << op.level; break;
    case OpKind::Rewrite: os << "rew " << alphabet.name(op.letter); break;
    case OpKind::Collapse: os << "collapse"; break;
    case OpKind::Id: os << "id"; break;
  }
  return os.str();
}

namespace {

// Recursive pop_k: remove the top (k-1)-stack.
std::optional<HOStack> pop_rec(const HOStack& s, int k) {
  if (s.order() == k) {
    if (s.height() < 2) return std::nullopt;
    if (s.order() == 1) {
      auto sy = s.symbols();
      sy.pop_back();
      return HOStack::leaf(std::move(sy));
    }
    auto ms = s.members();
    ms.pop_back();
    return HOStack::node(std::move(ms));
  }
  auto sub = pop_rec(s.members().back(), k);
  if (!sub) return std::nullopt;
  return s.with_top_member(std::move(*sub));
}

HOStack push_rec(const HOStack& s, int j) {
  if (s.order() == j) {
    auto ms = s.members();
    ms.push_back(ms.back());
    return HOStack::node(std::move(ms));
  }
  return s.with_top_member(push_rec(s.members().back(), j));
}

HOStack append_symbol(const HOStack& s, StackSymbol sym) {
  if (s.order() == 1) {
    auto sy = s.symbols();
    sy.push_back(sym);
    return HOStack::leaf(std::move(sy));
  }
  return s.with_top_member(append_symbol(s.members().back(), sym));
}

std::optional<HOStack> push1_rec(const HOStack& s, LetterId g, int e) {
  if (s.order() > e) {
    auto sub = push1_rec(s.members().back(), g, e);
    if (!sub) return std::nullopt;
    return s.with_top_member(std::move(*sub));
  }
  // s.order() == e: attach a link to the member immediately below the top one.
  if (e == 1) {
    CollapseLink link{1, static_cast<int>(s.height())};
    auto sy = s.symbols();
    sy.push_back(StackSymbol{g, link});
    return HOStack::leaf(std::move(sy));
  }
  if (s.height() < 2) return std::nullopt;
  CollapseLink link{e, static_cast<int>(s.height()) - 1};
  return s.with_top_member(append_symbol(s.members().back(), StackSymbol{g, link}));
}

HOStack rewrite_top(const HOStack& s, LetterId g) {
  if (s.order() == 1) {
    auto sy = s.symbols();
    sy.back().letter = g;  // link untouched
    return HOStack::leaf(std::move(sy));
  }
  return s.with_top_member(rewrite_top(s.members().back(), g));
}

HOStack truncate_level(const HOStack& s, int e, int keep) {
  if (s.order() == e) {
    if (s.order() == 1) {
      auto sy = s.symbols();
      sy.resize(static_cast<size_t>(keep));
      return HOStack::leaf(std::move(sy));
    }
    auto ms = s.members();
    ms.resize(static_cast<size_t>(keep));
    return HOStack::node(std::move(ms));
  }
  return s.with_top_member(truncate_level(s.members().back(), e, keep));
}

}  // namespace

std::optional<HOStack> apply(const StackOp& op, const HOStack& s, const Alphabet& alphabet) {
  switch (op.kind) {
    case OpKind::Id:
      return s;
    case OpKind::Pop:
      if (op.level < 1 || op.level > s.order()) throw UsageError("pop level out of range");
      return pop_rec(s, op.level);
    case OpKind::Push:
      if (op.level < 2 || op.level > s.order()) throw UsageError("push level out of range");
      return push_rec(s, op.level);
    case OpKind::Push1:
      if (op.level < 1 || op.level > s.order()) throw UsageError("push1 link order out of range");
      if (alphabet.is_bottom(op.letter)) throw UsageError("push1 of a bottom letter");
      return push1_rec(s, op.letter, op.level);
    case OpKind::Rewrite: {
      // Rewriting a bottom symbol is only allowed annotation-to-annotation
      // (bottom-flagged to bottom-flagged); for input alphabets this reduces
      // to: undefined when the top 1-stack is just the bottom symbol.
      bool top_bottom = alphabet.is_bottom(s.top_symbol().letter);
      if (top_bottom != alphabet.is_bottom(op.letter)) return std::nullopt;
      return rewrite_top(s, op.letter);
    }
    case OpKind::Collapse: {
      const StackSymbol& t = s.top_symbol();
      if (!t.link) return std::nullopt;
      int e = t.link->order;
      int k = t.link->target_height;
      HOStack level = e == s.order() ? s : s.top_stack(e + 1);
      if (k < 1 || static_cast<size_t>(k) >= level.height())
        throw UsageError("corrupt collapse link");
      return truncate_level(s, e, k);
    }
  }
  throw UsageError("bad op kind");
}

std::variant<StackSymbol, HOStack> top(const HOStack& s, int i) {
  if (i < 1 || i > s.order() + 1) throw UsageError("top index out of range");
  if (i == 1) return s.top_symbol();
  return s.top_stack(i);
}

namespace {

void validate_rec(const HOStack& s, const Alphabet& alphabet,
                  std::vector<std::pair<int, size_t>>& position) {
  // position[d] = (order of enclosing stack, 1-based index of the member we
  // are inside), outermost first.
  if (s.order() == 1) {
    const auto& sy = s.symbols();
    for (size_t i = 0; i < sy.size(); ++i) {
      bool bottom = alphabet.is_bottom(sy[i].letter);
      if (bottom != (i == 0))
        throw UsageError("bottom letter must appear exactly at position 1");
      if (bottom && sy[i].link) throw UsageError("bottom symbol carries a link");
      if (!bottom && !sy[i].link) throw UsageError("non-bottom symbol without link");
      if (sy[i].link) {
        int e = sy[i].link->order;
        int k = sy[i].link->target_height;
        if (k < 1) throw UsageError("link target below 1");
        // Index of the (e-1)-stack member holding this symbol in its
        // enclosing e-stack.
        size_t j;
        if (e == 1) {
          j = i + 1;
        } else {
          bool found = false;
          j = 0;
          for (const auto& [ord, idx] : position)
            if (ord == e) {
              j = idx;
              found = true;
            }
          if (!found) throw UsageError("link order exceeds stack order");
        }
        if (static_cast<size_t>(k) >= j) throw UsageError("link does not point strictly below");
      }
    }
    return;
  }
  const auto& ms = s.members();
  for (size_t i = 0; i < ms.size(); ++i) {
    position.emplace_back(s.order(), i + 1);
    validate_rec(ms[i], alphabet, position);
    position.pop_back();
  }
}

}  // namespace

void validate_stack(const HOStack& s, const Alphabet& alphabet) {
  std::vector<std::pair<int, size_t>> position;
  validate_rec(s, alphabet, position);
}

namespace {

// closes[e] collects, for the e-stack currently being walked, the positions
// closing each finished member (for e == 1: the symbol positions).
void flatten_rec(const HOStack& s, FlattenEncoding& out,
                 std::vector<std::vector<size_t>>& closes) {
  out.word.push_back({FlattenEncoding::Tok::Open});
  if (s.order() == 1) {
    closes[1].clear();
    for (const auto& sym : s.symbols()) {
      out.word.push_back({FlattenEncoding::Tok::Letter, sym.letter});
      size_t pos = out.word.size();
      closes[1].push_back(pos);
      if (sym.link) {
        const auto& c = closes[static_cast<size_t>(sym.link->order)];
        out.target[pos] = c.at(static_cast<size_t>(sym.link->target_height) - 1);
      }
    }
  } else {
    closes[static_cast<size_t>(s.order())].clear();
    for (const auto& m : s.members()) {
      flatten_rec(m, out, closes);
      closes[static_cast<size_t>(s.order())].push_back(out.word.size());
    }
  }
  out.word.push_back({FlattenEncoding::Tok::Close});
}

}  // namespace

FlattenEncoding flatten(const HOStack& s) {
  FlattenEncoding out;
  std::vector<std::vector<size_t>> closes(static_cast<size_t>(s.order()) + 1);
  flatten_rec(s, out, closes);
  return out;
}

namespace {

struct FlatParser {
  const FlattenEncoding& enc;
  size_t pos = 0;  // 0-based index into word
  // close position (1-based) -> (order of closed stack, member index in parent)
  std::map<size_t, std::pair<int, size_t>> close_info;
  // symbol position -> index within its 1-stack
  std::map<size_t, size_t> sym_index;

  HOStack parse(int order) {
    if (pos >= enc.word.size() || enc.word[pos].kind != FlattenEncoding::Tok::Open)
      throw UsageError("flatten parse: expected '['");
    ++pos;
    if (order == 1) {
      std::vector<StackSymbol> sy;
      while (pos < enc.word.size() && enc.word[pos].kind == FlattenEncoding::Tok::Letter) {
        sy.push_back(StackSymbol{enc.word[pos].letter, std::nullopt});
        sym_index[pos + 1] = sy.size();
        ++pos;
      }
      expect_close();
      return HOStack::leaf(std::move(sy));
    }
    std::vector<HOStack> ms;
    while (pos < enc.word.size() && enc.word[pos].kind == FlattenEncoding::Tok::Open) {
      ms.push_back(parse(order - 1));
      close_info[pos] = {order - 1, ms.size()};  // pos is 1-based after the close
    }
    expect_close();
    return HOStack::node(std::move(ms));
  }

  void expect_close() {
    if (pos >= enc.word.size() || enc.word[pos].kind != FlattenEncoding::Tok::Close)
      throw UsageError("flatten parse: expected ']'");
    ++pos;
  }
};

}  // namespace

HOStack parse_flatten(const FlattenEncoding& enc, int order) {
  FlatParser p{enc};
  HOStack skeleton = p.parse(order);
  if (p.pos != enc.word.size()) throw UsageError("flatten parse: trailing tokens");

  // Resolve target positions into (order, height) links, then rebuild.
  std::map<size_t, CollapseLink> links;  // symbol position -> link
  for (const auto& [from, to] : enc.target) {
    auto si = p.sym_index.find(to);
    if (si != p.sym_index.end()) {
      links[from] = CollapseLink{1, static_cast<int>(si->second)};
      continue;
    }
    auto ci = p.close_info.find(to);
    if (ci == p.close_info.end()) throw UsageError("flatten parse: bad link target");
    links[from] = CollapseLink{ci->second.first + 1, static_cast<int>(ci->second.second)};
  }

  // Rebuild symbols with links, walking in the same order as the parser.
  size_t word_pos = 0;
  std::function<HOStack(const HOStack&)> rebuild = [&](const HOStack& s) -> HOStack {
    ++word_pos;  // '['
    if (s.order() == 1) {
      std::vector<StackSymbol> sy = s.symbols();
      for (auto& sym : sy) {
        ++word_pos;
        auto it = links.find(word_pos);
        if (it != links.end()) sym.link = it->second;
      }
      ++word_pos;  // ']'
      return HOStack::leaf(std::move(sy));
    }
    std::vector<HOStack> ms;
    ms.reserve(s.members().size());
    for (const auto& m : s.members()) ms.push_back(rebuild(m));
    ++word_pos;  // ']'
    return HOStack::node(std::move(ms));
  };
  return rebuild(skeleton);
}

std::string stack_to_text(const HOStack& s, const Alphabet& alphabet) {
  std::ostringstream os;
  std::function<void(const HOStack&)> rec = [&](const HOStack& t) {
    os << "[";
    if (t.order() == 1) {
      for (const auto& sym : t.symbols()) {
        os << " " << alphabet.name(sym.letter);
        if (sym.link) os << "@(" << sym.link->order << "," << sym.link->target_height << ")";
      }
      os << " ";
    } else {
      for (const auto& m : t.members()) rec(m);
    }
    os << "]";
  };
  rec(s);
  return os.str();
}

HOStack stack_from_text(const std::string& text, const Alphabet& alphabet) {
  size_t i = 0;
  auto skip_ws = [&] { while (i < text.size() && isspace(static_cast<unsigned char>(text[i]))) ++i; };
  std::function<HOStack()> rec = [&]() -> HOStack {
    skip_ws();
    if (i >= text.size() || text[i] != '[') throw UsageError("stack text: expected '['");
    ++i;
    skip_ws();
    if (i < text.size() && text[i] == '[') {
      std::vector<HOStack> ms;
      while (true) {
        skip_ws();
        if (i < text.size() && text[i] == '[') {
          ms.push_back(rec());
        } else {
          break;
        }
      }
      skip_ws();
      if (i >= text.size() || text[i] != ']') throw UsageError("stack text: expected ']'");
      ++i;
      return HOStack::node(std::move(ms));
    }
    std::vector<StackSymbol> sy;
    while (true) {
      skip_ws();
      if (i >= text.size()) throw UsageError("stack text: unterminated 1-stack");
      if (text[i] == ']') {
        ++i;
        break;
      }
      size_t start = i;
      while (i < text.size() && text[i] != ']' && text[i] != '@' &&
             !isspace(static_cast<unsigned char>(text[i])))
        ++i;
      std::string name = text.substr(start, i - start);
      LetterId id = alphabet.find(name);
      if (id == kNoId) throw UsageError("stack text: unknown letter " + name);
      StackSymbol sym{id, std::nullopt};
      if (i < text.size() && text[i] == '@') {
        ++i;
        if (i >= text.size() || text[i] != '(') throw UsageError("stack text: bad link");
        ++i;
        int e = 0, k = 0;
        while (i < text.size() && isdigit(static_cast<unsigned char>(text[i])))
          e = e * 10 + (text[i++] - '0');
        if (i >= text.size() || text[i] != ',') throw UsageError("stack text: bad link");
        ++i;
        while (i < text.size() && isdigit(static_cast<unsigned char>(text[i])))
          k = k * 10 + (text[i++] - '0');
        if (i >= text.size() || text[i] != ')') throw UsageError("stack text: bad link");
        ++i;
        sym.link = CollapseLink{e, k};
      }
      sy.push_back(sym);
    }
    return HOStack::leaf(std::move(sy));
  };
  HOStack out = rec();
  skip_ws();
  if (i != text.size()) throw UsageError("stack text: trailing characters");
  return out;
}

const AlphabetRef& shape_alphabet() {
  static AlphabetRef a = [] {
    auto ab = std::make_shared<Alphabet>();
    ab->add("#b", true);
    ab->add("#", false);
    return ab;
  }();
  return a;
}

LetterId shape_letter(bool bottom) { return bottom ? 0u : 1u; }

HOStack map_letters(const HOStack& s, const std::function<LetterId(LetterId)>& fn) {
  if (s.order() == 1) {
    std::vector<StackSymbol> sy = s.symbols();
    for (auto& sym : sy) sym.letter = fn(sym.letter);
    return HOStack::leaf(std::move(sy));
  }
  std::vector<HOStack> ms;
  ms.reserve(s.members().size());
  for (const auto& m : s.members()) ms.push_back(map_letters(m, fn));
  return HOStack::node(std::move(ms));
}

HOStack shape(const HOStack& s, const Alphabet& alphabet) {
  if (s.order() == 1) {
    std::vector<StackSymbol> sy = s.symbols();
    for (auto& sym : sy) sym.letter = shape_letter(alphabet.is_bottom(sym.letter));
    return HOStack::leaf(std::move(sy));
  }
  std::vector<HOStack> ms;
  ms.reserve(s.members().size());
  for (const auto& m : s.members()) ms.push_back(shape(m, alphabet));
  return HOStack::node(std::move(ms));
}

}  // namespace cpg
