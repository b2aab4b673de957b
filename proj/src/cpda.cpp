#include "cpg/cpda.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace cpg {

std::optional<HOStack> apply_rule(const TransitionRule& r, const HOStack& s, const Alphabet& ab) {
  HOStack cur = s;
  if (r.rewrite) {
    auto t = apply(StackOp::rewrite(*r.rewrite), cur, ab);
    if (!t) return std::nullopt;
    cur = std::move(*t);
  }
  return apply(r.op, cur, ab);
}

std::vector<std::pair<Move, Config>> successors_with_moves(const Cpda& a, const Config& c) {
  std::vector<std::pair<Move, Config>> out;
  LetterId topl = c.stack.top_symbol().letter;
  for (const auto& r : a.delta(c.state, topl)) {
    auto s2 = apply_rule(r, c.stack, *a.alphabet);
    if (!s2) continue;
    out.emplace_back(Move{r.target, r.rewrite, r.op}, Config{r.target, std::move(*s2)});
  }
  return out;
}

std::vector<Config> successors(const Cpda& a, const Config& c) {
  std::vector<Config> out;
  for (auto& [m, cfg] : successors_with_moves(a, c)) out.push_back(cfg);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

int64_t UnfoldGraph::index_of(const Config& c) const {
  for (size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i] == c) return static_cast<int64_t>(i);
  return -1;
}

int64_t LabelledUnfoldGraph::index_of(const Config& c) const {
  for (size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i] == c) return static_cast<int64_t>(i);
  return -1;
}

UnfoldGraph unfold(const Cpda& a, const Config& root, size_t limit) {
  if (limit < 1) throw UsageError("unfold budget must be >= 1");
  UnfoldGraph g;
  std::unordered_map<Config, uint32_t, ConfigHash> index;
  std::deque<uint32_t> queue;
  g.vertices.push_back(root);
  g.expanded.push_back(false);
  index.emplace(root, 0);
  queue.push_back(0);
  while (!queue.empty()) {
    uint32_t v = queue.front();
    queue.pop_front();
    g.expanded[v] = true;
    auto succ = successors(a, g.vertices[v]);
    for (const auto& s : succ) {
      auto it = index.find(s);
      uint32_t w;
      if (it != index.end()) {
        w = it->second;
      } else if (g.vertices.size() < limit) {
        w = static_cast<uint32_t>(g.vertices.size());
        g.vertices.push_back(s);
        g.expanded.push_back(false);
        index.emplace(s, w);
        queue.push_back(w);
      } else {
        g.truncated = true;
        continue;
      }
      g.edges.emplace_back(v, w);
    }
  }
  return g;
}

LabelledUnfoldGraph labelled_unfold(const InputCpda& a, const Config& root, size_t limit) {
  if (limit < 1) throw UsageError("unfold budget must be >= 1");
  LabelledUnfoldGraph g;
  std::unordered_map<Config, uint32_t, ConfigHash> index;
  std::deque<uint32_t> queue;
  g.vertices.push_back(root);
  index.emplace(root, 0);
  queue.push_back(0);
  while (!queue.empty()) {
    uint32_t v = queue.front();
    queue.pop_front();
    const Config& c = g.vertices[v];
    LetterId topl = c.stack.top_symbol().letter;
    // Deterministic: sort by (label, target state, stack).
    std::vector<std::tuple<uint32_t, Config>> succ;
    for (const auto& [label, rule] : a.labelled_delta(c.state, topl)) {
      auto s2 = apply_rule(rule, c.stack, *a.cpda.alphabet);
      if (!s2) continue;
      succ.emplace_back(label, Config{rule.target, std::move(*s2)});
    }
    std::sort(succ.begin(), succ.end(), [](const auto& x, const auto& y) {
      if (std::get<0>(x) != std::get<0>(y)) return std::get<0>(x) < std::get<0>(y);
      return std::get<1>(x) < std::get<1>(y);
    });
    for (auto& [label, s] : succ) {
      auto it = index.find(s);
      uint32_t w;
      if (it != index.end()) {
        w = it->second;
      } else if (g.vertices.size() < limit) {
        w = static_cast<uint32_t>(g.vertices.size());
        g.vertices.push_back(s);
        index.emplace(s, w);
        queue.push_back(w);
      } else {
        g.truncated = true;
        continue;
      }
      g.edges.emplace_back(v, label, w);
    }
  }
  return g;
}

// ---------------------------------------------------------------------------
// normalize: compile composite rules into strict form.

namespace {

struct PendKey {
  State target;
  bool dynamic;       // false: static letter; true: repair function id
  uint32_t payload;   // letter or repair id

  bool operator==(const PendKey& o) const {
    return target == o.target && dynamic == o.dynamic && payload == o.payload;
  }
};

struct HelperKey {
  State source;
  LetterId letter;
  uint32_t rule;
  uint32_t step;
  bool via_pend;  // rules enumerated from a pending state have their own keyspace

  bool operator==(const HelperKey& o) const {
    return source == o.source && letter == o.letter && rule == o.rule && step == o.step &&
           via_pend == o.via_pend;
  }
};

struct NormKey {
  // kind 0: plain(q); 1: pend; 2: helper
  int kind = 0;
  State plain = 0;
  PendKey pend{};
  HelperKey helper{};

  bool operator==(const NormKey& o) const {
    if (kind != o.kind) return false;
    if (kind == 0) return plain == o.plain;
    if (kind == 1) return pend == o.pend;
    return helper == o.helper;
  }
};

struct NormKeyHash {
  size_t operator()(const NormKey& k) const {
    size_t h = static_cast<size_t>(k.kind);
    if (k.kind == 0) {
      hash_mix(h, k.plain);
    } else if (k.kind == 1) {
      hash_mix(h, k.pend.target);
      hash_mix(h, k.pend.dynamic ? 1u : 0u);
      hash_mix(h, k.pend.payload);
    } else {
      hash_mix(h, k.helper.source);
      hash_mix(h, k.helper.letter);
      hash_mix(h, k.helper.rule);
      hash_mix(h, k.helper.step);
      hash_mix(h, k.helper.via_pend ? 1u : 0u);
    }
    return h;
  }
};

struct Chunk {
  std::optional<LetterId> rew;
  StackOp op;
};

struct CompiledRule {
  std::vector<Chunk> chunks;
  std::optional<LetterId> trailing;
  std::optional<uint32_t> repair;
  State target;
};

CompiledRule compile_rule(const CompositeRule& r) {
  CompiledRule out;
  out.target = r.target;
  out.repair = r.repair;
  std::optional<LetterId> pending;
  for (const auto& op : r.ops) {
    if (op.kind == OpKind::Rewrite) {
      pending = op.letter;  // consecutive rewrites: last one wins
    } else {
      out.chunks.push_back({pending, op});
      pending.reset();
    }
  }
  out.trailing = pending;
  if (out.repair && out.trailing) throw UsageError("composite rule with both static and dynamic trailing rewrite");
  if (out.repair && out.chunks.empty()) throw UsageError("dynamic repair needs a preceding op");
  return out;
}

struct NormState {
  CompositeCpda in;
  Color neutral_color;
  Interner<NormKey, NormKeyHash> keys;
  StateTableRef table = std::make_shared<StateTable>();

  State intern(const NormKey& k) {
    uint32_t before = static_cast<uint32_t>(keys.size());
    State id = keys.intern(k);
    if (id == before) {
      // New state: register in the table.
      std::ostringstream name;
      if (k.kind == 0) {
        name << in.states->name(k.plain);
        table->add(name.str(), in.states->owner(k.plain), in.states->color(k.plain));
      } else if (k.kind == 1) {
        name << in.states->name(k.pend.target) << "!p" << (k.pend.dynamic ? "f" : "l")
             << k.pend.payload;
        table->add(name.str(), in.states->owner(k.pend.target), in.states->color(k.pend.target));
      } else {
        name << in.states->name(k.helper.source) << "!h" << k.helper.letter << "_"
             << k.helper.rule << "_" << k.helper.step << (k.helper.via_pend ? "p" : "");
        table->add(name.str(), in.states->owner(k.helper.source), neutral_color);
      }
    }
    return id;
  }
};

}  // namespace

Normalized normalize(const CompositeCpda& in) {
  Color neutral = 0;
  for (State q = 0; q < in.states->size(); ++q) neutral = std::max(neutral, in.states->color(q));

  auto st = std::make_shared<NormState>();
  st->in = in;
  st->neutral_color = neutral;
  // Plain states first so their ids match the input's.
  for (State q = 0; q < in.states->size(); ++q) st->intern(NormKey{0, q, {}, {}});

  auto target_state = [st](const CompiledRule& cr) -> State {
    if (cr.trailing) return st->intern(NormKey{1, 0, PendKey{cr.target, false, *cr.trailing}, {}});
    if (cr.repair) return st->intern(NormKey{1, 0, PendKey{cr.target, true, *cr.repair}, {}});
    return st->intern(NormKey{0, cr.target, {}, {}});
  };

  // Emits the strict rules for composite rules of `source` read with
  // effective top letter `eff`; `fuse` is the pending rewrite (if any) to
  // fold into each rule's first slot.
  auto emit = [st, target_state](State source, LetterId eff, std::optional<LetterId> fuse,
                                 bool via_pend) -> std::vector<TransitionRule> {
    std::vector<TransitionRule> out;
    auto comps = st->in.delta(source, eff);
    for (uint32_t ri = 0; ri < comps.size(); ++ri) {
      CompiledRule cr = compile_rule(comps[ri]);
      if (cr.chunks.empty()) {
        std::optional<LetterId> rew = cr.trailing ? cr.trailing : fuse;
        out.push_back({st->intern(NormKey{0, cr.target, {}, {}}), rew, StackOp::id()});
        continue;
      }
      std::optional<LetterId> first_rew = cr.chunks[0].rew ? cr.chunks[0].rew : fuse;
      if (cr.chunks.size() == 1) {
        out.push_back({target_state(cr), first_rew, cr.chunks[0].op});
      } else {
        State h = st->intern(NormKey{2, 0, {}, HelperKey{source, eff, ri, 1, via_pend}});
        out.push_back({h, first_rew, cr.chunks[0].op});
      }
    }
    return out;
  };

  Cpda out;
  out.order = in.order;
  out.alphabet = in.alphabet;
  out.states = st->table;
  out.initial_state = in.initial_state;  // plain ids coincide
  out.initial_stack = in.initial_stack;
  out.delta = [st, emit, target_state](State q, LetterId observed) -> std::vector<TransitionRule> {
    const NormKey& k = st->keys.at(q);
    if (k.kind == 0) return emit(k.plain, observed, std::nullopt, false);
    if (k.kind == 1) {
      LetterId eff = k.pend.dynamic ? st->in.repair_apply(k.pend.payload, observed)
                                    : k.pend.payload;
      return emit(k.pend.target, eff, eff, true);
    }
    // Helper: continue the chunk chain of the recorded rule.
    const HelperKey& h = k.helper;
    auto comps = st->in.delta(h.source, h.letter);
    CompiledRule cr = compile_rule(comps.at(h.rule));
    const Chunk& c = cr.chunks.at(h.step);
    State next;
    if (h.step + 1 < cr.chunks.size()) {
      next = st->intern(NormKey{2, 0, {}, HelperKey{h.source, h.letter, h.rule, h.step + 1, h.via_pend}});
    } else {
      next = target_state(cr);
    }
    return {TransitionRule{next, c.rew, c.op}};
  };

  Normalized n;
  n.cpda = out;
  n.project = [st](State q) -> std::optional<std::pair<State, std::optional<LetterId>>> {
    const NormKey& k = st->keys.at(q);
    if (k.kind == 2) return std::nullopt;
    if (k.kind == 0) return std::make_pair(k.plain, std::optional<LetterId>{});
    if (k.pend.dynamic) return std::make_pair(k.pend.target, std::optional<LetterId>{});
    return std::make_pair(k.pend.target, std::optional<LetterId>{k.pend.payload});
  };
  n.pending_letter = [st](State q) -> std::optional<LetterId> {
    const NormKey& k = st->keys.at(q);
    if (k.kind == 1 && !k.pend.dynamic) return k.pend.payload;
    return std::nullopt;
  };
  n.effective_top = [st](State q, LetterId observed) -> LetterId {
    const NormKey& k = st->keys.at(q);
    if (k.kind != 1) return observed;
    return k.pend.dynamic ? st->in.repair_apply(k.pend.payload, observed) : k.pend.payload;
  };
  n.pend_state_for_repair = [st](State target, uint32_t fn) -> State {
    return st->intern(NormKey{1, 0, PendKey{target, true, fn}, {}});
  };
  n.is_helper = [st](State q) { return st->keys.at(q).kind == 2; };
  return n;
}

std::string unfold_to_dot(const UnfoldGraph& g, const Cpda& a) {
  std::ostringstream os;
  os << "digraph unfolding {\n";
  for (size_t i = 0; i < g.vertices.size(); ++i) {
    const Config& c = g.vertices[i];
    bool eloise = a.states->owner(c.state) == Owner::Eloise;
    os << "  v" << i << " [shape=" << (eloise ? "oval" : "box") << ", label=\""
       << a.states->name(c.state) << "\\n"
       << stack_to_text(c.stack, *a.alphabet) << "\\ncolor " << a.states->color(c.state)
       << "\"];\n";
  }
  for (const auto& [u, v] : g.edges) os << "  v" << u << " -> v" << v << ";\n";
  os << "}\n";
  return os.str();
}

}  // namespace cpg
