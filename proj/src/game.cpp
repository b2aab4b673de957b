#include "cpg/game.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <sstream>

namespace cpg {

CpdaGameSpec complete_deadends(const CpdaGameSpec& spec) {
  auto table = std::make_shared<StateTable>();
  for (State q = 0; q < spec.cpda.states->size(); ++q)
    table->add(spec.cpda.states->name(q), spec.cpda.states->owner(q), spec.cpda.states->color(q));
  Color d = std::max<Color>(spec.max_color, 1);
  State esink = table->add("__sinkE", Owner::Eloise, 1);   // odd: Eloise loses here
  State asink = table->add("__sinkA", Owner::Abelard, 0);  // even: Abelard loses here

  auto inner = spec.cpda.delta;
  auto states = spec.cpda.states;
  CpdaGameSpec out = spec;
  out.cpda.states = table;
  out.max_color = d;
  out.cpda.delta = [inner, states, esink, asink](State q, LetterId a) {
    std::vector<TransitionRule> rules;
    if (q == esink || q == asink) {
      rules.push_back({q, std::nullopt, StackOp::id()});
      return rules;
    }
    rules = inner(q, a);
    State sink = states->owner(q) == Owner::Eloise ? esink : asink;
    rules.push_back({sink, std::nullopt, StackOp::id()});
    return rules;
  };
  return out;
}

// ---------------------------------------------------------------------------
// Zielonka.

namespace {

struct Sub {
  const FiniteParityGame& g;
  std::vector<bool> in;  // vertex is part of the current subgame

  size_t count() const { return static_cast<size_t>(std::count(in.begin(), in.end(), true)); }
};

// Attractor of `targets` for player p within `sub`. Removes attracted
// vertices from sub.in if `remove`; fills strategy moves for p's vertices.
std::vector<uint32_t> attractor(Sub& sub, Owner p, const std::vector<uint32_t>& targets,
                                std::vector<int64_t>& strategy) {
  const auto& g = sub.g;
  size_t n = g.size();
  std::vector<uint32_t> degree(n, 0);
  std::vector<std::vector<uint32_t>> preds(n);
  for (uint32_t v = 0; v < n; ++v) {
    if (!sub.in[v]) continue;
    for (uint32_t w : g.succ[v]) {
      if (!sub.in[w]) continue;
      ++degree[v];
      preds[w].push_back(v);
    }
  }
  std::vector<bool> attracted(n, false);
  std::vector<uint32_t> order;
  std::deque<uint32_t> queue;
  for (uint32_t t : targets) {
    if (!attracted[t]) {
      attracted[t] = true;
      order.push_back(t);
      queue.push_back(t);
    }
  }
  while (!queue.empty()) {
    uint32_t w = queue.front();
    queue.pop_front();
    for (uint32_t v : preds[w]) {
      if (attracted[v]) continue;
      if (g.vertices[v].owner == p) {
        attracted[v] = true;
        if (strategy[v] < 0) strategy[v] = w;
        order.push_back(v);
        queue.push_back(v);
      } else {
        if (--degree[v] == 0) {
          attracted[v] = true;
          order.push_back(v);
          queue.push_back(v);
        }
      }
    }
  }
  return order;
}

void zielonka(Sub sub, FiniteSolve& out) {
  const auto& g = sub.g;
  size_t n = g.size();
  if (sub.count() == 0) return;
  Color c = INT32_MAX;
  for (uint32_t v = 0; v < n; ++v)
    if (sub.in[v]) c = std::min(c, g.vertices[v].color);
  Owner p = (c % 2 == 0) ? Owner::Eloise : Owner::Abelard;

  std::vector<uint32_t> targets;
  for (uint32_t v = 0; v < n; ++v)
    if (sub.in[v] && g.vertices[v].color == c) targets.push_back(v);

  std::vector<int64_t> astrat(n, -1);
  Sub scratch = sub;
  auto att = attractor(scratch, p, targets, astrat);
  std::vector<bool> in_att(n, false);
  for (uint32_t v : att) in_att[v] = true;

  Sub rest = sub;
  for (uint32_t v : att) rest.in[v] = false;
  FiniteSolve inner{std::vector<Owner>(n, Owner::Eloise), std::vector<int64_t>(n, -1)};
  zielonka(rest, inner);

  std::vector<uint32_t> opp;
  for (uint32_t v = 0; v < n; ++v)
    if (rest.in[v] && inner.winner[v] == opponent(p)) opp.push_back(v);

  if (opp.empty()) {
    // p wins everywhere in sub.
    for (uint32_t v = 0; v < n; ++v) {
      if (!sub.in[v]) continue;
      out.winner[v] = p;
      if (g.vertices[v].owner != p) continue;
      if (in_att[v] && astrat[v] >= 0) {
        out.strategy[v] = astrat[v];
      } else if (rest.in[v] && inner.strategy[v] >= 0) {
        out.strategy[v] = inner.strategy[v];
      } else {
        // A target vertex of colour c owned by p: any successor inside sub.
        for (uint32_t w : g.succ[v])
          if (sub.in[w]) {
            out.strategy[v] = w;
            break;
          }
      }
    }
    return;
  }

  std::vector<int64_t> bstrat(n, -1);
  Sub scratch2 = sub;
  auto batt = attractor(scratch2, opponent(p), opp, bstrat);
  std::vector<bool> in_batt(n, false);
  for (uint32_t v : batt) in_batt[v] = true;

  Sub rest2 = sub;
  for (uint32_t v : batt) rest2.in[v] = false;
  FiniteSolve inner2{std::vector<Owner>(n, Owner::Eloise), std::vector<int64_t>(n, -1)};
  zielonka(rest2, inner2);

  for (uint32_t v = 0; v < n; ++v) {
    if (!sub.in[v]) continue;
    if (in_batt[v]) {
      out.winner[v] = opponent(p);
      if (g.vertices[v].owner == opponent(p)) {
        // Vertices already winning in the inner subgame keep that strategy
        // (looping back into the attractor would not be progress).
        if (rest.in[v] && inner.winner[v] == opponent(p) && inner.strategy[v] >= 0) {
          out.strategy[v] = inner.strategy[v];
        } else if (bstrat[v] >= 0) {
          out.strategy[v] = bstrat[v];
        }
      }
    } else {
      out.winner[v] = inner2.winner[v];
      out.strategy[v] = inner2.strategy[v];
    }
  }
}

}  // namespace

FiniteSolve solve_finite(const FiniteParityGame& g) {
  size_t n = g.size();
  for (uint32_t v = 0; v < n; ++v)
    if (g.succ[v].empty()) throw UsageError("solve_finite: dead-end vertex " + std::to_string(v));
  FiniteSolve out{std::vector<Owner>(n, Owner::Eloise), std::vector<int64_t>(n, -1)};
  Sub sub{g, std::vector<bool>(n, true)};
  zielonka(sub, out);
  return out;
}

std::string to_pgsolver(const FiniteParityGame& g) {
  std::ostringstream os;
  os << "parity " << g.size() << ";\n";
  for (uint32_t v = 0; v < g.size(); ++v) {
    os << v << " " << g.vertices[v].color << " "
       << (g.vertices[v].owner == Owner::Eloise ? 0 : 1) << " ";
    for (size_t i = 0; i < g.succ[v].size(); ++i) os << (i ? "," : "") << g.succ[v][i];
    if (!g.vertices[v].name.empty()) os << " \"" << g.vertices[v].name << "\"";
    os << ";\n";
  }
  return os.str();
}

FiniteParityGame from_pgsolver(const std::string& text) {
  FiniteParityGame g;
  std::istringstream is(text);
  std::string line;
  std::map<uint32_t, std::vector<uint32_t>> edges;
  uint32_t maxid = 0;
  struct Row {
    uint32_t id;
    Color color;
    Owner owner;
    std::vector<uint32_t> succ;
    std::string name;
  };
  std::vector<Row> rows;
  while (std::getline(is, line)) {
    if (line.empty() || line.rfind("parity", 0) == 0) continue;
    std::istringstream ls(line);
    Row r;
    int ownerbit;
    if (!(ls >> r.id >> r.color >> ownerbit)) throw UsageError("pgsolver: bad row: " + line);
    r.owner = ownerbit == 0 ? Owner::Eloise : Owner::Abelard;
    std::string rest;
    std::getline(ls, rest);
    size_t qpos = rest.find('"');
    if (qpos != std::string::npos) {
      size_t q2 = rest.find('"', qpos + 1);
      r.name = rest.substr(qpos + 1, q2 - qpos - 1);
      rest = rest.substr(0, qpos);
    }
    std::string tok;
    for (char ch : rest) {
      if (isdigit(static_cast<unsigned char>(ch))) {
        tok += ch;
      } else if (!tok.empty()) {
        r.succ.push_back(static_cast<uint32_t>(std::stoul(tok)));
        tok.clear();
      }
    }
    if (!tok.empty()) r.succ.push_back(static_cast<uint32_t>(std::stoul(tok)));
    maxid = std::max(maxid, r.id);
    rows.push_back(std::move(r));
  }
  g.vertices.resize(maxid + 1);
  g.succ.resize(maxid + 1);
  for (auto& r : rows) {
    g.vertices[r.id] = {r.owner, r.color, r.name};
    g.succ[r.id] = r.succ;
  }
  return g;
}

// ---------------------------------------------------------------------------
// Bounded reachability oracle.

ReachVerdict bounded_reach_oracle(const CpdaGameSpec& spec, const std::set<State>& targets,
                                  int depth, const Config& from) {
  if (depth < 0) throw UsageError("oracle depth must be >= 0");

  // Explore configurations reachable within `depth` moves.
  std::unordered_map<Config, uint32_t, ConfigHash> index;
  std::vector<Config> configs;
  std::vector<int> layer;  // discovery depth
  std::vector<std::vector<uint32_t>> succ;
  std::deque<uint32_t> queue;
  configs.push_back(from);
  layer.push_back(0);
  succ.emplace_back();
  index.emplace(from, 0);
  queue.push_back(0);
  while (!queue.empty()) {
    uint32_t v = queue.front();
    queue.pop_front();
    if (layer[v] >= depth) continue;
    for (const auto& s : successors(spec.cpda, configs[v])) {
      auto it = index.find(s);
      uint32_t w;
      if (it != index.end()) {
        w = it->second;
      } else {
        w = static_cast<uint32_t>(configs.size());
        configs.push_back(s);
        layer.push_back(layer[v] + 1);
        succ.emplace_back();
        index.emplace(s, w);
        queue.push_back(w);
      }
      succ[v].push_back(w);
    }
  }
  size_t n = configs.size();
  auto is_target = [&](uint32_t v) { return targets.count(configs[v].state) > 0; };
  auto expanded = [&](uint32_t v) { return layer[v] < depth; };

  // Eloise side: can she force a target visit within the remaining budget?
  // win[v] via backward induction over remaining depth; monotone, so iterate
  // to a fixpoint over (vertex) with the depth constraint folded in: w(v,k)
  // computed top-down with memo on (v,k) collapsed to "wins with remaining
  // >= layer budget". Simpler: DP over remaining depth.
  std::vector<std::vector<bool>> win(static_cast<size_t>(depth) + 1, std::vector<bool>(n, false));
  for (int k = 0; k <= depth; ++k)
    for (uint32_t v = 0; v < n; ++v)
      if (is_target(v)) win[static_cast<size_t>(k)][v] = true;
  for (int k = 1; k <= depth; ++k) {
    for (uint32_t v = 0; v < n; ++v) {
      if (win[static_cast<size_t>(k)][v] || !expanded(v)) continue;
      const auto& sv = succ[v];
      if (sv.empty()) continue;  // dead-end: never wins by reaching
      bool w;
      if (spec.owner(configs[v].state) == Owner::Eloise) {
        w = false;
        for (uint32_t x : sv) w = w || win[static_cast<size_t>(k) - 1][x];
      } else {
        w = true;
        for (uint32_t x : sv) w = w && win[static_cast<size_t>(k) - 1][x];
      }
      win[static_cast<size_t>(k)][v] = w;
    }
  }
  // v is only credited the budget it actually has left.
  if (win[static_cast<size_t>(depth)][0]) return ReachVerdict::EloiseWins;

  // Abelard side: greatest fixpoint of "safe" = non-target, and he can keep
  // the play within safe explored configurations (expanded, so all successors
  // are known).
  std::vector<bool> safe(n, true);
  for (uint32_t v = 0; v < n; ++v)
    if (is_target(v) || !expanded(v) || succ[v].empty()) safe[v] = false;
  bool changed = true;
  while (changed) {
    changed = false;
    for (uint32_t v = 0; v < n; ++v) {
      if (!safe[v]) continue;
      bool ok;
      if (spec.owner(configs[v].state) == Owner::Abelard) {
        ok = false;
        for (uint32_t x : succ[v]) ok = ok || safe[x];
      } else {
        ok = true;
        for (uint32_t x : succ[v]) ok = ok && safe[x];
      }
      if (!ok) {
        safe[v] = false;
        changed = true;
      }
    }
  }
  if (safe[0]) return ReachVerdict::AbelardWins;
  return ReachVerdict::Unknown;
}

// ---------------------------------------------------------------------------
// Factorization.

PlayFactorization factorize(const std::vector<std::pair<int, Color>>& play) {
  if (play.empty()) throw UsageError("factorize: empty play");
  size_t n = play.size();
  std::vector<int> sufmin(n);
  int m = play.back().first;
  for (size_t i = n; i-- > 0;) {
    m = std::min(m, play[i].first);
    sufmin[i] = m;
  }
  PlayFactorization f;
  for (size_t i = 0; i < n; ++i)
    if (play[i].first <= sufmin[i]) f.steps.push_back(i);
  for (size_t s = 0; s + 1 < f.steps.size(); ++s) {
    size_t b = f.steps[s], e = f.steps[s + 1];
    PlayFactorization::Segment seg{b, e, play[b].first == play[e].first};
    f.segments.push_back(seg);
    Color mc = play[b].second;
    for (size_t i = b; i <= e; ++i) mc = std::min(mc, play[i].second);
    f.mcol.push_back(mc);
  }
  return f;
}

PlayFactorization factorize(const CpdaGameSpec& spec, const std::vector<Config>& play) {
  std::vector<std::pair<int, Color>> hc;
  hc.reserve(play.size());
  for (const auto& c : play)
    hc.emplace_back(static_cast<int>(c.stack.height()), spec.color(c.state));
  return factorize(hc);
}

}  // namespace cpg
