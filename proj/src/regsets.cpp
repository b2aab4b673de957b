#include "cpg/regsets.hpp"

#include <algorithm>
#include <sstream>

#include "json.hpp"

namespace cpg {

// ---------------------------------------------------------------------------
// Generic runner.

namespace {

struct TokenRun {
  std::vector<FlattenEncoding::Token> word;
  std::map<size_t, size_t> target;
  std::vector<int> link_order;  // per position (1-based), 0 if none
};

TokenRun prepare(const HOStack& s) {
  auto enc = flatten(s);
  TokenRun tr{enc.word, enc.target, std::vector<int>(enc.word.size() + 1, 0)};
  // Link order from the target's token: a letter target is a 1-link, a close
  // at depth d closes a stack of order n-d+1, so the link order is n-d+2.
  std::vector<int> depth_before(enc.word.size() + 1, 0);
  int d = 0;
  for (size_t i = 0; i < enc.word.size(); ++i) {
    depth_before[i + 1] = d;
    if (enc.word[i].kind == FlattenEncoding::Tok::Open) ++d;
    if (enc.word[i].kind == FlattenEncoding::Tok::Close) --d;
  }
  int n = s.order();
  for (auto [from, to] : enc.target) {
    if (enc.word[to - 1].kind == FlattenEncoding::Tok::Letter) {
      tr.link_order[from] = 1;
    } else {
      tr.link_order[from] = n - depth_before[to] + 2;
    }
  }
  return tr;
}

}  // namespace

uint64_t run_on(const StackAutomatonBase& aut, const HOStack& s, std::optional<State> q) {
  TokenRun tr = prepare(s);
  std::vector<uint64_t> after(tr.word.size() + 1);
  after[0] = aut.initial();
  for (size_t i = 0; i < tr.word.size(); ++i) {
    const auto& t = tr.word[i];
    size_t pos = i + 1;
    ASym a = t.kind == FlattenEncoding::Tok::Open    ? ASym::open()
             : t.kind == FlattenEncoding::Tok::Close ? ASym::close()
                                                     : ASym::letter(t.letter);
    auto it = tr.target.find(pos);
    if (it == tr.target.end()) {
      after[pos] = aut.read(after[pos - 1], a);
    } else {
      after[pos] = aut.read_linked(after[pos - 1], a, tr.link_order[pos], after[it->second]);
    }
  }
  uint64_t last = after[tr.word.size()];
  if (q) last = aut.read(last, ASym::state(*q));
  return last;
}

bool accepts(const StackAutomatonBase& aut, const Config& c) {
  if (!aut.reads_state_suffix()) throw UsageError("automaton reads stacks, not configurations");
  return aut.is_final(run_on(aut, c.stack, c.state));
}

bool accepts_stack(const StackAutomatonBase& aut, const HOStack& s) {
  if (aut.reads_state_suffix()) throw UsageError("automaton reads configurations, not stacks");
  return aut.is_final(run_on(aut, s, std::nullopt));
}

uint64_t close_brackets(const StackAutomatonBase& aut, uint64_t st, int depth) {
  for (int i = 0; i < depth; ++i) st = aut.read(st, ASym::close());
  return st;
}

std::set<State> acc_set(const StackAutomatonBase& aut, uint64_t st, int depth,
                        const std::vector<State>& universe) {
  uint64_t closed = close_brackets(aut, st, depth);
  std::set<State> out;
  for (State q : universe)
    if (aut.is_final(aut.read(closed, ASym::state(q)))) out.insert(q);
  return out;
}

// ---------------------------------------------------------------------------
// Dense automata.

DenseStackAutomaton::DenseStackAutomaton(uint32_t num_states, uint32_t num_letters,
                                         uint32_t num_cpda_states, bool state_suffix)
    : nstates_(num_states),
      nletters_(num_letters),
      ncpda_(num_cpda_states),
      suffix_(state_suffix),
      finals_(num_states, false),
      d2_(static_cast<size_t>(num_states) * (num_letters + 2 + num_cpda_states), 0),
      d3_(static_cast<size_t>(num_states) * num_letters * num_states, 0) {}

size_t DenseStackAutomaton::idx2(uint32_t r, ASym a) const {
  uint32_t key;
  switch (a.kind) {
    case ASym::Kind::Letter: key = a.id; break;
    case ASym::Kind::Open: key = nletters_; break;
    case ASym::Kind::Close: key = nletters_ + 1; break;
    default: key = nletters_ + 2 + a.id; break;
  }
  if (key >= nletters_ + 2 + ncpda_) throw UsageError("symbol outside the automaton's alphabet");
  return static_cast<size_t>(r) * (nletters_ + 2 + ncpda_) + key;
}

namespace {

std::vector<ASym> all_syms(uint32_t num_letters, uint32_t num_cpda_states) {
  std::vector<ASym> syms;
  for (LetterId l = 0; l < num_letters; ++l) syms.push_back(ASym::letter(l));
  syms.push_back(ASym::open());
  syms.push_back(ASym::close());
  for (State q = 0; q < num_cpda_states; ++q) syms.push_back(ASym::state(q));
  return syms;
}

}  // namespace

DenseStackAutomaton boolean(const DenseStackAutomaton& a, const DenseStackAutomaton& b,
                            BoolKind kind) {
  if (kind == BoolKind::Complement) return complement(a);
  if (a.num_letters() != b.num_letters() || a.num_cpda_states() != b.num_cpda_states() ||
      a.reads_state_suffix() != b.reads_state_suffix())
    throw UsageError("boolean: alphabet mismatch");
  uint32_t na = a.num_states(), nb = b.num_states();
  DenseStackAutomaton out(na * nb, a.num_letters(), a.num_cpda_states(), a.reads_state_suffix());
  auto pid = [nb](uint32_t x, uint32_t y) { return x * nb + y; };
  out.set_initial(pid(static_cast<uint32_t>(a.initial()), static_cast<uint32_t>(b.initial())));
  auto syms = all_syms(a.num_letters(), a.num_cpda_states());
  for (uint32_t x = 0; x < na; ++x) {
    for (uint32_t y = 0; y < nb; ++y) {
      for (const auto& s : syms) out.set2(pid(x, y), s, pid(a.get2(x, s), b.get2(y, s)));
      for (LetterId l = 0; l < a.num_letters(); ++l)
        for (uint32_t tx = 0; tx < na; ++tx)
          for (uint32_t ty = 0; ty < nb; ++ty)
            out.set3(pid(x, y), l, pid(tx, ty), pid(a.get3(x, l, tx), b.get3(y, l, ty)));
      bool fa = a.final_state(x), fb = b.final_state(y);
      out.set_final(pid(x, y), kind == BoolKind::Union ? (fa || fb) : (fa && fb));
    }
  }
  return out;
}

DenseStackAutomaton complement(const DenseStackAutomaton& a) {
  DenseStackAutomaton out = a;
  for (uint32_t r = 0; r < a.num_states(); ++r) out.set_final(r, !a.final_state(r));
  return out;
}

DenseStackAutomaton specialize(const DenseStackAutomaton& aut, State q) {
  if (!aut.reads_state_suffix()) throw UsageError("specialize needs a configuration automaton");
  if (q >= aut.num_cpda_states()) throw UsageError("specialize: unknown control state");
  DenseStackAutomaton res(aut.num_states(), aut.num_letters(), aut.num_cpda_states(), false);
  res.set_initial(static_cast<uint32_t>(aut.initial()));
  auto syms = all_syms(aut.num_letters(), aut.num_cpda_states());
  for (uint32_t r = 0; r < aut.num_states(); ++r) {
    for (const auto& s : syms) res.set2(r, s, aut.get2(r, s));
    for (LetterId l = 0; l < aut.num_letters(); ++l)
      for (uint32_t t = 0; t < aut.num_states(); ++t) res.set3(r, l, t, aut.get3(r, l, t));
    res.set_final(r, aut.final_state(aut.get2(r, ASym::state(q))));
  }
  return res;
}

std::shared_ptr<StackAutomatonBase> lazy_complement(StackAutomatonRef a) {
  auto out = std::make_shared<FuncStackAutomaton>();
  out->init = a->initial();
  out->read_fn = [a](uint64_t st, ASym s) { return a->read(st, s); };
  out->read_linked_fn = [a](uint64_t st, ASym s, int e, uint64_t t) {
    return a->read_linked(st, s, e, t);
  };
  out->final_fn = [a](uint64_t st) { return !a->is_final(st); };
  out->suffix = a->reads_state_suffix();
  return out;
}

std::shared_ptr<StackAutomatonBase> specialize_lazy(StackAutomatonRef a, State q) {
  if (!a->reads_state_suffix()) throw UsageError("specialize needs a configuration automaton");
  auto out = std::make_shared<FuncStackAutomaton>();
  out->init = a->initial();
  out->read_fn = [a](uint64_t st, ASym s) { return a->read(st, s); };
  out->read_linked_fn = [a](uint64_t st, ASym s, int e, uint64_t t) {
    return a->read_linked(st, s, e, t);
  };
  out->final_fn = [a, q](uint64_t st) { return a->is_final(a->read(st, ASym::state(q))); };
  out->suffix = false;
  return out;
}

// ---------------------------------------------------------------------------
// Automata with oracles.

bool oracle_eval(const OracleAutomaton& ob, const Config& c,
                 const std::function<bool(uint32_t, const HOStack&)>& oracle_bit) {
  if (c.stack.order() < 2) throw UsageError("oracle_eval expects an order >= 2 stack");
  uint32_t p = ob.initial;
  const auto& members = c.stack.members();
  for (size_t i = 0; i < members.size(); ++i) {
    std::vector<bool> bits(ob.num_oracles, false);
    for (uint32_t k = 0; k < ob.num_oracles; ++k) {
      if (ob.bottom_oracle && *ob.bottom_oracle == k) {
        bits[k] = i == 0;
      } else {
        bits[k] = oracle_bit(k, members[i]);
      }
    }
    p = ob.delta(p, bits);
  }
  return ob.accepts_state(p, c.state);
}

DenseStackAutomaton compile_oracle_product(const OracleAutomaton& ob,
                                           const std::vector<const DenseStackAutomaton*>& oracles,
                                           int order, uint32_t num_letters,
                                           uint32_t num_cpda_states) {
  if (oracles.size() + (ob.bottom_oracle ? 1u : 0u) != ob.num_oracles)
    throw UsageError("compile_oracle_product: oracle arity mismatch");
  std::vector<int> slot(ob.num_oracles, -1);
  {
    int next = 0;
    for (uint32_t k = 0; k < ob.num_oracles; ++k)
      if (!(ob.bottom_oracle && *ob.bottom_oracle == k)) slot[k] = next++;
  }
  uint32_t ncube = 1;
  for (auto* c : oracles) ncube *= c->num_states();
  bool track_first = ob.bottom_oracle.has_value();
  uint32_t depths = static_cast<uint32_t>(order) + 1;
  uint32_t cube = depths * ob.num_states * ncube * (track_first ? 2 : 1);
  uint32_t total = cube + 2;
  uint32_t acc = cube, rej = cube + 1;

  auto encode = [&](uint32_t depth, uint32_t p, const std::vector<uint32_t>& cs, bool first) {
    uint32_t cmix = 0;
    for (size_t i = 0; i < oracles.size(); ++i) cmix = cmix * oracles[i]->num_states() + cs[i];
    uint32_t id = (depth * ob.num_states + p) * ncube + cmix;
    if (track_first) id = id * 2 + (first ? 1 : 0);
    return id;
  };
  auto decode = [&](uint32_t id, uint32_t& depth, uint32_t& p, std::vector<uint32_t>& cs,
                    bool& first) {
    first = false;
    if (track_first) {
      first = id % 2 == 1;
      id /= 2;
    }
    uint32_t cmix = id % ncube;
    id /= ncube;
    p = id % ob.num_states;
    depth = id / ob.num_states;
    cs.assign(oracles.size(), 0);
    for (size_t i = oracles.size(); i-- > 0;) {
      cs[i] = cmix % oracles[i]->num_states();
      cmix /= oracles[i]->num_states();
    }
  };

  DenseStackAutomaton out(total, num_letters, num_cpda_states, true);
  std::vector<uint32_t> inits;
  for (auto* c : oracles) inits.push_back(static_cast<uint32_t>(c->initial()));
  out.set_initial(encode(0, ob.initial, inits, true));
  out.set_final(acc, true);

  auto syms = all_syms(num_letters, num_cpda_states);
  for (uint32_t id = 0; id < total; ++id) {
    if (id >= cube) {
      for (const auto& s : syms) out.set2(id, s, rej);
      for (LetterId l = 0; l < num_letters; ++l)
        for (uint32_t t = 0; t < total; ++t) out.set3(id, l, t, rej);
      continue;
    }
    uint32_t depth, p;
    bool first;
    std::vector<uint32_t> cs;
    decode(id, depth, p, cs, first);
    for (const auto& s : syms) {
      uint32_t to = rej;
      if (s.kind == ASym::Kind::Open) {
        if (depth == 0) {
          to = encode(1, p, cs, first);
        } else if (depth < static_cast<uint32_t>(order)) {
          auto cs2 = depth == 1 ? inits : cs;
          for (size_t i = 0; i < oracles.size(); ++i)
            cs2[i] = static_cast<uint32_t>(oracles[i]->get2(cs2[i], ASym::open()));
          to = encode(depth + 1, p, cs2, first);
        }
      } else if (s.kind == ASym::Kind::Close) {
        if (depth > 2) {
          auto cs2 = cs;
          for (size_t i = 0; i < oracles.size(); ++i)
            cs2[i] = static_cast<uint32_t>(oracles[i]->get2(cs2[i], ASym::close()));
          to = encode(depth - 1, p, cs2, first);
        } else if (depth == 2) {
          auto cs2 = cs;
          std::vector<bool> bits(ob.num_oracles, false);
          for (size_t i = 0; i < oracles.size(); ++i)
            cs2[i] = static_cast<uint32_t>(oracles[i]->get2(cs2[i], ASym::close()));
          for (uint32_t k = 0; k < ob.num_oracles; ++k) {
            if (ob.bottom_oracle && *ob.bottom_oracle == k) {
              bits[k] = first;
            } else {
              auto si = static_cast<size_t>(slot[k]);
              bits[k] = oracles[si]->final_state(cs2[si]);
            }
          }
          to = encode(1, ob.delta(p, bits), inits, false);
        } else if (depth == 1) {
          to = encode(0, p, cs, first);
        }
      } else if (s.kind == ASym::Kind::Letter) {
        if (depth >= 2) {
          auto cs2 = cs;
          for (size_t i = 0; i < oracles.size(); ++i)
            cs2[i] = static_cast<uint32_t>(oracles[i]->get2(cs2[i], s));
          to = encode(depth, p, cs2, first);
        }
      } else {
        if (depth == 0) to = ob.accepts_state(p, s.id) ? acc : rej;
      }
      out.set2(id, s, to);
    }
    for (LetterId l = 0; l < num_letters; ++l) {
      for (uint32_t t = 0; t < total; ++t) {
        uint32_t to = rej;
        if (depth >= 2 && t < cube) {
          uint32_t tdepth, tp;
          bool tfirst;
          std::vector<uint32_t> tcs;
          decode(t, tdepth, tp, tcs, tfirst);
          auto cs2 = cs;
          for (size_t i = 0; i < oracles.size(); ++i)
            cs2[i] = static_cast<uint32_t>(
                oracles[i]->read_linked(cs[i], ASym::letter(l), 1, tcs[i]));
          to = encode(depth, p, cs2, first);
        }
        out.set3(id, l, t, to);
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Regular-test annotation (§2.6 closure theorem).

namespace {

/// Behaviour tables attached to one A' stack letter. tau[j-1] describes, for
/// j = 1..n, how b traverses the interior of pop_j(top_{j+1}(s)) (the non-top
/// members of the top j-stack, no enclosing brackets), parameterised by the
/// run states r_n..r_{j+1} resolving links of order > j. sigma describes the
/// traversal of the first k members of the symbol's own link target level
/// (k frozen at link creation), parameterised likewise by r_n..r_{e+1}.
struct Behavior {
  LetterId base = 0;
  int link_order = 0;                       // 0 = unlinked
  std::vector<std::vector<uint32_t>> tau;   // tau[j-1], flat over params*R
  std::vector<uint32_t> sigma;

  bool operator==(const Behavior& o) const {
    return base == o.base && link_order == o.link_order && tau == o.tau && sigma == o.sigma;
  }
};

struct BehaviorHash {
  size_t operator()(const Behavior& b) const {
    size_t h = b.base;
    hash_mix(h, static_cast<size_t>(b.link_order));
    for (const auto& t : b.tau) {
      hash_mix(h, t.size());
      for (uint32_t v : t) hash_mix(h, v);
    }
    for (uint32_t v : b.sigma) hash_mix(h, v);
    return h;
  }
};

struct RepairDesc {
  int k = 0;
  std::vector<std::vector<uint32_t>> upper;  // tau[j-1] for j = k+1..n

  bool operator==(const RepairDesc& o) const { return k == o.k && upper == o.upper; }
};

struct RepairDescHash {
  size_t operator()(const RepairDesc& d) const {
    size_t h = static_cast<size_t>(d.k);
    for (const auto& t : d.upper)
      for (uint32_t v : t) hash_mix(h, v);
    return h;
  }
};

struct AnnotateCtx {
  DenseStackAutomaton b;
  Cpda base;
  int n = 1;
  uint32_t R = 0;
  size_t table_cap = 0;
  size_t cells_per_letter = 0;
  AlphabetRef out_alphabet = std::make_shared<Alphabet>();
  Interner<Behavior, BehaviorHash> letters;
  Interner<RepairDesc, RepairDescHash> repairs;
  Interner<uint64_t> qb;  // composite states: q * 2 + bit
  StateTableRef qb_table = std::make_shared<StateTable>();

  explicit AnnotateCtx(const DenseStackAutomaton& aut) : b(aut) {}

  size_t params_count(int j) const {
    size_t c = 1;
    for (int i = 0; i < n - j; ++i) c *= R;
    return c;
  }

  LetterId intern_letter(const Behavior& be) {
    uint32_t before = static_cast<uint32_t>(letters.size());
    LetterId id = letters.intern(be);
    if (id == before) {
      std::ostringstream name;
      name << base.alphabet->name(be.base) << "'" << id;
      out_alphabet->add(name.str(), base.alphabet->is_bottom(be.base));
    }
    return id;
  }

  State intern_state(State q, bool bit) {
    uint64_t key = static_cast<uint64_t>(q) * 2 + (bit ? 1 : 0);
    uint32_t before = static_cast<uint32_t>(qb.size());
    State id = qb.intern(key);
    if (id == before)
      qb_table->add(base.states->name(q) + (bit ? "[+]" : "[-]"), base.states->owner(q),
                    base.states->color(q));
    return id;
  }

  uint32_t tau_eval(const Behavior& be, int j, const std::vector<uint32_t>& params,
                    uint32_t r) const {
    size_t pidx = 0;
    for (uint32_t v : params) pidx = pidx * R + v;
    return be.tau[static_cast<size_t>(j) - 1][pidx * R + r];
  }

  uint32_t sigma_eval(const Behavior& be, const std::vector<uint32_t>& params, uint32_t r) const {
    size_t pidx = 0;
    for (uint32_t v : params) pidx = pidx * R + v;
    return be.sigma[pidx * R + r];
  }

  // params = (r_n .. r_1), the full tuple.
  uint32_t tau0_eval(const Behavior& be, const std::vector<uint32_t>& params, uint32_t r) const {
    if (be.link_order == 0) return b.get2(r, ASym::letter(be.base));
    int e = be.link_order;
    std::vector<uint32_t> sp(params.begin(), params.begin() + (n - e));
    uint32_t re = params[static_cast<size_t>(n - e)];
    uint32_t t = sigma_eval(be, sp, re);
    return b.get3(r, be.base, t);
  }

  // State after reading the full top j-stack segment (brackets included)
  // from r; params = (r_n .. r_{j+1}).
  uint32_t F(const Behavior& be, int j, std::vector<uint32_t> params, uint32_t r) const {
    if (j == 0) return tau0_eval(be, params, r);
    uint32_t r1 = b.get2(r, ASym::open());
    uint32_t r2 = tau_eval(be, j, params, r1);
    params.push_back(r1);
    uint32_t r3 = F(be, j - 1, std::move(params), r2);
    return b.get2(r3, ASym::close());
  }

  uint32_t full_state(const Behavior& be) const {
    return F(be, n, {}, static_cast<uint32_t>(b.initial()));
  }

  bool bit_for(const Behavior& be, State q) const {
    return b.final_state(b.get2(full_state(be), ASym::state(q)));
  }

  // Acceptance state of pop_k(s) computed from the pre-pop top tables.
  uint32_t pop_eval(const Behavior& be, int k, int j, std::vector<uint32_t> params,
                    uint32_t r) const {
    uint32_t r1 = b.get2(r, ASym::open());
    uint32_t r2 = tau_eval(be, j, params, r1);
    if (j == k) return b.get2(r2, ASym::close());
    params.push_back(r1);
    uint32_t r3 = pop_eval(be, k, j - 1, std::move(params), r2);
    return b.get2(r3, ASym::close());
  }

  bool pop_bit(const Behavior& be, int k, State q) const {
    uint32_t full = pop_eval(be, k, n, {}, static_cast<uint32_t>(b.initial()));
    return b.final_state(b.get2(full, ASym::state(q)));
  }

  // Acceptance state of collapse(s) via the top symbol's sigma table.
  uint32_t collapse_eval(const Behavior& be, int j, std::vector<uint32_t> params,
                         uint32_t r) const {
    int e = be.link_order;
    uint32_t r1 = b.get2(r, ASym::open());
    if (j == e) {
      uint32_t r2 = sigma_eval(be, params, r1);
      return b.get2(r2, ASym::close());
    }
    uint32_t r2 = tau_eval(be, j, params, r1);
    params.push_back(r1);
    uint32_t r3 = collapse_eval(be, j - 1, std::move(params), r2);
    return b.get2(r3, ASym::close());
  }

  bool collapse_bit(const Behavior& be, State q) const {
    uint32_t full = collapse_eval(be, n, {}, static_cast<uint32_t>(b.initial()));
    return b.final_state(b.get2(full, ASym::state(q)));
  }

  Behavior with_base(const Behavior& be, LetterId g) const {
    Behavior out = be;
    out.base = g;
    return out;
  }

  Behavior make_push1(const Behavior& pre, LetterId bnew, int e) const {
    Behavior out;
    out.base = bnew;
    out.link_order = e;
    out.tau = pre.tau;
    // New interior of the top 1-stack: the old interior followed by the old
    // top symbol itself.
    std::vector<uint32_t>& t1 = out.tau[0];
    size_t pc = params_count(1);
    t1.assign(pc * R, 0);
    std::vector<uint32_t> params(static_cast<size_t>(n) - 1, 0);
    for (size_t pidx = 0; pidx < pc; ++pidx) {
      size_t rem = pidx;
      for (size_t i = params.size(); i-- > 0;) {
        params[i] = static_cast<uint32_t>(rem % R);
        rem /= R;
      }
      for (uint32_t r = 0; r < R; ++r) {
        std::vector<uint32_t> full = params;
        full.push_back(r);
        uint32_t mid = tau_eval(pre, 1, params, r);
        t1[pidx * R + r] = tau0_eval(pre, full, mid);
      }
    }
    out.sigma = e == 1 ? t1 : pre.tau[static_cast<size_t>(e) - 1];
    return out;
  }

  Behavior make_pushj(const Behavior& pre, int j) const {
    Behavior out = pre;
    std::vector<uint32_t>& tj = out.tau[static_cast<size_t>(j) - 1];
    size_t pc = params_count(j);
    tj.assign(pc * R, 0);
    std::vector<uint32_t> params(static_cast<size_t>(n - j), 0);
    for (size_t pidx = 0; pidx < pc; ++pidx) {
      size_t rem = pidx;
      for (size_t i = params.size(); i-- > 0;) {
        params[i] = static_cast<uint32_t>(rem % R);
        rem /= R;
      }
      for (uint32_t r = 0; r < R; ++r) {
        std::vector<uint32_t> sub = params;
        sub.push_back(r);
        uint32_t mid = tau_eval(pre, j, params, r);
        tj[pidx * R + r] = F(pre, j - 1, sub, mid);
      }
    }
    return out;
  }

  Behavior merge_repair(const RepairDesc& d, const Behavior& exposed) const {
    Behavior out = exposed;
    for (int j = d.k + 1; j <= n; ++j)
      out.tau[static_cast<size_t>(j) - 1] = d.upper[static_cast<size_t>(j - d.k) - 1];
    return out;
  }

  uint32_t intern_repair(const Behavior& pre, int k) {
    RepairDesc d;
    d.k = k;
    for (int j = k + 1; j <= n; ++j) d.upper.push_back(pre.tau[static_cast<size_t>(j) - 1]);
    return repairs.intern(d);
  }
};

}  // namespace

AnnotateResult annotate_with_regular_test(const Cpda& a, const DenseStackAutomaton& b,
                                          size_t table_cap) {
  if (!b.reads_state_suffix()) throw UsageError("annotate needs a configuration automaton");
  if (b.num_letters() != a.alphabet->size() || b.num_cpda_states() != a.states->size())
    throw UsageError("annotate: automaton alphabet mismatch");
  if (!(a.initial_stack == HOStack::bottom(a.order, a.alphabet->bottom())))
    throw UsageError("annotate expects the canonical initial stack");

  auto ctx = std::make_shared<AnnotateCtx>(b);
  ctx->base = a;
  ctx->n = a.order;
  ctx->R = b.num_states();
  ctx->table_cap = table_cap;
  size_t cells = 0;
  for (int j = 1; j <= ctx->n; ++j) cells += ctx->params_count(j) * ctx->R;
  cells += ctx->params_count(1) * ctx->R;  // sigma upper bound
  if (cells > table_cap)
    throw ResourceError("cap-tables", "behaviour tables need " + std::to_string(cells) +
                                          " cells per letter, cap is " + std::to_string(table_cap));

  // The identity-behaviour bottom letter for the initial stack.
  Behavior bottom_be;
  bottom_be.base = a.alphabet->bottom();
  bottom_be.link_order = 0;
  for (int j = 1; j <= ctx->n; ++j) {
    size_t pc = ctx->params_count(j);
    std::vector<uint32_t> t(pc * ctx->R);
    for (size_t p = 0; p < pc; ++p)
      for (uint32_t r = 0; r < ctx->R; ++r) t[p * ctx->R + r] = r;  // empty interior
    bottom_be.tau.push_back(std::move(t));
  }
  LetterId bottom_id = ctx->intern_letter(bottom_be);

  CompositeCpda comp;
  comp.order = a.order;
  comp.alphabet = ctx->out_alphabet;
  comp.states = ctx->qb_table;
  comp.initial_stack = HOStack::bottom(a.order, bottom_id);
  comp.initial_state = ctx->intern_state(a.initial_state, ctx->bit_for(bottom_be, a.initial_state));
  comp.repair_apply = [ctx](uint32_t fn, LetterId observed) -> LetterId {
    const RepairDesc& d = ctx->repairs.at(fn);
    const Behavior& exposed = ctx->letters.at(observed);
    return ctx->intern_letter(ctx->merge_repair(d, exposed));
  };
  comp.delta = [ctx](State qs, LetterId letter) -> std::vector<CompositeRule> {
    uint64_t key = ctx->qb.at(qs);
    State q = static_cast<State>(key / 2);
    const Behavior be0 = ctx->letters.at(letter);
    std::vector<CompositeRule> out;
    for (const auto& rule : ctx->base.delta(q, be0.base)) {
      Behavior be = rule.rewrite ? ctx->with_base(be0, *rule.rewrite) : be0;
      LetterId rew_letter = ctx->intern_letter(be);
      bool need_rew = rule.rewrite.has_value();
      CompositeRule cr;
      switch (rule.op.kind) {
        case OpKind::Id: {
          cr.target = ctx->intern_state(rule.target, ctx->bit_for(be, rule.target));
          if (need_rew) cr.ops.push_back(StackOp::rewrite(rew_letter));
          cr.ops.push_back(StackOp::id());
          break;
        }
        case OpKind::Push1: {
          Behavior nb = ctx->make_push1(be, rule.op.letter, rule.op.level);
          LetterId nid = ctx->intern_letter(nb);
          cr.target = ctx->intern_state(rule.target, ctx->bit_for(nb, rule.target));
          if (need_rew) cr.ops.push_back(StackOp::rewrite(rew_letter));
          cr.ops.push_back(StackOp::push1(nid, rule.op.level));
          break;
        }
        case OpKind::Push: {
          Behavior nb = ctx->make_pushj(be, rule.op.level);
          LetterId nid = ctx->intern_letter(nb);
          cr.target = ctx->intern_state(rule.target, ctx->bit_for(nb, rule.target));
          if (need_rew) cr.ops.push_back(StackOp::rewrite(rew_letter));
          cr.ops.push_back(StackOp::push(rule.op.level));
          cr.ops.push_back(StackOp::rewrite(nid));
          break;
        }
        case OpKind::Pop: {
          cr.target = ctx->intern_state(rule.target, ctx->pop_bit(be, rule.op.level, rule.target));
          if (need_rew) cr.ops.push_back(StackOp::rewrite(rew_letter));
          cr.ops.push_back(StackOp::pop(rule.op.level));
          cr.repair = ctx->intern_repair(be, rule.op.level);
          break;
        }
        case OpKind::Collapse: {
          if (be.link_order == 0) continue;  // undefined in the base machine too
          cr.target = ctx->intern_state(rule.target, ctx->collapse_bit(be, rule.target));
          if (need_rew) cr.ops.push_back(StackOp::rewrite(rew_letter));
          cr.ops.push_back(StackOp::collapse());
          cr.repair = ctx->intern_repair(be, be.link_order);
          break;
        }
        case OpKind::Rewrite:
          throw UsageError("rewrite in op slot");
      }
      out.push_back(std::move(cr));
    }
    return out;
  };

  auto norm = normalize(comp);
  AnnotateResult res;
  res.cpda = norm.cpda;
  auto project = norm.project;
  res.chi = [ctx, project](State s) -> State {
    auto pr = project(s);
    if (!pr) throw UsageError("chi on helper state");
    return static_cast<State>(ctx->qb.at(pr->first) / 2);
  };
  res.in_F = [ctx, project](State s) -> bool {
    auto pr = project(s);
    if (!pr) throw UsageError("F on helper state");
    return ctx->qb.at(pr->first) % 2 == 1;
  };
  res.letter_base = [ctx](LetterId l) { return ctx->letters.at(l).base; };
  return res;
}

// ---------------------------------------------------------------------------
// JSON serialization.

std::string automaton_to_json(const DenseStackAutomaton& a) {
  nlohmann::json j;
  j["states"] = a.num_states();
  j["letters"] = a.num_letters();
  j["cpda_states"] = a.num_cpda_states();
  j["config_automaton"] = a.reads_state_suffix();
  j["initial"] = static_cast<uint32_t>(a.initial());
  nlohmann::json finals = nlohmann::json::array();
  for (uint32_t r = 0; r < a.num_states(); ++r)
    if (a.final_state(r)) finals.push_back(r);
  j["finals"] = finals;
  auto syms = all_syms(a.num_letters(), a.num_cpda_states());
  nlohmann::json t2 = nlohmann::json::array();
  for (uint32_t r = 0; r < a.num_states(); ++r) {
    nlohmann::json row = nlohmann::json::array();
    for (const auto& s : syms) row.push_back(a.get2(r, s));
    t2.push_back(row);
  }
  j["table2"] = t2;
  nlohmann::json t3 = nlohmann::json::array();
  for (uint32_t r = 0; r < a.num_states(); ++r)
    for (LetterId l = 0; l < a.num_letters(); ++l) {
      nlohmann::json row = nlohmann::json::array();
      for (uint32_t t = 0; t < a.num_states(); ++t) row.push_back(a.get3(r, l, t));
      t3.push_back(row);
    }
  j["table3"] = t3;
  return j.dump();
}

DenseStackAutomaton automaton_from_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  DenseStackAutomaton a(j.at("states").get<uint32_t>(), j.at("letters").get<uint32_t>(),
                        j.at("cpda_states").get<uint32_t>(), j.at("config_automaton").get<bool>());
  a.set_initial(j.at("initial").get<uint32_t>());
  for (const auto& f : j.at("finals")) a.set_final(f.get<uint32_t>(), true);
  auto syms = all_syms(a.num_letters(), a.num_cpda_states());
  const auto& t2 = j.at("table2");
  for (uint32_t r = 0; r < a.num_states(); ++r)
    for (size_t k = 0; k < syms.size(); ++k) a.set2(r, syms[k], t2.at(r).at(k).get<uint32_t>());
  const auto& t3 = j.at("table3");
  size_t row = 0;
  for (uint32_t r = 0; r < a.num_states(); ++r)
    for (LetterId l = 0; l < a.num_letters(); ++l, ++row)
      for (uint32_t t = 0; t < a.num_states(); ++t)
        a.set3(r, l, t, t3.at(row).at(t).get<uint32_t>());
  return a;
}

}  // namespace cpg
