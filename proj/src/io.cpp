#include "cpg/io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "json.hpp"

namespace cpg {

using nlohmann::json;

namespace {

[[noreturn]] void parse_fail(const std::string& text, size_t byte, const std::string& what) {
  size_t line = 1, col = 1;
  for (size_t i = 0; i < byte && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  std::ostringstream os;
  os << "parse error at line " << line << ", column " << col << ": " << what;
  throw UsageError(os.str());
}

}  // namespace

StackOp parse_op(const std::string& text, const Alphabet& alphabet) {
  std::istringstream is(text);
  std::string head;
  is >> head;
  if (head == "id") return StackOp::id();
  if (head == "collapse") return StackOp::collapse();
  if (head == "pop") {
    int k;
    if (!(is >> k)) throw UsageError("op 'pop' needs an order: " + text);
    return StackOp::pop(k);
  }
  if (head == "push") {
    int j;
    if (!(is >> j)) throw UsageError("op 'push' needs an order: " + text);
    return StackOp::push(j);
  }
  if (head == "push1") {
    std::string letter;
    int e;
    if (!(is >> letter >> e)) throw UsageError("op 'push1' needs a letter and link order: " + text);
    LetterId id = alphabet.find(letter);
    if (id == kNoId) throw UsageError("op letter unknown: " + letter);
    return StackOp::push1(id, e);
  }
  if (head == "rew") {
    std::string letter;
    if (!(is >> letter)) throw UsageError("op 'rew' needs a letter: " + text);
    LetterId id = alphabet.find(letter);
    if (id == kNoId) throw UsageError("op letter unknown: " + letter);
    return StackOp::rewrite(id);
  }
  throw UsageError("unknown op: " + text);
}

CpdaGameSpec load_game_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    parse_fail(text, e.byte, e.what());
  }

  CpdaGameSpec spec;
  spec.cpda.order = j.at("order").get<int>();
  if (spec.cpda.order < 1) throw UsageError("order must be >= 1");

  auto alphabet = std::make_shared<Alphabet>();
  for (const auto& row : j.at("alphabet")) {
    alphabet->add(row.at("name").get<std::string>(), row.value("bottom", false));
  }
  if (alphabet->bottom_count() != 1)
    throw UsageError("alphabet must mark exactly one bottom letter");
  spec.cpda.alphabet = alphabet;

  auto states = std::make_shared<StateTable>();
  Color d = 0;
  for (const auto& row : j.at("states")) {
    std::string owner = row.value("owner", "E");
    if (owner != "E" && owner != "A") throw UsageError("state owner must be E or A");
    Color c = row.value("color", 0);
    if (c < 0) throw UsageError("state color must be nonnegative");
    d = std::max(d, c);
    states->add(row.at("name").get<std::string>(),
                owner == "E" ? Owner::Eloise : Owner::Abelard, c);
  }
  spec.cpda.states = states;
  spec.max_color = d;

  State init = states->find(j.at("initial").get<std::string>());
  if (init == kNoId) throw UsageError("initial state not declared");
  spec.cpda.initial_state = init;
  spec.cpda.initial_stack = HOStack::bottom(spec.cpda.order, alphabet->bottom());

  // Materialize the table; keep per-(state, letter) rule lists in file order.
  auto table = std::make_shared<std::map<std::pair<State, LetterId>, std::vector<TransitionRule>>>();
  for (const auto& row : j.at("transitions")) {
    State from = states->find(row.at("from_state").get<std::string>());
    if (from == kNoId) throw UsageError("unknown from_state in transition");
    LetterId top = alphabet->find(row.at("top_letter").get<std::string>());
    if (top == kNoId) throw UsageError("unknown top_letter in transition");
    State to = states->find(row.at("to_state").get<std::string>());
    if (to == kNoId) throw UsageError("unknown to_state in transition");
    TransitionRule rule;
    rule.target = to;
    if (row.contains("rewrite") && !row.at("rewrite").is_null()) {
      LetterId rw = alphabet->find(row.at("rewrite").get<std::string>());
      if (rw == kNoId) throw UsageError("unknown rewrite letter in transition");
      if (alphabet->is_bottom(rw)) throw UsageError("rewrite letter may not be the bottom symbol");
      rule.rewrite = rw;
    }
    rule.op = parse_op(row.at("op").get<std::string>(), *alphabet);
    if (rule.op.kind == OpKind::Rewrite)
      throw UsageError("transition op slot may not be a rewrite; use the rewrite field");
    if (rule.op.kind == OpKind::Pop && (rule.op.level < 1 || rule.op.level > spec.cpda.order))
      throw UsageError("pop order out of range");
    if (rule.op.kind == OpKind::Push && (rule.op.level < 2 || rule.op.level > spec.cpda.order))
      throw UsageError("push order out of range");
    if (rule.op.kind == OpKind::Push1) {
      if (rule.op.level < 1 || rule.op.level > spec.cpda.order)
        throw UsageError("push1 link order out of range");
      if (alphabet->is_bottom(rule.op.letter))
        throw UsageError("push1 letter may not be the bottom symbol");
    }
    (*table)[{from, top}].push_back(rule);
  }
  spec.cpda.delta = [table](State q, LetterId a) -> std::vector<TransitionRule> {
    auto it = table->find({q, a});
    return it == table->end() ? std::vector<TransitionRule>{} : it->second;
  };
  return spec;
}

CpdaGameSpec load_game_file(const std::string& path) { return load_game_json(read_file(path)); }

std::string game_to_json(const CpdaGameSpec& spec) {
  json j;
  j["order"] = spec.cpda.order;
  json letters = json::array();
  for (LetterId a = 0; a < spec.cpda.alphabet->size(); ++a) {
    json row;
    row["name"] = spec.cpda.alphabet->name(a);
    if (spec.cpda.alphabet->is_bottom(a)) row["bottom"] = true;
    letters.push_back(row);
  }
  j["alphabet"] = letters;
  json states = json::array();
  for (State q = 0; q < spec.cpda.states->size(); ++q) {
    states.push_back({{"name", spec.cpda.states->name(q)},
                      {"owner", spec.owner(q) == Owner::Eloise ? "E" : "A"},
                      {"color", spec.color(q)}});
  }
  j["states"] = states;
  j["initial"] = spec.cpda.states->name(spec.cpda.initial_state);
  json trans = json::array();
  for (State q = 0; q < spec.cpda.states->size(); ++q) {
    for (LetterId a = 0; a < spec.cpda.alphabet->size(); ++a) {
      for (const auto& r : spec.cpda.delta(q, a)) {
        json row;
        row["from_state"] = spec.cpda.states->name(q);
        row["top_letter"] = spec.cpda.alphabet->name(a);
        row["to_state"] = spec.cpda.states->name(r.target);
        row["rewrite"] = r.rewrite ? json(spec.cpda.alphabet->name(*r.rewrite)) : json(nullptr);
        row["op"] = op_to_string(r.op, *spec.cpda.alphabet);
        trans.push_back(row);
      }
    }
  }
  j["transitions"] = trans;
  return j.dump(2);
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot open file: " + path);
  std::ostringstream os;
  os << f.rdbuf();
  return os.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw UsageError("cannot write file: " + path);
  f << content;
}

}  // namespace cpg
