#include "oraclemine/fsm.hpp"

#include <algorithm>
#include <deque>
#include <set>
#include <unordered_set>

#include "oraclemine/errors.hpp"

namespace oraclemine {

namespace {

void check_name(const std::string& what, const std::string& name) {
  if (name.empty()) {
    throw StructureError("empty " + what + " name");
  }
  for (char c : name) {
    if (std::isspace(static_cast<unsigned char>(c)) || c == '/' || c == ':' || c == '#' ||
        c == ',' || c == '"') {
      throw StructureError(what + " name '" + name + "' contains a reserved character");
    }
  }
}

void check_names(const std::string& what, const std::vector<std::string>& names) {
  if (names.empty()) {
    throw StructureError("no " + what + "s declared");
  }
  std::unordered_set<std::string> seen;
  for (const auto& n : names) {
    check_name(what, n);
    if (!seen.insert(n).second) {
      throw StructureError("duplicate " + what + " '" + n + "'");
    }
  }
}

template <typename Index>
std::optional<Index> find_name(const std::vector<std::string>& names, std::string_view name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) {
    return std::nullopt;
  }
  return static_cast<Index>(it - names.begin());
}

} // namespace

Fsm::Fsm(std::string name, std::vector<std::string> states, StateIndex initial,
         std::vector<std::string> inputs, std::vector<std::string> outputs,
         std::vector<Transition> transitions)
    : name_(std::move(name)),
      states_(std::move(states)),
      initial_(initial),
      inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      transitions_(std::move(transitions)) {
  check_name("machine", name_);
  check_names("state", states_);
  check_names("input", inputs_);
  check_names("output", outputs_);
  if (initial_ >= states_.size()) {
    throw StructureError("initial state out of range");
  }

  slots_.resize(num_slots());
  std::set<std::tuple<StateIndex, SymbolIndex, SymbolIndex, StateIndex>> quads;
  for (TransitionIndex t = 0; t < transitions_.size(); ++t) {
    const auto& tr = transitions_[t];
    check_name("transition", tr.id);
    if (tr.src >= states_.size() || tr.tgt >= states_.size()) {
      throw StructureError("transition " + tr.id + " references an unknown state");
    }
    if (tr.input >= inputs_.size()) {
      throw StructureError("transition " + tr.id + " references an unknown input");
    }
    if (tr.output >= outputs_.size()) {
      throw StructureError("transition " + tr.id + " references an unknown output");
    }
    if (!by_id_.emplace(tr.id, t).second) {
      throw StructureError("duplicate transition id '" + tr.id + "'");
    }
    if (!quads.emplace(tr.src, tr.input, tr.output, tr.tgt).second) {
      throw StructureError("transition " + tr.id + " duplicates an earlier transition");
    }
    slots_[slot_of(tr.src, tr.input)].push_back(t);
  }
}

Fsm Fsm::build(std::string name, std::vector<std::string> states, const std::string& initial,
               std::vector<std::string> inputs, std::vector<std::string> outputs,
               const std::vector<TransitionSpec>& transitions) {
  auto state_of = [&](const std::string& n, const std::string& ctx) {
    auto s = find_name<StateIndex>(states, n);
    if (!s) {
      throw StructureError(ctx + ": unknown state '" + n + "'");
    }
    return *s;
  };
  StateIndex init = state_of(initial, "initial");
  std::vector<Transition> ts;
  ts.reserve(transitions.size());
  for (std::size_t k = 0; k < transitions.size(); ++k) {
    const auto& spec = transitions[k];
    std::string id = spec.id.empty() ? "t" + std::to_string(k + 1) : spec.id;
    auto in = find_name<SymbolIndex>(inputs, spec.input);
    if (!in) {
      throw StructureError("transition " + id + ": unknown input '" + spec.input + "'");
    }
    auto out = find_name<SymbolIndex>(outputs, spec.output);
    if (!out) {
      throw StructureError("transition " + id + ": unknown output '" + spec.output + "'");
    }
    ts.push_back(Transition{id, state_of(spec.src, "transition " + id), *in, *out,
                            state_of(spec.tgt, "transition " + id)});
  }
  return Fsm(std::move(name), std::move(states), init, std::move(inputs), std::move(outputs),
             std::move(ts));
}

std::optional<TransitionIndex> Fsm::find_transition(std::string_view id) const {
  auto it = by_id_.find(std::string(id));
  if (it == by_id_.end()) {
    return std::nullopt;
  }
  return it->second;
}

std::optional<StateIndex> Fsm::find_state(std::string_view name) const {
  return find_name<StateIndex>(states_, name);
}

std::optional<SymbolIndex> Fsm::find_input(std::string_view name) const {
  return find_name<SymbolIndex>(inputs_, name);
}

std::optional<SymbolIndex> Fsm::find_output(std::string_view name) const {
  return find_name<SymbolIndex>(outputs_, name);
}

Fsm Fsm::submachine(const std::vector<bool>& keep) const {
  std::vector<bool> reached(states_.size(), false);
  std::deque<StateIndex> queue{initial_};
  reached[initial_] = true;
  while (!queue.empty()) {
    StateIndex s = queue.front();
    queue.pop_front();
    for (SymbolIndex x = 0; x < inputs_.size(); ++x) {
      for (TransitionIndex t : slot(s, x)) {
        if (keep[t] && !reached[transitions_[t].tgt]) {
          reached[transitions_[t].tgt] = true;
          queue.push_back(transitions_[t].tgt);
        }
      }
    }
  }

  std::vector<StateIndex> remap(states_.size(), 0);
  std::vector<std::string> states;
  for (StateIndex s = 0; s < states_.size(); ++s) {
    if (reached[s]) {
      remap[s] = static_cast<StateIndex>(states.size());
      states.push_back(states_[s]);
    }
  }
  std::vector<Transition> ts;
  for (TransitionIndex t = 0; t < transitions_.size(); ++t) {
    const auto& tr = transitions_[t];
    if (keep[t] && reached[tr.src]) {
      ts.push_back(Transition{tr.id, remap[tr.src], tr.input, tr.output, remap[tr.tgt]});
    }
  }
  return Fsm(name_, std::move(states), remap[initial_], inputs_, outputs_, std::move(ts));
}

Fsm Fsm::renamed(std::string name) const {
  return Fsm(std::move(name), states_, initial_, inputs_, outputs_, transitions_);
}

bool operator==(const Fsm& a, const Fsm& b) {
  return a.name_ == b.name_ && a.states_ == b.states_ && a.initial_ == b.initial_ &&
         a.inputs_ == b.inputs_ && a.outputs_ == b.outputs_ && a.transitions_ == b.transitions_;
}

ValidationReport validate(const Fsm& fsm) {
  ValidationReport r;
  r.complete = true;
  r.deterministic = true;
  for (StateIndex s = 0; s < fsm.num_states(); ++s) {
    for (SymbolIndex x = 0; x < fsm.num_inputs(); ++x) {
      auto ts = fsm.slot(s, x);
      if (ts.empty()) {
        r.complete = false;
        r.missing.emplace_back(s, x);
      } else if (ts.size() > 1) {
        r.deterministic = false;
      }
    }
  }
  for (TransitionIndex t = 0; t < fsm.num_transitions(); ++t) {
    if (fsm.is_uncertain(t)) {
      r.uncertain_transitions.push_back(t);
    }
  }
  auto reach = reachable_states(fsm);
  std::vector<bool> seen(fsm.num_states(), false);
  for (auto s : reach) {
    seen[s] = true;
  }
  for (StateIndex s = 0; s < fsm.num_states(); ++s) {
    if (!seen[s]) {
      r.unreachable.push_back(s);
    }
  }
  r.initially_connected = r.unreachable.empty();
  return r;
}

bool is_complete(const Fsm& fsm) {
  for (std::size_t k = 0; k < fsm.num_slots(); ++k) {
    if (fsm.slot(k).empty()) {
      return false;
    }
  }
  return true;
}

bool is_deterministic(const Fsm& fsm) {
  for (std::size_t k = 0; k < fsm.num_slots(); ++k) {
    if (fsm.slot(k).size() > 1) {
      return false;
    }
  }
  return true;
}

void require_complete(const Fsm& fsm) {
  for (StateIndex s = 0; s < fsm.num_states(); ++s) {
    for (SymbolIndex x = 0; x < fsm.num_inputs(); ++x) {
      if (fsm.slot(s, x).empty()) {
        throw IncompleteMachine("machine " + fsm.name() + " is incomplete: state " +
                                fsm.states()[s] + " lacks input " + fsm.inputs()[x]);
      }
    }
  }
}

void require_deterministic_complete(const Fsm& fsm) {
  require_complete(fsm);
  for (StateIndex s = 0; s < fsm.num_states(); ++s) {
    for (SymbolIndex x = 0; x < fsm.num_inputs(); ++x) {
      if (fsm.slot(s, x).size() > 1) {
        throw NotDeterministic("machine " + fsm.name() + " is nondeterministic at state " +
                               fsm.states()[s] + " on input " + fsm.inputs()[x]);
      }
    }
  }
}

std::size_t uncertainty_degree(const Fsm& fsm) {
  require_complete(fsm);
  std::size_t degree = 0;
  for (std::size_t k = 0; k < fsm.num_slots(); ++k) {
    degree = std::max(degree, fsm.slot(k).size());
  }
  return degree;
}

BigInt candidate_count(const Fsm& fsm) {
  require_complete(fsm);
  BigInt count = 1;
  for (std::size_t k = 0; k < fsm.num_slots(); ++k) {
    count *= fsm.slot(k).size();
  }
  return count;
}

std::vector<StateIndex> reachable_states(const Fsm& fsm) {
  std::vector<bool> seen(fsm.num_states(), false);
  std::vector<StateIndex> order{fsm.initial()};
  seen[fsm.initial()] = true;
  for (std::size_t head = 0; head < order.size(); ++head) {
    StateIndex s = order[head];
    for (SymbolIndex x = 0; x < fsm.num_inputs(); ++x) {
      for (TransitionIndex t : fsm.slot(s, x)) {
        StateIndex q = fsm.transition(t).tgt;
        if (!seen[q]) {
          seen[q] = true;
          order.push_back(q);
        }
      }
    }
  }
  return order;
}

OutputWord response(const Fsm& dfsm, const InputWord& test) {
  OutputWord out;
  out.reserve(test.size());
  StateIndex s = dfsm.initial();
  for (SymbolIndex x : test) {
    if (x >= dfsm.num_inputs()) {
      throw UnknownSymbol("input index " + std::to_string(x) + " outside the alphabet of " +
                          dfsm.name());
    }
    auto ts = dfsm.slot(s, x);
    if (ts.empty()) {
      throw IncompleteMachine("machine " + dfsm.name() + " is incomplete: state " +
                              dfsm.states()[s] + " lacks input " + dfsm.inputs()[x]);
    }
    if (ts.size() > 1) {
      throw NotDeterministic("machine " + dfsm.name() + " is nondeterministic at state " +
                             dfsm.states()[s] + " on input " + dfsm.inputs()[x]);
    }
    const auto& tr = dfsm.transition(ts.front());
    out.push_back(tr.output);
    s = tr.tgt;
  }
  return out;
}

void check_execution(const Fsm& fsm, const Execution& e) {
  if (e.transitions.empty()) {
    throw InvalidExecution("empty execution");
  }
  StateIndex s = fsm.initial();
  for (std::size_t i = 0; i < e.transitions.size(); ++i) {
    TransitionIndex t = e.transitions[i];
    if (t >= fsm.num_transitions()) {
      throw InvalidExecution("execution references an unknown transition");
    }
    if (fsm.transition(t).src != s) {
      throw InvalidExecution("execution breaks at position " + std::to_string(i + 1) + " (" +
                             fsm.transition(t).id + " does not leave state " +
                             fsm.states()[s] + ")");
    }
    s = fsm.transition(t).tgt;
  }
}

Trace trace_of(const Fsm& fsm, const Execution& e) {
  check_execution(fsm, e);
  Trace tr;
  for (TransitionIndex t : e.transitions) {
    tr.inputs.push_back(fsm.transition(t).input);
    tr.outputs.push_back(fsm.transition(t).output);
  }
  return tr;
}

bool is_deterministic_execution(const Fsm& fsm, const Execution& e) {
  std::unordered_map<std::size_t, TransitionIndex> chosen;
  for (TransitionIndex t : e.transitions) {
    auto [it, inserted] = chosen.emplace(fsm.slot_of(t), t);
    if (!inserted && it->second != t) {
      return false;
    }
  }
  return true;
}

std::vector<SymbolIndex> parse_word(const std::vector<std::string>& alphabet,
                                    std::string_view text) {
  std::vector<std::string_view> tokens;
  bool separated = text.find_first_of(", \t") != std::string_view::npos;
  bool single_chars = std::all_of(alphabet.begin(), alphabet.end(),
                                  [](const std::string& a) { return a.size() == 1; });
  if (separated) {
    std::size_t i = 0;
    while (i < text.size()) {
      while (i < text.size() && (text[i] == ',' || text[i] == ' ' || text[i] == '\t')) {
        ++i;
      }
      std::size_t j = i;
      while (j < text.size() && text[j] != ',' && text[j] != ' ' && text[j] != '\t') {
        ++j;
      }
      if (j > i) {
        tokens.push_back(text.substr(i, j - i));
      }
      i = j;
    }
  } else if (single_chars) {
    for (std::size_t i = 0; i < text.size(); ++i) {
      tokens.push_back(text.substr(i, 1));
    }
  } else if (!text.empty()) {
    tokens.push_back(text);
  }

  std::vector<SymbolIndex> word;
  for (auto tok : tokens) {
    auto idx = find_name<SymbolIndex>(alphabet, tok);
    if (!idx) {
      throw UnknownSymbol("unknown symbol '" + std::string(tok) + "'");
    }
    word.push_back(*idx);
  }
  return word;
}

std::string format_word(const std::vector<std::string>& alphabet,
                        const std::vector<SymbolIndex>& word) {
  bool single_chars = std::all_of(alphabet.begin(), alphabet.end(),
                                  [](const std::string& a) { return a.size() == 1; });
  std::string out;
  for (std::size_t i = 0; i < word.size(); ++i) {
    if (!single_chars && i > 0) {
      out += ',';
    }
    out += alphabet.at(word[i]);
  }
  return out;
}

std::string format_execution(const Fsm& fsm, const Execution& e) {
  std::string out;
  for (TransitionIndex t : e.transitions) {
    out += fsm.transition(t).id;
  }
  return out;
}

std::string format_scientific(const BigInt& value, int digits) {
  if (value < 0) {
    return "-" + format_scientific(-value, digits);
  }
  std::string s = value.str();
  if (s.size() <= static_cast<std::size_t>(std::max(digits, 1))) {
    return s;
  }
  int exponent = static_cast<int>(s.size()) - 1;
  std::string mantissa = s.substr(0, std::min<std::size_t>(s.size(), digits));
  while (static_cast<int>(mantissa.size()) < digits) {
    mantissa += '0';
  }
  if (s.size() > static_cast<std::size_t>(digits) && s[digits] >= '5') {
    int i = digits - 1;
    while (i >= 0 && mantissa[i] == '9') {
      mantissa[i] = '0';
      --i;
    }
    if (i < 0) {
      mantissa.insert(mantissa.begin(), '1');
      mantissa.pop_back();
      ++exponent;
    } else {
      ++mantissa[i];
    }
  }
  std::string out(1, mantissa[0]);
  if (digits > 1) {
    out += '.';
    out += mantissa.substr(1);
  }
  return out + "E" + std::to_string(exponent);
}

} // namespace oraclemine
