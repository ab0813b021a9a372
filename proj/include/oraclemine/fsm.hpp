#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace oraclemine {

using BigInt = boost::multiprecision::cpp_int;

using StateIndex = std::uint32_t;
using SymbolIndex = std::uint32_t;
using TransitionIndex = std::uint32_t;

// Words are index sequences into the machine's input/output alphabets.
using InputWord = std::vector<SymbolIndex>;
using OutputWord = std::vector<SymbolIndex>;

struct Transition {
  std::string id;
  StateIndex src = 0;
  SymbolIndex input = 0;
  SymbolIndex output = 0;
  StateIndex tgt = 0;

  friend bool operator==(const Transition&, const Transition&) = default;
};

// Name-level transition description used when building a machine from text
// or a structured object. An empty id is auto-assigned "t<k>" by position.
struct TransitionSpec {
  std::string id;
  std::string src;
  std::string input;
  std::string output;
  std::string tgt;
};

// A finite state machine (S, s0, X, Y, T). The same type represents imprecise
// oracles (nondeterministic), candidates and mined oracles (deterministic).
//
// Structural invariants are enforced on construction; completeness,
// connectivity and determinism are reported by validate().
class Fsm {
public:
  Fsm(std::string name, std::vector<std::string> states, StateIndex initial,
      std::vector<std::string> inputs, std::vector<std::string> outputs,
      std::vector<Transition> transitions);

  static Fsm build(std::string name, std::vector<std::string> states,
                   const std::string& initial, std::vector<std::string> inputs,
                   std::vector<std::string> outputs,
                   const std::vector<TransitionSpec>& transitions);

  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] const std::vector<std::string>& states() const { return states_; }
  [[nodiscard]] StateIndex initial() const { return initial_; }
  [[nodiscard]] const std::vector<std::string>& inputs() const { return inputs_; }
  [[nodiscard]] const std::vector<std::string>& outputs() const { return outputs_; }
  [[nodiscard]] const std::vector<Transition>& transitions() const { return transitions_; }
  [[nodiscard]] const Transition& transition(TransitionIndex t) const { return transitions_[t]; }

  [[nodiscard]] std::size_t num_states() const { return states_.size(); }
  [[nodiscard]] std::size_t num_inputs() const { return inputs_.size(); }
  [[nodiscard]] std::size_t num_outputs() const { return outputs_.size(); }
  [[nodiscard]] std::size_t num_transitions() const { return transitions_.size(); }

  // A slot is a (state, input) pair; slot ids are state-major in declared order.
  [[nodiscard]] std::size_t num_slots() const { return states_.size() * inputs_.size(); }
  [[nodiscard]] std::size_t slot_of(StateIndex s, SymbolIndex x) const {
    return static_cast<std::size_t>(s) * inputs_.size() + x;
  }
  [[nodiscard]] std::size_t slot_of(TransitionIndex t) const {
    return slot_of(transitions_[t].src, transitions_[t].input);
  }
  // T(s,x) in declaration order.
  [[nodiscard]] std::span<const TransitionIndex> slot(std::size_t slot_id) const {
    return slots_[slot_id];
  }
  [[nodiscard]] std::span<const TransitionIndex> slot(StateIndex s, SymbolIndex x) const {
    return slots_[slot_of(s, x)];
  }
  [[nodiscard]] bool is_uncertain(TransitionIndex t) const { return slots_[slot_of(t)].size() > 1; }

  [[nodiscard]] std::optional<TransitionIndex> find_transition(std::string_view id) const;
  [[nodiscard]] std::optional<StateIndex> find_state(std::string_view name) const;
  [[nodiscard]] std::optional<SymbolIndex> find_input(std::string_view name) const;
  [[nodiscard]] std::optional<SymbolIndex> find_output(std::string_view name) const;

  // Submachine keeping the transitions flagged in `keep`, restricted to the
  // states reachable from the initial state over kept transitions. Transition
  // ids, alphabets and relative declaration order are preserved.
  [[nodiscard]] Fsm submachine(const std::vector<bool>& keep) const;

  [[nodiscard]] Fsm renamed(std::string name) const;

  friend bool operator==(const Fsm& a, const Fsm& b);

private:
  std::string name_;
  std::vector<std::string> states_;
  StateIndex initial_;
  std::vector<std::string> inputs_;
  std::vector<std::string> outputs_;
  std::vector<Transition> transitions_;
  std::vector<std::vector<TransitionIndex>> slots_;
  std::unordered_map<std::string, TransitionIndex> by_id_;
};

struct Execution {
  std::vector<TransitionIndex> transitions;

  friend auto operator<=>(const Execution&, const Execution&) = default;
};

struct Trace {
  InputWord inputs;
  OutputWord outputs;

  friend bool operator==(const Trace&, const Trace&) = default;
};

struct ValidationReport {
  bool complete = false;
  bool initially_connected = false;
  bool deterministic = false;
  std::vector<TransitionIndex> uncertain_transitions;
  // (state, input) pairs with no transition, for diagnostics.
  std::vector<std::pair<StateIndex, SymbolIndex>> missing;
  std::vector<StateIndex> unreachable;
};

[[nodiscard]] ValidationReport validate(const Fsm& fsm);
[[nodiscard]] bool is_complete(const Fsm& fsm);
[[nodiscard]] bool is_deterministic(const Fsm& fsm);

// Throws IncompleteMachine with a diagnosis naming the first missing slot.
void require_complete(const Fsm& fsm);
void require_deterministic_complete(const Fsm& fsm);

// Max |T(s,x)|. Requires a complete machine.
[[nodiscard]] std::size_t uncertainty_degree(const Fsm& fsm);

// Product over slots of |T(s,x)|: the number of complete deterministic
// submachines over all states.
[[nodiscard]] BigInt candidate_count(const Fsm& fsm);

// States reachable from the initial one, in BFS order (inputs in declared
// order, transitions in declared order).
[[nodiscard]] std::vector<StateIndex> reachable_states(const Fsm& fsm);

// Response of a complete DFSM from its initial state.
[[nodiscard]] OutputWord response(const Fsm& dfsm, const InputWord& test);

[[nodiscard]] Trace trace_of(const Fsm& fsm, const Execution& e);

// Throws InvalidExecution unless e is a path from the initial state.
void check_execution(const Fsm& fsm, const Execution& e);

// True iff e never uses two different transitions of the same slot.
[[nodiscard]] bool is_deterministic_execution(const Fsm& fsm, const Execution& e);

// --- words --------------------------------------------------------------

// Parses "babaab" (single-character alphabets) or "x1,x2" / "x1 x2".
[[nodiscard]] std::vector<SymbolIndex> parse_word(const std::vector<std::string>& alphabet,
                                                  std::string_view text);
[[nodiscard]] std::string format_word(const std::vector<std::string>& alphabet,
                                      const std::vector<SymbolIndex>& word);

[[nodiscard]] inline InputWord parse_inputs(const Fsm& fsm, std::string_view text) {
  return parse_word(fsm.inputs(), text);
}
[[nodiscard]] inline OutputWord parse_outputs(const Fsm& fsm, std::string_view text) {
  return parse_word(fsm.outputs(), text);
}
[[nodiscard]] inline std::string format_inputs(const Fsm& fsm, const InputWord& w) {
  return format_word(fsm.inputs(), w);
}
[[nodiscard]] inline std::string format_outputs(const Fsm& fsm, const OutputWord& w) {
  return format_word(fsm.outputs(), w);
}

[[nodiscard]] std::string format_execution(const Fsm& fsm, const Execution& e);

// "1.07E9"-style rendering with the given number of significant digits.
[[nodiscard]] std::string format_scientific(const BigInt& value, int digits = 3);

} // namespace oraclemine
