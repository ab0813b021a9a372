#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "oraclemine/executions.hpp"
#include "oraclemine/formula.hpp"
#include "oraclemine/fsm.hpp"
#include "oraclemine/sat_solver.hpp"

namespace oraclemine {

// Exactly one of `vars` holds:
//   /\_{k<n} (¬v_k ∨ /\_{j>k} ¬v_j) ∧ \/_k v_k
// A singleton yields the bare variable.
[[nodiscard]] Formula exactly_one(const std::vector<std::string>& vars);

// φ_M: one exactly-one block per (state, input), in slot order.
[[nodiscard]] Formula encode_machine(const Fsm& fsm);

// φ_e: conjunction of the uncertain transitions used by e (⊤ if none).
[[nodiscard]] Formula encode_execution(const Fsm& fsm, const Execution& e);

// φ_E: disjunction of the per-execution conjunctions of a class.
[[nodiscard]] Formula encode_class(const Fsm& fsm, const ExecutionClass& cls);

// A transition choice per slot of the host machine.
struct CandidateModel {
  std::vector<TransitionIndex> chosen;

  [[nodiscard]] TransitionIndex at(const Fsm& host, StateIndex s, SymbolIndex x) const {
    return chosen[host.slot_of(s, x)];
  }
  [[nodiscard]] bool uses(const Fsm& host, TransitionIndex t) const {
    return chosen[host.slot_of(t)] == t;
  }

  friend auto operator<=>(const CandidateModel&, const CandidateModel&) = default;
};

// Formula value of the assignment "exactly the transitions of `model` hold".
[[nodiscard]] bool satisfies(const Fsm& host, const CandidateModel& model, const Formula& phi);

// Deterministic submachine keeping the chosen transitions, restricted to the
// states reachable from the initial one.
[[nodiscard]] Fsm extract_dfsm(const Fsm& host, const CandidateModel& model);

// Clausal form of φ_host ∧ φ. Variables 0..|T|-1 are the host transitions in
// declaration order; auxiliary definition variables follow. Variables of φ
// that are not transitions of the host denote deactivated transitions and are
// fixed to false.
struct Cnf {
  std::vector<std::string> var_names;
  std::vector<sat::Clause> clauses;
};

[[nodiscard]] Cnf to_cnf(const Fsm& host, const Formula& phi);
void write_dimacs(std::ostream& out, const Cnf& cnf);
// One "index id" line per variable, 1-based to match DIMACS.
void write_var_map(std::ostream& out, const Cnf& cnf);

// Incremental solving context over the candidates of `host` satisfying φ.
// Single-owner; not thread-safe.
class CandidateSpace {
public:
  CandidateSpace(const Fsm& host, const Formula& phi);

  [[nodiscard]] const Fsm& host() const { return host_; }

  [[nodiscard]] std::optional<CandidateModel> find(std::span<const sat::Lit> assumptions = {});

  [[nodiscard]] sat::Lit lit(TransitionIndex t) const { return sat::Lit::pos(static_cast<sat::Var>(t)); }

  // Fresh activation literal: clauses guarded by it only apply while it is
  // assumed; retire() disables them for good.
  [[nodiscard]] sat::Lit new_selector();
  void retire(sat::Lit selector);

  // Adds ¬(model agrees on every listed slot), optionally guarded. Slots with
  // a single transition are skipped since φ_host forces them.
  void block(const CandidateModel& model, const std::vector<std::size_t>& slots,
             std::optional<sat::Lit> selector = std::nullopt);
  void block(const CandidateModel& model, std::optional<sat::Lit> selector = std::nullopt);

private:
  CandidateModel decode() const;

  Fsm host_;
  sat::Solver solver_;
};

// solve(fsm, φ, blocked): a candidate of fsm satisfying φ that differs from
// every blocked model on some uncertain slot.
[[nodiscard]] std::optional<CandidateModel> solve(const Fsm& fsm, const Formula& phi,
                                                  const std::vector<CandidateModel>& blocked = {});

// Enumerates models of φ_fsm ∧ φ, at most `limit`.
[[nodiscard]] std::vector<CandidateModel> enumerate_models(const Fsm& fsm, const Formula& phi,
                                                           std::size_t limit);

struct ModelCount {
  BigInt count;
  bool exact = true; // false: count == cap and more models may exist
};

// Capped model counter by enumeration with blocking.
[[nodiscard]] ModelCount count_models(const Fsm& fsm, const Formula& phi, std::size_t cap);

inline constexpr std::size_t kDefaultPairCap = 64;

struct PairSearch {
  enum class Kind { Single, Pair, Inconclusive };

  Kind kind = Kind::Inconclusive;
  CandidateModel first_model;
  std::optional<Fsm> first;
  CandidateModel second_model;
  std::optional<Fsm> second;
  InputWord witness;
  std::size_t models_examined = 0;
};

// Looks for two non-equivalent candidates among the models of φ_fsm ∧ φ.
// The first model S1 is fixed; alternatives are sought slot by slot over the
// part of S1 reachable from the initial state, blocking the reachable part of
// every alternative found equivalent to S1. Single is only returned once every
// such slot is exhausted; hitting `cap` examined models yields Inconclusive.
// Throws UnsatisfiableFormula if φ has no model.
[[nodiscard]] PairSearch find_nonequivalent_pair(const Fsm& fsm, const Formula& phi,
                                                 std::size_t cap = kDefaultPairCap);

} // namespace oraclemine
