#pragma once

#include <chrono>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "oraclemine/encoding.hpp"
#include "oraclemine/executions.hpp"
#include "oraclemine/formula.hpp"
#include "oraclemine/fsm.hpp"

namespace oraclemine {

// A plausible response as shown to the expert. The size is advisory only.
struct OfferedResponse {
  OutputWord response;
  BigInt subdomain_size;
  std::size_t execution_count = 0;

  friend bool operator==(const OfferedResponse&, const OfferedResponse&) = default;
};

// Response-selection authority. choose() must return one of `offered`;
// `machine` is the current reduced machine the responses refer to.
class Expert {
public:
  virtual ~Expert() = default;
  virtual OutputWord choose(const Fsm& machine, const InputWord& test,
                            std::span<const OfferedResponse> offered) = 0;
};

// Answers with the response of a fixed DFSM. Throws ExpertProtocolError when
// that response is not offered, i.e. the DFSM is not a candidate.
class EmulatedExpert final : public Expert {
public:
  explicit EmulatedExpert(Fsm dfsm);
  OutputWord choose(const Fsm& machine, const InputWord& test,
                    std::span<const OfferedResponse> offered) override;

private:
  Fsm dfsm_;
};

[[nodiscard]] std::unique_ptr<Expert> emulated_expert(Fsm dfsm);

struct SessionOptions {
  std::size_t pair_cap = kDefaultPairCap;
  std::size_t execution_cap = kDefaultExecutionCap;
  // Queue generated distinguishing tests, or stop in NeedsGeneration once the
  // given tests are spent.
  bool generate_tests = true;
  // Seeded random visiting order of the initial tests; insertion order if absent.
  std::optional<std::uint64_t> visit_seed;
  // Throws BudgetExceeded from a step that starts after this instant.
  std::optional<std::chrono::steady_clock::time_point> deadline;
};

enum class SessionStatus { AwaitingChoice, NeedsGeneration, Done, Inconclusive };

[[nodiscard]] const char* to_string(SessionStatus status);

// One processed test. Witness models are recorded as the transition ids they
// choose, so they can be checked against any later formula.
struct MiningStep {
  InputWord test;
  std::vector<OfferedResponse> offered;
  OutputWord chosen;
  Formula class_formula;
  std::vector<std::string> removed; // ids dropped by the reduction
  bool generated = false;
  std::optional<std::pair<std::vector<std::string>, std::vector<std::string>>> witness;
};

// Adequacy checking and mining as a resumable state machine: every expert choice is an
// explicit call, so the same engine serves callbacks and the HTTP adapter.
//
// φ is kept as the conjunction of class constraints; φ of the current machine
// is implied by the solver host. Invariants: the machine is complete and
// initially connected, φ has a model over it, and Done ⇒ every model is
// equivalent to result().
class MiningSession {
public:
  MiningSession(Fsm machine, std::vector<InputWord> tests, SessionOptions options = {},
                std::optional<Formula> phi = std::nullopt);

  [[nodiscard]] SessionStatus status() const { return status_; }
  [[nodiscard]] const Fsm& original() const { return original_; }
  [[nodiscard]] const Fsm& machine() const { return machine_; }
  [[nodiscard]] const Formula& formula() const { return phi_; }
  // φ_M of the original machine conjoined with formula().
  [[nodiscard]] Formula full_formula() const;
  [[nodiscard]] const SessionOptions& options() const { return options_; }
  [[nodiscard]] const std::vector<InputWord>& initial_tests() const { return initial_tests_; }
  [[nodiscard]] const std::vector<MiningStep>& history() const { return history_; }
  [[nodiscard]] const std::vector<InputWord>& adequate_tests() const { return adequate_; }
  [[nodiscard]] const std::optional<InputWord>& pending_test() const { return pending_; }
  [[nodiscard]] const std::vector<OfferedResponse>& offered() const { return offered_; }
  // x_d of the last non-Single pair search.
  [[nodiscard]] const std::optional<InputWord>& next_test() const { return next_test_; }
  [[nodiscard]] const std::optional<Fsm>& result() const { return result_; }
  [[nodiscard]] std::size_t models_examined() const { return models_examined_; }

  // Applies the expert's response to the pending test. Throws
  // SessionStateError when no choice is pending and ExpertProtocolError when
  // the response is not offered.
  void choose(const OutputWord& response);

private:
  struct Queued {
    InputWord test;
    bool generated;
  };

  void check_deadline() const;
  void present_next();
  void search();

  Fsm original_;
  Fsm machine_;
  Formula phi_;
  SessionOptions options_;
  std::vector<InputWord> initial_tests_;
  std::deque<Queued> queue_;
  std::vector<InputWord> adequate_;
  std::vector<MiningStep> history_;
  SessionStatus status_ = SessionStatus::AwaitingChoice;
  std::optional<InputWord> pending_;
  bool pending_generated_ = false;
  std::optional<ResponsePartition> partition_;
  std::vector<OfferedResponse> offered_;
  std::optional<InputWord> next_test_;
  std::optional<std::pair<std::vector<std::string>, std::vector<std::string>>> last_witness_;
  std::optional<Fsm> result_;
  std::size_t models_examined_ = 0;
};

// Feeds the session's pending tests to `expert` until it stops waiting.
void drive(MiningSession& session, Expert& expert);

struct AdequacyReport {
  bool verdict = false;
  Fsm reduced_machine;
  Formula formula;
  std::optional<InputWord> next_test;
};

// Processes the given tests only; verdict true iff the remaining candidates
// are all equivalent. Throws InconclusiveSearch if the pair search hits its cap.
[[nodiscard]] AdequacyReport verify_test_adequacy_for_mining(const Fsm& machine, const Formula& phi,
                                                             const std::vector<InputWord>& tests,
                                                             Expert& expert,
                                                             SessionOptions options = {});

struct MiningResult {
  std::vector<InputWord> adequate_tests;
  Fsm mined;
};

// Adequacy checking with generated tests until one candidate class remains.
// Throws InconclusiveSearch if the pair search hits its cap.
[[nodiscard]] MiningResult precise_oracle_mining(const Fsm& machine,
                                                 const std::vector<InputWord>& tests,
                                                 Expert& expert, SessionOptions options = {});

// Generated steps whose chosen class fails to exclude a witness candidate:
// both witness models must satisfy φ before the step and one must violate the
// step's class formula. Zero for a correct run.
[[nodiscard]] std::size_t progress_violations(const MiningSession& session);

} // namespace oraclemine
