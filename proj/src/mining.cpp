#include "oraclemine/mining.hpp"

#include <algorithm>
#include <utility>

#include <spdlog/spdlog.h>

#include "oraclemine/errors.hpp"
#include "oraclemine/random.hpp"

namespace oraclemine {

namespace {

std::vector<std::string> chosen_ids(const Fsm& host, const CandidateModel& model) {
  std::vector<std::string> ids;
  ids.reserve(model.chosen.size());
  for (TransitionIndex t : model.chosen) {
    ids.push_back(host.transition(t).id);
  }
  return ids;
}

bool holds(const Formula& phi, const std::vector<std::string>& ids) {
  return phi.evaluate(
      [&](const std::string& id) { return std::find(ids.begin(), ids.end(), id) != ids.end(); });
}

// φ_machine is implied by the solver host; carrying it literally would turn
// unsatisfiable as soon as reduction prunes a state.
Formula strip_machine_blocks(const Fsm& machine, const Formula& phi) {
  Formula blocks = encode_machine(machine);
  if (phi == blocks) {
    return Formula::truth();
  }
  if (phi.kind() != Formula::Kind::And) {
    return phi;
  }
  const auto& kids = phi.children();
  std::size_t skip = 0;
  if (blocks.kind() == Formula::Kind::And && kids.size() >= blocks.children().size() &&
      std::equal(blocks.children().begin(), blocks.children().end(), kids.begin())) {
    skip = blocks.children().size();
  }
  std::vector<Formula> rest;
  for (std::size_t k = skip; k < kids.size(); ++k) {
    if (!(kids[k] == blocks)) {
      rest.push_back(kids[k]);
    }
  }
  return Formula::conjunction(std::move(rest));
}

} // namespace

const char* to_string(SessionStatus status) {
  switch (status) {
  case SessionStatus::AwaitingChoice:
    return "AwaitingChoice";
  case SessionStatus::NeedsGeneration:
    return "NeedsGeneration";
  case SessionStatus::Done:
    return "Done";
  case SessionStatus::Inconclusive:
    return "Inconclusive";
  }
  return "?";
}

EmulatedExpert::EmulatedExpert(Fsm dfsm) : dfsm_(std::move(dfsm)) {
  require_deterministic_complete(dfsm_);
}

OutputWord EmulatedExpert::choose(const Fsm& machine, const InputWord& test,
                                  std::span<const OfferedResponse> offered) {
  if (dfsm_.inputs() != machine.inputs() || dfsm_.outputs() != machine.outputs()) {
    throw AlphabetMismatch("emulated expert " + dfsm_.name() + " does not share the alphabets of " +
                           machine.name());
  }
  OutputWord y = response(dfsm_, test);
  for (const auto& o : offered) {
    if (o.response == y) {
      return y;
    }
  }
  throw ExpertProtocolError("response " + format_outputs(dfsm_, y) + " of " + dfsm_.name() +
                            " to " + format_inputs(dfsm_, test) + " is not plausible");
}

std::unique_ptr<Expert> emulated_expert(Fsm dfsm) {
  return std::make_unique<EmulatedExpert>(std::move(dfsm));
}

MiningSession::MiningSession(Fsm machine, std::vector<InputWord> tests, SessionOptions options,
                             std::optional<Formula> phi)
    : original_(machine), machine_(std::move(machine)), options_(options),
      initial_tests_(std::move(tests)) {
  ValidationReport report = validate(machine_);
  if (!report.complete) {
    require_complete(machine_);
  }
  if (!report.initially_connected) {
    throw InvalidArgument("machine " + machine_.name() + " is not initially connected");
  }
  for (const auto& t : initial_tests_) {
    if (t.empty()) {
      throw InvalidArgument("empty test");
    }
    for (SymbolIndex x : t) {
      if (x >= machine_.num_inputs()) {
        throw UnknownSymbol("input index " + std::to_string(x) + " outside the alphabet");
      }
    }
  }
  phi_ = phi ? strip_machine_blocks(machine_, *phi) : Formula::truth();

  adequate_ = initial_tests_;
  std::vector<InputWord> order = initial_tests_;
  if (options_.visit_seed) {
    Rng rng(*options_.visit_seed);
    rng.shuffle(order);
  }
  for (auto& t : order) {
    queue_.push_back({std::move(t), false});
  }

  if (queue_.empty()) {
    search();
  } else {
    present_next();
  }
}

Formula MiningSession::full_formula() const {
  return encode_machine(original_).conjoin(phi_);
}

void MiningSession::check_deadline() const {
  if (options_.deadline && std::chrono::steady_clock::now() > *options_.deadline) {
    throw BudgetExceeded("mining session ran past its time budget");
  }
}

void MiningSession::present_next() {
  check_deadline();
  Queued next = std::move(queue_.front());
  queue_.pop_front();
  partition_ = partition_responses(machine_, next.test, options_.execution_cap);
  offered_.clear();
  for (const auto& cls : partition_->classes) {
    offered_.push_back({cls.response, cls.subdomain_size, cls.executions.size()});
  }
  pending_ = std::move(next.test);
  pending_generated_ = next.generated;
  status_ = SessionStatus::AwaitingChoice;
  spdlog::debug("test {} offers {} responses", format_inputs(machine_, *pending_), offered_.size());
}

void MiningSession::search() {
  check_deadline();
  PairSearch r = find_nonequivalent_pair(machine_, phi_, options_.pair_cap);
  models_examined_ += r.models_examined;
  switch (r.kind) {
  case PairSearch::Kind::Single:
    status_ = SessionStatus::Done;
    result_ = std::move(*r.first);
    queue_.clear();
    next_test_.reset();
    spdlog::debug("single equivalence class left after {} models", r.models_examined);
    return;
  case PairSearch::Kind::Inconclusive:
    status_ = SessionStatus::Inconclusive;
    spdlog::warn("pair search inconclusive after {} models", r.models_examined);
    return;
  case PairSearch::Kind::Pair:
    break;
  }
  next_test_ = r.witness;
  last_witness_.emplace(chosen_ids(machine_, r.first_model), chosen_ids(machine_, r.second_model));
  spdlog::debug("candidates {} and {} differ on {}", r.first->name(), r.second->name(),
                format_inputs(machine_, r.witness));
  if (queue_.empty()) {
    if (!options_.generate_tests) {
      status_ = SessionStatus::NeedsGeneration;
      return;
    }
    adequate_.push_back(r.witness);
    queue_.push_back({r.witness, true});
  }
  present_next();
}

void MiningSession::choose(const OutputWord& response) {
  if (status_ != SessionStatus::AwaitingChoice) {
    throw SessionStateError(std::string("no choice pending (status ") + to_string(status_) + ")");
  }
  const ExecutionClass* cls = partition_->find(response);
  if (cls == nullptr) {
    throw ExpertProtocolError("response " + format_outputs(machine_, response) +
                              " is not offered for test " + format_inputs(machine_, *pending_));
  }
  MiningStep step;
  step.test = *pending_;
  step.offered = offered_;
  step.chosen = response;
  step.class_formula = encode_class(machine_, *cls);
  step.generated = pending_generated_;
  if (pending_generated_) {
    step.witness = last_witness_;
  }
  Fsm reduced = reduce(machine_, step.test, response, *cls);
  for (const auto& t : machine_.transitions()) {
    if (!reduced.find_transition(t.id)) {
      step.removed.push_back(t.id);
    }
  }
  phi_ = phi_.conjoin(step.class_formula);
  machine_ = std::move(reduced);
  history_.push_back(std::move(step));

  pending_.reset();
  partition_.reset();
  offered_.clear();
  search();
}

void drive(MiningSession& session, Expert& expert) {
  while (session.status() == SessionStatus::AwaitingChoice) {
    session.choose(expert.choose(session.machine(), *session.pending_test(), session.offered()));
  }
}

AdequacyReport verify_test_adequacy_for_mining(const Fsm& machine, const Formula& phi,
                                               const std::vector<InputWord>& tests, Expert& expert,
                                               SessionOptions options) {
  options.generate_tests = false;
  MiningSession session(machine, tests, options, phi);
  drive(session, expert);
  if (session.status() == SessionStatus::Inconclusive) {
    throw InconclusiveSearch("could not decide whether the remaining candidates are equivalent");
  }
  bool verdict = session.status() == SessionStatus::Done;
  return AdequacyReport{verdict, session.machine(), session.formula(),
                        verdict ? std::nullopt : session.next_test()};
}

MiningResult precise_oracle_mining(const Fsm& machine, const std::vector<InputWord>& tests,
                                   Expert& expert, SessionOptions options) {
  options.generate_tests = true;
  MiningSession session(machine, tests, options);
  drive(session, expert);
  if (session.status() == SessionStatus::Inconclusive) {
    throw InconclusiveSearch("could not decide whether the remaining candidates are equivalent");
  }
  return MiningResult{session.adequate_tests(), *session.result()};
}

std::size_t progress_violations(const MiningSession& session) {
  std::size_t violations = 0;
  Formula before = Formula::truth();
  for (const auto& step : session.history()) {
    if (step.generated) {
      const auto& w = step.witness;
      bool ok = w && holds(before, w->first) && holds(before, w->second) &&
                (!holds(step.class_formula, w->first) || !holds(step.class_formula, w->second));
      violations += ok ? 0 : 1;
    }
    before = before.conjoin(step.class_formula);
  }
  return violations;
}

} // namespace oraclemine
