#include "oraclemine/executions.hpp"

#include <algorithm>
#include <map>

#include "oraclemine/errors.hpp"

namespace oraclemine {

namespace {

constexpr TransitionIndex kUnchosen = static_cast<TransitionIndex>(-1);

class ExecutionEnumerator {
public:
  ExecutionEnumerator(const Fsm& fsm, const InputWord& test, std::size_t cap)
      : fsm_(fsm), test_(test), cap_(cap), choice_(fsm.num_slots(), kUnchosen) {
    path_.reserve(test.size());
  }

  std::vector<Execution> run() {
    extend(fsm_.initial(), 0);
    return std::move(found_);
  }

private:
  void extend(StateIndex s, std::size_t depth) {
    if (depth == test_.size()) {
      if (found_.size() == cap_) {
        throw ExecutionLimitExceeded("more than " + std::to_string(cap_) +
                                     " deterministic executions for test " +
                                     format_inputs(fsm_, test_));
      }
      found_.push_back(Execution{path_});
      return;
    }
    std::size_t slot = fsm_.slot_of(s, test_[depth]);
    TransitionIndex committed = choice_[slot];
    if (committed != kUnchosen) {
      step(committed, depth);
      return;
    }
    for (TransitionIndex t : fsm_.slot(slot)) {
      choice_[slot] = t;
      step(t, depth);
    }
    choice_[slot] = kUnchosen;
  }

  void step(TransitionIndex t, std::size_t depth) {
    path_.push_back(t);
    extend(fsm_.transition(t).tgt, depth + 1);
    path_.pop_back();
  }

  const Fsm& fsm_;
  const InputWord& test_;
  std::size_t cap_;
  std::vector<TransitionIndex> choice_;
  std::vector<TransitionIndex> path_;
  std::vector<Execution> found_;
};

void check_test(const Fsm& fsm, const InputWord& test) {
  if (test.empty()) {
    throw InvalidArgument("a test must contain at least one input");
  }
  for (SymbolIndex x : test) {
    if (x >= fsm.num_inputs()) {
      throw UnknownSymbol("input index " + std::to_string(x) + " outside the alphabet of " +
                          fsm.name());
    }
  }
}

} // namespace

const ExecutionClass* ResponsePartition::find(const OutputWord& response) const {
  for (const auto& c : classes) {
    if (c.response == response) {
      return &c;
    }
  }
  return nullptr;
}

std::vector<OutputWord> ResponsePartition::responses() const {
  std::vector<OutputWord> out;
  out.reserve(classes.size());
  for (const auto& c : classes) {
    out.push_back(c.response);
  }
  return out;
}

std::vector<Execution> deterministic_executions(const Fsm& fsm, const InputWord& test,
                                                std::size_t cap) {
  require_complete(fsm);
  check_test(fsm, test);
  return ExecutionEnumerator(fsm, test, cap).run();
}

BigInt involved_candidates(const Fsm& fsm, const Execution& e) {
  // Each slot visited by e is fixed; every other slot is free.
  std::vector<bool> fixed(fsm.num_slots(), false);
  for (TransitionIndex t : e.transitions) {
    fixed[fsm.slot_of(t)] = true;
  }
  BigInt count = 1;
  std::uint64_t chunk = 1;
  for (std::size_t k = 0; k < fsm.num_slots(); ++k) {
    if (fixed[k]) {
      continue;
    }
    std::uint64_t n = fsm.slot(k).size();
    if (chunk > (std::uint64_t{1} << 40)) {
      count *= chunk;
      chunk = 1;
    }
    chunk *= n;
  }
  count *= chunk;
  return count;
}

ResponsePartition partition_responses(const Fsm& fsm, const InputWord& test, std::size_t cap) {
  auto executions = deterministic_executions(fsm, test, cap);
  std::map<OutputWord, ExecutionClass> grouped;
  for (auto& e : executions) {
    OutputWord out;
    out.reserve(e.transitions.size());
    for (TransitionIndex t : e.transitions) {
      out.push_back(fsm.transition(t).output);
    }
    auto& cls = grouped[out];
    if (cls.executions.empty()) {
      cls.response = out;
      cls.subdomain_size = 0;
    }
    cls.subdomain_size += involved_candidates(fsm, e);
    cls.executions.push_back(std::move(e));
  }
  ResponsePartition p;
  p.test = test;
  for (auto& [_, cls] : grouped) {
    p.classes.push_back(std::move(cls));
  }
  return p;
}

std::vector<TransitionIndex> eligible_transitions(const Fsm& fsm, const Execution& e) {
  std::vector<bool> used(fsm.num_transitions(), false);
  std::vector<bool> visited(fsm.num_slots(), false);
  for (TransitionIndex t : e.transitions) {
    used[t] = true;
    visited[fsm.slot_of(t)] = true;
  }
  std::vector<TransitionIndex> out;
  for (TransitionIndex t = 0; t < fsm.num_transitions(); ++t) {
    if (used[t] || !visited[fsm.slot_of(t)]) {
      out.push_back(t);
    }
  }
  return out;
}

Fsm reduce(const Fsm& fsm, const InputWord& test, const OutputWord& response,
           const ExecutionClass& cls) {
  if (cls.executions.empty()) {
    throw ExpertProtocolError("response " + format_outputs(fsm, response) +
                              " is not plausible for test " + format_inputs(fsm, test));
  }
  if (cls.response != response) {
    throw InvalidArgument("execution class does not match the chosen response");
  }
  std::vector<bool> keep(fsm.num_transitions(), false);
  for (const auto& e : cls.executions) {
    for (TransitionIndex t : eligible_transitions(fsm, e)) {
      keep[t] = true;
    }
  }
  return fsm.submachine(keep);
}

Fsm reduce(const Fsm& fsm, const InputWord& test, const OutputWord& response, std::size_t cap) {
  auto partition = partition_responses(fsm, test, cap);
  const auto* cls = partition.find(response);
  if (cls == nullptr) {
    throw ExpertProtocolError("response " + format_outputs(fsm, response) +
                              " is not plausible for test " + format_inputs(fsm, test));
  }
  return reduce(fsm, test, response, *cls);
}

} // namespace oraclemine
