#pragma once

#include <cstddef>
#include <vector>

#include "oraclemine/fsm.hpp"

namespace oraclemine {

inline constexpr std::size_t kDefaultExecutionCap = 1'000'000;

// E_{x/y}: the deterministic executions of a machine producing `response`
// on the partition's test, with the number of candidates involved in them.
struct ExecutionClass {
  OutputWord response;
  std::vector<Execution> executions;
  BigInt subdomain_size;
};

// Y_{M,x} grouped into classes, ordered lexicographically by response
// (symbol order is declaration order).
struct ResponsePartition {
  InputWord test;
  std::vector<ExecutionClass> classes;

  [[nodiscard]] const ExecutionClass* find(const OutputWord& response) const;
  [[nodiscard]] std::vector<OutputWord> responses() const;
};

// All deterministic executions from the initial state whose input projection
// is `test`, in lexicographic order of transition indices. Throws
// ExecutionLimitExceeded when more than `cap` executions exist.
[[nodiscard]] std::vector<Execution> deterministic_executions(const Fsm& fsm, const InputWord& test,
                                                              std::size_t cap = kDefaultExecutionCap);

[[nodiscard]] ResponsePartition partition_responses(const Fsm& fsm, const InputWord& test,
                                                    std::size_t cap = kDefaultExecutionCap);

// Number of candidates of fsm involved in e (each owns e as its run on
// inp(e), so these counts add up across a class).
[[nodiscard]] BigInt involved_candidates(const Fsm& fsm, const Execution& e);

// Transitions eligible for the candidates involved in e: those used by e plus
// every transition whose slot e never visits. Sorted by index.
[[nodiscard]] std::vector<TransitionIndex> eligible_transitions(const Fsm& fsm, const Execution& e);

// M_{x/y}: keeps the union of eligible transitions over the class executions,
// restricted to the part reachable from the initial state.
[[nodiscard]] Fsm reduce(const Fsm& fsm, const InputWord& test, const OutputWord& response,
                         const ExecutionClass& cls);

// Convenience overload computing the class first. Throws ExpertProtocolError
// if `response` is not plausible.
[[nodiscard]] Fsm reduce(const Fsm& fsm, const InputWord& test, const OutputWord& response,
                         std::size_t cap = kDefaultExecutionCap);

} // namespace oraclemine
