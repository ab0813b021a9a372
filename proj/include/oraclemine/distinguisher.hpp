#pragma once

#include <optional>
#include <utility>

#include "oraclemine/fsm.hpp"

namespace oraclemine {

// On-the-fly distinguishing product of two complete DFSMs over the same
// alphabets. A pair state steps to the sink (nullopt) when the component
// outputs differ.
class ProductMachine {
public:
  using PairState = std::pair<StateIndex, StateIndex>;

  // Throws AlphabetMismatch or NotDeterministic/IncompleteMachine.
  ProductMachine(const Fsm& first, const Fsm& second);

  [[nodiscard]] PairState initial() const { return {first_.initial(), second_.initial()}; }
  [[nodiscard]] std::optional<PairState> step(PairState p, SymbolIndex x) const;
  [[nodiscard]] std::size_t num_inputs() const { return first_.num_inputs(); }
  [[nodiscard]] std::size_t pair_count() const { return first_.num_states() * second_.num_states(); }
  [[nodiscard]] std::size_t index(PairState p) const {
    return static_cast<std::size_t>(p.first) * second_.num_states() + p.second;
  }

private:
  const Fsm& first_;
  const Fsm& second_;
};

// Shortest input sequence on which the two machines respond differently;
// BFS over the product with ties broken by declared input order. Absent iff
// the machines are equivalent.
[[nodiscard]] std::optional<InputWord> minimal_distinguishing_test(const Fsm& first,
                                                                   const Fsm& second);

[[nodiscard]] bool equivalent(const Fsm& first, const Fsm& second);

} // namespace oraclemine
