#include "oraclemine/distinguisher.hpp"

#include <algorithm>
#include <vector>

#include "oraclemine/errors.hpp"

namespace oraclemine {

ProductMachine::ProductMachine(const Fsm& first, const Fsm& second)
    : first_(first), second_(second) {
  if (first.inputs() != second.inputs() || first.outputs() != second.outputs()) {
    throw AlphabetMismatch("machines " + first.name() + " and " + second.name() +
                           " have different alphabets");
  }
  require_deterministic_complete(first);
  require_deterministic_complete(second);
}

std::optional<ProductMachine::PairState> ProductMachine::step(PairState p, SymbolIndex x) const {
  const auto& t1 = first_.transition(first_.slot(p.first, x).front());
  const auto& t2 = second_.transition(second_.slot(p.second, x).front());
  if (t1.output != t2.output) {
    return std::nullopt;
  }
  return PairState{t1.tgt, t2.tgt};
}

std::optional<InputWord> minimal_distinguishing_test(const Fsm& first, const Fsm& second) {
  ProductMachine product(first, second);
  struct Visit {
    std::size_t parent;
    SymbolIndex input;
  };
  constexpr std::size_t kNone = static_cast<std::size_t>(-1);
  std::vector<bool> seen(product.pair_count(), false);
  std::vector<ProductMachine::PairState> order{product.initial()};
  std::vector<Visit> visits{{kNone, 0}};
  seen[product.index(product.initial())] = true;

  auto path_to = [&](std::size_t node) {
    InputWord word;
    for (std::size_t k = node; visits[k].parent != kNone; k = visits[k].parent) {
      word.push_back(visits[k].input);
    }
    std::reverse(word.begin(), word.end());
    return word;
  };

  for (std::size_t head = 0; head < order.size(); ++head) {
    for (SymbolIndex x = 0; x < product.num_inputs(); ++x) {
      auto next = product.step(order[head], x);
      if (!next) {
        InputWord word = path_to(head);
        word.push_back(x);
        return word;
      }
      std::size_t id = product.index(*next);
      if (!seen[id]) {
        seen[id] = true;
        order.push_back(*next);
        visits.push_back({head, x});
      }
    }
  }
  return std::nullopt;
}

bool equivalent(const Fsm& first, const Fsm& second) {
  return !minimal_distinguishing_test(first, second).has_value();
}

} // namespace oraclemine
