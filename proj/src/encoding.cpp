#include "oraclemine/encoding.hpp"

#include <array>
#include <ostream>
#include <unordered_map>

#include "oraclemine/distinguisher.hpp"
#include "oraclemine/errors.hpp"

namespace oraclemine {

namespace {

// Clause sets: {} is ⊤, {{}} is ⊥.
using ClauseSet = std::vector<sat::Clause>;

// Disjunctions whose distributed form has at most this many clauses are
// expanded; larger ones get one definition variable per non-unit disjunct.
constexpr std::size_t kDistributeLimit = 16;

class Clausifier {
public:
  Clausifier(Cnf& cnf, const std::unordered_map<std::string, int>& vars)
      : cnf_(cnf), vars_(vars) {}

  ClauseSet run(const Formula& f, bool negated) {
    using K = Formula::Kind;
    switch (f.kind()) {
    case K::True:
      return negated ? falsity() : ClauseSet{};
    case K::False:
      return negated ? ClauseSet{} : falsity();
    case K::Var: {
      auto it = vars_.find(f.name());
      if (it == vars_.end()) {
        return negated ? ClauseSet{} : falsity();
      }
      sat::Lit l = negated ? sat::Lit::neg(it->second) : sat::Lit::pos(it->second);
      return ClauseSet{sat::Clause{l}};
    }
    case K::Not:
      return run(f.children().front(), !negated);
    case K::And:
      return negated ? disjoin(f.children(), true) : conjoin(f.children(), false);
    case K::Or:
      return negated ? conjoin(f.children(), true) : disjoin(f.children(), false);
    }
    return {};
  }

private:
  static ClauseSet falsity() { return ClauseSet{sat::Clause{}}; }
  static bool is_false(const ClauseSet& s) { return s.size() == 1 && s.front().empty(); }

  ClauseSet conjoin(const std::vector<Formula>& children, bool negated) {
    ClauseSet out;
    for (const auto& c : children) {
      ClauseSet part = run(c, negated);
      if (is_false(part)) {
        return falsity();
      }
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  }

  ClauseSet disjoin(const std::vector<Formula>& children, bool negated) {
    std::vector<ClauseSet> parts;
    std::size_t product = 1;
    for (const auto& c : children) {
      ClauseSet part = run(c, negated);
      if (part.empty()) {
        return {};
      }
      if (is_false(part)) {
        continue;
      }
      product = std::min<std::size_t>(product * part.size(), kDistributeLimit + 1);
      parts.push_back(std::move(part));
    }
    if (parts.empty()) {
      return falsity();
    }
    if (product <= kDistributeLimit) {
      ClauseSet acc{sat::Clause{}};
      for (const auto& part : parts) {
        ClauseSet next;
        for (const auto& a : acc) {
          for (const auto& b : part) {
            sat::Clause merged = a;
            merged.insert(merged.end(), b.begin(), b.end());
            next.push_back(std::move(merged));
          }
        }
        acc = std::move(next);
      }
      return acc;
    }
    ClauseSet out;
    sat::Clause top;
    for (auto& part : parts) {
      if (part.size() == 1) {
        top.insert(top.end(), part.front().begin(), part.front().end());
        continue;
      }
      int aux = static_cast<int>(cnf_.var_names.size());
      cnf_.var_names.push_back("_aux" + std::to_string(aux));
      for (auto& clause : part) {
        clause.push_back(sat::Lit::neg(aux));
        out.push_back(std::move(clause));
      }
      top.push_back(sat::Lit::pos(aux));
    }
    out.push_back(std::move(top));
    return out;
  }

  Cnf& cnf_;
  const std::unordered_map<std::string, int>& vars_;
};

std::vector<std::size_t> reachable_slots(const Fsm& host, const CandidateModel& model) {
  std::vector<bool> seen(host.num_states(), false);
  std::vector<StateIndex> order{host.initial()};
  seen[host.initial()] = true;
  std::vector<std::size_t> slots;
  for (std::size_t head = 0; head < order.size(); ++head) {
    for (SymbolIndex x = 0; x < host.num_inputs(); ++x) {
      std::size_t slot = host.slot_of(order[head], x);
      slots.push_back(slot);
      StateIndex q = host.transition(model.chosen[slot]).tgt;
      if (!seen[q]) {
        seen[q] = true;
        order.push_back(q);
      }
    }
  }
  return slots;
}

} // namespace

Formula exactly_one(const std::vector<std::string>& vars) {
  if (vars.empty()) {
    throw InvalidArgument("exactly_one needs at least one variable");
  }
  if (vars.size() == 1) {
    return Formula::var(vars.front());
  }
  std::vector<Formula> blocks;
  for (std::size_t k = 0; k + 1 < vars.size(); ++k) {
    std::vector<Formula> rest;
    for (std::size_t j = k + 1; j < vars.size(); ++j) {
      rest.push_back(Formula::negation(Formula::var(vars[j])));
    }
    blocks.push_back(Formula::disjunction(
        {Formula::negation(Formula::var(vars[k])), Formula::conjunction(std::move(rest))}));
  }
  std::vector<Formula> any;
  for (const auto& v : vars) {
    any.push_back(Formula::var(v));
  }
  blocks.push_back(Formula::disjunction(std::move(any)));
  return Formula::conjunction(std::move(blocks));
}

Formula encode_machine(const Fsm& fsm) {
  require_complete(fsm);
  std::vector<Formula> blocks;
  for (std::size_t k = 0; k < fsm.num_slots(); ++k) {
    std::vector<std::string> ids;
    for (TransitionIndex t : fsm.slot(k)) {
      ids.push_back(fsm.transition(t).id);
    }
    blocks.push_back(exactly_one(ids));
  }
  return Formula::conjunction(std::move(blocks));
}

Formula encode_execution(const Fsm& fsm, const Execution& e) {
  check_execution(fsm, e);
  if (!is_deterministic_execution(fsm, e)) {
    throw InvalidExecution("execution " + format_execution(fsm, e) + " is not deterministic");
  }
  std::vector<Formula> lits;
  std::vector<bool> added(fsm.num_transitions(), false);
  for (TransitionIndex t : e.transitions) {
    if (fsm.is_uncertain(t) && !added[t]) {
      added[t] = true;
      lits.push_back(Formula::var(fsm.transition(t).id));
    }
  }
  return Formula::conjunction(std::move(lits));
}

Formula encode_class(const Fsm& fsm, const ExecutionClass& cls) {
  if (cls.executions.empty()) {
    throw InvalidArgument("empty execution class");
  }
  std::vector<Formula> terms;
  for (const auto& e : cls.executions) {
    Formula term = encode_execution(fsm, e);
    if (term.kind() == Formula::Kind::True) {
      return term;
    }
    terms.push_back(std::move(term));
  }
  return Formula::disjunction(std::move(terms));
}

bool satisfies(const Fsm& host, const CandidateModel& model, const Formula& phi) {
  return phi.evaluate([&](const std::string& id) {
    auto t = host.find_transition(id);
    return t && model.uses(host, *t);
  });
}

Fsm extract_dfsm(const Fsm& host, const CandidateModel& model) {
  if (model.chosen.size() != host.num_slots()) {
    throw InvalidArgument("candidate model does not cover every slot");
  }
  std::vector<bool> keep(host.num_transitions(), false);
  for (std::size_t k = 0; k < model.chosen.size(); ++k) {
    TransitionIndex t = model.chosen[k];
    if (t >= host.num_transitions() || host.slot_of(t) != k) {
      throw InvalidArgument("candidate model picks a transition outside its slot");
    }
    keep[t] = true;
  }
  return host.submachine(keep);
}

Cnf to_cnf(const Fsm& host, const Formula& phi) {
  require_complete(host);
  Cnf cnf;
  std::unordered_map<std::string, int> vars;
  for (TransitionIndex t = 0; t < host.num_transitions(); ++t) {
    cnf.var_names.push_back(host.transition(t).id);
    vars.emplace(host.transition(t).id, static_cast<int>(t));
  }
  for (std::size_t k = 0; k < host.num_slots(); ++k) {
    auto ts = host.slot(k);
    sat::Clause at_least;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      at_least.push_back(sat::Lit::pos(static_cast<int>(ts[i])));
      for (std::size_t j = i + 1; j < ts.size(); ++j) {
        cnf.clauses.push_back(
            {sat::Lit::neg(static_cast<int>(ts[i])), sat::Lit::neg(static_cast<int>(ts[j]))});
      }
    }
    cnf.clauses.push_back(std::move(at_least));
  }
  Clausifier clausifier(cnf, vars);
  ClauseSet body = clausifier.run(phi, false);
  cnf.clauses.insert(cnf.clauses.end(), body.begin(), body.end());
  return cnf;
}

void write_dimacs(std::ostream& out, const Cnf& cnf) {
  out << "p cnf " << cnf.var_names.size() << ' ' << cnf.clauses.size() << '\n';
  for (const auto& clause : cnf.clauses) {
    for (sat::Lit l : clause) {
      out << (l.negated() ? -(l.var() + 1) : l.var() + 1) << ' ';
    }
    out << "0\n";
  }
}

void write_var_map(std::ostream& out, const Cnf& cnf) {
  for (std::size_t i = 0; i < cnf.var_names.size(); ++i) {
    out << i + 1 << ' ' << cnf.var_names[i] << '\n';
  }
}

CandidateSpace::CandidateSpace(const Fsm& host, const Formula& phi) : host_(host) {
  Cnf cnf = to_cnf(host_, phi);
  for (std::size_t v = 0; v < cnf.var_names.size(); ++v) {
    (void)solver_.new_var(v < host_.num_transitions());
  }
  for (auto& clause : cnf.clauses) {
    if (!solver_.add_clause(std::move(clause))) {
      break;
    }
  }
}

std::optional<CandidateModel> CandidateSpace::find(std::span<const sat::Lit> assumptions) {
  if (solver_.solve(assumptions) != sat::Result::Sat) {
    return std::nullopt;
  }
  return decode();
}

CandidateModel CandidateSpace::decode() const {
  CandidateModel m;
  m.chosen.resize(host_.num_slots());
  for (std::size_t k = 0; k < host_.num_slots(); ++k) {
    for (TransitionIndex t : host_.slot(k)) {
      if (solver_.model_value(static_cast<sat::Var>(t))) {
        m.chosen[k] = t;
        break;
      }
    }
  }
  return m;
}

sat::Lit CandidateSpace::new_selector() {
  return sat::Lit::pos(solver_.new_var(false));
}

void CandidateSpace::retire(sat::Lit selector) {
  (void)solver_.add_clause({~selector});
}

void CandidateSpace::block(const CandidateModel& model, const std::vector<std::size_t>& slots,
                           std::optional<sat::Lit> selector) {
  sat::Clause clause;
  if (selector) {
    clause.push_back(~*selector);
  }
  for (std::size_t k : slots) {
    if (host_.slot(k).size() > 1) {
      clause.push_back(~lit(model.chosen[k]));
    }
  }
  (void)solver_.add_clause(std::move(clause));
}

void CandidateSpace::block(const CandidateModel& model, std::optional<sat::Lit> selector) {
  std::vector<std::size_t> all(host_.num_slots());
  for (std::size_t k = 0; k < all.size(); ++k) {
    all[k] = k;
  }
  block(model, all, selector);
}

std::optional<CandidateModel> solve(const Fsm& fsm, const Formula& phi,
                                    const std::vector<CandidateModel>& blocked) {
  CandidateSpace space(fsm, phi);
  for (const auto& m : blocked) {
    space.block(m);
  }
  return space.find();
}

std::vector<CandidateModel> enumerate_models(const Fsm& fsm, const Formula& phi,
                                             std::size_t limit) {
  CandidateSpace space(fsm, phi);
  std::vector<CandidateModel> out;
  while (out.size() < limit) {
    auto m = space.find();
    if (!m) {
      break;
    }
    space.block(*m);
    out.push_back(std::move(*m));
  }
  return out;
}

ModelCount count_models(const Fsm& fsm, const Formula& phi, std::size_t cap) {
  CandidateSpace space(fsm, phi);
  ModelCount result;
  std::size_t n = 0;
  while (true) {
    auto m = space.find();
    if (!m) {
      break;
    }
    if (n == cap) {
      result.exact = false;
      break;
    }
    ++n;
    space.block(*m);
  }
  result.count = n;
  return result;
}

PairSearch find_nonequivalent_pair(const Fsm& fsm, const Formula& phi, std::size_t cap) {
  CandidateSpace space(fsm, phi);
  auto first = space.find();
  if (!first) {
    throw UnsatisfiableFormula("the candidate formula has no model");
  }
  PairSearch r;
  r.first_model = *first;
  r.first = extract_dfsm(fsm, *first);
  r.models_examined = 1;

  for (std::size_t slot : reachable_slots(fsm, *first)) {
    if (fsm.slot(slot).size() < 2) {
      continue;
    }
    std::array<sat::Lit, 1> differ{~space.lit(first->chosen[slot])};
    for (;;) {
      if (r.models_examined >= cap) {
        r.kind = PairSearch::Kind::Inconclusive;
        return r;
      }
      auto other = space.find(differ);
      if (!other) {
        break;
      }
      ++r.models_examined;
      Fsm candidate = extract_dfsm(fsm, *other);
      if (auto witness = minimal_distinguishing_test(*r.first, candidate)) {
        r.kind = PairSearch::Kind::Pair;
        r.second_model = *other;
        r.second = std::move(candidate);
        r.witness = std::move(*witness);
        return r;
      }
      // Every model sharing this reachable part is equivalent to S1 as well.
      space.block(*other, reachable_slots(fsm, *other));
    }
  }
  r.kind = PairSearch::Kind::Single;
  return r;
}

} // namespace oraclemine
