#pragma once

#include <functional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace oraclemine {

// Propositional formula over transition-id variables. Immutable value type;
// constructors collapse singleton conjunctions/disjunctions but otherwise keep
// the structure they are given, so printed formulas mirror how they were built.
class Formula {
public:
  enum class Kind { True, False, Var, Not, And, Or };

  Formula() : kind_(Kind::True) {}

  static Formula truth() { return Formula(Kind::True); }
  static Formula falsity() { return Formula(Kind::False); }
  static Formula var(std::string name);
  static Formula negation(Formula f);
  static Formula conjunction(std::vector<Formula> children);
  static Formula disjunction(std::vector<Formula> children);

  // this ∧ rhs, appending to an existing top-level conjunction.
  [[nodiscard]] Formula conjoin(Formula rhs) const;

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] const std::string& name() const { return name_; }
  [[nodiscard]] const std::vector<Formula>& children() const { return children_; }

  [[nodiscard]] bool evaluate(const std::function<bool(const std::string&)>& value) const;
  [[nodiscard]] std::set<std::string> variables() const;

  // Infix rendering with ¬ ∧ ∨; ⊤ and ⊥ for the constants.
  [[nodiscard]] std::string to_string() const;

  friend bool operator==(const Formula&, const Formula&) = default;

private:
  explicit Formula(Kind k) : kind_(k) {}

  void collect(std::set<std::string>& out) const;
  void render(std::string& out, bool nested) const;

  Kind kind_;
  std::string name_;
  std::vector<Formula> children_;
};

} // namespace oraclemine
