#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace oraclemine::sat {

using Var = int;

// Literal code 2*var + sign; sign 1 means negated.
struct Lit {
  int code = 0;

  [[nodiscard]] static Lit pos(Var v) { return Lit{2 * v}; }
  [[nodiscard]] static Lit neg(Var v) { return Lit{2 * v + 1}; }
  [[nodiscard]] Var var() const { return code >> 1; }
  [[nodiscard]] bool negated() const { return (code & 1) != 0; }
  [[nodiscard]] Lit operator~() const { return Lit{code ^ 1}; }

  friend bool operator==(Lit, Lit) = default;
};

using Clause = std::vector<Lit>;

enum class Result { Sat, Unsat };

// Incremental CDCL solver: two watched literals, first-UIP learning,
// non-chronological backjumping, VSIDS ordering seeded by variable index, and
// assumption literals. No restarts and no randomness, so the model found is a
// pure function of the clause sequence and assumptions.
class Solver {
public:
  Var new_var(bool preferred_phase = false);
  [[nodiscard]] int num_vars() const { return static_cast<int>(assigns_.size()); }

  // Returns false once the clause set is unsatisfiable at the root.
  bool add_clause(Clause clause);

  Result solve(std::span<const Lit> assumptions = {});

  // Valid after a Sat result.
  [[nodiscard]] bool model_value(Var v) const { return model_[v] != 0; }
  [[nodiscard]] const std::vector<std::int8_t>& model() const { return model_; }

  [[nodiscard]] std::uint64_t conflicts() const { return conflicts_; }

private:
  static constexpr std::int8_t kUndef = 2;

  [[nodiscard]] std::int8_t value(Lit l) const {
    std::int8_t a = assigns_[l.var()];
    return a == kUndef ? kUndef : static_cast<std::int8_t>(a ^ (l.negated() ? 1 : 0));
  }
  [[nodiscard]] int level() const { return static_cast<int>(trail_lim_.size()); }

  void enqueue(Lit l, int reason);
  int propagate();
  void analyze(int conflict, Clause& learnt, int& backjump);
  void backtrack(int lvl);
  void attach(int clause);
  Lit pick_branch();

  void bump(Var v);
  void heap_insert(Var v);
  void heap_up(int pos);
  void heap_down(int pos);
  Var heap_pop();

  std::vector<Clause> clauses_;
  std::vector<std::vector<int>> watches_;
  std::vector<std::int8_t> assigns_;
  std::vector<std::int8_t> phase_;
  std::vector<int> level_;
  std::vector<int> reason_;
  std::vector<Lit> trail_;
  std::vector<int> trail_lim_;
  std::size_t qhead_ = 0;
  std::vector<double> activity_;
  double bump_amount_ = 1.0;
  std::vector<Var> heap_;
  std::vector<int> heap_pos_;
  std::vector<char> seen_;
  std::vector<std::int8_t> model_;
  std::uint64_t conflicts_ = 0;
  bool ok_ = true;
};

} // namespace oraclemine::sat
