#include <gtest/gtest.h>

#include "oraclemine/random.hpp"
#include "oraclemine/sat_solver.hpp"

using namespace oraclemine;
using oraclemine::sat::Clause;
using oraclemine::sat::Lit;
using oraclemine::sat::Result;
using oraclemine::sat::Solver;

namespace {

bool satisfied(const std::vector<Clause>& cnf, std::uint32_t bits) {
  for (const auto& c : cnf) {
    bool any = false;
    for (Lit l : c) {
      bool v = ((bits >> l.var()) & 1) != 0;
      any = any || (v != l.negated());
    }
    if (!any) {
      return false;
    }
  }
  return true;
}

std::vector<Clause> random_cnf(Rng& rng, int vars, int clauses) {
  std::vector<Clause> cnf;
  for (int k = 0; k < clauses; ++k) {
    Clause c;
    int width = 1 + static_cast<int>(rng.below(3));
    for (int j = 0; j < width; ++j) {
      auto v = static_cast<int>(rng.below(static_cast<std::uint64_t>(vars)));
      c.push_back(rng.below(2) == 0 ? Lit::pos(v) : Lit::neg(v));
    }
    cnf.push_back(c);
  }
  return cnf;
}

} // namespace

TEST(Solver, TrivialCases) {
  Solver s;
  EXPECT_EQ(s.solve(), Result::Sat);
  auto a = s.new_var();
  EXPECT_TRUE(s.add_clause({Lit::pos(a)}));
  EXPECT_EQ(s.solve(), Result::Sat);
  EXPECT_TRUE(s.model_value(a));
  EXPECT_FALSE(s.add_clause({Lit::neg(a)}));
  EXPECT_EQ(s.solve(), Result::Unsat);
}

TEST(Solver, PreferredPhaseDecidesFreeVariables) {
  Solver s;
  auto a = s.new_var(true);
  auto b = s.new_var(false);
  ASSERT_EQ(s.solve(), Result::Sat);
  EXPECT_TRUE(s.model_value(a));
  EXPECT_FALSE(s.model_value(b));
}

TEST(Solver, AssumptionsDoNotPersist) {
  Solver s;
  auto a = s.new_var();
  auto b = s.new_var();
  s.add_clause({Lit::pos(a), Lit::pos(b)});
  std::vector<Lit> both{Lit::neg(a), Lit::neg(b)};
  EXPECT_EQ(s.solve(both), Result::Unsat);
  EXPECT_EQ(s.solve(), Result::Sat);
  std::vector<Lit> one{Lit::neg(a)};
  ASSERT_EQ(s.solve(one), Result::Sat);
  EXPECT_TRUE(s.model_value(b));
}

TEST(SolverProperty, AgreesWithTruthTables) {
  Rng rng(41);
  for (int i = 0; i < 400; ++i) {
    int vars = 1 + static_cast<int>(rng.below(10));
    auto cnf = random_cnf(rng, vars, 1 + static_cast<int>(rng.below(40)));
    bool expected = false;
    for (std::uint32_t bits = 0; bits < (1u << vars) && !expected; ++bits) {
      expected = satisfied(cnf, bits);
    }
    Solver s;
    for (int v = 0; v < vars; ++v) {
      s.new_var(rng.below(2) == 0);
    }
    for (const auto& c : cnf) {
      s.add_clause(c);
    }
    Result r = s.solve();
    ASSERT_EQ(r == Result::Sat, expected) << "instance " << i;
    if (r == Result::Sat) {
      std::uint32_t bits = 0;
      for (int v = 0; v < vars; ++v) {
        bits |= s.model_value(v) ? (1u << v) : 0u;
      }
      EXPECT_TRUE(satisfied(cnf, bits));
    }
  }
}

TEST(SolverProperty, IncrementalBlockingEnumeratesAllModels) {
  Rng rng(42);
  for (int i = 0; i < 150; ++i) {
    int vars = 1 + static_cast<int>(rng.below(8));
    auto cnf = random_cnf(rng, vars, static_cast<int>(rng.below(12)));
    std::size_t expected = 0;
    for (std::uint32_t bits = 0; bits < (1u << vars); ++bits) {
      expected += satisfied(cnf, bits) ? 1 : 0;
    }
    Solver s;
    for (int v = 0; v < vars; ++v) {
      s.new_var();
    }
    for (const auto& c : cnf) {
      s.add_clause(c);
    }
    std::size_t found = 0;
    while (s.solve() == Result::Sat) {
      ++found;
      Clause block;
      for (int v = 0; v < vars; ++v) {
        block.push_back(s.model_value(v) ? Lit::neg(v) : Lit::pos(v));
      }
      if (!s.add_clause(block)) {
        break;
      }
    }
    EXPECT_EQ(found, expected);
  }
}

TEST(SolverProperty, AssumptionsMatchTruthTables) {
  Rng rng(43);
  for (int i = 0; i < 200; ++i) {
    int vars = 2 + static_cast<int>(rng.below(8));
    auto cnf = random_cnf(rng, vars, 1 + static_cast<int>(rng.below(20)));
    Solver s;
    for (int v = 0; v < vars; ++v) {
      s.new_var();
    }
    for (const auto& c : cnf) {
      s.add_clause(c);
    }
    for (int round = 0; round < 4; ++round) {
      std::vector<Lit> assume;
      for (int k = 0; k < 2; ++k) {
        auto v = static_cast<int>(rng.below(static_cast<std::uint64_t>(vars)));
        assume.push_back(rng.below(2) == 0 ? Lit::pos(v) : Lit::neg(v));
      }
      auto with = cnf;
      for (Lit l : assume) {
        with.push_back({l});
      }
      bool expected = false;
      for (std::uint32_t bits = 0; bits < (1u << vars) && !expected; ++bits) {
        expected = satisfied(with, bits);
      }
      EXPECT_EQ(s.solve(assume) == Result::Sat, expected);
    }
  }
}
