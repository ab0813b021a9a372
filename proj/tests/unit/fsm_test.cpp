#include <gtest/gtest.h>

#include "brute_force.hpp"
#include "running_example.hpp"
#include "oraclemine/errors.hpp"
#include "oraclemine/fsm.hpp"

using namespace oraclemine;
using namespace oraclemine::testing;

namespace {

std::vector<std::string> ids(const Fsm& m, const std::vector<TransitionIndex>& ts) {
  std::vector<std::string> out;
  for (auto t : ts) {
    out.push_back(m.transition(t).id);
  }
  return out;
}

} // namespace

TEST(Validate, RunningExampleHasSixUncertainTransitions) {
  Fsm m = running_imprecise();
  ValidationReport r = validate(m);
  EXPECT_TRUE(r.complete);
  EXPECT_TRUE(r.initially_connected);
  EXPECT_FALSE(r.deterministic);
  EXPECT_EQ(ids(m, r.uncertain_transitions),
            (std::vector<std::string>{"t5", "t6", "t7", "t8", "t9", "t10"}));
}

TEST(Validate, OneStateMachineIsDeterministic) {
  Fsm m = Fsm::build("one", {"1"}, "1", {"a", "b"}, {"0"},
                     {{"", "1", "a", "0", "1"}, {"", "1", "b", "0", "1"}});
  ValidationReport r = validate(m);
  EXPECT_TRUE(r.complete);
  EXPECT_TRUE(r.initially_connected);
  EXPECT_TRUE(r.deterministic);
  EXPECT_TRUE(r.uncertain_transitions.empty());
  EXPECT_EQ(m.transition(1).id, "t2");
}

TEST(Validate, MissingTransitionMakesMachineIncomplete) {
  auto specs = running_transitions();
  specs.erase(specs.begin());
  Fsm m = Fsm::build("M", {"1", "2", "3", "4"}, "1", {"a", "b"}, {"0", "1"}, specs);
  ValidationReport r = validate(m);
  EXPECT_FALSE(r.complete);
  ASSERT_EQ(r.missing.size(), 1u);
  EXPECT_EQ(r.missing[0], (std::pair<StateIndex, SymbolIndex>{0, 1}));
  EXPECT_THROW(require_complete(m), IncompleteMachine);
  EXPECT_THROW((void)candidate_count(m), IncompleteMachine);
}

TEST(Validate, UnreachableStateIsReported) {
  Fsm m = Fsm::build("u", {"1", "2"}, "1", {"a"}, {"0"},
                     {{"", "1", "a", "0", "1"}, {"", "2", "a", "0", "1"}});
  ValidationReport r = validate(m);
  EXPECT_FALSE(r.initially_connected);
  EXPECT_EQ(r.unreachable, std::vector<StateIndex>{1});
}

TEST(Structure, RejectsDanglingAndDuplicates) {
  EXPECT_THROW(Fsm::build("m", {"1"}, "2", {"a"}, {"0"}, {{"", "1", "a", "0", "1"}}),
               StructureError);
  EXPECT_THROW(Fsm::build("m", {"1"}, "1", {"a"}, {"0"}, {{"", "1", "a", "0", "9"}}),
               StructureError);
  EXPECT_THROW(Fsm::build("m", {"1"}, "1", {"a"}, {"0"},
                          {{"x", "1", "a", "0", "1"}, {"x", "1", "a", "0", "1"}}),
               StructureError);
  EXPECT_THROW(Fsm::build("m", {"1"}, "1", {"a"}, {"0", "1"},
                          {{"x", "1", "a", "0", "1"}, {"y", "1", "a", "0", "1"}}),
               StructureError);
  EXPECT_THROW(Fsm::build("m", {"1", "1"}, "1", {"a"}, {"0"}, {{"", "1", "a", "0", "1"}}),
               StructureError);
}

TEST(UncertaintyDegree, Examples) {
  EXPECT_EQ(uncertainty_degree(running_imprecise()), 2u);
  EXPECT_EQ(uncertainty_degree(running_oracle()), 1u);
}

TEST(CandidateCount, Examples) {
  EXPECT_EQ(candidate_count(running_imprecise()), 8);
  EXPECT_EQ(candidate_count(running_reduced()), 4);
  EXPECT_EQ(candidate_count(running_oracle()), 1);
}

TEST(CandidateCount, TwoToTheThirtyRendersWithThreeDigits) {
  BigInt v = boost::multiprecision::pow(BigInt(2), 30);
  EXPECT_EQ(format_scientific(v), "1.07E9");
  EXPECT_EQ(format_scientific(boost::multiprecision::pow(BigInt(3), 30)), "2.06E14");
  EXPECT_EQ(format_scientific(BigInt(8)), "8");
  EXPECT_EQ(format_scientific(BigInt(256)), "256");
}

TEST(Response, ProperAndInappropriateOracles) {
  Fsm s = running_oracle();
  EXPECT_EQ(format_outputs(s, response(s, parse_inputs(s, "babaab"))), "000100");
  EXPECT_TRUE(response(s, {}).empty());
  Fsm d = running_inappropriate();
  EXPECT_EQ(format_outputs(d, response(d, parse_inputs(d, "babaab"))), "000110");
  EXPECT_THROW((void)response(running_imprecise(), parse_inputs(s, "bab")), NotDeterministic);
  EXPECT_THROW((void)response(s, {7}), UnknownSymbol);
}

TEST(TraceOf, RunningExampleExecutions) {
  Fsm m = running_imprecise();
  auto exec = [&](std::initializer_list<const char*> ts) {
    Execution e;
    for (const char* id : ts) {
      e.transitions.push_back(*m.find_transition(id));
    }
    return e;
  };
  Trace t = trace_of(m, exec({"t1", "t3", "t5", "t9"}));
  EXPECT_EQ(format_inputs(m, t.inputs), "baba");
  EXPECT_EQ(format_outputs(m, t.outputs), "0001");
  t = trace_of(m, exec({"t2"}));
  EXPECT_EQ(format_inputs(m, t.inputs) + "/" + format_outputs(m, t.outputs), "a/0");
  t = trace_of(m, exec({"t1", "t3", "t6", "t8"}));
  EXPECT_EQ(format_outputs(m, t.outputs), "0000");
  EXPECT_THROW((void)trace_of(m, exec({"t1", "t5"})), InvalidExecution);
  EXPECT_THROW((void)trace_of(m, exec({"t3"})), InvalidExecution);
}

TEST(Words, MultiCharacterAlphabets) {
  std::vector<std::string> alphabet{"go", "stop"};
  EXPECT_EQ(parse_word(alphabet, "go,stop go"), (std::vector<SymbolIndex>{0, 1, 0}));
  EXPECT_EQ(format_word(alphabet, {1, 0}), "stop,go");
  EXPECT_THROW((void)parse_word(alphabet, "go,walk"), UnknownSymbol);
  EXPECT_THROW((void)parse_word({"a", "b"}, "abc"), UnknownSymbol);
}

TEST(Submachine, KeepsReachablePartInOrder) {
  Fsm m = running_imprecise();
  std::vector<bool> keep(m.num_transitions(), false);
  for (const char* id : {"t1", "t2", "t3", "t4", "t6", "t7", "t10", "t11"}) {
    keep[*m.find_transition(id)] = true;
  }
  Fsm d = m.submachine(keep);
  EXPECT_EQ(d.renamed("D"), running_inappropriate());
}

// --- properties ---------------------------------------------------------

TEST(FsmProperty, CandidateCountMatchesEnumeration) {
  Rng rng(11);
  for (int i = 0; i < 200; ++i) {
    Fsm m = random_small_nfsm(rng, 1 + rng.below(4), 1 + rng.below(2), 2, 2);
    EXPECT_EQ(candidate_count(m), BigInt(all_choices(m).size()));
    EXPECT_EQ(candidate_count(m) == 1, is_deterministic(m));
    std::size_t u = uncertainty_degree(m);
    for (std::size_t k = 0; k < m.num_slots(); ++k) {
      EXPECT_GE(m.slot(k).size(), 1u);
      EXPECT_LE(m.slot(k).size(), u);
    }
  }
}

TEST(FsmProperty, ResponsesArePrefixMonotone) {
  Rng rng(12);
  for (int i = 0; i < 100; ++i) {
    Fsm m = random_small_nfsm(rng, 1 + rng.below(5), 2, 2, 1);
    InputWord w;
    OutputWord previous;
    for (int len = 0; len < 8; ++len) {
      w.push_back(static_cast<SymbolIndex>(rng.below(2)));
      OutputWord y = response(m, w);
      ASSERT_EQ(y.size(), w.size());
      EXPECT_TRUE(std::equal(previous.begin(), previous.end(), y.begin()));
      EXPECT_EQ(y, walk(m, w));
      previous = y;
    }
  }
}
