#include <algorithm>
#include <fstream>

#include <gtest/gtest.h>

#include "brute_force.hpp"
#include "running_example.hpp"
#include "oraclemine/errors.hpp"
#include "oraclemine/fsm_io.hpp"
#include "oraclemine/harness.hpp"

using namespace oraclemine;
using namespace oraclemine::testing;

namespace {

std::size_t parse_error_line(std::string_view text) {
  try {
    (void)parse_fsm(text);
  } catch (const ParseError& e) {
    return e.line();
  }
  return 0;
}

std::size_t count_lines_with(const std::string& text, const std::string& needle) {
  std::size_t n = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string::npos) {
      end = text.size();
    }
    n += text.substr(start, end - start).find(needle) != std::string::npos ? 1 : 0;
    start = end + 1;
  }
  return n;
}

} // namespace

TEST(ParseFsm, RunningExampleText) {
  Fsm m = parse_fsm(running_text());
  EXPECT_EQ(m, running_imprecise());
  EXPECT_EQ(m.num_states(), 4u);
  EXPECT_EQ(m.num_transitions(), 11u);
  EXPECT_EQ(render_fsm(m), running_text());
}

TEST(ParseFsm, DataFilesMatchTheRunningExample) {
  EXPECT_EQ(load_fsm_file(std::string(ORACLEMINE_DATA_DIR) + "/running_example.fsm"), running_imprecise());
  EXPECT_EQ(load_fsm_file(std::string(ORACLEMINE_DATA_DIR) + "/running_oracle.fsm").renamed("S"), running_oracle());
}

TEST(ParseFsm, IdsAreOptional) {
  Fsm m = parse_fsm("fsm X\nstates p q\ninitial p\ninputs a\noutputs 0 1\n"
                    "trans p a/0 q\ntrans q a/1 p\n");
  ASSERT_EQ(m.num_transitions(), 2u);
  EXPECT_EQ(m.transition(0).id, "t1");
  EXPECT_EQ(m.transition(1).id, "t2");
}

TEST(ParseFsm, ErrorsCarryTheLine) {
  const std::string head = "fsm X\nstates 1 2\ninitial 1\ninputs a\noutputs 0\n";
  EXPECT_EQ(parse_error_line(head + "trans t1: 1 a/0 9\n"), 6u);
  EXPECT_EQ(parse_error_line(head + "trans t1: 1 z/0 2\n"), 6u);
  EXPECT_EQ(parse_error_line(head + "trans t1: 1 a/7 2\n"), 6u);
  EXPECT_EQ(parse_error_line(head + "trans t1: 1 a/0 2\ntrans t1: 2 a/0 1\n"), 7u);
  EXPECT_EQ(parse_error_line(head + "trans t1: 1 a/0 2\ntrans t2: 1 a/0 2\n"), 7u);
  EXPECT_EQ(parse_error_line(head + "trans t1: 1 a0 2\n"), 6u);
  EXPECT_EQ(parse_error_line(head + "bogus line\n"), 6u);
  EXPECT_EQ(parse_error_line("fsm X\nstates 1\nstates 2\n"), 3u);
  EXPECT_THROW((void)parse_fsm("fsm X\nstates 1\ninputs a\noutputs 0\n"), ParseError);
  EXPECT_THROW((void)parse_fsm(""), ParseError);
}

TEST(ParseFsm, UnknownTargetOfAnUncertainTransition) {
  std::string text = std::string(running_text()) + "trans t12: 3 b/0 9\n";
  EXPECT_THROW((void)parse_fsm(text), ParseError);
}

TEST(RenderDot, RunningOracle) {
  std::string dot = render_dot(running_oracle());
  EXPECT_EQ(count_lines_with(dot, "->"), 8u);
  EXPECT_EQ(count_lines_with(dot, "style=dashed"), 0u);
  EXPECT_EQ(count_lines_with(dot, "style=bold"), 1u);
  EXPECT_NE(dot.find("t9: a/1"), std::string::npos);
}

TEST(RenderDot, UncertainTransitionsAreDashed) {
  std::string dot = render_dot(running_imprecise());
  EXPECT_EQ(count_lines_with(dot, "->"), 11u);
  EXPECT_EQ(count_lines_with(dot, "style=dashed"), 6u);
}

TEST(FsmJson, RejectsMalformedObjects) {
  nlohmann::json j = fsm_to_json(running_imprecise());
  EXPECT_EQ(j["transitions"].size(), 11u);
  EXPECT_EQ(j["transitions"][4]["id"], "t5");
  j["transitions"][0].erase("tgt");
  EXPECT_THROW((void)fsm_from_json(j), ParseError);
  EXPECT_THROW((void)fsm_from_json(nlohmann::json::array()), ParseError);
}

TEST(FsmIoProperty, TextAndJsonRoundTrip) {
  std::vector<Fsm> machines{running_imprecise(), running_reduced(), running_oracle(), running_inappropriate()};
  Rng rng(61);
  for (int i = 0; i < 100; ++i) {
    machines.push_back(random_small_nfsm(rng, 1 + rng.below(6), 1 + rng.below(3),
                                         1 + rng.below(3), 1 + rng.below(3)));
  }
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    machines.push_back(inject_uncertainty(random_dfsm(5, 3, 2, seed), 2, seed));
  }
  for (const auto& m : machines) {
    EXPECT_EQ(parse_fsm(render_fsm(m)), m);
    EXPECT_EQ(fsm_from_json(fsm_to_json(m)), m);
    EXPECT_EQ(fsm_from_json(nlohmann::json::parse(fsm_to_json(m).dump())), m);
  }
}
