#include "oraclemine/transcript.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "oraclemine/errors.hpp"
#include "oraclemine/fsm_io.hpp"

namespace oraclemine {

namespace {

using nlohmann::json;

json offered_to_json(const Fsm& machine, const std::vector<OfferedResponse>& offered) {
  json out = json::array();
  for (const auto& o : offered) {
    out.push_back({{"response", format_outputs(machine, o.response)},
                   {"subdomain_size", bigint_to_json(o.subdomain_size)},
                   {"execution_count", o.execution_count}});
  }
  return out;
}

json tests_to_json(const Fsm& machine, const std::vector<InputWord>& tests) {
  json out = json::array();
  for (const auto& t : tests) {
    out.push_back(format_inputs(machine, t));
  }
  return out;
}

void expect(bool ok, std::size_t step, const std::string& what) {
  if (!ok) {
    throw ReplayMismatch("step " + std::to_string(step + 1) + ": " + what + " differs from the record");
  }
}

} // namespace

json bigint_to_json(const BigInt& value) {
  constexpr std::int64_t kExact = std::int64_t{1} << 53;
  if (value >= -kExact && value <= kExact) {
    return value.convert_to<std::int64_t>();
  }
  return value.str();
}

BigInt bigint_from_json(const json& value) {
  if (value.is_number_integer()) {
    return BigInt(value.get<std::int64_t>());
  }
  if (value.is_string()) {
    const auto& digits = value.get_ref<const std::string&>();
    bool ok = !digits.empty() && std::all_of(digits.begin(), digits.end(), [](char c) {
      return std::isdigit(static_cast<unsigned char>(c)) != 0;
    });
    if (ok) {
      return BigInt(digits);
    }
  }
  throw ParseError(0, "expected a non-negative integer, got " + value.dump());
}

json transcript_header(const MiningSession& session) {
  const auto& o = session.options();
  json options = {{"pair_cap", o.pair_cap},
                  {"execution_cap", o.execution_cap},
                  {"generate_tests", o.generate_tests},
                  {"visit_seed", o.visit_seed ? json(*o.visit_seed) : json(nullptr)}};
  return {{"kind", "session"},
          {"machine", render_fsm(session.original())},
          {"tests", tests_to_json(session.original(), session.initial_tests())},
          {"options", std::move(options)}};
}

json transcript_step(const MiningSession& session, const MiningStep& step) {
  const Fsm& m = session.original();
  return {{"kind", "step"},
          {"test", format_inputs(m, step.test)},
          {"offered", offered_to_json(m, step.offered)},
          {"chosen", format_outputs(m, step.chosen)},
          {"removed", step.removed},
          {"generated", step.generated}};
}

json transcript_result(const MiningSession& session) {
  const Fsm& m = session.original();
  return {{"kind", "result"},
          {"status", to_string(session.status())},
          {"adequate_tests", tests_to_json(m, session.adequate_tests())},
          {"mined", session.result() ? json(render_fsm(*session.result())) : json(nullptr)}};
}

std::string write_transcript(const MiningSession& session) {
  std::ostringstream out;
  out << transcript_header(session).dump() << '\n';
  for (const auto& step : session.history()) {
    out << transcript_step(session, step).dump() << '\n';
  }
  if (session.status() != SessionStatus::AwaitingChoice) {
    out << transcript_result(session).dump() << '\n';
  }
  return out.str();
}

Transcript read_transcript(std::string_view text) {
  std::optional<Transcript> t;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    json record;
    try {
      record = json::parse(line);
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    }
    std::string kind = record.value("kind", std::string{});
    try {
      if (kind == "session") {
        if (t) {
          throw ParseError(line_no, "second session header");
        }
        Fsm machine = parse_fsm(record.at("machine").get<std::string>());
        std::vector<InputWord> tests;
        for (const auto& w : record.at("tests")) {
          tests.push_back(parse_inputs(machine, w.get<std::string>()));
        }
        SessionOptions options;
        const auto& o = record.at("options");
        options.pair_cap = o.value("pair_cap", kDefaultPairCap);
        options.execution_cap = o.value("execution_cap", kDefaultExecutionCap);
        options.generate_tests = o.value("generate_tests", true);
        if (o.contains("visit_seed") && !o["visit_seed"].is_null()) {
          options.visit_seed = o["visit_seed"].get<std::uint64_t>();
        }
        t.emplace(Transcript{std::move(machine), std::move(tests), options, {}, std::nullopt});
      } else if (kind == "step" || kind == "result") {
        if (!t) {
          throw ParseError(line_no, "record before the session header");
        }
        if (t->result) {
          throw ParseError(line_no, "record after the result");
        }
        if (kind == "step") {
          t->steps.push_back(std::move(record));
        } else {
          t->result = std::move(record);
        }
      } else {
        throw ParseError(line_no, "unknown record kind '" + kind + "'");
      }
    } catch (const json::exception& e) {
      throw ParseError(line_no, e.what());
    } catch (const ParseError&) {
      throw;
    } catch (const Error& e) {
      throw ParseError(line_no, e.what());
    }
  }
  if (!t) {
    throw ParseError(line_no, "missing session header");
  }
  return std::move(*t);
}

MiningSession replay(const Transcript& transcript) {
  MiningSession session(transcript.machine, transcript.tests, transcript.options);
  const Fsm& m = transcript.machine;
  for (std::size_t k = 0; k < transcript.steps.size(); ++k) {
    const json& step = transcript.steps[k];
    expect(session.status() == SessionStatus::AwaitingChoice, k, "session status");
    expect(format_inputs(m, *session.pending_test()) == step.at("test").get<std::string>(), k,
           "test");
    expect(offered_to_json(m, session.offered()) == step.at("offered"), k, "offered list");
    session.choose(parse_outputs(m, step.at("chosen").get<std::string>()));
    expect(session.history().back().removed ==
               step.at("removed").get<std::vector<std::string>>(),
           k, "removed transitions");
  }
  if (transcript.result) {
    expect(transcript_result(session) == *transcript.result, transcript.steps.size(), "result");
  }
  return session;
}

} // namespace oraclemine
