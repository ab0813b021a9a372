#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "oraclemine/mining.hpp"

namespace oraclemine {

// Session transcripts are JSON lines: one "session" header (machine text,
// initial tests, options), one "step" record per processed test and an
// optional closing "result" record. Words use the machine's word syntax.

// Integral JSON number when exactly representable as a double, decimal string
// otherwise.
[[nodiscard]] nlohmann::json bigint_to_json(const BigInt& value);
[[nodiscard]] BigInt bigint_from_json(const nlohmann::json& value);

[[nodiscard]] nlohmann::json transcript_header(const MiningSession& session);
[[nodiscard]] nlohmann::json transcript_step(const MiningSession& session, const MiningStep& step);
[[nodiscard]] nlohmann::json transcript_result(const MiningSession& session);

// Header, all steps and, once the session stopped, the result record.
[[nodiscard]] std::string write_transcript(const MiningSession& session);

struct Transcript {
  Fsm machine;
  std::vector<InputWord> tests;
  SessionOptions options;
  std::vector<nlohmann::json> steps;
  std::optional<nlohmann::json> result;
};

// Throws ParseError with the offending line.
[[nodiscard]] Transcript read_transcript(std::string_view text);

// Rebuilds the session and feeds it the recorded choices. Each replayed step
// must reproduce the recorded test, offered responses and removed ids, and a
// recorded result must match; otherwise ReplayMismatch.
[[nodiscard]] MiningSession replay(const Transcript& transcript);

} // namespace oraclemine
