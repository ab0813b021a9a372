#pragma once

#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "oraclemine/fsm.hpp"

namespace oraclemine {

// Line-oriented machine document, '#' starts a comment:
//
//   fsm M
//   states 1 2 3 4
//   initial 1
//   inputs a b
//   outputs 0 1
//   trans t1: 1 b/0 2
//
// The id prefix of a trans line is optional ("t<k>" by position). Headers come
// once each and before any trans line. Errors are ParseError with the line.
// Completeness is not checked here.
[[nodiscard]] Fsm parse_fsm(std::string_view text);

// Inverse of parse_fsm: parse_fsm(render_fsm(m)) == m.
[[nodiscard]] std::string render_fsm(const Fsm& fsm);

// Graphviz document; uncertain transitions are dashed, the initial state bold.
[[nodiscard]] std::string render_dot(const Fsm& fsm);

// Structured form with the field names of the text format:
// {name, states, initial, inputs, outputs, transitions: [{id, src, input, output, tgt}]}.
[[nodiscard]] nlohmann::json fsm_to_json(const Fsm& fsm);
// Throws ParseError (line 0) on a malformed object, StructureError on a
// structurally invalid machine.
[[nodiscard]] Fsm fsm_from_json(const nlohmann::json& object);

[[nodiscard]] Fsm load_fsm_file(const std::string& path);

} // namespace oraclemine
