#include "oraclemine/fsm_io.hpp"

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "oraclemine/errors.hpp"

namespace oraclemine {

namespace {

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
      ++i;
    }
    std::size_t j = i;
    while (j < line.size() && !std::isspace(static_cast<unsigned char>(line[j]))) {
      ++j;
    }
    if (j > i) {
      out.emplace_back(line.substr(i, j - i));
    }
    i = j;
  }
  return out;
}

struct Header {
  std::vector<std::string> values;
  std::size_t line = 0;
};

struct TransLine {
  TransitionSpec spec;
  std::size_t line;
};

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') {
      out += '\\';
    }
    out += c;
  }
  return out + "\"";
}

} // namespace

Fsm parse_fsm(std::string_view text) {
  std::map<std::string, Header> headers;
  std::vector<TransLine> trans;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) {
      end = text.size();
    }
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    auto tokens = tokenize(line);
    if (tokens.empty()) {
      continue;
    }
    const std::string& key = tokens.front();
    if (key == "trans") {
      if (headers.size() < 5) {
        throw ParseError(line_no, "trans before the fsm/states/initial/inputs/outputs headers");
      }
      std::size_t k = 1;
      TransitionSpec spec;
      if (tokens.size() > 1 && tokens[1].size() > 1 && tokens[1].back() == ':') {
        spec.id = tokens[1].substr(0, tokens[1].size() - 1);
        k = 2;
      }
      if (tokens.size() != k + 3) {
        throw ParseError(line_no, "expected 'trans [ID:] SRC IN/OUT TGT'");
      }
      const std::string& io = tokens[k + 1];
      auto slash = io.find('/');
      if (slash == std::string::npos || slash == 0 || slash + 1 == io.size() ||
          io.find('/', slash + 1) != std::string::npos) {
        throw ParseError(line_no, "expected IN/OUT, got '" + io + "'");
      }
      spec.src = tokens[k];
      spec.input = io.substr(0, slash);
      spec.output = io.substr(slash + 1);
      spec.tgt = tokens[k + 2];
      trans.push_back({std::move(spec), line_no});
      continue;
    }
    if (key != "fsm" && key != "states" && key != "initial" && key != "inputs" &&
        key != "outputs") {
      throw ParseError(line_no, "unknown keyword '" + key + "'");
    }
    if (headers.contains(key)) {
      throw ParseError(line_no, "duplicate '" + key + "' line");
    }
    std::vector<std::string> values(tokens.begin() + 1, tokens.end());
    if (values.empty()) {
      throw ParseError(line_no, "'" + key + "' needs a value");
    }
    if ((key == "fsm" || key == "initial") && values.size() != 1) {
      throw ParseError(line_no, "'" + key + "' takes exactly one value");
    }
    headers[key] = {std::move(values), line_no};
  }
  for (const char* key : {"fsm", "states", "initial", "inputs", "outputs"}) {
    if (!headers.contains(key)) {
      throw ParseError(line_no, std::string("missing '") + key + "' line");
    }
  }

  const auto& states = headers["states"].values;
  const auto& inputs = headers["inputs"].values;
  const auto& outputs = headers["outputs"].values;
  auto has = [](const std::vector<std::string>& v, const std::string& x) {
    return std::find(v.begin(), v.end(), x) != v.end();
  };
  if (!has(states, headers["initial"].values.front())) {
    throw ParseError(headers["initial"].line,
                     "unknown state '" + headers["initial"].values.front() + "'");
  }
  std::set<std::string> ids;
  std::set<std::tuple<std::string, std::string, std::string, std::string>> quads;
  std::vector<TransitionSpec> specs;
  for (std::size_t k = 0; k < trans.size(); ++k) {
    auto& [spec, line] = trans[k];
    if (spec.id.empty()) {
      spec.id = "t" + std::to_string(k + 1);
    }
    for (const auto* s : {&spec.src, &spec.tgt}) {
      if (!has(states, *s)) {
        throw ParseError(line, "unknown state '" + *s + "'");
      }
    }
    if (!has(inputs, spec.input)) {
      throw ParseError(line, "unknown input '" + spec.input + "'");
    }
    if (!has(outputs, spec.output)) {
      throw ParseError(line, "unknown output '" + spec.output + "'");
    }
    if (!ids.insert(spec.id).second) {
      throw ParseError(line, "duplicate transition id '" + spec.id + "'");
    }
    if (!quads.emplace(spec.src, spec.input, spec.output, spec.tgt).second) {
      throw ParseError(line, "transition " + spec.id + " duplicates an earlier transition");
    }
    specs.push_back(spec);
  }
  try {
    return Fsm::build(headers["fsm"].values.front(), states, headers["initial"].values.front(),
                      inputs, outputs, specs);
  } catch (const StructureError& e) {
    throw ParseError(headers["fsm"].line, e.what());
  }
}

std::string render_fsm(const Fsm& fsm) {
  std::ostringstream out;
  auto list = [&](const char* key, const std::vector<std::string>& values) {
    out << key;
    for (const auto& v : values) {
      out << ' ' << v;
    }
    out << '\n';
  };
  out << "fsm " << fsm.name() << '\n';
  list("states", fsm.states());
  out << "initial " << fsm.states()[fsm.initial()] << '\n';
  list("inputs", fsm.inputs());
  list("outputs", fsm.outputs());
  for (const auto& t : fsm.transitions()) {
    out << "trans " << t.id << ": " << fsm.states()[t.src] << ' ' << fsm.inputs()[t.input] << '/'
        << fsm.outputs()[t.output] << ' ' << fsm.states()[t.tgt] << '\n';
  }
  return out.str();
}

std::string render_dot(const Fsm& fsm) {
  std::ostringstream out;
  out << "digraph " << quoted(fsm.name()) << " {\n";
  out << "  rankdir=LR;\n";
  out << "  node [shape=circle];\n";
  for (StateIndex s = 0; s < fsm.num_states(); ++s) {
    out << "  " << quoted(fsm.states()[s]);
    if (s == fsm.initial()) {
      out << " [style=bold]";
    }
    out << ";\n";
  }
  for (TransitionIndex k = 0; k < fsm.num_transitions(); ++k) {
    const auto& t = fsm.transition(k);
    out << "  " << quoted(fsm.states()[t.src]) << " -> " << quoted(fsm.states()[t.tgt])
        << " [label=" << quoted(t.id + ": " + fsm.inputs()[t.input] + "/" + fsm.outputs()[t.output])
        << ", id=" << quoted(t.id);
    if (fsm.is_uncertain(k)) {
      out << ", style=dashed";
    }
    out << "];\n";
  }
  out << "}\n";
  return out.str();
}

nlohmann::json fsm_to_json(const Fsm& fsm) {
  nlohmann::json transitions = nlohmann::json::array();
  for (const auto& t : fsm.transitions()) {
    transitions.push_back({{"id", t.id},
                           {"src", fsm.states()[t.src]},
                           {"input", fsm.inputs()[t.input]},
                           {"output", fsm.outputs()[t.output]},
                           {"tgt", fsm.states()[t.tgt]}});
  }
  return {{"name", fsm.name()},
          {"states", fsm.states()},
          {"initial", fsm.states()[fsm.initial()]},
          {"inputs", fsm.inputs()},
          {"outputs", fsm.outputs()},
          {"transitions", std::move(transitions)}};
}

Fsm fsm_from_json(const nlohmann::json& object) {
  try {
    std::vector<TransitionSpec> specs;
    for (const auto& t : object.at("transitions")) {
      specs.push_back({t.value("id", std::string{}), t.at("src").get<std::string>(),
                       t.at("input").get<std::string>(), t.at("output").get<std::string>(),
                       t.at("tgt").get<std::string>()});
    }
    return Fsm::build(object.value("name", std::string("M")),
                      object.at("states").get<std::vector<std::string>>(),
                      object.at("initial").get<std::string>(),
                      object.at("inputs").get<std::vector<std::string>>(),
                      object.at("outputs").get<std::vector<std::string>>(), specs);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(0, std::string("malformed machine object: ") + e.what());
  }
}

Fsm load_fsm_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw InvalidArgument("cannot open " + path);
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_fsm(buf.str());
}

} // namespace oraclemine
