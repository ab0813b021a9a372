// Command-line front end. Exit codes: 0 success, 1 domain error, 2 usage error.

#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "oraclemine/encoding.hpp"
#include "oraclemine/errors.hpp"
#include "oraclemine/executions.hpp"
#include "oraclemine/fsm_io.hpp"
#include "oraclemine/harness.hpp"
#include "oraclemine/mining.hpp"
#include "oraclemine/service.hpp"
#include "oraclemine/transcript.hpp"

namespace om = oraclemine;

namespace {

constexpr int kDomainError = 1;
constexpr int kUsageError = 2;

void configure_logging() {
  auto logger = spdlog::stderr_color_mt("oraclemine");
  spdlog::set_default_logger(logger);
  spdlog::set_level(spdlog::level::warn);
  if (const char* level = std::getenv("ORACLEMINE_LOG")) {
    spdlog::set_level(spdlog::level::from_str(level));
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw om::InvalidArgument("cannot read " + path);
  }
  std::stringstream text;
  text << in.rdbuf();
  return text.str();
}

std::vector<om::InputWord> parse_tests(const om::Fsm& m, const std::vector<std::string>& words) {
  std::vector<om::InputWord> out;
  for (const auto& w : words) {
    out.push_back(om::parse_inputs(m, w));
  }
  return out;
}

// Prompts on the terminal; accepts a listed response or its 1-based index.
class TerminalExpert : public om::Expert {
public:
  om::OutputWord choose(const om::Fsm& machine, const om::InputWord& test,
                        std::span<const om::OfferedResponse> offered) override {
    std::cout << "test " << om::format_inputs(machine, test) << '\n';
    for (std::size_t k = 0; k < offered.size(); ++k) {
      std::cout << "  [" << k + 1 << "] " << om::format_outputs(machine, offered[k].response)
                << "  candidates " << offered[k].subdomain_size << '\n';
    }
    for (;;) {
      std::cout << "expected response> " << std::flush;
      std::string line;
      if (!std::getline(std::cin, line)) {
        throw om::ExpertProtocolError("input closed before a response was chosen");
      }
      line.erase(0, line.find_first_not_of(" \t"));
      line.erase(line.find_last_not_of(" \t\r") + 1);
      for (std::size_t k = 0; k < offered.size(); ++k) {
        if (line == std::to_string(k + 1) ||
            line == om::format_outputs(machine, offered[k].response)) {
          return offered[k].response;
        }
      }
      std::cout << "not one of the offered responses\n";
    }
  }
};

int cmd_validate(const std::string& file) {
  om::Fsm m = om::load_fsm_file(file);
  om::ValidationReport r = om::validate(m);
  std::cout << "machine " << m.name() << ": " << m.num_states() << " states, "
            << m.num_inputs() << " inputs, " << m.num_outputs() << " outputs, "
            << m.num_transitions() << " transitions\n";
  std::cout << "complete: " << (r.complete ? "yes" : "no") << '\n';
  for (auto [s, x] : r.missing) {
    std::cout << "  missing " << m.states()[s] << " on " << m.inputs()[x] << '\n';
  }
  std::cout << "initially connected: " << (r.initially_connected ? "yes" : "no") << '\n';
  for (auto s : r.unreachable) {
    std::cout << "  unreachable " << m.states()[s] << '\n';
  }
  std::cout << "deterministic: " << (r.deterministic ? "yes" : "no") << '\n';
  if (r.complete) {
    std::cout << "uncertainty degree: " << om::uncertainty_degree(m) << '\n';
    std::cout << "candidates: " << om::candidate_count(m) << " ("
              << om::format_scientific(om::candidate_count(m)) << ")\n";
  }
  return r.complete && r.initially_connected ? 0 : kDomainError;
}

int cmd_responses(const std::string& file, const std::string& test) {
  om::Fsm m = om::load_fsm_file(file);
  om::require_complete(m);
  om::ResponsePartition p = om::partition_responses(m, om::parse_inputs(m, test));
  for (const auto& cls : p.classes) {
    std::cout << om::format_outputs(m, cls.response) << "  " << cls.subdomain_size << "  ";
    for (std::size_t k = 0; k < cls.executions.size(); ++k) {
      std::cout << (k ? ", " : "") << om::format_execution(m, cls.executions[k]);
    }
    std::cout << '\n';
  }
  return 0;
}

struct MineArgs {
  std::string file;
  std::string expert_file;
  bool interactive = false;
  std::vector<std::string> tests;
  std::string transcript;
  std::optional<std::uint64_t> seed;
  std::size_t pair_cap = om::kDefaultPairCap;
};

int cmd_mine(const MineArgs& a) {
  om::Fsm m = om::load_fsm_file(a.file);
  om::SessionOptions options;
  options.pair_cap = a.pair_cap;
  options.visit_seed = a.seed;
  om::MiningSession session(m, parse_tests(m, a.tests), options);

  std::unique_ptr<om::Expert> expert;
  if (a.interactive) {
    expert = std::make_unique<TerminalExpert>();
  } else {
    expert = om::emulated_expert(om::load_fsm_file(a.expert_file));
  }
  om::drive(session, *expert);
  if (!a.transcript.empty()) {
    std::ofstream out(a.transcript);
    out << om::write_transcript(session);
  }
  if (session.status() != om::SessionStatus::Done) {
    throw om::InconclusiveSearch(std::string("mining stopped: ") + om::to_string(session.status()));
  }
  std::cout << "# adequate tests (" << session.adequate_tests().size() << ")\n";
  for (const auto& t : session.adequate_tests()) {
    std::cout << om::format_inputs(m, t) << '\n';
  }
  std::cout << "# mined oracle\n" << om::render_fsm(*session.result());
  return 0;
}

struct ExperimentArgs {
  std::vector<std::size_t> states{10};
  std::vector<std::size_t> degrees{2};
  std::size_t inputs = 3;
  std::size_t outputs = 2;
  std::size_t reps = 30;
  std::uint64_t seed = 1;
  long budget_ms = 60'000;
  std::size_t jobs = 1;
  std::size_t pair_cap = om::kDefaultPairCap;
};

int cmd_experiment(const ExperimentArgs& a) {
  // Rows are labelled by the parameter that varies; "NxU" when both do.
  // Time monotonicity is checked along the degrees of each state count.
  std::size_t violations = 0;
  bool header = false;
  for (std::size_t n : a.states) {
    std::vector<om::ExperimentRow> series;
    for (std::size_t u : a.degrees) {
      om::ExperimentConfig c;
      c.num_states = n;
      c.num_inputs = a.inputs;
      c.num_outputs = a.outputs;
      c.degree = u;
      c.repetitions = a.reps;
      c.seed = a.seed;
      c.time_budget = std::chrono::milliseconds(a.budget_ms);
      c.jobs = a.jobs;
      c.pair_cap = a.pair_cap;
      om::check_config(c);
      std::cout << om::csv_config_echo(c) << '\n';
      if (!header) {
        std::cout << om::csv_header() << '\n';
        header = true;
      }
      std::string label = a.states.size() == 1    ? std::to_string(u)
                          : a.degrees.size() == 1 ? std::to_string(n)
                                                  : std::to_string(n) + "x" + std::to_string(u);
      series.push_back(om::run_experiment(c));
      std::cout << om::csv_row(label, series.back()) << std::endl;
    }
    violations += om::monotonic_violations(series);
  }
  if (violations > 0) {
    std::cout << "# median time decreases between " << violations << " adjacent rows\n";
  }
  return 0;
}

om::HttpServer* running_server = nullptr;

int cmd_serve(int port, const std::string& host, const std::string& static_dir,
              const std::string& transcript_dir) {
  om::ServiceOptions options;
  if (!transcript_dir.empty()) {
    options.transcript_dir = transcript_dir;
  }
  om::Service service(options);
  service.recover();
  std::optional<std::filesystem::path> mount;
  if (!static_dir.empty()) {
    mount = static_dir;
  }
  om::HttpServer server(service, mount);
  running_server = &server;
  auto on_signal = [](int) {
    if (running_server != nullptr) {
      running_server->stop();
    }
  };
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  std::cerr << "listening on " << host << ':' << port << std::endl;
  bool ok = server.listen(host, port);
  running_server = nullptr;
  if (!ok) {
    throw om::InvalidArgument("cannot listen on " + host + ":" + std::to_string(port));
  }
  return 0;
}

int cmd_replay(const std::string& file) {
  om::MiningSession s = om::replay(om::read_transcript(read_file(file)));
  std::cout << "status " << om::to_string(s.status()) << ", " << s.history().size()
            << " steps replayed\n";
  if (s.result()) {
    std::cout << om::render_fsm(*s.result());
  }
  return 0;
}

int cmd_cnf(const std::string& file, const std::vector<std::string>& pairs,
            const std::string& map_file) {
  om::Fsm m = om::load_fsm_file(file);
  om::require_complete(m);
  om::Formula phi = om::encode_machine(m);
  for (const auto& pair : pairs) {
    auto slash = pair.find('/');
    if (slash == std::string::npos) {
      throw om::InvalidArgument("expected TEST/RESPONSE, got " + pair);
    }
    om::InputWord x = om::parse_inputs(m, pair.substr(0, slash));
    om::OutputWord y = om::parse_outputs(m, pair.substr(slash + 1));
    om::ResponsePartition partition = om::partition_responses(m, x);
    const om::ExecutionClass* cls = partition.find(y);
    if (cls == nullptr) {
      throw om::ExpertProtocolError("response " + pair.substr(slash + 1) +
                                    " is not plausible for " + pair.substr(0, slash));
    }
    phi = phi.conjoin(om::encode_class(m, *cls));
  }
  om::Cnf cnf = om::to_cnf(m, phi);
  om::write_dimacs(std::cout, cnf);
  if (!map_file.empty()) {
    std::ofstream out(map_file);
    om::write_var_map(out, cnf);
  }
  return 0;
}

} // namespace

int main(int argc, char** argv) {
  configure_logging();
  CLI::App app{"Mine a precise test oracle from an imprecise one"};
  app.require_subcommand(1);

  std::string file;
  auto* validate = app.add_subcommand("validate", "Check completeness and connectivity");
  validate->add_option("file", file, "machine document")->required()->check(CLI::ExistingFile);

  std::string test;
  auto* responses = app.add_subcommand("responses", "Plausible responses to a test");
  responses->add_option("file", file)->required()->check(CLI::ExistingFile);
  responses->add_option("--test", test, "input word")->required();

  MineArgs mine_args;
  auto* mine = app.add_subcommand("mine", "Mine a precise oracle with an expert");
  mine->add_option("file", mine_args.file)->required()->check(CLI::ExistingFile);
  auto* expert_opt = mine->add_option("--expert", mine_args.expert_file,
                                      "DFSM answering as the expert")
                         ->check(CLI::ExistingFile);
  auto* interactive = mine->add_flag("--interactive", mine_args.interactive,
                                     "ask on the terminal");
  expert_opt->excludes(interactive);
  mine->add_option("--tests", mine_args.tests, "initial tests");
  mine->add_option("--transcript", mine_args.transcript, "write the session transcript here");
  mine->add_option("--seed", mine_args.seed, "shuffle the initial tests with this seed");
  mine->add_option("--pair-cap", mine_args.pair_cap, "models examined per pair search")
      ->check(CLI::PositiveNumber);

  ExperimentArgs exp_args;
  auto* experiment = app.add_subcommand("experiment", "Random plant experiments, CSV output");
  experiment->add_option("--states", exp_args.states, "state counts")->check(CLI::PositiveNumber);
  experiment->add_option("--inputs", exp_args.inputs)->check(CLI::PositiveNumber);
  experiment->add_option("--outputs", exp_args.outputs)->check(CLI::PositiveNumber);
  experiment->add_option("--degree", exp_args.degrees, "uncertainty degrees");
  experiment->add_option("--reps", exp_args.reps)->check(CLI::PositiveNumber);
  experiment->add_option("--seed", exp_args.seed);
  experiment->add_option("--budget-ms", exp_args.budget_ms)->check(CLI::PositiveNumber);
  experiment->add_option("--jobs", exp_args.jobs)->check(CLI::PositiveNumber);
  experiment->add_option("--pair-cap", exp_args.pair_cap)->check(CLI::PositiveNumber);

  int port = 8080;
  std::string host = "127.0.0.1";
  std::string static_dir;
  std::string transcript_dir;
  auto* serve = app.add_subcommand("serve", "HTTP session API");
  serve->add_option("--port", port)->check(CLI::Range(1, 65535));
  serve->add_option("--host", host);
  serve->add_option("--static-dir", static_dir, "files served under /")
      ->check(CLI::ExistingDirectory);
  serve->add_option("--transcript-dir", transcript_dir, "one transcript per session");

  auto* dot = app.add_subcommand("dot", "Graphviz rendering");
  dot->add_option("file", file)->required()->check(CLI::ExistingFile);

  std::string transcript;
  auto* replay = app.add_subcommand("replay", "Replay a session transcript");
  replay->add_option("transcript", transcript)->required()->check(CLI::ExistingFile);

  std::vector<std::string> pairs;
  std::string map_file;
  auto* cnf = app.add_subcommand("cnf", "DIMACS of the machine formula and class constraints");
  cnf->add_option("file", file)->required()->check(CLI::ExistingFile);
  cnf->add_option("--pair", pairs, "TEST/RESPONSE constraint");
  cnf->add_option("--var-map", map_file, "write the variable map here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }
  if (mine->parsed() && !mine_args.interactive && mine_args.expert_file.empty()) {
    std::cerr << "mine needs --expert FILE or --interactive\n";
    return kUsageError;
  }

  try {
    if (validate->parsed()) {
      return cmd_validate(file);
    }
    if (responses->parsed()) {
      return cmd_responses(file, test);
    }
    if (mine->parsed()) {
      return cmd_mine(mine_args);
    }
    if (experiment->parsed()) {
      return cmd_experiment(exp_args);
    }
    if (serve->parsed()) {
      return cmd_serve(port, host, static_dir, transcript_dir);
    }
    if (dot->parsed()) {
      std::cout << om::render_dot(om::load_fsm_file(file));
      return 0;
    }
    if (replay->parsed()) {
      return cmd_replay(transcript);
    }
    if (cnf->parsed()) {
      return cmd_cnf(file, pairs, map_file);
    }
  } catch (const om::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kDomainError;
  }
  return kUsageError;
}
