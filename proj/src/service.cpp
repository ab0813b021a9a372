#include "oraclemine/service.hpp"

#include <chrono>
#include <fstream>
#include <iomanip>
#include <random>
#include <sstream>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "oraclemine/errors.hpp"
#include "oraclemine/fsm_io.hpp"
#include "oraclemine/random.hpp"
#include "oraclemine/transcript.hpp"

namespace oraclemine {

using json = nlohmann::json;

namespace {

Reply error_reply(int status, const std::string& kind, const std::string& message) {
  return {status, json{{"error", kind}, {"message", message}}};
}

Fsm machine_from_body(const json& fsm) {
  if (fsm.is_string()) {
    return parse_fsm(fsm.get<std::string>());
  }
  if (fsm.is_object()) {
    return fsm_from_json(fsm);
  }
  throw ParseError(0, "field fsm must be a machine document or object");
}

template <typename T>
std::optional<T> optional_field(const json& body, const char* name) {
  if (!body.contains(name) || body[name].is_null()) {
    return std::nullopt;
  }
  return body[name].get<T>();
}

} // namespace

Service::Service(ServiceOptions options)
    : options_(std::move(options)), id_state_(std::random_device{}()) {
  id_state_ = (id_state_ << 32) ^ static_cast<std::uint64_t>(
                                      std::chrono::steady_clock::now().time_since_epoch().count());
  if (options_.transcript_dir) {
    std::filesystem::create_directories(*options_.transcript_dir);
  }
}

std::string Service::fresh_id() {
  std::lock_guard lock(id_mutex_);
  std::ostringstream out;
  id_state_ = splitmix64(id_state_);
  out << std::hex << std::setw(16) << std::setfill('0') << id_state_;
  return out.str();
}

std::shared_ptr<Service::Resource> Service::find(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  auto it = sessions_.find(id);
  return it == sessions_.end() ? nullptr : it->second;
}

std::size_t Service::session_count() const {
  std::shared_lock lock(sessions_mutex_);
  return sessions_.size();
}

void Service::append(const Resource& resource, const json& record) const {
  if (!options_.transcript_dir) {
    return;
  }
  std::ofstream out(*options_.transcript_dir / (resource.id + ".jsonl"), std::ios::app);
  out << record.dump() << '\n';
  out.flush();
  if (!out) {
    spdlog::error("could not append to the transcript of session {}", resource.id);
  }
}

json Service::state_view(Resource& resource) {
  const MiningSession& s = resource.session;
  const Fsm& m = s.original();

  if (!resource.count || resource.count->first != s.history().size()) {
    resource.count.emplace(s.history().size(),
                           count_models(m, s.formula(), options_.count_cap));
  }
  const ModelCount& count = resource.count->second;

  json offered = json::array();
  for (const auto& o : s.offered()) {
    offered.push_back({{"response", format_outputs(m, o.response)},
                       {"subdomain_size", bigint_to_json(o.subdomain_size)},
                       {"execution_count", o.execution_count}});
  }
  json history = json::array();
  for (const auto& step : s.history()) {
    json record = transcript_step(s, step);
    record.erase("kind");
    history.push_back(std::move(record));
  }
  json tests = json::array();
  for (const auto& t : s.adequate_tests()) {
    tests.push_back(format_inputs(m, t));
  }

  json view = {
      {"id", resource.id},
      {"status", to_string(s.status())},
      {"pending_test", s.pending_test() ? json(format_inputs(m, *s.pending_test())) : json()},
      {"offered_responses", std::move(offered)},
      {"candidate_count_remaining",
       count.exact ? bigint_to_json(count.count) : json{{"at_least", options_.count_cap}}},
      {"machine_view", fsm_to_json(s.machine())},
      {"history", std::move(history)},
      {"adequate_tests", std::move(tests)},
      {"trivial", is_deterministic(m)},
  };
  if (s.next_test() && s.status() == SessionStatus::NeedsGeneration) {
    view["next_test"] = format_inputs(m, *s.next_test());
  }
  if (s.result()) {
    view["result"] = fsm_to_json(*s.result());
  }
  return view;
}

Reply Service::create_session(const json& body) {
  try {
    if (!body.is_object() || !body.contains("fsm")) {
      return error_reply(400, "bad_request", "body must be an object with field fsm");
    }
    Fsm machine = machine_from_body(body["fsm"]);
    std::vector<InputWord> tests;
    if (body.contains("initial_tests")) {
      for (const auto& t : body["initial_tests"]) {
        tests.push_back(parse_inputs(machine, t.get<std::string>()));
      }
    }
    SessionOptions options;
    options.pair_cap = optional_field<std::size_t>(body, "pair_cap").value_or(options_.pair_cap);
    options.visit_seed = optional_field<std::uint64_t>(body, "seed");

    auto resource =
        std::make_shared<Resource>(fresh_id(), MiningSession(machine, tests, options));
    std::lock_guard lock(resource->mutex);
    append(*resource, transcript_header(resource->session));
    if (resource->session.status() != SessionStatus::AwaitingChoice) {
      append(*resource, transcript_result(resource->session));
    }
    {
      std::unique_lock sessions_lock(sessions_mutex_);
      sessions_.emplace(resource->id, resource);
    }
    spdlog::info("session {} created on machine {} ({})", resource->id, machine.name(),
                 to_string(resource->session.status()));
    return {201, state_view(*resource)};
  } catch (const json::exception& e) {
    return error_reply(400, "bad_request", e.what());
  } catch (const Error& e) {
    return error_reply(400, "invalid_machine", e.what());
  }
}

Reply Service::get_state(const std::string& id) {
  auto resource = find(id);
  if (!resource) {
    return error_reply(404, "not_found", "no session " + id);
  }
  std::lock_guard lock(resource->mutex);
  return {200, state_view(*resource)};
}

Reply Service::submit_choice(const std::string& id, const json& body) {
  auto resource = find(id);
  if (!resource) {
    return error_reply(404, "not_found", "no session " + id);
  }
  std::lock_guard lock(resource->mutex);
  MiningSession& s = resource->session;
  const Fsm& m = s.original();
  try {
    if (!body.is_object() || !body.contains("response")) {
      return error_reply(400, "bad_request", "body must be an object with field response");
    }
    OutputWord response = parse_outputs(m, body["response"].get<std::string>());
    std::optional<InputWord> test;
    if (auto t = optional_field<std::string>(body, "test")) {
      test = parse_inputs(m, *t);
    }

    // A repeated choice for the test answered last is acknowledged as is.
    bool answers_pending = s.status() == SessionStatus::AwaitingChoice &&
                           (!test || *test == *s.pending_test());
    if (!answers_pending) {
      if (test && !s.history().empty() && s.history().back().test == *test &&
          s.history().back().chosen == response) {
        return {200, state_view(*resource)};
      }
      if (s.status() != SessionStatus::AwaitingChoice) {
        return error_reply(409, "no_pending_choice",
                           std::string("session is ") + to_string(s.status()));
      }
      return error_reply(409, "stale_test",
                         "pending test is " + format_inputs(m, *s.pending_test()));
    }

    s.choose(response);
    append(*resource, transcript_step(s, s.history().back()));
    if (s.status() != SessionStatus::AwaitingChoice) {
      append(*resource, transcript_result(s));
      spdlog::info("session {} finished: {}", id, to_string(s.status()));
    }
    return {200, state_view(*resource)};
  } catch (const json::exception& e) {
    return error_reply(400, "bad_request", e.what());
  } catch (const ExpertProtocolError& e) {
    return error_reply(400, "not_offered", e.what());
  } catch (const SessionStateError& e) {
    return error_reply(409, "no_pending_choice", e.what());
  } catch (const Error& e) {
    return error_reply(400, "bad_request", e.what());
  }
}

Reply Service::get_result(const std::string& id) {
  auto resource = find(id);
  if (!resource) {
    return error_reply(404, "not_found", "no session " + id);
  }
  std::lock_guard lock(resource->mutex);
  const MiningSession& s = resource->session;
  if (s.status() != SessionStatus::Done) {
    return error_reply(409, "not_finished", std::string("session is ") + to_string(s.status()));
  }
  json tests = json::array();
  for (const auto& t : s.adequate_tests()) {
    tests.push_back(format_inputs(s.original(), t));
  }
  return {200, json{{"mined_machine", fsm_to_json(*s.result())},
                    {"mined_machine_text", render_fsm(*s.result())},
                    {"adequate_tests", std::move(tests)},
                    {"transcript", write_transcript(s)}}};
}

Reply Service::get_dot(const std::string& id) {
  auto resource = find(id);
  if (!resource) {
    return error_reply(404, "not_found", "no session " + id);
  }
  std::lock_guard lock(resource->mutex);
  return {200, json(render_dot(resource->session.machine()))};
}

std::size_t Service::recover() {
  if (!options_.transcript_dir) {
    return 0;
  }
  std::size_t restored = 0;
  for (const auto& entry : std::filesystem::directory_iterator(*options_.transcript_dir)) {
    if (entry.path().extension() != ".jsonl") {
      continue;
    }
    std::string id = entry.path().stem().string();
    try {
      std::ifstream in(entry.path());
      std::stringstream text;
      text << in.rdbuf();
      auto resource = std::make_shared<Resource>(id, replay(read_transcript(text.str())));
      std::unique_lock lock(sessions_mutex_);
      sessions_.insert_or_assign(id, std::move(resource));
      ++restored;
    } catch (const Error& e) {
      spdlog::warn("transcript {} skipped: {}", entry.path().string(), e.what());
    }
  }
  spdlog::info("recovered {} sessions", restored);
  return restored;
}

// --- HTTP ------------------------------------------------------------------

struct HttpServer::Impl {
  httplib::Server server;
};

namespace {

void send(httplib::Response& res, const Reply& reply) {
  res.status = reply.status;
  if (reply.body.is_string()) {
    res.set_content(reply.body.get<std::string>(), "text/vnd.graphviz");
  } else {
    res.set_content(reply.body.dump(), "application/json");
  }
}

std::optional<json> body_of(const httplib::Request& req, httplib::Response& res) {
  try {
    return json::parse(req.body);
  } catch (const json::exception& e) {
    send(res, error_reply(400, "bad_request", e.what()));
    return std::nullopt;
  }
}

} // namespace

HttpServer::HttpServer(Service& service, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>()) {
  auto& srv = impl_->server;
  const std::string session = R"(/api/v1/sessions/([0-9a-f]+))";
  srv.Post("/api/v1/sessions", [&service](const httplib::Request& req, httplib::Response& res) {
    if (auto body = body_of(req, res)) {
      send(res, service.create_session(*body));
    }
  });
  srv.Get(session, [&service](const httplib::Request& req, httplib::Response& res) {
    send(res, service.get_state(req.matches[1]));
  });
  srv.Post(session + "/choice", [&service](const httplib::Request& req, httplib::Response& res) {
    if (auto body = body_of(req, res)) {
      send(res, service.submit_choice(req.matches[1], *body));
    }
  });
  srv.Get(session + "/result", [&service](const httplib::Request& req, httplib::Response& res) {
    send(res, service.get_result(req.matches[1]));
  });
  srv.Get(session + "/machine.dot",
          [&service](const httplib::Request& req, httplib::Response& res) {
            send(res, service.get_dot(req.matches[1]));
          });
  if (static_dir && !srv.set_mount_point("/", static_dir->string())) {
    throw InvalidArgument("static directory " + static_dir->string() + " does not exist");
  }
}

HttpServer::~HttpServer() = default;

int HttpServer::bind_to_any_port(const std::string& host) {
  return impl_->server.bind_to_any_port(host);
}

bool HttpServer::listen_after_bind() { return impl_->server.listen_after_bind(); }

bool HttpServer::listen(const std::string& host, int port) {
  return impl_->server.listen(host, port);
}

void HttpServer::stop() { impl_->server.stop(); }

void HttpServer::wait_until_ready() const { impl_->server.wait_until_ready(); }

} // namespace oraclemine
