#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "oraclemine/encoding.hpp"
#include "oraclemine/mining.hpp"

namespace oraclemine {

struct ServiceOptions {
  // One append-only JSON-lines transcript per session when set.
  std::optional<std::filesystem::path> transcript_dir;
  // Model counting stops here; larger counts are reported as {at_least: cap}.
  std::size_t count_cap = 1000;
  std::size_t pair_cap = kDefaultPairCap;
};

// HTTP-independent reply: status code and body. A string body is plain text,
// anything else is sent as JSON.
struct Reply {
  int status = 200;
  nlohmann::json body;
};

// Sessions of interactive mining keyed by opaque ids. Every operation on one
// session runs under that session's mutex; sessions never share state.
class Service {
public:
  explicit Service(ServiceOptions options = {});

  // body: {fsm: text or structured object, initial_tests?: [word], seed?: int,
  // pair_cap?: int}
  Reply create_session(const nlohmann::json& body);
  Reply get_state(const std::string& id);
  // body: {response: word, test?: word}. The optional test names the pending
  // test the choice answers; repeating the last applied choice is a no-op.
  Reply submit_choice(const std::string& id, const nlohmann::json& body);
  Reply get_result(const std::string& id);
  Reply get_dot(const std::string& id);

  // Replays every transcript of the transcript directory into a session and
  // returns how many were restored. Unreadable transcripts are skipped.
  std::size_t recover();

  [[nodiscard]] std::size_t session_count() const;

private:
  struct Resource {
    Resource(std::string id_, MiningSession session_)
        : id(std::move(id_)), session(std::move(session_)) {}

    std::mutex mutex;
    std::string id;
    MiningSession session;
    // Remaining model count cached for the history length it was computed at.
    std::optional<std::pair<std::size_t, ModelCount>> count;
  };

  std::shared_ptr<Resource> find(const std::string& id) const;
  std::string fresh_id();
  nlohmann::json state_view(Resource& resource);
  void append(const Resource& resource, const nlohmann::json& record) const;

  ServiceOptions options_;
  mutable std::shared_mutex sessions_mutex_;
  std::unordered_map<std::string, std::shared_ptr<Resource>> sessions_;
  std::mutex id_mutex_;
  std::uint64_t id_state_;
};

// HTTP front end over a Service: the /api/v1 routes plus an optional static
// mount at "/".
class HttpServer {
public:
  HttpServer(Service& service, std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  // Binds to an ephemeral port and returns it; serve with listen_after_bind().
  int bind_to_any_port(const std::string& host);
  bool listen_after_bind();
  // Blocks until stop().
  bool listen(const std::string& host, int port);
  void stop();
  void wait_until_ready() const;

private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

} // namespace oraclemine
