#include <atomic>
#include <filesystem>
#include <fstream>
#include <thread>

#include <gtest/gtest.h>
#include <httplib.h>

#include "running_example.hpp"
#include "oraclemine/distinguisher.hpp"
#include "oraclemine/errors.hpp"
#include "oraclemine/fsm_io.hpp"
#include "oraclemine/service.hpp"
#include "oraclemine/transcript.hpp"

using namespace oraclemine;
using namespace oraclemine::testing;
using json = nlohmann::json;

namespace {

std::vector<std::string> offered_words(const json& state) {
  std::vector<std::string> out;
  for (const auto& o : state["offered_responses"]) {
    out.push_back(o["response"]);
  }
  return out;
}

// Answers every pending test with the responses of the given DFSM.
json drive(Service& service, const std::string& id, const Fsm& expert) {
  json state = service.get_state(id).body;
  while (state["status"] == "AwaitingChoice") {
    InputWord x = parse_inputs(expert, state["pending_test"].get<std::string>());
    Reply r = service.submit_choice(id, {{"response", format_outputs(expert, response(expert, x))}});
    EXPECT_EQ(r.status, 200) << r.body.dump();
    state = r.body;
  }
  return state;
}

struct TempDir {
  std::filesystem::path path;
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("oraclemine-test-" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
            "-" + std::to_string(reinterpret_cast<std::uintptr_t>(this)));
    std::filesystem::remove_all(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

} // namespace

TEST(Service, CreateOnTheRunningExample) {
  Service service;
  Reply r = service.create_session({{"fsm", running_text()}, {"initial_tests", {"babaab"}}});
  ASSERT_EQ(r.status, 201) << r.body.dump();
  const json& s = r.body;
  EXPECT_EQ(s["status"], "AwaitingChoice");
  EXPECT_EQ(s["pending_test"], "babaab");
  EXPECT_EQ(offered_words(s), (std::vector<std::string>{"000000", "000100", "000110"}));
  EXPECT_EQ(s["offered_responses"][0]["subdomain_size"], 2);
  EXPECT_EQ(s["offered_responses"][1]["subdomain_size"], 4);
  EXPECT_EQ(s["offered_responses"][2]["subdomain_size"], 2);
  EXPECT_EQ(s["candidate_count_remaining"], 8);
  EXPECT_EQ(s["machine_view"]["transitions"].size(), 11u);
  EXPECT_EQ(s["trivial"], false);
  EXPECT_EQ(service.get_state(s["id"]).body, s);
}

TEST(Service, StructuredMachineIsAccepted) {
  Service service;
  Reply r = service.create_session({{"fsm", fsm_to_json(running_imprecise())}});
  ASSERT_EQ(r.status, 201);
  EXPECT_EQ(r.body["status"], "AwaitingChoice");
}

TEST(Service, DeterministicMachineFinishesAtOnce) {
  Service service;
  Reply r = service.create_session({{"fsm", render_fsm(running_oracle())}});
  ASSERT_EQ(r.status, 201);
  EXPECT_EQ(r.body["status"], "Done");
  EXPECT_EQ(r.body["trivial"], true);
  EXPECT_EQ(fsm_from_json(r.body["result"]), running_oracle());
  Reply result = service.get_result(r.body["id"]);
  ASSERT_EQ(result.status, 200);
  EXPECT_EQ(fsm_from_json(result.body["mined_machine"]), running_oracle());
}

TEST(Service, IncompleteMachineIsRejectedWithTheDiagnosis) {
  Service service;
  std::string text = "fsm X\nstates 1 2\ninitial 1\ninputs a b\noutputs 0\n"
                     "trans 1 a/0 2\ntrans 2 a/0 1\ntrans 2 b/0 2\n";
  Reply r = service.create_session({{"fsm", text}});
  EXPECT_EQ(r.status, 400);
  std::string message = r.body["message"];
  EXPECT_NE(message.find("lacks input b"), std::string::npos) << message;
  EXPECT_EQ(service.create_session({{"fsm", "garbage"}}).status, 400);
  EXPECT_EQ(service.create_session(json::array()).status, 400);
  EXPECT_EQ(service.create_session({{"fsm", running_text()}, {"initial_tests", {"bz"}}}).status, 400);
  EXPECT_EQ(service.session_count(), 0u);
}

TEST(Service, ChoosingRemovesT6AndOffersTheNextTest) {
  Service service;
  std::string id =
      service.create_session({{"fsm", running_text()}, {"initial_tests", {"babaab"}}}).body["id"];
  Reply r = service.submit_choice(id, {{"response", "000100"}});
  ASSERT_EQ(r.status, 200) << r.body.dump();
  for (const auto& t : r.body["machine_view"]["transitions"]) {
    EXPECT_NE(t["id"], "t6");
  }
  EXPECT_EQ(r.body["candidate_count_remaining"], 4);
  EXPECT_EQ(r.body["status"], "AwaitingChoice");
  EXPECT_EQ(r.body["offered_responses"].size(), 2u);
  EXPECT_EQ(r.body["history"].size(), 1u);
  EXPECT_EQ(r.body["history"][0]["removed"], json::array({"t6"}));

  // The generated test separates candidates; the expert's answer is on offer.
  Fsm s = running_oracle();
  std::string x = r.body["pending_test"];
  auto offered = offered_words(r.body);
  EXPECT_NE(std::find(offered.begin(), offered.end(),
                      format_outputs(s, response(s, parse_inputs(s, x)))),
            offered.end());
}

TEST(Service, ErrorsOfSubmitChoice) {
  Service service;
  std::string id =
      service.create_session({{"fsm", running_text()}, {"initial_tests", {"babaab"}}}).body["id"];
  EXPECT_EQ(service.submit_choice(id, {{"response", "111111"}}).status, 400);
  EXPECT_EQ(service.submit_choice(id, {{"response", "0x"}}).status, 400);
  EXPECT_EQ(service.submit_choice(id, json::object()).status, 400);
  EXPECT_EQ(service.submit_choice("ffff", {{"response", "000100"}}).status, 404);
  EXPECT_EQ(service.get_state("ffff").status, 404);
  EXPECT_EQ(service.get_result(id).status, 409);
  EXPECT_EQ(service.submit_choice(id, {{"response", "000100"}, {"test", "ab"}}).status, 409);
}

TEST(Service, RepeatedChoiceIsIdempotent) {
  Service service;
  std::string id =
      service.create_session({{"fsm", running_text()}, {"initial_tests", {"babaab"}}}).body["id"];
  json choice = {{"response", "000100"}, {"test", "babaab"}};
  Reply first = service.submit_choice(id, choice);
  ASSERT_EQ(first.status, 200);
  Reply again = service.submit_choice(id, choice);
  EXPECT_EQ(again.status, 200);
  EXPECT_EQ(again.body, first.body);
  EXPECT_EQ(again.body["history"].size(), 1u);
  json other = {{"response", "000000"}, {"test", "babaab"}};
  EXPECT_EQ(service.submit_choice(id, other).status, 409);
}

TEST(Service, ConcurrentChoicesSerialize) {
  Service service;
  std::string id =
      service.create_session({{"fsm", running_text()}, {"initial_tests", {"babaab"}}}).body["id"];
  std::atomic<int> ok{0};
  std::vector<std::thread> threads;
  for (int k = 0; k < 8; ++k) {
    threads.emplace_back([&] {
      Reply r = service.submit_choice(id, {{"response", "000100"}, {"test", "babaab"}});
      ok += r.status == 200 ? 1 : 0;
    });
  }
  for (auto& t : threads) {
    t.join();
  }
  EXPECT_EQ(ok.load(), 8);
  EXPECT_EQ(service.get_state(id).body["history"].size(), 1u);
}

TEST(Service, WholeSessionMinesTheRunningOracle) {
  Service service;
  std::string id =
      service.create_session({{"fsm", running_text()}, {"initial_tests", {"babaab"}}}).body["id"];
  json state = drive(service, id, running_oracle());
  ASSERT_EQ(state["status"], "Done");
  EXPECT_EQ(state["candidate_count_remaining"].is_number(), true);
  Reply result = service.get_result(id);
  ASSERT_EQ(result.status, 200);
  Fsm mined = parse_fsm(result.body["mined_machine_text"].get<std::string>());
  EXPECT_TRUE(equivalent(mined, running_oracle()));
  EXPECT_EQ(fsm_from_json(result.body["mined_machine"]), mined);
  EXPECT_EQ(result.body["adequate_tests"][0], "babaab");

  // The transcript replays through the library to the same machine.
  MiningSession again = replay(read_transcript(result.body["transcript"].get<std::string>()));
  EXPECT_EQ(*again.result(), mined);

  Reply dot = service.get_dot(id);
  ASSERT_TRUE(dot.body.is_string());
  EXPECT_EQ(dot.body.get<std::string>().rfind("digraph", 0), 0u);
  EXPECT_EQ(service.submit_choice(id, {{"response", "000100"}}).status, 409);
}

TEST(Service, LargeCountsAreCapped) {
  ServiceOptions options;
  options.count_cap = 5;
  Service capped(options);
  json body = {{"fsm", running_text()}, {"initial_tests", {"babaab"}}};
  EXPECT_EQ(capped.create_session(body).body["candidate_count_remaining"],
            (json{{"at_least", 5}}));
  options.count_cap = 8;
  Service exact(options);
  EXPECT_EQ(exact.create_session(body).body["candidate_count_remaining"], 8);
}

TEST(Service, TranscriptsRecoverSessions) {
  TempDir dir;
  ServiceOptions options;
  options.transcript_dir = dir.path;
  std::string open_id;
  std::string done_id;
  {
    Service service(options);
    open_id = service.create_session({{"fsm", running_text()}, {"initial_tests", {"babaab"}}})
                  .body["id"];
    ASSERT_EQ(service.submit_choice(open_id, {{"response", "000100"}}).status, 200);
    done_id = service.create_session({{"fsm", running_text()}}).body["id"];
    drive(service, done_id, running_oracle());
  }
  std::ofstream(dir.path / "broken.jsonl") << "{oops\n";
  Service restarted(options);
  EXPECT_EQ(restarted.recover(), 2u);
  json open = restarted.get_state(open_id).body;
  EXPECT_EQ(open["status"], "AwaitingChoice");
  EXPECT_EQ(open["history"].size(), 1u);
  json finished = drive(restarted, open_id, running_oracle());
  EXPECT_EQ(finished["status"], "Done");
  EXPECT_EQ(restarted.get_result(done_id).status, 200);

  // Appends after recovery keep the transcript replayable.
  Service third(options);
  EXPECT_EQ(third.recover(), 2u);
  EXPECT_EQ(third.get_state(open_id).body["status"], "Done");
}

TEST(HttpServer, RoundTrip) {
  Service service;
  HttpServer server(service);
  int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread loop([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  json create = {{"fsm", running_text()}, {"initial_tests", {"babaab"}}};
  auto res = client.Post("/api/v1/sessions", create.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);
  json state = json::parse(res->body);
  std::string base = "/api/v1/sessions/" + state["id"].get<std::string>();

  res = client.Get(base);
  ASSERT_TRUE(res);
  EXPECT_EQ(json::parse(res->body), state);

  Fsm s = running_oracle();
  while (state["status"] == "AwaitingChoice") {
    InputWord x = parse_inputs(s, state["pending_test"].get<std::string>());
    json choice = {{"response", format_outputs(s, response(s, x))}};
    res = client.Post(base + "/choice", choice.dump(), "application/json");
    ASSERT_TRUE(res);
    ASSERT_EQ(res->status, 200) << res->body;
    state = json::parse(res->body);
  }
  res = client.Get(base + "/result");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_TRUE(equivalent(fsm_from_json(json::parse(res->body)["mined_machine"]), s));

  res = client.Get(base + "/machine.dot");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->get_header_value("Content-Type"), "text/vnd.graphviz");

  res = client.Post("/api/v1/sessions", "{not json", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  res = client.Get("/api/v1/sessions/0123abcd");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);

  server.stop();
  loop.join();
}

TEST(HttpServer, StaticMount) {
  TempDir dir;
  std::filesystem::create_directories(dir.path);
  std::ofstream(dir.path / "index.html") << "<html>console</html>";
  Service service;
  HttpServer server(service, dir.path);
  int port = server.bind_to_any_port("127.0.0.1");
  std::thread loop([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  httplib::Client client("127.0.0.1", port);
  auto res = client.Get("/index.html");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->body, "<html>console</html>");
  server.stop();
  loop.join();
  EXPECT_THROW(HttpServer missing(service, dir.path / "missing"), InvalidArgument);
}
