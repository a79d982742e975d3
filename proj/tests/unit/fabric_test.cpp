#include <gtest/gtest.h>

#include <atomic>
#include <random>
#include <thread>

#include "agentran/fabric/bus.hpp"
#include "agentran/fabric/framing.hpp"
#include "agentran/fabric/tcp.hpp"
#include "agentran/fabric/tools.hpp"
#include "support/fabric_corpus.hpp"

using namespace agentran::fabric;
using agentran::oracle::random_message;

namespace {

int error_code_of(const std::string& reply) {
  const Json j = Json::parse(reply);
  return j.at("error").at("code").get<int>();
}

std::shared_ptr<ToolServer> make_server(std::atomic<int>* calls = nullptr) {
  auto s = std::make_shared<ToolServer>("test");
  ToolDescriptor d{"set_level",
                   "Sets a level.",
                   {ParamSpec{"id", ParamType::kInteger, "target id", "", std::nullopt, std::nullopt, true},
                    ParamSpec{"level_db", ParamType::kNumber, "level", "dB", -10.0, 10.0, true},
                    ParamSpec{"note", ParamType::kString, "free text", "", std::nullopt, std::nullopt, false}}};
  s->register_tool(d, [calls](const Json& a) {
    if (calls) ++*calls;
    return Json{{"id", a["id"]}, {"applied", a["level_db"]}};
  });
  return s;
}

}  // namespace

TEST(Codec, RoundTripsRandomMessages) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 500; ++i) {
    const A2aMessage m = random_message(rng);
    const std::string wire = encode_envelope(to_envelope(m));
    const A2aMessage back = message_from_envelope(decode_envelope(wire));
    ASSERT_EQ(back, m) << wire;
    // Re-encoding is byte-stable.
    EXPECT_EQ(encode_envelope(to_envelope(back)), wire);
  }
}

TEST(Codec, RoundTripsResponses) {
  const auto ok = RpcEnvelope::success(std::int64_t{7}, Json{{"x", 1}});
  EXPECT_EQ(decode_envelope(encode_envelope(ok)), ok);
  const auto err = RpcEnvelope::failure(std::string("a"), RpcError{-32602, "bad", Json{{"field", "x"}}});
  EXPECT_EQ(decode_envelope(encode_envelope(err)), err);
  const auto nul = RpcEnvelope::failure(nullptr, RpcError{-32700, "parse", std::nullopt});
  EXPECT_EQ(decode_envelope(encode_envelope(nul)), nul);
}

TEST(Codec, MalformedInputGetsTheRightCode) {
  auto expect_code = [](std::string_view bytes, int code) {
    try {
      decode_envelope(bytes);
      ADD_FAILURE() << "accepted " << bytes;
    } catch (const RpcException& e) {
      EXPECT_EQ(e.code(), code) << bytes;
    }
  };
  expect_code("{", rpc_code::kParseError);
  expect_code("not json", rpc_code::kParseError);
  expect_code("", rpc_code::kParseError);
  expect_code("[1,2]", rpc_code::kInvalidRequest);
  expect_code(R"({"id":1,"method":"x"})", rpc_code::kInvalidRequest);
  expect_code(R"({"jsonrpc":"1.0","id":1,"method":"x"})", rpc_code::kInvalidRequest);
  expect_code(R"({"jsonrpc":"2.0","id":1,"method":""})", rpc_code::kInvalidRequest);
  expect_code(R"({"jsonrpc":"2.0","id":1,"method":5})", rpc_code::kInvalidRequest);
  expect_code(R"({"jsonrpc":"2.0","id":1.5,"method":"x"})", rpc_code::kInvalidRequest);
  expect_code(R"({"jsonrpc":"2.0","id":1,"method":"x","params":3})", rpc_code::kInvalidRequest);
  expect_code(R"({"jsonrpc":"2.0","id":1,"method":"x","extra":1})", rpc_code::kInvalidRequest);
  expect_code(R"({"jsonrpc":"2.0","id":1,"result":1,"error":{"code":1,"message":"m"}})",
              rpc_code::kInvalidRequest);
  expect_code(R"({"jsonrpc":"2.0","result":1})", rpc_code::kInvalidRequest);
  expect_code(R"({"jsonrpc":"2.0","id":1,"error":{"code":"x","message":"m"}})", rpc_code::kInvalidRequest);
  expect_code(R"({"jsonrpc":"2.0","id":1})", rpc_code::kInvalidRequest);
}

TEST(Codec, MessageValidationUsesInvalidParams) {
  auto env = RpcEnvelope::notification("a2a/send", Json{{"message", {{"sender", "a"}}}});
  try {
    message_from_envelope(env);
    FAIL();
  } catch (const RpcException& e) {
    EXPECT_EQ(e.code(), rpc_code::kInvalidParams);
  }
  A2aMessage m{"a", "b", MessageKind::kAck, "", std::nullopt, "", 0, 0};
  EXPECT_THROW(m.validate(), std::invalid_argument);
  auto wrong = RpcEnvelope::notification("a2a/other", Json::object());
  try {
    message_from_envelope(wrong);
    FAIL();
  } catch (const RpcException& e) {
    EXPECT_EQ(e.code(), rpc_code::kMethodNotFound);
  }
}

TEST(ServeFrame, ErrorResponses) {
  auto server = make_server();
  EXPECT_EQ(error_code_of(*server->handle_frame("{oops")), rpc_code::kParseError);
  EXPECT_EQ(Json::parse(*server->handle_frame("{oops"))["id"], nullptr);
  EXPECT_EQ(error_code_of(*server->handle_frame(R"({"jsonrpc":"2.0","id":3})")), rpc_code::kInvalidRequest);
  EXPECT_EQ(error_code_of(*server->handle_frame(R"({"jsonrpc":"2.0","id":3,"method":"nope"})")),
            rpc_code::kMethodNotFound);
  const auto bad = *server->handle_frame(
      R"({"jsonrpc":"2.0","id":4,"method":"tools/call","params":{"name":"set_level","arguments":{"id":1}}})");
  EXPECT_EQ(error_code_of(bad), rpc_code::kInvalidParams);
  EXPECT_EQ(Json::parse(bad)["error"]["data"]["field"], "level_db");
  EXPECT_EQ(Json::parse(bad)["id"], 4);
  // Notifications never produce a reply, even on failure.
  EXPECT_FALSE(server->handle_frame(R"({"jsonrpc":"2.0","method":"nope"})").has_value());
}

TEST(Tools, ListMatchesRegistrationAndRoundTrips) {
  auto server = make_server();
  ToolClient client(std::make_shared<InProcessTransport>(server));
  const auto tools = client.list_tools();
  ASSERT_EQ(tools.size(), 1u);
  EXPECT_EQ(tools[0], server->list_tools()[0]);
  EXPECT_EQ(tools[0].params[1].unit, "dB");
  EXPECT_FALSE(tools[0].params[2].required);
  EXPECT_THROW(server->register_tool(tools[0], [](const Json&) { return Json(); }), RegistrationError);
}

TEST(Tools, ValidationRejectsBeforeTheHandlerRuns) {
  std::atomic<int> calls{0};
  auto server = make_server(&calls);
  ToolClient client(std::make_shared<InProcessTransport>(server));
  auto expect_field = [&](const Json& args, const std::string& field) {
    try {
      client.call_tool("set_level", args);
      ADD_FAILURE() << args.dump();
    } catch (const RpcException& e) {
      EXPECT_EQ(e.code(), rpc_code::kInvalidParams);
      EXPECT_EQ(e.error().data->at("field"), field);
    }
  };
  expect_field({{"level_db", 1.0}}, "id");
  expect_field({{"id", 1.5}, {"level_db", 1.0}}, "id");
  expect_field({{"id", 1}, {"level_db", "x"}}, "level_db");
  expect_field({{"id", 1}, {"level_db", 10.5}}, "level_db");
  expect_field({{"id", 1}, {"level_db", -11}}, "level_db");
  expect_field({{"id", 1}, {"level_db", 0}, {"note", 3}}, "note");
  expect_field({{"id", 1}, {"level_db", 0}, {"bogus", 3}}, "bogus");
  EXPECT_EQ(calls.load(), 0);
  try {
    client.call_tool("missing", Json::object());
    FAIL();
  } catch (const RpcException& e) {
    EXPECT_EQ(e.code(), rpc_code::kMethodNotFound);
  }
  const Json r = client.call_tool("set_level", {{"id", 2}, {"level_db", 10.0}});
  EXPECT_EQ(r["applied"], 10.0);
  EXPECT_EQ(calls.load(), 1);
}

TEST(Tools, HandlerExceptionsBecomeInternalError) {
  auto s = std::make_shared<ToolServer>();
  s->register_tool(ToolDescriptor{"boom", "", {}}, [](const Json&) -> Json { throw std::runtime_error("x"); });
  ToolClient c(std::make_shared<InProcessTransport>(s));
  try {
    c.call_tool("boom", Json::object());
    FAIL();
  } catch (const RpcException& e) {
    EXPECT_EQ(e.code(), rpc_code::kInternalError);
  }
}

TEST(Framing, ReassemblesArbitraryChunks) {
  std::mt19937_64 rng(3);
  std::vector<std::string> payloads;
  std::string stream;
  for (int i = 0; i < 200; ++i) {
    payloads.push_back(agentran::oracle::random_text(rng, 300));
    stream += encode_frame(payloads.back());
  }
  stream += encode_frame("");
  payloads.push_back("");
  FrameDecoder dec;
  std::vector<std::string> got;
  for (std::size_t pos = 0; pos < stream.size();) {
    const std::size_t n = std::min<std::size_t>(1 + rng() % 17, stream.size() - pos);
    dec.feed(std::string_view(stream).substr(pos, n));
    pos += n;
    while (auto f = dec.next()) got.push_back(*f);
  }
  EXPECT_EQ(got, payloads);
  EXPECT_EQ(dec.buffered(), 0u);
  FrameDecoder bad;
  EXPECT_THROW(bad.feed(std::string("\x7f\xff\xff\xff", 4)), FramingError);
}

TEST(Bus, FifoPerSenderUnderConcurrency) {
  MessageBus bus([] { return 0.0; });
  auto inbox = bus.subscribe("sink");
  constexpr int kSenders = 8, kPer = 500;
  std::vector<std::thread> threads;
  for (int s = 0; s < kSenders; ++s)
    threads.emplace_back([&, s] {
      for (int i = 0; i < kPer; ++i)
        bus.send(A2aMessage{"s" + std::to_string(s), "sink", MessageKind::kAck, std::to_string(i), std::nullopt, "",
                            0, 0});
    });
  for (auto& t : threads) t.join();
  std::vector<int> next(kSenders, 0);
  std::uint64_t last_seq = 0;
  int total = 0;
  while (auto m = inbox->try_pop()) {
    const int s = std::stoi(m->sender.substr(1));
    EXPECT_EQ(std::stoi(m->body_text), next[s]++);
    EXPECT_GT(m->bus_seq, last_seq);
    last_seq = m->bus_seq;
    ++total;
  }
  EXPECT_EQ(total, kSenders * kPer);
}

TEST(Bus, MirrorsEveryMessageAndBuffersUntilSubscribe) {
  double now = 1.0;
  MessageBus bus([&] { return now; }, 5.0);
  std::vector<A2aMessage> mirrored;
  bus.add_mirror([&](const A2aMessage& m) { mirrored.push_back(m); });
  bus.send(A2aMessage{"a", "late", MessageKind::kIntent, "hello", std::nullopt, "c1", 0, 0});
  EXPECT_EQ(bus.pending_count(), 1u);
  now = 3.0;
  EXPECT_TRUE(bus.sweep().empty());
  auto inbox = bus.subscribe("late");
  auto m = inbox->try_pop();
  ASSERT_TRUE(m);
  EXPECT_EQ(m->timestamp_s, 1.0);
  EXPECT_EQ(m->correlation_id, "c1");
  ASSERT_EQ(mirrored.size(), 1u);
  EXPECT_EQ(mirrored[0], *m);
  EXPECT_THROW(bus.send(A2aMessage{"", "x", MessageKind::kAck, "t", std::nullopt, "", 0, 0}), std::invalid_argument);
}

TEST(Bus, DeadLettersAfterTimeout) {
  double now = 0.0;
  MessageBus bus([&] { return now; }, 5.0);
  std::vector<DeadLetter> sunk;
  bus.set_dead_letter_sink([&](const DeadLetter& d) { sunk.push_back(d); });
  bus.send(A2aMessage{"a", "ghost", MessageKind::kAck, "x", std::nullopt, "", 0, 0});
  now = 4.9;
  EXPECT_TRUE(bus.sweep().empty());
  now = 5.0;
  const auto dead = bus.sweep();
  ASSERT_EQ(dead.size(), 1u);
  EXPECT_EQ(dead[0].message.recipient, "ghost");
  EXPECT_EQ(dead[0].expired_at_s, 5.0);
  EXPECT_EQ(sunk.size(), 1u);
  EXPECT_EQ(bus.pending_count(), 0u);
  EXPECT_EQ(bus.dead_letters().size(), 1u);
  // A late subscriber does not receive an expired message.
  EXPECT_FALSE(bus.subscribe("ghost")->try_pop());
}

TEST(Tcp, ToolServerOverTcp) {
  std::atomic<int> calls{0};
  auto server = make_server(&calls);
  TcpRpcHost host([server](std::string_view f) { return server->handle_frame(f); });
  ASSERT_GT(host.port(), 0);
  auto transport = std::make_shared<TcpTransport>("127.0.0.1", host.port());
  ToolClient client(transport);
  EXPECT_EQ(client.list_tools().size(), 1u);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(client.call_tool("set_level", {{"id", i}, {"level_db", 0.5}})["id"], i);
  EXPECT_EQ(calls.load(), 50);
  EXPECT_EQ(error_code_of(transport->roundtrip("garbage")), rpc_code::kParseError);
  // A notification gets no reply; the next request still pairs correctly.
  transport->send_only(
      R"({"jsonrpc":"2.0","method":"tools/call","params":{"name":"set_level","arguments":{"id":9,"level_db":1}}})");
  EXPECT_EQ(client.call_tool("set_level", {{"id", 77}, {"level_db", 0}})["id"], 77);
  host.stop();
}

TEST(Tcp, ConcurrentClients) {
  auto server = make_server();
  TcpRpcHost host([server](std::string_view f) { return server->handle_frame(f); });
  std::vector<std::thread> ts;
  std::atomic<int> ok{0};
  for (int c = 0; c < 4; ++c)
    ts.emplace_back([&, c] {
      ToolClient client(std::make_shared<TcpTransport>("127.0.0.1", host.port()));
      for (int i = 0; i < 25; ++i)
        if (client.call_tool("set_level", {{"id", c * 100 + i}, {"level_db", 1}})["id"] == c * 100 + i) ++ok;
    });
  for (auto& t : ts) t.join();
  EXPECT_EQ(ok.load(), 100);
}
