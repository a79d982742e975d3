#include <benchmark/benchmark.h>

#include "agentran/fabric/bus.hpp"
#include "agentran/fabric/rpc.hpp"
#include "agentran/fabric/tools.hpp"

using namespace agentran::fabric;

namespace {

A2aMessage sample_message() {
  A2aMessage m;
  m.sender = "l2";
  m.recipient = "ul-ra";
  m.kind = MessageKind::kSubIntent;
  m.body_text = "Set MTC as high priority and serve each MTC UE with at least 30 Mbit/s.";
  m.body_structured = Json{{"sub_intent",
                            {{"sub_intent_id", "emergency:ul-ra"},
                             {"requirements", Json::array({{{"slice_id", 2}, {"min_throughput_bps", 3e7}}})},
                             {"revision", 2}}},
                           {"refinement", true}};
  m.correlation_id = "emergency";
  m.timestamp_s = 91.0;
  m.bus_seq = 1234;
  return m;
}

void BM_EncodeMessage(benchmark::State& state) {
  const auto m = sample_message();
  for (auto _ : state) benchmark::DoNotOptimize(encode_envelope(to_envelope(m)));
}
BENCHMARK(BM_EncodeMessage);

void BM_DecodeMessage(benchmark::State& state) {
  const auto wire = encode_envelope(to_envelope(sample_message()));
  for (auto _ : state) benchmark::DoNotOptimize(message_from_envelope(decode_envelope(wire)));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(wire.size()));
}
BENCHMARK(BM_DecodeMessage);

void BM_InProcessToolCall(benchmark::State& state) {
  auto server = std::make_shared<ToolServer>("bench");
  server->register_tool(
      ToolDescriptor{"set", "", {ParamSpec{"ue_id", ParamType::kInteger}, ParamSpec{"target_db", ParamType::kNumber}}},
      [](const Json& a) { return a; });
  ToolClient client(std::make_shared<InProcessTransport>(server));
  const Json args{{"ue_id", 3}, {"target_db", 12.0}};
  for (auto _ : state) benchmark::DoNotOptimize(client.call_tool("set", args));
}
BENCHMARK(BM_InProcessToolCall);

void BM_BusSendDrain(benchmark::State& state) {
  MessageBus bus([] { return 0.0; });
  auto inbox = bus.subscribe("ul-ra");
  const auto m = sample_message();
  for (auto _ : state) {
    for (int i = 0; i < 64; ++i) bus.send(m);
    benchmark::DoNotOptimize(inbox->drain());
  }
  state.SetItemsProcessed(state.iterations() * 64);
}
BENCHMARK(BM_BusSendDrain);

}  // namespace
