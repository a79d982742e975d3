// agentran: headless scenario runs, the live service and data-lake export.

#include <atomic>
#include <csignal>
#include <chrono>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "agentran/datalake/export.hpp"
#include "agentran/gateway/engine.hpp"
#include "agentran/gateway/plots.hpp"
#include "agentran/gateway/scenario.hpp"
#include "agentran/gateway/service.hpp"

namespace fs = std::filesystem;
using namespace agentran;

namespace {

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop = true; }

gateway::ScenarioConfig load_or_default(const std::string& path) {
  return path.empty() ? gateway::default_scenario() : gateway::load_scenario(path);
}

void print_summary(const gateway::ScenarioResult& r) {
  for (const auto& p : r.phases) {
    fmt::print("phase {} ({}) {:.0f}-{:.0f} s:", p.index + 1, p.intent_id, p.start_s, p.end_s);
    for (const auto& s : p.slices) {
      if (s.per_ue_throughput_bps.empty()) continue;
      fmt::print("  {} {:.2f} Mbit/s/UE", s.name, s.per_ue_throughput_bps.back() / 1e6);
    }
    if (p.latency_cycles) fmt::print("  latency {} cycles", *p.latency_cycles);
    fmt::print("\n");
  }
  fmt::print("{} KPI samples, {} messages, {} violations\n", r.samples, r.messages, r.violations.size());
}

int cmd_run(const std::string& config, const std::string& out, std::optional<std::uint64_t> seed,
            std::optional<std::string> reasoner, std::optional<double> compress) {
  auto cfg = load_or_default(config);
  gateway::RunOptions opts;
  opts.out_dir = out;
  opts.seed = seed;
  opts.reasoner = reasoner;
  opts.compression = compress;
  const auto t0 = std::chrono::steady_clock::now();
  const auto result = gateway::run_scenario(cfg, opts);
  const auto files = gateway::export_plots(result, fs::path(out) / "plots");
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  print_summary(result);
  fmt::print("wrote {}/result.json, kpis.csv, datalake/ and {} plot files in {:.1f} s\n", out, files.size(), wall);
  return 0;
}

int cmd_serve(const std::string& config, const std::string& listen, const std::string& lake,
              std::optional<std::string> reasoner, std::optional<double> compress) {
  auto cfg = load_or_default(config);
  gateway::EngineOptions eo;
  eo.datalake_dir = lake;
  eo.reasoner = reasoner;
  gateway::Engine engine(cfg, eo);
  gateway::Service service(engine, gateway::parse_listen_address(listen));
  fmt::print("serving {} on port {} (data lake {})\n", cfg.name, service.port(), lake);
  std::fflush(stdout);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);
  const double c = compress.value_or(cfg.time_compression);
  const auto wall0 = std::chrono::steady_clock::now();
  bool finished = false;
  while (!g_stop) {
    if (engine.done()) {
      if (!finished) {
        engine.finish();
        finished = true;
        fmt::print("scenario finished at {:.0f} s; still serving\n", engine.now());
        std::fflush(stdout);
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(100));
      continue;
    }
    engine.step();
    const auto due = wall0 + std::chrono::duration_cast<std::chrono::steady_clock::duration>(
                                 std::chrono::duration<double>(engine.now() / c));
    while (!g_stop && std::chrono::steady_clock::now() < due)
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
  }
  service.stop();
  if (!finished) engine.finish();
  return 0;
}

int cmd_config(const std::string& config) {
  std::cout << gateway::Json(load_or_default(config)).dump(2) << '\n';
  return 0;
}

int cmd_export(const std::string& log, const std::string& out) {
  const auto rows = datalake::export_kpi_csv(log, out);
  fmt::print("wrote {} rows to {}\n", rows, out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hierarchical agents over a simulated uplink cell"};
  app.require_subcommand(1);

  std::string config, out, listen = "127.0.0.1:8080", lake, log, csv;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> reasoner;
  std::optional<double> compress;

  auto* run = app.add_subcommand("run", "Run a scenario headlessly and write results");
  run->add_option("--config", config, "Scenario JSON (default: built-in three-phase scenario)");
  run->add_option("--out", out, "Output directory")->required();
  run->add_option("--seed", seed, "Override the scenario seed");
  run->add_option("--reasoner", reasoner, "Reasoner backend for every agent")->check(CLI::IsMember({"rule", "llm"}));
  run->add_option("--compress", compress, "Pace the run at this many virtual seconds per wall second");

  auto* serve = app.add_subcommand("serve", "Run the scenario live behind the HTTP/WebSocket API");
  serve->add_option("--config", config, "Scenario JSON (default: built-in three-phase scenario)");
  serve->add_option("--listen", listen, "host:port to bind");
  serve->add_option("--datalake", lake, "Data lake directory")->required();
  serve->add_option("--reasoner", reasoner, "Reasoner backend for every agent")->check(CLI::IsMember({"rule", "llm"}));
  serve->add_option("--compress", compress, "Virtual seconds per wall second (default: scenario setting)");

  auto* exp = app.add_subcommand("export", "Export KPI records of a data lake as CSV");
  exp->add_option("--log", log, "Data lake directory")->required();
  exp->add_option("--out", csv, "CSV file")->required();

  auto* show = app.add_subcommand("config", "Validate a scenario and print it with every default filled in");
  show->add_option("--config", config, "Scenario JSON (default: built-in three-phase scenario)");

  CLI11_PARSE(app, argc, argv);
  try {
    if (*run) return cmd_run(config, out, seed, reasoner, compress);
    if (*serve) return cmd_serve(config, listen, lake, reasoner, compress);
    if (*exp) return cmd_export(log, csv);
    if (*show) return cmd_config(config);
  } catch (const gateway::ScenarioError& e) {
    std::cerr << "invalid scenario: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
