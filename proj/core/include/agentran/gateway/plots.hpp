#pragma once

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "agentran/gateway/engine.hpp"

namespace agentran::gateway {

class PlotError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// One figure panel as a table: a time column plus named series.
struct PanelData {
  std::string name;   // file stem
  std::string title;
  std::vector<std::string> columns;  // excluding "time_s"
  std::vector<std::string> units;    // parallel to columns
  std::vector<double> time_s;
  std::vector<std::vector<double>> values;  // values[column][row]

  friend bool operator==(const PanelData&, const PanelData&) = default;
};

// Throughput and throttle limit per slice (one panel each), then tx power and
// power draw of every UE.
std::vector<PanelData> build_panels(const ScenarioResult& result);

// Writes <name>.csv and <name>.svg per panel. An empty result raises
// PlotError before anything is written; I/O failures raise PlotError and
// leave no partial files behind.
std::vector<std::filesystem::path> export_plots(const ScenarioResult& result, const std::filesystem::path& out_dir);

void write_panel_csv(const PanelData& p, std::ostream& out);
PanelData read_panel_csv(const std::filesystem::path& path);
std::string render_panel_svg(const PanelData& p);

}  // namespace agentran::gateway
