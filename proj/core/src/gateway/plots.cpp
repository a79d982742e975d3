#include "agentran/gateway/plots.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>
#include <fstream>
#include <map>
#include <sstream>

namespace agentran::gateway {

namespace {

constexpr int kWidth = 900;
constexpr int kPlotHeight = 260;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 160;
constexpr int kMarginTop = 40;
constexpr int kGap = 50;
const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

struct Concat {
  std::vector<double> t;
  std::vector<double> phase_starts;
};

Concat times(const ScenarioResult& r) {
  Concat c;
  for (const auto& p : r.phases) {
    c.phase_starts.push_back(p.start_s);
    c.t.insert(c.t.end(), p.time_s.begin(), p.time_s.end());
  }
  return c;
}

template <class Get>
std::vector<double> concat(const ScenarioResult& r, Get get) {
  std::vector<double> out;
  for (const auto& p : r.phases) {
    const auto& v = get(p);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

std::string to_field(double v) { return fmt::format("{:.17g}", v); }

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

double nice_step(double span) {
  if (!(span > 0)) return 1.0;
  const double raw = span / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (raw <= m * mag) return m * mag;
  return 10.0 * mag;
}

double display_scale(const std::string& unit) { return unit == "bit/s" ? 1e-6 : 1.0; }
std::string display_unit(const std::string& unit) { return unit == "bit/s" ? "Mbit/s" : unit; }

}  // namespace

std::vector<PanelData> build_panels(const ScenarioResult& r) {
  const auto c = times(r);
  std::vector<PanelData> panels;
  if (r.phases.empty()) return panels;
  for (std::size_t si = 0; si < r.phases.front().slices.size(); ++si) {
    const auto& s0 = r.phases.front().slices[si];
    PanelData p;
    p.name = fmt::format("slice_{}_throughput", s0.slice_id);
    p.title = fmt::format("{} slice: per-UE throughput and throttle limit", s0.name);
    p.time_s = c.t;
    p.columns = {"per_ue_throughput_bps", "aggregate_throughput_bps", "throttle_limit_bps"};
    p.units = {"bit/s", "bit/s", "bit/s"};
    p.values = {concat(r, [&](const PhaseSeries& ph) -> const auto& { return ph.slices[si].per_ue_throughput_bps; }),
                concat(r, [&](const PhaseSeries& ph) -> const auto& { return ph.slices[si].aggregate_throughput_bps; }),
                concat(r, [&](const PhaseSeries& ph) -> const auto& { return ph.slices[si].throttle_limit_bps; })};
    panels.push_back(std::move(p));
  }
  PanelData pw;
  pw.name = "ue_power";
  pw.title = "UE transmit power and modeled power draw";
  pw.time_s = c.t;
  for (std::size_t ui = 0; ui < r.phases.front().ues.size(); ++ui) {
    const int id = r.phases.front().ues[ui].ue_id;
    pw.columns.push_back(fmt::format("ue{}_tx_power_dbm", id));
    pw.units.push_back("dBm");
    pw.values.push_back(concat(r, [&](const PhaseSeries& ph) -> const auto& { return ph.ues[ui].tx_power_dbm; }));
  }
  for (std::size_t ui = 0; ui < r.phases.front().ues.size(); ++ui) {
    const int id = r.phases.front().ues[ui].ue_id;
    pw.columns.push_back(fmt::format("ue{}_power_draw_mw", id));
    pw.units.push_back("mW");
    pw.values.push_back(concat(r, [&](const PhaseSeries& ph) -> const auto& { return ph.ues[ui].power_draw_mw; }));
  }
  panels.push_back(std::move(pw));
  return panels;
}

void write_panel_csv(const PanelData& p, std::ostream& out) {
  out << "time_s";
  for (const auto& c : p.columns) out << ',' << c;
  out << '\n';
  for (std::size_t row = 0; row < p.time_s.size(); ++row) {
    out << to_field(p.time_s[row]);
    for (const auto& col : p.values) out << ',' << to_field(col[row]);
    out << '\n';
  }
}

PanelData read_panel_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PlotError("cannot open " + path.string());
  PanelData p;
  p.name = path.stem().string();
  std::string line;
  if (!std::getline(in, line)) throw PlotError(path.string() + ": missing header");
  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) header.push_back(cell);
  }
  if (header.empty() || header.front() != "time_s") throw PlotError(path.string() + ": first column must be time_s");
  p.columns.assign(header.begin() + 1, header.end());
  p.values.assign(p.columns.size(), {});
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw PlotError(fmt::format("{}:{}: bad number {}", path.string(), lineno, cell));
      }
    }
    if (row.size() != header.size()) throw PlotError(fmt::format("{}:{}: wrong column count", path.string(), lineno));
    p.time_s.push_back(row[0]);
    for (std::size_t k = 1; k < row.size(); ++k) p.values[k - 1].push_back(row[k]);
  }
  return p;
}

std::string render_panel_svg(const PanelData& p) {
  // One subplot per unit, stacked vertically.
  std::vector<std::string> units;
  for (const auto& u : p.units)
    if (std::find(units.begin(), units.end(), u) == units.end()) units.push_back(u);
  const int plot_w = kWidth - kMarginLeft - kMarginRight;
  const int height = kMarginTop + static_cast<int>(units.size()) * (kPlotHeight + kGap);
  const double t0 = p.time_s.empty() ? 0.0 : p.time_s.front();
  const double t1 = p.time_s.empty() ? 1.0 : std::max(p.time_s.back(), t0 + 1e-9);

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" "
      "font-family=\"sans-serif\" font-size=\"12\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
      "<text x=\"{}\" y=\"22\" font-size=\"15\">{}</text>\n",
      kWidth, height, kWidth, height, kMarginLeft, escape(p.title));

  std::size_t color = 0;
  for (std::size_t ui = 0; ui < units.size(); ++ui) {
    const std::string& unit = units[ui];
    const double scale = display_scale(unit);
    const int top = kMarginTop + static_cast<int>(ui) * (kPlotHeight + kGap);
    double lo = INFINITY, hi = -INFINITY;
    for (std::size_t k = 0; k < p.columns.size(); ++k) {
      if (p.units[k] != unit) continue;
      for (double v : p.values[k]) {
        lo = std::min(lo, v * scale);
        hi = std::max(hi, v * scale);
      }
    }
    if (!std::isfinite(lo)) lo = 0, hi = 1;
    const double step = nice_step(hi - lo > 0 ? hi - lo : std::max(std::abs(hi), 1.0));
    lo = std::floor(lo / step) * step;
    hi = std::ceil(hi / step) * step;
    if (hi <= lo) hi = lo + step;
    auto xs = [&](double t) { return kMarginLeft + (t - t0) / (t1 - t0) * plot_w; };
    auto ys = [&](double v) { return top + kPlotHeight - (v - lo) / (hi - lo) * kPlotHeight; };

    svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#333\"/>\n",
                       kMarginLeft, top, plot_w, kPlotHeight);
    for (double v = lo; v <= hi + step * 1e-6; v += step) {
      svg += fmt::format("<line x1=\"{}\" x2=\"{}\" y1=\"{:.1f}\" y2=\"{:.1f}\" stroke=\"#ddd\"/>"
                         "<text x=\"{}\" y=\"{:.1f}\" text-anchor=\"end\">{:g}</text>\n",
                         kMarginLeft, kMarginLeft + plot_w, ys(v), ys(v), kMarginLeft - 6, ys(v) + 4, v);
    }
    const double tstep = nice_step(t1 - t0);
    for (double t = std::ceil(t0 / tstep) * tstep; t <= t1 + 1e-9; t += tstep)
      svg += fmt::format("<text x=\"{:.1f}\" y=\"{}\" text-anchor=\"middle\">{:g}</text>\n", xs(t),
                         top + kPlotHeight + 16, t);
    svg += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">time [s]</text>\n", kMarginLeft + plot_w / 2,
                       top + kPlotHeight + 32);
    svg += fmt::format("<text transform=\"translate(16,{}) rotate(-90)\" text-anchor=\"middle\">{}</text>\n",
                       top + kPlotHeight / 2, escape(display_unit(unit)));

    int legend_y = top + 14;
    for (std::size_t k = 0; k < p.columns.size(); ++k) {
      if (p.units[k] != unit) continue;
      const char* col = kColors[color++ % std::size(kColors)];
      std::string pts;
      for (std::size_t row = 0; row < p.time_s.size(); ++row)
        pts += fmt::format("{:.1f},{:.1f} ", xs(p.time_s[row]), ys(p.values[k][row] * scale));
      svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n", col, pts);
      svg += fmt::format("<line x1=\"{}\" x2=\"{}\" y1=\"{}\" y2=\"{}\" stroke=\"{}\" stroke-width=\"2\"/>"
                         "<text x=\"{}\" y=\"{}\">{}</text>\n",
                         kMarginLeft + plot_w + 10, kMarginLeft + plot_w + 28, legend_y - 4, legend_y - 4, col,
                         kMarginLeft + plot_w + 32, legend_y, escape(p.columns[k]));
      legend_y += 16;
    }
  }
  svg += "</svg>\n";
  return svg;
}

std::vector<std::filesystem::path> export_plots(const ScenarioResult& result, const std::filesystem::path& out_dir) {
  if (result.empty()) throw PlotError("scenario result has no KPI samples");
  const auto panels = build_panels(result);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw PlotError("cannot create " + out_dir.string() + ": " + ec.message());

  std::vector<std::pair<std::filesystem::path, std::filesystem::path>> staged;  // tmp -> final
  auto cleanup = [&] {
    for (const auto& [tmp, _] : staged) std::filesystem::remove(tmp, ec);
  };
  for (const auto& p : panels) {
    for (const char* ext : {".csv", ".svg"}) {
      const auto final_path = out_dir / (p.name + ext);
      auto tmp = final_path;
      tmp += ".tmp";
      staged.emplace_back(tmp, final_path);
      std::ofstream out(tmp, std::ios::binary);
      if (std::string(ext) == ".csv") write_panel_csv(p, out);
      else out << render_panel_svg(p);
      out.close();
      if (!out) {
        cleanup();
        throw PlotError("cannot write " + tmp.string());
      }
    }
  }
  std::vector<std::filesystem::path> written;
  for (const auto& [tmp, final_path] : staged) {
    std::filesystem::rename(tmp, final_path, ec);
    if (ec) {
      cleanup();
      for (const auto& w : written) std::filesystem::remove(w, ec);
      throw PlotError("cannot write " + final_path.string());
    }
    written.push_back(final_path);
  }
  return written;
}

}  // namespace agentran::gateway
