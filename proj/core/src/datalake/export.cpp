#include "agentran/datalake/export.hpp"

#include <fstream>
#include <stdexcept>

#include "agentran/sim/csv.hpp"

namespace agentran::datalake {

std::size_t export_kpi_csv(std::span<const LogRecord> records, std::ostream& out) {
  sim::write_csv_header(out);
  std::size_t rows = 0;
  for (const auto& r : records) {
    if (r.kind != RecordKind::kKpi) continue;
    const auto snap = r.payload.get<sim::KpiSnapshot>();
    sim::write_kpi_csv(out, snap);
    rows += snap.per_ue.size();
  }
  return rows;
}

std::size_t export_kpi_csv(const std::filesystem::path& log_dir, const std::filesystem::path& csv_path) {
  if (!std::filesystem::is_directory(log_dir)) throw std::runtime_error("no data lake at " + log_dir.string());
  LogStore store(log_dir, StoreOptions{4096, false, 1000});
  const auto recs = store.all();
  std::ofstream out(csv_path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + csv_path.string());
  const std::size_t rows = export_kpi_csv(std::span<const LogRecord>(recs), out);
  if (!out) throw std::runtime_error("write failed for " + csv_path.string());
  return rows;
}

}  // namespace agentran::datalake
