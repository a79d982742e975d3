#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>

#include "agentran/datalake/store.hpp"

namespace agentran::datalake {

// KPI records rendered with the simulator's slot CSV columns (one row per UE
// per snapshot). Returns the number of rows written.
std::size_t export_kpi_csv(std::span<const LogRecord> records, std::ostream& out);
std::size_t export_kpi_csv(const std::filesystem::path& log_dir, const std::filesystem::path& csv_path);

}  // namespace agentran::datalake
