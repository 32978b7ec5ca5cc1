#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pqos/experiment.hpp"
#include "pqos/stats.hpp"

namespace pqos {

/// Aggregate view of one run used by the figure tables and the acceptance suite.
struct RunSummary {
  std::string policy;
  std::uint64_t decisions = 0;
  double qos_fraction = 0.0;
  std::array<double, kApplicationModes.size()> mode_fraction{};  // order of kApplicationModes
  BoxStats delay;              // per-period mean delay, periods with deliveries only
  BoxStats reward_normalized;  // rewards mapped to [-1, 1]
  double max_reward = 0.0;     // raw
};

/// Requires rows (RunOptions::keep_rows or read_kpi_csv).
[[nodiscard]] RunSummary summarize(const RunRecords& run);

/// Writes action_probability.csv, cd_distribution.csv, qos_distribution.csv,
/// delay_boxplot.csv and reward_distribution.csv into `output_dir`.
/// Throws std::invalid_argument on an empty record set and std::runtime_error
/// when a file cannot be written.
void emit_figures_csv(std::span<const RunRecords> runs, const std::filesystem::path& output_dir);

}  // namespace pqos
