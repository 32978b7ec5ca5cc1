#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>
#include <vector>

#include "pqos/application_mode.hpp"
#include "pqos/dqn_agent.hpp"
#include "pqos/experiment_spec.hpp"
#include "pqos/network_env.hpp"
#include "pqos/policy.hpp"

namespace pqos {

enum class Phase { kOffline, kOnline, kTest };

[[nodiscard]] const char* phase_name(Phase phase) noexcept;

/// One vehicle-period of a run.
struct StepRow {
  int episode = 0;
  int step = 0;
  int vehicle = 0;
  ModeId mode = ModeId::kCompressed;
  StepKpis kpis;
  double cd = 0.0;
  bool qos = false;
  double reward = 0.0;  // raw, in [0, 1]
  bool rewarded = true; // false when the period generated no packets
};

struct EpisodeRecord {
  int index = 0;
  double epsilon = 0.0;
  std::array<std::uint64_t, kApplicationModes.size()> mode_counts{};  // order of kApplicationModes
  std::uint64_t decisions = 0;
  std::uint64_t transitions = 0;
  std::uint64_t qos_met = 0;
  double reward_sum = 0.0;
  std::vector<StepRow> rows;  // empty unless RunOptions::keep_rows

  [[nodiscard]] double mean_reward() const noexcept;
  [[nodiscard]] double qos_fraction() const noexcept;
  [[nodiscard]] double mode_fraction(ModeId mode) const noexcept;
};

struct RunRecords {
  std::string policy;
  Phase phase = Phase::kTest;
  std::vector<EpisodeRecord> episodes;

  [[nodiscard]] bool has_rows() const noexcept;
};

struct RunOptions {
  bool keep_rows = false;
  std::ostream* kpi_csv = nullptr;  // per-step rows streamed here when set
};

/// Seed of episode `episode` in `phase`; shared by every policy for pairing.
[[nodiscard]] std::uint64_t episode_seed(const ExperimentSpec& spec, Phase phase, int episode) noexcept;

/// Episodes with one fixed mode for every vehicle, cycling 1450, 1451, 1452.
/// Every transition is stored and one batch is trained per step once ready.
RunRecords run_offline_training(const ExperimentSpec& spec, DqnAgent& agent,
                                const RunOptions& options = {});

/// Per-vehicle epsilon-greedy decisions with a linearly decaying epsilon.
RunRecords run_online_training(const ExperimentSpec& spec, DqnAgent& agent,
                               const RunOptions& options = {});

/// Evaluation without learning. Throws std::logic_error for a training policy.
RunRecords run_test(const ExperimentSpec& spec, const Policy& policy,
                    const RunOptions& options = {});

/// Header of the per-step KPI CSV.
[[nodiscard]] std::string kpi_csv_header();
void write_kpi_row(std::ostream& out, const std::string& policy, Phase phase, double epsilon,
                   const StepRow& row);

/// Parses a KPI CSV written by the run functions back into records (rows kept).
[[nodiscard]] std::vector<RunRecords> read_kpi_csv(const std::filesystem::path& path);

}  // namespace pqos
