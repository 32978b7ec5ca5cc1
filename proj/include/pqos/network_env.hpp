#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <random>
#include <span>
#include <vector>

#include "pqos/application_mode.hpp"
#include "pqos/link_adaptation.hpp"
#include "pqos/reward.hpp"
#include "pqos/sim_config.hpp"

namespace pqos {

/// Per-vehicle KPIs aggregated over one control period.
///
/// Cohort counters (`packets_generated`, `packets_delivered`, `packets_dropped`,
/// `packets_queued`) refer to the packets generated in this period, so
/// generated == delivered + dropped + queued always holds. Delay statistics cover
/// every packet delivered in the period, including late ones from earlier
/// periods; `delay_samples` counts them. When nothing was delivered the delay
/// fields hold the head-of-line waiting time (0 with an empty queue).
struct StepKpis {
  int mcs_index = 0;
  int ofdm_symbols_used = 0;
  double sinr_db = 0.0;
  double delay_mean = 0.0;
  double delay_max = 0.0;
  double delay_min = 0.0;
  double delay_std = 0.0;
  double prr = 1.0;
  std::uint64_t packets_generated = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t packets_dropped = 0;
  std::uint64_t packets_queued = 0;
  std::uint64_t delay_samples = 0;
};

/// Agent input: [mcs, ofdm_symbols, sinr, delay_mean, delay_max, delay_min,
/// delay_std, prr], each min-max normalized and clamped to [0, 1].
struct StateVector {
  static constexpr std::size_t kSize = 8;
  std::array<double, kSize> features{};

  bool operator==(const StateVector&) const = default;
};

[[nodiscard]] StateVector make_state(const StepKpis& kpis, const SimConfig& config);

/// Cumulative packet accounting for one vehicle since reset.
struct PacketTotals {
  std::uint64_t generated = 0;
  std::uint64_t delivered = 0;
  std::uint64_t dropped = 0;
  std::uint64_t queued = 0;
};

struct StepResult {
  std::vector<StateVector> states;
  std::vector<QosSample> qos;
  std::vector<StepKpis> kpis;
  bool done = false;
};

/// Single-cell uplink simulator.
///
/// Each control period is split into scheduling sub-slots. Per sub-slot the
/// vehicles move along the route, their shadowing evolves as an AR(1) process,
/// link adaptation picks an MCS from the SINR, frames are generated and
/// packetized, packets older than the drop horizon are discarded and the cell's
/// symbols are shared round-robin among backlogged vehicles with a usable link.
///
/// Deterministic for a given (config, seed, action sequence).
class NetworkEnv {
 public:
  explicit NetworkEnv(SimConfig config);

  /// Starts a new episode. Returns the initial state of every vehicle.
  std::vector<StateVector> reset(std::uint64_t seed);

  /// Advances one control period with one mode per vehicle.
  StepResult step(std::span<const ModeId> modes);

  [[nodiscard]] bool done() const noexcept { return step_ >= steps_per_episode_; }
  [[nodiscard]] int step_index() const noexcept { return step_; }
  [[nodiscard]] int steps_per_episode() const noexcept { return steps_per_episode_; }
  [[nodiscard]] int n_vehicles() const noexcept { return config_.n_vehicles; }
  [[nodiscard]] const SimConfig& config() const noexcept { return config_; }
  [[nodiscard]] const McsTable& mcs_table() const noexcept { return mcs_table_; }

  [[nodiscard]] PacketTotals totals(int vehicle) const;
  /// Distance from the vehicle to the gNB antenna, meters.
  [[nodiscard]] double distance_m(int vehicle) const;
  /// SINR of the vehicle at the current instant, dB.
  [[nodiscard]] double current_sinr_db(int vehicle) const;
  /// Bits one OFDM symbol carries at the given spectral efficiency.
  [[nodiscard]] double bits_per_symbol(double spectral_efficiency) const noexcept;

 private:
  struct Packet {
    std::int64_t created_ms;
    std::uint32_t bytes;
    std::int32_t step;
  };

  struct Vehicle {
    double route_pos_m = 0.0;
    double shadow_db = 0.0;
    ModeId mode = ModeId::kCompressed;
    std::deque<Packet> queue;
    double head_sent_bits = 0.0;
    std::uint64_t backlog_bytes = 0;
    PacketTotals totals;
  };

  struct PeriodAccumulator {
    double sinr_sum = 0.0;
    double mcs_sum = 0.0;
    int symbols = 0;
    std::uint64_t generated = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t delay_count = 0;
    double delay_mean = 0.0;
    double delay_m2 = 0.0;
    double delay_min = 0.0;
    double delay_max = 0.0;
    ModeId frame_mode = ModeId::kCompressed;
    bool frame_seen = false;

    void add_delay(double d);
  };

  void advance_mobility(Vehicle& v, double dt_ms);
  void advance_shadowing(Vehicle& v, double dt_ms);
  [[nodiscard]] double sinr_db(const Vehicle& v) const;
  void generate_frame(Vehicle& v, ModeId mode, std::int64_t now_ms, PeriodAccumulator& acc);
  void drop_expired(Vehicle& v, std::int64_t now_ms, PeriodAccumulator& acc);
  void transmit(Vehicle& v, double capacity_bits, std::int64_t done_ms, PeriodAccumulator& acc);
  [[nodiscard]] StepKpis finish_period(const Vehicle& v, const PeriodAccumulator& acc,
                                       std::int64_t now_ms) const;

  SimConfig config_;
  McsTable mcs_table_;
  int steps_per_episode_ = 0;
  double noise_dbm_ = 0.0;
  double fspl_ref_db_ = 0.0;
  double route_perimeter_m_ = 0.0;

  int step_ = 0;
  std::size_t rr_offset_ = 0;
  std::vector<Vehicle> vehicles_;
  std::mt19937_64 shadow_rng_;
  std::mt19937_64 payload_rng_;
  bool started_ = false;
};

}  // namespace pqos
