#include "pqos/sim_config.hpp"

#include <cmath>
#include <string>

#include "pqos/errors.hpp"

namespace pqos {
namespace {

void require(bool ok, const std::string& message) {
  if (!ok) {
    throw ConfigError(message);
  }
}

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

}  // namespace

void SimConfig::validate() const {
  require(positive(carrier_frequency_ghz), "sim.carrier_frequency_ghz must be positive");
  require(positive(bandwidth_mhz), "sim.bandwidth_mhz must be positive");
  require(std::isfinite(tx_power_dbm), "sim.tx_power_dbm must be finite");
  require(control_period_ms > 0, "sim.control_period_ms must be positive");
  require(positive(episode_duration_s), "sim.episode_duration_s must be positive");
  require(n_vehicles > 0, "sim.n_vehicles must be at least 1");
  require(positive(frame_rate_hz), "sim.frame_rate_hz must be positive");
  require(action_delay_ms >= 0 && action_delay_ms < control_period_ms,
          "sim.action_delay_ms must lie in [0, control_period_ms)");

  const double episode_ms = episode_duration_s * 1000.0;
  require(std::fabs(episode_ms - std::round(episode_ms)) < 1e-9,
          "sim.episode_duration_s must be a whole number of milliseconds");
  require(static_cast<long long>(std::llround(episode_ms)) % control_period_ms == 0,
          "sim.control_period_ms must divide the episode duration");
  const double interval = 1000.0 / frame_rate_hz;
  require(std::fabs(interval - std::round(interval)) < 1e-9,
          "sim.frame_rate_hz must give a whole-millisecond frame interval");

  require(std::isfinite(channel.pathloss_exponent) && channel.pathloss_exponent > 0.0,
          "channel.pathloss_exponent must be positive");
  require(positive(channel.reference_distance_m), "channel.reference_distance_m must be positive");
  require(std::isfinite(channel.shadowing_std_db) && channel.shadowing_std_db >= 0.0,
          "channel.shadowing_std_db must be non-negative");
  require(positive(channel.shadowing_decorrelation_m),
          "channel.shadowing_decorrelation_m must be positive");
  require(positive(channel.cell_radius_m), "channel.cell_radius_m must be positive");

  require(positive(route.half_length_m) && positive(route.half_width_m),
          "route half extents must be positive");
  require(std::isfinite(route.speed_mps) && route.speed_mps >= 0.0,
          "route.speed_mps must be non-negative");
  const double far_x = std::fabs(route.center_x_m) + route.half_length_m;
  const double far_y = std::fabs(route.center_y_m) + route.half_width_m;
  require(std::hypot(far_x, far_y) <= channel.cell_radius_m,
          "route must lie inside the cell radius");

  require(traffic.packet_size_bytes > 0, "traffic.packet_size_bytes must be positive");
  require(std::isfinite(traffic.payload_cv) && traffic.payload_cv >= 0.0,
          "traffic.payload_cv must be non-negative");
  require(positive(traffic.payload_floor_kb), "traffic.payload_floor_kb must be positive");
  require(positive(traffic.drop_after_ms), "traffic.drop_after_ms must be positive");

  require(scheduler.symbols_per_subslot > 0, "scheduler.symbols_per_subslot must be positive");
  require(scheduler.subslot_ms > 0 && control_period_ms % scheduler.subslot_ms == 0,
          "scheduler.subslot_ms must divide the control period");
  require(frame_interval_ms() % scheduler.subslot_ms == 0,
          "scheduler.subslot_ms must divide the frame interval");
  require(scheduler.resource_share > 0.0 && scheduler.resource_share <= 1.0,
          "scheduler.resource_share must lie in (0, 1]");

  require(positive(bounds.delay_max_ms), "state.delay_max_ms must be positive");
  require(std::isfinite(bounds.sinr_min_db) && bounds.sinr_max_db > bounds.sinr_min_db,
          "state SINR bounds must be increasing");
  require(positive(bounds.mcs_max), "state.mcs_max must be positive");
}

int SimConfig::steps_per_episode() const {
  return static_cast<int>(std::llround(episode_duration_s * 1000.0)) / control_period_ms;
}

int SimConfig::frame_interval_ms() const {
  return static_cast<int>(std::llround(1000.0 / frame_rate_hz));
}

int SimConfig::symbols_per_period() const {
  return scheduler.symbols_per_subslot * (control_period_ms / scheduler.subslot_ms);
}

}  // namespace pqos
