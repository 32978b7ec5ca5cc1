#pragma once

#include <cstdint>
#include <filesystem>

namespace pqos {

struct ChannelParams {
  double pathloss_exponent = 3.0;
  double reference_distance_m = 1.0;  // free-space loss is taken at this distance
  double shadowing_std_db = 4.0;
  double shadowing_decorrelation_m = 20.0;
  double noise_figure_db = 9.0;
  double antenna_gain_db = 12.0;      // combined TX + RX gain
  double interference_margin_db = 3.0;
  double gnb_height_m = 25.0;
  double ue_height_m = 1.5;
  double cell_radius_m = 400.0;
};

/// Closed rectangular loop driven at constant speed; the gNB sits at the origin.
struct RouteParams {
  double center_x_m = 0.0;
  double center_y_m = 100.0;
  double half_length_m = 150.0;
  double half_width_m = 60.0;
  double speed_mps = 12.0;
};

struct TrafficParams {
  std::uint32_t packet_size_bytes = 1500;
  double payload_cv = 0.10;
  double payload_floor_kb = 1.0;
  double drop_after_ms = 400.0;
};

struct SchedulerParams {
  int symbols_per_subslot = 14;
  int subslot_ms = 1;
  double resource_share = 0.5;  // fraction of cell resources usable by the uplink stream
};

/// Min-max bounds used to normalize KPIs into the agent state.
struct FeatureBounds {
  double delay_max_ms = 400.0;
  double sinr_min_db = -10.0;
  double sinr_max_db = 40.0;
  double mcs_max = 14.0;
};

struct SimConfig {
  double carrier_frequency_ghz = 3.5;
  double bandwidth_mhz = 50.0;
  double tx_power_dbm = 23.0;
  int control_period_ms = 100;
  double episode_duration_s = 80.0;
  int n_vehicles = 1;
  double frame_rate_hz = 10.0;
  std::uint64_t rng_seed = 1;
  int action_delay_ms = 0;  // latency before a notified mode takes effect
  std::filesystem::path mcs_table_path;  // empty: built-in table

  ChannelParams channel;
  RouteParams route;
  TrafficParams traffic;
  SchedulerParams scheduler;
  FeatureBounds bounds;

  /// Throws ConfigError on the first invalid field.
  void validate() const;

  [[nodiscard]] int steps_per_episode() const;
  [[nodiscard]] int frame_interval_ms() const;
  [[nodiscard]] int symbols_per_period() const;
};

}  // namespace pqos
