#pragma once

namespace pqos {

/// Weights and tolerances of the joint QoS/QoE reward.
struct RewardParams {
  double alpha = 1.0;     // QoE weight in [0, 1]
  double delta_m = 50.0;  // maximum tolerated mean delay, ms
  double cd_m = 45.0;     // maximum tolerated Chamfer distance

  /// Throws ConfigError when a field is out of range.
  void validate() const;
};

/// Per-vehicle QoS/QoE measurement over one control period.
struct QosSample {
  double prr = 0.0;         // packets delivered within the period / generated
  double mean_delay = 0.0;  // ms, over packets delivered within the period
  double cd = 0.0;          // Chamfer distance of the active application mode
  bool has_packets = true;  // false when the period generated no packets
};

/// Mean delay strictly below delta_m and every packet received.
[[nodiscard]] bool qos_met(const QosSample& sample, const RewardParams& params) noexcept;

/// Piece-wise reward in [0, 1]: zero unless qos_met holds, otherwise the
/// alpha-weighted sum of the normalized delay and Chamfer-distance margins.
///
/// Throws ConfigError if sample.cd exceeds params.cd_m and std::domain_error on
/// negative or non-finite inputs.
[[nodiscard]] double compute_reward(const QosSample& sample, const RewardParams& params);

/// Affine map [0, 1] -> [-1, 1] used only when reporting.
[[nodiscard]] double normalize_reward(double r);

}  // namespace pqos
