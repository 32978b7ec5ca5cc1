#include "pqos/reward.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pqos/errors.hpp"

namespace pqos {

void RewardParams::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw ConfigError("reward.alpha must lie in [0, 1], got " + std::to_string(alpha));
  }
  if (!(delta_m > 0.0) || !std::isfinite(delta_m)) {
    throw ConfigError("reward.delta_m must be positive, got " + std::to_string(delta_m));
  }
  if (!(cd_m > 0.0) || !std::isfinite(cd_m)) {
    throw ConfigError("reward.cd_m must be positive, got " + std::to_string(cd_m));
  }
}

bool qos_met(const QosSample& sample, const RewardParams& params) noexcept {
  return sample.has_packets && sample.mean_delay < params.delta_m && sample.prr == 1.0;
}

double compute_reward(const QosSample& sample, const RewardParams& params) {
  params.validate();
  if (!(sample.prr >= 0.0 && sample.prr <= 1.0)) {
    throw std::domain_error("reward: prr outside [0, 1]");
  }
  if (!(sample.mean_delay >= 0.0) || !std::isfinite(sample.mean_delay)) {
    throw std::domain_error("reward: mean delay must be finite and non-negative");
  }
  if (!(sample.cd >= 0.0) || !std::isfinite(sample.cd)) {
    throw std::domain_error("reward: Chamfer distance must be finite and non-negative");
  }
  if (sample.cd > params.cd_m) {
    throw ConfigError("reward: application-mode Chamfer distance exceeds cd_m");
  }
  if (!qos_met(sample, params)) {
    return 0.0;
  }
  return (1.0 - params.alpha) * (params.delta_m - sample.mean_delay) / params.delta_m +
         params.alpha * (params.cd_m - sample.cd) / params.cd_m;
}

double normalize_reward(double r) {
  if (!(r >= 0.0 && r <= 1.0)) {
    throw std::domain_error("normalize_reward: input outside [0, 1]");
  }
  return 2.0 * r - 1.0;
}

}  // namespace pqos
