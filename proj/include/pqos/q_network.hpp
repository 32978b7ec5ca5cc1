#pragma once

#include <array>
#include <cstddef>
#include <random>
#include <span>
#include <vector>

#include "pqos/network_env.hpp"

namespace pqos {

using QValues = std::array<double, 3>;

/// Fully connected 8 -> 12 -> 6 -> 3 network, ReLU on the hidden layers and a
/// linear head. Parameters live in one flat vector laid out as
/// W1, b1, W2, b2, W3, b3 with row-major weights (row = output unit).
class QNetwork {
 public:
  static constexpr std::array<std::size_t, 4> kLayerSizes{8, 12, 6, 3};
  static constexpr std::size_t kNumLayers = 3;
  static constexpr std::size_t kInputSize = kLayerSizes.front();
  static constexpr std::size_t kOutputSize = kLayerSizes.back();

  /// All weights and biases zero.
  QNetwork();

  /// Uniform(-sqrt(6 / (fan_in + fan_out)), +...) weights, zero biases.
  static QNetwork glorot_uniform(std::mt19937_64& rng);

  [[nodiscard]] QValues forward(const StateVector& state) const;
  /// Throws std::domain_error unless `input` has exactly kInputSize entries.
  [[nodiscard]] QValues forward(std::span<const double> input) const;

  /// Adds d(output[action])/d(params) * upstream to `grad` for one input.
  void accumulate_gradient(std::span<const double> input, std::size_t action, double upstream,
                           std::span<double> grad) const;

  [[nodiscard]] static constexpr std::size_t parameter_count() noexcept {
    std::size_t n = 0;
    for (std::size_t l = 0; l < kNumLayers; ++l) {
      n += kLayerSizes[l] * kLayerSizes[l + 1] + kLayerSizes[l + 1];
    }
    return n;
  }

  [[nodiscard]] std::span<double> parameters() noexcept { return params_; }
  [[nodiscard]] std::span<const double> parameters() const noexcept { return params_; }

  double& weight(std::size_t layer, std::size_t out, std::size_t in);
  double& bias(std::size_t layer, std::size_t out);

  bool operator==(const QNetwork&) const = default;

 private:
  [[nodiscard]] static std::size_t weight_offset(std::size_t layer) noexcept;
  [[nodiscard]] static std::size_t bias_offset(std::size_t layer) noexcept;

  std::vector<double> params_;
};

/// Index of the largest q-value, lowest index on ties.
[[nodiscard]] std::size_t argmax(const QValues& q) noexcept;

}  // namespace pqos
