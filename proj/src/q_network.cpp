#include "pqos/q_network.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace pqos {
namespace {

constexpr std::size_t kMaxWidth = 12;

}  // namespace

QNetwork::QNetwork() : params_(parameter_count(), 0.0) {}

std::size_t QNetwork::weight_offset(std::size_t layer) noexcept {
  std::size_t off = 0;
  for (std::size_t l = 0; l < layer; ++l) {
    off += kLayerSizes[l] * kLayerSizes[l + 1] + kLayerSizes[l + 1];
  }
  return off;
}

std::size_t QNetwork::bias_offset(std::size_t layer) noexcept {
  return weight_offset(layer) + kLayerSizes[layer] * kLayerSizes[layer + 1];
}

double& QNetwork::weight(std::size_t layer, std::size_t out, std::size_t in) {
  if (layer >= kNumLayers || out >= kLayerSizes[layer + 1] || in >= kLayerSizes[layer]) {
    throw std::out_of_range("QNetwork::weight index out of range");
  }
  return params_[weight_offset(layer) + out * kLayerSizes[layer] + in];
}

double& QNetwork::bias(std::size_t layer, std::size_t out) {
  if (layer >= kNumLayers || out >= kLayerSizes[layer + 1]) {
    throw std::out_of_range("QNetwork::bias index out of range");
  }
  return params_[bias_offset(layer) + out];
}

QNetwork QNetwork::glorot_uniform(std::mt19937_64& rng) {
  QNetwork net;
  for (std::size_t l = 0; l < kNumLayers; ++l) {
    const double fan_in = static_cast<double>(kLayerSizes[l]);
    const double fan_out = static_cast<double>(kLayerSizes[l + 1]);
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    std::uniform_real_distribution<double> dist(-limit, limit);
    const std::size_t off = weight_offset(l);
    for (std::size_t i = 0; i < kLayerSizes[l] * kLayerSizes[l + 1]; ++i) {
      net.params_[off + i] = dist(rng);
    }
  }
  return net;
}

QValues QNetwork::forward(const StateVector& state) const { return forward(state.features); }

QValues QNetwork::forward(std::span<const double> input) const {
  if (input.size() != kInputSize) {
    throw std::domain_error("QNetwork::forward expects " + std::to_string(kInputSize) +
                            " inputs, got " + std::to_string(input.size()));
  }
  std::array<double, kMaxWidth> cur{};
  std::array<double, kMaxWidth> next{};
  std::copy(input.begin(), input.end(), cur.begin());
  for (std::size_t l = 0; l < kNumLayers; ++l) {
    const std::size_t in = kLayerSizes[l];
    const std::size_t out = kLayerSizes[l + 1];
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    for (std::size_t o = 0; o < out; ++o) {
      double z = b[o];
      for (std::size_t i = 0; i < in; ++i) {
        z += w[o * in + i] * cur[i];
      }
      next[o] = (l + 1 < kNumLayers) ? std::max(z, 0.0) : z;
    }
    cur = next;
  }
  return {cur[0], cur[1], cur[2]};
}

void QNetwork::accumulate_gradient(std::span<const double> input, std::size_t action,
                                   double upstream, std::span<double> grad) const {
  if (input.size() != kInputSize) {
    throw std::domain_error("QNetwork::accumulate_gradient: wrong input length");
  }
  if (action >= kOutputSize) {
    throw std::domain_error("QNetwork::accumulate_gradient: action out of range");
  }
  if (grad.size() != params_.size()) {
    throw std::domain_error("QNetwork::accumulate_gradient: gradient size mismatch");
  }

  // Forward pass keeping every layer's activations.
  std::array<std::array<double, kMaxWidth>, kNumLayers + 1> act{};
  std::copy(input.begin(), input.end(), act[0].begin());
  for (std::size_t l = 0; l < kNumLayers; ++l) {
    const std::size_t in = kLayerSizes[l];
    const std::size_t out = kLayerSizes[l + 1];
    const double* w = params_.data() + weight_offset(l);
    const double* b = params_.data() + bias_offset(l);
    for (std::size_t o = 0; o < out; ++o) {
      double z = b[o];
      for (std::size_t i = 0; i < in; ++i) {
        z += w[o * in + i] * act[l][i];
      }
      act[l + 1][o] = (l + 1 < kNumLayers) ? std::max(z, 0.0) : z;
    }
  }

  std::array<double, kMaxWidth> delta{};
  delta[action] = upstream;
  for (std::size_t l = kNumLayers; l-- > 0;) {
    const std::size_t in = kLayerSizes[l];
    const std::size_t out = kLayerSizes[l + 1];
    const double* w = params_.data() + weight_offset(l);
    double* gw = grad.data() + weight_offset(l);
    double* gb = grad.data() + bias_offset(l);
    std::array<double, kMaxWidth> prev{};
    for (std::size_t o = 0; o < out; ++o) {
      if (delta[o] == 0.0) {
        continue;
      }
      gb[o] += delta[o];
      for (std::size_t i = 0; i < in; ++i) {
        gw[o * in + i] += delta[o] * act[l][i];
        prev[i] += w[o * in + i] * delta[o];
      }
    }
    if (l > 0) {
      // ReLU derivative, taken as 0 at the kink.
      for (std::size_t i = 0; i < in; ++i) {
        if (act[l][i] <= 0.0) {
          prev[i] = 0.0;
        }
      }
    }
    delta = prev;
  }
}

std::size_t argmax(const QValues& q) noexcept {
  std::size_t best = 0;
  for (std::size_t i = 1; i < q.size(); ++i) {
    if (q[i] > q[best]) {
      best = i;
    }
  }
  return best;
}

}  // namespace pqos
