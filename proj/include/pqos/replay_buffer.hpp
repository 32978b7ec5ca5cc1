#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <vector>

#include "pqos/network_env.hpp"

namespace pqos {

struct Transition {
  StateVector state;
  std::size_t action = 0;  // index into kAgentActions
  double reward = 0.0;     // raw reward in [0, 1]
  StateVector next_state;
  bool terminal = false;

  bool operator==(const Transition&) const = default;
};

/// Fixed-capacity FIFO of transitions; the oldest entry is overwritten when full.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity);

  /// Throws std::domain_error on an invalid action or reward.
  void push(const Transition& t);

  /// `batch_size` distinct entries drawn uniformly, or nullopt while the buffer
  /// holds fewer than `batch_size` transitions.
  [[nodiscard]] std::optional<std::vector<Transition>> sample(std::size_t batch_size,
                                                              std::mt19937_64& rng) const;

  /// Indices (into storage order) of a uniform batch; exposed for statistics.
  [[nodiscard]] std::optional<std::vector<std::size_t>> sample_indices(
      std::size_t batch_size, std::mt19937_64& rng) const;

  [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
  [[nodiscard]] std::size_t capacity() const noexcept { return capacity_; }
  [[nodiscard]] bool ready(std::size_t batch_size) const noexcept {
    return batch_size > 0 && data_.size() >= batch_size;
  }
  /// i-th oldest stored transition.
  [[nodiscard]] const Transition& at(std::size_t i) const;

 private:
  std::size_t capacity_;
  std::size_t next_ = 0;  // slot overwritten by the next push once full
  std::vector<Transition> data_;
};

}  // namespace pqos
