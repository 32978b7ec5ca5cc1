#include "pqos/replay_buffer.hpp"

#include <algorithm>
#include <stdexcept>

#include "pqos/application_mode.hpp"

namespace pqos {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) {
    throw std::invalid_argument("ReplayBuffer capacity must be positive");
  }
  data_.reserve(std::min<std::size_t>(capacity, 1 << 16));
}

void ReplayBuffer::push(const Transition& t) {
  if (t.action >= kNumActions) {
    throw std::domain_error("transition action out of range");
  }
  if (!(t.reward >= 0.0 && t.reward <= 1.0)) {
    throw std::domain_error("transition reward outside [0, 1]");
  }
  if (data_.size() < capacity_) {
    data_.push_back(t);
    return;
  }
  data_[next_] = t;
  next_ = (next_ + 1) % capacity_;
}

const Transition& ReplayBuffer::at(std::size_t i) const {
  if (i >= data_.size()) {
    throw std::out_of_range("ReplayBuffer::at");
  }
  return data_[(next_ + i) % data_.size()];
}

std::optional<std::vector<std::size_t>> ReplayBuffer::sample_indices(std::size_t batch_size,
                                                                     std::mt19937_64& rng) const {
  if (!ready(batch_size)) {
    return std::nullopt;
  }
  std::uniform_int_distribution<std::size_t> pick(0, data_.size() - 1);
  std::vector<std::size_t> idx;
  idx.reserve(batch_size);
  while (idx.size() < batch_size) {
    const std::size_t i = pick(rng);
    if (std::find(idx.begin(), idx.end(), i) == idx.end()) {
      idx.push_back(i);
    }
  }
  return idx;
}

std::optional<std::vector<Transition>> ReplayBuffer::sample(std::size_t batch_size,
                                                            std::mt19937_64& rng) const {
  auto idx = sample_indices(batch_size, rng);
  if (!idx) {
    return std::nullopt;
  }
  std::vector<Transition> batch;
  batch.reserve(batch_size);
  for (const auto i : *idx) {
    batch.push_back(data_[i]);
  }
  return batch;
}

}  // namespace pqos
