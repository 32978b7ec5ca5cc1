#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <span>
#include <vector>

#include "pqos/q_network.hpp"
#include "pqos/replay_buffer.hpp"

namespace pqos {

struct AgentConfig {
  double discount = 0.95;
  double learning_rate = 1e-4;
  double weight_decay = 1e-3;
  std::size_t batch_size = 10;
  std::size_t replay_capacity = 50000;
  std::size_t target_sync_period = 100;  // gradient steps between target copies
  double eps_start = 1.0;
  double eps_end = 0.05;
  int eps_decay_episodes = 0;  // 0: decay over the whole online phase
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_epsilon = 1e-8;
  std::uint64_t rng_seed = 1;

  void validate() const;
};

/// Linear decay from eps_start to eps_end over `decay_episodes`, flat afterwards.
[[nodiscard]] double epsilon_for_episode(const AgentConfig& config, int episode, int decay_episodes);

/// Uniform random action with probability `epsilon`, else the greedy one.
[[nodiscard]] std::size_t select_action(const QNetwork& net, const StateVector& state,
                                        double epsilon, std::mt19937_64& rng);

/// Double-Q bootstrap target: the online network picks the next action and the
/// target network values it.
[[nodiscard]] double double_q_target(const QNetwork& online, const QNetwork& target,
                                     const Transition& t, double discount);

/// Adam with decoupled weight decay.
class AdamW {
 public:
  AdamW(std::size_t n_params, double learning_rate, double weight_decay, double beta1 = 0.9,
        double beta2 = 0.999, double epsilon = 1e-8);

  void step(std::span<double> params, std::span<const double> grad);

  [[nodiscard]] std::uint64_t steps() const noexcept { return t_; }
  [[nodiscard]] const std::vector<double>& first_moment() const noexcept { return m_; }
  [[nodiscard]] const std::vector<double>& second_moment() const noexcept { return v_; }
  void restore(std::uint64_t t, std::vector<double> m, std::vector<double> v);

 private:
  double lr_;
  double wd_;
  double beta1_;
  double beta2_;
  double eps_;
  std::uint64_t t_ = 0;
  std::vector<double> m_;
  std::vector<double> v_;
};

/// Shared Double-DQN learner serving every vehicle of the cell.
class DqnAgent {
 public:
  explicit DqnAgent(const AgentConfig& config);

  [[nodiscard]] std::size_t act(const StateVector& state, double epsilon);

  void remember(const Transition& t) { buffer_.push(t); }

  /// Samples a batch and trains on it; nullopt while the buffer is not ready.
  std::optional<double> train_from_replay();

  /// One optimizer step on `batch`; returns the pre-update mean squared TD error.
  double train_batch(std::span<const Transition> batch);

  /// Mean squared TD error and its gradient w.r.t. the online parameters,
  /// treating targets as constants. Does not modify the agent.
  double loss_and_gradient(std::span<const Transition> batch, std::vector<double>& grad) const;

  /// Freezes learning: train_batch throws while frozen.
  void set_frozen(bool frozen) noexcept { frozen_ = frozen; }
  [[nodiscard]] bool frozen() const noexcept { return frozen_; }

  [[nodiscard]] const QNetwork& online() const noexcept { return online_; }
  [[nodiscard]] const QNetwork& target() const noexcept { return target_; }
  QNetwork& mutable_online() noexcept { return online_; }
  void sync_target() { target_ = online_; }

  [[nodiscard]] const AgentConfig& config() const noexcept { return config_; }
  [[nodiscard]] const ReplayBuffer& buffer() const noexcept { return buffer_; }
  [[nodiscard]] std::uint64_t gradient_steps() const noexcept { return optimizer_.steps(); }
  [[nodiscard]] const AdamW& optimizer() const noexcept { return optimizer_; }
  std::mt19937_64& rng() noexcept { return rng_; }

  /// Versioned text checkpoint. Floats are stored in hexadecimal so that a
  /// save/load cycle reproduces every parameter bit for bit.
  void save(const std::filesystem::path& path) const;
  /// Restores networks and optimizer state; throws CheckpointError.
  void load(const std::filesystem::path& path);

 private:
  AgentConfig config_;
  std::mt19937_64 rng_;
  QNetwork online_;
  QNetwork target_;
  AdamW optimizer_;
  ReplayBuffer buffer_;
  bool frozen_ = false;
};

/// Reads only the online network from a checkpoint.
[[nodiscard]] QNetwork load_network(const std::filesystem::path& path);

/// FNV-1a over the raw parameter bytes; used to prove weights did not change.
[[nodiscard]] std::uint64_t checksum(const QNetwork& net) noexcept;

}  // namespace pqos
