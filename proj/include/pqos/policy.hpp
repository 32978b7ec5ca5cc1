#pragma once

#include <filesystem>
#include <memory>
#include <random>
#include <string>
#include <variant>

#include "pqos/application_mode.hpp"
#include "pqos/dqn_agent.hpp"

namespace pqos {

/// Keeps one application mode for the whole run.
struct ConstantPolicy {
  ModeId mode;
};

/// Greedy (epsilon = 0) decisions from a frozen network.
struct DqlGreedyPolicy {
  QNetwork network;
};

/// Epsilon-greedy decisions from a learning agent owned elsewhere.
struct DqlTrainingPolicy {
  DqnAgent* agent;
  double epsilon;
};

using Policy = std::variant<ConstantPolicy, DqlGreedyPolicy, DqlTrainingPolicy>;

[[nodiscard]] Policy make_constant_policy(ModeId mode);
/// Throws CheckpointError when the checkpoint is unreadable.
[[nodiscard]] Policy make_greedy_policy(const std::filesystem::path& checkpoint);

/// Mode the vehicle should use for the next control period.
[[nodiscard]] ModeId decide(const Policy& policy, const StateVector& state, std::mt19937_64& rng);

/// "constant:<mode>" or "dql".
[[nodiscard]] std::string policy_label(const Policy& policy);

}  // namespace pqos
