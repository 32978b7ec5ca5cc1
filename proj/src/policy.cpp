#include "pqos/policy.hpp"

#include <stdexcept>

namespace pqos {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

Policy make_constant_policy(ModeId mode) {
  (void)mode_info(mode);
  return ConstantPolicy{mode};
}

Policy make_greedy_policy(const std::filesystem::path& checkpoint) {
  return DqlGreedyPolicy{load_network(checkpoint)};
}

ModeId decide(const Policy& policy, const StateVector& state, std::mt19937_64& rng) {
  return std::visit(
      Overloaded{
          [](const ConstantPolicy& p) { return p.mode; },
          [&](const DqlGreedyPolicy& p) {
            return action_to_mode(select_action(p.network, state, 0.0, rng));
          },
          [&](const DqlTrainingPolicy& p) {
            if (p.agent == nullptr) {
              throw std::logic_error("training policy without an agent");
            }
            return action_to_mode(p.agent->act(state, p.epsilon));
          },
      },
      policy);
}

std::string policy_label(const Policy& policy) {
  if (const auto* c = std::get_if<ConstantPolicy>(&policy)) {
    return "constant:" + std::to_string(mode_number(c->mode));
  }
  return "dql";
}

}  // namespace pqos
