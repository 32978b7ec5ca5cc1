#include <doctest.h>

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "pqos/dqn_agent.hpp"
#include "pqos/errors.hpp"

using namespace pqos;

namespace {

StateVector random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  StateVector s;
  for (auto& f : s.features) {
    f = u(rng);
  }
  return s;
}

std::vector<Transition> random_batch(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> a(0, 2);
  std::vector<Transition> batch;
  for (std::size_t i = 0; i < n; ++i) {
    batch.push_back({random_state(rng), a(rng), u(rng), random_state(rng), u(rng) < 0.2});
  }
  return batch;
}

QNetwork with_output_biases(double b0, double b1, double b2) {
  QNetwork net;
  net.bias(2, 0) = b0;
  net.bias(2, 1) = b1;
  net.bias(2, 2) = b2;
  return net;
}

double loss_with_fixed_targets(const QNetwork& net, const std::vector<Transition>& batch,
                               const std::vector<double>& targets) {
  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double e = net.forward(batch[i].state)[batch[i].action] - targets[i];
    loss += e * e;
  }
  return loss / static_cast<double>(batch.size());
}

}  // namespace

TEST_CASE("greedy selection and tie breaking") {
  std::mt19937_64 rng(1);
  const StateVector s;
  CHECK(select_action(with_output_biases(0.1, 0.9, 0.2), s, 0.0, rng) == 1);
  CHECK(select_action(with_output_biases(0.3, 0.3, 0.3), s, 0.0, rng) == 0);
}

TEST_CASE("full exploration is uniform over the actions") {
  std::mt19937_64 rng(2);
  const auto net = with_output_biases(0.0, 5.0, 0.0);
  std::array<int, 3> counts{};
  const int draws = 30000;
  for (int i = 0; i < draws; ++i) {
    ++counts[select_action(net, StateVector{}, 1.0, rng)];
  }
  const double expected = draws / 3.0;
  const double sigma = std::sqrt(draws * (1.0 / 3.0) * (2.0 / 3.0));
  for (int c : counts) {
    CHECK(std::abs(c - expected) <= 3.0 * sigma);
  }
}

TEST_CASE("epsilon decays linearly and then stays flat") {
  AgentConfig c;
  CHECK(epsilon_for_episode(c, 0, 11) == 1.0);
  CHECK(epsilon_for_episode(c, 5, 11) == doctest::Approx(0.525));
  CHECK(epsilon_for_episode(c, 10, 11) == doctest::Approx(0.05));
  CHECK(epsilon_for_episode(c, 50, 11) == doctest::Approx(0.05));
  double previous = 2.0;
  for (int e = 0; e < 100; ++e) {
    const double eps = epsilon_for_episode(c, e, 100);
    CHECK(eps <= previous);
    previous = eps;
  }
}

TEST_CASE("double-Q targets") {
  const auto zero = QNetwork{};
  Transition t{{}, 0, 0.7, {}, true};
  CHECK(double_q_target(zero, zero, t, 0.95) == 0.7);

  const auto net = with_output_biases(1.0, 0.0, 0.0);
  t = Transition{{}, 0, 0.5, {}, false};
  CHECK(double_q_target(net, net, t, 0.95) == doctest::Approx(1.45));

  // The online network chooses action 0, the target network values it.
  const auto online = with_output_biases(1.0, 0.0, 0.0);
  const auto target = with_output_biases(0.2, 0.0, 0.9);
  CHECK(double_q_target(online, target, t, 0.9) == doctest::Approx(0.5 + 0.9 * 0.2));

  std::mt19937_64 rng(3);
  const auto same = QNetwork::glorot_uniform(rng);
  for (int i = 0; i < 50; ++i) {
    Transition u{random_state(rng), 1, 0.3, random_state(rng), false};
    const auto q = same.forward(u.next_state);
    const double classic = 0.3 + 0.95 * std::max({q[0], q[1], q[2]});
    CHECK(double_q_target(same, same, u, 0.95) == doctest::Approx(classic).epsilon(1e-14));
  }
}

TEST_CASE("analytic gradient matches central differences") {
  AgentConfig c;
  c.rng_seed = 4;
  DqnAgent agent(c);
  std::mt19937_64 rng(5);
  for (int b = 0; b < 5; ++b) {
    const auto batch = random_batch(rng, 10);
    std::vector<double> targets;
    for (const auto& t : batch) {
      targets.push_back(double_q_target(agent.online(), agent.target(), t, c.discount));
    }
    std::vector<double> grad;
    const double loss = agent.loss_and_gradient(batch, grad);
    CHECK(loss == doctest::Approx(loss_with_fixed_targets(agent.online(), batch, targets)));

    const double h = 1e-5;
    QNetwork probe = agent.online();
    for (std::size_t i = 0; i < QNetwork::parameter_count(); ++i) {
      const double orig = probe.parameters()[i];
      probe.parameters()[i] = orig + h;
      const double up = loss_with_fixed_targets(probe, batch, targets);
      probe.parameters()[i] = orig - h;
      const double down = loss_with_fixed_targets(probe, batch, targets);
      probe.parameters()[i] = orig;
      const double numeric = (up - down) / (2.0 * h);
      const double err = std::abs(numeric - grad[i]) / std::max(1e-8, std::abs(numeric) + std::abs(grad[i]));
      CHECK(err < 1e-4);
    }
  }
}

TEST_CASE("first AdamW step moves each parameter by about the learning rate") {
  AdamW opt(3, 0.01, 0.0);
  std::vector<double> p{1.0, -2.0, 0.5};
  const std::vector<double> g{0.3, -4.0, 0.0};
  opt.step(p, g);
  CHECK(p[0] == doctest::Approx(1.0 - 0.01).epsilon(1e-3));
  CHECK(p[1] == doctest::Approx(-2.0 + 0.01).epsilon(1e-3));
  CHECK(p[2] == 0.5);
  CHECK(opt.steps() == 1);
}

TEST_CASE("a zero-error batch only applies weight decay") {
  AgentConfig c;
  c.rng_seed = 6;
  c.weight_decay = 0.01;
  c.learning_rate = 0.001;
  DqnAgent agent(c);
  std::mt19937_64 rng(7);
  std::vector<Transition> batch;
  for (int i = 0; i < 10; ++i) {
    const auto s = random_state(rng);
    const std::size_t a = static_cast<std::size_t>(i % 3);
    batch.push_back({s, a, agent.online().forward(s)[a], s, true});
  }
  // Rewards outside [0, 1] are fine here: the batch never goes through the buffer.
  const auto before = agent.online();
  const double loss = agent.train_batch(batch);
  CHECK(loss == doctest::Approx(0.0).epsilon(1e-24));
  for (std::size_t i = 0; i < QNetwork::parameter_count(); ++i) {
    const double p = before.parameters()[i];
    CHECK(agent.online().parameters()[i] == doctest::Approx(p - 0.001 * 0.01 * p).epsilon(1e-12));
  }
}

TEST_CASE("the target network lags until the sync period") {
  AgentConfig c;
  c.rng_seed = 8;
  c.target_sync_period = 5;
  c.learning_rate = 0.01;
  DqnAgent agent(c);
  std::mt19937_64 rng(9);
  const auto initial_target = agent.target();
  for (int i = 1; i <= 4; ++i) {
    agent.train_batch(random_batch(rng, 10));
    CHECK(agent.target() == initial_target);
    CHECK_FALSE(agent.online() == initial_target);
  }
  agent.train_batch(random_batch(rng, 10));
  CHECK(agent.target() == agent.online());
  agent.train_batch(random_batch(rng, 10));
  CHECK_FALSE(agent.target() == agent.online());
}

TEST_CASE("training is reproducible for a fixed seed") {
  auto train = [](std::uint64_t seed) {
    AgentConfig c;
    c.rng_seed = seed;
    DqnAgent agent(c);
    std::mt19937_64 rng(seed + 100);
    for (int i = 0; i < 40; ++i) {
      const auto batch = random_batch(rng, 1);
      agent.remember(batch[0]);
      (void)agent.train_from_replay();
    }
    return agent.online();
  };
  CHECK(train(10) == train(10));
  CHECK_FALSE(train(10) == train(11));
}

TEST_CASE("replay training waits for a full batch") {
  AgentConfig c;
  DqnAgent agent(c);
  std::mt19937_64 rng(12);
  for (int i = 0; i < 9; ++i) {
    agent.remember(random_batch(rng, 1)[0]);
    CHECK_FALSE(agent.train_from_replay().has_value());
  }
  agent.remember(random_batch(rng, 1)[0]);
  CHECK(agent.train_from_replay().has_value());
  CHECK(agent.gradient_steps() == 1);
}

TEST_CASE("batch errors and frozen agents") {
  AgentConfig c;
  DqnAgent agent(c);
  std::mt19937_64 rng(13);
  CHECK_THROWS_AS((void)agent.train_batch({}), std::domain_error);
  CHECK_THROWS_AS((void)agent.train_batch(random_batch(rng, 4)), std::domain_error);
  agent.set_frozen(true);
  CHECK_THROWS_AS((void)agent.train_batch(random_batch(rng, 10)), std::logic_error);

  AgentConfig bad;
  bad.discount = 1.0;
  CHECK_THROWS_AS(DqnAgent{bad}, ConfigError);
}

TEST_CASE("checkpoints round-trip bit for bit") {
  AgentConfig c;
  c.rng_seed = 14;
  DqnAgent agent(c);
  std::mt19937_64 rng(15);
  for (int i = 0; i < 7; ++i) {
    agent.train_batch(random_batch(rng, 10));
  }
  const auto path = std::filesystem::temp_directory_path() / "pqos_ckpt_test.txt";
  agent.save(path);

  AgentConfig other = c;
  other.rng_seed = 99;
  DqnAgent restored(other);
  restored.load(path);
  CHECK(restored.online() == agent.online());
  CHECK(restored.target() == agent.target());
  CHECK(restored.optimizer().steps() == 7);
  CHECK(restored.optimizer().first_moment() == agent.optimizer().first_moment());
  CHECK(restored.optimizer().second_moment() == agent.optimizer().second_moment());
  CHECK(checksum(load_network(path)) == checksum(agent.online()));

  // A further identical step keeps both agents in lock step.
  const auto batch = random_batch(rng, 10);
  agent.train_batch(batch);
  restored.train_batch(batch);
  CHECK(restored.online() == agent.online());
}

TEST_CASE("corrupt checkpoints are rejected") {
  AgentConfig c;
  DqnAgent agent(c);
  const auto path = std::filesystem::temp_directory_path() / "pqos_ckpt_bad.txt";
  agent.save(path);
  std::stringstream text;
  {
    std::ifstream in(path);
    text << in.rdbuf();
  }
  const std::string good = text.str();

  auto write = [&](const std::string& body) {
    std::ofstream out(path, std::ios::trunc);
    out << body;
  };
  write(good.substr(0, good.size() / 2));
  CHECK_THROWS_AS(agent.load(path), CheckpointError);
  std::string wrong_shape = good;
  wrong_shape.replace(wrong_shape.find("layers 8 12"), 11, "layers 8 13");
  write(wrong_shape);
  CHECK_THROWS_AS(agent.load(path), CheckpointError);
  std::string wrong_magic = good;
  wrong_magic[0] = 'x';
  write(wrong_magic);
  CHECK_THROWS_AS((void)load_network(path), CheckpointError);
  CHECK_THROWS_AS(agent.load(path.string() + ".missing"), CheckpointError);
}

TEST_CASE("replay buffer evicts the oldest entry") {
  ReplayBuffer buf(3);
  for (int i = 0; i < 5; ++i) {
    buf.push({{}, 0, i / 10.0, {}, false});
  }
  CHECK(buf.size() == 3);
  CHECK(buf.at(0).reward == doctest::Approx(0.2));
  CHECK(buf.at(1).reward == doctest::Approx(0.3));
  CHECK(buf.at(2).reward == doctest::Approx(0.4));
  CHECK_THROWS_AS(buf.push({{}, 3, 0.0, {}, false}), std::domain_error);
  CHECK_THROWS_AS(buf.push({{}, 0, 1.5, {}, false}), std::domain_error);
}

TEST_CASE("replay sampling is uniform and without replacement") {
  ReplayBuffer buf(10);
  std::mt19937_64 rng(16);
  CHECK_FALSE(buf.sample(1, rng).has_value());
  for (int i = 0; i < 5; ++i) {
    buf.push({{}, 0, i / 10.0, {}, false});
  }
  CHECK_FALSE(buf.sample(6, rng).has_value());
  std::array<int, 5> counts{};
  const int draws = 10000;
  for (int d = 0; d < draws; ++d) {
    const auto idx = buf.sample_indices(2, rng);
    REQUIRE(idx.has_value());
    CHECK((*idx)[0] != (*idx)[1]);
    for (auto i : *idx) {
      ++counts[i];
    }
  }
  // Each index appears in a 2-of-5 draw with probability 0.4.
  const double sigma = std::sqrt(draws * 0.4 * 0.6);
  for (int c : counts) {
    CHECK(std::abs(c - draws * 0.4) <= 4.0 * sigma);
  }
}
