#include "pqos/dqn_agent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pqos/application_mode.hpp"
#include "pqos/errors.hpp"

namespace pqos {
namespace {

constexpr const char* kMagic = "pqos-qnetwork-checkpoint";
constexpr int kFormatVersion = 1;

std::string hex(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

void write_block(std::ostream& out, const char* name, std::span<const double> values) {
  out << name << ' ' << values.size() << '\n';
  for (const double v : values) {
    out << hex(v) << '\n';
  }
}

struct CheckpointData {
  std::uint64_t adam_step = 0;
  std::vector<double> online;
  std::vector<double> target;
  std::vector<double> adam_m;
  std::vector<double> adam_v;
};

class CheckpointReader {
 public:
  CheckpointReader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

  std::string word() {
    std::string w;
    if (!(in_ >> w)) {
      fail("unexpected end of file");
    }
    return w;
  }

  void expect(const std::string& keyword) {
    const auto w = word();
    if (w != keyword) {
      fail("expected '" + keyword + "', found '" + w + "'");
    }
  }

  std::uint64_t integer() {
    const auto w = word();
    try {
      std::size_t used = 0;
      const auto v = std::stoull(w, &used);
      if (used != w.size()) {
        throw std::invalid_argument(w);
      }
      return v;
    } catch (const std::exception&) {
      fail("expected an integer, found '" + w + "'");
    }
  }

  double real() {
    const auto w = word();
    char* end = nullptr;
    const double v = std::strtod(w.c_str(), &end);
    if (end != w.c_str() + w.size()) {
      fail("expected a number, found '" + w + "'");
    }
    return v;
  }

  std::vector<double> block(const std::string& name, std::size_t expected) {
    expect(name);
    const auto n = integer();
    if (n != expected) {
      fail("block '" + name + "' has " + std::to_string(n) + " values, expected " +
           std::to_string(expected));
    }
    std::vector<double> values(n);
    for (auto& v : values) {
      v = real();
    }
    return values;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw CheckpointError(source_ + ": " + what);
  }

 private:
  std::istream& in_;
  std::string source_;
};

CheckpointData read_checkpoint(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw CheckpointError("cannot open checkpoint: " + path.string());
  }
  CheckpointReader r(in, path.string());
  r.expect(kMagic);
  if (r.word() != "v" + std::to_string(kFormatVersion)) {
    r.fail("unsupported checkpoint version");
  }
  r.expect("layers");
  for (const auto size : QNetwork::kLayerSizes) {
    if (r.integer() != size) {
      r.fail("layer shape mismatch");
    }
  }
  r.expect("actions");
  for (const auto mode : kAgentActions) {
    if (r.integer() != static_cast<std::uint64_t>(mode_number(mode))) {
      r.fail("action-to-mode mapping mismatch");
    }
  }
  CheckpointData d;
  r.expect("adam_step");
  d.adam_step = r.integer();
  const auto n = QNetwork::parameter_count();
  d.online = r.block("online", n);
  d.target = r.block("target", n);
  d.adam_m = r.block("adam_m", n);
  d.adam_v = r.block("adam_v", n);
  r.expect("end");
  return d;
}

}  // namespace

void AgentConfig::validate() const {
  if (!(discount >= 0.0 && discount < 1.0)) {
    throw ConfigError("agent.discount must lie in [0, 1)");
  }
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("agent.learning_rate must be positive");
  }
  if (!(weight_decay >= 0.0) || !std::isfinite(weight_decay)) {
    throw ConfigError("agent.weight_decay must be non-negative");
  }
  if (batch_size == 0) {
    throw ConfigError("agent.batch_size must be at least 1");
  }
  if (replay_capacity < batch_size) {
    throw ConfigError("agent.replay_capacity must be at least the batch size");
  }
  if (target_sync_period == 0) {
    throw ConfigError("agent.target_sync_period must be positive");
  }
  if (!(eps_start >= 0.0 && eps_start <= 1.0 && eps_end >= 0.0 && eps_end <= 1.0)) {
    throw ConfigError("agent epsilon values must lie in [0, 1]");
  }
  if (eps_decay_episodes < 0) {
    throw ConfigError("agent.eps_decay_episodes must be non-negative");
  }
}

double epsilon_for_episode(const AgentConfig& config, int episode, int decay_episodes) {
  if (decay_episodes <= 1) {
    return episode <= 0 ? config.eps_start : config.eps_end;
  }
  const double frac = std::clamp(static_cast<double>(episode) / (decay_episodes - 1), 0.0, 1.0);
  return config.eps_start + (config.eps_end - config.eps_start) * frac;
}

std::size_t select_action(const QNetwork& net, const StateVector& state, double epsilon,
                          std::mt19937_64& rng) {
  if (epsilon > 0.0) {
    std::uniform_real_distribution<double> coin(0.0, 1.0);
    if (coin(rng) < epsilon) {
      std::uniform_int_distribution<std::size_t> pick(0, kNumActions - 1);
      return pick(rng);
    }
  }
  return argmax(net.forward(state));
}

double double_q_target(const QNetwork& online, const QNetwork& target, const Transition& t,
                       double discount) {
  if (t.terminal) {
    return t.reward;
  }
  const auto next_action = argmax(online.forward(t.next_state));
  return t.reward + discount * target.forward(t.next_state)[next_action];
}

AdamW::AdamW(std::size_t n_params, double learning_rate, double weight_decay, double beta1,
             double beta2, double epsilon)
    : lr_(learning_rate),
      wd_(weight_decay),
      beta1_(beta1),
      beta2_(beta2),
      eps_(epsilon),
      m_(n_params, 0.0),
      v_(n_params, 0.0) {}

void AdamW::step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != m_.size() || grad.size() != m_.size()) {
    throw std::domain_error("AdamW::step size mismatch");
  }
  ++t_;
  const double bc1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double bc2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (std::size_t i = 0; i < params.size(); ++i) {
    params[i] -= lr_ * wd_ * params[i];
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = m_[i] / bc1;
    const double v_hat = v_[i] / bc2;
    params[i] -= lr_ * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

void AdamW::restore(std::uint64_t t, std::vector<double> m, std::vector<double> v) {
  if (m.size() != m_.size() || v.size() != v_.size()) {
    throw std::domain_error("AdamW::restore size mismatch");
  }
  t_ = t;
  m_ = std::move(m);
  v_ = std::move(v);
}

DqnAgent::DqnAgent(const AgentConfig& config)
    : config_(config),
      rng_(config.rng_seed),
      optimizer_(QNetwork::parameter_count(), config.learning_rate, config.weight_decay,
                 config.adam_beta1, config.adam_beta2, config.adam_epsilon),
      buffer_(config.replay_capacity) {
  config_.validate();
  online_ = QNetwork::glorot_uniform(rng_);
  target_ = online_;
}

std::size_t DqnAgent::act(const StateVector& state, double epsilon) {
  return select_action(online_, state, epsilon, rng_);
}

double DqnAgent::loss_and_gradient(std::span<const Transition> batch,
                                   std::vector<double>& grad) const {
  if (batch.empty()) {
    throw std::domain_error("train_batch: empty batch");
  }
  grad.assign(QNetwork::parameter_count(), 0.0);
  const double scale = 1.0 / static_cast<double>(batch.size());
  double loss = 0.0;
  for (const auto& t : batch) {
    const double y = double_q_target(online_, target_, t, config_.discount);
    const double q = online_.forward(t.state)[t.action];
    const double err = q - y;
    loss += err * err * scale;
    online_.accumulate_gradient(t.state.features, t.action, 2.0 * err * scale, grad);
  }
  return loss;
}

double DqnAgent::train_batch(std::span<const Transition> batch) {
  if (frozen_) {
    throw std::logic_error("train_batch called on a frozen agent");
  }
  if (batch.empty()) {
    throw std::domain_error("train_batch: empty batch");
  }
  if (batch.size() != config_.batch_size) {
    throw std::domain_error("train_batch: batch size " + std::to_string(batch.size()) +
                            " differs from configured " + std::to_string(config_.batch_size));
  }
  std::vector<double> grad;
  const double loss = loss_and_gradient(batch, grad);
  optimizer_.step(online_.parameters(), grad);
  if (optimizer_.steps() % config_.target_sync_period == 0) {
    sync_target();
  }
  return loss;
}

std::optional<double> DqnAgent::train_from_replay() {
  auto batch = buffer_.sample(config_.batch_size, rng_);
  if (!batch) {
    return std::nullopt;
  }
  return train_batch(*batch);
}

void DqnAgent::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write checkpoint: " + path.string());
  }
  out << kMagic << " v" << kFormatVersion << '\n';
  out << "layers";
  for (const auto size : QNetwork::kLayerSizes) {
    out << ' ' << size;
  }
  out << "\nactions";
  for (const auto mode : kAgentActions) {
    out << ' ' << mode_number(mode);
  }
  out << "\nadam_step " << optimizer_.steps() << '\n';
  write_block(out, "online", online_.parameters());
  write_block(out, "target", target_.parameters());
  write_block(out, "adam_m", optimizer_.first_moment());
  write_block(out, "adam_v", optimizer_.second_moment());
  out << "end\n";
  if (!out.flush()) {
    throw std::runtime_error("failed writing checkpoint: " + path.string());
  }
}

void DqnAgent::load(const std::filesystem::path& path) {
  auto d = read_checkpoint(path);
  std::copy(d.online.begin(), d.online.end(), online_.parameters().begin());
  std::copy(d.target.begin(), d.target.end(), target_.parameters().begin());
  optimizer_.restore(d.adam_step, std::move(d.adam_m), std::move(d.adam_v));
}

QNetwork load_network(const std::filesystem::path& path) {
  const auto d = read_checkpoint(path);
  QNetwork net;
  std::copy(d.online.begin(), d.online.end(), net.parameters().begin());
  return net;
}

std::uint64_t checksum(const QNetwork& net) noexcept {
  std::uint64_t h = 1469598103934665603ULL;
  for (const double v : net.parameters()) {
    unsigned char bytes[sizeof(double)];
    std::memcpy(bytes, &v, sizeof v);
    for (const auto b : bytes) {
      h ^= b;
      h *= 1099511628211ULL;
    }
  }
  return h;
}

}  // namespace pqos
