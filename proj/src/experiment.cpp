#include "pqos/experiment.hpp"

#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include "pqos/format.hpp"
#include "pqos/reward.hpp"

namespace pqos {
namespace {

std::size_t mode_slot(ModeId mode) {
  for (std::size_t i = 0; i < kApplicationModes.size(); ++i) {
    if (kApplicationModes[i].id == mode) {
      return i;
    }
  }
  throw std::domain_error("unknown application mode");
}

// What drives the per-vehicle decisions of one episode.
struct EpisodeDriver {
  const Policy* policy = nullptr;  // used when set
  DqnAgent* learner = nullptr;     // receives transitions and trains when set
  std::mt19937_64* rng = nullptr;
};

EpisodeRecord run_episode(const ExperimentSpec& spec, NetworkEnv& env, int index, double epsilon,
                          Phase phase, const std::string& label, const EpisodeDriver& driver,
                          const RunOptions& options) {
  EpisodeRecord rec;
  rec.index = index;
  rec.epsilon = epsilon;
  const auto n = static_cast<std::size_t>(env.n_vehicles());
  auto states = env.reset(episode_seed(spec, phase, index));
  std::vector<ModeId> modes(n);

  while (!env.done()) {
    for (std::size_t i = 0; i < n; ++i) {
      modes[i] = decide(*driver.policy, states[i], *driver.rng);
    }
    const int step = env.step_index();
    auto result = env.step(modes);

    for (std::size_t i = 0; i < n; ++i) {
      StepRow row;
      row.episode = index;
      row.step = step;
      row.vehicle = static_cast<int>(i);
      row.mode = modes[i];
      row.kpis = result.kpis[i];
      row.cd = result.qos[i].cd;
      row.qos = qos_met(result.qos[i], spec.reward);
      row.rewarded = result.qos[i].has_packets;
      row.reward = row.rewarded ? compute_reward(result.qos[i], spec.reward) : 0.0;

      ++rec.decisions;
      ++rec.mode_counts[mode_slot(modes[i])];
      if (row.qos) {
        ++rec.qos_met;
      }
      rec.reward_sum += row.reward;

      if (driver.learner != nullptr && row.rewarded) {
        const auto action = mode_to_action(modes[i]);
        if (!action) {
          throw std::logic_error("training episode used a mode outside the agent action set");
        }
        driver.learner->remember(
            {states[i], *action, row.reward, result.states[i], result.done});
        ++rec.transitions;
      }
      if (options.kpi_csv != nullptr) {
        write_kpi_row(*options.kpi_csv, label, phase, epsilon, row);
      }
      if (options.keep_rows) {
        rec.rows.push_back(row);
      }
    }
    if (driver.learner != nullptr) {
      driver.learner->train_from_replay();
    }
    states = std::move(result.states);
  }
  return rec;
}

}  // namespace

const char* phase_name(Phase phase) noexcept {
  switch (phase) {
    case Phase::kOffline:
      return "offline";
    case Phase::kOnline:
      return "online";
    case Phase::kTest:
      return "test";
  }
  return "unknown";
}

double EpisodeRecord::mean_reward() const noexcept {
  return decisions == 0 ? 0.0 : reward_sum / static_cast<double>(decisions);
}

double EpisodeRecord::qos_fraction() const noexcept {
  return decisions == 0 ? 0.0 : static_cast<double>(qos_met) / static_cast<double>(decisions);
}

double EpisodeRecord::mode_fraction(ModeId mode) const noexcept {
  if (decisions == 0) {
    return 0.0;
  }
  for (std::size_t i = 0; i < kApplicationModes.size(); ++i) {
    if (kApplicationModes[i].id == mode) {
      return static_cast<double>(mode_counts[i]) / static_cast<double>(decisions);
    }
  }
  return 0.0;
}

bool RunRecords::has_rows() const noexcept {
  for (const auto& e : episodes) {
    if (!e.rows.empty()) {
      return true;
    }
  }
  return false;
}

std::uint64_t episode_seed(const ExperimentSpec& spec, Phase phase, int episode) noexcept {
  const auto phase_seed = mix_seed(spec.sim.rng_seed, 0x100 + static_cast<std::uint64_t>(phase));
  return mix_seed(phase_seed, static_cast<std::uint64_t>(episode));
}

RunRecords run_offline_training(const ExperimentSpec& spec, DqnAgent& agent,
                                const RunOptions& options) {
  spec.validate();
  NetworkEnv env(spec.sim);
  RunRecords records{"dql", Phase::kOffline, {}};
  records.episodes.reserve(static_cast<std::size_t>(spec.offline_episodes));
  for (int ep = 0; ep < spec.offline_episodes; ++ep) {
    const Policy fixed = ConstantPolicy{kAgentActions[static_cast<std::size_t>(ep) % kNumActions]};
    const EpisodeDriver driver{&fixed, &agent, &agent.rng()};
    records.episodes.push_back(
        run_episode(spec, env, ep, 0.0, Phase::kOffline, records.policy, driver, options));
  }
  return records;
}

RunRecords run_online_training(const ExperimentSpec& spec, DqnAgent& agent,
                               const RunOptions& options) {
  spec.validate();
  NetworkEnv env(spec.sim);
  RunRecords records{"dql", Phase::kOnline, {}};
  records.episodes.reserve(static_cast<std::size_t>(spec.online_episodes));
  const int decay = spec.agent.eps_decay_episodes > 0 ? spec.agent.eps_decay_episodes
                                                      : spec.online_episodes;
  for (int ep = 0; ep < spec.online_episodes; ++ep) {
    const double eps = epsilon_for_episode(spec.agent, ep, decay);
    const Policy explore = DqlTrainingPolicy{&agent, eps};
    const EpisodeDriver driver{&explore, &agent, &agent.rng()};
    records.episodes.push_back(
        run_episode(spec, env, ep, eps, Phase::kOnline, records.policy, driver, options));
  }
  return records;
}

RunRecords run_test(const ExperimentSpec& spec, const Policy& policy, const RunOptions& options) {
  if (std::holds_alternative<DqlTrainingPolicy>(policy)) {
    throw std::logic_error("run_test: learning policies are not allowed in the test phase");
  }
  spec.validate();
  NetworkEnv env(spec.sim);
  RunRecords records{policy_label(policy), Phase::kTest, {}};
  records.episodes.reserve(static_cast<std::size_t>(spec.test_episodes));
  std::mt19937_64 rng(mix_seed(spec.seed, 0x7e57));
  const EpisodeDriver driver{&policy, nullptr, &rng};
  for (int ep = 0; ep < spec.test_episodes; ++ep) {
    records.episodes.push_back(
        run_episode(spec, env, ep, 0.0, Phase::kTest, records.policy, driver, options));
  }
  return records;
}

std::string kpi_csv_header() {
  return "policy,phase,episode,epsilon,step,vehicle,action,mcs_index,ofdm_symbols_used,sinr_db,"
         "delay_mean,delay_max,delay_min,delay_std,prr,packets_generated,packets_delivered,"
         "packets_dropped,packets_queued,delay_samples,cd,qos,reward";
}

void write_kpi_row(std::ostream& out, const std::string& policy, Phase phase, double epsilon,
                   const StepRow& r) {
  const auto& k = r.kpis;
  out << policy << ',' << phase_name(phase) << ',' << r.episode << ',' << format_real(epsilon) << ','
      << r.step << ',' << r.vehicle << ',' << mode_number(r.mode) << ',' << k.mcs_index << ','
      << k.ofdm_symbols_used << ',' << format_real(k.sinr_db) << ',' << format_real(k.delay_mean) << ','
      << format_real(k.delay_max) << ',' << format_real(k.delay_min) << ',' << format_real(k.delay_std) << ','
      << format_real(k.prr) << ',' << k.packets_generated << ',' << k.packets_delivered << ','
      << k.packets_dropped << ',' << k.packets_queued << ',' << k.delay_samples << ','
      << format_real(r.cd) << ',' << (r.qos ? 1 : 0) << ',' << (r.rewarded ? format_real(r.reward) : "") << '\n';
}

std::vector<RunRecords> read_kpi_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw std::runtime_error("cannot open KPI file: " + path.string());
  }
  std::string line;
  if (!std::getline(in, line) || line != kpi_csv_header()) {
    throw std::runtime_error(path.string() + ": missing or unexpected KPI header");
  }
  std::vector<RunRecords> runs;
  std::map<std::pair<std::string, std::string>, std::size_t> run_index;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) {
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      f.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
      f.emplace_back();
    }
    if (f.size() != 23) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected 23 fields");
    }
    try {
      const auto key = std::make_pair(f[0], f[1]);
      auto it = run_index.find(key);
      if (it == run_index.end()) {
        Phase phase = Phase::kTest;
        if (f[1] == "offline") {
          phase = Phase::kOffline;
        } else if (f[1] == "online") {
          phase = Phase::kOnline;
        } else if (f[1] != "test") {
          throw std::runtime_error("unknown phase '" + f[1] + "'");
        }
        it = run_index.emplace(key, runs.size()).first;
        runs.push_back({f[0], phase, {}});
      }
      auto& run = runs[it->second];

      StepRow r;
      r.episode = std::stoi(f[2]);
      const double eps = std::stod(f[3]);
      r.step = std::stoi(f[4]);
      r.vehicle = std::stoi(f[5]);
      const auto mode = parse_mode(f[6]);
      if (!mode) {
        throw std::runtime_error("unknown mode '" + f[6] + "'");
      }
      r.mode = *mode;
      auto& k = r.kpis;
      k.mcs_index = std::stoi(f[7]);
      k.ofdm_symbols_used = std::stoi(f[8]);
      k.sinr_db = std::stod(f[9]);
      k.delay_mean = std::stod(f[10]);
      k.delay_max = std::stod(f[11]);
      k.delay_min = std::stod(f[12]);
      k.delay_std = std::stod(f[13]);
      k.prr = std::stod(f[14]);
      k.packets_generated = std::stoull(f[15]);
      k.packets_delivered = std::stoull(f[16]);
      k.packets_dropped = std::stoull(f[17]);
      k.packets_queued = std::stoull(f[18]);
      k.delay_samples = std::stoull(f[19]);
      r.cd = std::stod(f[20]);
      r.qos = f[21] == "1";
      r.rewarded = !f[22].empty();
      r.reward = r.rewarded ? std::stod(f[22]) : 0.0;

      if (run.episodes.empty() || run.episodes.back().index != r.episode) {
        EpisodeRecord e;
        e.index = r.episode;
        e.epsilon = eps;
        run.episodes.push_back(std::move(e));
      }
      auto& ep = run.episodes.back();
      ++ep.decisions;
      ++ep.mode_counts[mode_slot(r.mode)];
      if (r.qos) {
        ++ep.qos_met;
      }
      ep.reward_sum += r.reward;
      ep.rows.push_back(r);
    } catch (const std::runtime_error& e) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const std::logic_error&) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": malformed number");
    }
  }
  return runs;
}

}  // namespace pqos
