// Command-line driver: training phases, test runs, figure export and the
// Chamfer-distance validator.

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "pqos/dqn_agent.hpp"
#include "pqos/errors.hpp"
#include "pqos/experiment.hpp"
#include "pqos/figures.hpp"
#include "pqos/format.hpp"
#include "pqos/point_cloud.hpp"
#include "pqos/policy.hpp"

namespace fs = std::filesystem;
using namespace pqos;

namespace {

struct CommonOptions {
  std::string profile = "paper";
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<double> alpha;
  std::optional<int> vehicles;
  std::optional<int> episodes;
  std::string out = "out";
  std::string checkpoint;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--profile", o.profile, "Preset: quick or paper")
      ->check(CLI::IsMember({"quick", "paper"}));
  cmd->add_option("--config", o.config, "Key-value config file")->check(CLI::ExistingFile);
  cmd->add_option("--seed", o.seed, "Experiment seed");
  cmd->add_option("--alpha", o.alpha, "QoS/QoE weight")->check(CLI::Range(0.0, 1.0));
  cmd->add_option("--vehicles", o.vehicles, "Number of vehicles")->check(CLI::PositiveNumber);
  cmd->add_option("--episodes", o.episodes, "Episodes for this phase")->check(CLI::NonNegativeNumber);
  cmd->add_option("--out", o.out, "Output directory");
}

ExperimentSpec build_spec(const CommonOptions& o) {
  auto spec = make_profile(o.profile, o.vehicles.value_or(1));
  if (!o.config.empty()) {
    apply_config_file(spec, o.config);
  }
  if (o.vehicles) {
    spec.sim.n_vehicles = *o.vehicles;
  }
  if (o.seed) {
    set_seed(spec, *o.seed);
  }
  if (o.alpha) {
    spec.reward.alpha = *o.alpha;
  }
  spec.output_dir = o.out;
  spec.validate();
  return spec;
}

void prepare_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create " + dir.string() + ": " + ec.message());
  }
}

std::ofstream open_kpi(const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << kpi_csv_header() << '\n';
  return out;
}

void write_spec(const ExperimentSpec& spec, const fs::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << "# profile " << spec.profile << '\n' << render_config(spec);
}

int train(const CommonOptions& o, Phase phase) {
  auto spec = build_spec(o);
  if (phase == Phase::kOffline && o.episodes) {
    spec.offline_episodes = *o.episodes;
  }
  if (phase == Phase::kOnline && o.episodes) {
    spec.online_episodes = *o.episodes;
  }
  const fs::path dir = spec.output_dir;
  prepare_dir(dir);
  write_spec(spec, dir / (std::string("config_") + phase_name(phase) + ".conf"));

  DqnAgent agent(spec.agent);
  fs::path checkpoint_out = dir / (std::string("checkpoint_") + phase_name(phase) + ".txt");
  if (phase == Phase::kOffline && !o.checkpoint.empty()) {
    checkpoint_out = o.checkpoint;
  }
  if (phase == Phase::kOnline && !o.checkpoint.empty()) {
    agent.load(o.checkpoint);
  }

  const auto kpi_path = dir / (std::string("kpi_") + phase_name(phase) + ".csv");
  auto kpi = open_kpi(kpi_path);
  const RunOptions options{false, &kpi};
  const auto records = phase == Phase::kOffline ? run_offline_training(spec, agent, options)
                                                : run_online_training(spec, agent, options);
  kpi.flush();
  if (!kpi) {
    throw std::runtime_error("failed writing " + kpi_path.string());
  }
  agent.save(checkpoint_out);
  emit_figures_csv({&records, 1}, dir);

  double reward = 0.0;
  for (const auto& ep : records.episodes) {
    reward += ep.mean_reward();
  }
  std::cout << phase_name(phase) << ": " << records.episodes.size() << " episodes, "
            << agent.gradient_steps() << " gradient steps, mean reward "
            << (records.episodes.empty() ? 0.0 : reward / records.episodes.size()) << "\n"
            << "checkpoint: " << checkpoint_out.string() << '\n';
  return 0;
}

Policy parse_policy(const std::string& text, const std::string& checkpoint) {
  if (text == "dql") {
    if (checkpoint.empty()) {
      throw std::invalid_argument("--policy dql requires --checkpoint");
    }
    return make_greedy_policy(checkpoint);
  }
  const std::string prefix = "constant:";
  if (text.rfind(prefix, 0) == 0) {
    if (const auto mode = parse_mode(text.substr(prefix.size()))) {
      return make_constant_policy(*mode);
    }
  }
  throw std::invalid_argument("unknown policy '" + text + "' (expected dql or constant:<0|1450|1451|1452>)");
}

std::string file_tag(const std::string& label) {
  std::string tag = label;
  for (auto& c : tag) {
    if (c == ':') {
      c = '_';
    }
  }
  return tag;
}

int test(const CommonOptions& o, const std::string& policy_text) {
  auto spec = build_spec(o);
  if (o.episodes) {
    spec.test_episodes = *o.episodes;
  }
  const auto policy = parse_policy(policy_text, o.checkpoint);
  const fs::path dir = spec.output_dir;
  prepare_dir(dir);
  write_spec(spec, dir / "config_test.conf");

  const auto tag = file_tag(policy_label(policy));
  const auto kpi_path = dir / ("kpi_test_" + tag + ".csv");
  auto kpi = open_kpi(kpi_path);
  const auto records = run_test(spec, policy, {true, &kpi});
  kpi.flush();
  if (!kpi) {
    throw std::runtime_error("failed writing " + kpi_path.string());
  }
  emit_figures_csv({&records, 1}, dir);

  const auto s = summarize(records);
  const auto summary_path = dir / ("summary_" + tag + ".csv");
  std::ofstream summary(summary_path, std::ios::trunc);
  if (!summary) {
    throw std::runtime_error("cannot write " + summary_path.string());
  }
  summary << "policy,episodes,decisions,qos_fraction,p_0,p_1450,p_1451,p_1452,delay_median,"
             "reward_median_normalized,max_reward\n"
          << s.policy << ',' << spec.test_episodes << ',' << s.decisions << ','
          << format_real(s.qos_fraction);
  for (const double p : s.mode_fraction) {
    summary << ',' << format_real(p);
  }
  summary << ',' << format_real(s.delay.median) << ',' << format_real(s.reward_normalized.median)
          << ',' << format_real(s.max_reward) << '\n';

  std::cout << s.policy << ": QoS met " << s.qos_fraction * 100.0 << "% of periods, median delay "
            << s.delay.median << " ms, median normalized reward " << s.reward_normalized.median
            << '\n';
  return 0;
}

int export_figures(const std::vector<std::string>& inputs, const std::string& out) {
  std::vector<RunRecords> runs;
  for (const auto& path : inputs) {
    auto more = read_kpi_csv(path);
    runs.insert(runs.end(), std::make_move_iterator(more.begin()),
                std::make_move_iterator(more.end()));
  }
  emit_figures_csv(runs, out);
  std::cout << "wrote figure tables for " << runs.size() << " run(s) to " << out << '\n';
  return 0;
}

int validate_metric(const std::string& reference, const std::string& candidate, bool naive) {
  const auto a = load_point_cloud(reference);
  const auto b = load_point_cloud(candidate);
  const double cd = naive ? chamfer_sym(a, b) : chamfer_sym_accelerated(a, b);
  std::cout << format_real(cd) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predictive-QoS simulator: DQL application-mode selection for LiDAR streaming"};
  app.require_subcommand(1);

  CommonOptions offline_opts;
  auto* offline = app.add_subcommand("train-offline", "Offline training with per-episode fixed modes");
  add_common(offline, offline_opts);
  offline->add_option("--checkpoint", offline_opts.checkpoint, "Checkpoint to write");

  CommonOptions online_opts;
  auto* online = app.add_subcommand("train-online", "Online epsilon-greedy training");
  add_common(online, online_opts);
  online->add_option("--checkpoint", online_opts.checkpoint, "Checkpoint to start from")
      ->check(CLI::ExistingFile);

  CommonOptions test_opts;
  std::string policy_text = "dql";
  auto* test_cmd = app.add_subcommand("test", "Evaluate a policy without learning");
  add_common(test_cmd, test_opts);
  test_cmd->add_option("--policy", policy_text, "dql or constant:<mode>");
  test_cmd->add_option("--checkpoint", test_opts.checkpoint, "Checkpoint for --policy dql")
      ->check(CLI::ExistingFile);

  std::vector<std::string> inputs;
  std::string export_out = "out";
  auto* export_cmd = app.add_subcommand("export", "Build figure tables from KPI CSV files");
  export_cmd->add_option("inputs", inputs, "KPI CSV files")->required()->check(CLI::ExistingFile);
  export_cmd->add_option("--out", export_out, "Output directory");

  std::string reference;
  std::string candidate;
  bool naive = false;
  auto* metric = app.add_subcommand("validate-metric", "Symmetric Chamfer distance of two clouds");
  metric->add_option("reference", reference, "Reference cloud")->required()->check(CLI::ExistingFile);
  metric->add_option("candidate", candidate, "Candidate cloud")->required()->check(CLI::ExistingFile);
  metric->add_flag("--naive", naive, "Use the quadratic reference implementation");

  CLI11_PARSE(app, argc, argv);

  try {
    if (offline->parsed()) {
      return train(offline_opts, Phase::kOffline);
    }
    if (online->parsed()) {
      return train(online_opts, Phase::kOnline);
    }
    if (test_cmd->parsed()) {
      return test(test_opts, policy_text);
    }
    if (export_cmd->parsed()) {
      return export_figures(inputs, export_out);
    }
    if (metric->parsed()) {
      return validate_metric(reference, candidate, naive);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
