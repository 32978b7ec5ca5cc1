#include "pqos/figures.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <stdexcept>

#include "pqos/format.hpp"
#include "pqos/reward.hpp"

namespace pqos {
namespace {

std::ofstream open_csv(const std::filesystem::path& path, const char* header) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw std::runtime_error("cannot write " + path.string());
  }
  out << header << '\n';
  return out;
}

void close_csv(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) {
    throw std::runtime_error("failed writing " + path.string());
  }
}

template <class F>
void for_each_row(const RunRecords& run, F&& f) {
  for (const auto& ep : run.episodes) {
    for (const auto& row : ep.rows) {
      f(row);
    }
  }
}

}  // namespace

RunSummary summarize(const RunRecords& run) {
  RunSummary s;
  s.policy = run.policy;
  std::vector<double> delays;
  std::vector<double> rewards;
  std::uint64_t qos = 0;
  std::array<std::uint64_t, kApplicationModes.size()> counts{};
  for_each_row(run, [&](const StepRow& r) {
    ++s.decisions;
    qos += r.qos ? 1 : 0;
    for (std::size_t i = 0; i < kApplicationModes.size(); ++i) {
      if (kApplicationModes[i].id == r.mode) {
        ++counts[i];
      }
    }
    if (r.kpis.delay_samples > 0) {
      delays.push_back(r.kpis.delay_mean);
    }
    if (r.rewarded) {
      rewards.push_back(normalize_reward(r.reward));
      s.max_reward = std::max(s.max_reward, r.reward);
    }
  });
  if (s.decisions > 0) {
    s.qos_fraction = static_cast<double>(qos) / static_cast<double>(s.decisions);
    for (std::size_t i = 0; i < counts.size(); ++i) {
      s.mode_fraction[i] = static_cast<double>(counts[i]) / static_cast<double>(s.decisions);
    }
  }
  s.delay = box_stats(std::move(delays));
  s.reward_normalized = box_stats(std::move(rewards));
  return s;
}

void emit_figures_csv(std::span<const RunRecords> runs, const std::filesystem::path& output_dir) {
  if (runs.empty() || std::all_of(runs.begin(), runs.end(),
                                  [](const RunRecords& r) { return r.episodes.empty(); })) {
    throw std::invalid_argument("emit_figures_csv: no records to export");
  }
  std::error_code ec;
  std::filesystem::create_directories(output_dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create " + output_dir.string() + ": " + ec.message());
  }

  const auto action_path = output_dir / "action_probability.csv";
  auto action = open_csv(action_path, "policy,phase,episode,epsilon,p_0,p_1450,p_1451,p_1452");
  for (const auto& run : runs) {
    for (const auto& ep : run.episodes) {
      action << run.policy << ',' << phase_name(run.phase) << ',' << ep.index << ','
             << format_real(ep.epsilon);
      for (const auto& m : kApplicationModes) {
        action << ',' << format_real(ep.mode_fraction(m.id));
      }
      action << '\n';
    }
  }
  close_csv(action, action_path);

  const auto cd_path = output_dir / "cd_distribution.csv";
  const auto qos_path = output_dir / "qos_distribution.csv";
  const auto delay_path = output_dir / "delay_boxplot.csv";
  const auto reward_path = output_dir / "reward_distribution.csv";
  auto cd = open_csv(cd_path, "policy,phase,cd,count,fraction");
  auto qos = open_csv(qos_path, "policy,phase,qos,count,fraction");
  auto delay = open_csv(delay_path,
                        "policy,phase,samples,whisker_low,p25,median,p75,whisker_high,min,max,mean");
  auto reward = open_csv(reward_path,
                         "policy,phase,samples,min,whisker_low,p25,median,p75,whisker_high,max,mean");

  for (const auto& run : runs) {
    if (!run.has_rows()) {
      continue;
    }
    const std::string tag = run.policy + "," + phase_name(run.phase);
    std::map<double, std::uint64_t> cd_hist;
    std::uint64_t total = 0;
    std::uint64_t met = 0;
    for_each_row(run, [&](const StepRow& r) {
      ++cd_hist[r.cd];
      ++total;
      met += r.qos ? 1 : 0;
    });
    for (const auto& [value, count] : cd_hist) {
      cd << tag << ',' << format_real(value) << ',' << count << ','
         << format_real(static_cast<double>(count) / static_cast<double>(total)) << '\n';
    }
    qos << tag << ",0," << total - met << ','
        << format_real(static_cast<double>(total - met) / static_cast<double>(total)) << '\n';
    qos << tag << ",1," << met << ','
        << format_real(static_cast<double>(met) / static_cast<double>(total)) << '\n';

    const auto s = summarize(run);
    const auto& d = s.delay;
    delay << tag << ',' << d.samples << ',' << format_real(d.whisker_low) << ',' << format_real(d.p25) << ','
          << format_real(d.median) << ',' << format_real(d.p75) << ',' << format_real(d.whisker_high) << ','
          << format_real(d.min) << ',' << format_real(d.max) << ',' << format_real(d.mean) << '\n';
    const auto& w = s.reward_normalized;
    reward << tag << ',' << w.samples << ',' << format_real(w.min) << ',' << format_real(w.whisker_low) << ','
           << format_real(w.p25) << ',' << format_real(w.median) << ',' << format_real(w.p75) << ','
           << format_real(w.whisker_high) << ',' << format_real(w.max) << ',' << format_real(w.mean) << '\n';
  }
  close_csv(cd, cd_path);
  close_csv(qos, qos_path);
  close_csv(delay, delay_path);
  close_csv(reward, reward_path);
}

}  // namespace pqos
