#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "pqos/figures.hpp"
#include "pqos/experiment.hpp"

using namespace pqos;

namespace {

ExperimentSpec tiny_spec(int n_vehicles) {
  auto spec = make_profile("quick", n_vehicles);
  spec.sim.episode_duration_s = 2.0;
  spec.offline_episodes = 3;
  spec.online_episodes = 4;
  spec.test_episodes = 3;
  return spec;
}

std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

}  // namespace

TEST_CASE("offline training cycles through the agent actions") {
  const auto spec = tiny_spec(2);
  DqnAgent agent(spec.agent);
  const auto run = run_offline_training(spec, agent, {true, nullptr});
  REQUIRE(run.episodes.size() == 3);
  for (std::size_t ep = 0; ep < 3; ++ep) {
    const auto& e = run.episodes[ep];
    CHECK(e.mode_fraction(kAgentActions[ep]) == 1.0);
    CHECK(e.decisions == 20u * 2u);
    CHECK(e.transitions == e.decisions);
    for (const auto& r : e.rows) {
      CHECK(r.mode == kAgentActions[ep]);
    }
  }
  CHECK(agent.buffer().size() == 120);
  // One batch per step once ten transitions are stored; two vehicles fill the buffer after 5 steps.
  CHECK(agent.gradient_steps() == 16 + 20 + 20);
}

TEST_CASE("offline transitions are terminal only at the end of an episode") {
  auto spec = tiny_spec(1);
  spec.offline_episodes = 1;
  DqnAgent agent(spec.agent);
  (void)run_offline_training(spec, agent);
  REQUIRE(agent.buffer().size() == 20);
  for (std::size_t i = 0; i < 19; ++i) {
    CHECK_FALSE(agent.buffer().at(i).terminal);
    CHECK(agent.buffer().at(i).next_state == agent.buffer().at(i + 1).state);
  }
  CHECK(agent.buffer().at(19).terminal);
}

TEST_CASE("online exploration schedule") {
  auto spec = tiny_spec(5);
  spec.online_episodes = 6;
  DqnAgent agent(spec.agent);
  const auto run = run_online_training(spec, agent);
  REQUIRE(run.episodes.size() == 6);
  CHECK(run.episodes.front().epsilon == 1.0);
  CHECK(run.episodes.back().epsilon == doctest::Approx(0.05));
  for (std::size_t i = 1; i < run.episodes.size(); ++i) {
    CHECK(run.episodes[i].epsilon < run.episodes[i - 1].epsilon);
  }
  for (const auto& e : run.episodes) {
    CHECK(e.mode_fraction(ModeId::kRaw) == 0.0);
    CHECK(e.transitions <= e.decisions);
  }
}

TEST_CASE("pure exploration picks each action about equally often") {
  auto spec = tiny_spec(5);
  spec.sim.episode_duration_s = 20.0;
  spec.online_episodes = 1;
  spec.agent.eps_end = 1.0;
  DqnAgent agent(spec.agent);
  const auto run = run_online_training(spec, agent);
  const auto& e = run.episodes[0];
  REQUIRE(e.decisions == 1000);
  for (const auto a : kAgentActions) {
    // 1000 draws with p = 1/3: sigma is about 15.
    CHECK(e.mode_fraction(a) * 1000.0 == doctest::Approx(333.3).epsilon(0.2));
  }
}

TEST_CASE("test phase freezes the network and evaluates greedily") {
  const auto spec = tiny_spec(2);
  DqnAgent agent(spec.agent);
  (void)run_offline_training(spec, agent);
  const auto before = checksum(agent.online());
  const Policy greedy = DqlGreedyPolicy{agent.online()};
  const auto a = run_test(spec, greedy, {true, nullptr});
  const auto b = run_test(spec, greedy, {true, nullptr});
  CHECK(checksum(agent.online()) == before);
  REQUIRE(a.episodes.size() == b.episodes.size());
  for (std::size_t i = 0; i < a.episodes.size(); ++i) {
    CHECK(a.episodes[i].mode_counts == b.episodes[i].mode_counts);
    CHECK(a.episodes[i].reward_sum == b.episodes[i].reward_sum);
  }
  const Policy training = DqlTrainingPolicy{&agent, 0.5};
  CHECK_THROWS_AS((void)run_test(spec, training), std::logic_error);
}

TEST_CASE("constant policies in the test phase") {
  auto spec = tiny_spec(5);
  spec.sim.episode_duration_s = 5.0;
  const auto compressed = run_test(spec, make_constant_policy(ModeId::kCompressed), {true, nullptr});
  for (const auto& e : compressed.episodes) {
    for (const auto& r : e.rows) {
      CHECK(r.cd == doctest::Approx(0.000044));
    }
  }
  double best = -1.0;
  double qos_1452 = 0.0;
  for (const auto& info : kApplicationModes) {
    const auto run = run_test(spec, make_constant_policy(info.id), {true, nullptr});
    const auto s = summarize(run);
    CHECK(s.reward_normalized.min >= -1.0);
    CHECK(s.reward_normalized.max <= 1.0);
    best = std::max(best, s.qos_fraction);
    if (info.id == ModeId::kDynamicOnly) {
      qos_1452 = s.qos_fraction;
    }
  }
  CHECK(qos_1452 == best);
}

TEST_CASE("KPI CSV round trip") {
  const auto spec = tiny_spec(2);
  std::stringstream csv;
  csv << kpi_csv_header() << '\n';
  const auto run = run_test(spec, make_constant_policy(ModeId::kRoadRemoved), {true, &csv});
  const auto path = std::filesystem::temp_directory_path() / "pqos_kpi_roundtrip.csv";
  {
    std::ofstream out(path);
    out << csv.str();
  }
  const auto back = read_kpi_csv(path);
  REQUIRE(back.size() == 1);
  CHECK(back[0].policy == "constant:1451");
  CHECK(back[0].phase == Phase::kTest);
  REQUIRE(back[0].episodes.size() == run.episodes.size());
  for (std::size_t i = 0; i < run.episodes.size(); ++i) {
    const auto& x = run.episodes[i];
    const auto& y = back[0].episodes[i];
    CHECK(x.decisions == y.decisions);
    CHECK(x.qos_met == y.qos_met);
    CHECK(x.reward_sum == doctest::Approx(y.reward_sum).epsilon(1e-12));
    REQUIRE(x.rows.size() == y.rows.size());
    for (std::size_t j = 0; j < x.rows.size(); ++j) {
      CHECK(x.rows[j].kpis.delay_mean == y.rows[j].kpis.delay_mean);
      CHECK(x.rows[j].kpis.sinr_db == y.rows[j].kpis.sinr_db);
      CHECK(x.rows[j].reward == y.rows[j].reward);
    }
  }
}

TEST_CASE("figure tables") {
  const auto spec = tiny_spec(2);
  const auto dir = std::filesystem::temp_directory_path() / "pqos_figures_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  CHECK_THROWS_AS(emit_figures_csv({}, dir), std::invalid_argument);

  auto make_runs = [&] {
    std::vector<RunRecords> runs;
    runs.push_back(run_test(spec, make_constant_policy(ModeId::kRaw), {true, nullptr}));
    runs.push_back(run_test(spec, make_constant_policy(ModeId::kDynamicOnly), {true, nullptr}));
    return runs;
  };
  emit_figures_csv(make_runs(), dir);
  for (const char* name : {"action_probability.csv", "cd_distribution.csv", "qos_distribution.csv",
                           "delay_boxplot.csv", "reward_distribution.csv"}) {
    CHECK(std::filesystem::exists(dir / name));
  }
  const auto box = read_file(dir / "delay_boxplot.csv");
  CHECK(std::count(box.begin(), box.end(), '\n') == 3);
  CHECK(box.rfind("policy,phase,samples,whisker_low,p25,median,p75,whisker_high,min,max,mean", 0) == 0);

  const auto first = read_file(dir / "reward_distribution.csv");
  emit_figures_csv(make_runs(), dir);
  CHECK(read_file(dir / "reward_distribution.csv") == first);
}

TEST_CASE("box statistics") {
  const auto s = box_stats({1, 2, 3, 4, 100});
  CHECK(s.samples == 5);
  CHECK(s.median == 3.0);
  CHECK(s.p25 == 2.0);
  CHECK(s.p75 == 4.0);
  CHECK(s.whisker_low == 1.0);
  CHECK(s.whisker_high == 4.0);
  CHECK(s.max == 100.0);
  CHECK(s.mean == doctest::Approx(22.0));
  const double sorted[] = {0.0, 10.0};
  CHECK(quantile_sorted(sorted, 0.25) == 2.5);
}

TEST_CASE("every training step stores one transition per vehicle") {
  auto spec = tiny_spec(3);
  DqnAgent agent(spec.agent);
  const auto offline = run_offline_training(spec, agent);
  const auto online = run_online_training(spec, agent);
  const auto steps = static_cast<std::uint64_t>(spec.sim.steps_per_episode());
  for (const auto* run : {&offline, &online}) {
    for (const auto& e : run->episodes) {
      CHECK(e.transitions == steps * 3u);
    }
  }
}

TEST_CASE("greedy online runs from the same checkpoint repeat the same actions") {
  auto spec = tiny_spec(2);
  spec.agent.eps_start = 0.0;
  spec.agent.eps_end = 0.0;
  DqnAgent seed_agent(spec.agent);
  (void)run_offline_training(spec, seed_agent);
  const auto path = std::filesystem::temp_directory_path() / "pqos_greedy_online.txt";
  seed_agent.save(path);

  auto trace = [&] {
    DqnAgent agent(spec.agent);
    agent.load(path);
    const auto run = run_online_training(spec, agent, {true, nullptr});
    std::vector<ModeId> modes;
    for (const auto& e : run.episodes) {
      for (const auto& r : e.rows) {
        modes.push_back(r.mode);
      }
    }
    return modes;
  };
  const auto a = trace();
  CHECK(a.size() == 4u * 20u * 2u);
  CHECK(a == trace());
}
