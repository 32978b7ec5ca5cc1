#include <doctest.h>

#include <vector>

#include "pqos/errors.hpp"
#include "pqos/network_env.hpp"

using namespace pqos;

namespace {

SimConfig small_config(int n_vehicles, double duration_s = 2.0) {
  SimConfig c;
  c.n_vehicles = n_vehicles;
  c.episode_duration_s = duration_s;
  return c;
}

// Short, static route right under the antenna: every vehicle sees a strong link.
SimConfig strong_link_config(int n_vehicles) {
  SimConfig c = small_config(n_vehicles);
  c.route.center_y_m = 0.0;
  c.route.half_length_m = 5.0;
  c.route.half_width_m = 5.0;
  c.route.speed_mps = 0.0;
  c.channel.shadowing_std_db = 0.0;
  return c;
}

std::vector<StepResult> run(NetworkEnv& env, std::uint64_t seed, ModeId mode) {
  env.reset(seed);
  const std::vector<ModeId> modes(static_cast<std::size_t>(env.n_vehicles()), mode);
  std::vector<StepResult> out;
  while (!env.done()) {
    out.push_back(env.step(modes));
  }
  return out;
}

bool same_kpis(const StepKpis& a, const StepKpis& b) {
  return a.mcs_index == b.mcs_index && a.ofdm_symbols_used == b.ofdm_symbols_used &&
         a.sinr_db == b.sinr_db && a.delay_mean == b.delay_mean && a.delay_max == b.delay_max &&
         a.delay_min == b.delay_min && a.delay_std == b.delay_std && a.prr == b.prr &&
         a.packets_generated == b.packets_generated && a.packets_delivered == b.packets_delivered &&
         a.packets_dropped == b.packets_dropped && a.packets_queued == b.packets_queued &&
         a.delay_samples == b.delay_samples;
}

}  // namespace

TEST_CASE("reset returns one state per vehicle and is reproducible") {
  NetworkEnv env(small_config(5));
  const auto a = env.reset(11);
  const auto b = env.reset(11);
  CHECK(a.size() == 5);
  CHECK(a == b);
  CHECK(env.step_index() == 0);
  CHECK(env.steps_per_episode() == 20);
}

TEST_CASE("invalid configuration and misuse") {
  CHECK_THROWS_AS(NetworkEnv(small_config(0)), ConfigError);
  SimConfig bad = small_config(1);
  bad.control_period_ms = 0;
  CHECK_THROWS_AS(NetworkEnv{bad}, ConfigError);

  NetworkEnv env(small_config(2));
  const std::vector<ModeId> two(2, ModeId::kCompressed);
  CHECK_THROWS_AS((void)env.step(two), std::logic_error);
  env.reset(1);
  const std::vector<ModeId> one(1, ModeId::kCompressed);
  CHECK_THROWS_AS((void)env.step(one), std::domain_error);
  while (!env.done()) {
    (void)env.step(two);
  }
  CHECK_THROWS_AS((void)env.step(two), std::logic_error);
}

TEST_CASE("one compressed frame per period is packetized into MTU-sized packets") {
  NetworkEnv env(small_config(1));
  const auto steps = run(env, 3, ModeId::kCompressed);
  for (const auto& s : steps) {
    const auto& k = s.kpis[0];
    // 200 KB with 10% spread in 1500-byte packets.
    CHECK(k.packets_generated >= 100);
    CHECK(k.packets_generated <= 175);
    CHECK(s.qos[0].cd == doctest::Approx(0.000044));
    CHECK(s.qos[0].has_packets);
  }
}

TEST_CASE("light load on a strong link is delivered completely") {
  NetworkEnv env(strong_link_config(1));
  for (const auto& s : run(env, 5, ModeId::kDynamicOnly)) {
    CHECK(s.kpis[0].prr == 1.0);
    CHECK(s.kpis[0].mcs_index == 14);
    CHECK(s.kpis[0].delay_mean < 50.0);
    CHECK(s.qos[0].cd == doctest::Approx(35.634660));
  }
}

TEST_CASE("raw frames overload the cell and the backlog keeps growing") {
  NetworkEnv env(small_config(5, 3.0));
  const auto steps = run(env, 7, ModeId::kRaw);
  double early = 0.0;
  double late = 0.0;
  for (int v = 0; v < 5; ++v) {
    early += steps[1].kpis[v].delay_mean;
    late += steps.back().kpis[v].delay_mean;
    CHECK(steps.back().kpis[v].prr < 1.0);
  }
  CHECK(late > early);
  for (int v = 0; v < 5; ++v) {
    CHECK(env.totals(v).dropped > 0);
  }
}

TEST_CASE("packet conservation per period and since reset") {
  for (const ModeId mode : {ModeId::kRaw, ModeId::kCompressed, ModeId::kDynamicOnly}) {
    NetworkEnv env(small_config(3));
    const auto steps = run(env, 9, mode);
    std::vector<std::uint64_t> generated(3);
    for (const auto& s : steps) {
      for (int v = 0; v < 3; ++v) {
        const auto& k = s.kpis[v];
        CHECK(k.packets_generated == k.packets_delivered + k.packets_dropped + k.packets_queued);
        CHECK(k.prr >= 0.0);
        CHECK(k.prr <= 1.0);
        CHECK(k.delay_min <= k.delay_mean);
        CHECK(k.delay_mean <= k.delay_max);
        generated[v] += k.packets_generated;
      }
    }
    for (int v = 0; v < 3; ++v) {
      const auto t = env.totals(v);
      CHECK(t.generated == generated[v]);
      CHECK(t.generated == t.delivered + t.dropped + t.queued);
    }
  }
}

TEST_CASE("states stay inside the unit cube") {
  NetworkEnv env(small_config(5));
  for (const ModeId mode : {ModeId::kRaw, ModeId::kRoadRemoved}) {
    for (const auto& s : run(env, 13, mode)) {
      for (const auto& st : s.states) {
        for (double f : st.features) {
          CHECK(f >= 0.0);
          CHECK(f <= 1.0);
        }
      }
    }
  }
}

TEST_CASE("a lone backlogged vehicle gets every symbol") {
  NetworkEnv env(strong_link_config(1));
  const auto steps = run(env, 17, ModeId::kRaw);
  const int budget = env.config().symbols_per_period();
  CHECK(budget == 1400);
  // From the second period on, the queue never empties under raw traffic.
  for (std::size_t i = 1; i < steps.size(); ++i) {
    CHECK(steps[i].kpis[0].ofdm_symbols_used == budget);
  }
}

TEST_CASE("the cell budget is shared and never exceeded") {
  NetworkEnv env(strong_link_config(4));
  const auto steps = run(env, 19, ModeId::kRaw);
  const int budget = env.config().symbols_per_period();
  for (std::size_t i = 1; i < steps.size(); ++i) {
    int total = 0;
    for (const auto& k : steps[i].kpis) {
      total += k.ofdm_symbols_used;
      CHECK(k.ofdm_symbols_used >= budget / 4 - 14);
    }
    CHECK(total == budget);
  }
}

TEST_CASE("heavier modes never improve delivery") {
  const ModeId order[] = {ModeId::kDynamicOnly, ModeId::kRoadRemoved, ModeId::kCompressed,
                          ModeId::kRaw};
  double previous_prr = 2.0;
  double previous_delay = -1.0;
  for (const ModeId mode : order) {
    NetworkEnv env(small_config(5, 4.0));
    double prr_sum = 0.0;
    double delay_sum = 0.0;
    int count = 0;
    for (const auto& s : run(env, 23, mode)) {
      for (const auto& k : s.kpis) {
        prr_sum += k.prr;
        delay_sum += k.delay_mean;
        ++count;
      }
    }
    CHECK(prr_sum / count <= previous_prr + 1e-12);
    CHECK(delay_sum / count >= previous_delay);
    previous_prr = prr_sum / count;
    previous_delay = delay_sum / count;
  }
}

TEST_CASE("same seed and actions give bit-identical KPI streams") {
  NetworkEnv a(small_config(3));
  NetworkEnv b(small_config(3));
  const auto ra = run(a, 29, ModeId::kRoadRemoved);
  const auto rb = run(b, 29, ModeId::kRoadRemoved);
  REQUIRE(ra.size() == rb.size());
  for (std::size_t i = 0; i < ra.size(); ++i) {
    for (std::size_t v = 0; v < 3; ++v) {
      CHECK(same_kpis(ra[i].kpis[v], rb[i].kpis[v]));
      CHECK(ra[i].states[v] == rb[i].states[v]);
    }
  }
  const auto rc = run(a, 30, ModeId::kRoadRemoved);
  bool differs = false;
  for (std::size_t i = 0; i < ra.size(); ++i) {
    differs = differs || ra[i].kpis[0].sinr_db != rc[i].kpis[0].sinr_db;
  }
  CHECK(differs);
}

TEST_CASE("a notification delay keeps the previous mode for the first frame") {
  SimConfig c = strong_link_config(1);
  c.action_delay_ms = 10;
  NetworkEnv env(c);
  env.reset(31);
  const std::vector<ModeId> first{ModeId::kDynamicOnly};
  const std::vector<ModeId> second{ModeId::kCompressed};
  (void)env.step(first);
  const auto r = env.step(second);
  // The frame at the period start is still generated with the old mode.
  CHECK(r.qos[0].cd == doctest::Approx(35.634660));
  CHECK(r.kpis[0].packets_generated <= 15);
  const auto r2 = env.step(second);
  CHECK(r2.qos[0].cd == doctest::Approx(0.000044));
}

TEST_CASE("state features follow the KPI bounds") {
  SimConfig c;
  StepKpis k;
  k.mcs_index = 7;
  k.ofdm_symbols_used = 700;
  k.sinr_db = 15.0;
  k.delay_mean = 100.0;
  k.delay_max = 800.0;
  k.delay_min = 0.0;
  k.delay_std = 40.0;
  k.prr = 0.25;
  const auto s = make_state(k, c);
  CHECK(s.features[0] == doctest::Approx(0.5));
  CHECK(s.features[1] == doctest::Approx(0.5));
  CHECK(s.features[2] == doctest::Approx(0.5));
  CHECK(s.features[3] == doctest::Approx(0.25));
  CHECK(s.features[4] == 1.0);
  CHECK(s.features[5] == 0.0);
  CHECK(s.features[6] == doctest::Approx(0.1));
  CHECK(s.features[7] == 0.25);
}
