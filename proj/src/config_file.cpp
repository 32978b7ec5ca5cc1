#include "pqos/experiment_spec.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "pqos/errors.hpp"
#include "pqos/format.hpp"

namespace pqos {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) {
    return {};
  }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
bool parse_number(std::string_view text, T& out) {
  if constexpr (std::is_floating_point_v<T>) {
    std::string buf(text);
    char* end = nullptr;
    out = std::strtod(buf.c_str(), &end);
    return !buf.empty() && end == buf.c_str() + buf.size();
  } else {
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
  }
}

struct Field {
  std::function<bool(ExperimentSpec&, std::string_view)> set;
  std::function<std::string(const ExperimentSpec&)> get;
};

template <class T>
Field number_field(T ExperimentSpec::*member) {
  return {[member](ExperimentSpec& s, std::string_view v) { return parse_number(v, s.*member); },
          [member](const ExperimentSpec& s) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_real(s.*member);
            } else {
              return std::to_string(s.*member);
            }
          }};
}

template <class Outer, class T>
Field nested_field(Outer ExperimentSpec::*outer, T Outer::*member) {
  return {[=](ExperimentSpec& s, std::string_view v) { return parse_number(v, s.*outer.*member); },
          [=](const ExperimentSpec& s) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_real(s.*outer.*member);
            } else {
              return std::to_string(s.*outer.*member);
            }
          }};
}

template <class Mid, class T>
Field sim_field(Mid SimConfig::*mid, T Mid::*member) {
  return {[=](ExperimentSpec& s, std::string_view v) { return parse_number(v, s.sim.*mid.*member); },
          [=](const ExperimentSpec& s) {
            if constexpr (std::is_floating_point_v<T>) {
              return format_real(s.sim.*mid.*member);
            } else {
              return std::to_string(s.sim.*mid.*member);
            }
          }};
}

const std::map<std::string, Field, std::less<>>& fields() {
  static const std::map<std::string, Field, std::less<>> table = [] {
    std::map<std::string, Field, std::less<>> t;
    t["sim.carrier_frequency_ghz"] = nested_field(&ExperimentSpec::sim, &SimConfig::carrier_frequency_ghz);
    t["sim.bandwidth_mhz"] = nested_field(&ExperimentSpec::sim, &SimConfig::bandwidth_mhz);
    t["sim.tx_power_dbm"] = nested_field(&ExperimentSpec::sim, &SimConfig::tx_power_dbm);
    t["sim.control_period_ms"] = nested_field(&ExperimentSpec::sim, &SimConfig::control_period_ms);
    t["sim.episode_duration_s"] = nested_field(&ExperimentSpec::sim, &SimConfig::episode_duration_s);
    t["sim.n_vehicles"] = nested_field(&ExperimentSpec::sim, &SimConfig::n_vehicles);
    t["sim.frame_rate_hz"] = nested_field(&ExperimentSpec::sim, &SimConfig::frame_rate_hz);
    t["sim.action_delay_ms"] = nested_field(&ExperimentSpec::sim, &SimConfig::action_delay_ms);
    t["sim.mcs_table"] = {[](ExperimentSpec& s, std::string_view v) {
                            s.sim.mcs_table_path = std::string(v);
                            return true;
                          },
                          [](const ExperimentSpec& s) { return s.sim.mcs_table_path.string(); }};

    using C = ChannelParams;
    t["channel.pathloss_exponent"] = sim_field(&SimConfig::channel, &C::pathloss_exponent);
    t["channel.reference_distance_m"] = sim_field(&SimConfig::channel, &C::reference_distance_m);
    t["channel.shadowing_std_db"] = sim_field(&SimConfig::channel, &C::shadowing_std_db);
    t["channel.shadowing_decorrelation_m"] = sim_field(&SimConfig::channel, &C::shadowing_decorrelation_m);
    t["channel.noise_figure_db"] = sim_field(&SimConfig::channel, &C::noise_figure_db);
    t["channel.antenna_gain_db"] = sim_field(&SimConfig::channel, &C::antenna_gain_db);
    t["channel.interference_margin_db"] = sim_field(&SimConfig::channel, &C::interference_margin_db);
    t["channel.gnb_height_m"] = sim_field(&SimConfig::channel, &C::gnb_height_m);
    t["channel.ue_height_m"] = sim_field(&SimConfig::channel, &C::ue_height_m);
    t["channel.cell_radius_m"] = sim_field(&SimConfig::channel, &C::cell_radius_m);

    using R = RouteParams;
    t["route.center_x_m"] = sim_field(&SimConfig::route, &R::center_x_m);
    t["route.center_y_m"] = sim_field(&SimConfig::route, &R::center_y_m);
    t["route.half_length_m"] = sim_field(&SimConfig::route, &R::half_length_m);
    t["route.half_width_m"] = sim_field(&SimConfig::route, &R::half_width_m);
    t["route.speed_mps"] = sim_field(&SimConfig::route, &R::speed_mps);

    using T = TrafficParams;
    t["traffic.packet_size_bytes"] = sim_field(&SimConfig::traffic, &T::packet_size_bytes);
    t["traffic.payload_cv"] = sim_field(&SimConfig::traffic, &T::payload_cv);
    t["traffic.payload_floor_kb"] = sim_field(&SimConfig::traffic, &T::payload_floor_kb);
    t["traffic.drop_after_ms"] = sim_field(&SimConfig::traffic, &T::drop_after_ms);

    using S = SchedulerParams;
    t["scheduler.symbols_per_subslot"] = sim_field(&SimConfig::scheduler, &S::symbols_per_subslot);
    t["scheduler.subslot_ms"] = sim_field(&SimConfig::scheduler, &S::subslot_ms);
    t["scheduler.resource_share"] = sim_field(&SimConfig::scheduler, &S::resource_share);

    using B = FeatureBounds;
    t["state.delay_max_ms"] = sim_field(&SimConfig::bounds, &B::delay_max_ms);
    t["state.sinr_min_db"] = sim_field(&SimConfig::bounds, &B::sinr_min_db);
    t["state.sinr_max_db"] = sim_field(&SimConfig::bounds, &B::sinr_max_db);
    t["state.mcs_max"] = sim_field(&SimConfig::bounds, &B::mcs_max);

    using A = AgentConfig;
    t["agent.discount"] = nested_field(&ExperimentSpec::agent, &A::discount);
    t["agent.learning_rate"] = nested_field(&ExperimentSpec::agent, &A::learning_rate);
    t["agent.weight_decay"] = nested_field(&ExperimentSpec::agent, &A::weight_decay);
    t["agent.batch_size"] = nested_field(&ExperimentSpec::agent, &A::batch_size);
    t["agent.replay_capacity"] = nested_field(&ExperimentSpec::agent, &A::replay_capacity);
    t["agent.target_sync_period"] = nested_field(&ExperimentSpec::agent, &A::target_sync_period);
    t["agent.eps_start"] = nested_field(&ExperimentSpec::agent, &A::eps_start);
    t["agent.eps_end"] = nested_field(&ExperimentSpec::agent, &A::eps_end);
    t["agent.eps_decay_episodes"] = nested_field(&ExperimentSpec::agent, &A::eps_decay_episodes);

    t["reward.alpha"] = nested_field(&ExperimentSpec::reward, &RewardParams::alpha);
    t["reward.delta_m_ms"] = nested_field(&ExperimentSpec::reward, &RewardParams::delta_m);
    t["reward.cd_m"] = nested_field(&ExperimentSpec::reward, &RewardParams::cd_m);

    t["experiment.offline_episodes"] = number_field(&ExperimentSpec::offline_episodes);
    t["experiment.online_episodes"] = number_field(&ExperimentSpec::online_episodes);
    t["experiment.test_episodes"] = number_field(&ExperimentSpec::test_episodes);
    t["experiment.seed"] = {[](ExperimentSpec& s, std::string_view v) {
                              std::uint64_t seed = 0;
                              if (!parse_number(v, seed)) {
                                return false;
                              }
                              set_seed(s, seed);
                              return true;
                            },
                            [](const ExperimentSpec& s) { return std::to_string(s.seed); }};
    return t;
  }();
  return table;
}

}  // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void set_seed(ExperimentSpec& spec, std::uint64_t seed) {
  spec.seed = seed;
  spec.sim.rng_seed = mix_seed(seed, 0x51);
  spec.agent.rng_seed = mix_seed(seed, 0xa6);
}

void ExperimentSpec::validate() const {
  sim.validate();
  agent.validate();
  reward.validate();
  if (offline_episodes < 0 || online_episodes < 0 || test_episodes < 0) {
    throw ConfigError("episode counts must be non-negative");
  }
}

ExperimentSpec make_profile(std::string_view name, int n_vehicles) {
  ExperimentSpec spec;
  spec.sim.n_vehicles = n_vehicles;
  if (name == "paper") {
    spec.profile = "paper";
    spec.sim.episode_duration_s = 80.0;
    const int phase = n_vehicles == 1 ? 2500 : 500;
    spec.offline_episodes = phase;
    spec.online_episodes = phase;
    spec.test_episodes = 100;
  } else if (name == "quick") {
    spec.profile = "quick";
    spec.sim.episode_duration_s = 20.0;
    spec.offline_episodes = 30;
    spec.online_episodes = 60;
    spec.test_episodes = 20;
  } else {
    throw ConfigError("unknown profile '" + std::string(name) + "' (expected quick or paper)");
  }
  set_seed(spec, 1);
  return spec;
}

void apply_config_text(ExperimentSpec& spec, std::string_view text, std::string_view source) {
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line =
        text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
    pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    line = trim(line);
    if (line.empty()) {
      continue;
    }
    const auto where = std::string(source) + ":" + std::to_string(line_no);
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError(where + ": expected 'section.key = value'");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    const auto it = fields().find(key);
    if (it == fields().end()) {
      throw ConfigError(where + ": unknown key '" + std::string(key) + "'");
    }
    if (!it->second.set(spec, value)) {
      throw ConfigError(where + ": invalid value '" + std::string(value) + "' for " +
                        std::string(key));
    }
  }
}

void apply_config_file(ExperimentSpec& spec, const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open config file: " + path.string());
  }
  std::stringstream buf;
  buf << in.rdbuf();
  apply_config_text(spec, buf.str(), path.string());
}

std::string render_config(const ExperimentSpec& spec) {
  std::string out;
  for (const auto& [key, field] : fields()) {
    out += key + " = " + field.get(spec) + "\n";
  }
  return out;
}

}  // namespace pqos
