#include "pqos/network_env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pqos/errors.hpp"

namespace pqos {
namespace {

constexpr double kSpeedOfLight = 299792458.0;
constexpr double kThermalNoiseDbmPerHz = -174.0;

enum Stream : std::uint64_t { kMobilityStream = 1, kShadowStream = 2, kPayloadStream = 3 };

std::mt19937_64 make_stream(std::uint64_t seed, Stream stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream)};
  return std::mt19937_64(seq);
}

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

}  // namespace

StateVector make_state(const StepKpis& k, const SimConfig& config) {
  const auto& b = config.bounds;
  const double symbols = static_cast<double>(config.symbols_per_period());
  StateVector s;
  s.features = {
      clamp01(k.mcs_index / b.mcs_max),
      clamp01(k.ofdm_symbols_used / symbols),
      clamp01((k.sinr_db - b.sinr_min_db) / (b.sinr_max_db - b.sinr_min_db)),
      clamp01(k.delay_mean / b.delay_max_ms),
      clamp01(k.delay_max / b.delay_max_ms),
      clamp01(k.delay_min / b.delay_max_ms),
      clamp01(k.delay_std / b.delay_max_ms),
      clamp01(k.prr),
  };
  for (auto& f : s.features) {
    if (!std::isfinite(f)) {
      f = 0.0;
    }
  }
  return s;
}

void NetworkEnv::PeriodAccumulator::add_delay(double d) {
  ++delay_count;
  const double delta = d - delay_mean;
  delay_mean += delta / static_cast<double>(delay_count);
  delay_m2 += delta * (d - delay_mean);
  if (delay_count == 1) {
    delay_min = d;
    delay_max = d;
  } else {
    delay_min = std::min(delay_min, d);
    delay_max = std::max(delay_max, d);
  }
}

NetworkEnv::NetworkEnv(SimConfig config)
    : config_(std::move(config)),
      mcs_table_(config_.mcs_table_path.empty() ? McsTable::standard()
                                                : McsTable::load(config_.mcs_table_path)) {
  config_.validate();
  steps_per_episode_ = config_.steps_per_episode();
  noise_dbm_ = kThermalNoiseDbmPerHz + 10.0 * std::log10(config_.bandwidth_mhz * 1e6) +
               config_.channel.noise_figure_db;
  const double wavelength = kSpeedOfLight / (config_.carrier_frequency_ghz * 1e9);
  fspl_ref_db_ =
      20.0 * std::log10(4.0 * std::numbers::pi * config_.channel.reference_distance_m / wavelength);
  route_perimeter_m_ = 4.0 * (config_.route.half_length_m + config_.route.half_width_m);
  vehicles_.resize(static_cast<std::size_t>(config_.n_vehicles));
}

std::vector<StateVector> NetworkEnv::reset(std::uint64_t seed) {
  auto mobility_rng = make_stream(seed, kMobilityStream);
  shadow_rng_ = make_stream(seed, kShadowStream);
  payload_rng_ = make_stream(seed, kPayloadStream);

  std::uniform_real_distribution<double> phase(0.0, route_perimeter_m_);
  std::normal_distribution<double> shadow(0.0, config_.channel.shadowing_std_db);
  for (auto& v : vehicles_) {
    v = Vehicle{};
    v.route_pos_m = phase(mobility_rng);
  }
  for (auto& v : vehicles_) {
    v.shadow_db = shadow(shadow_rng_);
  }
  step_ = 0;
  rr_offset_ = 0;
  started_ = true;

  std::vector<StateVector> states;
  states.reserve(vehicles_.size());
  for (const auto& v : vehicles_) {
    StepKpis k;
    k.sinr_db = sinr_db(v);
    k.mcs_index = mcs_table_.select(k.sinr_db).mcs;
    states.push_back(make_state(k, config_));
  }
  return states;
}

double NetworkEnv::bits_per_symbol(double spectral_efficiency) const noexcept {
  const double subslot_s = config_.scheduler.subslot_ms * 1e-3;
  return spectral_efficiency * config_.bandwidth_mhz * 1e6 * subslot_s /
         config_.scheduler.symbols_per_subslot * config_.scheduler.resource_share;
}

void NetworkEnv::advance_mobility(Vehicle& v, double dt_ms) {
  v.route_pos_m = std::fmod(v.route_pos_m + config_.route.speed_mps * dt_ms * 1e-3,
                            route_perimeter_m_);
}

void NetworkEnv::advance_shadowing(Vehicle& v, double dt_ms) {
  const double moved = config_.route.speed_mps * dt_ms * 1e-3;
  const double rho = std::exp(-moved / config_.channel.shadowing_decorrelation_m);
  std::normal_distribution<double> innovation(0.0, 1.0);
  v.shadow_db = rho * v.shadow_db +
                std::sqrt(1.0 - rho * rho) * config_.channel.shadowing_std_db * innovation(shadow_rng_);
}

double NetworkEnv::distance_m(int vehicle) const {
  const auto& v = vehicles_.at(static_cast<std::size_t>(vehicle));
  const auto& r = config_.route;
  const double len = 2.0 * r.half_length_m;
  const double wid = 2.0 * r.half_width_m;
  double s = v.route_pos_m;
  double x = 0.0;
  double y = 0.0;
  if (s < len) {
    x = -r.half_length_m + s;
    y = -r.half_width_m;
  } else if ((s -= len) < wid) {
    x = r.half_length_m;
    y = -r.half_width_m + s;
  } else if ((s -= wid) < len) {
    x = r.half_length_m - s;
    y = r.half_width_m;
  } else {
    s -= len;
    x = -r.half_length_m;
    y = r.half_width_m - s;
  }
  x += r.center_x_m;
  y += r.center_y_m;
  const double dz = config_.channel.gnb_height_m - config_.channel.ue_height_m;
  return std::sqrt(x * x + y * y + dz * dz);
}

double NetworkEnv::sinr_db(const Vehicle& v) const {
  const auto index = static_cast<int>(&v - vehicles_.data());
  const auto& ch = config_.channel;
  const double d = std::max(distance_m(index), ch.reference_distance_m);
  const double pathloss =
      fspl_ref_db_ + 10.0 * ch.pathloss_exponent * std::log10(d / ch.reference_distance_m);
  const double rx_dbm = config_.tx_power_dbm + ch.antenna_gain_db - pathloss - v.shadow_db;
  return rx_dbm - noise_dbm_ - ch.interference_margin_db;
}

double NetworkEnv::current_sinr_db(int vehicle) const {
  return sinr_db(vehicles_.at(static_cast<std::size_t>(vehicle)));
}

PacketTotals NetworkEnv::totals(int vehicle) const {
  const auto& v = vehicles_.at(static_cast<std::size_t>(vehicle));
  PacketTotals t = v.totals;
  t.queued = v.queue.size();
  return t;
}

void NetworkEnv::generate_frame(Vehicle& v, ModeId mode, std::int64_t now_ms,
                                PeriodAccumulator& acc) {
  const auto& info = mode_info(mode);
  const double floor_kb = config_.traffic.payload_floor_kb;
  double kb = info.mean_payload_kb;
  if (config_.traffic.payload_cv > 0.0) {
    std::normal_distribution<double> size(info.mean_payload_kb,
                                          config_.traffic.payload_cv * info.mean_payload_kb);
    do {
      kb = size(payload_rng_);
    } while (kb < floor_kb);
  }
  auto bytes = static_cast<std::uint64_t>(std::llround(kb * 1000.0));
  const std::uint32_t mtu = config_.traffic.packet_size_bytes;
  while (bytes > 0) {
    const auto chunk = static_cast<std::uint32_t>(std::min<std::uint64_t>(bytes, mtu));
    v.queue.push_back({now_ms, chunk, step_});
    v.backlog_bytes += chunk;
    bytes -= chunk;
    ++acc.generated;
    ++v.totals.generated;
  }
  acc.frame_mode = mode;
  acc.frame_seen = true;
}

void NetworkEnv::drop_expired(Vehicle& v, std::int64_t now_ms, PeriodAccumulator& acc) {
  const double horizon = config_.traffic.drop_after_ms;
  while (!v.queue.empty() && static_cast<double>(now_ms - v.queue.front().created_ms) > horizon) {
    const auto& p = v.queue.front();
    if (p.step == step_) {
      ++acc.dropped;
    }
    v.backlog_bytes -= p.bytes;
    ++v.totals.dropped;
    v.queue.pop_front();
    v.head_sent_bits = 0.0;
  }
}

void NetworkEnv::transmit(Vehicle& v, double capacity_bits, std::int64_t done_ms,
                          PeriodAccumulator& acc) {
  while (capacity_bits > 0.0 && !v.queue.empty()) {
    const auto& p = v.queue.front();
    const double remaining = p.bytes * 8.0 - v.head_sent_bits;
    if (capacity_bits + 1e-9 < remaining) {
      v.head_sent_bits += capacity_bits;
      return;
    }
    capacity_bits -= remaining;
    acc.add_delay(static_cast<double>(done_ms - p.created_ms));
    if (p.step == step_) {
      ++acc.delivered;
    }
    v.backlog_bytes -= p.bytes;
    ++v.totals.delivered;
    v.queue.pop_front();
    v.head_sent_bits = 0.0;
  }
}

StepKpis NetworkEnv::finish_period(const Vehicle& v, const PeriodAccumulator& acc,
                                   std::int64_t now_ms) const {
  const double subslots = static_cast<double>(config_.control_period_ms / config_.scheduler.subslot_ms);
  StepKpis k;
  k.sinr_db = acc.sinr_sum / subslots;
  k.mcs_index = static_cast<int>(std::lround(acc.mcs_sum / subslots));
  k.ofdm_symbols_used = acc.symbols;
  k.packets_generated = acc.generated;
  k.packets_delivered = acc.delivered;
  k.packets_dropped = acc.dropped;
  for (auto it = v.queue.rbegin(); it != v.queue.rend() && it->step == step_; ++it) {
    ++k.packets_queued;
  }
  k.prr = acc.generated > 0
              ? static_cast<double>(acc.delivered) / static_cast<double>(acc.generated)
              : 1.0;
  k.delay_samples = acc.delay_count;
  if (acc.delay_count > 0) {
    k.delay_mean = acc.delay_mean;
    k.delay_min = acc.delay_min;
    k.delay_max = acc.delay_max;
    k.delay_std = std::sqrt(acc.delay_m2 / static_cast<double>(acc.delay_count));
  } else if (!v.queue.empty()) {
    const double wait = static_cast<double>(now_ms - v.queue.front().created_ms);
    k.delay_mean = k.delay_min = k.delay_max = wait;
  }
  return k;
}

StepResult NetworkEnv::step(std::span<const ModeId> modes) {
  if (!started_) {
    throw std::logic_error("NetworkEnv::step called before reset");
  }
  if (done()) {
    throw std::logic_error("NetworkEnv::step called on a finished episode");
  }
  if (modes.size() != vehicles_.size()) {
    throw std::domain_error("NetworkEnv::step expects " + std::to_string(vehicles_.size()) +
                            " actions, got " + std::to_string(modes.size()));
  }
  for (const auto m : modes) {
    (void)mode_info(m);
  }

  const int period = config_.control_period_ms;
  const int subslot = config_.scheduler.subslot_ms;
  const int frame_interval = config_.frame_interval_ms();
  const int symbol_budget = config_.scheduler.symbols_per_subslot;
  const std::int64_t period_start = static_cast<std::int64_t>(step_) * period;
  const std::size_t n = vehicles_.size();

  std::vector<PeriodAccumulator> acc(n);
  std::vector<ModeId> previous(n);
  for (std::size_t i = 0; i < n; ++i) {
    previous[i] = step_ == 0 ? modes[i] : vehicles_[i].mode;
  }

  std::vector<double> bps(n);
  std::vector<std::int64_t> need(n);
  std::vector<int> granted(n);

  for (int offset = 0; offset < period; offset += subslot) {
    const std::int64_t now = period_start + offset;
    for (std::size_t i = 0; i < n; ++i) {
      auto& v = vehicles_[i];
      if (now > 0) {
        advance_mobility(v, subslot);
        advance_shadowing(v, subslot);
      }
      v.mode = offset < config_.action_delay_ms ? previous[i] : modes[i];
      if (now % frame_interval == 0) {
        generate_frame(v, v.mode, now, acc[i]);
      }
      drop_expired(v, now, acc[i]);

      const double sinr = sinr_db(v);
      const auto sel = mcs_table_.select(sinr);
      acc[i].sinr_sum += sinr;
      acc[i].mcs_sum += sel.mcs;
      bps[i] = bits_per_symbol(sel.spectral_efficiency);
      granted[i] = 0;
      need[i] = 0;
      if (bps[i] > 0.0 && v.backlog_bytes > 0) {
        const double bits = static_cast<double>(v.backlog_bytes) * 8.0 - v.head_sent_bits;
        need[i] = static_cast<std::int64_t>(std::ceil(bits / bps[i] - 1e-12));
      }
    }

    // Work-conserving round robin, one symbol at a time.
    int left = symbol_budget;
    bool progress = true;
    while (left > 0 && progress) {
      progress = false;
      for (std::size_t k = 0; k < n && left > 0; ++k) {
        const std::size_t i = (rr_offset_ + k) % n;
        if (granted[i] < need[i]) {
          ++granted[i];
          --left;
          progress = true;
        }
      }
    }
    rr_offset_ = (rr_offset_ + 1) % n;

    for (std::size_t i = 0; i < n; ++i) {
      if (granted[i] > 0) {
        acc[i].symbols += granted[i];
        transmit(vehicles_[i], granted[i] * bps[i], now + subslot, acc[i]);
      }
    }
  }

  const std::int64_t period_end = period_start + period;
  StepResult result;
  result.states.reserve(n);
  result.qos.reserve(n);
  result.kpis.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto k = finish_period(vehicles_[i], acc[i], period_end);
    QosSample q;
    q.prr = k.prr;
    q.mean_delay = k.delay_mean;
    q.cd = mode_info(acc[i].frame_seen ? acc[i].frame_mode : vehicles_[i].mode).cd_sym;
    q.has_packets = k.packets_generated > 0;
    result.states.push_back(make_state(k, config_));
    result.qos.push_back(q);
    result.kpis.push_back(k);
  }
  ++step_;
  result.done = done();
  return result;
}

}  // namespace pqos
