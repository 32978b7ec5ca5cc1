#pragma once

#include <filesystem>
#include <vector>

namespace pqos {

struct McsEntry {
  int mcs;                     // index reported in the agent state
  double sinr_threshold_db;    // minimum SINR at which the entry is usable
  double spectral_efficiency;  // bits/s/Hz
};

struct McsSelection {
  int mcs = 0;
  double spectral_efficiency = 0.0;  // 0 means outage

  bool operator==(const McsSelection&) const = default;
};

/// Piece-wise constant SINR -> MCS map. Entries are sorted by threshold and
/// both thresholds and efficiencies are non-decreasing.
class McsTable {
 public:
  explicit McsTable(std::vector<McsEntry> entries);

  /// 15-entry CQI-style table shipped with the simulator.
  static McsTable standard();

  /// CSV with header `mcs,sinr_threshold_db,spectral_efficiency`.
  static McsTable load(const std::filesystem::path& path);

  /// Highest entry whose threshold is <= sinr_db; (0, 0) below the first one.
  [[nodiscard]] McsSelection select(double sinr_db) const noexcept;

  [[nodiscard]] const std::vector<McsEntry>& entries() const noexcept { return entries_; }
  [[nodiscard]] int max_mcs() const noexcept { return entries_.back().mcs; }

 private:
  std::vector<McsEntry> entries_;
};

[[nodiscard]] McsSelection sinr_to_mcs(double sinr_db, const McsTable& table = McsTable::standard());

}  // namespace pqos
