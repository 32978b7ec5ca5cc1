#include "pqos/link_adaptation.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "pqos/errors.hpp"

namespace pqos {

McsTable::McsTable(std::vector<McsEntry> entries) : entries_(std::move(entries)) {
  if (entries_.empty()) {
    throw ConfigError("MCS table is empty");
  }
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (!(entries_[i].spectral_efficiency > 0.0)) {
      throw ConfigError("MCS table: spectral efficiency must be positive");
    }
    if (i > 0 && (entries_[i].sinr_threshold_db <= entries_[i - 1].sinr_threshold_db ||
                  entries_[i].spectral_efficiency < entries_[i - 1].spectral_efficiency ||
                  entries_[i].mcs <= entries_[i - 1].mcs)) {
      throw ConfigError("MCS table: rows must be strictly increasing in threshold and index");
    }
  }
}

McsTable McsTable::standard() {
  // CQI efficiencies with AWGN switching points for a 10% BLER target.
  static const McsTable table({
      {0, -6.7, 0.1523},
      {1, -4.7, 0.2344},
      {2, -2.3, 0.3770},
      {3, 0.2, 0.6016},
      {4, 2.4, 0.8770},
      {5, 4.3, 1.1758},
      {6, 5.9, 1.4766},
      {7, 8.1, 1.9141},
      {8, 10.3, 2.4063},
      {9, 11.7, 2.7305},
      {10, 14.1, 3.3223},
      {11, 16.3, 3.9023},
      {12, 18.7, 4.5234},
      {13, 21.0, 5.1152},
      {14, 22.7, 5.5547},
  });
  return table;
}

McsTable McsTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw ConfigError("cannot open MCS table: " + path.string());
  }
  std::vector<McsEntry> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') {
      continue;
    }
    if (header) {
      header = false;
      if (line.rfind("mcs", 0) == 0) {
        continue;
      }
    }
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    McsEntry e{};
    if (!(fields >> e.mcs >> e.sinr_threshold_db >> e.spectral_efficiency)) {
      throw ConfigError("malformed MCS table row in " + path.string() + ": " + line);
    }
    rows.push_back(e);
  }
  return McsTable(std::move(rows));
}

McsSelection McsTable::select(double sinr_db) const noexcept {
  const auto it = std::upper_bound(
      entries_.begin(), entries_.end(), sinr_db,
      [](double s, const McsEntry& e) { return s < e.sinr_threshold_db; });
  if (it == entries_.begin()) {
    return {};
  }
  const auto& e = *std::prev(it);
  return {e.mcs, e.spectral_efficiency};
}

McsSelection sinr_to_mcs(double sinr_db, const McsTable& table) { return table.select(sinr_db); }

}  // namespace pqos
