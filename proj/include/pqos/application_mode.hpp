#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>

namespace pqos {

/// LiDAR compression/segmentation setting a vehicle streams with.
enum class ModeId : std::uint16_t {
  kRaw = 0,
  kCompressed = 1450,
  kRoadRemoved = 1451,
  kDynamicOnly = 1452,
};

struct ApplicationMode {
  ModeId id;
  double mean_payload_kb;  // average frame size, 1 KB = 1000 bytes
  double cd_sym;           // Chamfer distance of the decoded frame vs. the raw one
};

inline constexpr std::array<ApplicationMode, 4> kApplicationModes{{
    {ModeId::kRaw, 3200.0, 0.0},
    {ModeId::kCompressed, 200.0, 0.000044},
    {ModeId::kRoadRemoved, 104.0, 5.476881},
    {ModeId::kDynamicOnly, 17.0, 35.634660},
}};

/// Modes the learning agent may pick, indexed by network output.
inline constexpr std::array<ModeId, 3> kAgentActions{ModeId::kCompressed, ModeId::kRoadRemoved,
                                                     ModeId::kDynamicOnly};
inline constexpr std::size_t kNumActions = kAgentActions.size();

[[nodiscard]] const ApplicationMode& mode_info(ModeId id);
[[nodiscard]] int mode_number(ModeId id) noexcept;

/// Parses 0, 1450, 1451 or 1452.
[[nodiscard]] std::optional<ModeId> parse_mode(int number) noexcept;
[[nodiscard]] std::optional<ModeId> parse_mode(const std::string& text) noexcept;

[[nodiscard]] ModeId action_to_mode(std::size_t action);
/// Index of `id` in kAgentActions, or nullopt for mode 0.
[[nodiscard]] std::optional<std::size_t> mode_to_action(ModeId id) noexcept;

}  // namespace pqos
