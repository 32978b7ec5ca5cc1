#include "pqos/application_mode.hpp"

#include <charconv>
#include <stdexcept>

namespace pqos {

const ApplicationMode& mode_info(ModeId id) {
  for (const auto& m : kApplicationModes) {
    if (m.id == id) {
      return m;
    }
  }
  throw std::domain_error("unknown application mode " + std::to_string(static_cast<int>(id)));
}

int mode_number(ModeId id) noexcept { return static_cast<int>(id); }

std::optional<ModeId> parse_mode(int number) noexcept {
  for (const auto& m : kApplicationModes) {
    if (static_cast<int>(m.id) == number) {
      return m.id;
    }
  }
  return std::nullopt;
}

std::optional<ModeId> parse_mode(const std::string& text) noexcept {
  int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc{} || ptr != end) {
    return std::nullopt;
  }
  return parse_mode(value);
}

ModeId action_to_mode(std::size_t action) {
  if (action >= kAgentActions.size()) {
    throw std::domain_error("action index out of range: " + std::to_string(action));
  }
  return kAgentActions[action];
}

std::optional<std::size_t> mode_to_action(ModeId id) noexcept {
  for (std::size_t i = 0; i < kAgentActions.size(); ++i) {
    if (kAgentActions[i] == id) {
      return i;
    }
  }
  return std::nullopt;
}

}  // namespace pqos
