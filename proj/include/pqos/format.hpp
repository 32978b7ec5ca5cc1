#pragma once

#include <string>

namespace pqos {

/// Shortest %.15g..%.17g rendering that parses back to exactly `v`.
[[nodiscard]] std::string format_real(double v);

}  // namespace pqos
