#pragma once

#include <string>

namespace dualsmpc {

/// 17-significant-digit decimal form used in files; round-trips doubles.
std::string format_g17(double v);

/// Shortest decimal form that round-trips, used in reports.
std::string format_shortest(double v);

}  // namespace dualsmpc
