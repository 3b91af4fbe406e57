#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace fairalloc {

/// Shortest decimal representation that parses back to the same double.
/// Exporters share this so re-running a config reproduces files byte for byte.
std::string format_double(double value);

std::vector<std::string_view> split(std::string_view line, char sep);

std::string_view trim(std::string_view s);

}  // namespace fairalloc
