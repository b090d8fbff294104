#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace intersafe {

/// Splits on commas; fields are not quoted anywhere in the formats we read.
std::vector<std::string_view> split_csv(std::string_view line);
std::string_view strip_cr(std::string_view s);
/// Whole-field parse; accepts "nan"/"inf" so callers can reject them explicitly.
bool parse_double(std::string_view s, double& out);

}  // namespace intersafe
