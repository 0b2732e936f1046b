#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace specid::cli {

/// Quotes a field when it holds a comma, quote or newline.
std::string csv_field(std::string_view s);

/// Splits one CSV line, honoring double-quoted fields.
std::vector<std::string> csv_split(std::string_view line);

}  // namespace specid::cli
