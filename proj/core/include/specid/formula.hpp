#pragma once

#include <map>
#include <string>
#include <string_view>

namespace specid {

/// Element symbol -> atom count. Counts are positive; absent elements are
/// not stored.
using Formula = std::map<std::string, int>;

/// Hill-order formula string: C, then H, then the rest alphabetically; with no
/// carbon, everything alphabetically. Empty formula -> "".
std::string format_formula(const Formula& formula);

/// Parses strings like "C7H8N4O2" or "ClNa". Throws specid::FormatError on
/// anything that is not a sequence of element symbols with optional counts.
Formula parse_formula(std::string_view text);

}  // namespace specid
