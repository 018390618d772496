#pragma once

#include <string>
#include <string_view>

namespace clmc {

/// Shortest-form text for a double with 17 significant digits ("nan"/"inf" for non-finite values).
std::string format_number(double value);

/// Shortest text that reads back as the same double (for labels and descriptions).
std::string format_shortest(double value);

/// Parse a whole field as a double; throws std::invalid_argument on trailing junk.
double parse_number(std::string_view text);

} // namespace clmc
