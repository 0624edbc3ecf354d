#pragma once

#include <string>
#include <string_view>

namespace lfrl {

// Shortest decimal text that reads back to the identical double.
std::string format_double(double v);
// Strict parse of a whole string as a double; throws std::invalid_argument.
double parse_double(std::string_view text);
long long parse_integer(std::string_view text);

}  // namespace lfrl
