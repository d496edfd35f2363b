#pragma once

#include <string>
#include <string_view>

namespace smoothkl {

// Shortest decimal that parses back to the same double.
std::string format_number(double v);
double parse_number(std::string_view text);
long long parse_integer(std::string_view text);

}  // namespace smoothkl
