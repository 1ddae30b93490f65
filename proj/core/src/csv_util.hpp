#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace levelset::detail {

std::vector<std::string> split_csv_line(std::string_view line);

// Throws SchemaError naming the line on malformed input.
double parse_double(std::string_view cell, std::size_t line_no);

// Shortest representation that round-trips, '.' decimal separator,
// independent of the global locale.
std::string format_double(double v);

}  // namespace levelset::detail
