#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include "ruin/model.hpp"

namespace ruin {

/// Shortest decimal string that reads back to exactly the same double.
std::string format_double(double x);

/// Two-column CSV with a header row, one line per grid node.
void write_grid_csv(std::ostream& out, const DensityGrid& grid, std::string_view t_name = "t",
                    std::string_view value_name = "value");

/// Parses `t,value` rows (header optional; blank lines and `#` lines ignored). The t column
/// must be uniformly spaced; relative deviations up to 1e-6 of dt are accepted.
DensityGrid read_grid_csv(std::istream& in, const std::string& source_name = "input");
DensityGrid read_grid_csv_file(const std::string& path);

}  // namespace ruin
