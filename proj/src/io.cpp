#include "ruin/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <vector>

#include "ruin/errors.hpp"

namespace ruin {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && ptr == s.data() + s.size();
}

}  // namespace

std::string format_double(double x) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return ec == std::errc() ? std::string(buf, ptr) : std::string("nan");
}

void write_grid_csv(std::ostream& out, const DensityGrid& grid, std::string_view t_name,
                    std::string_view value_name) {
  out << t_name << ',' << value_name << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i)
    out << format_double(grid.time(i)) << ',' << format_double(grid.values[i]) << '\n';
}

DensityGrid read_grid_csv(std::istream& in, const std::string& source_name) {
  std::vector<double> ts;
  std::vector<double> vs;
  std::string line;
  int line_no = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty() || row.front() == '#') continue;
    const auto comma = row.find(',');
    if (comma == std::string_view::npos)
      throw DomainError(source_name + ":" + std::to_string(line_no) + ": expected two comma-separated columns");
    double t = 0.0;
    double v = 0.0;
    const bool ok = parse_number(row.substr(0, comma), t) && parse_number(row.substr(comma + 1), v);
    if (!ok) {
      if (ts.empty() && !header_seen) {
        header_seen = true;
        continue;
      }
      throw DomainError(source_name + ":" + std::to_string(line_no) + ": not a number pair");
    }
    ts.push_back(t);
    vs.push_back(v);
  }
  if (ts.size() < 2) throw DomainError(source_name + ": need at least two rows");
  const double dt = (ts.back() - ts.front()) / static_cast<double>(ts.size() - 1);
  if (!(dt > 0.0)) throw DomainError(source_name + ": t column must be increasing");
  for (std::size_t i = 0; i < ts.size(); ++i) {
    if (std::abs(ts[i] - (ts.front() + dt * static_cast<double>(i))) > 1e-6 * dt)
      throw DomainError(source_name + ": t column is not uniformly spaced (row " + std::to_string(i + 1) + ")");
  }
  DensityGrid grid{ts.front(), dt, std::move(vs)};
  grid.validate(source_name);
  return grid;
}

DensityGrid read_grid_csv_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("cannot open density file " + path);
  return read_grid_csv(in, path);
}

}  // namespace ruin
