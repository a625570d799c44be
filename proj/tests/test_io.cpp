#include <doctest.h>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>

#include "ruin/errors.hpp"
#include "ruin/io.hpp"

using namespace ruin;

namespace {

double parse(const std::string& s) {
  double x = 0.0;
  std::from_chars(s.data(), s.data() + s.size(), x);
  return x;
}

}  // namespace

TEST_CASE("format_double round-trips") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> expo(-300, 300);
  for (int i = 0; i < 2000; ++i) {
    const double x = std::ldexp(mant(rng), expo(rng));
    CHECK(parse(format_double(x)) == x);
  }
  CHECK(format_double(0.1) == "0.1");
  CHECK(format_double(20.0) == "20");
  CHECK(parse(format_double(std::numeric_limits<double>::denorm_min())) ==
        std::numeric_limits<double>::denorm_min());
}

TEST_CASE("grid CSV round-trips exactly") {
  DensityGrid g{0.1, 0.1, {}};
  for (int i = 0; i < 50; ++i) g.values.push_back(std::exp(-0.3 * i) / 3.0);
  std::stringstream s;
  write_grid_csv(s, g, "t", "density");
  CHECK(s.str().rfind("t,density\n", 0) == 0);
  const DensityGrid back = read_grid_csv(s);
  CHECK(back.values == g.values);
  CHECK(back.t0 == g.t0);
  CHECK(std::abs(back.dt - g.dt) < 1e-15);
}

TEST_CASE("comments, blank lines and one header are skipped") {
  std::istringstream s("# u=10\n# c=1.1\n\nt,value\n0,1\n0.5,0.5\n1.0,0.25\r\n");
  const DensityGrid g = read_grid_csv(s);
  CHECK(g.size() == 3);
  CHECK(g.dt == doctest::Approx(0.5));
  CHECK(g.values[2] == 0.25);
}

TEST_CASE("malformed grids are rejected") {
  std::istringstream two_headers("t,value\nx,y\n0,1\n1,1\n");
  CHECK_THROWS_AS(read_grid_csv(two_headers), DomainError);
  std::istringstream uneven("0,1\n1,1\n2.5,1\n");
  CHECK_THROWS_AS(read_grid_csv(uneven), DomainError);
  std::istringstream one_row("0,1\n");
  CHECK_THROWS_AS(read_grid_csv(one_row), DomainError);
  std::istringstream negative("0,1\n1,-1\n");
  CHECK_THROWS_AS(read_grid_csv(negative), DomainError);
  std::istringstream single_column("0\n1\n");
  CHECK_THROWS_AS(read_grid_csv(single_column), DomainError);
  std::istringstream decreasing("1,1\n0,1\n");
  CHECK_THROWS_AS(read_grid_csv(decreasing), DomainError);
}

TEST_CASE("error messages name the source and line") {
  std::istringstream s("0,1\n1,abc\n");
  try {
    static_cast<void>(read_grid_csv(s, "claims.csv"));
    FAIL("expected an error");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("claims.csv:2") != std::string::npos);
  }
}

TEST_CASE("reading from a file") {
  CHECK_THROWS_AS(read_grid_csv_file("/nonexistent/grid.csv"), DomainError);
  const std::string path = "test_io_grid.csv";
  {
    std::ofstream out(path);
    write_grid_csv(out, DensityGrid{0.0, 0.25, {1.0, 2.0, 3.0}});
  }
  const DensityGrid g = read_grid_csv_file(path);
  CHECK(g.values == std::vector<double>{1.0, 2.0, 3.0});
  std::remove(path.c_str());
}
