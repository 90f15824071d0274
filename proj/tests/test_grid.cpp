#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <random>

#include "convsplit/grid.hpp"
#include "convsplit/io.hpp"
#include "convsplit/problem.hpp"
#include "test_util.hpp"

using namespace convsplit;

TEST_CASE("grid construction invariants") {
  const Grid1D g = Grid1D::over(0.0, 3.0, 90);
  CHECK(g.h == doctest::Approx(3.0 / 90).epsilon(1e-15));
  CHECK(std::abs(g.h * g.cells - g.length) <= 1e-15 * g.length);
  CHECK_THROWS_AS(Grid1D::over(0.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(Grid1D::over(1.0, 1.0, 8), std::invalid_argument);
  CHECK_THROWS_AS(TimeGrid::over(0.0, 1.0, 0), std::invalid_argument);
}

TEST_CASE("inner product of constants measures the domain") {
  const Grid1D g = Grid1D::over(0.0, 3.0, 6);
  const GridFunction one = GridFunction::sample(g, BoundaryKind::Periodic, [](double) { return 1.0; });
  CHECK(inner_product(one, one) == 3.0);
}

TEST_CASE("constant and first mode are discretely orthogonal") {
  for (int n : {8, 13, 64}) {
    const Grid1D g = Grid1D::over(0.0, 2.0, n);
    const GridFunction one = GridFunction::sample(g, BoundaryKind::Periodic, [](double) { return 1.0; });
    const GridFunction s = GridFunction::sample(
        g, BoundaryKind::Periodic, [&](double x) { return std::sin(2.0 * std::numbers::pi * x / 2.0); });
    CHECK(std::abs(inner_product(one, s)) <= 1e-14 * n);
  }
}

TEST_CASE("inner product equals the directly coded sum") {
  std::mt19937_64 rng(7);
  const Grid1D g = Grid1D::over(-1.0, 2.0, 7);
  GridFunction v = GridFunction::zeros(g, BoundaryKind::Periodic);
  GridFunction w = v;
  for (int i = 0; i < 7; ++i) {
    v.v[i] = std::uniform_real_distribution<double>(-2, 2)(rng);
    w.v[i] = std::uniform_real_distribution<double>(-2, 2)(rng);
  }
  double s = 0.0;
  for (int i = 0; i < 7; ++i) s += v.v[i] * w.v[i];
  CHECK(inner_product(v, w) == g.h * s);  // same summation order, bit for bit
}

TEST_CASE("inner product is symmetric and bilinear") {
  std::mt19937_64 rng(11);
  const Grid1D g = Grid1D::over(0.0, 1.0, 33);
  for (int rep = 0; rep < 20; ++rep) {
    GridFunction v = GridFunction::zeros(g, BoundaryKind::Periodic);
    GridFunction w = v, u = v;
    for (int i = 0; i < 33; ++i) {
      v.v[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
      w.v[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
      u.v[i] = std::uniform_real_distribution<double>(-1, 1)(rng);
    }
    CHECK(inner_product(v, w) == inner_product(w, v));
    const double a = 1.7;
    GridFunction av = v;
    GridFunction vpu = v;
    for (int i = 0; i < 33; ++i) {
      av.v[i] = a * v.v[i];
      vpu.v[i] = v.v[i] + u.v[i];
    }
    CHECK(inner_product(av, w) ==
          doctest::Approx(a * inner_product(v, w)).epsilon(1e-13));
    CHECK(inner_product(vpu, w) ==
          doctest::Approx(inner_product(v, w) + inner_product(u, w)).epsilon(1e-12));
  }
}

TEST_CASE("inner product rejects mismatched grids") {
  const GridFunction a = GridFunction::zeros(Grid1D::over(0, 1, 8), BoundaryKind::Periodic);
  const GridFunction b = GridFunction::zeros(Grid1D::over(0, 1, 16), BoundaryKind::Periodic);
  CHECK_THROWS_AS(inner_product(a, b), std::invalid_argument);
}

TEST_CASE("norms of simple fields") {
  const Grid1D g = Grid1D::over(0.0, 2.5, 40);
  const GridFunction z = GridFunction::zeros(g, BoundaryKind::Periodic);
  const Norms nz = norms(z);
  CHECK(nz.l2 == 0.0);
  CHECK(nz.linf == 0.0);
  CHECK(nz.mass == 0.0);
  CHECK(nz.min == 0.0);
  CHECK(nz.max == 0.0);

  const double c = -0.7;
  const GridFunction k = GridFunction::sample(g, BoundaryKind::Periodic, [=](double) { return c; });
  const Norms nk = norms(k);
  CHECK(nk.mass == doctest::Approx(c * 2.5).epsilon(1e-14));
  CHECK(nk.linf == doctest::Approx(std::abs(c)).epsilon(1e-15));
  CHECK(nk.l2 == doctest::Approx(std::abs(c) * std::sqrt(2.5)).epsilon(1e-14));
  CHECK(nk.min == c);
  CHECK(nk.max == c);
}

TEST_CASE("gaussian hump mass matches the analytic integral") {
  const Problem p = vortex_hump();
  const GridFunction u0 = p.initial(p.grid2(500));
  const double expected = 2.0 * std::numbers::pi * 1.6e-3;
  CHECK(std::abs(norms(u0).mass - expected) <= 1e-6);
}

TEST_CASE("dirichlet functions store both end nodes") {
  const Grid1D g = Grid1D::over(-1.0, 3.0, 10);
  const GridFunction f = GridFunction::sample(g, BoundaryKind::Dirichlet, [](double x) { return x; });
  CHECK(f.nx == 11);
  CHECK(f.v.front() == -1.0);
  CHECK(f.v.back() == 3.0);
}

TEST_CASE("field serialization round trip") {
  const Grid1D g = Grid1D::over(0.0, 1.0, 16);
  std::mt19937_64 rng(3);
  GridFunction f = GridFunction::zeros(g, BoundaryKind::Periodic);
  for (auto& x : f.v) x = std::uniform_real_distribution<double>(-1, 1)(rng);

  const std::string bin = "test_grid_dump.bin";
  write_field_binary(f, bin);
  std::ifstream in(bin, std::ios::binary);
  std::vector<double> back(f.v.size());
  in.read(reinterpret_cast<char*>(back.data()),
          static_cast<std::streamsize>(back.size() * sizeof(double)));
  CHECK(back == f.v);

  const std::string csv = "test_grid_dump.csv";
  write_field_csv(f, csv);
  std::ifstream cin(csv);
  std::string header;
  std::getline(cin, header);
  CHECK(header == "i,x,value");
  int lines = 0;
  for (std::string line; std::getline(cin, line);) ++lines;
  CHECK(lines == f.nx);
  std::remove(bin.c_str());
  std::remove(csv.c_str());
}
