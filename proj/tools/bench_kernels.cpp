// Benchmark of the OpenMP kernels against the serial reference path:
// batched tridiagonal sweeps in both orientations, axis stencil application,
// and a full ADI diffusion half-step. Verifies bit-identical results while
// timing both paths.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <random>
#include <vector>

#include "convsplit/compact_ops.hpp"
#include "convsplit/parallel.hpp"
#include "convsplit/problem.hpp"
#include "convsplit/schemes2d.hpp"

using namespace convsplit;

namespace {

double time_of(int reps, const std::function<void()>& body) {
  body();  // warm up
  const auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < reps; ++r) body();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() / reps;
}

bool bit_equal(const GridFunction& a, const GridFunction& b) {
  return std::memcmp(a.v.data(), b.v.data(), a.v.size() * sizeof(double)) == 0;
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-28s serial %10.4f ms   parallel %10.4f ms   speedup %5.2fx   %s\n", name,
              1e3 * serial, 1e3 * parallel, serial / parallel,
              identical ? "bit-identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  int n = 360;
  int reps = 20;
  if (argc > 1) n = std::atoi(argv[1]);
  if (argc > 2) reps = std::atoi(argv[2]);
  std::printf("kernel benchmark, %dx%d grid, %d reps, %d threads\n", n, n, reps,
              par::max_threads());

  const Grid2D grid = Grid2D::over(-1.0, 2.0, n, -1.0, 2.0, n);
  const AxisOps ax = AxisOps::build(grid.x, BoundaryKind::Periodic);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> dist(-1.0, 1.0);

  GridFunction u = GridFunction::zeros(grid, BoundaryKind::Periodic);
  for (auto& x : u.v) x = dist(rng);
  GridFunction out_s = u, out_p = u, work = u;

  struct Case {
    const char* name;
    std::function<void(GridFunction&)> body;
  };
  const FactoredTridiagonal cn = ax.factor(ax.a.plus(ax.delta2, -1e-4));
  std::vector<Case> cases;
  cases.push_back({"row solve batch", [&](GridFunction& f) {
                     f.v = u.v;
                     solve_stencil(cn, Axis::X, f);
                   }});
  cases.push_back({"column solve batch", [&](GridFunction& f) {
                     f.v = u.v;
                     solve_stencil(cn, Axis::Y, f);
                   }});
  cases.push_back({"stencil apply x", [&](GridFunction& f) { apply_stencil(ax.a, Axis::X, u, f); }});
  cases.push_back({"stencil apply y", [&](GridFunction& f) { apply_stencil(ax.a, Axis::Y, u, f); }});

  for (const auto& c : cases) {
    par::set_enabled(false);
    const double ts = time_of(reps, [&] { c.body(out_s); });
    par::set_enabled(true);
    const double tp = time_of(reps, [&] { c.body(out_p); });
    report(c.name, ts, tp, bit_equal(out_s, out_p));
  }

  // Full ADI diffusion half-step through a stepper on the 2D benchmark problem.
  const Problem prob = burgers2d();
  const TimeGrid tg = TimeGrid::over(0.0, 0.6, n * n / 15);
  SchemeConfig cfg;
  Stepper2D stepper(prob, n, tg, cfg, SchemeKind2D::HocAdiSplitting);
  GridFunction f0 = prob.initial(prob.grid2(n));

  par::set_enabled(false);
  GridFunction a = f0;
  const double ts = time_of(reps, [&] {
    a.v = f0.v;
    stepper.adi_diffusion_half_step(a, nullptr, 0.0);
  });
  par::set_enabled(true);
  GridFunction b = f0;
  const double tp = time_of(reps, [&] {
    b.v = f0.v;
    stepper.adi_diffusion_half_step(b, nullptr, 0.0);
  });
  report("adi diffusion half-step", ts, tp, bit_equal(a, b));

  par::set_enabled(false);
  const double ts2 = time_of(reps, [&] {
    a.v = f0.v;
    stepper.convection_step_2d(a, 0.0, tg.tau, 1);
  });
  par::set_enabled(true);
  const double tp2 = time_of(reps, [&] {
    b.v = f0.v;
    stepper.convection_step_2d(b, 0.0, tg.tau, 1);
  });
  report("transport step", ts2, tp2, bit_equal(a, b));
  return 0;
}
