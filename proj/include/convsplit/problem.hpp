#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "convsplit/grid.hpp"

namespace convsplit {

/// Admissible range [m, M] enforced through the multiplier corrections.
/// Quadratic uses H(u) = (M - u)(u - m); Positivity uses H(u) = u and has no
/// upper clip.
struct Bounds {
  enum class Kind { Quadratic, Positivity };
  Kind kind = Kind::Quadratic;
  double lower = 0.0;
  double upper = 1.0;

  double h_value(double u) const {
    return kind == Kind::Quadratic ? (upper - u) * (u - lower) : u;
  }
  double h_prime(double u) const {
    return kind == Kind::Quadratic ? (upper + lower - 2.0 * u) : 1.0;
  }
  bool has_upper() const { return kind == Kind::Quadratic; }
  void validate() const;
};

/// Self-describing benchmark problem: domain, coefficients, flux and source
/// closures, initial/boundary data, optional exact solution, bounds, and
/// auxiliary functionals. Immutable value object, freely shareable.
struct Problem {
  std::string name;
  int dim = 1;
  double x_lo = 0.0, x_hi = 1.0;
  double y_lo = 0.0, y_hi = 1.0;
  double t_begin = 0.0, t_end = 1.0;
  double gamma_x = 0.0, gamma_y = 0.0;
  BoundaryKind bc = BoundaryKind::Periodic;

  // 1D closures
  std::function<double(double)> init1;            // u0(x)
  std::function<double(double, double)> flux1;    // f(x, u)
  std::function<double(double, double)> dflux1;   // df/du
  std::function<double(double, double)> source1;  // S(x, t); empty means zero
  std::function<double(double, double)> exact1;   // u(x, t); empty if unknown
  std::function<double(double, double)> boundary1;  // b(x, t) at the two ends

  // 2D closures
  std::function<double(double, double)> init2;                       // u0(x, y)
  std::function<double(double, double, double)> flux2_f, flux2_g;    // f/g(x, y, u)
  std::function<double(double, double, double)> dflux2_f, dflux2_g;  // d/du
  std::function<double(double, double, double)> source2;             // S(x, y, t)
  std::function<double(double, double, double)> exact2;              // u(x, y, t)
  std::function<double(double, double, double)> boundary2;           // b(x, y, t)

  std::optional<Bounds> bounds;
  std::function<double(const GridFunction&)> entropy;  // optional functional

  bool has_exact() const { return dim == 1 ? bool(exact1) : bool(exact2); }
  bool has_source() const { return dim == 1 ? bool(source1) : bool(source2); }

  GridFunction initial(const Grid1D& g) const;
  GridFunction initial(const Grid2D& g) const;
  GridFunction exact_at(const Grid1D& g, double t) const;
  GridFunction exact_at(const Grid2D& g, double t) const;

  Grid1D grid1(int cells) const { return Grid1D::over(x_lo, x_hi, cells); }
  Grid2D grid2(int cells) const {
    return Grid2D::over(x_lo, x_hi, cells, y_lo, y_hi, cells);
  }
};

// The benchmark family. Diffusivities default to the reference runs and stay
// part of the problem definition because the exact solutions depend on them.
Problem burgers1d_case1(double gamma = 5.0e-3);
Problem burgers1d_case2(double gamma = 1.0e-3);
Problem fokker_planck();
Problem burgers2d(double gamma = 5.0e-3);
Problem buckley_leverett(double gamma = 5.0e-3);
Problem vortex_hump(double gamma = 5.0e-5);

std::vector<std::string> problem_names();

/// Registry lookup; gamma, when given, overrides the problem default.
/// Throws std::invalid_argument for unknown names.
Problem make_problem(const std::string& name, std::optional<double> gamma = {});

}  // namespace convsplit
