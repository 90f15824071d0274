#pragma once

#include <functional>
#include <span>
#include <vector>

namespace convsplit {

enum class BoundaryKind { Periodic, Dirichlet };

/// Uniform 1D grid with nodes x_i = origin + i*h. In periodic mode one value
/// is stored per equivalence class (indices 0..cells-1, node `cells` wraps to
/// node 0 shifted by the period); in Dirichlet mode both end nodes are stored.
struct Grid1D {
  double origin = 0.0;
  double length = 0.0;
  int cells = 0;
  double h = 0.0;

  static Grid1D over(double a, double b, int n);

  double node(int i) const { return origin + i * h; }
  int stored_nodes(BoundaryKind bc) const {
    return bc == BoundaryKind::Periodic ? cells : cells + 1;
  }
};

struct Grid2D {
  Grid1D x;
  Grid1D y;

  static Grid2D over(double ax, double bx, int nx, double ay, double by, int ny);
};

/// Uniform partition of [t_begin, t_end] into `steps` intervals.
struct TimeGrid {
  double t_begin = 0.0;
  double t_end = 0.0;
  int steps = 0;
  double tau = 0.0;

  static TimeGrid over(double t0, double t1, int n);

  double t(int n) const { return t_begin + n * tau; }
  double t_half(int n) const { return t_begin + (n + 0.5) * tau; }
};

/// Nodal values of the unknown on a uniform grid, 1D or 2D (row-major, x
/// fastest). In 1D the y direction degenerates to ny = 1, hy = 1 so that
/// weight() is the quadrature weight in either dimension.
struct GridFunction {
  int dim = 1;
  int nx = 0;
  int ny = 1;
  double hx = 0.0;
  double hy = 1.0;
  double x0 = 0.0;
  double y0 = 0.0;
  BoundaryKind bc = BoundaryKind::Periodic;
  std::vector<double> v;

  static GridFunction zeros(const Grid1D& g, BoundaryKind bc);
  static GridFunction zeros(const Grid2D& g, BoundaryKind bc);
  static GridFunction sample(const Grid1D& g, BoundaryKind bc,
                             const std::function<double(double)>& f);
  static GridFunction sample(const Grid2D& g, BoundaryKind bc,
                             const std::function<double(double, double)>& f);

  int size() const { return nx * ny; }
  double weight() const { return hx * hy; }

  double& at(int i) { return v[static_cast<size_t>(i)]; }
  double at(int i) const { return v[static_cast<size_t>(i)]; }
  double& at(int i, int j) { return v[static_cast<size_t>(j) * nx + i]; }
  double at(int i, int j) const { return v[static_cast<size_t>(j) * nx + i]; }

  double x(int i) const { return x0 + i * hx; }
  double y(int j) const { return y0 + j * hy; }

  double* row(int j) { return v.data() + static_cast<size_t>(j) * nx; }
  const double* row(int j) const { return v.data() + static_cast<size_t>(j) * nx; }

  bool same_shape(const GridFunction& o) const {
    return dim == o.dim && nx == o.nx && ny == o.ny && bc == o.bc;
  }
};

struct Norms {
  double l2 = 0.0;
  double linf = 0.0;
  double mass = 0.0;
  double min = 0.0;
  double max = 0.0;
};

/// Discrete L2 inner product h * sum(v_i * w_i); summation runs in ascending
/// index order (row-major in 2D) so results are reproducible bit for bit.
double inner_product(const GridFunction& v, const GridFunction& w);

Norms norms(const GridFunction& v);

/// Byte-for-byte deterministic sum of value*weight in ascending order.
double mass(const GridFunction& v);

}  // namespace convsplit
