#include "convsplit/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace convsplit {

Grid1D Grid1D::over(double a, double b, int n) {
  if (n < 4) throw std::invalid_argument("Grid1D: compact stencils need at least 4 cells");
  if (!(b > a)) throw std::invalid_argument("Grid1D: empty interval");
  Grid1D g;
  g.origin = a;
  g.length = b - a;
  g.cells = n;
  g.h = (b - a) / n;
  return g;
}

Grid2D Grid2D::over(double ax, double bx, int nx, double ay, double by, int ny) {
  return Grid2D{Grid1D::over(ax, bx, nx), Grid1D::over(ay, by, ny)};
}

TimeGrid TimeGrid::over(double t0, double t1, int n) {
  if (n < 1) throw std::invalid_argument("TimeGrid: need at least one step");
  if (!(t1 > t0)) throw std::invalid_argument("TimeGrid: empty time interval");
  TimeGrid tg;
  tg.t_begin = t0;
  tg.t_end = t1;
  tg.steps = n;
  tg.tau = (t1 - t0) / n;
  return tg;
}

GridFunction GridFunction::zeros(const Grid1D& g, BoundaryKind bc) {
  GridFunction f;
  f.dim = 1;
  f.nx = g.stored_nodes(bc);
  f.ny = 1;
  f.hx = g.h;
  f.hy = 1.0;
  f.x0 = g.origin;
  f.bc = bc;
  f.v.assign(static_cast<size_t>(f.nx), 0.0);
  return f;
}

GridFunction GridFunction::zeros(const Grid2D& g, BoundaryKind bc) {
  GridFunction f;
  f.dim = 2;
  f.nx = g.x.stored_nodes(bc);
  f.ny = g.y.stored_nodes(bc);
  f.hx = g.x.h;
  f.hy = g.y.h;
  f.x0 = g.x.origin;
  f.y0 = g.y.origin;
  f.bc = bc;
  f.v.assign(static_cast<size_t>(f.nx) * f.ny, 0.0);
  return f;
}

GridFunction GridFunction::sample(const Grid1D& g, BoundaryKind bc,
                                  const std::function<double(double)>& fn) {
  GridFunction f = zeros(g, bc);
  for (int i = 0; i < f.nx; ++i) f.v[i] = fn(f.x(i));
  return f;
}

GridFunction GridFunction::sample(const Grid2D& g, BoundaryKind bc,
                                  const std::function<double(double, double)>& fn) {
  GridFunction f = zeros(g, bc);
  for (int j = 0; j < f.ny; ++j)
    for (int i = 0; i < f.nx; ++i) f.at(i, j) = fn(f.x(i), f.y(j));
  return f;
}

double inner_product(const GridFunction& v, const GridFunction& w) {
  if (!v.same_shape(w)) throw std::invalid_argument("inner_product: grid mismatch");
  double s = 0.0;
  const size_t n = v.v.size();
  for (size_t k = 0; k < n; ++k) s += v.v[k] * w.v[k];
  return v.weight() * s;
}

double mass(const GridFunction& v) {
  double s = 0.0;
  for (double x : v.v) s += x;
  return v.weight() * s;
}

Norms norms(const GridFunction& v) {
  if (v.v.empty()) throw std::invalid_argument("norms: empty grid function");
  Norms n;
  double s2 = 0.0;
  double s1 = 0.0;
  n.min = std::numeric_limits<double>::infinity();
  n.max = -std::numeric_limits<double>::infinity();
  for (double x : v.v) {
    s2 += x * x;
    s1 += x;
    n.linf = std::max(n.linf, std::abs(x));
    n.min = std::min(n.min, x);
    n.max = std::max(n.max, x);
  }
  n.l2 = std::sqrt(v.weight() * s2);
  n.mass = v.weight() * s1;
  return n;
}

}  // namespace convsplit
