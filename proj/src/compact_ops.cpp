#include "convsplit/compact_ops.hpp"

#include <stdexcept>

#include "convsplit/parallel.hpp"

namespace convsplit {

namespace {

TridiagonalTopology topology_for(BoundaryKind bc) {
  return bc == BoundaryKind::Periodic ? TridiagonalTopology::Cyclic
                                      : TridiagonalTopology::Line;
}

void check_axis(const GridFunction& f, Axis axis) {
  if (axis == Axis::Y && f.dim != 2)
    throw std::invalid_argument("axis y requested on a 1D grid function");
}

}  // namespace

AxisOps AxisOps::build(const Grid1D& g, BoundaryKind bc) {
  AxisOps ops;
  ops.grid = g;
  ops.bc = bc;
  const double h = g.h;
  ops.dhat = {-0.5 / h, 0.0, 0.5 / h};
  ops.delta2 = {1.0 / (h * h), -2.0 / (h * h), 1.0 / (h * h)};
  ops.a = {1.0 / 12.0, 10.0 / 12.0, 1.0 / 12.0};
  ops.b = {1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0};
  ops.a_fact = ops.factor(ops.a);
  ops.b_fact = ops.factor(ops.b);
  return ops;
}

void AxisOps::set_cn(double gamma, double tau) {
  if (!(gamma > 0.0) || !(tau > 0.0))
    throw std::invalid_argument("set_cn: gamma and tau must be positive");
  cn_gamma = gamma;
  cn_tau = tau;
  const double r = gamma * tau / 4.0;
  cn_plus = a.plus(delta2, r);
  cn_minus = factor(a.plus(delta2, -r));
}

FactoredTridiagonal AxisOps::factor(const TridiagonalStencil& s) const {
  return FactoredTridiagonal::factor(s, solve_size(), topology_for(bc));
}

int AxisOps::solve_size() const {
  return bc == BoundaryKind::Periodic ? grid.cells : grid.cells - 1;
}

void apply_stencil(const TridiagonalStencil& s, Axis axis, const GridFunction& in,
                   GridFunction& out) {
  check_axis(in, axis);
  if (!in.same_shape(out)) throw std::invalid_argument("apply_stencil: shape mismatch");
  const int nx = in.nx;
  const int ny = in.ny;
  const double a = s.sub;
  const double b = s.diag;
  const double c = s.sup;
  const bool periodic = in.bc == BoundaryKind::Periodic;

  if (axis == Axis::X) {
    par::for_range(0, ny, [&](int j) {
      const double* u = in.row(j);
      double* w = out.row(j);
      if (periodic) {
        w[0] = a * u[nx - 1] + b * u[0] + c * u[1];
        for (int i = 1; i < nx - 1; ++i) w[i] = a * u[i - 1] + b * u[i] + c * u[i + 1];
        w[nx - 1] = a * u[nx - 2] + b * u[nx - 1] + c * u[0];
      } else {
        const bool boundary_row = in.dim == 2 && (j == 0 || j == ny - 1);
        w[0] = 0.0;
        w[nx - 1] = 0.0;
        if (boundary_row) {
          for (int i = 1; i < nx - 1; ++i) w[i] = 0.0;
        } else {
          for (int i = 1; i < nx - 1; ++i) w[i] = a * u[i - 1] + b * u[i] + c * u[i + 1];
        }
      }
    });
  } else {
    par::for_range(0, ny, [&](int j) {
      double* w = out.row(j);
      if (periodic) {
        const double* um = in.row(j == 0 ? ny - 1 : j - 1);
        const double* u0 = in.row(j);
        const double* up = in.row(j == ny - 1 ? 0 : j + 1);
        for (int i = 0; i < nx; ++i) w[i] = a * um[i] + b * u0[i] + c * up[i];
      } else {
        if (j == 0 || j == ny - 1) {
          for (int i = 0; i < nx; ++i) w[i] = 0.0;
          return;
        }
        const double* um = in.row(j - 1);
        const double* u0 = in.row(j);
        const double* up = in.row(j + 1);
        w[0] = 0.0;
        w[nx - 1] = 0.0;
        for (int i = 1; i < nx - 1; ++i) w[i] = a * um[i] + b * u0[i] + c * up[i];
      }
    });
  }
}

void solve_stencil(const FactoredTridiagonal& fact, Axis axis, GridFunction& f,
                   const std::function<double(int)>& bl,
                   const std::function<double(int)>& br) {
  check_axis(f, axis);
  const int nx = f.nx;
  const int ny = f.ny;
  const bool periodic = f.bc == BoundaryKind::Periodic;
  const TridiagonalStencil& s = fact.stencil();

  if (axis == Axis::X) {
    if (fact.size() != (periodic ? nx : nx - 2))
      throw std::invalid_argument("solve_stencil: system size mismatch");
    if (periodic) {
      solve_batch(fact, f.v.data(), ny, nx, 1);
    } else {
      const int j0 = f.dim == 2 ? 1 : 0;
      const int j1 = f.dim == 2 ? ny - 1 : ny;
      par::for_range(j0, j1, [&](int j) {
        double* line = f.row(j);
        const double vl = bl ? bl(j) : 0.0;
        const double vr = br ? br(j) : 0.0;
        line[1] -= s.sub * vl;
        line[nx - 2] -= s.sup * vr;
        fact.solve(line + 1, 1);
        line[0] = vl;
        line[nx - 1] = vr;
      });
    }
  } else {
    if (fact.size() != (periodic ? ny : ny - 2))
      throw std::invalid_argument("solve_stencil: system size mismatch");
    if (periodic) {
      solve_batch(fact, f.v.data(), nx, 1, nx);
    } else {
      par::for_range(1, nx - 1, [&](int i) {
        double* col = f.v.data() + i;
        const double vl = bl ? bl(i) : 0.0;
        const double vr = br ? br(i) : 0.0;
        col[static_cast<std::ptrdiff_t>(nx)] -= s.sub * vl;
        col[static_cast<std::ptrdiff_t>(nx) * (ny - 2)] -= s.sup * vr;
        fact.solve(col + nx, nx);
        col[0] = vl;
        col[static_cast<std::ptrdiff_t>(nx) * (ny - 1)] = vr;
      });
    }
  }
}

GridFunction apply(const AxisOps& ops, CompactOp op, Axis axis, const GridFunction& v) {
  GridFunction out = v;
  const TridiagonalStencil* s = nullptr;
  switch (op) {
    case CompactOp::Dhat: s = &ops.dhat; break;
    case CompactOp::Delta2: s = &ops.delta2; break;
    case CompactOp::A: s = &ops.a; break;
    case CompactOp::B: s = &ops.b; break;
  }
  apply_stencil(*s, axis, v, out);
  return out;
}

GridFunction invert(const AxisOps& ops, CompactOp op, Axis axis, const GridFunction& rhs,
                    double left, double right) {
  if (op != CompactOp::A && op != CompactOp::B)
    throw std::invalid_argument("invert: only the A and B operators are invertible here");
  GridFunction u = rhs;
  const FactoredTridiagonal& fact = op == CompactOp::A ? ops.a_fact : ops.b_fact;
  auto cl = [left](int) { return left; };
  auto cr = [right](int) { return right; };
  solve_stencil(fact, axis, u, cl, cr);
  return u;
}

}  // namespace convsplit
