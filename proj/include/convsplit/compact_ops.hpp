#pragma once

#include <functional>

#include "convsplit/grid.hpp"
#include "convsplit/tridiagonal.hpp"

namespace convsplit {

enum class Axis { X, Y };

/// Fourth-order compact operator family for one grid axis: the explicit
/// central difference and second difference, the implicit averaging operators
/// A = I + (h^2/12) d2 and B = I + (h^2/6) d2, and the Crank-Nicolson pair
/// A -/+ (gamma tau/4) d2 used by the diffusion half-steps. The factored
/// systems are built once and reused for every sweep.
struct AxisOps {
  Grid1D grid;
  BoundaryKind bc = BoundaryKind::Periodic;

  TridiagonalStencil dhat;    // (-1/2h, 0, 1/2h)
  TridiagonalStencil delta2;  // (1, -2, 1)/h^2
  TridiagonalStencil a;       // (1/12, 10/12, 1/12)
  TridiagonalStencil b;       // (1/6, 4/6, 1/6)

  FactoredTridiagonal a_fact;
  FactoredTridiagonal b_fact;

  double cn_gamma = 0.0;
  double cn_tau = 0.0;
  TridiagonalStencil cn_plus;
  FactoredTridiagonal cn_minus;

  static AxisOps build(const Grid1D& g, BoundaryKind bc);

  /// Factors A - (gamma tau/4) d2 and records A + (gamma tau/4) d2.
  void set_cn(double gamma, double tau);

  /// Factors an arbitrary combination of this axis's stencils.
  FactoredTridiagonal factor(const TridiagonalStencil& s) const;

  int solve_size() const;  // cyclic: cells; line: interior count
};

/// Pointwise stencil application along an axis. Periodic functions wrap;
/// Dirichlet functions are evaluated at interior nodes using the stored
/// boundary values, with boundary entries of the output set to zero.
void apply_stencil(const TridiagonalStencil& s, Axis axis, const GridFunction& in,
                   GridFunction& out);

/// In-place solve of fact along an axis, batched over the perpendicular
/// index. For Dirichlet functions the interior block is solved with the known
/// boundary values moved to the right-hand side; `bl`/`br` supply the target
/// boundary values per line (line index = perpendicular stored index) and the
/// boundary entries of f are overwritten with them.
void solve_stencil(const FactoredTridiagonal& fact, Axis axis, GridFunction& f,
                   const std::function<double(int)>& bl = {},
                   const std::function<double(int)>& br = {});

enum class CompactOp { Dhat, Delta2, A, B };

GridFunction apply(const AxisOps& ops, CompactOp op, Axis axis, const GridFunction& v);

/// Solves A u = rhs (or B u = rhs). Dirichlet mode takes the boundary values
/// of u; they default to zero.
GridFunction invert(const AxisOps& ops, CompactOp op, Axis axis, const GridFunction& rhs,
                    double left = 0.0, double right = 0.0);

}  // namespace convsplit
