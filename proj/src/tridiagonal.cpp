#include "convsplit/tridiagonal.hpp"

#include <cmath>

#include "convsplit/parallel.hpp"

namespace convsplit {

bool TridiagonalStencil::diagonally_dominant() const {
  return std::abs(diag) > std::abs(sub) + std::abs(sup);
}

FactoredTridiagonal FactoredTridiagonal::factor(const TridiagonalStencil& s, int n,
                                                TridiagonalTopology topo) {
  if (n < 3) throw std::invalid_argument("FactoredTridiagonal: n must be at least 3");
  FactoredTridiagonal f;
  f.n_ = n;
  f.topo_ = topo;
  f.s_ = s;
  f.dominant_ = s.diagonally_dominant();
  // A cyclic matrix whose corner couplings vanish is a line matrix; skipping
  // the correction keeps the two topologies bit-identical in that case.
  f.corner_correction_ =
      topo == TridiagonalTopology::Cyclic && (s.sub != 0.0 || s.sup != 0.0);

  const double scale = std::abs(s.diag) + std::abs(s.sub) + std::abs(s.sup);
  const double tiny = 1e-14 * (scale > 0.0 ? scale : 1.0);

  // First/last pivots differ in the corrected factorization: folding both
  // corners into a single rank-one update perturbs those two diagonal entries.
  double d_first = s.diag;
  double d_last = s.diag;
  double gamma = 0.0;
  if (f.corner_correction_) {
    gamma = -s.diag;
    d_first = s.diag - gamma;                   // = 2*diag
    d_last = s.diag - s.sup * s.sub / gamma;    // corners are (sup, sub)
  }

  f.cp_.resize(n);
  f.inv_.resize(n);
  double denom = d_first;
  if (std::abs(denom) <= tiny) throw SingularSystemError(0);
  f.inv_[0] = 1.0 / denom;
  f.cp_[0] = s.sup * f.inv_[0];
  for (int i = 1; i < n; ++i) {
    const double d = (i == n - 1) ? d_last : s.diag;
    denom = d - s.sub * f.cp_[i - 1];
    if (std::abs(denom) <= tiny) throw SingularSystemError(i);
    f.inv_[i] = 1.0 / denom;
    f.cp_[i] = s.sup * f.inv_[i];
  }

  if (f.corner_correction_) {
    // z = T'^{-1} u with u = (gamma, 0, ..., 0, sup); the corner column of the
    // rank-one update. v = (1, 0, ..., 0, sub/gamma).
    f.z_.assign(n, 0.0);
    f.z_[0] = gamma;
    f.z_[n - 1] = s.sup;
    // plain line solve on z
    f.z_[0] *= f.inv_[0];
    for (int i = 1; i < n; ++i) f.z_[i] = (f.z_[i] - s.sub * f.z_[i - 1]) * f.inv_[i];
    for (int i = n - 2; i >= 0; --i) f.z_[i] -= f.cp_[i] * f.z_[i + 1];

    f.v_last_ = s.sub / gamma;
    const double d1 = 1.0 + f.z_[0] + f.v_last_ * f.z_[n - 1];
    const double zmag = 1.0 + std::abs(f.z_[0]) + std::abs(f.v_last_ * f.z_[n - 1]);
    if (std::abs(d1) <= 1e-12 * zmag) throw SingularSystemError(n - 1);
    f.denom_inv_ = 1.0 / d1;
  }
  return f;
}

void FactoredTridiagonal::solve(double* x, std::ptrdiff_t stride) const {
  const int n = n_;
  const double a = s_.sub;
  x[0] *= inv_[0];
  for (int i = 1; i < n; ++i) x[i * stride] = (x[i * stride] - a * x[(i - 1) * stride]) * inv_[i];
  for (int i = n - 2; i >= 0; --i) x[i * stride] -= cp_[i] * x[(i + 1) * stride];
  if (corner_correction_) {
    const double fac = (x[0] + v_last_ * x[(n - 1) * stride]) * denom_inv_;
    for (int i = 0; i < n; ++i) x[i * stride] -= fac * z_[i];
  }
}

void FactoredTridiagonal::apply(const double* x, double* y, std::ptrdiff_t stride) const {
  const int n = n_;
  const double a = s_.sub;
  const double b = s_.diag;
  const double c = s_.sup;
  if (topo_ == TridiagonalTopology::Cyclic) {
    y[0] = a * x[(n - 1) * stride] + b * x[0] + c * x[stride];
    for (int i = 1; i < n - 1; ++i)
      y[i * stride] = a * x[(i - 1) * stride] + b * x[i * stride] + c * x[(i + 1) * stride];
    y[(n - 1) * stride] = a * x[(n - 2) * stride] + b * x[(n - 1) * stride] + c * x[0];
  } else {
    y[0] = b * x[0] + c * x[stride];
    for (int i = 1; i < n - 1; ++i)
      y[i * stride] = a * x[(i - 1) * stride] + b * x[i * stride] + c * x[(i + 1) * stride];
    y[(n - 1) * stride] = a * x[(n - 2) * stride] + b * x[(n - 1) * stride];
  }
}

void solve_batch(const FactoredTridiagonal& fact, double* data, int rows,
                 std::ptrdiff_t row_stride, std::ptrdiff_t elem_stride) {
  par::for_range(0, rows, [&](int r) { fact.solve(data + r * row_stride, elem_stride); });
}

}  // namespace convsplit
