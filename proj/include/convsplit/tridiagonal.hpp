#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace convsplit {

enum class TridiagonalTopology { Cyclic, Line };

/// Constant-coefficient stencil (sub, diag, sup): row i reads
/// sub*x_{i-1} + diag*x_i + sup*x_{i+1}, wrapping at the ends in cyclic
/// topology and truncating in line topology.
struct TridiagonalStencil {
  double sub = 0.0;
  double diag = 0.0;
  double sup = 0.0;

  bool diagonally_dominant() const;

  TridiagonalStencil scaled(double c) const { return {c * sub, c * diag, c * sup}; }
  TridiagonalStencil plus(const TridiagonalStencil& o, double c) const {
    return {sub + c * o.sub, diag + c * o.diag, sup + c * o.sup};
  }
};

struct SingularSystemError : std::runtime_error {
  explicit SingularSystemError(int index)
      : std::runtime_error("tridiagonal system is numerically singular (pivot " +
                           std::to_string(index) + ")"),
        pivot_index(index) {}
  int pivot_index;
};

/// O(n) LU factorization of a constant-coefficient (cyclic) tridiagonal
/// matrix; the periodic corner couplings are folded in by a rank-one
/// correction over the line factorization, so one factorization serves any
/// number of right-hand sides. Immutable after factor(); solves are
/// allocation-free and may run concurrently.
class FactoredTridiagonal {
 public:
  FactoredTridiagonal() = default;

  static FactoredTridiagonal factor(const TridiagonalStencil& s, int n,
                                    TridiagonalTopology topo);

  // In-place solve over n entries spaced `stride` apart.
  void solve(double* x, std::ptrdiff_t stride = 1) const;

  // y = M x (the matrix that solve() inverts).
  void apply(const double* x, double* y, std::ptrdiff_t stride = 1) const;

  int size() const { return n_; }
  TridiagonalTopology topology() const { return topo_; }
  const TridiagonalStencil& stencil() const { return s_; }
  bool diagonally_dominant() const { return dominant_; }

 private:
  int n_ = 0;
  TridiagonalTopology topo_ = TridiagonalTopology::Line;
  TridiagonalStencil s_{};
  bool dominant_ = false;
  bool corner_correction_ = false;
  std::vector<double> cp_;    // eliminated super-diagonal coefficients
  std::vector<double> inv_;   // reciprocal pivots
  std::vector<double> z_;     // pre-solved correction column (cyclic only)
  double v_last_ = 0.0;       // weight of x_{n-1} in the correction functional
  double denom_inv_ = 0.0;    // 1 / (1 + v.z)
};

/// Solves `rows` independent systems stored in a 2D block: row r starts at
/// data + r*row_stride, with elements elem_stride apart. Rows are processed
/// in parallel when enabled; results are bit-identical to the sequential map.
void solve_batch(const FactoredTridiagonal& fact, double* data, int rows,
                 std::ptrdiff_t row_stride, std::ptrdiff_t elem_stride = 1);

}  // namespace convsplit
