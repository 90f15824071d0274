#pragma once

#include <span>

#include "convsplit/problem.hpp"

namespace convsplit {

struct SecantConfig {
  double xi1 = 0.0;  // first nonzero iterate; 0 selects O(tau) automatically
  double tol_scale = 1e-13;
  int max_iter = 50;
};

struct CorrectionStats {
  int clipped = 0;
  double lambda_max = 0.0;
};

/// Closed-form solve of the pointwise KKT system: v = u + eta, then the
/// three-branch assignment. On return u lies in [m, M] exactly, lambda >= 0,
/// and lambda * H(u) = 0 at every node. eta may be empty (treated as zero).
CorrectionStats bp_correct(std::span<double> u, std::span<const double> eta,
                           std::span<double> lambda, const Bounds& bounds, double tau);

struct MassCorrectionResult {
  double xi = 0.0;
  int iterations = 0;
  double defect = 0.0;  // clipped-mass residual at the accepted multiplier
  CorrectionStats stats;
};

/// Bound-and-mass correction: finds the scalar multiplier xi solving the
/// clipped-mass equation by the secant iteration (bisection fallback on
/// stagnation), then assigns (u, lambda) through the same branch table.
/// node_weight is the quadrature weight per node, domain_measure the total
/// measure used to scale the fallback bracket.
MassCorrectionResult bpmc_correct(std::span<double> u, std::span<const double> eta,
                                  std::span<double> lambda, const Bounds& bounds,
                                  double tau, double xi_prev, double target_mass,
                                  double node_weight, double domain_measure,
                                  const SecantConfig& cfg);

}  // namespace convsplit
