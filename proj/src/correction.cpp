#include "convsplit/correction.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace convsplit {

namespace {

// Clipped mass sum(w * clamp(u_i + shift + eta_i)) minus the target, summed
// in ascending index order. The corrector below assigns exactly the clamped
// values, so the accepted residual is bit-identical to the final mass defect.
double clipped_mass_defect(std::span<const double> u, std::span<const double> eta,
                           const Bounds& b, double shift, double target, double w) {
  const double lo = b.lower;
  const double hi = b.has_upper() ? b.upper : std::numeric_limits<double>::infinity();
  double s = 0.0;
  const size_t n = u.size();
  for (size_t k = 0; k < n; ++k) {
    double v = u[k] + shift + (eta.empty() ? 0.0 : eta[k]);
    if (v <= lo)
      v = lo;
    else if (v >= hi)
      v = hi;
    s += v;
  }
  return w * s - target;
}

CorrectionStats assign_branches(std::span<double> u, std::span<const double> eta,
                                std::span<double> lambda, const Bounds& b, double tau,
                                double shift) {
  const double lo = b.lower;
  const bool upper = b.has_upper();
  const double hi = upper ? b.upper : std::numeric_limits<double>::infinity();
  const double hp_lo = b.h_prime(lo);
  const double hp_hi = upper ? b.h_prime(b.upper) : 1.0;
  CorrectionStats st;
  const size_t n = u.size();
  for (size_t k = 0; k < n; ++k) {
    const double v = u[k] + shift + (eta.empty() ? 0.0 : eta[k]);
    if (v <= lo) {
      u[k] = lo;
      lambda[k] = (lo - v) / (tau * hp_lo);
      ++st.clipped;
    } else if (v >= hi) {
      u[k] = hi;
      lambda[k] = (hi - v) / (tau * hp_hi);
      ++st.clipped;
    } else {
      u[k] = v;
      lambda[k] = 0.0;
    }
    st.lambda_max = std::max(st.lambda_max, lambda[k]);
  }
  return st;
}

}  // namespace

CorrectionStats bp_correct(std::span<double> u, std::span<const double> eta,
                           std::span<double> lambda, const Bounds& bounds, double tau) {
  bounds.validate();
  return assign_branches(u, eta, lambda, bounds, tau, 0.0);
}

MassCorrectionResult bpmc_correct(std::span<double> u, std::span<const double> eta,
                                  std::span<double> lambda, const Bounds& bounds,
                                  double tau, double xi_prev, double target_mass,
                                  double node_weight, double domain_measure,
                                  const SecantConfig& cfg) {
  bounds.validate();
  // Base tolerance rides the mass scale; for small-mass problems cap it at
  // 1e-13 * |target| so the per-step defect stays an order below the 1e-12
  // relative budget the structure checks enforce.
  double tol = cfg.tol_scale * std::max(1.0, std::abs(target_mass));
  if (std::abs(target_mass) >= 1e-6)
    tol = std::min(tol, 1e-13 * std::abs(target_mass));
  auto defect = [&](double xi) {
    return clipped_mass_defect(u, eta, bounds, tau * (xi - xi_prev), target_mass,
                               node_weight);
  };

  MassCorrectionResult res;
  double x0 = 0.0;
  double f0 = defect(x0);
  res.iterations = 0;  // counts multiplier updates after the zero guess
  double best_x = x0;
  double best_f = f0;

  if (std::abs(f0) > tol) {
    double x1 = cfg.xi1 != 0.0 ? cfg.xi1 : tau;
    double f1 = defect(x1);
    ++res.iterations;
    if (std::abs(f1) < std::abs(best_f)) {
      best_x = x1;
      best_f = f1;
    }
    bool converged = std::abs(f1) <= tol;
    bool stagnated = false;
    while (!converged && res.iterations < cfg.max_iter) {
      const double df = f1 - f0;
      if (std::abs(df) <= std::numeric_limits<double>::min() ||
          !std::isfinite(df)) {
        stagnated = true;
        break;
      }
      const double x2 = x1 - f1 * (x1 - x0) / df;
      if (!std::isfinite(x2)) {
        stagnated = true;
        break;
      }
      x0 = x1;
      f0 = f1;
      x1 = x2;
      f1 = defect(x1);
      ++res.iterations;
      if (std::abs(f1) < std::abs(best_f)) {
        best_x = x1;
        best_f = f1;
      }
      converged = std::abs(f1) <= tol;
    }

    if (!converged) {
      // The defect is nondecreasing in xi; grow a bracket geometrically from
      // zero and bisect. Failure to bracket means the constraint set cannot
      // carry the requested mass.
      double span = std::max(tau, std::abs(best_f) / domain_measure);
      const double fz = defect(0.0);
      double lo, hi, flo, fhi;
      const double dir = fz > 0.0 ? -1.0 : 1.0;
      lo = 0.0;
      flo = fz;
      hi = dir * span;
      fhi = defect(hi);
      int expansions = 0;
      while (flo * fhi > 0.0 && expansions < 60) {
        hi *= 2.0;
        fhi = defect(hi);
        ++expansions;
      }
      if (flo * fhi > 0.0) {
        throw std::runtime_error(
            "bpmc_correct: cannot bracket the mass multiplier (defect " +
            std::to_string(best_f) + ", target " + std::to_string(target_mass) + ")");
      }
      if (lo > hi) {
        std::swap(lo, hi);
        std::swap(flo, fhi);
      }
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        const double fm = defect(mid);
        ++res.iterations;
        if (std::abs(fm) < std::abs(best_f)) {
          best_x = mid;
          best_f = fm;
        }
        if (std::abs(fm) <= tol || hi - lo <= 1e-16 * (1.0 + std::abs(mid))) break;
        if (flo * fm <= 0.0) {
          hi = mid;
          fhi = fm;
        } else {
          lo = mid;
          flo = fm;
        }
      }
    }
  }

  res.xi = best_x;
  res.defect = best_f;
  res.stats = assign_branches(u, eta, lambda, bounds, tau, tau * (best_x - xi_prev));
  return res;
}

}  // namespace convsplit
