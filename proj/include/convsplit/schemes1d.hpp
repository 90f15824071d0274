#pragma once

#include <string>
#include <vector>

#include "convsplit/compact_ops.hpp"
#include "convsplit/correction.hpp"
#include "convsplit/diagnostics.hpp"
#include "convsplit/problem.hpp"

namespace convsplit {

struct SchemeConfig {
  int substeps = 1;
  bool auto_substeps = false;
  double cfl_c0 = 1.0 / 3.0;
  bool limiter = false;
  double tvb_m = 10.0;
  // Replace the multiplier feedback lambda^n H'(u^n) by zero in both the
  // predictor and the corrector shift, reducing the correction to a plain
  // cut-off. Bound-preserving runs default to this; the mass-conserving
  // variant keeps the feedback the algorithm threads through.
  bool zero_multiplier_feedback = true;
  SecantConfig secant;
  bool record_entropy = false;
};

struct MultiplierState {
  GridFunction lambda;
  double xi = 0.0;
};

/// TVB-limited interface fluxes. fvals holds nodal flux samples, ubar the
/// conserved-variable samples whose one-sided differences feed the minmod
/// arguments. Entry i of the result is the modified flux at interface i+1/2;
/// periodic data yields nx entries (wrapping), Dirichlet data nx-1 entries
/// with the near-boundary interfaces passed through unlimited. The result
/// stays in flux-difference form, so interface sums telescope exactly.
std::vector<double> tvb_modified_flux(std::span<const double> fvals,
                                      std::span<const double> ubar, double m_tvb,
                                      double h, BoundaryKind bc);

enum class SchemeKind1D { HocSplitting, BpHocSplitting, BpmcHocSplitting, BpBdf2Hoc };

/// One 1D time-marching instance: owns the solution, multiplier state, and
/// all factored systems. Not shareable across threads; kernel-level
/// parallelism lives underneath.
class Stepper1D {
 public:
  Stepper1D(const Problem& p, int cells, const TimeGrid& tg, const SchemeConfig& cfg,
            SchemeKind1D kind);

  StepDiagnostics advance();

  const GridFunction& solution() const { return u_; }
  const MultiplierState& multipliers() const { return state_; }
  const TimeGrid& time_grid() const { return tg_; }
  const Grid1D& grid() const { return grid_; }
  int step_index() const { return n_; }
  double current_time() const { return tg_.t(n_); }
  int last_substeps() const { return last_substeps_; }

  // Scheme building blocks, public so each stage can be verified directly.

  /// Crank-Nicolson diffusion half-step; extra (if present) enters the
  /// right-hand side as (tau/2) A extra.
  void cn_diffusion_half_step(GridFunction& u, const GridFunction* extra, double t_target);

  /// One two-stage SSP-RK2 transport step of size dt starting at time t0.
  void ssp_rk2_convection_step(GridFunction& u, double t0, double dt);

  /// K successive SSP-RK2 steps of size tau/K across [t_n, t_n + tau].
  void substep_convection(GridFunction& u, double t_n, double tau, int k);

  /// Full splitting step: diffusion half, K transport substeps, diffusion half.
  void hoc_splitting_step(GridFunction& u, const GridFunction* extra, int n);

 private:
  void advance_splitting(StepDiagnostics& diag);
  void advance_bdf2(StepDiagnostics& diag);
  void sample_flux(const GridFunction& u, GridFunction& out) const;
  void sample_source(double t, GridFunction& out) const;
  void compute_feedback_fields();  // fills eta_/extra_ from (u_, lambda)
  double max_flux_speed(const GridFunction& u) const;
  int substeps_for(const GridFunction& u) const;
  GridFunction solve_b_with_derivative_bc(const GridFunction& dhat_f,
                                          const GridFunction& fsamples);

  Problem prob_;
  Grid1D grid_;
  TimeGrid tg_;
  SchemeConfig cfg_;
  SchemeKind1D kind_;
  AxisOps ax_;
  FactoredTridiagonal bdf2_sys_;   // (3/(2 tau)) A - gamma d2
  FactoredTridiagonal imex1_sys_;  // (1/tau) A - gamma d2 (first BDF2 step)

  GridFunction u_;
  GridFunction u_prev_;  // BDF2 history
  MultiplierState state_;
  int n_ = 0;
  int last_substeps_ = 1;
  double source_mass_step_ = 0.0;

  bool has_source_ = false;
  GridFunction rhs_, tmp_, flux0_, flux1_, ubar_, bsrc0_, bsrc1_, eta_, extra_, ustar_;
};

SchemeKind1D scheme1d_from_name(const std::string& name);

}  // namespace convsplit
