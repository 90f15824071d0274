#pragma once

#include <string>

#include "convsplit/compact_ops.hpp"
#include "convsplit/correction.hpp"
#include "convsplit/diagnostics.hpp"
#include "convsplit/problem.hpp"
#include "convsplit/schemes1d.hpp"

namespace convsplit {

enum class SchemeKind2D { HocAdiSplitting, BpAdi, BpmcAdi, Bdf2ImexHoc };

/// 2D time-marching instance. The diffusion halves are swept x-then-y in
/// factored form (the high-order perturbation term is implicit in the
/// factorization), transport runs dimension-by-dimension in SSP-RK2 form,
/// and the correctors reuse the 1D kernels over the flattened index set.
/// Row/column batches within a sweep run in parallel; sweeps are sequential.
class Stepper2D {
 public:
  Stepper2D(const Problem& p, int cells, const TimeGrid& tg, const SchemeConfig& cfg,
            SchemeKind2D kind);

  StepDiagnostics advance();

  const GridFunction& solution() const { return u_; }
  const MultiplierState& multipliers() const { return state_; }
  const TimeGrid& time_grid() const { return tg_; }
  const Grid2D& grid() const { return grid_; }
  int step_index() const { return n_; }
  double current_time() const { return tg_.t(n_); }
  int last_cg_iterations() const { return last_cg_iters_; }

  // Scheme building blocks, public for direct verification.
  void adi_diffusion_half_step(GridFunction& u, const GridFunction* extra, double t_target);
  void convection_step_2d(GridFunction& u, double t_n, double tau, int k);
  void hoc_adi_splitting_step(GridFunction& u, const GridFunction* extra, int n);

 private:
  void advance_adi(StepDiagnostics& diag);
  void advance_bdf2(StepDiagnostics& diag);
  void ssp_stage_pair(GridFunction& u, double t0, double dt);
  void sample_fluxes(const GridFunction& u, GridFunction& f, GridFunction& g) const;
  void sample_source(double t, GridFunction& out) const;
  void compute_feedback_fields();
  int substeps_for(const GridFunction& u) const;
  void fill_dirichlet_boundary(GridFunction& f, double t) const;
  void solve_x_then_y(GridFunction& f, const FactoredTridiagonal& fx,
                      const FactoredTridiagonal& fy, double t_target);
  void limited_flux_divergence_x(const GridFunction& fv, const GridFunction& slope,
                                 GridFunction& out) const;
  void limited_flux_divergence_y(const GridFunction& gv, const GridFunction& slope,
                                 GridFunction& out) const;

  // BDF2-IMEX baseline pieces (periodic only): matrix-free operator
  // c0 Ax Ay u - gx Ay d2x u - gy Ax d2y u and a diagonally preconditioned
  // conjugate-gradient solve of it.
  void bdf2_operator(double c0, const GridFunction& x, GridFunction& out);
  int cg_solve(double c0, const GridFunction& b, GridFunction& x);

  Problem prob_;
  Grid2D grid_;
  TimeGrid tg_;
  SchemeConfig cfg_;
  SchemeKind2D kind_;
  AxisOps ax_, ay_;

  GridFunction u_, u_prev_;
  MultiplierState state_;
  int n_ = 0;
  int last_cg_iters_ = 0;
  double source_mass_step_ = 0.0;
  bool has_source_ = false;

  GridFunction rhs_, t1_, t2_, t3_, bv_, ff0_, fg0_, ff1_, fg1_, src_, bs0_, bs1_,
      slope_x_, slope_y_, eta_, extra_;
  GridFunction cg_r_, cg_p_, cg_ap_, cg_b_;
};

SchemeKind2D scheme2d_from_name(const std::string& name);

}  // namespace convsplit
