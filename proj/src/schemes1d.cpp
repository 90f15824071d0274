#include "convsplit/schemes1d.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

namespace convsplit {

namespace {

double minmod3(double a1, double a2, double a3) {
  if (a1 > 0.0 && a2 > 0.0 && a3 > 0.0) return std::min(std::min(a1, a2), a3);
  if (a1 < 0.0 && a2 < 0.0 && a3 < 0.0) return std::max(std::max(a1, a2), a3);
  return 0.0;
}

void check_finite(const GridFunction& flux) {
  double s = 0.0;
  for (double x : flux.v) s += x;
  if (!std::isfinite(s)) {
    for (int i = 0; i < flux.size(); ++i) {
      if (!std::isfinite(flux.v[i]))
        throw std::runtime_error("flux evaluation produced a non-finite value at node " +
                                 std::to_string(i));
    }
  }
}

}  // namespace

std::vector<double> tvb_modified_flux(std::span<const double> fvals,
                                      std::span<const double> ubar, double m_tvb,
                                      double h, BoundaryKind bc) {
  const int n = static_cast<int>(fvals.size());
  const double threshold = m_tvb * h * h;
  if (bc == BoundaryKind::Periodic) {
    std::vector<double> fh(n);
    for (int i = 0; i < n; ++i) {
      const int ip = i + 1 == n ? 0 : i + 1;
      const int im = i == 0 ? n - 1 : i - 1;
      double d = 0.5 * (fvals[ip] - fvals[i]);
      if (std::abs(d) > threshold)
        d = minmod3(d, ubar[ip] - ubar[i], ubar[i] - ubar[im]);
      fh[i] = fvals[i] + d;
    }
    return fh;
  }
  std::vector<double> fh(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    double d = 0.5 * (fvals[i + 1] - fvals[i]);
    // slope arguments need valid conserved values at i-1, i, i+1
    if (i >= 2 && i <= n - 4 && std::abs(d) > threshold)
      d = minmod3(d, ubar[i + 1] - ubar[i], ubar[i] - ubar[i - 1]);
    fh[i] = fvals[i] + d;
  }
  return fh;
}

SchemeKind1D scheme1d_from_name(const std::string& name) {
  if (name == "hoc_splitting") return SchemeKind1D::HocSplitting;
  if (name == "bp_hoc_splitting") return SchemeKind1D::BpHocSplitting;
  if (name == "bpmc_hoc_splitting") return SchemeKind1D::BpmcHocSplitting;
  if (name == "bp_bdf2_hoc") return SchemeKind1D::BpBdf2Hoc;
  throw std::invalid_argument("unknown 1D scheme: " + name);
}

Stepper1D::Stepper1D(const Problem& p, int cells, const TimeGrid& tg,
                     const SchemeConfig& cfg, SchemeKind1D kind)
    : prob_(p), grid_(p.grid1(cells)), tg_(tg), cfg_(cfg), kind_(kind) {
  if (p.dim != 1) throw std::invalid_argument("Stepper1D: problem is not one-dimensional");
  if (kind_ != SchemeKind1D::HocSplitting && !prob_.bounds)
    throw std::invalid_argument("Stepper1D: scheme needs a bounds specification");
  if (prob_.bounds) prob_.bounds->validate();
  if (cfg_.substeps < 1) throw std::invalid_argument("Stepper1D: substeps must be >= 1");
  if (prob_.bc == BoundaryKind::Dirichlet && !prob_.boundary1)
    throw std::invalid_argument("Stepper1D: Dirichlet problem without boundary provider");

  ax_ = AxisOps::build(grid_, prob_.bc);
  ax_.set_cn(prob_.gamma_x, tg_.tau);
  if (kind_ == SchemeKind1D::BpBdf2Hoc) {
    const double g = prob_.gamma_x;
    bdf2_sys_ = ax_.factor(ax_.a.scaled(1.5 / tg_.tau).plus(ax_.delta2, -g));
    imex1_sys_ = ax_.factor(ax_.a.scaled(1.0 / tg_.tau).plus(ax_.delta2, -g));
  }

  u_ = prob_.initial(grid_);
  state_.lambda = GridFunction::zeros(grid_, prob_.bc);
  has_source_ = prob_.has_source();

  rhs_ = tmp_ = flux0_ = flux1_ = ubar_ = bsrc0_ = bsrc1_ = eta_ = extra_ = ustar_ = state_.lambda;
  if (kind_ == SchemeKind1D::BpBdf2Hoc) u_prev_ = u_;
}

void Stepper1D::sample_flux(const GridFunction& u, GridFunction& out) const {
  const auto& f = prob_.flux1;
  for (int i = 0; i < u.nx; ++i) out.v[i] = f(u.x(i), u.v[i]);
  check_finite(out);
}

void Stepper1D::sample_source(double t, GridFunction& out) const {
  const auto& s = prob_.source1;
  for (int i = 0; i < out.nx; ++i) out.v[i] = s(out.x(i), t);
}

double Stepper1D::max_flux_speed(const GridFunction& u) const {
  double m = 0.0;
  for (int i = 0; i < u.nx; ++i) m = std::max(m, std::abs(prob_.dflux1(u.x(i), u.v[i])));
  return m;
}

int Stepper1D::substeps_for(const GridFunction& u) const {
  if (!cfg_.auto_substeps) return cfg_.substeps;
  const double speed = max_flux_speed(u);
  const double ratio = tg_.tau * speed / grid_.h / cfg_.cfl_c0;
  return std::max(1, static_cast<int>(std::ceil(ratio)));
}

void Stepper1D::cn_diffusion_half_step(GridFunction& u, const GridFunction* extra,
                                       double t_target) {
  apply_stencil(ax_.cn_plus, Axis::X, u, rhs_);
  if (extra) {
    apply_stencil(ax_.a, Axis::X, *extra, tmp_);
    const double c = 0.5 * tg_.tau;
    for (int i = 0; i < rhs_.nx; ++i) rhs_.v[i] += c * tmp_.v[i];
  }
  u.v = rhs_.v;
  if (prob_.bc == BoundaryKind::Periodic) {
    solve_stencil(ax_.cn_minus, Axis::X, u);
  } else {
    const double bl = prob_.boundary1(prob_.x_lo, t_target);
    const double br = prob_.boundary1(prob_.x_hi, t_target);
    solve_stencil(ax_.cn_minus, Axis::X, u, [bl](int) { return bl; },
                  [br](int) { return br; });
  }
}

void Stepper1D::ssp_rk2_convection_step(GridFunction& u, double t0, double dt) {
  const int n = u.nx;
  const double h = grid_.h;
  const bool dirichlet = prob_.bc == BoundaryKind::Dirichlet;
  const double t1 = t0 + dt;

  sample_flux(u, flux0_);
  apply_stencil(ax_.b, Axis::X, u, ubar_);
  if (has_source_) {
    sample_source(t0, tmp_);
    source_mass_step_ += 0.5 * dt * mass(tmp_);
    apply_stencil(ax_.b, Axis::X, tmp_, bsrc0_);
    sample_source(t1, tmp_);
    source_mass_step_ += 0.5 * dt * mass(tmp_);
    apply_stencil(ax_.b, Axis::X, tmp_, bsrc1_);
  }

  auto solve_b = [&](GridFunction& f) {
    if (!dirichlet) {
      solve_stencil(ax_.b_fact, Axis::X, f);
    } else {
      const double bl = prob_.boundary1(prob_.x_lo, t1);
      const double br = prob_.boundary1(prob_.x_hi, t1);
      solve_stencil(ax_.b_fact, Axis::X, f, [bl](int) { return bl; },
                    [br](int) { return br; });
    }
  };

  auto stage = [&](const GridFunction& fv, double src_weight, GridFunction& out) {
    // out := B^{-1} [ B u - dt Dhat fv + source terms ]
    if (cfg_.limiter) {
      const auto fh = tvb_modified_flux(fv.v, ubar_.v, cfg_.tvb_m, h, prob_.bc);
      const double c = dt / h;
      if (!dirichlet) {
        for (int i = 0; i < n; ++i) {
          const int im = i == 0 ? n - 1 : i - 1;
          out.v[i] = ubar_.v[i] - c * (fh[i] - fh[im]);
        }
      } else {
        out.v[0] = 0.0;
        out.v[n - 1] = 0.0;
        for (int i = 1; i < n - 1; ++i) out.v[i] = ubar_.v[i] - c * (fh[i] - fh[i - 1]);
      }
    } else {
      apply_stencil(ax_.dhat, Axis::X, fv, tmp_);
      for (int i = 0; i < n; ++i) out.v[i] = ubar_.v[i] - dt * tmp_.v[i];
    }
    if (has_source_) {
      if (src_weight == 1.0) {
        for (int i = 0; i < n; ++i) out.v[i] += dt * bsrc0_.v[i];
      } else {
        for (int i = 0; i < n; ++i)
          out.v[i] += 0.5 * dt * (bsrc0_.v[i] + bsrc1_.v[i]);
      }
    }
    solve_b(out);
  };

  stage(flux0_, 1.0, rhs_);  // predictor stage -> u^{n,2} in rhs_
  sample_flux(rhs_, flux1_);
  for (int i = 0; i < n; ++i) flux0_.v[i] = 0.5 * (flux0_.v[i] + flux1_.v[i]);
  stage(flux0_, 0.5, u);  // corrector stage
}

void Stepper1D::substep_convection(GridFunction& u, double t_n, double tau, int k) {
  if (k < 1) throw std::invalid_argument("substep_convection: K must be >= 1");
  const double dt = tau / k;
  for (int s = 0; s < k; ++s) ssp_rk2_convection_step(u, t_n + s * dt, dt);
}

void Stepper1D::hoc_splitting_step(GridFunction& u, const GridFunction* extra, int n) {
  const int k = substeps_for(u);
  last_substeps_ = k;
  cn_diffusion_half_step(u, extra, tg_.t_half(n));
  substep_convection(u, tg_.t(n), tg_.tau, k);
  cn_diffusion_half_step(u, extra, tg_.t(n + 1));
}

void Stepper1D::compute_feedback_fields() {
  const bool keep = !cfg_.zero_multiplier_feedback;
  const Bounds& b = *prob_.bounds;
  const double tau = tg_.tau;
  const bool mc = kind_ == SchemeKind1D::BpmcHocSplitting;
  const double xi = state_.xi;
  for (int i = 0; i < u_.nx; ++i) {
    const double fb = keep ? state_.lambda.v[i] * b.h_prime(u_.v[i]) : 0.0;
    eta_.v[i] = -tau * fb;
    extra_.v[i] = 0.5 * (fb + (mc ? xi : 0.0));
  }
  if (prob_.bc == BoundaryKind::Dirichlet) {
    eta_.v[0] = eta_.v[u_.nx - 1] = 0.0;
    extra_.v[0] = extra_.v[u_.nx - 1] = 0.0;
  }
}

void Stepper1D::advance_splitting(StepDiagnostics& diag) {
  const double mass_before = mass(u_);
  const GridFunction* extra = nullptr;
  bool use_eta = false;

  if (kind_ != SchemeKind1D::HocSplitting) {
    compute_feedback_fields();
    use_eta = !cfg_.zero_multiplier_feedback;
    const bool mc = kind_ == SchemeKind1D::BpmcHocSplitting;
    if (use_eta || mc) extra = &extra_;
  }

  hoc_splitting_step(u_, extra, n_);

  if (kind_ == SchemeKind1D::BpHocSplitting) {
    std::span<const double> eta =
        use_eta ? std::span<const double>(eta_.v) : std::span<const double>();
    const CorrectionStats st =
        bp_correct(u_.v, eta, state_.lambda.v, *prob_.bounds, tg_.tau);
    diag.clipped = st.clipped;
    diag.lambda_max = st.lambda_max;
  } else if (kind_ == SchemeKind1D::BpmcHocSplitting) {
    std::span<const double> eta =
        use_eta ? std::span<const double>(eta_.v) : std::span<const double>();
    const double target = mass_before + source_mass_step_;
    const MassCorrectionResult res =
        bpmc_correct(u_.v, eta, state_.lambda.v, *prob_.bounds, tg_.tau, state_.xi,
                     target, u_.weight(), grid_.length, cfg_.secant);
    state_.xi = res.xi;
    diag.clipped = res.stats.clipped;
    diag.lambda_max = res.stats.lambda_max;
    diag.secant_iters = res.iterations;
  }
}

GridFunction Stepper1D::solve_b_with_derivative_bc(const GridFunction& dhat_f,
                                                   const GridFunction& fsamples) {
  GridFunction w = dhat_f;
  if (prob_.bc == BoundaryKind::Periodic) {
    solve_stencil(ax_.b_fact, Axis::X, w);
    return w;
  }
  // One-sided fourth-order end values close the auxiliary compact solve.
  const int n = w.nx;
  const double h = grid_.h;
  const auto& f = fsamples.v;
  const double wl =
      (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]) / (12.0 * h);
  const double wr = (25.0 * f[n - 1] - 48.0 * f[n - 2] + 36.0 * f[n - 3] -
                     16.0 * f[n - 4] + 3.0 * f[n - 5]) /
                    (12.0 * h);
  solve_stencil(ax_.b_fact, Axis::X, w, [wl](int) { return wl; }, [wr](int) { return wr; });
  return w;
}

void Stepper1D::advance_bdf2(StepDiagnostics& diag) {
  const Bounds& b = *prob_.bounds;
  const double tau = tg_.tau;
  const bool first = n_ == 0;
  const double t_new = tg_.t(n_ + 1);

  // extrapolated transport argument
  if (first) {
    ustar_.v = u_.v;
  } else {
    for (int i = 0; i < u_.nx; ++i) ustar_.v[i] = 2.0 * u_.v[i] - u_prev_.v[i];
  }
  sample_flux(ustar_, flux0_);
  apply_stencil(ax_.dhat, Axis::X, flux0_, tmp_);
  GridFunction w = solve_b_with_derivative_bc(tmp_, flux0_);

  // physical right-hand side, then multiply through by A
  const double inv = first ? 1.0 / tau : 1.0 / (2.0 * tau);
  for (int i = 0; i < u_.nx; ++i) {
    double r = first ? u_.v[i] * inv : (4.0 * u_.v[i] - u_prev_.v[i]) * inv;
    if (has_source_) r += prob_.source1(u_.x(i), t_new);
    r += state_.lambda.v[i] * b.h_prime(u_.v[i]);
    r -= w.v[i];
    tmp_.v[i] = r;
  }
  if (has_source_) {
    sample_source(t_new, rhs_);
    source_mass_step_ += tau * mass(rhs_);
  }
  apply_stencil(ax_.a, Axis::X, tmp_, rhs_);

  // eta for the corrector before u_ is overwritten
  const double corr_tau = first ? tau : 2.0 * tau / 3.0;
  for (int i = 0; i < u_.nx; ++i)
    eta_.v[i] = -corr_tau * state_.lambda.v[i] * b.h_prime(u_.v[i]);

  u_prev_.v = u_.v;
  u_.v = rhs_.v;
  const FactoredTridiagonal& sys = first ? imex1_sys_ : bdf2_sys_;
  if (prob_.bc == BoundaryKind::Periodic) {
    solve_stencil(sys, Axis::X, u_);
  } else {
    const double bl = prob_.boundary1(prob_.x_lo, t_new);
    const double br = prob_.boundary1(prob_.x_hi, t_new);
    solve_stencil(sys, Axis::X, u_, [bl](int) { return bl; }, [br](int) { return br; });
  }

  const CorrectionStats st = bp_correct(u_.v, eta_.v, state_.lambda.v, b, corr_tau);
  diag.clipped = st.clipped;
  diag.lambda_max = st.lambda_max;
}

StepDiagnostics Stepper1D::advance() {
  if (n_ >= tg_.steps) throw std::logic_error("Stepper1D: already at final time");
  const auto start = std::chrono::steady_clock::now();
  StepDiagnostics diag;
  diag.step = n_ + 1;
  diag.time = tg_.t(n_ + 1);
  source_mass_step_ = 0.0;
  const double mass_before = mass(u_);

  if (kind_ == SchemeKind1D::BpBdf2Hoc)
    advance_bdf2(diag);
  else
    advance_splitting(diag);
  ++n_;

  const Norms nm = norms(u_);
  diag.mass = nm.mass;
  diag.umin = nm.min;
  diag.umax = nm.max;
  diag.mass_defect = nm.mass - mass_before - source_mass_step_;
  diag.xi = state_.xi;
  if (cfg_.record_entropy && prob_.entropy) diag.entropy = prob_.entropy(u_);
  diag.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return diag;
}

}  // namespace convsplit
