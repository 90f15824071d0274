#include "convsplit/schemes2d.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "convsplit/parallel.hpp"

namespace convsplit {

namespace {

void axpy(GridFunction& y, double c, const GridFunction& x) {
  const int n = y.size();
  par::for_range(0, y.ny, [&](int j) {
    double* yr = y.row(j);
    const double* xr = x.row(j);
    for (int i = 0; i < y.nx; ++i) yr[i] += c * xr[i];
  });
  (void)n;
}

double dot_serial(const GridFunction& a, const GridFunction& b) {
  double s = 0.0;
  const size_t n = a.v.size();
  for (size_t k = 0; k < n; ++k) s += a.v[k] * b.v[k];
  return s;
}

void check_finite_field(const GridFunction& f, const char* what) {
  double s = 0.0;
  for (double x : f.v) s += x;
  if (!std::isfinite(s)) {
    for (int k = 0; k < f.size(); ++k) {
      if (!std::isfinite(f.v[k]))
        throw std::runtime_error(std::string(what) + " produced a non-finite value at node " +
                                 std::to_string(k));
    }
  }
}

}  // namespace

SchemeKind2D scheme2d_from_name(const std::string& name) {
  if (name == "hoc_adi_splitting") return SchemeKind2D::HocAdiSplitting;
  if (name == "bp_adi") return SchemeKind2D::BpAdi;
  if (name == "bpmc_adi") return SchemeKind2D::BpmcAdi;
  if (name == "bdf2_imex_hoc") return SchemeKind2D::Bdf2ImexHoc;
  throw std::invalid_argument("unknown 2D scheme: " + name);
}

Stepper2D::Stepper2D(const Problem& p, int cells, const TimeGrid& tg,
                     const SchemeConfig& cfg, SchemeKind2D kind)
    : prob_(p), grid_(p.grid2(cells)), tg_(tg), cfg_(cfg), kind_(kind) {
  if (p.dim != 2) throw std::invalid_argument("Stepper2D: problem is not two-dimensional");
  if ((kind_ == SchemeKind2D::BpAdi || kind_ == SchemeKind2D::BpmcAdi) && !prob_.bounds)
    throw std::invalid_argument("Stepper2D: scheme needs a bounds specification");
  if (prob_.bounds) prob_.bounds->validate();
  if (prob_.bc == BoundaryKind::Dirichlet && !prob_.boundary2)
    throw std::invalid_argument("Stepper2D: Dirichlet problem without boundary provider");
  if (kind_ == SchemeKind2D::Bdf2ImexHoc && prob_.bc != BoundaryKind::Periodic)
    throw std::invalid_argument("bdf2_imex_hoc: periodic boundaries only");

  ax_ = AxisOps::build(grid_.x, prob_.bc);
  ay_ = AxisOps::build(grid_.y, prob_.bc);
  ax_.set_cn(prob_.gamma_x, tg_.tau);
  ay_.set_cn(prob_.gamma_y, tg_.tau);

  u_ = prob_.initial(grid_);
  state_.lambda = GridFunction::zeros(grid_, prob_.bc);
  has_source_ = prob_.has_source();

  rhs_ = t1_ = t2_ = t3_ = bv_ = ff0_ = fg0_ = ff1_ = fg1_ = src_ = bs0_ = bs1_ =
      slope_x_ = slope_y_ = eta_ = extra_ = state_.lambda;
  if (kind_ == SchemeKind2D::Bdf2ImexHoc) {
    u_prev_ = u_;
    cg_r_ = cg_p_ = cg_ap_ = cg_b_ = state_.lambda;
  }
}

void Stepper2D::sample_fluxes(const GridFunction& u, GridFunction& f, GridFunction& g) const {
  const auto& ff = prob_.flux2_f;
  const auto& fg = prob_.flux2_g;
  par::for_range(0, u.ny, [&](int j) {
    const double y = u.y(j);
    const double* ur = u.row(j);
    double* fr = f.row(j);
    double* gr = g.row(j);
    for (int i = 0; i < u.nx; ++i) {
      const double x = u.x(i);
      fr[i] = ff(x, y, ur[i]);
      gr[i] = fg(x, y, ur[i]);
    }
  });
  check_finite_field(f, "flux f");
  check_finite_field(g, "flux g");
}

void Stepper2D::sample_source(double t, GridFunction& out) const {
  const auto& s = prob_.source2;
  par::for_range(0, out.ny, [&](int j) {
    const double y = out.y(j);
    double* r = out.row(j);
    for (int i = 0; i < out.nx; ++i) r[i] = s(out.x(i), y, t);
  });
}

int Stepper2D::substeps_for(const GridFunction& u) const {
  if (!cfg_.auto_substeps) return cfg_.substeps;
  double mfx = 0.0, mgy = 0.0;
  for (int j = 0; j < u.ny; ++j) {
    const double y = u.y(j);
    for (int i = 0; i < u.nx; ++i) {
      const double x = u.x(i);
      mfx = std::max(mfx, std::abs(prob_.dflux2_f(x, y, u.at(i, j))));
      mgy = std::max(mgy, std::abs(prob_.dflux2_g(x, y, u.at(i, j))));
    }
  }
  const double ratio = tg_.tau * (mfx / grid_.x.h + mgy / grid_.y.h) / cfg_.cfl_c0;
  return std::max(1, static_cast<int>(std::ceil(ratio)));
}

void Stepper2D::fill_dirichlet_boundary(GridFunction& f, double t) const {
  const auto& b = prob_.boundary2;
  for (int i = 0; i < f.nx; ++i) {
    f.at(i, 0) = b(f.x(i), prob_.y_lo, t);
    f.at(i, f.ny - 1) = b(f.x(i), prob_.y_hi, t);
  }
  for (int j = 0; j < f.ny; ++j) {
    f.at(0, j) = b(prob_.x_lo, f.y(j), t);
    f.at(f.nx - 1, j) = b(prob_.x_hi, f.y(j), t);
  }
}

void Stepper2D::solve_x_then_y(GridFunction& f, const FactoredTridiagonal& fx,
                               const FactoredTridiagonal& fy, double t_target) {
  if (prob_.bc == BoundaryKind::Periodic) {
    solve_stencil(fx, Axis::X, f);
    solve_stencil(fy, Axis::Y, f);
    return;
  }
  // Intermediate x-sweep boundary values carry the y-operator applied to the
  // prescribed boundary columns; the y-sweep then pins the solution itself.
  const auto& b = prob_.boundary2;
  const TridiagonalStencil sy = fy.stencil();
  const double hy = grid_.y.h;
  auto hat_edge = [&](double xe, int j) {
    const double yj = prob_.y_lo + j * hy;
    return sy.sub * b(xe, yj - hy, t_target) + sy.diag * b(xe, yj, t_target) +
           sy.sup * b(xe, yj + hy, t_target);
  };
  solve_stencil(fx, Axis::X, f, [&](int j) { return hat_edge(prob_.x_lo, j); },
                [&](int j) { return hat_edge(prob_.x_hi, j); });
  solve_stencil(fy, Axis::Y, f, [&](int i) { return b(f.x(i), prob_.y_lo, t_target); },
                [&](int i) { return b(f.x(i), prob_.y_hi, t_target); });
  fill_dirichlet_boundary(f, t_target);
}

void Stepper2D::adi_diffusion_half_step(GridFunction& u, const GridFunction* extra,
                                        double t_target) {
  apply_stencil(ay_.cn_plus, Axis::Y, u, t1_);
  apply_stencil(ax_.cn_plus, Axis::X, t1_, rhs_);
  if (extra) {
    apply_stencil(ay_.a, Axis::Y, *extra, t1_);
    apply_stencil(ax_.a, Axis::X, t1_, t2_);
    axpy(rhs_, 0.5 * tg_.tau, t2_);
  }
  u.v.swap(rhs_.v);
  solve_x_then_y(u, ax_.cn_minus, ay_.cn_minus, t_target);
}

void Stepper2D::limited_flux_divergence_x(const GridFunction& fv, const GridFunction& slope,
                                          GridFunction& out) const {
  const int nx = fv.nx;
  const double hx = grid_.x.h;
  const bool periodic = prob_.bc == BoundaryKind::Periodic;
  par::for_range(0, fv.ny, [&](int j) {
    double* o = out.row(j);
    if (!periodic && (j == 0 || j == fv.ny - 1)) {
      for (int i = 0; i < nx; ++i) o[i] = 0.0;
      return;
    }
    const auto fh = tvb_modified_flux(std::span(fv.row(j), nx), std::span(slope.row(j), nx),
                                      cfg_.tvb_m, hx, prob_.bc);
    if (periodic) {
      for (int i = 0; i < nx; ++i) o[i] = (fh[i] - fh[i == 0 ? nx - 1 : i - 1]) / hx;
    } else {
      o[0] = 0.0;
      o[nx - 1] = 0.0;
      for (int i = 1; i < nx - 1; ++i) o[i] = (fh[i] - fh[i - 1]) / hx;
    }
  });
}

void Stepper2D::limited_flux_divergence_y(const GridFunction& gv, const GridFunction& slope,
                                          GridFunction& out) const {
  const int nx = gv.nx;
  const int ny = gv.ny;
  const double hy = grid_.y.h;
  const bool periodic = prob_.bc == BoundaryKind::Periodic;
  par::for_range(0, nx, [&](int i) {
    if (!periodic && (i == 0 || i == nx - 1)) {
      for (int j = 0; j < ny; ++j) out.at(i, j) = 0.0;
      return;
    }
    std::vector<double> fcol(ny), scol(ny);
    for (int j = 0; j < ny; ++j) {
      fcol[j] = gv.at(i, j);
      scol[j] = slope.at(i, j);
    }
    const auto fh = tvb_modified_flux(fcol, scol, cfg_.tvb_m, hy, prob_.bc);
    if (periodic) {
      for (int j = 0; j < ny; ++j) out.at(i, j) = (fh[j] - fh[j == 0 ? ny - 1 : j - 1]) / hy;
    } else {
      out.at(i, 0) = 0.0;
      out.at(i, ny - 1) = 0.0;
      for (int j = 1; j < ny - 1; ++j) out.at(i, j) = (fh[j] - fh[j - 1]) / hy;
    }
  });
}

void Stepper2D::ssp_stage_pair(GridFunction& u, double t0, double dt) {
  const double t1 = t0 + dt;
  sample_fluxes(u, ff0_, fg0_);
  apply_stencil(ay_.b, Axis::Y, u, t1_);
  apply_stencil(ax_.b, Axis::X, t1_, bv_);
  if (cfg_.limiter) {
    apply_stencil(ax_.b, Axis::X, u, slope_x_);
    apply_stencil(ay_.b, Axis::Y, u, slope_y_);
  }
  if (has_source_) {
    sample_source(t0, src_);
    source_mass_step_ += 0.5 * dt * mass(src_);
    apply_stencil(ay_.b, Axis::Y, src_, t1_);
    apply_stencil(ax_.b, Axis::X, t1_, bs0_);
    sample_source(t1, src_);
    source_mass_step_ += 0.5 * dt * mass(src_);
    apply_stencil(ay_.b, Axis::Y, src_, t1_);
    apply_stencil(ax_.b, Axis::X, t1_, bs1_);
  }

  auto transport_terms = [&](const GridFunction& f, const GridFunction& g,
                             GridFunction& q) {
    // q -= dt (By Dx f + Bx Dy g)
    if (cfg_.limiter) {
      limited_flux_divergence_x(f, slope_x_, t1_);
    } else {
      apply_stencil(ax_.dhat, Axis::X, f, t1_);
    }
    apply_stencil(ay_.b, Axis::Y, t1_, t2_);
    axpy(q, -dt, t2_);
    if (cfg_.limiter) {
      limited_flux_divergence_y(g, slope_y_, t1_);
    } else {
      apply_stencil(ay_.dhat, Axis::Y, g, t1_);
    }
    apply_stencil(ax_.b, Axis::X, t1_, t2_);
    axpy(q, -dt, t2_);
  };

  // predictor stage
  rhs_.v = bv_.v;
  transport_terms(ff0_, fg0_, rhs_);
  if (has_source_) axpy(rhs_, dt, bs0_);
  solve_x_then_y(rhs_, ax_.b_fact, ay_.b_fact, t1);

  // corrector stage with averaged fluxes
  sample_fluxes(rhs_, ff1_, fg1_);
  par::for_range(0, u.ny, [&](int j) {
    double* f0 = ff0_.row(j);
    double* g0 = fg0_.row(j);
    const double* f1 = ff1_.row(j);
    const double* g1 = fg1_.row(j);
    for (int i = 0; i < u.nx; ++i) {
      f0[i] = 0.5 * (f0[i] + f1[i]);
      g0[i] = 0.5 * (g0[i] + g1[i]);
    }
  });
  u.v = bv_.v;
  transport_terms(ff0_, fg0_, u);
  if (has_source_) {
    axpy(u, 0.5 * dt, bs0_);
    axpy(u, 0.5 * dt, bs1_);
  }
  solve_x_then_y(u, ax_.b_fact, ay_.b_fact, t1);
}

void Stepper2D::convection_step_2d(GridFunction& u, double t_n, double tau, int k) {
  if (k < 1) throw std::invalid_argument("convection_step_2d: K must be >= 1");
  const double dt = tau / k;
  for (int s = 0; s < k; ++s) ssp_stage_pair(u, t_n + s * dt, dt);
}

void Stepper2D::hoc_adi_splitting_step(GridFunction& u, const GridFunction* extra, int n) {
  const int k = substeps_for(u);
  adi_diffusion_half_step(u, extra, tg_.t_half(n));
  convection_step_2d(u, tg_.t(n), tg_.tau, k);
  adi_diffusion_half_step(u, extra, tg_.t(n + 1));
}

void Stepper2D::compute_feedback_fields() {
  const bool keep = !cfg_.zero_multiplier_feedback;
  const Bounds& b = *prob_.bounds;
  const double tau = tg_.tau;
  const bool mc = kind_ == SchemeKind2D::BpmcAdi;
  const double xi = state_.xi;
  for (int k = 0; k < u_.size(); ++k) {
    const double fb = keep ? state_.lambda.v[k] * b.h_prime(u_.v[k]) : 0.0;
    eta_.v[k] = -tau * fb;
    extra_.v[k] = fb + (mc ? xi : 0.0);
  }
  if (prob_.bc == BoundaryKind::Dirichlet) {
    for (int i = 0; i < u_.nx; ++i) {
      eta_.at(i, 0) = eta_.at(i, u_.ny - 1) = 0.0;
      extra_.at(i, 0) = extra_.at(i, u_.ny - 1) = 0.0;
    }
    for (int j = 0; j < u_.ny; ++j) {
      eta_.at(0, j) = eta_.at(u_.nx - 1, j) = 0.0;
      extra_.at(0, j) = extra_.at(u_.nx - 1, j) = 0.0;
    }
  }
}

void Stepper2D::advance_adi(StepDiagnostics& diag) {
  const double mass_before = mass(u_);
  const GridFunction* extra = nullptr;
  bool use_eta = false;

  if (kind_ != SchemeKind2D::HocAdiSplitting) {
    compute_feedback_fields();
    use_eta = !cfg_.zero_multiplier_feedback;
    if (use_eta || kind_ == SchemeKind2D::BpmcAdi) extra = &extra_;
  }

  hoc_adi_splitting_step(u_, extra, n_);

  if (kind_ == SchemeKind2D::BpAdi) {
    std::span<const double> eta =
        use_eta ? std::span<const double>(eta_.v) : std::span<const double>();
    const CorrectionStats st =
        bp_correct(u_.v, eta, state_.lambda.v, *prob_.bounds, tg_.tau);
    diag.clipped = st.clipped;
    diag.lambda_max = st.lambda_max;
  } else if (kind_ == SchemeKind2D::BpmcAdi) {
    std::span<const double> eta =
        use_eta ? std::span<const double>(eta_.v) : std::span<const double>();
    const double target = mass_before + source_mass_step_;
    const double measure = grid_.x.length * grid_.y.length;
    const MassCorrectionResult res =
        bpmc_correct(u_.v, eta, state_.lambda.v, *prob_.bounds, tg_.tau, state_.xi,
                     target, u_.weight(), measure, cfg_.secant);
    state_.xi = res.xi;
    diag.clipped = res.stats.clipped;
    diag.lambda_max = res.stats.lambda_max;
    diag.secant_iters = res.iterations;
  }
}

void Stepper2D::bdf2_operator(double c0, const GridFunction& x, GridFunction& out) {
  apply_stencil(ay_.a, Axis::Y, x, t1_);
  apply_stencil(ax_.a, Axis::X, t1_, out);
  par::for_range(0, out.ny, [&](int j) {
    double* o = out.row(j);
    for (int i = 0; i < out.nx; ++i) o[i] *= c0;
  });
  apply_stencil(ax_.delta2, Axis::X, x, t1_);
  apply_stencil(ay_.a, Axis::Y, t1_, t2_);
  axpy(out, -prob_.gamma_x, t2_);
  apply_stencil(ay_.delta2, Axis::Y, x, t1_);
  apply_stencil(ax_.a, Axis::X, t1_, t2_);
  axpy(out, -prob_.gamma_y, t2_);
}

int Stepper2D::cg_solve(double c0, const GridFunction& b, GridFunction& x) {
  // Diagonally preconditioned CG; the diagonal is constant so the
  // preconditioner is a scalar scaling.
  const double dinv =
      1.0 / (c0 * (10.0 / 12.0) * (10.0 / 12.0) +
             prob_.gamma_x * (10.0 / 12.0) * 2.0 / (grid_.x.h * grid_.x.h) +
             prob_.gamma_y * (10.0 / 12.0) * 2.0 / (grid_.y.h * grid_.y.h));
  const double bnorm = std::sqrt(dot_serial(b, b));
  const double tol = 1e-12 * (bnorm > 0.0 ? bnorm : 1.0);

  bdf2_operator(c0, x, cg_ap_);
  for (int k = 0; k < b.size(); ++k) cg_r_.v[k] = b.v[k] - cg_ap_.v[k];
  double rz = dinv * dot_serial(cg_r_, cg_r_);
  for (int k = 0; k < b.size(); ++k) cg_p_.v[k] = dinv * cg_r_.v[k];

  const int max_iter = 10000;
  for (int it = 0; it < max_iter; ++it) {
    const double rnorm = std::sqrt(dot_serial(cg_r_, cg_r_));
    if (rnorm <= tol) return it;
    bdf2_operator(c0, cg_p_, cg_ap_);
    const double alpha = rz / dot_serial(cg_p_, cg_ap_);
    for (int k = 0; k < b.size(); ++k) {
      x.v[k] += alpha * cg_p_.v[k];
      cg_r_.v[k] -= alpha * cg_ap_.v[k];
    }
    const double rz_new = dinv * dot_serial(cg_r_, cg_r_);
    const double beta = rz_new / rz;
    rz = rz_new;
    for (int k = 0; k < b.size(); ++k) cg_p_.v[k] = dinv * cg_r_.v[k] + beta * cg_p_.v[k];
  }
  throw std::runtime_error("bdf2_imex_hoc: CG failed to converge, residual " +
                           std::to_string(std::sqrt(dot_serial(cg_r_, cg_r_))) +
                           " vs tolerance " + std::to_string(tol));
}

void Stepper2D::advance_bdf2(StepDiagnostics& diag) {
  const double tau = tg_.tau;
  const bool first = n_ == 0;
  const double t_new = tg_.t(n_ + 1);
  const double c0 = first ? 1.0 / tau : 1.5 / tau;

  // extrapolated transport argument
  if (first) {
    t3_.v = u_.v;
  } else {
    for (int k = 0; k < u_.size(); ++k) t3_.v[k] = 2.0 * u_.v[k] - u_prev_.v[k];
  }
  sample_fluxes(t3_, ff0_, fg0_);
  apply_stencil(ax_.dhat, Axis::X, ff0_, t1_);
  solve_stencil(ax_.b_fact, Axis::X, t1_);
  apply_stencil(ay_.dhat, Axis::Y, fg0_, t2_);
  solve_stencil(ay_.b_fact, Axis::Y, t2_);

  const double inv = first ? 1.0 / tau : 1.0 / (2.0 * tau);
  if (has_source_) sample_source(t_new, src_);
  par::for_range(0, u_.ny, [&](int j) {
    double* r = rhs_.row(j);
    const double* un = u_.row(j);
    const double* um = first ? nullptr : u_prev_.row(j);
    const double* w1 = t1_.row(j);
    const double* w2 = t2_.row(j);
    const double* s = has_source_ ? src_.row(j) : nullptr;
    for (int i = 0; i < u_.nx; ++i) {
      double v = first ? un[i] * inv : (4.0 * un[i] - um[i]) * inv;
      if (s) v += s[i];
      r[i] = v - w1[i] - w2[i];
    }
  });
  if (has_source_) source_mass_step_ += tau * mass(src_);
  apply_stencil(ay_.a, Axis::Y, rhs_, t1_);
  apply_stencil(ax_.a, Axis::X, t1_, cg_b_);

  u_prev_.v = u_.v;
  last_cg_iters_ = cg_solve(c0, cg_b_, u_);
  diag.secant_iters = last_cg_iters_;
}

StepDiagnostics Stepper2D::advance() {
  if (n_ >= tg_.steps) throw std::logic_error("Stepper2D: already at final time");
  const auto start = std::chrono::steady_clock::now();
  StepDiagnostics diag;
  diag.step = n_ + 1;
  diag.time = tg_.t(n_ + 1);
  source_mass_step_ = 0.0;
  const double mass_before = mass(u_);

  if (kind_ == SchemeKind2D::Bdf2ImexHoc)
    advance_bdf2(diag);
  else
    advance_adi(diag);
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
