#include "convsplit/problem.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace convsplit {

namespace {
constexpr double kPi = std::numbers::pi;

// Fixed fine sampling used to pin per-problem bounds from the initial data.
double sampled_max(const std::function<double(double)>& f, double a, double b, int n) {
  double m = -std::numeric_limits<double>::infinity();
  const double h = (b - a) / n;
  for (int i = 0; i <= n; ++i) m = std::max(m, f(a + i * h));
  return m;
}
}  // namespace

void Bounds::validate() const {
  if (kind == Kind::Quadratic && !(lower < upper))
    throw std::invalid_argument("Bounds: need lower < upper");
}

GridFunction Problem::initial(const Grid1D& g) const {
  if (dim != 1) throw std::invalid_argument("initial: 1D grid on a 2D problem");
  return GridFunction::sample(g, bc, init1);
}

GridFunction Problem::initial(const Grid2D& g) const {
  if (dim != 2) throw std::invalid_argument("initial: 2D grid on a 1D problem");
  return GridFunction::sample(g, bc, init2);
}

GridFunction Problem::exact_at(const Grid1D& g, double t) const {
  if (!exact1) throw std::logic_error("problem has no exact solution");
  return GridFunction::sample(g, bc, [&](double x) { return exact1(x, t); });
}

GridFunction Problem::exact_at(const Grid2D& g, double t) const {
  if (!exact2) throw std::logic_error("problem has no exact solution");
  return GridFunction::sample(g, bc, [&](double x, double y) { return exact2(x, y, t); });
}

Problem burgers1d_case1(double gamma) {
  Problem p;
  p.name = "burgers1d_case1";
  p.dim = 1;
  p.x_lo = 0.0;
  p.x_hi = 3.0;
  p.t_begin = 1.0;
  p.t_end = 4.0;
  p.gamma_x = gamma;
  p.bc = BoundaryKind::Dirichlet;
  p.flux1 = [](double, double u) { return 0.5 * u * u; };
  p.dflux1 = [](double, double u) { return u; };
  p.exact1 = [gamma](double x, double t) {
    return (x / t) / (1.0 + std::sqrt(t) * std::exp((x * x - 0.25 * t) / (4.0 * gamma * t)));
  };
  p.boundary1 = p.exact1;
  p.init1 = [e = p.exact1](double x) { return e(x, 1.0); };
  Bounds b;
  b.kind = Bounds::Kind::Quadratic;
  b.lower = 0.0;
  b.upper = sampled_max(p.init1, 0.0, 3.0, 300000);
  p.bounds = b;
  return p;
}

Problem burgers1d_case2(double gamma) {
  Problem p;
  p.name = "burgers1d_case2";
  p.dim = 1;
  p.x_lo = -1.0;
  p.x_hi = 3.0;
  p.t_begin = 0.0;
  p.t_end = 1.0;
  p.gamma_x = gamma;
  p.bc = BoundaryKind::Dirichlet;
  p.flux1 = [](double, double u) { return 0.5 * u * u; };
  p.dflux1 = [](double, double u) { return u; };
  p.exact1 = [gamma](double x, double t) {
    return 1.5 - 0.5 * std::tanh(0.5 * (x - 1.5 * t) / (2.0 * gamma));
  };
  p.boundary1 = p.exact1;
  p.init1 = [e = p.exact1](double x) { return e(x, 0.0); };
  p.bounds = Bounds{Bounds::Kind::Quadratic, 1.0, 2.0};
  return p;
}

Problem fokker_planck() {
  Problem p;
  p.name = "fokker_planck";
  p.dim = 1;
  p.x_lo = -2.0 * kPi;
  p.x_hi = 2.0 * kPi;
  p.t_begin = 0.0;
  p.t_end = 2.0;
  p.gamma_x = 1.0;
  p.bc = BoundaryKind::Periodic;
  p.flux1 = [](double x, double u) { return -x * u * (1.0 - u); };
  p.dflux1 = [](double x, double u) { return -x * (1.0 - 2.0 * u); };
  p.init1 = [](double x) { return std::exp(-x * x / 0.4); };
  p.bounds = Bounds{Bounds::Kind::Quadratic, 0.0, 1.0};
  p.entropy = [](const GridFunction& u) {
    constexpr double eps = 1e-14;
    double s = 0.0;
    for (int i = 0; i < u.nx; ++i) {
      const double x = u.x(i);
      const double w = std::min(std::max(u.at(i), eps), 1.0 - eps);
      s += 0.5 * x * x * u.at(i) + w * std::log(w) + (1.0 - w) * std::log(1.0 - w);
    }
    return u.hx * s;
  };
  return p;
}

Problem burgers2d(double gamma) {
  Problem p;
  p.name = "burgers2d";
  p.dim = 2;
  p.x_lo = p.y_lo = -1.0;
  p.x_hi = p.y_hi = 2.0;
  p.t_begin = 0.0;
  p.t_end = 0.6;
  p.gamma_x = p.gamma_y = gamma;
  p.bc = BoundaryKind::Periodic;
  p.flux2_f = [](double, double, double u) { return 0.5 * u * u; };
  p.flux2_g = [](double, double, double u) { return 0.5 * u * u; };
  p.dflux2_f = [](double, double, double u) { return u; };
  p.dflux2_g = [](double, double, double u) { return u; };
  constexpr double sigma2 = 0.07 * 0.07;
  constexpr double x0 = 0.5, y0 = 0.5;
  p.exact2 = [gamma](double x, double y, double t) {
    const double a = sigma2 + 2.0 * gamma * t;
    const double dx = x - t - x0;
    const double dy = y - t - y0;
    return sigma2 / a * std::exp(-(dx * dx + dy * dy) / (2.0 * a));
  };
  // Manufactured source: with this u, u_t + u u_x + u u_y - gamma lap(u)
  // collapses to u (1 - u) (dx + dy) / a.
  p.source2 = [gamma, e = p.exact2](double x, double y, double t) {
    const double a = sigma2 + 2.0 * gamma * t;
    const double u = e(x, y, t);
    return u * (1.0 - u) * ((x - t - x0) + (y - t - y0)) / a;
  };
  p.init2 = [e = p.exact2](double x, double y) { return e(x, y, 0.0); };
  p.bounds = Bounds{Bounds::Kind::Quadratic, 0.0, 1.0};
  return p;
}

Problem buckley_leverett(double gamma) {
  Problem p;
  p.name = "buckley_leverett";
  p.dim = 2;
  p.x_lo = p.y_lo = -2.0;
  p.x_hi = p.y_hi = 5.0;
  p.t_begin = 0.0;
  p.t_end = 1.0;
  p.gamma_x = p.gamma_y = gamma;
  p.bc = BoundaryKind::Dirichlet;
  p.flux2_f = [](double, double, double u) {
    const double w = u - 0.25;
    return u + w * w * w;
  };
  p.dflux2_f = [](double, double, double u) {
    const double w = u - 0.25;
    return 1.0 + 3.0 * w * w;
  };
  p.flux2_g = [](double, double, double u) { return -(u + u * u); };
  p.dflux2_g = [](double, double, double u) { return -(1.0 + 2.0 * u); };
  // Discontinuous initial disc, sampled pointwise.
  p.init2 = [](double x, double y) {
    const double dx = x - 0.25;
    const double dy = y - 2.25;
    return (dx * dx + dy * dy < 0.5) ? 1.0 : 0.0;
  };
  p.boundary2 = [](double, double, double) { return 0.0; };
  p.bounds = Bounds{Bounds::Kind::Quadratic, 0.0, 1.0};
  return p;
}

Problem vortex_hump(double gamma) {
  Problem p;
  p.name = "vortex_hump";
  p.dim = 2;
  p.x_lo = p.y_lo = 0.0;
  p.x_hi = p.y_hi = 1.0;
  p.t_begin = 0.0;
  p.t_end = 2.0;
  p.gamma_x = p.gamma_y = gamma;
  p.bc = BoundaryKind::Periodic;
  const double amp = kPi / std::sqrt(2.0);
  auto c1 = [amp](double x, double y) { return amp * std::sin(kPi * x) * std::cos(kPi * y); };
  auto c2 = [amp](double x, double y) { return -amp * std::cos(kPi * x) * std::sin(kPi * y); };
  p.flux2_f = [c1](double x, double y, double u) { return c1(x, y) * u; };
  p.flux2_g = [c2](double x, double y, double u) { return c2(x, y) * u; };
  p.dflux2_f = [c1](double x, double y, double) { return c1(x, y); };
  p.dflux2_g = [c2](double x, double y, double) { return c2(x, y); };
  constexpr double sigma2 = 1.6e-3;
  constexpr double x0 = 0.25, y0 = 0.5;
  p.init2 = [](double x, double y) {
    const double dx = x - x0;
    const double dy = y - y0;
    return std::exp(-(dx * dx + dy * dy) / (2.0 * sigma2));
  };
  p.bounds = Bounds{Bounds::Kind::Quadratic, 0.0, 1.0};
  return p;
}

std::vector<std::string> problem_names() {
  return {"burgers1d_case1", "burgers1d_case2", "fokker_planck",
          "burgers2d",       "buckley_leverett", "vortex_hump"};
}

Problem make_problem(const std::string& name, std::optional<double> gamma) {
  if (name == "burgers1d_case1") return gamma ? burgers1d_case1(*gamma) : burgers1d_case1();
  if (name == "burgers1d_case2") return gamma ? burgers1d_case2(*gamma) : burgers1d_case2();
  if (name == "fokker_planck") {
    if (gamma && *gamma != 1.0)
      throw std::invalid_argument("fokker_planck: diffusivity is fixed at 1");
    return fokker_planck();
  }
  if (name == "burgers2d") return gamma ? burgers2d(*gamma) : burgers2d();
  if (name == "buckley_leverett") return gamma ? buckley_leverett(*gamma) : buckley_leverett();
  if (name == "vortex_hump") return gamma ? vortex_hump(*gamma) : vortex_hump();
  throw std::invalid_argument("unknown problem: " + name);
}

}  // namespace convsplit
