#include "convsplit/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "convsplit/io.hpp"

#ifndef CONVSPLIT_GIT_REVISION
#define CONVSPLIT_GIT_REVISION "unknown"
#endif

namespace convsplit {

namespace {

const std::set<std::string>& schemes_1d() {
  static const std::set<std::string> s = {"hoc_splitting", "bp_hoc_splitting",
                                          "bpmc_hoc_splitting", "bp_bdf2_hoc"};
  return s;
}

const std::set<std::string>& schemes_2d() {
  static const std::set<std::string> s = {"hoc_adi_splitting", "bp_adi", "bpmc_adi",
                                          "bdf2_imex_hoc"};
  return s;
}

bool default_zero_feedback(const std::string& scheme) {
  // Mass-conserving correctors and the BDF2 baseline keep the multiplier
  // feedback; the pure bound-preserving runs reduce to the cut-off form.
  return scheme == "bp_hoc_splitting" || scheme == "bp_adi";
}

Problem resolve_problem(const ExperimentConfig& cfg) {
  Problem p = make_problem(cfg.problem, cfg.gamma);
  if (cfg.t_end) {
    if (!(*cfg.t_end >= p.t_begin))
      throw ConfigError("t_end must not precede the problem start time");
    p.t_end = *cfg.t_end;
  }
  return p;
}

std::string snapshot_tag(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", t);
  std::string s = buf;
  for (auto& c : s) {
    if (c == '.') c = 'p';
    if (c == '-') c = 'm';
  }
  return s;
}

}  // namespace

bool scheme_is_2d(const std::string& scheme) { return schemes_2d().count(scheme) > 0; }

ExperimentConfig ExperimentConfig::from_config(const ConfigMap& cfg) {
  ExperimentConfig e;
  e.raw = cfg;
  e.problem = cfg.require("run.problem");
  e.scheme = cfg.require("run.scheme");
  e.mode = cfg.get("run.mode", "convergence");
  if (e.mode != "convergence" && e.mode != "timeseries")
    throw ConfigError("run.mode must be convergence or timeseries");
  e.gamma = cfg.maybe_double("run.gamma");
  e.t_end = cfg.maybe_double("run.t_end");
  e.out_dir = cfg.get("run.out", "out");
  e.label = cfg.get("run.label", "");
  e.seed = static_cast<uint64_t>(cfg.get_int("run.seed", 0));
  e.cauchy = cfg.get_bool("run.cauchy", false);

  e.grid_n = cfg.get_int_list("grid.n");
  if (e.grid_n.empty()) throw ConfigError("grid.n must list at least one resolution");

  e.time_rule = cfg.get("time.rule", "tau_c_h2");
  e.tau = cfg.get_double("time.tau", 0.0);
  e.time_c = cfg.get_double("time.c", 1.0);
  e.nt = cfg.get_int("time.nt", 0);
  e.nt_sweep = cfg.get_int_list("time.nt_sweep");
  if (e.time_rule != "fixed_tau" && e.time_rule != "tau_c_h" && e.time_rule != "tau_c_h2" &&
      e.time_rule != "fixed_nt")
    throw ConfigError("unknown time.rule: " + e.time_rule);
  if (e.time_rule == "fixed_tau" && !(e.tau > 0.0))
    throw ConfigError("time.rule fixed_tau needs time.tau > 0");
  if (e.time_rule == "fixed_nt" && e.nt < 1 && e.nt_sweep.empty())
    throw ConfigError("time.rule fixed_nt needs time.nt or time.nt_sweep");

  SchemeConfig& s = e.scheme_cfg;
  s.substeps = cfg.get_int("scheme.substeps", 1);
  s.auto_substeps = cfg.get_bool("scheme.auto_substeps", false);
  s.cfl_c0 = cfg.get_double("scheme.cfl_c0", 1.0 / 3.0);
  s.limiter = cfg.get_bool("scheme.limiter", false);
  s.tvb_m = cfg.get_double("scheme.tvb_m", 10.0);
  s.zero_multiplier_feedback =
      cfg.get_bool("scheme.zero_multiplier", default_zero_feedback(e.scheme));
  s.secant.tol_scale = cfg.get_double("secant.tol_scale", 1e-13);
  s.secant.max_iter = cfg.get_int("secant.max_iter", 50);
  s.secant.xi1 = cfg.get_double("secant.xi1", 0.0);
  if (s.substeps < 1) throw ConfigError("scheme.substeps must be >= 1");
  if (!(s.cfl_c0 > 0.0)) throw ConfigError("scheme.cfl_c0 must be positive");
  if (s.tvb_m < 0.0) throw ConfigError("scheme.tvb_m must be >= 0");

  e.snapshot_times = cfg.get_double_list("output.snapshots");

  const bool want2d = scheme_is_2d(e.scheme);
  if (!want2d && !schemes_1d().count(e.scheme))
    throw ConfigError("unknown scheme: " + e.scheme);
  const Problem probe = make_problem(e.problem, e.gamma);
  if ((probe.dim == 2) != want2d)
    throw ConfigError("scheme " + e.scheme + " does not match the dimension of " + e.problem);
  return e;
}

bool ExperimentConfig::two_dimensional() const { return scheme_is_2d(scheme); }

std::string ExperimentConfig::prefix() const {
  char hash8[17];
  std::snprintf(hash8, sizeof(hash8), "%08llx",
                static_cast<unsigned long long>(raw.hash() & 0xffffffffull));
  std::string base = label.empty() ? problem + "_" + scheme : label;
  return base + "_" + hash8;
}

int steps_for(const ExperimentConfig& cfg, const Problem& p, int cells) {
  const double span = p.t_end - p.t_begin;
  if (span <= 0.0) return 0;
  if (cfg.time_rule == "fixed_nt") return cfg.nt;
  double tau = 0.0;
  if (cfg.time_rule == "fixed_tau") {
    tau = cfg.tau;
  } else {
    const double h = (p.x_hi - p.x_lo) / cells;
    tau = cfg.time_rule == "tau_c_h" ? cfg.time_c * h : cfg.time_c * h * h;
  }
  const int n = static_cast<int>(std::llround(span / tau));
  return std::max(1, n);
}

SingleRun integrate_once(const ExperimentConfig& cfg, int cells, int steps,
                         bool record_diags, const std::vector<double>& snapshot_times) {
  const Problem p = resolve_problem(cfg);
  SchemeConfig scfg = cfg.scheme_cfg;
  scfg.record_entropy = record_diags && bool(p.entropy);

  SingleRun out;
  const auto start = std::chrono::steady_clock::now();

  if (steps <= 0) {
    // zero-step run: the initial data is the answer
    out.field = cfg.two_dimensional() ? p.initial(p.grid2(cells)) : p.initial(p.grid1(cells));
    for (double t : snapshot_times)
      if (t == p.t_begin) out.snapshots.emplace_back(t, out.field);
    out.cpu_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return out;
  }
  const TimeGrid tg = TimeGrid::over(p.t_begin, p.t_end, steps);

  std::vector<double> pending = snapshot_times;
  auto want_snapshot = [&](double t, double tau) -> bool {
    for (size_t k = 0; k < pending.size(); ++k) {
      if (std::abs(pending[k] - t) <= 0.5 * tau) {
        pending.erase(pending.begin() + k);
        return true;
      }
    }
    return false;
  };

  auto run_loop = [&](auto& stepper) {
    if (want_snapshot(tg.t_begin, tg.tau))
      out.snapshots.emplace_back(tg.t_begin, stepper.solution());
    for (int n = 0; n < tg.steps; ++n) {
      const StepDiagnostics d = stepper.advance();
      if (record_diags) out.diagnostics.push_back(d);
      if (!std::isfinite(d.umin) || !std::isfinite(d.umax)) {
        out.diverged = true;
        break;
      }
      if (want_snapshot(d.time, tg.tau)) out.snapshots.emplace_back(d.time, stepper.solution());
    }
    out.field = stepper.solution();
  };

  if (cfg.two_dimensional()) {
    Stepper2D stepper(p, cells, tg, scfg, scheme2d_from_name(cfg.scheme));
    run_loop(stepper);
  } else {
    Stepper1D stepper(p, cells, tg, scfg, scheme1d_from_name(cfg.scheme));
    run_loop(stepper);
  }
  out.cpu_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::pair<double, double> errors_vs_exact(const Problem& p, const GridFunction& u, double t) {
  GridFunction e = u;
  if (p.dim == 1) {
    for (int i = 0; i < u.nx; ++i) e.v[i] = u.v[i] - p.exact1(u.x(i), t);
  } else {
    for (int j = 0; j < u.ny; ++j)
      for (int i = 0; i < u.nx; ++i) e.at(i, j) = u.at(i, j) - p.exact2(u.x(i), u.y(j), t);
  }
  const Norms n = norms(e);
  return {n.linf, n.l2};
}

std::pair<double, double> cauchy_errors(const GridFunction& coarse, const GridFunction& fine) {
  const int rx = fine.nx / coarse.nx;
  if (coarse.nx * rx != fine.nx)
    throw std::invalid_argument("cauchy_errors: grids are not nested");
  GridFunction e = coarse;
  if (coarse.dim == 1) {
    for (int i = 0; i < coarse.nx; ++i) e.v[i] = coarse.v[i] - fine.v[i * rx];
  } else {
    const int ry = fine.ny / coarse.ny;
    if (coarse.ny * ry != fine.ny)
      throw std::invalid_argument("cauchy_errors: grids are not nested");
    for (int j = 0; j < coarse.ny; ++j)
      for (int i = 0; i < coarse.nx; ++i)
        e.at(i, j) = coarse.at(i, j) - fine.at(i * rx, j * ry);
  }
  const Norms n = norms(e);
  return {n.linf, n.l2};
}

ConvergenceResult run_convergence(const ExperimentConfig& cfg) {
  const Problem p = resolve_problem(cfg);
  const bool temporal = !cfg.nt_sweep.empty();
  const bool cauchy = cfg.cauchy || !p.has_exact();

  struct Entry {
    ConvergenceRow row;
    GridFunction field;
    bool diverged = false;
  };
  std::vector<Entry> entries;

  if (temporal) {
    const int cells = cfg.grid_n.front();
    for (const int nt : cfg.nt_sweep) {
      Entry e;
      const SingleRun run = integrate_once(cfg, cells, nt, false, {});
      e.row.cells = cells;
      e.row.steps = nt;
      e.row.h = (p.x_hi - p.x_lo) / cells;
      e.row.tau = (p.t_end - p.t_begin) / nt;
      e.row.cpu_seconds = run.cpu_seconds;
      e.row.diverged = run.diverged;
      e.field = run.field;
      entries.push_back(std::move(e));
    }
  } else {
    for (const int cells : cfg.grid_n) {
      Entry e;
      const int nt = steps_for(cfg, p, cells);
      const SingleRun run = integrate_once(cfg, cells, nt, false, {});
      e.row.cells = cells;
      e.row.steps = nt;
      e.row.h = (p.x_hi - p.x_lo) / cells;
      e.row.tau = (p.t_end - p.t_begin) / nt;
      e.row.cpu_seconds = run.cpu_seconds;
      e.row.diverged = run.diverged;
      e.field = run.field;
      entries.push_back(std::move(e));
    }
  }

  ConvergenceResult result;
  const size_t n_rows = cauchy ? entries.size() - 1 : entries.size();
  for (size_t k = 0; k < n_rows; ++k) {
    ConvergenceRow row = entries[k].row;
    if (entries[k].row.diverged) {
      result.any_diverged = true;
    } else if (cauchy) {
      if (entries[k + 1].row.diverged) {
        row.diverged = true;
        result.any_diverged = true;
      } else {
        const auto [linf, l2] = cauchy_errors(entries[k].field, entries[k + 1].field);
        row.linf_error = linf;
        row.l2_error = l2;
      }
    } else {
      const auto [linf, l2] = errors_vs_exact(p, entries[k].field, p.t_end);
      row.linf_error = linf;
      row.l2_error = l2;
    }
    result.rows.push_back(row);
  }

  for (size_t k = 1; k < result.rows.size(); ++k) {
    const ConvergenceRow& a = result.rows[k - 1];
    ConvergenceRow& b = result.rows[k];
    if (a.diverged || b.diverged) continue;
    const double ratio = temporal ? a.tau / b.tau : a.h / b.h;
    if (ratio > 0.0 && ratio != 1.0) {
      if (a.linf_error > 0.0 && b.linf_error > 0.0)
        b.order_linf = std::log(a.linf_error / b.linf_error) / std::log(ratio);
      if (a.l2_error > 0.0 && b.l2_error > 0.0)
        b.order_l2 = std::log(a.l2_error / b.l2_error) / std::log(ratio);
    }
  }
  return result;
}

TimeseriesResult run_timeseries(const ExperimentConfig& cfg) {
  const Problem p = resolve_problem(cfg);
  const int cells = cfg.grid_n.front();
  const int nt = cfg.nt_sweep.empty() ? steps_for(cfg, p, cells) : cfg.nt_sweep.front();
  const SingleRun run = integrate_once(cfg, cells, nt, true, cfg.snapshot_times);
  TimeseriesResult out;
  out.steps = run.diagnostics;
  out.snapshots = run.snapshots;
  out.final_field = run.field;
  out.cpu_seconds = run.cpu_seconds;
  out.diverged = run.diverged;
  return out;
}

namespace {

void write_manifest(const ExperimentConfig& cfg, double wall_seconds,
                    const std::vector<std::string>& files) {
  nlohmann::json m;
  m["config"] = nlohmann::json::object();
  for (const auto& [k, v] : cfg.raw.entries()) m["config"][k] = v;
  m["config_hash"] = cfg.raw.hash();
  m["git_revision"] = CONVSPLIT_GIT_REVISION;
  m["wall_seconds"] = wall_seconds;
  m["outputs"] = files;
  write_text_file(cfg.out_dir + "/" + cfg.prefix() + "_manifest.json", m.dump(2) + "\n");
}

std::string order_str(double v) {
  return std::isfinite(v) ? format_sci(v, 4) : "";
}

}  // namespace

void emit_convergence(const ExperimentConfig& cfg, const ConvergenceResult& result) {
  const std::string base = cfg.out_dir + "/" + cfg.prefix();
  std::ostringstream table;
  table << "N,Nt,h,tau,linf_error,l2_error,order_linf,order_l2,diverged\n";
  for (const auto& r : result.rows) {
    table << r.cells << ',' << r.steps << ',' << format_sci(r.h) << ',' << format_sci(r.tau)
          << ',' << format_sci(r.linf_error) << ',' << format_sci(r.l2_error) << ','
          << order_str(r.order_linf) << ',' << order_str(r.order_l2) << ','
          << (r.diverged ? 1 : 0) << '\n';
  }
  write_text_file(base + "_table.csv", table.str());

  std::ostringstream timing;
  double total = 0.0;
  timing << "N,Nt,cpu_seconds\n";
  for (const auto& r : result.rows) {
    timing << r.cells << ',' << r.steps << ',' << format_sci(r.cpu_seconds, 6) << '\n';
    total += r.cpu_seconds;
  }
  write_text_file(base + "_timing.csv", timing.str());
  write_manifest(cfg, total, {base + "_table.csv", base + "_timing.csv"});
}

void emit_timeseries(const ExperimentConfig& cfg, const TimeseriesResult& result) {
  const std::string base = cfg.out_dir + "/" + cfg.prefix();
  std::vector<std::string> files;

  std::ostringstream series;
  series << "step,time,mass,mass_defect,umin,umax,clipped,lambda_max,xi,secant_iters,entropy\n";
  for (const auto& d : result.steps) {
    series << d.step << ',' << format_sci(d.time) << ',' << format_sci(d.mass) << ','
           << format_sci(d.mass_defect) << ',' << format_sci(d.umin) << ','
           << format_sci(d.umax) << ',' << d.clipped << ',' << format_sci(d.lambda_max)
           << ',' << format_sci(d.xi) << ',' << d.secant_iters << ','
           << (std::isfinite(d.entropy) ? format_sci(d.entropy) : "") << '\n';
  }
  write_text_file(base + "_series.csv", series.str());
  files.push_back(base + "_series.csv");

  for (const auto& [t, field] : result.snapshots) {
    const std::string stem = base + "_snap_t" + snapshot_tag(t);
    write_field_csv(field, stem + ".csv");
    write_field_binary(field, stem + ".bin");
    files.push_back(stem + ".csv");
    files.push_back(stem + ".bin");
  }
  const std::string final_stem = base + "_final";
  write_field_csv(result.final_field, final_stem + ".csv");
  write_field_binary(result.final_field, final_stem + ".bin");
  files.push_back(final_stem + ".csv");
  files.push_back(final_stem + ".bin");

  write_text_file(base + "_timing.csv",
                  "cpu_seconds\n" + format_sci(result.cpu_seconds, 6) + "\n");
  files.push_back(base + "_timing.csv");
  write_manifest(cfg, result.cpu_seconds, files);
}

}  // namespace convsplit
