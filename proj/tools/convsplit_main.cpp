#include <cstdio>
#include <exception>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "convsplit/harness.hpp"
#include "convsplit/parallel.hpp"

namespace {

using convsplit::ConfigMap;
using convsplit::ExperimentConfig;

constexpr int kExitOk = 0;
constexpr int kExitConfigError = 1;
constexpr int kExitDiverged = 2;

int execute(ExperimentConfig cfg, const std::string& out_override) {
  if (!out_override.empty()) {
    cfg.out_dir = out_override;
    cfg.raw.set("run.out", out_override);
  }
  if (cfg.mode == "timeseries") {
    const auto result = convsplit::run_timeseries(cfg);
    convsplit::emit_timeseries(cfg, result);
    std::cout << cfg.prefix() << ": " << result.steps.size() << " steps, "
              << result.snapshots.size() << " snapshots -> " << cfg.out_dir << "\n";
    return result.diverged ? kExitDiverged : kExitOk;
  }
  const auto result = convsplit::run_convergence(cfg);
  convsplit::emit_convergence(cfg, result);
  std::cout << cfg.prefix() << ":\n";
  std::printf("  %8s %10s %14s %8s %14s %8s\n", "N", "Nt", "Linf", "order", "L2", "order");
  for (const auto& r : result.rows) {
    std::printf("  %8d %10d %14.4e %8.2f %14.4e %8.2f%s\n", r.cells, r.steps, r.linf_error,
                r.order_linf, r.l2_error, r.order_l2, r.diverged ? "  DIVERGED" : "");
  }
  return result.any_diverged ? kExitDiverged : kExitOk;
}

int run_config_text(const std::string& text, const std::vector<std::string>& overrides,
                    const std::string& out_override) {
  ConfigMap cfg = ConfigMap::parse_string(text);
  for (const auto& kv : overrides) cfg.apply_override(kv);
  return execute(ExperimentConfig::from_config(cfg), out_override);
}

std::string int_list(const std::vector<int>& xs) {
  std::string s;
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(xs[i]);
  }
  return s;
}

std::vector<int> clamp_sweep(std::vector<int> ns, int max_n) {
  if (max_n > 0) {
    std::vector<int> kept;
    for (int n : ns)
      if (n <= max_n) kept.push_back(n);
    if (!kept.empty()) return kept;
  }
  return ns;
}

struct ReproduceRun {
  std::string label;
  std::string text;
};

std::vector<ReproduceRun> reproduce_runs(const std::string& target, int max_n) {
  std::vector<ReproduceRun> runs;
  auto add = [&](const std::string& label, const std::string& body) {
    runs.push_back({label, "[run]\nlabel = " + label + "\n" + body});
  };

  if (target == "table1") {
    const std::string grid = "[grid]\nn = " + int_list(clamp_sweep({180, 360, 540, 720}, max_n)) + "\n";
    add("table1_k1",
        "problem = burgers1d_case1\nscheme = hoc_splitting\nmode = convergence\n" + grid +
            "[time]\nrule = fixed_tau\ntau = 1e-5\n[scheme]\nsubsteps = 1\n");
    add("table1_k10",
        "problem = burgers1d_case1\nscheme = hoc_splitting\nmode = convergence\n" + grid +
            "[time]\nrule = fixed_tau\ntau = 1e-4\n[scheme]\nsubsteps = 10\n");
  } else if (target == "table2") {
    const std::string grid = "[grid]\nn = " + int_list(clamp_sweep({90, 180, 270, 360}, max_n)) + "\n";
    const std::string time = "[time]\nrule = tau_c_h2\nc = 1\n";
    add("table2_hoc", "problem = burgers1d_case1\nscheme = hoc_splitting\nmode = convergence\n" +
                          grid + time);
    add("table2_bp", "problem = burgers1d_case1\nscheme = bp_hoc_splitting\nmode = convergence\n" +
                         grid + time);
  } else if (target == "table4") {
    add("table4",
        "problem = fokker_planck\nscheme = bpmc_hoc_splitting\nmode = convergence\n"
        "t_end = 0.5\ncauchy = true\n[grid]\nn = " +
            int_list({50, 100, 200, 400, 800}) + "\n[time]\nrule = fixed_tau\ntau = 1e-4\n");
  } else if (target == "table5") {
    add("table5",
        "problem = fokker_planck\nscheme = bpmc_hoc_splitting\nmode = convergence\n"
        "t_end = 0.5\ncauchy = true\n[grid]\nn = 500\n[time]\nrule = fixed_nt\n"
        "nt_sweep = 100,200,400,800,1600\n");
  } else if (target == "table6") {
    const std::string grid = "[grid]\nn = " + int_list(clamp_sweep({90, 180, 270, 360}, max_n)) + "\n";
    const std::string time = "[time]\nrule = tau_c_h2\nc = 1\n";
    add("table6_adi", "problem = burgers2d\nscheme = hoc_adi_splitting\nmode = convergence\n" +
                          grid + time);
    add("table6_bdf2", "problem = burgers2d\nscheme = bdf2_imex_hoc\nmode = convergence\n" +
                           grid + time);
  } else if (target == "table7") {
    const std::string grid = "[grid]\nn = " + int_list(clamp_sweep({60, 120, 240, 360}, max_n)) + "\n";
    const std::string time = "[time]\nrule = tau_c_h2\nc = 1\n";
    add("table7_bp", "problem = burgers2d\nscheme = bp_adi\nmode = convergence\n" + grid + time);
    add("table7_bpmc", "problem = burgers2d\nscheme = bpmc_adi\nmode = convergence\n" + grid + time);
  } else if (target == "fp-entropy") {
    add("fp_entropy",
        "problem = fokker_planck\nscheme = bpmc_hoc_splitting\nmode = timeseries\n"
        "[grid]\nn = 80\n[time]\nrule = fixed_nt\nnt = 40\n[output]\nsnapshots = 0,2\n");
  } else if (target == "mass-figures") {
    const std::string ex3 =
        "problem = burgers2d\nmode = timeseries\n[grid]\nn = 200\n"
        "[time]\nrule = fixed_tau\ntau = 5.6e-3\n[output]\nsnapshots = 0.6\n";
    add("mass2d_plain", "scheme = hoc_adi_splitting\n" + ex3);
    add("mass2d_bp", "scheme = bp_adi\n" + ex3);
    add("mass2d_bpmc", "scheme = bpmc_adi\n" + ex3);
    const int n5 = (max_n > 0 && max_n < 500) ? max_n : 500;
    const std::string ex5 = "problem = vortex_hump\nmode = timeseries\n[grid]\nn = " +
                            std::to_string(n5) +
                            "\n[time]\nrule = fixed_tau\ntau = 1.5e-4\n"
                            "[output]\nsnapshots = 0.5,1.5,2\n";
    add("vortex_plain", "scheme = hoc_adi_splitting\n" + ex5);
    add("vortex_bpmc", "scheme = bpmc_adi\n" + ex5);
  } else {
    throw convsplit::ConfigError(
        "unknown reproduce target: " + target +
        " (expected table1|table2|table4|table5|table6|table7|fp-entropy|mass-figures)");
  }
  return runs;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Splitting compact-difference solvers for convection-diffusion benchmarks"};
  app.require_subcommand(1);

  std::string config_path, out_dir, target;
  int jobs = 0;
  int max_n = 0;
  std::vector<std::string> overrides;

  auto* run = app.add_subcommand("run", "run an experiment described by a config file");
  run->add_option("config", config_path, "config file (key = value with [sections])")->required();
  run->add_option("--out", out_dir, "output directory (overrides run.out)");
  run->add_option("--jobs", jobs, "kernel worker threads (0 = auto, 1 = serial)");
  run->add_option("--override", overrides, "config overrides, section.key=value");

  app.add_subcommand("list-problems", "list the problem registry");

  auto* rep = app.add_subcommand("reproduce", "emit a benchmark table or figure data set");
  rep->add_option("target", target,
                  "table1|table2|table4|table5|table6|table7|fp-entropy|mass-figures")
      ->required();
  rep->add_option("--out", out_dir, "output directory");
  rep->add_option("--jobs", jobs, "kernel worker threads (0 = auto, 1 = serial)");
  rep->add_option("--max-n", max_n, "clamp resolution sweeps to N <= max-n");

  CLI11_PARSE(app, argc, argv);

  try {
    if (jobs == 1) {
      convsplit::par::set_enabled(false);
    } else if (jobs > 1) {
      convsplit::par::set_max_threads(jobs);
    }

    if (app.got_subcommand("list-problems")) {
      for (const auto& name : convsplit::problem_names()) std::cout << name << "\n";
      return kExitOk;
    }
    if (app.got_subcommand("run")) {
      ConfigMap cfg = ConfigMap::parse_file(config_path);
      for (const auto& kv : overrides) cfg.apply_override(kv);
      return execute(ExperimentConfig::from_config(cfg), out_dir);
    }
    // reproduce
    int rc = kExitOk;
    for (const auto& r : reproduce_runs(target, max_n)) {
      const int code = run_config_text(r.text, {}, out_dir.empty() ? "out" : out_dir);
      if (code != kExitOk) rc = code;
    }
    return rc;
  } catch (const convsplit::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDiverged;
  }
}
