#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "fep/exact_chain.hpp"
#include "fep/harness/experiment.hpp"
#include "fep/harness/stationary.hpp"
#include "fep/harness/suites.hpp"
#include "fep/kernel.hpp"
#include "fep/measures.hpp"
#include "fep/pde.hpp"

namespace {

using namespace fep;
using namespace fep::harness;

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitUsage = 2;

struct Options {
  int n = 0;  // 0: per-command default
  double alpha = 0.3;
  double beta = 0.8;
  double theta = 0.0;
  double kappa = 1.0;
  int replicas = 0;
  std::uint64_t seed = 1;
  std::vector<double> times;
  std::string out;
  double rho_left = 0.6;
  double rho_right = 0.9;
  double tolerance = 0.02;
  unsigned workers = 0;
  int cells = 0;
  double burn_in = 2.0;
  double window = 1.0;
  double batch_length = 1.0;
  double target_stderr = 0.005;
  double max_time = 20000.0;
  std::string suite;
};

SystemParams params_for(const Options& o, int default_n) {
  return make_params(o.n > 0 ? o.n : default_n, o.alpha, o.beta, o.theta, o.kappa);
}

std::string out_dir(const Options& o, const char* fallback) { return o.out.empty() ? fallback : o.out; }

int cmd_hydro(const Options& o) {
  ExperimentSpec spec;
  spec.name = "hydro";
  spec.params = params_for(o, 256);
  spec.initial = InitialProfile::linear(o.rho_left, o.rho_right);
  spec.checkpoints = o.times.empty() ? std::vector<double>{0.05, 0.1} : o.times;
  spec.replicas = o.replicas > 0 ? o.replicas : 16;
  spec.seed = o.seed;
  spec.output_dir = out_dir(o, "out/hydro");
  spec.workers = o.workers;
  HydroOptions options;
  options.tolerance = o.tolerance;
  options.pde_cells = o.cells;
  const auto report = run_hydro(spec, options);
  write_report(report, spec.output_dir);
  std::printf("hydro N=%d theta=%g (%s), %d replicas, initial %s\n", spec.params.n, spec.params.theta,
              to_string(report.regime).c_str(), spec.replicas, spec.initial.description.c_str());
  for (const auto& c : report.checkpoints) {
    std::printf("  t=%-8g L1 %.5f  raw L1 %.5f  max z %.2f  %s\n", c.t, c.l1, c.raw_l1, c.max_z,
                c.pass ? "pass" : "FAIL");
  }
  std::printf("outputs in %s\n", spec.output_dir.c_str());
  return report.pass() ? kExitPass : kExitFail;
}

int cmd_fig3(const Options& o) {
  const auto params = params_for(o, 50);
  LongRunOptions options;
  options.burn_in = o.burn_in;
  options.initial_batch_length = o.batch_length;
  options.target_std_error = o.target_stderr;
  options.max_averaging_time = o.max_time;
  const auto report = run_fig3(params, o.seed, options);
  const std::string dir = out_dir(o, "out/fig3");
  write_fig3(report, dir);
  const auto& e = report.estimate;
  std::printf("fig3 N=%d alpha=%g beta=%g theta=%g kappa=%g\n", params.n, params.alpha, params.beta, params.theta,
              params.kappa);
  std::printf("  averaging time %g (%d batches of %g), max stderr %.4f, half-window max z %.2f\n", e.averaging_time,
              e.batches, e.batch_length, e.max_std_error(), e.half_gap_z);
  std::printf("  max |density - rho_ss| = %.4f (tol %.2f) %s\n", report.max_density_gap, report.density_tolerance,
              report.density_pass() ? "pass" : "FAIL");
  std::printf("  max |active - exact| / stderr = %.2f (tol %.0f) %s\n", report.max_active_z, report.z_tolerance,
              report.active_pass() ? "pass" : "FAIL");
  std::printf("outputs in %s\n", dir.c_str());
  return report.pass() ? kExitPass : kExitFail;
}

int cmd_stationary(const Options& o) {
  const auto params = params_for(o, 256);
  const int replicas = o.replicas > 0 ? o.replicas : 32;
  const auto start = MeasureSpec::grand_canonical(rho_bar(0.5 * (params.alpha + params.beta)), params.n);
  const auto est = estimate_replicas(params, start, replicas, o.seed, o.burn_in, o.window, o.workers);
  const auto exact = stationary_active_field(params);
  const Regime regime = regime_for(params.theta);
  const std::string dir = out_dir(o, "out/stationary");
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / "stationary.csv";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "x,x_over_N,density,density_stderr,active,active_stderr,active_exact,active_limit\n";
  double worst_exact = 0.0;
  double worst_limit = 0.0;
  char line[256];
  for (int x = 1; x < params.n; ++x) {
    const auto i = static_cast<std::size_t>(x - 1);
    const double u = static_cast<double>(x) / params.n;
    const double limit = active_density(stationary_closed_form(regime, params.alpha, params.beta, params.kappa, u));
    const double se = est.active.std_error(i);
    if (se > 0.0) {
      worst_exact = std::max(worst_exact, std::abs(est.active.mean(i) - exact[i]) / se);
      worst_limit = std::max(worst_limit, std::abs(est.active.mean(i) - limit) / se);
    }
    std::snprintf(line, sizeof line, "%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", x, u, est.density.mean(i),
                  est.density.std_error(i), est.active.mean(i), se, exact[i], limit);
    out << line;
  }
  std::printf("stationary N=%d theta=%g (%s), %d replicas, burn-in %g, window %g\n", params.n, params.theta,
              to_string(regime).c_str(), replicas, o.burn_in, o.window);
  std::printf("  max z vs exact active field %.2f, vs limit profile %.2f, half-window max z %.2f\n", worst_exact,
              worst_limit, est.half_gap_z);
  std::printf("outputs in %s\n", dir.c_str());
  return worst_exact <= 4.0 ? kExitPass : kExitFail;
}

int cmd_pde(const Options& o) {
  const auto params = params_for(o, 256);
  const auto bc = boundary_condition_for(params);
  const auto init = InitialProfile::linear(o.rho_left, o.rho_right);
  ExperimentSpec check;
  check.params = params;
  check.initial = init;
  check.checkpoints = o.times.empty() ? std::vector<double>{0.05, 0.1} : o.times;
  check.validate();
  const int cells = o.cells > 0 ? o.cells : 256;
  const std::string dir = out_dir(o, "out/pde");
  std::filesystem::create_directories(dir);
  DensityGrid grid = make_grid(init.rho, bc, cells);
  const Regime regime = regime_for(params.theta);
  std::printf("pde %s, M=%d, dt=%.3g, initial %s\n", to_string(regime).c_str(), cells, default_dt(grid),
              init.description.c_str());
  for (const double t : check.checkpoints) {
    grid = solve(std::move(grid), t);
    write_grid_csv((std::filesystem::path(dir) / ("pde_t" + format_time(t) + ".csv")).string(), grid);
    double gap = 0.0;
    for (int i = 0; i <= grid.cells(); ++i) {
      gap = std::max(gap, std::abs(grid.rho[static_cast<std::size_t>(i)] -
                                   stationary_closed_form(regime, params.alpha, params.beta, params.kappa, grid.u(i))));
    }
    std::printf("  t=%-8g mass %.6f  max |rho - rho_ss| %.3g\n", t, trapezoid_mass(grid), gap);
  }
  const auto ref = refinement_check(init.rho, bc, check.checkpoints.front(), {cells / 4, cells / 2, cells});
  std::printf("  refinement at t=%g:", check.checkpoints.front());
  for (double ord : ref.orders) std::printf(" order %.2f", ord);
  std::printf("%s\n", ref.suspect ? " (suspect)" : "");
  std::printf("outputs in %s\n", dir.c_str());
  return ref.suspect ? kExitFail : kExitPass;
}

int cmd_verify(const Options& o) {
  const auto report = run_suite(o.suite);
  for (const auto& c : report) std::printf("%s\n", format_check(c).c_str());
  return all_pass(report) ? kExitPass : kExitFail;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and verification tools for the facilitated exclusion process with reservoirs"};
  app.require_subcommand(1);
  app.set_config("--config", "", "Key = value file; command-line flags override it");
  Options o;
  app.add_option("--n", o.n, "Lattice size N (bulk is 1..N-1)")->check(CLI::Range(4, 1 << 20));
  app.add_option("--alpha", o.alpha, "Left reservoir density");
  app.add_option("--beta", o.beta, "Right reservoir density");
  app.add_option("--theta", o.theta, "Boundary slow-down exponent");
  app.add_option("--kappa", o.kappa, "Boundary rate constant");
  app.add_option("--replicas", o.replicas, "Independent replicas")->check(CLI::PositiveNumber);
  app.add_option("--seed", o.seed, "Random seed");
  app.add_option("--t", o.times, "Checkpoint times, comma separated")->delimiter(',');
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--rho-left", o.rho_left, "Initial density at u = 0 (linear profile)");
  app.add_option("--rho-right", o.rho_right, "Initial density at u = 1 (linear profile)");
  app.add_option("--tolerance", o.tolerance, "Pass threshold for the smoothed L1 distance");
  app.add_option("--workers", o.workers, "Worker threads (0: hardware concurrency)");
  app.add_option("--cells", o.cells, "PDE grid cells");
  app.add_option("--burn-in", o.burn_in, "Burn-in time before averaging");
  app.add_option("--window", o.window, "Averaging window per replica (stationary)");
  app.add_option("--batch-length", o.batch_length, "Initial batch length (fig3)");
  app.add_option("--target-stderr", o.target_stderr, "Batch-means stderr to reach (fig3)");
  app.add_option("--max-time", o.max_time, "Cap on the averaging time (fig3)");

  auto* hydro = app.add_subcommand("hydro", "Replica profiles vs the hydrodynamic PDE");
  auto* fig3 = app.add_subcommand("fig3", "Long-run stationary density and active field, N = 50 by default");
  auto* stationary = app.add_subcommand("stationary", "Replica-averaged stationary active field");
  auto* pde = app.add_subcommand("pde", "Solve the limit PDE for the regime selected by theta");
  auto* verify = app.add_subcommand("verify", "Run a property suite");
  std::string suites;
  for (const auto& s : suite_names()) suites += (suites.empty() ? "" : "|") + s;
  verify->add_option("suite", o.suite, suites)->required()->check(CLI::IsMember(suite_names()));
  for (auto* sub : {hydro, fig3, stationary, pde, verify}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitUsage;
  }

  try {
    if (*hydro) return cmd_hydro(o);
    if (*fig3) return cmd_fig3(o);
    if (*stationary) return cmd_stationary(o);
    if (*pde) return cmd_pde(o);
    if (*verify) return cmd_verify(o);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "fep: %s\n", e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "fep: %s\n", e.what());
    return kExitFail;
  }
  return kExitUsage;
}
