#include "fep/harness/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "fep/engine.hpp"
#include "fep/harness/replicas.hpp"
#include "fep/measures.hpp"

namespace fep::harness {

InitialProfile InitialProfile::linear(double left, double right) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "linear %.6g -> %.6g", left, right);
  return {[left, right](double u) { return left + (right - left) * u; }, buf};
}

InitialProfile InitialProfile::constant(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "constant %.6g", value);
  return {[value](double) { return value; }, buf};
}

void ExperimentSpec::validate() const {
  params.validate();
  if (replicas < 1) throw std::invalid_argument("replicas must be at least 1");
  if (checkpoints.empty()) throw std::invalid_argument("at least one checkpoint time is required");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (!(checkpoints[i] > 0.0) || !std::isfinite(checkpoints[i])) {
      throw std::invalid_argument("checkpoint times must be positive and finite");
    }
    if (i > 0 && !(checkpoints[i] > checkpoints[i - 1])) {
      throw std::invalid_argument("checkpoint times must be strictly ascending");
    }
  }
  if (!initial.rho) throw std::invalid_argument("no initial profile");
  constexpr int kProbe = 1000;
  for (int i = 0; i <= kProbe; ++i) {
    const double u = static_cast<double>(i) / kProbe;
    const double r = initial.rho(u);
    if (!(r > 0.5 && r <= 1.0)) {
      char buf[200];
      std::snprintf(buf, sizeof buf,
                    "initial profile is %.6g at u = %.4g; only supercritical profiles with values in (1/2, 1] "
                    "are in scope (subcritical data leads to a free-boundary problem, which is not handled)",
                    r, u);
      throw std::invalid_argument(buf);
    }
  }
}

bool ComparisonReport::pass() const {
  return std::all_of(checkpoints.begin(), checkpoints.end(), [](const auto& c) { return c.pass; });
}

std::string format_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", t);
  return buf;
}

MeanError mean_error(const std::vector<double>& values) {
  MeanError out;
  if (values.empty()) return out;
  const auto n = static_cast<double>(values.size());
  for (const double v : values) out.mean += v;
  out.mean /= n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (const double v : values) ss += (v - out.mean) * (v - out.mean);
    out.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return out;
}

namespace {

struct ReplicaRun {
  std::vector<std::vector<double>> snapshots;
  std::vector<double> window_sum;
  int window_count = 0;
};

std::vector<double> occupations(const Configuration& cfg) {
  std::vector<double> v(static_cast<std::size_t>(cfg.n() - 1));
  for (int x = 1; x < cfg.n(); ++x) v[static_cast<std::size_t>(x - 1)] = cfg[x] ? 1.0 : 0.0;
  return v;
}

ReplicaRun run_one(const ExperimentSpec& spec, const MeasureSpec& law, const std::vector<double>& window_times,
                   std::size_t replica) {
  RngStream rng(spec.seed, replica);
  SimulationState state(sample(law, rng), spec.params);
  ReplicaRun out;
  out.window_sum.assign(static_cast<std::size_t>(spec.params.n - 1), 0.0);
  std::vector<Observer> observers;
  observers.push_back({spec.checkpoints, [&out](const SimulationState& s, double) {
                         out.snapshots.push_back(occupations(s.configuration()));
                       }});
  if (!window_times.empty()) {
    observers.push_back({window_times, [&out](const SimulationState& s, double) {
                           const auto& cfg = s.configuration();
                           for (int x = 1; x < cfg.n(); ++x) {
                             out.window_sum[static_cast<std::size_t>(x - 1)] += cfg[x] ? 1.0 : 0.0;
                           }
                           ++out.window_count;
                         }});
  }
  const double t_end = std::max(spec.checkpoints.back(), window_times.empty() ? 0.0 : window_times.back());
  run_until(state, t_end, observers, rng);
  return out;
}

std::vector<double> smooth(const std::vector<double>& field, int n, int ell) {
  std::vector<double> out(field.size());
  for (int x = 1; x < n; ++x) out[static_cast<std::size_t>(x - 1)] = block_average(field, n, x, ell);
  return out;
}

}  // namespace

ComparisonReport run_hydro(const ExperimentSpec& spec, const HydroOptions& options) {
  spec.validate();
  ComparisonReport report;
  report.spec = spec;
  report.options = options;
  report.regime = regime_for(spec.params.theta);
  const int n = spec.params.n;
  const int ell = options.smoothing > 0 ? options.smoothing : std::max(1, n / 16);
  const int cells = options.pde_cells > 0 ? options.pde_cells : std::max(n, 256);

  std::vector<double> window_times = options.window_times;
  std::sort(window_times.begin(), window_times.end());

  const MeasureSpec law = MeasureSpec::initial_law(spec.initial.rho, n);
  const auto runs = run_replicas<ReplicaRun>(
      static_cast<std::size_t>(spec.replicas), spec.workers,
      [&](std::size_t r) { return run_one(spec, law, window_times, r); });

  DensityGrid grid = make_grid(spec.initial.rho, boundary_condition_for(spec.params), cells);
  for (std::size_t k = 0; k < spec.checkpoints.size(); ++k) {
    CheckpointComparison cmp;
    cmp.t = spec.checkpoints[k];
    cmp.profile = Profile(n);
    for (const auto& run : runs) cmp.profile.add(run.snapshots.at(k));
    grid = solve(std::move(grid), cmp.t);
    cmp.pde = grid;

    std::vector<double> pde_at_sites(static_cast<std::size_t>(n - 1));
    for (int x = 1; x < n; ++x) pde_at_sites[static_cast<std::size_t>(x - 1)] = grid.at(static_cast<double>(x) / n);
    const auto& sim = cmp.profile.means();
    const auto sim_s = smooth(sim, n, ell);
    const auto pde_s = smooth(pde_at_sites, n, ell);
    for (std::size_t i = 0; i < sim.size(); ++i) {
      cmp.l1 += std::abs(sim_s[i] - pde_s[i]);
      cmp.raw_l1 += std::abs(sim[i] - pde_at_sites[i]);
      const double se = cmp.profile.std_error(i);
      if (se > 0.0) cmp.max_z = std::max(cmp.max_z, std::abs(sim[i] - pde_at_sites[i]) / se);
    }
    cmp.l1 /= n;
    cmp.raw_l1 /= n;
    cmp.pass = cmp.l1 < options.tolerance;
    report.checkpoints.push_back(std::move(cmp));
  }

  if (!window_times.empty()) {
    report.window_profile = Profile(n);
    for (const auto& run : runs) {
      std::vector<double> avg = run.window_sum;
      for (auto& v : avg) v /= run.window_count;
      report.window_profile.add(avg);
      report.window_block_left.push_back(block_average(avg, n, 1, ell));
      report.window_block_right.push_back(block_average(avg, n, n - 1, ell));
    }
  }
  return report;
}

void write_report(const ComparisonReport& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  for (const auto& c : report.checkpoints) {
    const std::string t = format_time(c.t);
    write_profile_csv((base / ("profile_t" + t + ".csv")).string(), c.profile);
    write_grid_csv((base / ("pde_t" + t + ".csv")).string(), c.pde);
  }
  std::ofstream out(base / "report.csv");
  if (!out) throw std::runtime_error("cannot write " + (base / "report.csv").string());
  out << "checkpoint,l1,max_z,pass\n";
  char line[128];
  for (const auto& c : report.checkpoints) {
    std::snprintf(line, sizeof line, "%g,%.10g,%.10g,%d\n", c.t, c.l1, c.max_z, c.pass ? 1 : 0);
    out << line;
  }
}

}  // namespace fep::harness
