#include "fep/harness/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "fep/engine.hpp"
#include "fep/exact_chain.hpp"
#include "fep/harness/replicas.hpp"
#include "fep/kernel.hpp"
#include "fep/pde.hpp"

namespace fep::harness {

double StationaryEstimate::max_std_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < density.size(); ++i) {
    worst = std::max({worst, density.std_error(i), active.std_error(i)});
  }
  return worst;
}

namespace {

using Averages = TimeIntegrator::Averages;

Averages merge_pair(const Averages& a, const Averages& b) {
  Averages out;
  out.duration = a.duration + b.duration;
  out.density.resize(a.density.size());
  out.active.resize(a.active.size());
  const double wa = a.duration / out.duration;
  const double wb = b.duration / out.duration;
  for (std::size_t i = 0; i < a.density.size(); ++i) {
    out.density[i] = wa * a.density[i] + wb * b.density[i];
    out.active[i] = wa * a.active[i] + wb * b.active[i];
  }
  return out;
}

void fill(StationaryEstimate& est, const std::vector<Averages>& batches, int n) {
  est.density = Profile(n);
  est.active = Profile(n);
  for (const auto& b : batches) {
    est.density.add(b.density);
    est.active.add(b.active);
  }
  est.batches = static_cast<int>(batches.size());
}

// Largest z-score between the density means of two halves of the batches.
double half_gap(const std::vector<Averages>& first, const std::vector<Averages>& second, int n) {
  StationaryEstimate a;
  StationaryEstimate b;
  fill(a, first, n);
  fill(b, second, n);
  double worst = 0.0;
  for (std::size_t i = 0; i < a.density.size(); ++i) {
    const double se = std::hypot(a.density.std_error(i), b.density.std_error(i));
    if (se > 0.0) worst = std::max(worst, std::abs(a.density.mean(i) - b.density.mean(i)) / se);
  }
  return worst;
}

}  // namespace

StationaryEstimate estimate_long_run(const SystemParams& params, const MeasureSpec& initial, std::uint64_t seed,
                                     const LongRunOptions& options) {
  params.validate();
  if (initial.n() != params.n) throw std::invalid_argument("initial measure has a different N");
  if (options.batches < 4 || options.batches % 2 != 0) {
    throw std::invalid_argument("batch count must be even and at least 4");
  }
  if (!(options.initial_batch_length > 0.0)) throw std::invalid_argument("batch length must be positive");

  RngStream rng(seed, 0);
  SimulationState state(sample(initial, rng), params);
  run_until(state, options.burn_in, {}, rng);
  TimeIntegrator integrator(state);
  const MoveHook hook = integrator.hook();

  StationaryEstimate est;
  est.burn_in = options.burn_in;
  double length = options.initial_batch_length;
  std::vector<Averages> batches;
  auto run_batches = [&](int count) {
    for (int b = 0; b < count; ++b) {
      const double t = state.time() + length;
      run_until(state, t, {}, rng, hook);
      batches.push_back(integrator.close(state, t));
    }
  };

  run_batches(options.batches);
  fill(est, batches, params.n);
  while (est.max_std_error() >= options.target_std_error &&
         2.0 * length * options.batches <= options.max_averaging_time) {
    run_batches(options.batches);
    std::vector<Averages> merged;
    merged.reserve(batches.size() / 2);
    for (std::size_t i = 0; i + 1 < batches.size(); i += 2) merged.push_back(merge_pair(batches[i], batches[i + 1]));
    batches = std::move(merged);
    length *= 2.0;
    fill(est, batches, params.n);
  }
  est.batch_length = length;
  est.averaging_time = length * options.batches;
  const auto half = batches.begin() + static_cast<std::ptrdiff_t>(batches.size() / 2);
  est.half_gap_z = half_gap({batches.begin(), half}, {half, batches.end()}, params.n);
  return est;
}

StationaryEstimate estimate_replicas(const SystemParams& params, const MeasureSpec& initial, int replicas,
                                     std::uint64_t seed, double burn_in, double window, unsigned workers) {
  params.validate();
  if (initial.n() != params.n) throw std::invalid_argument("initial measure has a different N");
  if (replicas < 2) throw std::invalid_argument("need at least two replicas for an error bar");
  if (!(window > 0.0)) throw std::invalid_argument("averaging window must be positive");

  struct Halves {
    Averages first;
    Averages second;
  };
  const auto halves = run_replicas<Halves>(static_cast<std::size_t>(replicas), workers, [&](std::size_t r) {
    RngStream rng(seed, r);
    SimulationState state(sample(initial, rng), params);
    run_until(state, burn_in, {}, rng);
    TimeIntegrator integrator(state);
    const MoveHook hook = integrator.hook();
    Halves h;
    run_until(state, burn_in + 0.5 * window, {}, rng, hook);
    h.first = integrator.close(state, burn_in + 0.5 * window);
    run_until(state, burn_in + window, {}, rng, hook);
    h.second = integrator.close(state, burn_in + window);
    return h;
  });

  std::vector<Averages> whole;
  std::vector<Averages> first;
  std::vector<Averages> second;
  for (const auto& h : halves) {
    whole.push_back(merge_pair(h.first, h.second));
    first.push_back(h.first);
    second.push_back(h.second);
  }
  StationaryEstimate est;
  fill(est, whole, params.n);
  est.burn_in = burn_in;
  est.batch_length = window;
  est.averaging_time = window * replicas;
  est.half_gap_z = half_gap(first, second, params.n);
  return est;
}

Fig3Report run_fig3(const SystemParams& params, std::uint64_t seed, const LongRunOptions& options) {
  Fig3Report report;
  report.params = params;
  report.estimate = estimate_long_run(params, MeasureSpec::reference(params.alpha, params.beta, params.n), seed,
                                      options);
  const auto exact = stationary_active_field(params);
  const Regime regime = regime_for(params.theta);
  const int n = params.n;
  for (int x = 1; x < n; ++x) {
    const auto i = static_cast<std::size_t>(x - 1);
    StationaryRow row;
    row.x = x;
    row.u = static_cast<double>(x) / n;
    row.density = report.estimate.density.mean(i);
    row.density_stderr = report.estimate.density.std_error(i);
    row.density_prediction = stationary_closed_form(regime, params.alpha, params.beta, params.kappa, row.u);
    row.active = report.estimate.active.mean(i);
    row.active_stderr = report.estimate.active.std_error(i);
    row.active_exact = exact[i];
    report.max_density_gap = std::max(report.max_density_gap, std::abs(row.density - row.density_prediction));
    if (row.active_stderr > 0.0) {
      report.max_active_z = std::max(report.max_active_z, std::abs(row.active - row.active_exact) / row.active_stderr);
    }
    report.rows.push_back(row);
  }
  return report;
}

void write_fig3(const Fig3Report& report, const std::string& dir) {
  std::filesystem::create_directories(dir);
  const auto path = std::filesystem::path(dir) / "fig3.csv";
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "x,x_over_N,density,density_stderr,rho_ss,active,active_stderr,active_exact\n";
  char line[256];
  for (const auto& r : report.rows) {
    std::snprintf(line, sizeof line, "%d,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g,%.10g\n", r.x, r.u, r.density,
                  r.density_stderr, r.density_prediction, r.active, r.active_stderr, r.active_exact);
    out << line;
  }
}

}  // namespace fep::harness
