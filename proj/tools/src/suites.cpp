#include "fep/harness/suites.hpp"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <map>
#include <mutex>
#include <stdexcept>

#include "fep/engine.hpp"
#include "fep/exact_chain.hpp"
#include "fep/harness/experiment.hpp"
#include "fep/harness/stationary.hpp"
#include "fep/kernel.hpp"
#include "fep/measures.hpp"
#include "fep/paths.hpp"
#include "fep/pde.hpp"

namespace fep::harness {

namespace {

std::string printf_string(const char* format, ...) {
  char buf[1024];
  va_list args;
  va_start(args, format);
  std::vsnprintf(buf, sizeof buf, format, args);
  va_end(args);
  return buf;
}

Check combine(std::string name, const std::vector<Check>& parts) {
  Check out{std::move(name), true, {}};
  for (const auto& p : parts) {
    out.pass = out.pass && p.pass;
    if (!out.detail.empty()) out.detail += "; ";
    out.detail += p.name + (p.pass ? "" : " FAILED") + ": " + p.detail;
  }
  return out;
}

// Uniform-ish random ergodic configuration: a hole is always followed by a particle.
Configuration random_ergodic(int n, RngStream& rng, double p_one = 0.7) {
  Configuration cfg = Configuration::full(n);
  bool prev_hole = false;
  for (int x = 1; x < n; ++x) {
    const bool hole = !prev_hole && !rng.bernoulli(p_one);
    if (hole) cfg.set(x, false);
    prev_hole = hole;
  }
  return cfg;
}

int uniform_int(RngStream& rng, int lo, int hi) {
  return lo + static_cast<int>(rng.uniform() * (hi - lo + 1));
}

// ---------------------------------------------------------------- core

Check ergodic_closure() {
  long moves = 0;
  bool ok = true;
  const auto p = make_params(10, 0.4, 0.7, 0.0, 1.0);
  for (int n = 4; n <= 10 && ok; ++n) {
    SystemParams q = p;
    q.n = n;
    for (const auto& cfg : enumerate_ergodic(n)) {
      std::vector<Move> all{Move::flip_left(), Move::flip_right()};
      for (int x = 1; x <= n - 2; ++x) all.push_back(Move::swap(x));
      for (const auto& m : all) {
        if (move_rate(cfg, q, m) <= 0.0) continue;
        ++moves;
        if (!is_ergodic(apply_move(cfg, m))) ok = false;
      }
    }
  }
  return {"ergodic closure", ok, printf_string("%ld positive-rate moves from ergodic states, N = 4..10", moves)};
}

Check gradient_identity() {
  const auto p = make_params(12, 0.25, 0.65, 0.5, 1.5);
  RngStream rng(11);
  double worst = 0.0;
  for (int rep = 0; rep < 2000; ++rep) {
    Configuration cfg = Configuration::full(12);
    for (int x = 1; x < 12; ++x) cfg.set(x, rng.bernoulli(0.5));
    for (int x = 1; x <= 10; ++x) {
      const double j = instantaneous_current(cfg, p, x);
      worst = std::max(worst, std::abs(j - (active_indicator(cfg, p, x) - active_indicator(cfg, p, x + 1))));
    }
  }
  return {"current is a gradient", worst < 1e-14, printf_string("max |j - (h_x - h_x+1)| = %.3g", worst)};
}

Check active_density_inverse() {
  double worst = 0.0;
  for (int i = 0; i <= 1000; ++i) {
    const double a = i / 1000.0;
    worst = std::max(worst, std::abs(active_density(rho_bar(a)) - a));
  }
  return {"active density inverse", worst < 1e-14, printf_string("max |a(rho_bar(a)) - a| = %.3g", worst)};
}

// ---------------------------------------------------------------- exact

Check exact_oracle() {
  double worst = 0.0;
  double worst_residual = 0.0;
  int chains = 0;
  for (int n : {6, 8, 10, 12}) {
    for (double theta : {-1.0, 0.0, 1.0, 2.0}) {
      for (double kappa : {0.5, 1.0, 2.0}) {
        for (auto [alpha, beta] : {std::pair{0.3, 0.8}, std::pair{0.6, 0.6}}) {
          const auto p = make_params(n, alpha, beta, theta, kappa);
          const auto chain = build_generator(p);
          const auto pi = stationary_exact(chain);
          const auto h = expected_active(chain, pi);
          const auto closed = stationary_active_field(p);
          for (int x = 1; x < n; ++x) {
            worst = std::max(worst, std::abs(h[static_cast<std::size_t>(x)] - closed[static_cast<std::size_t>(x - 1)]));
          }
          worst_residual = std::max(worst_residual, stationary_residual(chain, pi));
          ++chains;
        }
      }
    }
  }
  return {"exact stationary oracle", worst < 1e-9,
          printf_string("%d chains, max |E[h_x] - closed form| = %.3g, max ||pi Q|| = %.3g", chains, worst,
                        worst_residual)};
}

Check equilibrium_identity() {
  double worst_measure = 0.0;
  double worst_balance = 0.0;
  int chains = 0;
  for (int n : {6, 8, 10, 12}) {
    for (double theta : {-1.0, 0.0, 1.0, 2.0}) {
      for (double kappa : {0.5, 1.0, 2.0}) {
        for (double alpha : {0.3, 0.6}) {
          const auto p = make_params(n, alpha, alpha, theta, kappa);
          const auto chain = build_generator(p);
          const auto pi = stationary_exact(chain);
          const auto eq = MeasureSpec::equilibrium(alpha, n);
          for (std::size_t s = 0; s < chain.size(); ++s) {
            worst_measure = std::max(worst_measure, std::abs(pi[s] - exact_prob(eq, chain.states[s])));
          }
          worst_balance = std::max(worst_balance, detailed_balance_defect(chain, pi));
          ++chains;
        }
      }
    }
  }
  return {"equilibrium identity", worst_measure < 1e-10 && worst_balance < 1e-12,
          printf_string("%d chains, max |pi - restricted GC| = %.3g, max detailed-balance defect = %.3g", chains,
                        worst_measure, worst_balance)};
}

// ---------------------------------------------------------------- measures

Check quasi_reversibility_rate() {
  const auto small = scan_quasi_reversibility(MeasureSpec::reference(0.3, 0.8, 16));
  const auto large = scan_quasi_reversibility(MeasureSpec::reference(0.3, 0.8, 32));
  const double c_small = 16.0 * small.max_defect;
  const double c_large = 32.0 * large.max_defect;
  const double ratio = c_large / c_small;
  return {"quasi-reversibility rate", ratio >= 0.5 && ratio <= 2.0,
          printf_string("N=16: max defect %.4g (N*d = %.4g, %llu pairs); N=32: max defect %.4g (N*d = %.4g, "
                        "%llu pairs); ratio %.3f",
                        small.max_defect, c_small, static_cast<unsigned long long>(small.pairs), large.max_defect,
                        c_large, static_cast<unsigned long long>(large.pairs), ratio)};
}

Check reference_density_law() {
  std::vector<double> constants;
  std::string detail;
  for (int n : {64, 128, 256}) {
    const auto rho = ref_density_profile(0.3, 0.8, n);
    const auto spec = MeasureSpec::reference(0.3, 0.8, n);
    double worst = 0.0;
    for (int x = 1; x < n; ++x) {
      worst = std::max(worst, std::abs(rho[static_cast<std::size_t>(x - 1)] - rho_bar(spec.active_field().at(x))));
    }
    constants.push_back(n * worst);
    detail += printf_string("N=%d: N*max = %.4g; ", n, n * worst);
  }
  bool ok = true;
  for (std::size_t i = 1; i < constants.size(); ++i) {
    const double r = constants[i] / constants[i - 1];
    ok = ok && r >= 0.5 && r <= 2.0;
    detail += printf_string("ratio %.3f%s", r, i + 1 < constants.size() ? ", " : "");
  }
  return {"reference density law", ok, detail};
}

Check measure_normalization() {
  double worst = 0.0;
  int cases = 0;
  for (int n : {4, 6, 8, 10, 12, 14}) {
    const std::vector<MeasureSpec> specs{
        MeasureSpec::grand_canonical(0.7, n), MeasureSpec::initial_law([](double u) { return 0.6 + 0.3 * u; }, n),
        MeasureSpec::reference(0.3, 0.8, n), MeasureSpec::equilibrium(0.45, n)};
    for (const auto& spec : specs) {
      double total = 0.0;
      for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << (n - 1)); ++bits) {
        total += exact_prob(spec, Configuration::from_pattern(bits, n));
      }
      worst = std::max(worst, std::abs(total - 1.0));
      ++cases;
    }
  }
  return {"normalization", worst < 1e-10, printf_string("%d measures, max |sum - 1| = %.3g", cases, worst)};
}

Check multinomial_agreement() {
  constexpr int n = 8;
  constexpr std::size_t samples = 1000000;
  const std::vector<MeasureSpec> specs{
      MeasureSpec::grand_canonical(0.7, n), MeasureSpec::initial_law([](double u) { return 0.6 + 0.3 * u; }, n),
      MeasureSpec::reference(0.3, 0.8, n), MeasureSpec::equilibrium(0.45, n)};
  double worst_z = 0.0;
  long stray = 0;
  std::uint64_t stream = 0;
  for (const auto& spec : specs) {
    RngStream rng(2024, stream++);
    std::vector<long> counts(std::size_t{1} << (n - 1), 0);
    for (std::size_t s = 0; s < samples; ++s) ++counts[sample(spec, rng).pattern()];
    for (std::uint64_t bits = 0; bits < counts.size(); ++bits) {
      const double p = exact_prob(spec, Configuration::from_pattern(bits, n));
      if (p == 0.0) {
        stray += counts[bits];
        continue;
      }
      const double expected = p * samples;
      const double sigma = std::sqrt(expected * (1.0 - p));
      worst_z = std::max(worst_z, std::abs(counts[bits] - expected) / sigma);
    }
  }
  return {"multinomial agreement", worst_z <= 4.0 && stray == 0,
          printf_string("4 measures x 1e6 samples at N=8, max cell z = %.2f, samples off the support = %ld",
                        worst_z, stray)};
}

Check gc_active_identity() {
  constexpr int n = 64;
  constexpr int samples = 40000;
  double worst_z = 0.0;
  std::string detail;
  for (double rho : {0.6, 0.75, 0.9}) {
    const auto spec = MeasureSpec::grand_canonical(rho, n);
    const auto params = make_params(n, 0.5, 0.5);
    RngStream rng(77, static_cast<std::uint64_t>(rho * 100));
    std::vector<double> per_sample;
    per_sample.reserve(samples);
    for (int s = 0; s < samples; ++s) {
      const auto cfg = sample(spec, rng);
      double sum = 0.0;
      for (int x = 2; x <= n - 2; ++x) sum += active_indicator(cfg, params, x);
      per_sample.push_back(sum / (n - 3));
    }
    const auto me = mean_error(per_sample);
    const double z = std::abs(me.mean - active_density(rho)) / me.std_error;
    worst_z = std::max(worst_z, z);
    detail += printf_string("rho=%.2f: E[h] = %.5f vs %.5f (z = %.2f) ", rho, me.mean, active_density(rho), z);
  }
  return {"grand-canonical active density", worst_z <= 4.0, detail};
}

// ---------------------------------------------------------------- paths

Check irreducibility_replays() {
  RngStream rng(31);
  int failures = 0;
  long moves = 0;
  for (int rep = 0; rep < 1000; ++rep) {
    const int n = uniform_int(rng, 4, 40);
    const auto p = make_params(n, 0.05 + 0.9 * rng.uniform(), 0.05 + 0.9 * rng.uniform(), 0.0, 1.0);
    Configuration cur = random_ergodic(n, rng, 0.3 + 0.6 * rng.uniform());
    bool ok = true;
    for (const auto& m : irreducibility_path(cur)) {
      ok = ok && move_rate(cur, p, m) > 0.0;
      apply_move_in_place(cur, m);
      ok = ok && is_ergodic(cur);
      ++moves;
    }
    ok = ok && cur == Configuration::full(n);
    if (!ok) ++failures;
  }
  return {"irreducibility path", failures == 0,
          printf_string("1000 replays, %ld moves, %d failures", moves, failures)};
}

Check long_jump_replays() {
  RngStream rng(37);
  int failures = 0;
  int done = 0;
  long attempts = 0;
  while (done < 1000) {
    ++attempts;
    const int n = uniform_int(rng, 8, 40);
    const int ell = uniform_int(rng, 2, n - 5);
    const int origin = uniform_int(rng, 2, n - 2 - ell);
    Configuration cfg = random_ergodic(n, rng, 0.3 + 0.6 * rng.uniform());
    cfg.set(origin, true);
    cfg.set(origin + ell, false);
    Configuration target = cfg;
    target.swap_sites(origin, origin + ell);
    if (!is_ergodic(cfg) || !is_ergodic(target)) continue;
    ++done;
    const auto p = make_params(n, 0.5, 0.5);
    const auto edges = long_jump_path(cfg, origin, ell);
    std::vector<Configuration> visited;
    const auto end = replay_edges(cfg, p, edges, &visited);
    bool ok = static_cast<int>(edges.size()) == 3 * ell - 4 && end == target;
    for (const auto& v : visited) ok = ok && is_ergodic(v);
    if (!ok) ++failures;
  }
  return {"long-jump path", failures == 0,
          printf_string("1000 replays (%ld draws), %d failures", attempts, failures)};
}

// ---------------------------------------------------------------- decay

Check correlation_decay() {
  RngStream rng(4242);
  auto est = covariance_profile(MeasureSpec::reference(0.3, 0.8, 256), 128, 15, 1000000, rng);
  est.erase(est.begin());  // distance 0 is the variance
  const auto fit = fit_exponential_decay(est, 5.0);
  std::string used;
  for (int d : fit.distances) used += std::to_string(d) + " ";
  return {"correlation decay", fit.decaying(0.9),
          printf_string("slope %.4f, R^2 %.4f over distances %s(points with |Cov| > 5 stderr)", fit.slope,
                        fit.r_squared, used.c_str())};
}

// ---------------------------------------------------------------- pde

double pde_stationary_gap(Regime regime, const BoundaryCondition& bc, const std::function<double(double)>& init,
                          double alpha, double beta, double kappa, double t_end, int cells) {
  const auto grid = solve(init, bc, t_end, cells);
  double worst = 0.0;
  for (int i = 0; i <= grid.cells(); ++i) {
    worst = std::max(worst, std::abs(grid.rho[static_cast<std::size_t>(i)] -
                                     stationary_closed_form(regime, alpha, beta, kappa, grid.u(i))));
  }
  return worst;
}

Check pde_stationary_limits() {
  const double alpha = 0.3;
  const double beta = 0.8;
  const double kappa = 1.0;
  const double mid = rho_bar(0.5 * (alpha + beta));
  const auto linear = [](double u) { return 0.6 + 0.3 * u; };
  const auto bump = [mid](double u) { return mid + 0.1 * std::cos(M_PI * u); };
  const double d = pde_stationary_gap(Regime::Dirichlet, Dirichlet{rho_bar(alpha), rho_bar(beta)}, linear, alpha,
                                      beta, kappa, 2.0, 64);
  const double r = pde_stationary_gap(Regime::Robin, Robin{kappa, alpha, beta}, linear, alpha, beta, kappa, 6.0, 64);
  const double nm = pde_stationary_gap(Regime::Neumann, Neumann{}, bump, alpha, beta, kappa, 2.0, 64);
  const bool ok = d < 1e-4 && r < 1e-4 && nm < 1e-4;
  return {"PDE long-time limits", ok,
          printf_string("max |rho - rho_ss|: Dirichlet %.3g, Robin %.3g, Neumann %.3g", d, r, nm)};
}

Check pde_refinement() {
  const auto rep = refinement_check([](double u) { return 0.6 + 0.3 * u; }, Robin{1.0, 0.3, 0.8}, 0.05,
                                    {16, 32, 64, 128});
  std::string orders;
  for (double o : rep.orders) orders += printf_string("%.2f ", o);
  return {"PDE refinement", !rep.suspect, "observed orders " + orders};
}

Check pde_neumann_mass() {
  const auto bump = [](double u) { return 0.75 + 0.1 * std::cos(M_PI * u) + 0.05 * u; };
  const auto start = make_grid(bump, Neumann{}, 100);
  const auto end = solve(start, 0.5);
  const double drift = std::abs(trapezoid_mass(end) - trapezoid_mass(start));
  return {"Neumann mass", drift < 1e-12, printf_string("mass drift %.3g after t = 0.5", drift)};
}

// ---------------------------------------------------------------- simulation

// Hydrodynamic runs of the Dirichlet experiment, shared by the convergence
// and boundary-pinning checks so that one process pays for them once.
const ComparisonReport& dirichlet_run(int n) {
  static std::mutex mutex;
  static std::map<int, ComparisonReport> cache;
  std::lock_guard lock(mutex);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  ExperimentSpec spec;
  spec.name = "dirichlet";
  spec.params = make_params(n, 0.3, 0.8, 0.0, 1.0);
  spec.initial = InitialProfile::linear(0.6, 0.9);
  spec.checkpoints = {0.05, 0.1};
  spec.replicas = 16;
  spec.seed = 5;
  HydroOptions options;
  for (int k = 0; k <= 20; ++k) options.window_times.push_back(0.05 + 0.0025 * k);
  return cache.emplace(n, run_hydro(spec, options)).first->second;
}

Check hydro_convergence() {
  const std::vector<int> sizes{128, 256, 512};
  std::vector<const ComparisonReport*> runs;
  for (int n : sizes) runs.push_back(&dirichlet_run(n));
  bool ok = true;
  std::string detail;
  for (std::size_t k = 0; k < 2; ++k) {
    detail += printf_string("t=%g: ", runs[0]->checkpoints[k].t);
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      const auto& c = runs[i]->checkpoints[k];
      detail += printf_string("N=%d L1 %.4f (raw %.4f, max z %.2f)%s", sizes[i], c.l1, c.raw_l1, c.max_z,
                              i + 1 < sizes.size() ? ", " : "; ");
      if (i > 0 && !(c.l1 < runs[i - 1]->checkpoints[k].l1)) ok = false;
    }
    if (!(runs.back()->checkpoints[k].l1 < 0.02)) ok = false;
  }
  return {"Dirichlet hydrodynamic limit", ok, detail};
}

Check boundary_pinning() {
  const auto& run = dirichlet_run(512);
  const auto left = mean_error(run.window_block_left);
  const auto right = mean_error(run.window_block_right);
  const double target = rho_bar(0.3);
  const double gap = std::abs(left.mean - target);
  return {"boundary pinning", gap <= 0.03,
          printf_string("N=512, block density at x=1 averaged over t in [0.05, 0.1]: %.4f +- %.4f vs rho_bar(alpha) "
                        "= %.4f (gap %.4f); right end %.4f +- %.4f vs rho_bar(beta) = %.4f",
                        left.mean, left.std_error, target, gap, right.mean, right.std_error, rho_bar(0.8))};
}

Check stationary_simulation(double theta, std::uint64_t seed) {
  const auto p = make_params(256, 0.3, 0.8, theta, 1.0);
  const auto start = MeasureSpec::grand_canonical(rho_bar(0.5 * (p.alpha + p.beta)), p.n);
  const auto est = estimate_replicas(p, start, 32, seed, 2.0, 1.0);
  const Regime regime = regime_for(theta);
  double worst_z = 0.0;
  double worst_gap = 0.0;
  for (int x = 1; x < p.n; ++x) {
    const auto i = static_cast<std::size_t>(x - 1);
    const double target = active_density(stationary_closed_form(regime, p.alpha, p.beta, p.kappa,
                                                                static_cast<double>(x) / p.n));
    const double gap = std::abs(est.active.mean(i) - target);
    worst_gap = std::max(worst_gap, gap);
    worst_z = std::max(worst_z, gap / est.active.std_error(i));
  }
  return {"simulation theta=" + printf_string("%g", theta), worst_z <= 4.0,
          printf_string("N=256, 32 replicas, window [2, 3]: max |<h_x> - a(rho_ss)| = %.4f, max z = %.2f", worst_gap,
                        worst_z)};
}

Check stationary_profiles() {
  return combine("Robin and Neumann stationary profiles",
                 {pde_stationary_limits(), stationary_simulation(1.0, 71), stationary_simulation(2.0, 72)});
}

Check small_system_profile() {
  const auto report = run_fig3(make_params(50, 0.3, 0.8, 0.0, 1.0), 3);
  const auto& e = report.estimate;
  return {"stationary profile at N = 50", report.pass(),
          printf_string("max |rho_est - rho_bar(0.3 + 0.5x/N)| = %.4f (tol 0.03), max active z = %.2f; %d batches of "
                        "length %g after burn-in %g, max stderr %.4f, half-window max z %.2f",
                        report.max_density_gap, report.max_active_z, e.batches, e.batch_length, e.burn_in,
                        e.max_std_error(), e.half_gap_z)};
}

Check path_replays() { return combine("path constructions", {irreducibility_replays(), long_jump_replays()}); }

Check measure_sanity() {
  return combine("measure sanity", {measure_normalization(), multinomial_agreement(), gc_active_identity()});
}

}  // namespace

bool all_pass(const SuiteReport& report) {
  return std::all_of(report.begin(), report.end(), [](const Check& c) { return c.pass; });
}

const std::vector<std::string>& suite_names() {
  static const std::vector<std::string> names{"core", "measures", "exact", "paths", "pde", "decay"};
  return names;
}

SuiteReport run_suite(const std::string& name) {
  if (name == "core") return {ergodic_closure(), gradient_identity(), active_density_inverse()};
  if (name == "measures") {
    return {measure_normalization(), multinomial_agreement(), gc_active_identity(), reference_density_law(),
            quasi_reversibility_rate()};
  }
  if (name == "exact") return {exact_oracle(), equilibrium_identity()};
  if (name == "paths") return {irreducibility_replays(), long_jump_replays()};
  if (name == "pde") return {pde_stationary_limits(), pde_refinement(), pde_neumann_mass()};
  if (name == "decay") return {correlation_decay()};
  std::string known;
  for (const auto& s : suite_names()) known += " " + s;
  throw std::invalid_argument("unknown suite '" + name + "' (known:" + known + ")");
}

const std::vector<Criterion>& acceptance_criteria() {
  static const std::vector<Criterion> criteria{
      {1, "exact stationary oracle", exact_oracle},
      {2, "equilibrium identity", equilibrium_identity},
      {3, "quasi-reversibility rate", quasi_reversibility_rate},
      {4, "reference density law", reference_density_law},
      {5, "Dirichlet hydrodynamic limit", hydro_convergence},
      {6, "boundary pinning", boundary_pinning},
      {7, "Robin and Neumann stationary profiles", stationary_profiles},
      {8, "stationary profile at N = 50", small_system_profile},
      {9, "path constructions", path_replays},
      {10, "measure sanity", measure_sanity},
      {11, "correlation decay", correlation_decay},
  };
  return criteria;
}

std::string format_check(const Check& check, int id) {
  std::string head = check.pass ? "PASS " : "FAIL ";
  if (id > 0) head += printf_string("%2d ", id);
  return head + check.name + ": " + check.detail;
}

}  // namespace fep::harness
