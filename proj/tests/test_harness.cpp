#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fep/exact_chain.hpp"
#include "fep/harness/experiment.hpp"
#include "fep/harness/replicas.hpp"
#include "fep/harness/stationary.hpp"
#include "fep/harness/suites.hpp"
#include "fep/kernel.hpp"
#include "fep/measures.hpp"

using namespace fep;
using namespace fep::harness;

namespace {

ExperimentSpec equilibrium_spec(int n) {
  ExperimentSpec spec;
  spec.params = make_params(n, 0.75, 0.75, 0.0, 1.0);
  spec.initial = InitialProfile::constant(0.8);
  spec.checkpoints = {0.01, 0.02};
  spec.replicas = 8;
  spec.seed = 9;
  return spec;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(ExperimentSpec, Validation) {
  auto spec = equilibrium_spec(32);
  EXPECT_NO_THROW(spec.validate());
  spec.replicas = 0;
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec = equilibrium_spec(32);
  spec.checkpoints = {0.2, 0.1};
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec.checkpoints = {0.1, 0.1};
  EXPECT_THROW(spec.validate(), std::invalid_argument);
  spec.checkpoints = {};
  EXPECT_THROW(spec.validate(), std::invalid_argument);
}

TEST(ExperimentSpec, SubcriticalProfileRejectedWithScopeMessage) {
  auto spec = equilibrium_spec(32);
  spec.initial = InitialProfile::linear(0.4, 0.9);
  try {
    spec.validate();
    FAIL() << "accepted a subcritical profile";
  } catch (const std::invalid_argument& e) {
    const std::string msg = e.what();
    EXPECT_NE(msg.find("supercritical"), std::string::npos) << msg;
    EXPECT_NE(msg.find("scope"), std::string::npos) << msg;
  }
  spec.initial = InitialProfile::constant(0.5);
  EXPECT_THROW(spec.validate(), std::invalid_argument);
}

TEST(Replicas, ResultsInIndexOrderForAnyWorkerCount) {
  const std::function<int(std::size_t)> job = [](std::size_t i) { return static_cast<int>(i * i); };
  const auto one = run_replicas<int>(20, 1, job);
  const auto four = run_replicas<int>(20, 4, job);
  EXPECT_EQ(one, four);
  for (std::size_t i = 0; i < one.size(); ++i) EXPECT_EQ(one[i], static_cast<int>(i * i));
  EXPECT_TRUE(run_replicas<int>(0, 3, job).empty());
}

TEST(Replicas, ExceptionPropagates) {
  const std::function<int(std::size_t)> job = [](std::size_t i) -> int {
    if (i == 5) throw std::runtime_error("boom");
    return 0;
  };
  EXPECT_THROW((void)run_replicas<int>(10, 2, job), std::runtime_error);
}

TEST(MeanError, KnownValues) {
  const auto me = mean_error({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(me.mean, 2.5);
  EXPECT_NEAR(me.std_error, std::sqrt(5.0 / 3.0 / 4.0), 1e-15);
  EXPECT_EQ(mean_error({}).mean, 0.0);
  EXPECT_EQ(mean_error({7.0}).std_error, 0.0);
}

TEST(FormatTime, ShortestRepresentation) {
  EXPECT_EQ(format_time(0.05), "0.05");
  EXPECT_EQ(format_time(0.1), "0.1");
  EXPECT_EQ(format_time(2.0), "2");
}

TEST(Hydro, GlobalEquilibriumStaysFlat) {
  const auto spec = equilibrium_spec(64);
  const auto report = run_hydro(spec);
  EXPECT_EQ(report.regime, Regime::Dirichlet);
  ASSERT_EQ(report.checkpoints.size(), 2u);
  for (const auto& c : report.checkpoints) {
    for (double r : c.pde.rho) EXPECT_NEAR(r, 0.8, 1e-12);
    EXPECT_GE(c.l1, 0.0);
    EXPECT_LE(c.l1, c.raw_l1 + 1e-15);
    // Noise floor of a smoothed 8-replica profile: well below 0.05.
    EXPECT_LT(c.l1, 0.05);
    double mean = 0.0;
    for (std::size_t i = 0; i < c.profile.size(); ++i) mean += c.profile.mean(i);
    mean /= static_cast<double>(c.profile.size());
    // Var of the site-averaged density under pi_rho is about
    // rho (1 - rho) a / (2 - a) / (N - 1), a = a(rho).
    const double a = active_density(0.8);
    const double sd = std::sqrt(0.8 * 0.2 * a / (2.0 - a) / 63.0 / spec.replicas);
    EXPECT_NEAR(mean, 0.8, 4.0 * sd);
  }
}

TEST(Hydro, ReproducibleAndIndependentOfWorkers) {
  auto spec = equilibrium_spec(48);
  spec.initial = InitialProfile::linear(0.6, 0.9);
  spec.params = make_params(48, 0.3, 0.8, 0.0, 1.0);
  spec.workers = 1;
  const auto a = run_hydro(spec);
  spec.workers = 3;
  const auto b = run_hydro(spec);
  ASSERT_EQ(a.checkpoints.size(), b.checkpoints.size());
  for (std::size_t k = 0; k < a.checkpoints.size(); ++k) {
    EXPECT_EQ(a.checkpoints[k].profile.means(), b.checkpoints[k].profile.means());
    EXPECT_EQ(a.checkpoints[k].l1, b.checkpoints[k].l1);
  }
}

TEST(Hydro, DispatchFollowsTheta) {
  auto spec = equilibrium_spec(32);
  spec.replicas = 2;
  spec.checkpoints = {0.005};
  for (auto [theta, regime] : {std::pair{-0.5, Regime::Dirichlet}, std::pair{0.99, Regime::Dirichlet},
                               std::pair{1.0, Regime::Robin}, std::pair{1.01, Regime::Neumann},
                               std::pair{3.0, Regime::Neumann}}) {
    spec.params.theta = theta;
    EXPECT_EQ(run_hydro(spec).regime, regime) << theta;
  }
}

TEST(Hydro, NeumannFlatProfileKeepsItsMass) {
  ExperimentSpec spec;
  spec.params = make_params(64, 0.3, 0.8, 2.0, 1.0);
  spec.initial = InitialProfile::constant(0.75);
  spec.checkpoints = {0.05};
  spec.replicas = 8;
  spec.seed = 3;
  const auto report = run_hydro(spec);
  EXPECT_EQ(report.regime, Regime::Neumann);
  const auto& c = report.checkpoints.front();
  for (double r : c.pde.rho) EXPECT_NEAR(r, 0.75, 1e-12);
  double mass = 0.0;
  for (double m : c.profile.means()) mass += m;
  mass /= static_cast<double>(c.profile.size());
  // Reservoir events: about kappa N^(2-theta) t = 0.05 per replica, so the
  // mass can move only through bulk fluctuations of the initial draw.
  EXPECT_NEAR(mass, 0.75, 0.02);
}

TEST(Hydro, WindowAveragesCollected) {
  auto spec = equilibrium_spec(32);
  HydroOptions options;
  options.window_times = {0.012, 0.01, 0.015};
  const auto report = run_hydro(spec, options);
  EXPECT_EQ(report.window_block_left.size(), static_cast<std::size_t>(spec.replicas));
  EXPECT_EQ(report.window_profile.samples(), static_cast<std::size_t>(spec.replicas));
}

TEST(Hydro, OutputFilesAreByteIdenticalOnRerun) {
  const auto dir = std::filesystem::temp_directory_path() / "fep_harness_test";
  std::filesystem::remove_all(dir);
  const auto spec = equilibrium_spec(32);
  write_report(run_hydro(spec), (dir / "a").string());
  write_report(run_hydro(spec), (dir / "b").string());
  for (const char* f : {"profile_t0.01.csv", "pde_t0.02.csv", "report.csv"}) {
    ASSERT_TRUE(std::filesystem::exists(dir / "a" / f)) << f;
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
  const auto report = slurp(dir / "a" / "report.csv");
  EXPECT_EQ(report.rfind("checkpoint,l1,max_z,pass\n", 0), 0u);
  std::filesystem::remove_all(dir);
}

TEST(Stationary, EquilibriumDensityIsTwoThirds) {
  const auto p = make_params(20, 0.5, 0.5, 0.0, 1.0);
  LongRunOptions options;
  options.burn_in = 0.5;
  options.initial_batch_length = 0.5;
  options.target_std_error = 0.01;
  const auto est = estimate_long_run(p, MeasureSpec::equilibrium(0.5, 20), 4, options);
  EXPECT_LT(est.max_std_error(), 0.01);
  for (std::size_t i = 0; i < est.density.size(); ++i) {
    EXPECT_NEAR(est.density.mean(i), 2.0 / 3.0, 4.5 * est.density.std_error(i)) << i;
    EXPECT_NEAR(est.active.mean(i), 0.5, 4.5 * est.active.std_error(i)) << i;
  }
  EXPECT_EQ(est.batches, 32);
  EXPECT_DOUBLE_EQ(est.averaging_time, est.batch_length * 32);
}

TEST(Stationary, BatchDoublingStopsAtCap) {
  const auto p = make_params(16, 0.3, 0.8, 0.0, 1.0);
  LongRunOptions options;
  options.burn_in = 0.1;
  options.initial_batch_length = 0.01;
  options.target_std_error = 1e-9;
  options.max_averaging_time = 1.5;
  const auto est = estimate_long_run(p, MeasureSpec::reference(0.3, 0.8, 16), 4, options);
  EXPECT_LE(est.averaging_time, 1.5);
  EXPECT_GT(2.0 * est.averaging_time, 1.5);
  options.batches = 5;
  EXPECT_THROW((void)estimate_long_run(p, MeasureSpec::reference(0.3, 0.8, 16), 4, options),
               std::invalid_argument);
}

TEST(Stationary, ReplicaEstimateMatchesExactActiveField) {
  const auto p = make_params(24, 0.3, 0.8, 1.0, 1.0);
  const auto est = estimate_replicas(p, MeasureSpec::grand_canonical(0.7, 24), 16, 8, 1.0, 2.0);
  const auto exact = stationary_active_field(p);
  for (std::size_t i = 0; i < est.active.size(); ++i) {
    EXPECT_NEAR(est.active.mean(i), exact[i], 4.5 * est.active.std_error(i)) << i;
  }
  EXPECT_THROW((void)estimate_replicas(p, MeasureSpec::grand_canonical(0.7, 24), 1, 8, 1.0, 2.0),
               std::invalid_argument);
}

TEST(Fig3, SmallRunTableShape) {
  LongRunOptions options;
  options.target_std_error = 0.02;
  const auto report = run_fig3(make_params(20, 0.3, 0.8, 0.0, 1.0), 2, options);
  ASSERT_EQ(report.rows.size(), 19u);
  EXPECT_EQ(report.rows.front().x, 1);
  EXPECT_NEAR(report.rows.front().density_prediction, rho_bar(0.3 + 0.5 / 20), 1e-15);
  EXPECT_NEAR(report.rows.back().active_exact, 0.3 + 0.5 * (19.0 / 20.0), 1e-12);
  EXPECT_TRUE(report.active_pass());
}

TEST(Suites, NamesAndDispatch) {
  EXPECT_EQ(suite_names().size(), 6u);
  EXPECT_THROW((void)run_suite("nope"), std::invalid_argument);
  const auto core = run_suite("core");
  EXPECT_TRUE(all_pass(core));
  EXPECT_EQ(acceptance_criteria().size(), 11u);
  EXPECT_EQ(format_check({"x", true, "d"}, 3), "PASS  3 x: d");
}
