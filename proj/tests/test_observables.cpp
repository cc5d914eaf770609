#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "fep/engine.hpp"
#include "fep/kernel.hpp"
#include "fep/measures.hpp"
#include "fep/observables.hpp"
#include "support.hpp"

namespace fep {
namespace {

TEST(Pairing, Examples) {
  const int n = 40;
  EXPECT_NEAR(pair_with_test_function(Configuration::full(n), [](double) { return 1.0; }), (n - 1.0) / n, 1e-15);
  // 1010...1: occupied at odd sites; sum of x/N over odd x.
  std::string w;
  for (int x = 1; x < n; ++x) w.push_back(x % 2 ? '1' : '0');
  const auto cfg = Configuration::from_string(w);
  double direct = 0.0;
  for (int x = 1; x < n; x += 2) direct += static_cast<double>(x) / n;
  const double pairing = pair_with_test_function(cfg, [](double u) { return u; });
  EXPECT_NEAR(pairing, direct / n, 1e-15);
  EXPECT_NEAR(pairing, 0.25, 1.0 / n);
}

// Every ergodic configuration holds at least half of any nonnegative test
// function's mass, up to one site.
TEST(Pairing, SupercriticalLowerBound) {
  std::mt19937_64 gen(6);
  auto g = [](double u) { return 1.0 + std::sin(6.0 * u) * std::sin(6.0 * u); };
  for (int trial = 0; trial < 500; ++trial) {
    const int n = 10 + trial % 50;
    const auto cfg = testing::random_ergodic(n, gen, 0.5);
    double riemann = 0.0;
    double sup = 0.0;
    for (int x = 1; x < n; ++x) {
      riemann += g(static_cast<double>(x) / n) / n;
      sup = std::max(sup, g(static_cast<double>(x) / n));
    }
    ASSERT_GE(pair_with_test_function(cfg, g), 0.5 * riemann - sup / n);
    ASSERT_GE(pair_with_test_function(cfg, [](double) { return 1.0; }), 0.5 * (n - 2.0) / n);
  }
}

TEST(Blocks, WindowClipping) {
  const int n = 20;
  auto w = block_window(n, 10, 3);
  EXPECT_EQ(w.lo, 7);
  EXPECT_EQ(w.hi, 13);
  w = block_window(n, 2, 3);
  EXPECT_EQ(w.lo, 1);
  EXPECT_EQ(w.hi, 7);
  w = block_window(n, 18, 3);
  EXPECT_EQ(w.lo, 13);
  EXPECT_EQ(w.hi, 19);
  for (int x = 1; x < n; ++x) {
    const auto v = block_window(n, x, 4);
    EXPECT_EQ(v.size(), 9);
    EXPECT_GE(x, v.lo);
    EXPECT_LE(x, v.hi);
  }
  w = block_window(n, 5, 0);
  EXPECT_EQ(w.lo, 5);
  EXPECT_EQ(w.hi, 5);
  w = block_window(n, 5, 9);
  EXPECT_EQ(w.lo, 1);
  EXPECT_EQ(w.hi, 19);
  EXPECT_THROW((void)block_window(n, 0, 2), std::out_of_range);
}

TEST(Blocks, Examples) {
  const auto p = make_params(30, 0.3, 0.8);
  const auto full = Configuration::full(30);
  EXPECT_DOUBLE_EQ(block_density(full, 15, {3}), 1.0);
  EXPECT_DOUBLE_EQ(block_active(full, p, 15, {3}), 1.0);
  std::string w;
  for (int x = 1; x < 30; ++x) w.push_back(x % 2 ? '1' : '0');
  const auto alt = Configuration::from_string(w);
  EXPECT_DOUBLE_EQ(block_density(alt, 11, {2}), 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(block_active(alt, p, 11, {2}), 0.0);
  EXPECT_THROW((void)block_density(alt, 11, {0}), std::invalid_argument);
}

TEST(Blocks, WholeBulkWindowIsGlobalAverage) {
  std::mt19937_64 gen(1);
  const auto cfg = testing::random_ergodic(16, gen);
  const auto p = make_params(16, 0.3, 0.8);
  const double global = cfg.count() / 15.0;
  double h = 0.0;
  for (int x = 1; x < 16; ++x) h += active_indicator(cfg, p, x);
  for (int x = 1; x < 16; ++x) {
    EXPECT_NEAR(block_density(cfg, x, {10}), global, 1e-15);
    EXPECT_NEAR(block_active(cfg, p, x, {10}), h / 15.0, 1e-15);
  }
}

TEST(Blocks, OneBlockReplacementUnderGrandCanonical) {
  const int n = 400;
  const double rho = 0.7;
  const auto spec = MeasureSpec::grand_canonical(rho, n);
  const auto p = make_params(n, 0.5, 0.5);
  RngStream rng(15);
  std::vector<double> gaps;
  for (int ell : {4, 16, 64}) {
    double sum = 0.0;
    const int samples = 4000;
    for (int i = 0; i < samples; ++i) {
      const auto cfg = sample(spec, rng);
      sum += std::abs(active_density(std::max(0.5, block_density(cfg, 200, {ell}))) - block_active(cfg, p, 200, {ell}));
    }
    gaps.push_back(sum / samples);
  }
  EXPECT_GT(gaps[0], gaps[1]);
  EXPECT_GT(gaps[1], gaps[2]);
  EXPECT_LT(gaps[2], 0.08);
}

TEST(Profile, SingleSampleHasNoSpread) {
  Profile prof(6);
  accumulate(prof, Configuration::from_string("10111"));
  EXPECT_EQ(prof.samples(), 1U);
  EXPECT_FALSE(prof.has_spread());
  const std::vector<double> expect{1, 0, 1, 1, 1};
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(prof.mean(i), expect[i]);
    EXPECT_EQ(prof.std_error(i), 0.0);
  }
}

TEST(Profile, EqualSamplesZeroVariance) {
  Profile prof(6);
  accumulate(prof, Configuration::from_string("11011"));
  accumulate(prof, Configuration::from_string("11011"));
  EXPECT_TRUE(prof.has_spread());
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(prof.variance(i), 0.0);
    EXPECT_EQ(prof.std_error(i), 0.0);
  }
  EXPECT_EQ(prof.mean(2), 0.0);
}

TEST(Profile, Errors) {
  Profile prof(6);
  EXPECT_THROW(accumulate(prof, Configuration::full(7)), std::invalid_argument);
  EXPECT_THROW(accumulate(prof, Configuration::full(6), 0.0), std::invalid_argument);
  const std::vector<double> wrong(3, 0.5);
  EXPECT_THROW(prof.add(wrong), std::invalid_argument);
}

// Oracle: weighted mean and unbiased reliability-weighted variance
// computed two-pass from stored samples.
TEST(Profile, MatchesTwoPassOracle) {
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::uniform_real_distribution<double> wt(0.1, 3.0);
  const int n = 5;
  std::vector<std::vector<double>> xs;
  std::vector<double> ws;
  Profile prof(n);
  for (int k = 0; k < 60; ++k) {
    std::vector<double> v(n - 1);
    for (auto& e : v) e = u(gen);
    const double w = wt(gen);
    xs.push_back(v);
    ws.push_back(w);
    prof.add(v, w);
  }
  const double w_sum = std::accumulate(ws.begin(), ws.end(), 0.0);
  double w_sq = 0.0;
  for (double w : ws) w_sq += w * w;
  const double n_eff = w_sum * w_sum / w_sq;
  for (int i = 0; i < n - 1; ++i) {
    double mean = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) mean += ws[k] * xs[k][i];
    mean /= w_sum;
    double ss = 0.0;
    for (std::size_t k = 0; k < xs.size(); ++k) ss += ws[k] * (xs[k][i] - mean) * (xs[k][i] - mean);
    const double var = ss / (w_sum - w_sq / w_sum);
    EXPECT_NEAR(prof.mean(i), mean, 1e-12);
    EXPECT_NEAR(prof.variance(i), var, 1e-12);
    EXPECT_NEAR(prof.std_error(i), std::sqrt(var / n_eff), 1e-12);
  }
}

TEST(Profile, MergeIsOrderInsensitive) {
  std::mt19937_64 gen(8);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const int n = 9;
  std::vector<Profile> parts(5, Profile(n));
  Profile serial(n);
  std::vector<std::pair<std::vector<double>, double>> samples;
  for (int k = 0; k < 100; ++k) {
    std::vector<double> v(n - 1);
    for (auto& e : v) e = u(gen);
    const double w = 0.5 + u(gen);
    parts[k % 5].add(v, w);
    serial.add(v, w);
    samples.emplace_back(v, w);
  }
  Profile forward(n);
  for (const auto& p : parts) forward.merge(p);
  Profile backward(n);
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) backward.merge(*it);
  Profile tree = parts[0];
  Profile right = parts[3];
  right.merge(parts[4]);
  Profile mid = parts[1];
  mid.merge(parts[2]);
  tree.merge(mid);
  tree.merge(right);
  std::shuffle(samples.begin(), samples.end(), gen);
  Profile shuffled(n);
  for (const auto& [v, w] : samples) shuffled.add(v, w);
  for (std::size_t i = 0; i < serial.size(); ++i) {
    for (const Profile* p : {&forward, &backward, &tree, &shuffled}) {
      EXPECT_NEAR(p->mean(i), serial.mean(i), 1e-12);
      EXPECT_NEAR(p->variance(i), serial.variance(i), 1e-12);
    }
  }
  EXPECT_EQ(forward.samples(), 100U);
  EXPECT_NEAR(forward.total_weight(), serial.total_weight(), 1e-12);
}

TEST(Profile, GrandCanonicalSamplesWithinBands) {
  const int n = 50;
  Profile prof(n);
  RngStream rng(10);
  const auto spec = MeasureSpec::grand_canonical(0.75, n);
  for (int k = 0; k < 10000; ++k) accumulate(prof, sample(spec, rng));
  for (std::size_t i = 0; i < prof.size(); ++i) {
    EXPECT_NEAR(prof.mean(i), 0.75, 4 * prof.std_error(i));
    EXPECT_NEAR(prof.std_error(i), std::sqrt(0.75 * 0.25 / 10000), 2e-4);
  }
}

TEST(Profile, CsvColumns) {
  Profile prof(4);
  accumulate(prof, Configuration::from_string("101"));
  std::ostringstream out;
  write_profile_csv(out, prof);
  EXPECT_EQ(out.str(), "x,x_over_N,mean,stderr,weight\n1,0.25,1,0,1\n2,0.5,0,0,1\n3,0.75,1,0,1\n");
}

// Oracle: exact time integrals from a recorded event list.
TEST(TimeIntegrator, MatchesRecordedTrajectory) {
  const int n = 24;
  const auto p = make_params(n, 0.3, 0.8);
  RngStream rng(33);
  SimulationState state(sample(MeasureSpec::reference(0.3, 0.8, n), rng), p);
  TimeIntegrator integ(state);
  std::vector<std::pair<double, Configuration>> trace{{0.0, state.configuration()}};
  auto record = integ.hook();
  run_until(state, 0.02, {}, rng, [&](const SimulationState& s, const Move& m, double t) {
    record(s, m, t);
    trace.emplace_back(t, apply_move(s.configuration(), m));
  });
  const auto avg = integ.close(state, 0.02);
  EXPECT_DOUBLE_EQ(avg.duration, 0.02);
  std::vector<double> eta(n - 1, 0.0);
  std::vector<double> h(n - 1, 0.0);
  for (std::size_t k = 0; k < trace.size(); ++k) {
    const double t_next = k + 1 < trace.size() ? trace[k + 1].first : 0.02;
    const double dt = t_next - trace[k].first;
    for (int x = 1; x < n; ++x) {
      eta[x - 1] += dt * trace[k].second[x];
      h[x - 1] += dt * active_indicator(trace[k].second, p, x);
    }
  }
  EXPECT_GT(trace.size(), 50U);
  for (int x = 1; x < n; ++x) {
    EXPECT_NEAR(avg.density[x - 1], eta[x - 1] / 0.02, 1e-9);
    EXPECT_NEAR(avg.active[x - 1], h[x - 1] / 0.02, 1e-9);
  }
  EXPECT_THROW((void)integ.close(state, 0.02), std::invalid_argument);
}

TEST(BlockAverage, OfField) {
  const std::vector<double> f{1, 2, 3, 4, 5, 6, 7};
  EXPECT_DOUBLE_EQ(block_average(f, 8, 1, 1), 2.0);
  EXPECT_DOUBLE_EQ(block_average(f, 8, 4, 1), 4.0);
  EXPECT_DOUBLE_EQ(block_average(f, 8, 7, 2), 5.0);
  EXPECT_THROW((void)block_average(f, 9, 1, 1), std::invalid_argument);
}

}  // namespace
}  // namespace fep
