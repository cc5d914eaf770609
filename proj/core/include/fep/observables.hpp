#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "fep/configuration.hpp"
#include "fep/engine.hpp"
#include "fep/params.hpp"

namespace fep {

/// (1/N) sum_x g(x/N) eta_x.
double pair_with_test_function(const Configuration& cfg, const std::function<double(double)>& g);

/// Half-width of a block window.
struct BlockSpec {
  int half_width = 1;
};

/// Inclusive site range.
struct Window {
  int lo = 1;
  int hi = 1;
  [[nodiscard]] int size() const noexcept { return hi - lo + 1; }
};

/// The window of 2 ell + 1 sites around x, shifted inwards near the ends
/// so that it stays in {1, ..., N-1}. If the bulk is too short the whole
/// bulk is returned; ell = 0 gives {x}.
Window block_window(int n, int x, int ell);

/// Average of eta over the window of half-width ell around x.
double block_density(const Configuration& cfg, int x, BlockSpec spec);

/// Average of h over the window of half-width ell - 1 around x.
double block_active(const Configuration& cfg, const SystemParams& params, int x, BlockSpec spec);

/// Window average of a per-site field (entry x-1 is site x).
double block_average(std::span<const double> field, int n, int x, int ell);

/// Per-site running mean and spread over weighted samples.
///
/// Each entry keeps weighted Welford sums (West's update), so samples never
/// need to be stored and two profiles merge exactly (Chan et al.).
/// The standard error uses the effective sample size W^2 / sum w^2; with
/// fewer than two effective samples it is reported as 0 and has_spread()
/// is false.
class Profile {
 public:
  Profile() = default;
  /// Profile over the bulk sites of lattice size N.
  explicit Profile(int n);

  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] std::size_t size() const noexcept { return mean_.size(); }
  [[nodiscard]] double total_weight() const noexcept { return weight_; }
  [[nodiscard]] std::size_t samples() const noexcept { return samples_; }
  [[nodiscard]] double effective_samples() const noexcept;
  [[nodiscard]] bool has_spread() const noexcept { return effective_samples() > 1.0 + 1e-12; }

  /// Site x = i + 1.
  [[nodiscard]] double mean(std::size_t i) const { return mean_.at(i); }
  [[nodiscard]] const std::vector<double>& means() const noexcept { return mean_; }
  /// Unbiased (reliability-weighted) variance of the samples at entry i.
  [[nodiscard]] double variance(std::size_t i) const;
  [[nodiscard]] double std_error(std::size_t i) const;

  /// Adds one sample (a value per site). Throws std::invalid_argument on a
  /// size mismatch or non-positive weight.
  void add(std::span<const double> values, double weight = 1.0);
  void merge(const Profile& other);

 private:
  int n_ = 0;
  double weight_ = 0.0;
  double weight_sq_ = 0.0;
  std::size_t samples_ = 0;
  std::vector<double> mean_;
  std::vector<double> m2_;
};

/// Adds the occupation vector of `cfg` with the given weight (per-sample
/// mode uses weight 1, time-weighted mode the holding time).
void accumulate(Profile& profile, const Configuration& cfg, double weight = 1.0);

/// Time integrals of eta_x and h_x along a trajectory.
///
/// Sites are integrated lazily: a move only flushes the sites whose
/// occupation or active indicator it can change. Attach on_move as the
/// run_until hook and call close() at window boundaries.
class TimeIntegrator {
 public:
  struct Averages {
    double duration = 0.0;
    std::vector<double> density;  // entry x-1
    std::vector<double> active;   // entry x-1
  };

  /// Starts the first window at the state's current time.
  explicit TimeIntegrator(const SimulationState& state);

  void on_move(const SimulationState& state, const Move& move, double t);
  [[nodiscard]] MoveHook hook();

  /// Time averages over [window start, t]; a new window starts at t.
  /// Throws std::invalid_argument if the window has zero length.
  Averages close(const SimulationState& state, double t);

 private:
  void flush(const SimulationState& state, int x, double t);

  int n_;
  double start_;
  std::vector<double> last_;
  std::vector<double> eta_sum_;
  std::vector<double> h_sum_;
};

/// Writes columns x, x_over_N, mean, stderr, weight.
void write_profile_csv(std::ostream& out, const Profile& profile);
void write_profile_csv(const std::string& path, const Profile& profile);

}  // namespace fep
