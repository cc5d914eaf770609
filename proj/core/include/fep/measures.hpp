#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "fep/configuration.hpp"
#include "fep/rng.hpp"

namespace fep {

// All four measures are laws of a two-state Markov chain read left to
// right along the bulk: eta_1 ~ Ber(first density), an occupied site is
// followed by a particle with probability a_x, an empty site always by a
// particle. They differ only in the first density and the field a_x.

/// pi_rho restricted to the bulk, rho in (1/2, 1].
struct GrandCanonical {
  double rho;
};

/// Initial law built from a continuous profile with values in (1/2, 1].
struct InitialLaw {
  std::function<double(double)> profile;
};

/// Reference measure with affine active field from alpha to beta.
struct Reference {
  double alpha;
  double beta;
};

/// Equilibrium stationary measure for alpha = beta.
struct EquilibriumStationary {
  double alpha;
};

using MeasureKind = std::variant<GrandCanonical, InitialLaw, Reference, EquilibriumStationary>;

/// Discrete active field. `values[x - 1]` is a_x; the chain only reads
/// x = 2, ..., N-1. For the reference measure a_1 = alpha is also filled
/// in and `eps_n` is the increment (beta - alpha) / (N - 2); for the
/// other measures values[0] repeats a_2 and eps_n is 0.
struct ActiveField {
  std::vector<double> values;
  double eps_n = 0.0;

  [[nodiscard]] double at(int x) const { return values[static_cast<std::size_t>(x - 1)]; }
};

/// A measure together with its lattice size and precomputed chain.
class MeasureSpec {
 public:
  /// Validates the parameters; throws std::invalid_argument.
  MeasureSpec(MeasureKind kind, int n);

  static MeasureSpec grand_canonical(double rho, int n) { return {GrandCanonical{rho}, n}; }
  static MeasureSpec initial_law(std::function<double(double)> profile, int n) {
    return {InitialLaw{std::move(profile)}, n};
  }
  static MeasureSpec reference(double alpha, double beta, int n) { return {Reference{alpha, beta}, n}; }
  static MeasureSpec equilibrium(double alpha, int n) { return {EquilibriumStationary{alpha}, n}; }

  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] const MeasureKind& kind() const noexcept { return kind_; }
  [[nodiscard]] std::string name() const;

  /// P(eta_1 = 1).
  [[nodiscard]] double first_density() const noexcept { return first_; }
  /// P(eta_x = 1 | eta_{x-1} = 1) for 2 <= x <= N-1.
  [[nodiscard]] double transition(int x) const noexcept { return field_.at(x); }
  [[nodiscard]] const ActiveField& active_field() const noexcept { return field_; }

  /// log P(cfg); -infinity off the support.
  [[nodiscard]] double log_prob(const Configuration& cfg) const;

  /// The factor of log P contributed by site y given eta_{y-1} = prev and
  /// eta_y = cur (prev is ignored for y = 1).
  [[nodiscard]] double log_factor(int y, bool prev, bool cur) const noexcept {
    if (y == 1) return log_first_[cur ? 1 : 0];
    const auto i = static_cast<std::size_t>(y - 1);
    if (prev) return cur ? log_stay_[i] : log_leave_[i];
    return cur ? 0.0 : -std::numeric_limits<double>::infinity();
  }

 private:
  MeasureKind kind_;
  int n_;
  double first_ = 0.0;
  ActiveField field_;
  double log_first_[2] = {0.0, 0.0};
  std::vector<double> log_stay_;   // log a_x
  std::vector<double> log_leave_;  // log (1 - a_x)
};

/// Draws a configuration by the forward chain construction.
Configuration sample(const MeasureSpec& spec, RngStream& rng);

/// Draws eta_1, ..., eta_last only (last <= N-1). Entry x-1 holds eta_x.
std::vector<char> sample_prefix(const MeasureSpec& spec, RngStream& rng, int last);

/// Exact probability of `cfg` (computed in log space). Throws
/// std::invalid_argument when N differs.
double exact_prob(const MeasureSpec& spec, const Configuration& cfg);

/// pi_rho(eta restricted to a box of length ell = sigma), evaluated as a
/// product of chain transitions. `sigma` is a 0/1 string.
double gc_marginal(double rho, std::string_view sigma);

/// The closed form (1-rho)(1-a)^(ell-1-p) a^(2p-ell+1-s_1-s_ell) 1{ergodic}.
/// Only meaningful when both exponents are non-negative; otherwise the
/// chain product above must be used.
double gc_marginal_closed_form(double rho, std::string_view sigma);

/// Marginal densities P(eta_x = 1) of any chain measure, entry x-1.
std::vector<double> marginal_densities(const MeasureSpec& spec);

/// Density profile of the reference measure from the recurrence
/// rho_1 = rho_bar(alpha), rho_x = 1 - rho_{x-1} + a_x rho_{x-1}. Entry x-1.
std::vector<double> ref_density_profile(double alpha, double beta, int n);

/// |1 - c(eta^{x,x+1}) / c(eta) * mu(eta^{x,x+1}) / mu(eta)| under the
/// reference measure. Requires cfg ergodic with c_{x,x+1}(cfg) > 0.
double quasi_reversibility_defect(double alpha, double beta, int n, int x,
                                  const Configuration& cfg);

/// Same quantity with a prebuilt reference spec (used by exhaustive scans).
double quasi_reversibility_defect(const MeasureSpec& reference, int x, const Configuration& cfg);

/// Largest defect over all ergodic configurations and all edges with
/// positive rate. Streams the enumeration, so N up to about 36 is practical.
struct DefectScan {
  double max_defect = 0.0;
  int argmax_edge = 0;
  std::string argmax_cfg;
  std::uint64_t pairs = 0;  // admissible (edge, cfg) pairs visited
};
DefectScan scan_quasi_reversibility(const MeasureSpec& reference);

struct CovarianceEstimate {
  int x = 0;
  int y = 0;
  double value = 0.0;
  double std_error = 0.0;
  std::size_t samples = 0;
};

/// Monte Carlo estimate of Cov(eta_x, eta_y), x <= y, with its delta-method
/// standard error. For x == y this is Var(eta_x).
CovarianceEstimate covariance_decay(const MeasureSpec& spec, int x, int y, std::size_t n_samples,
                                    RngStream& rng);

struct DecayFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  std::vector<int> distances;  // points that entered the fit

  [[nodiscard]] bool decaying(double min_r_squared) const {
    return distances.size() >= 3 && slope < 0.0 && r_squared > min_r_squared;
  }
};

/// Least squares of log|Cov| against y - x, keeping only estimates whose
/// magnitude exceeds `min_snr` standard errors.
/// Estimates for y = x, x+1, ..., x+max_distance from one set of samples
/// (entry d is the pair (x, x+d)).
std::vector<CovarianceEstimate> covariance_profile(const MeasureSpec& spec, int x, int max_distance,
                                                   std::size_t n_samples, RngStream& rng);

DecayFit fit_exponential_decay(const std::vector<CovarianceEstimate>& estimates,
                               double min_snr = 5.0);

}  // namespace fep
