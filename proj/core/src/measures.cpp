#include "fep/measures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "fep/kernel.hpp"

namespace fep {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double safe_log(double v) { return v > 0.0 ? std::log(v) : kNegInf; }

bool supercritical(double rho) { return rho > 0.5 && rho <= 1.0; }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

bool is_ergodic_word(std::string_view sigma) {
  for (std::size_t i = 0; i + 1 < sigma.size(); ++i) {
    if (sigma[i] == '0' && sigma[i + 1] == '0') return false;
  }
  return true;
}

void check_sigma(std::string_view sigma) {
  if (sigma.empty()) throw std::invalid_argument("local configuration must have length >= 1");
  for (char c : sigma) {
    if (c != '0' && c != '1') throw std::invalid_argument("local configuration must be a 0/1 string");
  }
}

}  // namespace

MeasureSpec::MeasureSpec(MeasureKind kind, int n) : kind_(std::move(kind)), n_(n) {
  if (n < 4) throw std::invalid_argument("measure needs N >= 4");
  const auto sites = static_cast<std::size_t>(n - 1);
  field_.values.assign(sites, 0.0);

  auto fill_constant = [&](double a) {
    for (auto& v : field_.values) v = a;
  };

  std::visit(
      Overloaded{
          [&](const GrandCanonical& gc) {
            if (!supercritical(gc.rho)) throw std::invalid_argument("GrandCanonical: rho must lie in (1/2, 1]");
            first_ = gc.rho;
            fill_constant(active_density(gc.rho));
          },
          [&](const EquilibriumStationary& eq) {
            if (!(eq.alpha > 0.0 && eq.alpha < 1.0)) {
              throw std::invalid_argument("EquilibriumStationary: alpha must lie in (0,1)");
            }
            first_ = rho_bar(eq.alpha);
            fill_constant(eq.alpha);
          },
          [&](const Reference& ref) {
            if (!(ref.alpha > 0.0 && ref.alpha < 1.0 && ref.beta > 0.0 && ref.beta < 1.0)) {
              throw std::invalid_argument("Reference: alpha and beta must lie in (0,1)");
            }
            first_ = rho_bar(ref.alpha);
            field_.eps_n = (ref.beta - ref.alpha) / static_cast<double>(n - 2);
            for (int x = 1; x <= n - 1; ++x) {
              field_.values[static_cast<std::size_t>(x - 1)] =
                  ref.alpha + field_.eps_n * static_cast<double>(x - 1);
            }
          },
          [&](const InitialLaw& law) {
            if (!law.profile) throw std::invalid_argument("InitialLaw: profile is empty");
            const auto nn = static_cast<double>(n);
            std::vector<double> rho(sites + 1);
            for (int x = 1; x <= n - 1; ++x) {
              const double r = law.profile(static_cast<double>(x) / nn);
              if (!supercritical(r)) {
                throw std::invalid_argument("InitialLaw: profile value " + std::to_string(r) +
                                            " at u = " + std::to_string(x / nn) +
                                            " is not in (1/2, 1]");
              }
              rho[static_cast<std::size_t>(x)] = r;
            }
            first_ = rho[1];
            for (int x = 2; x <= n - 1; ++x) {
              const double prev = rho[static_cast<std::size_t>(x - 1)];
              field_.values[static_cast<std::size_t>(x - 1)] =
                  (rho[static_cast<std::size_t>(x)] + prev - 1.0) / prev;
            }
            field_.values[0] = field_.values.size() > 1 ? field_.values[1] : 0.0;
          },
      },
      kind_);

  log_first_[0] = safe_log(1.0 - first_);
  log_first_[1] = safe_log(first_);
  log_stay_.resize(sites);
  log_leave_.resize(sites);
  for (std::size_t i = 0; i < sites; ++i) {
    log_stay_[i] = safe_log(field_.values[i]);
    log_leave_[i] = safe_log(1.0 - field_.values[i]);
  }
}

std::string MeasureSpec::name() const {
  return std::visit(Overloaded{
                        [](const GrandCanonical& gc) { return "GrandCanonical(" + std::to_string(gc.rho) + ")"; },
                        [](const InitialLaw&) { return std::string("InitialLaw"); },
                        [](const Reference& r) {
                          return "Reference(" + std::to_string(r.alpha) + "," + std::to_string(r.beta) + ")";
                        },
                        [](const EquilibriumStationary& e) {
                          return "EquilibriumStationary(" + std::to_string(e.alpha) + ")";
                        },
                    },
                    kind_);
}

double MeasureSpec::log_prob(const Configuration& cfg) const {
  if (cfg.n() != n_) throw std::invalid_argument("exact_prob: configuration size does not match N");
  double lp = log_first_[cfg[1] ? 1 : 0];
  for (int x = 2; x <= n_ - 1; ++x) {
    if (cfg[x - 1]) {
      lp += cfg[x] ? log_stay_[static_cast<std::size_t>(x - 1)] : log_leave_[static_cast<std::size_t>(x - 1)];
    } else if (!cfg[x]) {
      return kNegInf;
    }
  }
  return lp;
}

Configuration sample(const MeasureSpec& spec, RngStream& rng) {
  Configuration cfg(spec.n());
  bool prev = rng.bernoulli(spec.first_density());
  cfg.set(1, prev);
  for (int x = 2; x <= spec.n() - 1; ++x) {
    const bool cur = prev ? rng.bernoulli(spec.transition(x)) : true;
    cfg.set(x, cur);
    prev = cur;
  }
  return cfg;
}

std::vector<char> sample_prefix(const MeasureSpec& spec, RngStream& rng, int last) {
  if (last < 1 || last > spec.n() - 1) throw std::out_of_range("sample_prefix: last site out of range");
  std::vector<char> eta(static_cast<std::size_t>(last));
  bool prev = rng.bernoulli(spec.first_density());
  eta[0] = prev ? 1 : 0;
  for (int x = 2; x <= last; ++x) {
    const bool cur = prev ? rng.bernoulli(spec.transition(x)) : true;
    eta[static_cast<std::size_t>(x - 1)] = cur ? 1 : 0;
    prev = cur;
  }
  return eta;
}

double exact_prob(const MeasureSpec& spec, const Configuration& cfg) {
  const double lp = spec.log_prob(cfg);
  return lp == kNegInf ? 0.0 : std::exp(lp);
}

double gc_marginal(double rho, std::string_view sigma) {
  check_sigma(sigma);
  if (!supercritical(rho)) throw std::domain_error("gc_marginal: rho must lie in (1/2, 1]");
  const double a = active_density(rho);
  double p = sigma[0] == '1' ? rho : 1.0 - rho;
  for (std::size_t i = 1; i < sigma.size(); ++i) {
    if (sigma[i - 1] == '1') {
      p *= sigma[i] == '1' ? a : 1.0 - a;
    } else if (sigma[i] == '0') {
      return 0.0;
    }
  }
  return p;
}

double gc_marginal_closed_form(double rho, std::string_view sigma) {
  check_sigma(sigma);
  if (!supercritical(rho)) throw std::domain_error("gc_marginal: rho must lie in (1/2, 1]");
  if (!is_ergodic_word(sigma)) return 0.0;
  const int ell = static_cast<int>(sigma.size());
  int p = 0;
  for (char c : sigma) p += c == '1' ? 1 : 0;
  const int s1 = sigma.front() == '1' ? 1 : 0;
  const int sl = sigma.back() == '1' ? 1 : 0;
  const double a = active_density(rho);
  return (1.0 - rho) * std::pow(1.0 - a, ell - 1 - p) * std::pow(a, 2 * p - ell + 1 - s1 - sl);
}

std::vector<double> marginal_densities(const MeasureSpec& spec) {
  std::vector<double> rho(static_cast<std::size_t>(spec.n() - 1));
  rho[0] = spec.first_density();
  for (int x = 2; x <= spec.n() - 1; ++x) {
    const double prev = rho[static_cast<std::size_t>(x - 2)];
    rho[static_cast<std::size_t>(x - 1)] = 1.0 - prev + spec.transition(x) * prev;
  }
  return rho;
}

std::vector<double> ref_density_profile(double alpha, double beta, int n) {
  return marginal_densities(MeasureSpec::reference(alpha, beta, n));
}

namespace {

SystemParams reference_params(const MeasureSpec& reference) {
  const auto* ref = std::get_if<Reference>(&reference.kind());
  if (ref == nullptr) throw std::invalid_argument("quasi_reversibility_defect needs a Reference measure");
  return SystemParams{reference.n(), ref->alpha, ref->beta, 0.0, 1.0};
}

// log mu changes only through the factors of sites x, x+1 and x+2.
// Exchanges in place and restores cfg before returning.
double defect_unchecked(const MeasureSpec& m, const SystemParams& params, int x, Configuration& cfg) {
  const double rate = detail::bulk_rate(cfg, params, x);
  const Configuration& before = cfg;
  double log_ratio = 0.0;
  const int hi = std::min(x + 2, m.n() - 1);
  for (int y = x; y <= hi; ++y) log_ratio -= m.log_factor(y, before[y - 1], before[y]);
  cfg.swap_sites(x, x + 1);
  for (int y = x; y <= hi; ++y) log_ratio += m.log_factor(y, cfg[y - 1], cfg[y]);
  const double back = detail::bulk_rate(cfg, params, x);
  cfg.swap_sites(x, x + 1);
  return std::abs(1.0 - back / rate * std::exp(log_ratio));
}

}  // namespace

double quasi_reversibility_defect(const MeasureSpec& reference, int x, const Configuration& cfg) {
  const SystemParams params = reference_params(reference);
  if (cfg.n() != reference.n()) throw std::invalid_argument("quasi_reversibility_defect: size mismatch");
  if (!is_ergodic(cfg)) throw std::invalid_argument("quasi_reversibility_defect: cfg not ergodic");
  const double rate = bulk_rate(cfg, params, x);
  if (!(rate > 0.0)) throw std::invalid_argument("quasi_reversibility_defect: c_{x,x+1}(cfg) = 0");
  Configuration swapped = cfg;
  swapped.swap_sites(x, x + 1);
  const double back = bulk_rate(swapped, params, x);
  const double ratio = std::exp(reference.log_prob(swapped) - reference.log_prob(cfg));
  return std::abs(1.0 - back / rate * ratio);
}

DefectScan scan_quasi_reversibility(const MeasureSpec& reference) {
  const SystemParams params = reference_params(reference);
  const int n = reference.n();
  DefectScan scan;
  Configuration cfg(n);
  // Depth-first over ergodic words; each complete word is scanned in place.
  auto visit = [&](auto&& self, int site, bool prev_empty) -> void {
    if (site == n) {
      for (int x = 1; x <= n - 2; ++x) {
        if (cfg[x] == cfg[x + 1]) continue;
        if (!(detail::bulk_rate(cfg, params, x) > 0.0)) continue;
        const double d = defect_unchecked(reference, params, x, cfg);
        ++scan.pairs;
        if (d > scan.max_defect) {
          scan.max_defect = d;
          scan.argmax_edge = x;
          scan.argmax_cfg = cfg.to_string();
        }
      }
      return;
    }
    if (!prev_empty) {
      cfg.set(site, false);
      self(self, site + 1, true);
    }
    cfg.set(site, true);
    self(self, site + 1, false);
    cfg.set(site, false);
  };
  visit(visit, 1, false);
  return scan;
}

double quasi_reversibility_defect(double alpha, double beta, int n, int x, const Configuration& cfg) {
  if (cfg.n() != n) throw std::invalid_argument("quasi_reversibility_defect: size mismatch");
  return quasi_reversibility_defect(MeasureSpec::reference(alpha, beta, n), x, cfg);
}

namespace {

CovarianceEstimate estimate_from_counts(int x, int y, const std::size_t (&counts)[2][2], std::size_t n_samples) {
  const auto n = static_cast<double>(n_samples);
  double p[2][2];
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) p[i][j] = static_cast<double>(counts[i][j]) / n;
  }
  const double mx = p[1][0] + p[1][1];
  const double my = p[0][1] + p[1][1];
  const double cov = p[1][1] - mx * my;
  // Influence function (X - mx)(Y - my) - cov.
  double second = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double d = (i - mx) * (j - my);
      second += p[i][j] * d * d;
    }
  }
  const double var = std::max(second - cov * cov, 0.0);
  return {x, y, cov, std::sqrt(var / n), n_samples};
}

}  // namespace

CovarianceEstimate covariance_decay(const MeasureSpec& spec, int x, int y, std::size_t n_samples,
                                    RngStream& rng) {
  auto all = covariance_profile(spec, x, y - x, n_samples, rng);
  return all.back();
}

std::vector<CovarianceEstimate> covariance_profile(const MeasureSpec& spec, int x, int max_distance,
                                                   std::size_t n_samples, RngStream& rng) {
  if (max_distance < 0) throw std::invalid_argument("covariance_decay: need x <= y");
  const int y_max = x + max_distance;
  if (x < 1 || y_max > spec.n() - 1) throw std::out_of_range("covariance_decay: sites outside the bulk");
  if (n_samples < 2) throw std::invalid_argument("covariance_decay: need at least two samples");
  // Joint counts of (eta_x, eta_{x+d}) for every d.
  std::vector<std::array<std::array<std::size_t, 2>, 2>> counts(static_cast<std::size_t>(max_distance + 1));
  for (auto& c : counts) c = {{{0, 0}, {0, 0}}};
  for (std::size_t s = 0; s < n_samples; ++s) {
    const auto eta = sample_prefix(spec, rng, y_max);
    const int ex = eta[static_cast<std::size_t>(x - 1)];
    for (int d = 0; d <= max_distance; ++d) {
      ++counts[static_cast<std::size_t>(d)][ex][static_cast<int>(eta[static_cast<std::size_t>(x + d - 1)])];
    }
  }
  std::vector<CovarianceEstimate> out;
  for (int d = 0; d <= max_distance; ++d) {
    const auto& c = counts[static_cast<std::size_t>(d)];
    const std::size_t raw[2][2] = {{c[0][0], c[0][1]}, {c[1][0], c[1][1]}};
    out.push_back(estimate_from_counts(x, x + d, raw, n_samples));
  }
  return out;
}

DecayFit fit_exponential_decay(const std::vector<CovarianceEstimate>& estimates, double min_snr) {
  DecayFit fit;
  std::vector<double> xs;
  std::vector<double> ys;
  for (const auto& e : estimates) {
    if (std::abs(e.value) > min_snr * e.std_error && e.value != 0.0) {
      xs.push_back(static_cast<double>(e.y - e.x));
      ys.push_back(std::log(std::abs(e.value)));
      fit.distances.push_back(e.y - e.x);
    }
  }
  const std::size_t m = xs.size();
  if (m < 2) return fit;
  double mx = 0.0;
  double my = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= static_cast<double>(m);
  my /= static_cast<double>(m);
  double sxx = 0.0;
  double sxy = 0.0;
  double syy = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  if (sxx == 0.0) return fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace fep
