#include "fep/observables.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <stdexcept>

#include "fep/kernel.hpp"

namespace fep {

double pair_with_test_function(const Configuration& cfg, const std::function<double(double)>& g) {
  const int n = cfg.n();
  double sum = 0.0;
  for (int x = 1; x < n; ++x) {
    if (cfg[x]) sum += g(static_cast<double>(x) / n);
  }
  return sum / n;
}

Window block_window(int n, int x, int ell) {
  if (x < 1 || x > n - 1) throw std::out_of_range("block_window: site out of range");
  if (ell < 0) throw std::invalid_argument("block_window: negative half-width");
  if (2 * ell + 1 >= n - 1) return {1, n - 1};
  if (x <= ell) return {1, 2 * ell + 1};
  if (x >= n - ell) return {n - 2 * ell - 1, n - 1};
  return {x - ell, x + ell};
}

double block_density(const Configuration& cfg, int x, BlockSpec spec) {
  if (spec.half_width < 1) throw std::invalid_argument("block_density: half-width must be >= 1");
  const Window w = block_window(cfg.n(), x, spec.half_width);
  int count = 0;
  for (int y = w.lo; y <= w.hi; ++y) count += cfg[y] ? 1 : 0;
  return static_cast<double>(count) / w.size();
}

double block_active(const Configuration& cfg, const SystemParams& params, int x, BlockSpec spec) {
  if (spec.half_width < 1) throw std::invalid_argument("block_active: half-width must be >= 1");
  const Window w = block_window(cfg.n(), x, spec.half_width - 1);
  double sum = 0.0;
  for (int y = w.lo; y <= w.hi; ++y) sum += detail::active_indicator(cfg, params, y);
  return sum / w.size();
}

double block_average(std::span<const double> field, int n, int x, int ell) {
  if (field.size() != static_cast<std::size_t>(n - 1)) throw std::invalid_argument("block_average: size mismatch");
  const Window w = block_window(n, x, ell);
  double sum = 0.0;
  for (int y = w.lo; y <= w.hi; ++y) sum += field[static_cast<std::size_t>(y - 1)];
  return sum / w.size();
}

Profile::Profile(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("Profile: N must be at least 2");
  mean_.assign(static_cast<std::size_t>(n - 1), 0.0);
  m2_.assign(static_cast<std::size_t>(n - 1), 0.0);
}

double Profile::effective_samples() const noexcept {
  return weight_sq_ > 0.0 ? weight_ * weight_ / weight_sq_ : 0.0;
}

double Profile::variance(std::size_t i) const {
  const double n_eff = effective_samples();
  if (n_eff <= 1.0 + 1e-12) return 0.0;
  return std::max(m2_.at(i), 0.0) / weight_ * n_eff / (n_eff - 1.0);
}

double Profile::std_error(std::size_t i) const {
  const double n_eff = effective_samples();
  if (n_eff <= 1.0 + 1e-12) return 0.0;
  return std::sqrt(variance(i) / n_eff);
}

void Profile::add(std::span<const double> values, double weight) {
  if (values.size() != mean_.size()) throw std::invalid_argument("Profile::add: size mismatch");
  if (!(weight > 0.0) || !std::isfinite(weight)) throw std::invalid_argument("Profile::add: weight must be positive");
  const double total = weight_ + weight;
  const double ratio = weight / total;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double delta = values[i] - mean_[i];
    mean_[i] += delta * ratio;
    m2_[i] += weight * delta * (values[i] - mean_[i]);
  }
  weight_ = total;
  weight_sq_ += weight * weight;
  ++samples_;
}

void Profile::merge(const Profile& other) {
  if (other.samples_ == 0) return;
  if (samples_ == 0) {
    *this = other;
    return;
  }
  if (other.mean_.size() != mean_.size()) throw std::invalid_argument("Profile::merge: size mismatch");
  const double total = weight_ + other.weight_;
  for (std::size_t i = 0; i < mean_.size(); ++i) {
    const double delta = other.mean_[i] - mean_[i];
    mean_[i] = (weight_ * mean_[i] + other.weight_ * other.mean_[i]) / total;
    m2_[i] += other.m2_[i] + delta * delta * weight_ * other.weight_ / total;
  }
  weight_ = total;
  weight_sq_ += other.weight_sq_;
  samples_ += other.samples_;
}

void accumulate(Profile& profile, const Configuration& cfg, double weight) {
  if (cfg.n() != profile.n()) throw std::invalid_argument("accumulate: N mismatch");
  std::vector<double> values(static_cast<std::size_t>(cfg.n() - 1));
  for (int x = 1; x < cfg.n(); ++x) values[static_cast<std::size_t>(x - 1)] = cfg[x] ? 1.0 : 0.0;
  profile.add(values, weight);
}

TimeIntegrator::TimeIntegrator(const SimulationState& state)
    : n_(state.params().n),
      start_(state.time()),
      last_(static_cast<std::size_t>(n_ - 1), state.time()),
      eta_sum_(static_cast<std::size_t>(n_ - 1), 0.0),
      h_sum_(static_cast<std::size_t>(n_ - 1), 0.0) {}

void TimeIntegrator::flush(const SimulationState& state, int x, double t) {
  const auto i = static_cast<std::size_t>(x - 1);
  const double dt = t - last_[i];
  if (dt <= 0.0) return;
  const Configuration& cfg = state.configuration();
  if (cfg[x]) eta_sum_[i] += dt;
  h_sum_[i] += dt * detail::active_indicator(cfg, state.params(), x);
  last_[i] = t;
}

void TimeIntegrator::on_move(const SimulationState& state, const Move& move, double t) {
  int lo = 1;
  int hi = 1;
  switch (move.kind) {
    case Move::Kind::Swap:
      lo = move.edge;
      hi = move.edge + 1;
      break;
    case Move::Kind::FlipLeft:
      lo = hi = 1;
      break;
    case Move::Kind::FlipRight:
      lo = hi = n_ - 1;
      break;
  }
  lo = std::max(lo - 1, 1);
  hi = std::min(hi + 1, n_ - 1);
  for (int x = lo; x <= hi; ++x) flush(state, x, t);
}

MoveHook TimeIntegrator::hook() {
  return [this](const SimulationState& s, const Move& m, double t) { on_move(s, m, t); };
}

TimeIntegrator::Averages TimeIntegrator::close(const SimulationState& state, double t) {
  const double duration = t - start_;
  if (!(duration > 0.0)) throw std::invalid_argument("TimeIntegrator::close: empty window");
  for (int x = 1; x < n_; ++x) flush(state, x, t);
  Averages out;
  out.duration = duration;
  out.density.resize(eta_sum_.size());
  out.active.resize(h_sum_.size());
  for (std::size_t i = 0; i < eta_sum_.size(); ++i) {
    out.density[i] = eta_sum_[i] / duration;
    out.active[i] = h_sum_[i] / duration;
  }
  std::fill(eta_sum_.begin(), eta_sum_.end(), 0.0);
  std::fill(h_sum_.begin(), h_sum_.end(), 0.0);
  std::fill(last_.begin(), last_.end(), t);
  start_ = t;
  return out;
}

void write_profile_csv(std::ostream& out, const Profile& profile) {
  out << "x,x_over_N,mean,stderr,weight\n";
  char line[160];
  for (std::size_t i = 0; i < profile.size(); ++i) {
    const int x = static_cast<int>(i) + 1;
    std::snprintf(line, sizeof line, "%d,%.10g,%.10g,%.10g,%.10g\n", x,
                  static_cast<double>(x) / profile.n(), profile.mean(i), profile.std_error(i),
                  profile.total_weight());
    out << line;
  }
}

void write_profile_csv(const std::string& path, const Profile& profile) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot open " + path);
  write_profile_csv(file, profile);
}

}  // namespace fep
