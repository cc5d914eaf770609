#include "fep/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace fep {

SimulationState::SimulationState(Configuration cfg, SystemParams params, double time)
    : cfg_(std::move(cfg)), params_(params), speed_(params.boundary_speed()),
      scale_(params.time_scale()),
      time_(time) {
  if (cfg_.n() != params_.n) throw std::invalid_argument("SimulationState: N mismatch");
  if (params_.n < 4) throw std::invalid_argument("SimulationState: N must be at least 4");
  if (!(params_.alpha >= 0.0 && params_.alpha <= 1.0 && params_.beta >= 0.0 && params_.beta <= 1.0)) {
    throw std::invalid_argument("SimulationState: reservoir densities must lie in [0,1]");
  }
  if (!(speed_ >= 0.0) || !std::isfinite(speed_)) {
    throw std::invalid_argument("SimulationState: boundary speed must be finite");
  }
  rates_ = FenwickTree(static_cast<std::size_t>(params_.n));
  for (std::size_t s = 0; s < rates_.size(); ++s) refresh_slot(s);
}

// Slots 0 ... N-3 are edges 1 ... N-2; N-2 is the left reservoir, N-1 the right.
std::size_t SimulationState::slot(const Move& move) const {
  switch (move.kind) {
    case Move::Kind::Swap:
      return static_cast<std::size_t>(move.edge - 1);
    case Move::Kind::FlipLeft:
      return static_cast<std::size_t>(params_.n - 2);
    case Move::Kind::FlipRight:
      return static_cast<std::size_t>(params_.n - 1);
  }
  return 0;
}

Move SimulationState::move_at(std::size_t s) const {
  const auto n = static_cast<std::size_t>(params_.n);
  if (s == n - 2) return Move::flip_left();
  if (s == n - 1) return Move::flip_right();
  return Move::swap(static_cast<int>(s) + 1);
}

void SimulationState::refresh_slot(std::size_t s) {
  const auto n = static_cast<std::size_t>(params_.n);
  double r = 0.0;
  if (s == n - 2) {
    r = speed_ * detail::boundary_rate_left(cfg_, params_);
  } else if (s == n - 1) {
    r = speed_ * detail::boundary_rate_right(cfg_, params_);
  } else {
    r = detail::bulk_rate(cfg_, params_, static_cast<int>(s) + 1);
  }
  rates_.set(s, r);
}

void SimulationState::refresh_edges(int lo, int hi) {
  lo = std::max(lo, 1);
  hi = std::min(hi, params_.n - 2);
  for (int e = lo; e <= hi; ++e) refresh_slot(static_cast<std::size_t>(e - 1));
}

double SimulationState::rate(const Move& move) const {
  if (move.kind == Move::Kind::Swap && (move.edge < 1 || move.edge > params_.n - 2)) {
    throw std::out_of_range("rate: edge out of range");
  }
  return scale_ * rates_.value(slot(move));
}

void SimulationState::rebuild_rates() {
  const double incremental = rates_.total();
  for (std::size_t s = 0; s < rates_.size(); ++s) refresh_slot(s);
  rates_.rebuild();
  const double exact = rates_.total();
  const double scale = std::max(std::abs(exact), 1.0);
  if (std::abs(incremental - exact) > 1e-9 * scale) {
    throw std::logic_error("rate index drifted: incremental total " + std::to_string(incremental) +
                           " vs rebuilt " + std::to_string(exact));
  }
}

void SimulationState::advance_to(double t) {
  if (t < time_) throw std::invalid_argument("advance_to: time cannot go backwards");
  time_ = t;
}

void SimulationState::apply(const Move& m) {
  const int last = params_.n - 1;
  int lo = 0;
  int hi = 0;
  switch (m.kind) {
    case Move::Kind::Swap:
      if (m.edge < 1 || m.edge > last - 1) throw std::out_of_range("apply: edge out of range");
      lo = m.edge;
      hi = m.edge + 1;
      if (cfg_[lo] != cfg_[hi]) {
        cfg_.toggle(lo);
        cfg_.toggle(hi);
      }
      break;
    case Move::Kind::FlipLeft:
      lo = hi = 1;
      cfg_.toggle(1);
      break;
    case Move::Kind::FlipRight:
      lo = hi = last;
      cfg_.toggle(last);
      break;
  }
  // Edge e reads sites e-1 ... e+2.
  refresh_edges(lo - 2, hi + 1);
  if (lo <= 2) refresh_slot(static_cast<std::size_t>(params_.n - 2));
  if (hi >= last - 1) refresh_slot(static_cast<std::size_t>(params_.n - 1));
  ++events_;
  if (events_ % kRebuildInterval == 0) rebuild_rates();
}

std::optional<StepResult> step(SimulationState& state, RngStream& rng) {
  const double total = state.total_rate();
  if (!(total > 0.0)) return std::nullopt;
  const double dt = rng.exponential(total);
  const double target = rng.uniform() * (total / state.params().time_scale());
  state.advance_to(state.time() + dt);
  const Move m = state.select(target);
  state.apply(m);
  return StepResult{m, dt};
}

void run_until(SimulationState& state, double t_end, std::span<Observer> observers, RngStream& rng,
               const MoveHook& hook) {
  if (t_end < state.time()) throw std::invalid_argument("run_until: t_end precedes current time");

  struct Pending {
    double t;
    std::size_t observer;
  };
  std::vector<Pending> pending;
  for (std::size_t i = 0; i < observers.size(); ++i) {
    for (double t : observers[i].times) {
      if (t >= state.time() && t <= t_end) pending.push_back({t, i});
    }
  }
  std::stable_sort(pending.begin(), pending.end(),
                   [](const Pending& a, const Pending& b) { return a.t < b.t; });
  std::size_t next = 0;

  auto fire_until = [&](double limit, bool inclusive) {
    while (next < pending.size() && (pending[next].t < limit || (inclusive && pending[next].t == limit))) {
      const auto& p = pending[next];
      if (observers[p.observer].callback) observers[p.observer].callback(state, p.t);
      ++next;
    }
  };

  const double scale = state.params().time_scale();
  for (;;) {
    const double total = state.total_rate();
    const double t_event = total > 0.0 ? state.time() + rng.exponential(total)
                                       : std::numeric_limits<double>::infinity();
    if (t_event > t_end) {
      fire_until(t_end, true);
      state.advance_to(t_end);
      return;
    }
    fire_until(t_event, false);
    const double target = rng.uniform() * (total / scale);
    state.advance_to(t_event);
    const Move m = state.select(target);
    if (hook) hook(state, m, t_event);
    state.apply(m);
  }
}

}  // namespace fep
