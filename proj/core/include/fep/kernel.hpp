#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fep/configuration.hpp"
#include "fep/params.hpp"

namespace fep {

/// A transition of the chain: a nearest-neighbour exchange over the edge
/// {edge, edge+1}, or a reservoir flip of site 1 / site N-1.
struct Move {
  enum class Kind : std::uint8_t { Swap, FlipLeft, FlipRight };

  Kind kind = Kind::Swap;
  int edge = 0;  // meaningful for Swap only

  static constexpr Move swap(int x) { return {Kind::Swap, x}; }
  static constexpr Move flip_left() { return {Kind::FlipLeft, 0}; }
  static constexpr Move flip_right() { return {Kind::FlipRight, 0}; }

  [[nodiscard]] std::string to_string() const;

  friend constexpr bool operator==(const Move&, const Move&) = default;
};

namespace detail {

// eta_y with the reservoir convention eta_0 = alpha, eta_N = beta.
inline double occupation(const Configuration& cfg, const SystemParams& p, int y) noexcept {
  if (y <= 0) return p.alpha;
  if (y >= cfg.n()) return p.beta;
  return cfg[y] ? 1.0 : 0.0;
}

inline double bulk_rate(const Configuration& cfg, const SystemParams& p, int x) noexcept {
  const double left = occupation(cfg, p, x - 1);
  const double here = cfg[x] ? 1.0 : 0.0;
  const double next = cfg[x + 1] ? 1.0 : 0.0;
  const double right = occupation(cfg, p, x + 2);
  return left * here * (1.0 - next) + (1.0 - here) * next * right;
}

inline double boundary_rate_left(const Configuration& cfg, const SystemParams& p) noexcept {
  const double e1 = cfg[1] ? 1.0 : 0.0;
  const double e2 = cfg[2] ? 1.0 : 0.0;
  return p.alpha * (1.0 - e1) + (1.0 - p.alpha) * e1 * e2;
}

inline double boundary_rate_right(const Configuration& cfg, const SystemParams& p) noexcept {
  const int last = cfg.n() - 1;
  const double e1 = cfg[last] ? 1.0 : 0.0;
  const double e2 = cfg[last - 1] ? 1.0 : 0.0;
  return p.beta * (1.0 - e1) + (1.0 - p.beta) * e1 * e2;
}

inline double active_indicator(const Configuration& cfg, const SystemParams& p, int x) noexcept {
  if (x == 0) return p.alpha;
  if (x == cfg.n()) return p.beta;
  const double l = occupation(cfg, p, x - 1);
  const double c = cfg[x] ? 1.0 : 0.0;
  const double r = occupation(cfg, p, x + 1);
  return l * c + c * r - l * c * r;
}

}  // namespace detail

/// Jump rate c_{x,x+1} over the bulk edge {x, x+1}, 1 <= x <= N-2.
double bulk_rate(const Configuration& cfg, const SystemParams& params, int x);

/// Reservoir rates b_l and b_r, not yet multiplied by kappa N^-theta.
double boundary_rate_left(const Configuration& cfg, const SystemParams& params);
double boundary_rate_right(const Configuration& cfg, const SystemParams& params);

/// h_x for 0 <= x <= N, with h_0 = alpha and h_N = beta.
double active_indicator(const Configuration& cfg, const SystemParams& params, int x);

/// Current j_{x,x+1} for 0 <= x <= N-1. The edges touching a reservoir
/// carry the kappa N^-theta factor.
double instantaneous_current(const Configuration& cfg, const SystemParams& params, int x);

/// No two adjacent empty sites in the bulk.
bool is_ergodic(const Configuration& cfg) noexcept;

/// Rate of `move` from `cfg` under the unaccelerated generator L_N
/// (flips include kappa N^-theta, nothing includes N^2).
double move_rate(const Configuration& cfg, const SystemParams& params, const Move& move);

/// Applies a move in place. Throws std::out_of_range for a bad edge.
void apply_move_in_place(Configuration& cfg, const Move& move);

/// Returns the configuration after `move`; `cfg` is unchanged.
Configuration apply_move(const Configuration& cfg, const Move& move);

/// Active density (2 rho - 1) / rho on [1/2, 1].
double active_density(double rho);

/// Inverse of active_density: 1 / (2 - a) on [0, 1].
double rho_bar(double a);

}  // namespace fep
