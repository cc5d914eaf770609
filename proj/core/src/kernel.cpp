#include "fep/kernel.hpp"

#include <stdexcept>
#include <string>

namespace fep {

namespace {

constexpr double kDomainTolerance = 1e-12;

void check_edge(const Configuration& cfg, int x) {
  if (x < 1 || x > cfg.n() - 2) {
    throw std::out_of_range("edge " + std::to_string(x) + " outside {1,...," +
                            std::to_string(cfg.n() - 2) + "}");
  }
}

void check_params(const Configuration& cfg, const SystemParams& params) {
  if (cfg.n() != params.n) throw std::invalid_argument("configuration and parameters disagree on N");
}

}  // namespace

std::string Move::to_string() const {
  switch (kind) {
    case Kind::Swap:
      return "Swap(" + std::to_string(edge) + ")";
    case Kind::FlipLeft:
      return "FlipLeft";
    case Kind::FlipRight:
      return "FlipRight";
  }
  return "?";
}

double bulk_rate(const Configuration& cfg, const SystemParams& params, int x) {
  check_params(cfg, params);
  check_edge(cfg, x);
  return detail::bulk_rate(cfg, params, x);
}

double boundary_rate_left(const Configuration& cfg, const SystemParams& params) {
  check_params(cfg, params);
  return detail::boundary_rate_left(cfg, params);
}

double boundary_rate_right(const Configuration& cfg, const SystemParams& params) {
  check_params(cfg, params);
  return detail::boundary_rate_right(cfg, params);
}

double active_indicator(const Configuration& cfg, const SystemParams& params, int x) {
  check_params(cfg, params);
  if (x < 0 || x > cfg.n()) {
    throw std::out_of_range("active_indicator: x = " + std::to_string(x) + " outside {0,...,N}");
  }
  return detail::active_indicator(cfg, params, x);
}

double instantaneous_current(const Configuration& cfg, const SystemParams& params, int x) {
  check_params(cfg, params);
  const int n = cfg.n();
  if (x < 0 || x > n - 1) {
    throw std::out_of_range("instantaneous_current: x = " + std::to_string(x) +
                            " outside {0,...,N-1}");
  }
  if (x == 0 || x == n - 1) {
    return params.boundary_speed() * (detail::active_indicator(cfg, params, x) -
                                      detail::active_indicator(cfg, params, x + 1));
  }
  const double here = cfg[x] ? 1.0 : 0.0;
  const double next = cfg[x + 1] ? 1.0 : 0.0;
  return detail::bulk_rate(cfg, params, x) * (here - next);
}

bool is_ergodic(const Configuration& cfg) noexcept {
  for (int x = 1; x + 1 < cfg.n(); ++x) {
    if (!cfg[x] && !cfg[x + 1]) return false;
  }
  return true;
}

double move_rate(const Configuration& cfg, const SystemParams& params, const Move& move) {
  switch (move.kind) {
    case Move::Kind::Swap:
      return bulk_rate(cfg, params, move.edge);
    case Move::Kind::FlipLeft:
      return params.boundary_speed() * boundary_rate_left(cfg, params);
    case Move::Kind::FlipRight:
      return params.boundary_speed() * boundary_rate_right(cfg, params);
  }
  return 0.0;
}

void apply_move_in_place(Configuration& cfg, const Move& move) {
  switch (move.kind) {
    case Move::Kind::Swap:
      check_edge(cfg, move.edge);
      cfg.swap_sites(move.edge, move.edge + 1);
      break;
    case Move::Kind::FlipLeft:
      cfg.flip(1);
      break;
    case Move::Kind::FlipRight:
      cfg.flip(cfg.n() - 1);
      break;
  }
}

Configuration apply_move(const Configuration& cfg, const Move& move) {
  Configuration out = cfg;
  apply_move_in_place(out, move);
  return out;
}

double active_density(double rho) {
  if (!(rho >= 0.5 - kDomainTolerance && rho <= 1.0 + kDomainTolerance)) {
    throw std::domain_error("active_density: rho = " + std::to_string(rho) +
                            " outside [1/2, 1]");
  }
  return (2.0 * rho - 1.0) / rho;
}

double rho_bar(double a) {
  if (!(a >= -kDomainTolerance && a <= 1.0 + kDomainTolerance)) {
    throw std::domain_error("rho_bar: a = " + std::to_string(a) + " outside [0, 1]");
  }
  return 1.0 / (2.0 - a);
}

}  // namespace fep
