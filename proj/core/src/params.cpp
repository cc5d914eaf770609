#include "fep/params.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace fep {

double SystemParams::boundary_speed() const {
  return kappa * std::pow(static_cast<double>(n), -theta);
}

double SystemParams::time_scale() const {
  const auto nn = static_cast<double>(n);
  return nn * nn;
}

void SystemParams::validate() const {
  if (n < 4) throw std::invalid_argument("N must be at least 4, got " + std::to_string(n));
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (!(beta > 0.0 && beta < 1.0)) throw std::invalid_argument("beta must lie in (0,1)");
  if (!(kappa > 0.0)) throw std::invalid_argument("kappa must be positive");
  if (!std::isfinite(theta)) throw std::invalid_argument("theta must be finite");
  const double speed = boundary_speed();
  if (!std::isfinite(speed) || !(speed > 0.0)) {
    throw std::invalid_argument("boundary speed kappa*N^-theta is not finite and positive");
  }
}

SystemParams make_params(int n, double alpha, double beta, double theta, double kappa) {
  SystemParams p{n, alpha, beta, theta, kappa};
  p.validate();
  return p;
}

}  // namespace fep
