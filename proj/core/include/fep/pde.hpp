#pragma once

#include <functional>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fep/params.hpp"

namespace fep {

/// Fixed boundary densities.
struct Dirichlet {
  double rho_minus;
  double rho_plus;
};

/// d_u a(rho)(0) = kappa (a(rho(0)) - alpha), d_u a(rho)(1) = kappa (beta - a(rho(1))).
struct Robin {
  double kappa;
  double alpha;
  double beta;
};

/// Zero flux at both ends.
struct Neumann {};

using BoundaryCondition = std::variant<Dirichlet, Robin, Neumann>;

enum class Regime { Dirichlet, Robin, Neumann };

/// theta < 1, theta == 1, theta > 1.
Regime regime_for(double theta) noexcept;
std::string to_string(Regime regime);

/// Boundary condition of the limit equation for these model constants.
BoundaryCondition boundary_condition_for(const SystemParams& params);

/// Raised when a node leaves [1/2 - 1e-9, 1 + 1e-9].
class PdeInstability : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Node values rho_i at u_i = i / M, i = 0 ... M.
struct DensityGrid {
  std::vector<double> rho;
  double time = 0.0;
  BoundaryCondition bc = Neumann{};

  [[nodiscard]] int cells() const noexcept { return static_cast<int>(rho.size()) - 1; }
  [[nodiscard]] double du() const noexcept { return 1.0 / cells(); }
  [[nodiscard]] double u(int i) const noexcept { return static_cast<double>(i) / cells(); }

  /// Linear interpolation at u in [0, 1].
  [[nodiscard]] double at(double u) const;
  /// a(rho) node by node.
  [[nodiscard]] std::vector<double> active() const;
};

/// Samples `initial` on M + 1 nodes. Dirichlet grids have their end nodes
/// set to the boundary values. Validates the data and the boundary condition.
DensityGrid make_grid(const std::function<double(double)>& initial, const BoundaryCondition& bc, int m);

/// Largest dt for which one step is monotone: du^2 / 8, and
/// du^2 / (8 (1 + kappa du)) for Robin because of the ghost node.
double max_stable_dt(const DensityGrid& grid);

/// Step size used by solve: the bound above with 8 replaced by 10.
double default_dt(const DensityGrid& grid);

/// One forward Euler step of d_t rho = d_u^2 a(rho) on the node values.
/// Throws std::invalid_argument when dt exceeds max_stable_dt and
/// PdeInstability when a node escapes the admissible range.
DensityGrid step_explicit(const DensityGrid& grid, double dt);
void step_in_place(DensityGrid& grid, double dt, std::vector<double>& scratch);

/// Integrates to t_end with dt = default_dt; the last step is shortened
/// to land on t_end exactly.
DensityGrid solve(const std::function<double(double)>& initial, const BoundaryCondition& bc, double t_end,
                  int m);
DensityGrid solve(DensityGrid grid, double t_end);

/// Trapezoid-rule mass of the grid.
double trapezoid_mass(const DensityGrid& grid);

/// Inflow through each end such that one step changes the trapezoid mass
/// by exactly dt * (left + right), up to rounding.
struct BoundaryInflow {
  double left;
  double right;
};
BoundaryInflow boundary_inflow(const DensityGrid& grid);

/// Stationary profile rho^ss(u) of the given regime.
double stationary_closed_form(Regime regime, double alpha, double beta, double kappa, double u);

struct RefinementReport {
  std::vector<int> cells;
  /// L1 distance between the solutions on cells[k] and cells[k+1], both
  /// interpolated to the finest grid.
  std::vector<double> distances;
  /// log(d_k / d_{k+1}) / log(M_{k+1} / M_k); empty with fewer than three grids.
  std::vector<double> orders;
  /// Some order below 0.8 while the distances are above rounding level.
  bool suspect = false;
};

RefinementReport refinement_check(const std::function<double(double)>& initial, const BoundaryCondition& bc,
                                  double t_end, const std::vector<int>& cells);

/// Writes columns u, rho, a_of_rho.
void write_grid_csv(std::ostream& out, const DensityGrid& grid);
void write_grid_csv(const std::string& path, const DensityGrid& grid);

}  // namespace fep
