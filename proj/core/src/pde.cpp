#include "fep/pde.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "fep/kernel.hpp"

namespace fep {

namespace {

constexpr double kRangeSlack = 1e-9;

// Unchecked a(rho); the solver tolerates tiny excursions past 1/2 and 1.
inline double active_of(double rho) { return (2.0 * rho - 1.0) / rho; }

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void validate_bc(const BoundaryCondition& bc) {
  std::visit(Overloaded{[](const Dirichlet& d) {
                          auto ok = [](double r) { return r > 0.5 && r <= 1.0; };
                          if (!ok(d.rho_minus) || !ok(d.rho_plus)) {
                            throw std::invalid_argument("Dirichlet values must lie in (1/2, 1]");
                          }
                        },
                        [](const Robin& r) {
                          if (!(r.kappa > 0.0)) throw std::invalid_argument("Robin kappa must be positive");
                          if (!(r.alpha >= 0.0 && r.alpha <= 1.0 && r.beta >= 0.0 && r.beta <= 1.0)) {
                            throw std::invalid_argument("Robin alpha, beta must lie in [0, 1]");
                          }
                        },
                        [](const Neumann&) {}},
             bc);
}

double kappa_of(const BoundaryCondition& bc) {
  if (const auto* r = std::get_if<Robin>(&bc)) return r->kappa;
  return 0.0;
}

}  // namespace

Regime regime_for(double theta) noexcept {
  if (theta < 1.0) return Regime::Dirichlet;
  if (theta == 1.0) return Regime::Robin;
  return Regime::Neumann;
}

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::Dirichlet:
      return "dirichlet";
    case Regime::Robin:
      return "robin";
    case Regime::Neumann:
      return "neumann";
  }
  return "?";
}

BoundaryCondition boundary_condition_for(const SystemParams& p) {
  switch (regime_for(p.theta)) {
    case Regime::Dirichlet:
      return Dirichlet{rho_bar(p.alpha), rho_bar(p.beta)};
    case Regime::Robin:
      return Robin{p.kappa, p.alpha, p.beta};
    case Regime::Neumann:
      return Neumann{};
  }
  return Neumann{};
}

double DensityGrid::at(double u) const {
  if (u < 0.0 || u > 1.0) throw std::out_of_range("DensityGrid::at: u outside [0, 1]");
  const int m = cells();
  const double s = u * m;
  const int i = std::min(static_cast<int>(s), m - 1);
  const double w = s - i;
  return (1.0 - w) * rho[static_cast<std::size_t>(i)] + w * rho[static_cast<std::size_t>(i + 1)];
}

std::vector<double> DensityGrid::active() const {
  std::vector<double> out(rho.size());
  std::transform(rho.begin(), rho.end(), out.begin(), active_of);
  return out;
}

DensityGrid make_grid(const std::function<double(double)>& initial, const BoundaryCondition& bc, int m) {
  if (m < 2) throw std::invalid_argument("make_grid: need at least 2 cells");
  validate_bc(bc);
  DensityGrid grid;
  grid.bc = bc;
  grid.rho.resize(static_cast<std::size_t>(m + 1));
  for (int i = 0; i <= m; ++i) {
    const double v = initial(static_cast<double>(i) / m);
    if (!(v > 0.5 && v <= 1.0)) {
      throw std::invalid_argument("make_grid: initial profile must take values in (1/2, 1]");
    }
    grid.rho[static_cast<std::size_t>(i)] = v;
  }
  if (const auto* d = std::get_if<Dirichlet>(&bc)) {
    grid.rho.front() = d->rho_minus;
    grid.rho.back() = d->rho_plus;
  }
  return grid;
}

double max_stable_dt(const DensityGrid& grid) {
  const double du = grid.du();
  return du * du / (8.0 * (1.0 + kappa_of(grid.bc) * du));
}

double default_dt(const DensityGrid& grid) {
  const double du = grid.du();
  return du * du / (10.0 * (1.0 + kappa_of(grid.bc) * du));
}

void step_in_place(DensityGrid& grid, double dt, std::vector<double>& a) {
  if (!(dt > 0.0)) throw std::invalid_argument("step_explicit: dt must be positive");
  if (dt > max_stable_dt(grid) * (1.0 + 1e-12)) {
    throw std::invalid_argument("step_explicit: dt exceeds the stability bound");
  }
  const int m = grid.cells();
  const double du = grid.du();
  const double lambda = dt / (du * du);
  auto& rho = grid.rho;
  a.resize(rho.size());
  for (std::size_t i = 0; i < rho.size(); ++i) a[i] = active_of(rho[i]);

  for (int i = 1; i < m; ++i) {
    const auto k = static_cast<std::size_t>(i);
    rho[k] += lambda * (a[k + 1] - 2.0 * a[k] + a[k - 1]);
  }
  const auto last = static_cast<std::size_t>(m);
  std::visit(Overloaded{[](const Dirichlet&) {},
                        [&](const Robin& r) {
                          rho[0] += lambda * (2.0 * a[1] - 2.0 * a[0] - 2.0 * du * r.kappa * (a[0] - r.alpha));
                          rho[last] += lambda * (2.0 * a[last - 1] - 2.0 * a[last] +
                                                 2.0 * du * r.kappa * (r.beta - a[last]));
                        },
                        [&](const Neumann&) {
                          rho[0] += lambda * (2.0 * a[1] - 2.0 * a[0]);
                          rho[last] += lambda * (2.0 * a[last - 1] - 2.0 * a[last]);
                        }},
             grid.bc);
  grid.time += dt;
  for (std::size_t i = 0; i < rho.size(); ++i) {
    if (!(rho[i] >= 0.5 - kRangeSlack && rho[i] <= 1.0 + kRangeSlack)) {
      char msg[160];
      std::snprintf(msg, sizeof msg, "step_explicit: node %zu left [1/2, 1] (rho = %.12g, t = %.6g)", i, rho[i],
                    grid.time);
      throw PdeInstability(msg);
    }
  }
}

DensityGrid step_explicit(const DensityGrid& grid, double dt) {
  DensityGrid next = grid;
  std::vector<double> scratch;
  step_in_place(next, dt, scratch);
  return next;
}

DensityGrid solve(DensityGrid grid, double t_end) {
  if (t_end < grid.time) throw std::invalid_argument("solve: t_end precedes the grid time");
  const double dt = default_dt(grid);
  std::vector<double> scratch;
  const double start = grid.time;
  const auto full_steps = static_cast<long>(std::floor((t_end - start) / dt));
  for (long k = 0; k < full_steps; ++k) step_in_place(grid, dt, scratch);
  const double rest = t_end - grid.time;
  if (rest > 1e-15 * std::max(1.0, t_end)) step_in_place(grid, std::min(rest, dt), scratch);
  grid.time = t_end;
  return grid;
}

DensityGrid solve(const std::function<double(double)>& initial, const BoundaryCondition& bc, double t_end,
                  int m) {
  return solve(make_grid(initial, bc, m), t_end);
}

double trapezoid_mass(const DensityGrid& grid) {
  const auto& r = grid.rho;
  double s = 0.5 * (r.front() + r.back());
  for (std::size_t i = 1; i + 1 < r.size(); ++i) s += r[i];
  return s * grid.du();
}

BoundaryInflow boundary_inflow(const DensityGrid& grid) {
  const auto a = grid.active();
  const std::size_t m = a.size() - 1;
  const double du = grid.du();
  return std::visit(Overloaded{[&](const Dirichlet&) {
                                 return BoundaryInflow{-(a[1] - a[0]) / du, (a[m] - a[m - 1]) / du};
                               },
                               [&](const Robin& r) {
                                 return BoundaryInflow{r.kappa * (r.alpha - a[0]), r.kappa * (r.beta - a[m])};
                               },
                               [](const Neumann&) { return BoundaryInflow{0.0, 0.0}; }},
                    grid.bc);
}

double stationary_closed_form(Regime regime, double alpha, double beta, double kappa, double u) {
  if (u < 0.0 || u > 1.0) throw std::out_of_range("stationary_closed_form: u outside [0, 1]");
  double a = 0.0;
  switch (regime) {
    case Regime::Dirichlet:
      a = alpha + (beta - alpha) * u;
      break;
    case Regime::Robin:
      a = alpha + (beta - alpha) * (kappa * u + 1.0) / (kappa + 2.0);
      break;
    case Regime::Neumann:
      a = 0.5 * (alpha + beta);
      break;
  }
  return rho_bar(a);
}

RefinementReport refinement_check(const std::function<double(double)>& initial, const BoundaryCondition& bc,
                                  double t_end, const std::vector<int>& cells) {
  if (cells.size() < 2) throw std::invalid_argument("refinement_check: need at least two grids");
  if (!std::is_sorted(cells.begin(), cells.end()) ||
      std::adjacent_find(cells.begin(), cells.end()) != cells.end()) {
    throw std::invalid_argument("refinement_check: grid sizes must increase");
  }
  std::vector<DensityGrid> solutions;
  for (int m : cells) solutions.push_back(solve(initial, bc, t_end, m));
  const int finest = cells.back();

  RefinementReport report;
  report.cells = cells;
  for (std::size_t k = 0; k + 1 < solutions.size(); ++k) {
    double sum = 0.0;
    for (int i = 0; i <= finest; ++i) {
      const double u = static_cast<double>(i) / finest;
      const double w = (i == 0 || i == finest) ? 0.5 : 1.0;
      sum += w * std::abs(solutions[k].at(u) - solutions[k + 1].at(u));
    }
    report.distances.push_back(sum / finest);
  }
  constexpr double kFloor = 1e-10;
  for (std::size_t k = 0; k + 1 < report.distances.size(); ++k) {
    const double d0 = report.distances[k];
    const double d1 = report.distances[k + 1];
    const double ratio = static_cast<double>(cells[k + 2]) / cells[k + 1];
    if (d0 <= kFloor || d1 <= kFloor) {
      report.orders.push_back(std::nan(""));
      continue;
    }
    const double order = std::log(d0 / d1) / std::log(ratio);
    report.orders.push_back(order);
    if (order < 0.8) report.suspect = true;
  }
  return report;
}

void write_grid_csv(std::ostream& out, const DensityGrid& grid) {
  out << "u,rho,a_of_rho\n";
  char line[128];
  for (int i = 0; i <= grid.cells(); ++i) {
    const double r = grid.rho[static_cast<std::size_t>(i)];
    std::snprintf(line, sizeof line, "%.10g,%.10g,%.10g\n", grid.u(i), r, active_of(r));
    out << line;
  }
}

void write_grid_csv(const std::string& path, const DensityGrid& grid) {
  std::ofstream file(path);
  if (!file) throw std::runtime_error("cannot open " + path);
  write_grid_csv(file, grid);
}

}  // namespace fep
