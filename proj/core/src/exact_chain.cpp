#include "fep/exact_chain.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>
#include <Eigen/SparseLU>

#include "fep/kernel.hpp"

namespace fep {

namespace {

constexpr std::size_t kDenseLimit = 3000;

void enumerate_into(int n, int site, std::uint64_t pattern, bool prev_empty,
                    std::vector<Configuration>& out) {
  if (site == n) {
    out.push_back(Configuration::from_pattern(pattern, n));
    return;
  }
  if (!prev_empty) enumerate_into(n, site + 1, pattern, true, out);
  enumerate_into(n, site + 1, pattern | (std::uint64_t{1} << (site - 1)), false, out);
}

}  // namespace

std::uint64_t fibonacci(int k) {
  std::uint64_t a = 0;
  std::uint64_t b = 1;
  for (int i = 0; i < k; ++i) {
    const std::uint64_t c = a + b;
    a = b;
    b = c;
  }
  return a;
}

std::vector<Configuration> enumerate_ergodic(int n) {
  if (n < 2) throw std::invalid_argument("enumerate_ergodic: N must be at least 2");
  if (n > kMaxExactN) {
    throw std::length_error("enumerate_ergodic: N = " + std::to_string(n) + " exceeds the cap " +
                            std::to_string(kMaxExactN));
  }
  std::vector<Configuration> out;
  out.reserve(fibonacci(n + 1));
  enumerate_into(n, 1, 0, false, out);
  return out;
}

long ExactChain::index_of(const Configuration& cfg) const {
  if (cfg.n() != params.n) return -1;
  const auto it = lookup.find(cfg.pattern());
  return it == lookup.end() ? -1 : it->second;
}

ExactChain build_generator(const SystemParams& params) {
  params.validate();
  ExactChain chain;
  chain.params = params;
  chain.states = enumerate_ergodic(params.n);
  const auto count = static_cast<long>(chain.states.size());
  for (long i = 0; i < count; ++i) chain.lookup.emplace(chain.states[static_cast<std::size_t>(i)].pattern(), i);

  const double scale = params.time_scale();
  std::vector<Eigen::Triplet<double>> triplets;
  triplets.reserve(static_cast<std::size_t>(count) * 4);
  std::vector<Move> moves;
  for (int x = 1; x <= params.n - 2; ++x) moves.push_back(Move::swap(x));
  moves.push_back(Move::flip_left());
  moves.push_back(Move::flip_right());

  for (long i = 0; i < count; ++i) {
    const Configuration& s = chain.states[static_cast<std::size_t>(i)];
    double out = 0.0;
    for (const Move& m : moves) {
      const double r = scale * move_rate(s, params, m);
      if (r <= 0.0) continue;
      const long j = chain.index_of(apply_move(s, m));
      if (j < 0) throw std::logic_error("build_generator: move left the ergodic component");
      triplets.emplace_back(i, j, r);
      out += r;
    }
    triplets.emplace_back(i, i, -out);
  }
  chain.generator.resize(count, count);
  chain.generator.setFromTriplets(triplets.begin(), triplets.end());
  chain.generator.makeCompressed();
  return chain;
}

bool is_irreducible(const ExactChain& chain) {
  const auto count = static_cast<long>(chain.size());
  if (count == 0) return false;
  const auto& q = chain.generator;
  std::vector<std::vector<long>> backward(static_cast<std::size_t>(count));
  for (long i = 0; i < count; ++i) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(q, i); it; ++it) {
      if (it.col() != i && it.value() > 0.0) backward[static_cast<std::size_t>(it.col())].push_back(i);
    }
  }
  auto reach_all = [&](auto&& neighbours) {
    std::vector<char> seen(static_cast<std::size_t>(count), 0);
    std::vector<long> stack{0};
    seen[0] = 1;
    long reached = 1;
    while (!stack.empty()) {
      const long s = stack.back();
      stack.pop_back();
      neighbours(s, [&](long t) {
        if (!seen[static_cast<std::size_t>(t)]) {
          seen[static_cast<std::size_t>(t)] = 1;
          ++reached;
          stack.push_back(t);
        }
      });
    }
    return reached == count;
  };
  const bool forward = reach_all([&](long s, auto&& visit) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(q, s); it; ++it) {
      if (it.col() != s && it.value() > 0.0) visit(static_cast<long>(it.col()));
    }
  });
  const bool back = reach_all([&](long s, auto&& visit) {
    for (long t : backward[static_cast<std::size_t>(s)]) visit(t);
  });
  return forward && back;
}

double stationary_residual(const ExactChain& chain, const std::vector<double>& pi) {
  const Eigen::Map<const Eigen::VectorXd> p(pi.data(), static_cast<long>(pi.size()));
  const Eigen::VectorXd r = chain.generator.transpose() * p;
  return r.cwiseAbs().maxCoeff();
}

std::vector<double> stationary_exact(const ExactChain& chain) {
  const auto count = static_cast<long>(chain.size());
  if (count == 0) throw std::invalid_argument("stationary_exact: empty chain");
  // Solve Q^T pi = 0 with the first equation replaced by sum(pi) = 1.
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(count);
  rhs(0) = 1.0;
  Eigen::VectorXd solution;
  if (static_cast<std::size_t>(count) <= kDenseLimit) {
    Eigen::MatrixXd a = Eigen::MatrixXd(chain.generator).transpose();
    a.row(0).setOnes();
    solution = a.partialPivLu().solve(rhs);
  } else {
    Eigen::SparseMatrix<double> qt = chain.generator.transpose();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(qt.nonZeros() + count));
    for (long k = 0; k < qt.outerSize(); ++k) {
      for (Eigen::SparseMatrix<double>::InnerIterator it(qt, k); it; ++it) {
        if (it.row() != 0) triplets.emplace_back(it.row(), it.col(), it.value());
      }
    }
    for (long j = 0; j < count; ++j) triplets.emplace_back(0, j, 1.0);
    Eigen::SparseMatrix<double> a(count, count);
    a.setFromTriplets(triplets.begin(), triplets.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw std::runtime_error("stationary_exact: sparse factorisation failed");
    solution = lu.solve(rhs);
  }
  std::vector<double> pi(solution.data(), solution.data() + count);
  const double residual = stationary_residual(chain, pi);
  const double min_entry = *std::min_element(pi.begin(), pi.end());
  if (!(residual < 1e-10) || min_entry < -1e-12) {
    throw std::runtime_error("stationary_exact: degenerate solve, residual " + std::to_string(residual) +
                             ", min entry " + std::to_string(min_entry));
  }
  for (double& v : pi) v = std::max(v, 0.0);
  return pi;
}

std::vector<double> expected_active(const ExactChain& chain, const std::vector<double>& pi) {
  const int n = chain.params.n;
  std::vector<double> out(static_cast<std::size_t>(n + 1), 0.0);
  for (std::size_t s = 0; s < chain.size(); ++s) {
    for (int x = 0; x <= n; ++x) {
      out[static_cast<std::size_t>(x)] += pi[s] * detail::active_indicator(chain.states[s], chain.params, x);
    }
  }
  return out;
}

std::vector<double> expected_density(const ExactChain& chain, const std::vector<double>& pi) {
  const int n = chain.params.n;
  std::vector<double> out(static_cast<std::size_t>(n - 1), 0.0);
  for (std::size_t s = 0; s < chain.size(); ++s) {
    for (int x = 1; x < n; ++x) {
      if (chain.states[s][x]) out[static_cast<std::size_t>(x - 1)] += pi[s];
    }
  }
  return out;
}

std::vector<double> stationary_active_field(const SystemParams& p) {
  const double nt = std::pow(static_cast<double>(p.n), p.theta);
  const double denom = p.kappa * (p.n - 2) + 2.0 * nt;
  std::vector<double> out;
  out.reserve(static_cast<std::size_t>(p.n - 1));
  for (int x = 1; x < p.n; ++x) {
    out.push_back(p.alpha + (p.beta - p.alpha) * (p.kappa * (x - 1) + nt) / denom);
  }
  return out;
}

double detailed_balance_defect(const ExactChain& chain, const std::vector<double>& pi) {
  const auto& q = chain.generator;
  double worst = 0.0;
  for (long i = 0; i < q.outerSize(); ++i) {
    for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(q, i); it; ++it) {
      const long j = it.col();
      if (j == i) continue;
      const double forward = pi[static_cast<std::size_t>(i)] * it.value();
      const double backward = pi[static_cast<std::size_t>(j)] * q.coeff(j, i);
      worst = std::max(worst, std::abs(forward - backward));
    }
  }
  return worst;
}

}  // namespace fep
