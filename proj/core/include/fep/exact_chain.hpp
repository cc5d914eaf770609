#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include <Eigen/Sparse>

#include "fep/configuration.hpp"
#include "fep/params.hpp"

namespace fep {

/// Largest N accepted by the enumeration routines.
inline constexpr int kMaxExactN = 24;

/// All ergodic configurations of size N in ascending lexicographic order
/// of the string eta_1 ... eta_{N-1} (so "0101..." first, "11...1" last).
/// There are F(N+1) of them. Throws std::length_error above kMaxExactN.
std::vector<Configuration> enumerate_ergodic(int n);

/// Fibonacci number with F(1) = F(2) = 1.
std::uint64_t fibonacci(int k);

/// Finite-state view of the accelerated generator N^2 L_N.
struct ExactChain {
  SystemParams params;
  std::vector<Configuration> states;
  /// Q(s, s') is the accelerated rate of the move s -> s'; the diagonal
  /// holds minus the row sum. Row-major.
  Eigen::SparseMatrix<double, Eigen::RowMajor> generator;

  [[nodiscard]] std::size_t size() const noexcept { return states.size(); }
  /// Index of an ergodic configuration, -1 if absent.
  [[nodiscard]] long index_of(const Configuration& cfg) const;

  std::unordered_map<std::uint64_t, long> lookup;
};

ExactChain build_generator(const SystemParams& params);

/// Every state reaches every other (forward and backward search from one state).
bool is_irreducible(const ExactChain& chain);

/// Stationary vector pi with pi Q = 0, sum 1. Throws std::runtime_error
/// with the residual when ||pi Q||_inf >= 1e-10 or pi has a negative entry
/// beyond rounding.
std::vector<double> stationary_exact(const ExactChain& chain);

/// ||pi Q||_inf.
double stationary_residual(const ExactChain& chain, const std::vector<double>& pi);

/// E_pi[h_x] for x = 0 ... N (entries 0 and N are alpha and beta).
std::vector<double> expected_active(const ExactChain& chain, const std::vector<double>& pi);

/// E_pi[eta_x], entry x-1.
std::vector<double> expected_density(const ExactChain& chain, const std::vector<double>& pi);

/// Closed-form stationary active field
/// alpha + (beta - alpha)(kappa (x-1) + N^theta) / (kappa (N-2) + 2 N^theta), x = 1 ... N-1.
/// Entry x-1.
std::vector<double> stationary_active_field(const SystemParams& params);

/// max over pairs of |pi(s) Q(s,s') - pi(s') Q(s',s)|.
double detailed_balance_defect(const ExactChain& chain, const std::vector<double>& pi);

}  // namespace fep
