#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "timoshenko/execution.hpp"

namespace timoshenko {

/// Closed-form Galerkin matrices in the phi basis.
///
///   H: symmetric, h_ii = 2 A_{i-1}^2 A_{i+1}^2, h_{i,i+2} = -A_i A_{i+1}^2 A_{i+2}
///   B: skew,      b_{i,i+1} = A_i A_{i+1} = -b_{i+1,i}
///
/// H is (4/l^2) times the L2 mass matrix of {phi_m}; (l/2) B is the matrix of
/// (phi_i', phi_m). Indices in the formulas are 1-based; storage is 0-based.
struct GalerkinOperatorSet {
  std::size_t modes = 0;
  std::vector<double> h_diagonal;  // size N
  std::vector<double> h_gap;       // size N-2, h_gap[i] = h_{i,i+2}
  std::vector<double> b_band;      // size N-1, b_band[i] = b_{i,i+1}

  /// y = H x
  std::vector<double> apply_h(std::span<const double> x) const;
  /// y = B x
  std::vector<double> apply_b(std::span<const double> x) const;

  /// Row-major dense copies, for diagnostics and tests.
  std::vector<double> dense_h() const;
  std::vector<double> dense_b() const;
};

GalerkinOperatorSet assemble_operators(std::size_t modes);

/// Matrix with nonzeros only on the main diagonal and the second off-diagonals.
/// Unknowns of equal index parity couple only among themselves.
struct GapTridiagonalSystem {
  std::vector<double> diagonal;  // size N
  std::vector<double> gap;       // size N-2, couples i and i+2 symmetrically
  std::vector<double> rhs;       // size N

  std::size_t size() const { return diagonal.size(); }
  std::vector<double> multiply(std::span<const double> x) const;
};

/// H + shift I with the given right-hand side. shift must be positive.
GapTridiagonalSystem build_shifted_system(const GalerkinOperatorSet& ops, double shift,
                                          std::vector<double> rhs);

/// Solves by splitting into the odd- and even-indexed tridiagonal subsystems and
/// eliminating each without pivoting. A non-positive pivot throws NumericalError
/// naming the subsystem and pivot. With Execution::parallel the two halves run
/// on separate threads; the result is bit-identical to the serial path.
std::vector<double> solve_gap_tridiagonal(const GapTridiagonalSystem& system,
                                          Execution execution = Execution::serial);

}  // namespace timoshenko
