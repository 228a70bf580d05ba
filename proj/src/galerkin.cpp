#include "timoshenko/galerkin.hpp"

#include <future>
#include <sstream>
#include <string>

#include "timoshenko/basis.hpp"
#include "timoshenko/errors.hpp"

namespace timoshenko {

namespace {

double a2(int m) { return 1.0 / (2.0 * m + 1.0); }

void check_size(std::span<const double> x, std::size_t n, const char* what) {
  if (x.size() != n) {
    std::ostringstream msg;
    msg << what << ": expected length " << n << ", got " << x.size();
    throw ArgumentError(msg.str());
  }
}

}  // namespace

GalerkinOperatorSet assemble_operators(std::size_t modes) {
  if (modes == 0) throw ArgumentError("assemble_operators: N must be >= 1");
  GalerkinOperatorSet ops;
  ops.modes = modes;
  ops.h_diagonal.resize(modes);
  ops.h_gap.resize(modes >= 2 ? modes - 2 : 0);
  ops.b_band.resize(modes - 1);
  for (std::size_t idx = 0; idx < modes; ++idx) {
    const int i = static_cast<int>(idx) + 1;
    ops.h_diagonal[idx] = 2.0 * a2(i - 1) * a2(i + 1);
    if (idx + 2 < modes)
      ops.h_gap[idx] = -legendre_norm_factor(i) * a2(i + 1) * legendre_norm_factor(i + 2);
    if (idx + 1 < modes) ops.b_band[idx] = legendre_norm_factor(i) * legendre_norm_factor(i + 1);
  }
  return ops;
}

std::vector<double> GalerkinOperatorSet::apply_h(std::span<const double> x) const {
  check_size(x, modes, "apply_h");
  std::vector<double> y(modes);
  for (std::size_t i = 0; i < modes; ++i) y[i] = h_diagonal[i] * x[i];
  for (std::size_t i = 0; i < h_gap.size(); ++i) {
    y[i] += h_gap[i] * x[i + 2];
    y[i + 2] += h_gap[i] * x[i];
  }
  return y;
}

std::vector<double> GalerkinOperatorSet::apply_b(std::span<const double> x) const {
  check_size(x, modes, "apply_b");
  std::vector<double> y(modes, 0.0);
  for (std::size_t i = 0; i < b_band.size(); ++i) {
    y[i] += b_band[i] * x[i + 1];
    y[i + 1] -= b_band[i] * x[i];
  }
  return y;
}

std::vector<double> GalerkinOperatorSet::dense_h() const {
  std::vector<double> m(modes * modes, 0.0);
  for (std::size_t i = 0; i < modes; ++i) m[i * modes + i] = h_diagonal[i];
  for (std::size_t i = 0; i < h_gap.size(); ++i) {
    m[i * modes + i + 2] = h_gap[i];
    m[(i + 2) * modes + i] = h_gap[i];
  }
  return m;
}

std::vector<double> GalerkinOperatorSet::dense_b() const {
  std::vector<double> m(modes * modes, 0.0);
  for (std::size_t i = 0; i < b_band.size(); ++i) {
    m[i * modes + i + 1] = b_band[i];
    m[(i + 1) * modes + i] = -b_band[i];
  }
  return m;
}

std::vector<double> GapTridiagonalSystem::multiply(std::span<const double> x) const {
  const std::size_t n = size();
  check_size(x, n, "GapTridiagonalSystem::multiply");
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = diagonal[i] * x[i];
  for (std::size_t i = 0; i < gap.size(); ++i) {
    y[i] += gap[i] * x[i + 2];
    y[i + 2] += gap[i] * x[i];
  }
  return y;
}

GapTridiagonalSystem build_shifted_system(const GalerkinOperatorSet& ops, double shift,
                                          std::vector<double> rhs) {
  if (!(shift > 0.0)) {
    std::ostringstream msg;
    msg << "shift must be positive, got " << shift;
    throw ArgumentError(msg.str());
  }
  check_size(rhs, ops.modes, "build_shifted_system rhs");
  GapTridiagonalSystem system;
  system.diagonal = ops.h_diagonal;
  for (double& d : system.diagonal) d += shift;
  system.gap = ops.h_gap;
  system.rhs = std::move(rhs);
  return system;
}

namespace {

// Thomas elimination on the unknowns first, first+2, first+4, ... of the full
// system, writing the solution into x at the same positions.
void solve_parity(const GapTridiagonalSystem& s, std::size_t first, std::vector<double>& x) {
  const std::size_t n = s.size();
  if (first >= n) return;
  const std::size_t count = (n - first + 1) / 2;
  std::vector<double> upper(count, 0.0);  // normalised super-diagonal
  std::vector<double> y(count);

  for (std::size_t j = 0; j < count; ++j) {
    const std::size_t i = first + 2 * j;
    double pivot = s.diagonal[i];
    double r = s.rhs[i];
    if (j > 0) {
      const double lower = s.gap[i - 2];
      pivot -= lower * upper[j - 1];
      r -= lower * y[j - 1];
    }
    if (!(pivot > 0.0)) {
      std::ostringstream msg;
      msg << "non-positive pivot " << pivot << " in the "
          << (first == 0 ? "odd" : "even") << "-indexed subsystem at unknown " << i + 1
          << " (pivot " << j + 1 << ")";
      throw NumericalError(msg.str());
    }
    if (j + 1 < count) upper[j] = s.gap[i] / pivot;
    y[j] = r / pivot;
  }
  for (std::size_t j = count; j-- > 0;) {
    const std::size_t i = first + 2 * j;
    x[i] = y[j];
    if (j + 1 < count) x[i] -= upper[j] * x[i + 2];
  }
}

}  // namespace

std::vector<double> solve_gap_tridiagonal(const GapTridiagonalSystem& system, Execution execution) {
  const std::size_t n = system.size();
  if (n == 0) throw ArgumentError("empty system");
  if (system.rhs.size() != n || system.gap.size() != (n >= 2 ? n - 2 : 0))
    throw ArgumentError("gap-tridiagonal system has inconsistent band sizes");

  std::vector<double> x(n, 0.0);
  // The halves touch disjoint entries of x.
  if (execution == Execution::parallel && n > 1) {
    auto even = std::async(std::launch::async, [&] { solve_parity(system, 1, x); });
    solve_parity(system, 0, x);
    even.get();
  } else {
    solve_parity(system, 0, x);
    solve_parity(system, 1, x);
  }
  return x;
}

}  // namespace timoshenko
