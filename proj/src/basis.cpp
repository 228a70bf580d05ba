#include "timoshenko/basis.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "timoshenko/errors.hpp"

namespace timoshenko {

double legendre_norm_factor(int m) { return 1.0 / std::sqrt(2.0 * m + 1.0); }

SpectralCoefficients::SpectralCoefficients(double length, std::size_t modes)
    : SpectralCoefficients(length, std::vector<double>(modes, 0.0)) {}

SpectralCoefficients::SpectralCoefficients(double length, std::vector<double> values)
    : length_(length), values_(std::move(values)) {
  if (!(length > 0.0)) throw ArgumentError("coefficient interval length must be positive");
}

double SpectralCoefficients::squared_norm() const {
  double s = 0.0;
  for (double c : values_) s += c * c;
  return s;
}

namespace {

void check_index(int m) {
  if (m < 1) {
    std::ostringstream msg;
    msg << "basis index must be >= 1, got " << m;
    throw ArgumentError(msg.str());
  }
}

}  // namespace

double eval_phi(int m, double x, double length) {
  check_index(m);
  const double diff = eval_shifted_legendre(m + 1, x, length) -
                      eval_shifted_legendre(m - 1, x, length);
  return 0.5 * std::sqrt(length) * legendre_norm_factor(m) * diff;
}

double eval_phi_derivative(int m, double x, double length) {
  check_index(m);
  return eval_shifted_legendre(m, x, length) / (legendre_norm_factor(m) * std::sqrt(length));
}

double eval_orthonormal_legendre_derivative(int m, double x, double length) {
  check_index(m);
  return eval_shifted_legendre_derivative(m, x, length) /
         (legendre_norm_factor(m) * std::sqrt(length));
}

void eval_phi_all(double x, double length, std::span<double> phi, std::span<double> dphi) {
  const std::size_t n = std::max(phi.size(), dphi.size());
  if (n == 0) return;
  if ((!phi.empty() && phi.size() != n) || (!dphi.empty() && dphi.size() != n))
    throw ArgumentError("eval_phi_all: span sizes differ");
  // P~_0 .. P~_{N+1}; small buffers stay on the stack.
  double stack_buf[64];
  std::vector<double> heap_buf;
  std::span<double> p;
  if (n + 2 <= 64) {
    p = std::span<double>(stack_buf, n + 2);
  } else {
    heap_buf.resize(n + 2);
    p = heap_buf;
  }
  eval_shifted_legendre_all(x, length, p);
  const double root = std::sqrt(length);
  for (std::size_t i = 0; i < n; ++i) {
    const int m = static_cast<int>(i) + 1;
    const double a = legendre_norm_factor(m);
    if (!phi.empty()) phi[i] = 0.5 * root * a * (p[m + 1] - p[m - 1]);
    if (!dphi.empty()) dphi[i] = p[m] / (a * root);
  }
}

namespace {

template <bool Derivative>
double expansion_impl(const SpectralCoefficients& coeffs, double x) {
  const std::size_t n = coeffs.size();
  if (n == 0) {
    eval_shifted_legendre(0, x, coeffs.length());  // domain check
    return 0.0;
  }
  std::vector<double> values(n);
  if constexpr (Derivative)
    eval_phi_all(x, coeffs.length(), {}, values);
  else
    eval_phi_all(x, coeffs.length(), values, {});
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += coeffs[i] * values[i];
  return s;
}

}  // namespace

double eval_expansion(const SpectralCoefficients& coeffs, double x) {
  return expansion_impl<false>(coeffs, x);
}

double eval_expansion_derivative(const SpectralCoefficients& coeffs, double x) {
  return expansion_impl<true>(coeffs, x);
}

double boundary_mismatch(const RealFunction& g, double length) {
  return std::max(std::abs(g(0.0)), std::abs(g(length)));
}

namespace {

double sampled_scale(const RealFunction& g, double length) {
  double scale = 1.0;
  constexpr int kSamples = 64;
  for (int i = 0; i <= kSamples; ++i) scale = std::max(scale, std::abs(g(length * i / kSamples)));
  return scale;
}

}  // namespace

SpectralCoefficients project_onto_basis(const RealFunction& g,
                                        const std::optional<RealFunction>& dg,
                                        std::size_t modes, double length,
                                        const ProjectionOptions& options) {
  if (modes == 0) throw ArgumentError("projection needs at least one mode");
  if (!(length > 0.0)) throw ArgumentError("interval length must be positive");
  if (options.require_compatible) {
    const double mismatch = boundary_mismatch(g, length);
    if (mismatch > options.boundary_tol * sampled_scale(g, length)) {
      std::ostringstream msg;
      msg << "function does not vanish at the endpoints (|g| = " << mismatch << ")";
      throw CompatibilityError(msg.str());
    }
  }

  const Interval interval(0.0, length);
  std::vector<double> c;
  if (dg) {
    const RealFunction& deriv = *dg;
    c = integrate_vector(
        [&](double x, std::span<double> out) {
          eval_phi_all(x, length, {}, out);
          const double d = deriv(x);
          for (double& v : out) v *= d;
        },
        modes, interval, options.quadrature);
  } else {
    // (P^_m)' = (2/l) P_m'(xi) / (A_m sqrt(l)); P_m' by the derivative recurrence.
    const double root = std::sqrt(length);
    c = integrate_vector(
        [&](double x, std::span<double> out) {
          const double xi = std::clamp(2.0 * x / length - 1.0, -1.0, 1.0);
          const double gx = g(x);
          double d_prev = 0.0, d = 1.0;       // P_0', P_1'
          double p_prev = 1.0, p_cur = xi;    // P_0, P_1
          for (std::size_t i = 0; i < modes; ++i) {
            const int m = static_cast<int>(i) + 1;
            out[i] = -gx * d * (2.0 / length) / (legendre_norm_factor(m) * root);
            // advance to m + 1
            const double p_next = ((2.0 * m + 1.0) * xi * p_cur - m * p_prev) / (m + 1.0);
            const double d_next = d_prev + (2.0 * m + 1.0) * p_cur;
            p_prev = p_cur;
            p_cur = p_next;
            d_prev = d;
            d = d_next;
          }
        },
        modes, interval, options.quadrature);
  }
  return SpectralCoefficients(length, std::move(c));
}

std::vector<double> load_vector(const RealFunction& g, std::size_t modes, double length,
                                const IntegrationOptions& options) {
  return integrate_vector(
      [&](double x, std::span<double> out) {
        eval_phi_all(x, length, out, {});
        const double gx = g(x);
        for (double& v : out) v *= gx;
      },
      modes, Interval(0.0, length), options);
}

}  // namespace timoshenko
