#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "timoshenko/legendre.hpp"

namespace timoshenko {

/// A_m = 1 / sqrt(2m + 1), the normalisation of P~_m on [0, length].
double legendre_norm_factor(int m);

/// Coefficients of sum_{m=1..N} c_m phi_m on [0, length]. Storage is 0-based:
/// values()[m - 1] multiplies phi_m.
class SpectralCoefficients {
 public:
  SpectralCoefficients() = default;
  SpectralCoefficients(double length, std::size_t modes);
  SpectralCoefficients(double length, std::vector<double> values);

  double length() const { return length_; }
  std::size_t size() const { return values_.size(); }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }

  /// Sum of squared coefficients; equals the integral of (expansion')^2.
  double squared_norm() const;

  friend bool operator==(const SpectralCoefficients&, const SpectralCoefficients&) = default;

 private:
  double length_ = 1.0;
  std::vector<double> values_;
};

// phi_m = (sqrt(l)/2) A_m (P~_{m+1} - P~_{m-1}), m >= 1; vanishes at 0 and l.
double eval_phi(int m, double x, double length);
// phi_m' = P^_m = P~_m / (A_m sqrt(l)), orthonormal on [0, l].
double eval_phi_derivative(int m, double x, double length);
// d/dx P^_m, used by the integration-by-parts projection.
double eval_orthonormal_legendre_derivative(int m, double x, double length);

/// phi_1..phi_N and their derivatives at x in one recurrence pass. Either span
/// may be empty; non-empty spans must have the same size N.
void eval_phi_all(double x, double length, std::span<double> phi, std::span<double> dphi);

double eval_expansion(const SpectralCoefficients& coeffs, double x);
double eval_expansion_derivative(const SpectralCoefficients& coeffs, double x);

struct ProjectionOptions {
  IntegrationOptions quadrature{};
  /// Reject g with |g(0)| or |g(l)| above boundary_tol * max(1, max|g|).
  bool require_compatible = true;
  double boundary_tol = 1e-10;
};

using RealFunction = std::function<double(double)>;

/// Largest |g| at the two endpoints.
double boundary_mismatch(const RealFunction& g, double length);

/// H^1_0-seminorm projection: c_m = int g' P^_m when g' is given, otherwise
/// c_m = -int g (P^_m)' (integration by parts, boundary terms dropped).
SpectralCoefficients project_onto_basis(const RealFunction& g,
                                        const std::optional<RealFunction>& dg,
                                        std::size_t modes, double length,
                                        const ProjectionOptions& options = {});

/// L2 inner products (g, phi_m) for m = 1..modes.
std::vector<double> load_vector(const RealFunction& g, std::size_t modes, double length,
                                const IntegrationOptions& options = {});

}  // namespace timoshenko
