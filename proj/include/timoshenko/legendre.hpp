#pragma once

#include <functional>
#include <span>
#include <vector>

namespace timoshenko {

inline constexpr int kMaxPolynomialDegree = 256;

/// Gauss-Legendre rule on [-1, 1].
struct QuadratureRule {
  int order = 0;
  std::vector<double> nodes;
  std::vector<double> weights;
};

struct Interval {
  double a = 0.0;
  double b = 1.0;

  Interval() = default;
  Interval(double a_, double b_);

  double length() const { return b - a; }
};

struct IntegrationOptions {
  int order = 10;           // points per panel
  double tol = 1e-12;       // relative to the estimated integral of |f|
  double abs_tol = 0.0;     // absolute floor, spread over the interval
  int max_depth = 32;
  int initial_panels = 4;
  long max_panels = 1L << 20;
};

/// Legendre polynomial P_m on [-1, 1] together with its derivative.
struct LegendreValue {
  double value;
  double derivative;
};
LegendreValue legendre(int m, double xi);

/// P~_m(x) = P_m(2x/length - 1) on [0, length].
double eval_shifted_legendre(int m, double x, double length);
double eval_shifted_legendre_derivative(int m, double x, double length);

/// Fills values[j] = P~_j(x) for j = 0..values.size()-1 in one recurrence pass.
void eval_shifted_legendre_all(double x, double length, std::span<double> values);

QuadratureRule gauss_legendre_rule(int order);

/// Composite Gauss-Legendre with recursive bisection. A panel is accepted when
/// splitting it changes its contribution by less than its share (by length) of
/// max(tol * I_abs, abs_tol), where I_abs estimates the integral of |f|.
/// Throws ConvergenceError if the depth cap or panel budget is exhausted.
double integrate(const std::function<double(double)>& f, const Interval& interval,
                 const IntegrationOptions& options = {});

/// Vector-valued integrand: f(x, out) writes out.size() components. The
/// acceptance test uses the largest component change.
using VectorIntegrand = std::function<void(double, std::span<double>)>;
std::vector<double> integrate_vector(const VectorIntegrand& f, std::size_t components,
                                     const Interval& interval,
                                     const IntegrationOptions& options = {});

}  // namespace timoshenko
