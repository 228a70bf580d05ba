#pragma once

#include <functional>
#include <string>

#include "timoshenko/basis.hpp"
#include "timoshenko/timestepper.hpp"

namespace timoshenko {

/// A space-time field with the partial derivatives the forcing and the error
/// measures need. All derivatives are analytic.
struct ExactField {
  SpaceTimeFunction value, dx, dxx, dt, dtt, dxt;
};

inline constexpr int kMachinePrecisionCase = 0;

/// Manufactured solution: exact fields, Cauchy data and the forcings obtained
/// by substituting the fields into the equations with the constants in params.
struct BenchmarkProblem {
  int id = 0;  // 1..3, or kMachinePrecisionCase
  std::string name;
  SchemeParameters params;
  ExactField u, v;
  /// int_0^l u_x(x, t)^2 dx
  std::function<double(double)> nonlocal;
  ProblemData data;
};

/// Default constants and discretisation for a benchmark id (1, 2, 3 or 0).
SchemeParameters default_parameters(int id);

BenchmarkProblem make_benchmark(int id);
/// Same problem with overridden constants; the forcing is rebuilt from them.
BenchmarkProblem make_benchmark(int id, const SchemeParameters& params);

/// u = v = t x (l - x), which lies in the trial space and is linear in time.
BenchmarkProblem make_machine_precision_case();
BenchmarkProblem make_machine_precision_case(const SchemeParameters& params);

/// Builds Cauchy data and forcings from exact fields by substitution.
ProblemData manufacture(const ExactField& u, const ExactField& v,
                        std::function<double(double)> nonlocal, const SchemeParameters& params);

struct LayerErrors {
  double e1 = 0.0;
  double e2 = 0.0;
};

/// Quadrature settings for L2 error norms: 1e-6 relative on the squared error
/// with a floor of 1e-26. The norms below raise the floor to the rounding level
/// of the fields being compared.
IntegrationOptions error_quadrature();

/// || exact(., t) - expansion ||_{L2(0,l)}
double l2_difference(const SpaceTimeFunction& exact, double t, const SpectralCoefficients& c,
                     const IntegrationOptions& options = error_quadrature());

/// E1, E2 of the current layer of state at time t.
LayerErrors layer_errors(const BenchmarkProblem& problem, const TimeStepState& state, double t,
                         const IntegrationOptions& options = error_quadrature());

/// || d_t exact(., t) - (next - prev) / (2 tau) || for u and v.
LayerErrors derivative_errors(const BenchmarkProblem& problem, const SpectralCoefficients& u_next,
                              const SpectralCoefficients& u_prev,
                              const SpectralCoefficients& v_next,
                              const SpectralCoefficients& v_prev, double t, double tau,
                              const IntegrationOptions& options = error_quadrature());

}  // namespace timoshenko
