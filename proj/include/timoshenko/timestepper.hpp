#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "timoshenko/basis.hpp"
#include "timoshenko/execution.hpp"
#include "timoshenko/galerkin.hpp"
#include "timoshenko/legendre.hpp"

namespace timoshenko {

/// Physical constants and discretisation of
///   u_tt - (alpha + beta int u_x^2) u_xx + a1 v_x = f1
///   v_tt - gamma v_xx + delta v - a2 u_x        = f2
/// on (0, length) x (0, final_time], homogeneous Dirichlet data.
struct SchemeParameters {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double delta = 1.0;
  double a1 = 1.0;
  double a2 = 1.0;
  double length = 2.0;
  double final_time = 1.0;
  int steps = 256;  // n, tau = final_time / n
  int modes = 35;   // N

  double tau() const { return final_time / steps; }
  /// Throws ArgumentError naming the first violated invariant.
  void validate() const;
};

using SpaceTimeFunction = std::function<double(double x, double t)>;

struct ForcingSampler {
  SpaceTimeFunction f1;
  SpaceTimeFunction f2;
};

/// Cauchy data u(.,0) = phi0, u_t(.,0) = phi1, v(.,0) = psi0, v_t(.,0) = psi1.
/// Second derivatives of phi0, psi0 feed the Taylor start; first derivatives of
/// phi1, psi1 are optional (integration by parts is used when absent).
struct InitialData {
  RealFunction phi0, dphi0, d2phi0;
  RealFunction phi1, dphi1;
  RealFunction psi0, dpsi0, d2psi0;
  RealFunction psi1, dpsi1;
};

struct ProblemData {
  InitialData initial;
  ForcingSampler forcing;
};

/// Layers k-1 and k of the coefficient vectors plus q_{k,N}.
struct TimeStepState {
  int k = 0;
  SpectralCoefficients u_prev, u_curr;
  SpectralCoefficients v_prev, v_curr;
  double q = 0.0;
};

/// q = alpha + beta * sum c_m^2.
double compute_q(const SpectralCoefficients& u, double alpha, double beta);

struct StartingLayers {
  TimeStepState state;  // k = 1
  double q0 = 0.0;
  std::vector<std::string> warnings;
};

/// Layers 0 and 1 from the three-term Taylor expansion in time, with the second
/// time derivative taken from the equations at t = 0.
StartingLayers initial_layers(const InitialData& data, const ForcingSampler& forcing,
                              const SchemeParameters& params,
                              const IntegrationOptions& quadrature = {});

/// (f_{j}(., t), phi_m) for m = 1..modes, j = 1, 2.
struct ForcingProjections {
  std::vector<double> f1;
  std::vector<double> f2;
};
ForcingProjections project_forcing(const ForcingSampler& forcing, double t, std::size_t modes,
                                   double length, const IntegrationOptions& quadrature = {});

struct LayerSystems {
  std::vector<double> rhs_u;
  std::vector<double> rhs_v;
  double shift_u = 0.0;
  double shift_v = 0.0;
};

/// Right-hand sides and diagonal shifts of the two Galerkin systems of layer k:
///   (H + shift_u I) w1 = 4 tau^2/l^2 I1 + 2 H u^k - 2 a1 tau^2/l B v^k
///   (H + shift_v I) w2 = 2 a0 tau^2/l^2 I2 + a0 H v^k + a0 a2 tau^2/l B u^k
/// with shift_u = 2 tau^2 q_k / l^2, shift_v = a0 tau^2 gamma / l^2,
/// a0 = 4 / (2 + delta tau^2).
LayerSystems assemble_rhs(const TimeStepState& state, const ForcingProjections& forcing,
                          const GalerkinOperatorSet& ops, const SchemeParameters& params);

/// Advances with precomputed forcing projections at t_k.
TimeStepState step(const TimeStepState& state, const GalerkinOperatorSet& ops,
                   const ForcingProjections& forcing, const SchemeParameters& params,
                   Execution execution = Execution::serial);

struct StepOptions {
  Execution execution = Execution::serial;
  IntegrationOptions quadrature{};
};

TimeStepState step(const TimeStepState& state, const GalerkinOperatorSet& ops,
                   const ForcingSampler& forcing, const SchemeParameters& params,
                   const StepOptions& options = {});

/// Coefficient-space surrogates of the bounded quantities of the scheme.
struct SpectralMonitors {
  double du = 0.0;  // |u^k - u^{k-1}| / tau
  double dv = 0.0;  // |v^k - v^{k-1}| / tau
  double au = 0.0;  // <A u^k, u^k>^{1/2}
  double lv = 0.0;  // <L v^k, v^k>^{1/2}, L = gamma A + delta I
};
SpectralMonitors spectral_monitors(const TimeStepState& state, const GalerkinOperatorSet& ops,
                                   const SchemeParameters& params);

/// Called on the stepping thread for k = 1 (starting layers) and after each step.
using LayerObserver = std::function<void(const TimeStepState&)>;

struct RunOptions {
  Execution execution = Execution::serial;
  bool record_trajectory = false;
  IntegrationOptions quadrature{};
};

struct RunResult {
  bool completed = false;
  std::string failure;  // empty when completed
  TimeStepState final_state;
  std::vector<TimeStepState> trajectory;  // only with record_trajectory
  std::vector<std::string> warnings;
  double q0 = 0.0;
};

/// Starting layers followed by n - 1 steps. A failing step stops the march;
/// everything computed up to that point is kept in the result.
RunResult run(const ProblemData& problem, const SchemeParameters& params,
              std::span<const LayerObserver> observers, const RunOptions& options = {});

}  // namespace timoshenko
