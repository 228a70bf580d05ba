#include "timoshenko/timestepper.hpp"

#include <cmath>
#include <future>
#include <sstream>

#include "timoshenko/errors.hpp"

namespace timoshenko {

void SchemeParameters::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ArgumentError(std::string("invalid scheme parameters: ") + what);
  };
  require(std::isfinite(alpha) && alpha > 0.0, "alpha must be positive");
  // beta = 0 is the linear problem and stays admissible.
  require(std::isfinite(beta) && beta >= 0.0, "beta must be non-negative");
  require(std::isfinite(gamma) && gamma > 0.0, "gamma must be positive");
  require(std::isfinite(delta) && delta > 0.0, "delta must be positive");
  require(std::isfinite(a1) && std::isfinite(a2), "a1, a2 must be finite");
  require(std::isfinite(length) && length > 0.0, "length must be positive");
  require(std::isfinite(final_time) && final_time > 0.0, "final time must be positive");
  require(steps >= 2, "n must be >= 2");
  require(modes >= 1, "N must be >= 1");
  require(modes < kMaxPolynomialDegree - 1, "N exceeds the polynomial degree cap");
}

double compute_q(const SpectralCoefficients& u, double alpha, double beta) {
  return alpha + beta * u.squared_norm();
}

namespace {

SpectralCoefficients axpy(const SpectralCoefficients& x, double a, const SpectralCoefficients& y) {
  SpectralCoefficients out = x;
  for (std::size_t i = 0; i < out.size(); ++i) out[i] += a * y[i];
  return out;
}

double sampled_scale(const RealFunction& g, double length) {
  double s = 1.0;
  for (int i = 0; i <= 32; ++i) s = std::max(s, std::abs(g(length * i / 32.0)));
  return s;
}

}  // namespace

StartingLayers initial_layers(const InitialData& data, const ForcingSampler& forcing,
                              const SchemeParameters& params,
                              const IntegrationOptions& quadrature) {
  params.validate();
  if (!data.phi0 || !data.dphi0 || !data.d2phi0 || !data.phi1 || !data.psi0 || !data.dpsi0 ||
      !data.d2psi0 || !data.psi1)
    throw ArgumentError("initial data is incomplete");
  if (!forcing.f1 || !forcing.f2) throw ArgumentError("forcing is incomplete");

  const double l = params.length;
  const double tau = params.tau();
  const auto modes = static_cast<std::size_t>(params.modes);

  StartingLayers out;
  const Interval whole(0.0, l);
  out.q0 = params.alpha +
           params.beta *
               integrate([&](double x) { const double d = data.dphi0(x); return d * d; }, whole,
                         quadrature);

  ProjectionOptions strict;
  strict.quadrature = quadrature;
  ProjectionOptions lenient = strict;
  lenient.require_compatible = false;

  auto project_lenient = [&](const char* name, const RealFunction& g,
                             const std::optional<RealFunction>& dg) {
    const double mismatch = boundary_mismatch(g, l);
    if (mismatch > lenient.boundary_tol * sampled_scale(g, l)) {
      std::ostringstream msg;
      msg << name << " does not vanish at the endpoints (|value| = " << mismatch
          << "); the boundary part is dropped by the projection";
      out.warnings.push_back(msg.str());
    }
    return project_onto_basis(g, dg, modes, l, lenient);
  };

  const double q0 = out.q0;
  const RealFunction phi2 = [&](double x) {
    return forcing.f1(x, 0.0) - params.a1 * data.dpsi0(x) + q0 * data.d2phi0(x);
  };
  const RealFunction psi2 = [&](double x) {
    return forcing.f2(x, 0.0) + params.a2 * data.dphi0(x) + params.gamma * data.d2psi0(x) -
           params.delta * data.psi0(x);
  };

  const SpectralCoefficients u0 = project_onto_basis(data.phi0, data.dphi0, modes, l, strict);
  const SpectralCoefficients v0 = project_onto_basis(data.psi0, data.dpsi0, modes, l, strict);
  const auto opt = [](const RealFunction& f) {
    return f ? std::optional<RealFunction>(f) : std::nullopt;
  };
  const SpectralCoefficients c_phi1 = project_lenient("phi1", data.phi1, opt(data.dphi1));
  const SpectralCoefficients c_psi1 = project_lenient("psi1", data.psi1, opt(data.dpsi1));
  const SpectralCoefficients c_phi2 = project_lenient("phi2", phi2, std::nullopt);
  const SpectralCoefficients c_psi2 = project_lenient("psi2", psi2, std::nullopt);

  TimeStepState& s = out.state;
  s.k = 1;
  s.u_prev = u0;
  s.v_prev = v0;
  s.u_curr = axpy(axpy(u0, tau, c_phi1), 0.5 * tau * tau, c_phi2);
  s.v_curr = axpy(axpy(v0, tau, c_psi1), 0.5 * tau * tau, c_psi2);
  s.q = compute_q(s.u_curr, params.alpha, params.beta);
  return out;
}

ForcingProjections project_forcing(const ForcingSampler& forcing, double t, std::size_t modes,
                                   double length, const IntegrationOptions& quadrature) {
  // One adaptive pass for both forcings so they share the nodes.
  std::vector<double> phi(modes);
  const std::vector<double> both = integrate_vector(
      [&](double x, std::span<double> out) {
        eval_phi_all(x, length, phi, {});
        const double g1 = forcing.f1(x, t);
        const double g2 = forcing.f2(x, t);
        for (std::size_t m = 0; m < modes; ++m) {
          out[m] = g1 * phi[m];
          out[modes + m] = g2 * phi[m];
        }
      },
      2 * modes, Interval(0.0, length), quadrature);
  ForcingProjections p;
  p.f1.assign(both.begin(), both.begin() + static_cast<std::ptrdiff_t>(modes));
  p.f2.assign(both.begin() + static_cast<std::ptrdiff_t>(modes), both.end());
  return p;
}

LayerSystems assemble_rhs(const TimeStepState& state, const ForcingProjections& forcing,
                          const GalerkinOperatorSet& ops, const SchemeParameters& params) {
  const std::size_t n = ops.modes;
  if (state.u_curr.size() != n || state.v_curr.size() != n || forcing.f1.size() != n ||
      forcing.f2.size() != n)
    throw ArgumentError("assemble_rhs: dimension mismatch between state, forcing and operators");

  const double tau2 = params.tau() * params.tau();
  const double l = params.length;
  const double a0 = 4.0 / (2.0 + params.delta * tau2);

  const std::vector<double> hu = ops.apply_h(state.u_curr.values());
  const std::vector<double> hv = ops.apply_h(state.v_curr.values());
  const std::vector<double> bu = ops.apply_b(state.u_curr.values());
  const std::vector<double> bv = ops.apply_b(state.v_curr.values());

  LayerSystems sys;
  sys.rhs_u.resize(n);
  sys.rhs_v.resize(n);
  const double cf1 = 4.0 * tau2 / (l * l);
  const double cb1 = 2.0 * params.a1 * tau2 / l;
  const double cf2 = 2.0 * a0 * tau2 / (l * l);
  const double cb2 = a0 * params.a2 * tau2 / l;
  for (std::size_t i = 0; i < n; ++i) {
    sys.rhs_u[i] = cf1 * forcing.f1[i] + 2.0 * hu[i] - cb1 * bv[i];
    sys.rhs_v[i] = cf2 * forcing.f2[i] + a0 * hv[i] + cb2 * bu[i];
  }
  sys.shift_u = 2.0 * tau2 * state.q / (l * l);
  sys.shift_v = a0 * tau2 * params.gamma / (l * l);
  return sys;
}

TimeStepState step(const TimeStepState& state, const GalerkinOperatorSet& ops,
                   const ForcingProjections& forcing, const SchemeParameters& params,
                   Execution execution) {
  if (state.u_prev.size() != ops.modes || state.v_prev.size() != ops.modes)
    throw ArgumentError("step: dimension mismatch between state and operators");
  LayerSystems sys = assemble_rhs(state, forcing, ops, params);

  std::vector<double> w1, w2;
  try {
    const GapTridiagonalSystem tu = build_shifted_system(ops, sys.shift_u, std::move(sys.rhs_u));
    const GapTridiagonalSystem tv = build_shifted_system(ops, sys.shift_v, std::move(sys.rhs_v));
    if (execution == Execution::parallel) {
      auto second = std::async(std::launch::async, [&] { return solve_gap_tridiagonal(tv); });
      w1 = solve_gap_tridiagonal(tu);
      w2 = second.get();
    } else {
      w1 = solve_gap_tridiagonal(tu);
      w2 = solve_gap_tridiagonal(tv);
    }
  } catch (const NumericalError& e) {
    std::ostringstream msg;
    msg << "layer " << state.k << ": " << e.what();
    throw NumericalError(msg.str());
  }

  TimeStepState next;
  next.k = state.k + 1;
  next.u_prev = state.u_curr;
  next.v_prev = state.v_curr;
  next.u_curr = SpectralCoefficients(params.length, std::move(w1));
  next.v_curr = SpectralCoefficients(params.length, std::move(w2));
  for (std::size_t i = 0; i < ops.modes; ++i) {
    next.u_curr[i] -= state.u_prev[i];
    next.v_curr[i] -= state.v_prev[i];
  }
  next.q = compute_q(next.u_curr, params.alpha, params.beta);
  return next;
}

TimeStepState step(const TimeStepState& state, const GalerkinOperatorSet& ops,
                   const ForcingSampler& forcing, const SchemeParameters& params,
                   const StepOptions& options) {
  const double t = state.k * params.tau();
  const ForcingProjections p =
      project_forcing(forcing, t, ops.modes, params.length, options.quadrature);
  return step(state, ops, p, params, options.execution);
}

SpectralMonitors spectral_monitors(const TimeStepState& state, const GalerkinOperatorSet& ops,
                                   const SchemeParameters& params) {
  SpectralMonitors m;
  const double tau = params.tau();
  double du = 0.0, dv = 0.0;
  for (std::size_t i = 0; i < state.u_curr.size(); ++i) {
    const double a = state.u_curr[i] - state.u_prev[i];
    const double b = state.v_curr[i] - state.v_prev[i];
    du += a * a;
    dv += b * b;
  }
  m.du = std::sqrt(du) / tau;
  m.dv = std::sqrt(dv) / tau;
  m.au = std::sqrt(state.u_curr.squared_norm());
  // ||v||_{L2}^2 = (l^2/4) v^T H v
  const std::vector<double> hv = ops.apply_h(state.v_curr.values());
  double vhv = 0.0;
  for (std::size_t i = 0; i < hv.size(); ++i) vhv += state.v_curr[i] * hv[i];
  const double l = params.length;
  m.lv = std::sqrt(params.gamma * state.v_curr.squared_norm() + params.delta * 0.25 * l * l * vhv);
  return m;
}

RunResult run(const ProblemData& problem, const SchemeParameters& params,
              std::span<const LayerObserver> observers, const RunOptions& options) {
  params.validate();
  RunResult result;
  const GalerkinOperatorSet ops = assemble_operators(static_cast<std::size_t>(params.modes));

  auto notify = [&](const TimeStepState& s) {
    for (const auto& obs : observers)
      if (obs) obs(s);
    if (options.record_trajectory) result.trajectory.push_back(s);
  };

  TimeStepState state;
  try {
    StartingLayers start = initial_layers(problem.initial, problem.forcing, params, options.quadrature);
    result.q0 = start.q0;
    result.warnings = std::move(start.warnings);
    state = std::move(start.state);
    result.final_state = state;
    notify(state);

    const StepOptions step_options{options.execution, options.quadrature};
    while (state.k < params.steps) {
      state = step(state, ops, problem.forcing, params, step_options);
      result.final_state = state;
      notify(state);
    }
    result.completed = true;
  } catch (const Error& e) {
    result.failure = e.what();
  }
  return result;
}

}  // namespace timoshenko
