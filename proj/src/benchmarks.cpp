#include "timoshenko/benchmarks.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "timoshenko/errors.hpp"

namespace timoshenko {

namespace {

using std::numbers::pi;

// s(t) g(x) with s, s', s'' and g, g', g''.
struct Separable {
  std::function<double(double)> s, ds, d2s;
  std::function<double(double)> g, dg, d2g;

  ExactField field() const {
    ExactField f;
    auto S = *this;
    f.value = [S](double x, double t) { return S.s(t) * S.g(x); };
    f.dx = [S](double x, double t) { return S.s(t) * S.dg(x); };
    f.dxx = [S](double x, double t) { return S.s(t) * S.d2g(x); };
    f.dt = [S](double x, double t) { return S.ds(t) * S.g(x); };
    f.dtt = [S](double x, double t) { return S.d2s(t) * S.g(x); };
    f.dxt = [S](double x, double t) { return S.ds(t) * S.dg(x); };
    return f;
  }
};

struct SineProfile {
  double k;
  std::function<double(double)> g() const { return [k = k](double x) { return std::sin(k * x); }; }
  std::function<double(double)> dg() const {
    return [k = k](double x) { return k * std::cos(k * x); };
  }
  std::function<double(double)> d2g() const {
    return [k = k](double x) { return -k * k * std::sin(k * x); };
  }
};

BenchmarkProblem assemble(int id, std::string name, const SchemeParameters& params,
                          const Separable& shape, std::function<double(double)> nonlocal) {
  params.validate();
  BenchmarkProblem p;
  p.id = id;
  p.name = std::move(name);
  p.params = params;
  p.u = shape.field();
  p.v = shape.field();
  p.nonlocal = std::move(nonlocal);
  p.data = manufacture(p.u, p.v, p.nonlocal, params);
  return p;
}

BenchmarkProblem test1(const SchemeParameters& params) {
  constexpr double lambda = 14.0;
  const SineProfile sine{lambda * pi / params.length};
  Separable sh;
  sh.s = [](double t) { return std::sin(0.5 * pi * t); };
  sh.ds = [](double t) { return 0.5 * pi * std::cos(0.5 * pi * t); };
  sh.d2s = [](double t) { return -0.25 * pi * pi * std::sin(0.5 * pi * t); };
  sh.g = sine.g();
  sh.dg = sine.dg();
  sh.d2g = sine.d2g();
  // int cos^2(k x) over (0, l) = l/2 for integer lambda
  const double spatial = sine.k * sine.k * 0.5 * params.length;
  auto s = sh.s;
  return assemble(1, "test1", params, sh, [s, spatial](double t) {
    const double st = s(t);
    return st * st * spatial;
  });
}

BenchmarkProblem test2(const SchemeParameters& params) {
  constexpr double amplitude = 0.5, lambda1 = 2.0, width = 1.0, lambda = 19.0;
  const double l = params.length;
  const double omega = lambda1 * pi / params.final_time;
  const double k = lambda * pi / l;
  const double c2 = width * width;

  Separable sh;
  sh.s = [=](double t) { return amplitude * (1.0 + std::cos(omega * t)); };
  sh.ds = [=](double t) { return -amplitude * omega * std::sin(omega * t); };
  sh.d2s = [=](double t) { return -amplitude * omega * omega * std::cos(omega * t); };

  // g = e(x) sin(kx), e = exp(-(2x - l)^2 / c^2)
  auto e = [=](double x) { const double z = 2.0 * x - l; return std::exp(-z * z / c2); };
  auto de = [=](double x) { const double z = 2.0 * x - l; return -4.0 * z / c2 * e(x); };
  auto d2e = [=](double x) {
    const double z = 2.0 * x - l;
    return (16.0 * z * z / (c2 * c2) - 8.0 / c2) * e(x);
  };
  sh.g = [=](double x) { return e(x) * std::sin(k * x); };
  sh.dg = [=](double x) { return de(x) * std::sin(k * x) + k * e(x) * std::cos(k * x); };
  sh.d2g = [=](double x) {
    return d2e(x) * std::sin(k * x) + 2.0 * k * de(x) * std::cos(k * x) -
           k * k * e(x) * std::sin(k * x);
  };

  // The envelope has no elementary antiderivative; the x-integral is
  // time-independent, so one quadrature serves every t.
  const auto dg = sh.dg;
  const double spatial = integrate([&](double x) { const double d = dg(x); return d * d; },
                                   Interval(0.0, l), IntegrationOptions{});
  auto s = sh.s;
  return assemble(2, "test2", params, sh, [s, spatial](double t) {
    const double st = s(t);
    return st * st * spatial;
  });
}

BenchmarkProblem test3(const SchemeParameters& params) {
  constexpr double lambda = 5.0;
  const double rate = pi / params.final_time;
  const SineProfile sine{lambda * pi / params.length};
  Separable sh;
  sh.s = [=](double t) { return 0.25 * std::exp(rate * t); };
  sh.ds = [=](double t) { return 0.25 * rate * std::exp(rate * t); };
  sh.d2s = [=](double t) { return 0.25 * rate * rate * std::exp(rate * t); };
  sh.g = sine.g();
  sh.dg = sine.dg();
  sh.d2g = sine.d2g();
  const double spatial = sine.k * sine.k * 0.5 * params.length;
  auto s = sh.s;
  return assemble(3, "test3", params, sh, [s, spatial](double t) {
    const double st = s(t);
    return st * st * spatial;
  });
}

}  // namespace

SchemeParameters default_parameters(int id) {
  SchemeParameters p;  // all constants 1, l = 2
  switch (id) {
    case kMachinePrecisionCase:
      p.final_time = 1.0;
      p.steps = 16;
      p.modes = 4;
      break;
    case 1:
      p.final_time = 1.0;
      p.steps = 256;
      p.modes = 35;
      break;
    case 2:
      p.final_time = 1.0;
      p.steps = 256;
      p.modes = 45;
      break;
    case 3:
      p.final_time = 4.0;
      p.steps = 1024;  // tau = 2^-8
      p.modes = 15;
      break;
    default: {
      std::ostringstream msg;
      msg << "unknown benchmark id " << id << " (expected 1, 2 or 3)";
      throw ArgumentError(msg.str());
    }
  }
  return p;
}

BenchmarkProblem make_benchmark(int id) { return make_benchmark(id, default_parameters(id)); }

BenchmarkProblem make_benchmark(int id, const SchemeParameters& params) {
  switch (id) {
    case kMachinePrecisionCase:
      return make_machine_precision_case(params);
    case 1:
      return test1(params);
    case 2:
      return test2(params);
    case 3:
      return test3(params);
    default: {
      std::ostringstream msg;
      msg << "unknown benchmark id " << id << " (expected 1, 2 or 3)";
      throw ArgumentError(msg.str());
    }
  }
}

BenchmarkProblem make_machine_precision_case() {
  return make_machine_precision_case(default_parameters(kMachinePrecisionCase));
}

BenchmarkProblem make_machine_precision_case(const SchemeParameters& params) {
  const double l = params.length;
  Separable sh;
  sh.s = [](double t) { return t; };
  sh.ds = [](double) { return 1.0; };
  sh.d2s = [](double) { return 0.0; };
  sh.g = [l](double x) { return x * (l - x); };
  sh.dg = [l](double x) { return l - 2.0 * x; };
  sh.d2g = [](double) { return -2.0; };
  const double spatial = l * l * l / 3.0;
  return assemble(kMachinePrecisionCase, "machine_precision", params, sh,
                  [spatial](double t) { return t * t * spatial; });
}

ProblemData manufacture(const ExactField& u, const ExactField& v,
                        std::function<double(double)> nonlocal, const SchemeParameters& params) {
  ProblemData d;
  const double alpha = params.alpha, beta = params.beta, gamma = params.gamma,
               delta = params.delta, a1 = params.a1, a2 = params.a2;
  d.forcing.f1 = [=](double x, double t) {
    return u.dtt(x, t) - (alpha + beta * nonlocal(t)) * u.dxx(x, t) + a1 * v.dx(x, t);
  };
  d.forcing.f2 = [=](double x, double t) {
    return v.dtt(x, t) - gamma * v.dxx(x, t) + delta * v.value(x, t) - a2 * u.dx(x, t);
  };
  auto at0 = [](const SpaceTimeFunction& f) { return [f](double x) { return f(x, 0.0); }; };
  d.initial.phi0 = at0(u.value);
  d.initial.dphi0 = at0(u.dx);
  d.initial.d2phi0 = at0(u.dxx);
  d.initial.phi1 = at0(u.dt);
  d.initial.dphi1 = at0(u.dxt);
  d.initial.psi0 = at0(v.value);
  d.initial.dpsi0 = at0(v.dx);
  d.initial.d2psi0 = at0(v.dxx);
  d.initial.psi1 = at0(v.dt);
  d.initial.dpsi1 = at0(v.dxt);
  return d;
}

IntegrationOptions error_quadrature() {
  IntegrationOptions o;
  o.tol = 1e-6;
  o.abs_tol = 1e-26;
  return o;
}

double l2_difference(const SpaceTimeFunction& exact, double t, const SpectralCoefficients& c,
                     const IntegrationOptions& options) {
  const std::size_t n = c.size();
  std::vector<double> phi(n);
  const double l = c.length();
  // Differences below a few hundred ulps of the fields themselves are rounding
  // noise; a relative tolerance on them would never be met.
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) scale += std::abs(c[i]) * std::sqrt(l) * legendre_norm_factor(static_cast<int>(i) + 1);
  for (int j = 0; j <= 16; ++j) scale = std::max(scale, std::abs(exact(l * j / 16.0, t)));
  IntegrationOptions opts = options;
  const double noise = 256.0 * std::numeric_limits<double>::epsilon() * scale;
  opts.abs_tol = std::max(opts.abs_tol, noise * noise * l);
  const double sq = integrate(
      [&](double x) {
        eval_phi_all(x, l, phi, {});
        double num = 0.0;
        for (std::size_t i = 0; i < n; ++i) num += c[i] * phi[i];
        const double d = exact(x, t) - num;
        return d * d;
      },
      Interval(0.0, l), opts);
  return std::sqrt(std::max(sq, 0.0));
}

LayerErrors layer_errors(const BenchmarkProblem& problem, const TimeStepState& state, double t,
                         const IntegrationOptions& options) {
  return {l2_difference(problem.u.value, t, state.u_curr, options),
          l2_difference(problem.v.value, t, state.v_curr, options)};
}

LayerErrors derivative_errors(const BenchmarkProblem& problem, const SpectralCoefficients& u_next,
                              const SpectralCoefficients& u_prev,
                              const SpectralCoefficients& v_next,
                              const SpectralCoefficients& v_prev, double t, double tau,
                              const IntegrationOptions& options) {
  auto central = [tau](const SpectralCoefficients& next, const SpectralCoefficients& prev) {
    SpectralCoefficients d = next;
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = (next[i] - prev[i]) / (2.0 * tau);
    return d;
  };
  // Rounding in the layers is amplified by 1 / tau in the difference quotient.
  auto with_floor = [&](const SpectralCoefficients& next) {
    const double l = next.length();
    double scale = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i)
      scale += std::abs(next[i]) * std::sqrt(l) * legendre_norm_factor(static_cast<int>(i) + 1);
    IntegrationOptions opts = options;
    const double noise = 256.0 * std::numeric_limits<double>::epsilon() * scale / tau;
    opts.abs_tol = std::max(opts.abs_tol, noise * noise * l);
    return opts;
  };
  return {l2_difference(problem.u.dt, t, central(u_next, u_prev), with_floor(u_next)),
          l2_difference(problem.v.dt, t, central(v_next, v_prev), with_floor(v_next))};
}

}  // namespace timoshenko
