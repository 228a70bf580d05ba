#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "oracles.hpp"
#include "timoshenko/benchmarks.hpp"
#include "timoshenko/errors.hpp"
#include "timoshenko/timestepper.hpp"

using namespace timoshenko;
namespace oracle = timoshenko::testing;

namespace {

constexpr double pi = std::numbers::pi;

ForcingProjections zero_forcing(std::size_t n) {
  return {std::vector<double>(n, 0.0), std::vector<double>(n, 0.0)};
}

TimeStepState random_state(std::size_t n, double length, std::mt19937_64& rng) {
  std::normal_distribution<double> d(0.0, 0.3);
  auto vec = [&] {
    std::vector<double> v(n);
    for (auto& x : v) x = d(rng);
    return SpectralCoefficients(length, v);
  };
  TimeStepState s;
  s.k = 1;
  s.u_prev = vec();
  s.u_curr = vec();
  s.v_prev = vec();
  s.v_curr = vec();
  return s;
}

double max_diff(const SpectralCoefficients& a, const SpectralCoefficients& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

}  // namespace

TEST_CASE("parameter validation") {
  SchemeParameters p;
  CHECK_NOTHROW(p.validate());
  p.beta = 0.0;
  CHECK_NOTHROW(p.validate());
  for (auto mutate : std::vector<std::function<void(SchemeParameters&)>>{
           [](SchemeParameters& q) { q.alpha = 0.0; }, [](SchemeParameters& q) { q.beta = -1.0; },
           [](SchemeParameters& q) { q.gamma = 0.0; }, [](SchemeParameters& q) { q.steps = 1; },
           [](SchemeParameters& q) { q.modes = 0; }, [](SchemeParameters& q) { q.length = -2.0; },
           [](SchemeParameters& q) { q.a1 = std::nan(""); }}) {
    SchemeParameters q;
    mutate(q);
    CHECK_THROWS_AS(q.validate(), ArgumentError);
  }
}

TEST_CASE("compute_q examples") {
  CHECK(compute_q(SpectralCoefficients(2.0, 5), 1.5, 3.0) == 1.5);
  CHECK(compute_q(SpectralCoefficients(2.0, std::vector<double>{1.0, 0.0}), 1.5, 3.0) == 4.5);
  // sin(7 pi x) has 14 half-waves on [0, 2]; 24 modes leave an O(1) gap, the
  // gap closes spectrally and is below 1e-8 from about 36 modes on.
  auto gap = [](std::size_t modes) {
    const auto c = project_onto_basis([](double x) { return std::sin(7 * pi * x); },
                                      [](double x) { return 7 * pi * std::cos(7 * pi * x); }, modes, 2.0);
    return std::abs(compute_q(c, 1.0, 1.0) - (1.0 + 49 * pi * pi));
  };
  CHECK(gap(40) <= 1e-8);
  CHECK(gap(32) < 1e-3 * gap(28));
  CHECK(gap(28) < 1e-2 * gap(24));
}

TEST_CASE("assemble_rhs examples") {
  SchemeParameters p;
  p.modes = 3;
  const auto ops = assemble_operators(3);
  TimeStepState zero;
  zero.u_prev = zero.u_curr = zero.v_prev = zero.v_curr = SpectralCoefficients(2.0, 3);
  const auto z = assemble_rhs(zero, zero_forcing(3), ops, p);
  for (double x : z.rhs_u) CHECK(x == 0.0);
  for (double x : z.rhs_v) CHECK(x == 0.0);

  TimeStepState e1 = zero;
  e1.u_curr[0] = 1.0;
  e1.q = compute_q(e1.u_curr, p.alpha, p.beta);
  const auto r = assemble_rhs(e1, zero_forcing(3), ops, p);
  CHECK(r.rhs_u[0] == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(r.rhs_u[1] == 0.0);
  CHECK(r.rhs_u[2] == doctest::Approx(-2.0 / (5.0 * std::sqrt(21.0))).epsilon(1e-14));
  const double tau = p.tau();
  CHECK(r.shift_u == doctest::Approx(2 * tau * tau * e1.q / 4.0).epsilon(1e-15));
  const double a0 = 4.0 / (2.0 + p.delta * tau * tau);
  CHECK(r.shift_v == doctest::Approx(a0 * tau * tau * p.gamma / 4.0).epsilon(1e-15));
}

TEST_CASE("a1 = 0 decouples the u right-hand side from v") {
  std::mt19937_64 rng(1);
  SchemeParameters p;
  p.modes = 6;
  p.a1 = 0.0;
  const auto ops = assemble_operators(6);
  auto s = random_state(6, 2.0, rng);
  s.q = compute_q(s.u_curr, p.alpha, p.beta);
  const auto before = assemble_rhs(s, zero_forcing(6), ops, p);
  for (std::size_t i = 0; i < 6; ++i) s.v_curr[i] += 1.0 + i;
  const auto after = assemble_rhs(s, zero_forcing(6), ops, p);
  CHECK(before.rhs_u == after.rhs_u);
  CHECK(before.rhs_v != after.rhs_v);
}

TEST_CASE("zero state and zero forcing stay zero") {
  SchemeParameters p;
  p.modes = 5;
  TimeStepState s;
  s.k = 1;
  s.u_prev = s.u_curr = s.v_prev = s.v_curr = SpectralCoefficients(2.0, 5);
  s.q = p.alpha;
  const auto next = step(s, assemble_operators(5), zero_forcing(5), p);
  CHECK(next.k == 2);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(next.u_curr[i] == 0.0);
    CHECK(next.v_curr[i] == 0.0);
  }
  CHECK(next.q == p.alpha);
}

TEST_CASE("zero Cauchy data and forcing give zero starting layers") {
  SchemeParameters p;
  p.modes = 8;
  auto zero = [](double) { return 0.0; };
  InitialData d{zero, zero, zero, zero, zero, zero, zero, zero, zero, zero};
  ForcingSampler f{[](double, double) { return 0.0; }, [](double, double) { return 0.0; }};
  const auto start = initial_layers(d, f, p);
  CHECK(start.state.k == 1);
  CHECK(start.q0 == p.alpha);
  CHECK(start.warnings.empty());
  for (std::size_t i = 0; i < 8; ++i) {
    CHECK(start.state.u_prev[i] == 0.0);
    CHECK(start.state.u_curr[i] == 0.0);
    CHECK(start.state.v_prev[i] == 0.0);
    CHECK(start.state.v_curr[i] == 0.0);
  }
}

TEST_CASE("q at the start equals alpha when u vanishes and beta is zero") {
  SchemeParameters p;
  p.modes = 6;
  p.beta = 0.0;
  auto zero = [](double) { return 0.0; };
  InitialData d{zero, zero, zero, zero, zero,
                [](double x) { return x * (2 - x); }, [](double x) { return 2 - 2 * x; },
                [](double) { return -2.0; }, zero, zero};
  ForcingSampler f{[](double, double) { return 0.0; }, [](double, double) { return 0.0; }};
  const auto start = initial_layers(d, f, p);
  CHECK(start.q0 == p.alpha);
}

TEST_CASE("Test 1 first layer follows the Taylor expansion of sin(pi t / 2)") {
  const auto problem = make_benchmark(1);
  const auto& p = problem.params;
  const double tau = p.tau();
  const auto start = initial_layers(problem.data.initial, problem.data.forcing, p);
  const double lambda = 14.0;
  const auto proj = project_onto_basis(
      [&](double x) { return std::sin(lambda * pi * x / p.length); },
      [&](double x) { return lambda * pi / p.length * std::cos(lambda * pi * x / p.length); },
      static_cast<std::size_t>(p.modes), p.length);
  double diff = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < proj.size(); ++i) {
    diff = std::max(diff, std::abs(start.state.u_curr[i] - tau * pi / 2 * proj[i]));
    scale = std::max(scale, std::abs(proj[i]));
    CHECK(start.state.u_prev[i] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
  }
  CHECK(diff <= tau * tau * scale);
  CHECK(start.warnings.empty());
}

TEST_CASE("incompatible second time derivative is projected with a warning") {
  SchemeParameters p;
  p.modes = 6;
  auto zero = [](double) { return 0.0; };
  InitialData d{zero, zero, zero, zero, zero, zero, zero, zero, zero, zero};
  ForcingSampler f{[](double, double) { return 1.0; }, [](double, double) { return 0.0; }};
  const auto start = initial_layers(d, f, p);
  CHECK(start.warnings.size() == 1);
  CHECK(start.warnings[0].find("phi2") != std::string::npos);
}

TEST_CASE("manufactured trial-space solution is reproduced to rounding") {
  const auto problem = make_machine_precision_case();
  double worst = 0.0;
  const double tau = problem.params.tau();
  std::vector<LayerObserver> obs{[&](const TimeStepState& s) {
    const auto e = layer_errors(problem, s, s.k * tau);
    worst = std::max({worst, e.e1, e.e2});
  }};
  const auto result = run(problem.data, problem.params, obs);
  REQUIRE(result.completed);
  CHECK(worst <= 1e-12);
}

TEST_CASE("one Test 3 step matches a dense reference") {
  auto params = default_parameters(3);
  params.steps = 1024;  // tau = 2^-8 on T = 4
  params.modes = 15;
  const auto problem = make_benchmark(3, params);
  const auto start = initial_layers(problem.data.initial, problem.data.forcing, params);
  const auto& s = start.state;
  const auto ops = assemble_operators(15);
  const double t = s.k * params.tau();
  const auto fp = project_forcing(problem.data.forcing, t, 15, params.length);
  const auto next = step(s, ops, fp, params);

  const Eigen::MatrixXd h = oracle::from_row_major(ops.dense_h(), 15);
  const Eigen::MatrixXd b = oracle::from_row_major(ops.dense_b(), 15);
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(15, 15);
  auto vec = [](const SpectralCoefficients& c) {
    return Eigen::VectorXd(Eigen::Map<const Eigen::VectorXd>(c.values().data(), c.size()));
  };
  const Eigen::VectorXd u = vec(s.u_curr), up = vec(s.u_prev), v = vec(s.v_curr), vp = vec(s.v_prev);
  const Eigen::VectorXd i1 = Eigen::Map<const Eigen::VectorXd>(fp.f1.data(), 15);
  const Eigen::VectorXd i2 = Eigen::Map<const Eigen::VectorXd>(fp.f2.data(), 15);
  const double tau = params.tau(), l = params.length, l2 = l * l;
  const double q = params.alpha + params.beta * u.squaredNorm();
  const double a0 = 4.0 / (2.0 + params.delta * tau * tau);
  const Eigen::VectorXd w1 = (h + 2 * tau * tau * q / l2 * id)
                                 .partialPivLu()
                                 .solve(4 * tau * tau / l2 * i1 + 2 * h * u - 2 * params.a1 * tau * tau / l * b * v);
  const Eigen::VectorXd w2 =
      (h + a0 * tau * tau * params.gamma / l2 * id)
          .partialPivLu()
          .solve(2 * a0 * tau * tau / l2 * i2 + a0 * h * v + a0 * params.a2 * tau * tau / l * b * u);
  const Eigen::VectorXd u_next = w1 - up;
  const Eigen::VectorXd v_next = w2 - vp;
  for (int i = 0; i < 15; ++i) {
    CHECK(std::abs(next.u_curr[i] - u_next[i]) <= 1e-11);
    CHECK(std::abs(next.v_curr[i] - v_next[i]) <= 1e-11);
  }
  CHECK(next.u_prev == s.u_curr);
  CHECK(next.k == 2);
}

TEST_CASE("property: the linear scheme is time-reversible") {
  std::mt19937_64 rng(9);
  for (int modes : {1, 3, 8}) {
    for (int k : {1, 10, 64}) {
      SchemeParameters p;
      p.modes = modes;
      p.beta = 0.0;
      p.steps = 64;
      const auto ops = assemble_operators(static_cast<std::size_t>(modes));
      const auto zf = zero_forcing(static_cast<std::size_t>(modes));
      auto s0 = random_state(static_cast<std::size_t>(modes), p.length, rng);
      s0.q = p.alpha;
      auto s = s0;
      for (int i = 0; i < k; ++i) s = step(s, ops, zf, p);
      TimeStepState back = s;
      std::swap(back.u_prev, back.u_curr);
      std::swap(back.v_prev, back.v_curr);
      for (int i = 0; i < k; ++i) back = step(back, ops, zf, p);
      CHECK(max_diff(back.u_curr, s0.u_prev) <= 1e-9);
      CHECK(max_diff(back.u_prev, s0.u_curr) <= 1e-9);
      CHECK(max_diff(back.v_curr, s0.v_prev) <= 1e-9);
      CHECK(max_diff(back.v_prev, s0.v_curr) <= 1e-9);
    }
  }
}

TEST_CASE("property: q never drops below alpha") {
  auto problem = make_benchmark(2);
  problem.params.modes = 20;
  problem.params.steps = 128;
  double lowest = 1e300;
  std::vector<LayerObserver> obs{[&](const TimeStepState& s) { lowest = std::min(lowest, s.q - problem.params.alpha); }};
  const auto result = run(problem.data, problem.params, obs);
  REQUIRE(result.completed);
  CHECK(lowest >= 0.0);
}

TEST_CASE("property: parallel and serial runs are bit-identical") {
  auto problem = make_benchmark(3);
  problem.params.steps = 256;
  problem.params.modes = 12;
  RunOptions serial, parallel;
  serial.record_trajectory = parallel.record_trajectory = true;
  parallel.execution = Execution::parallel;
  const auto a = run(problem.data, problem.params, {}, serial);
  const auto b = run(problem.data, problem.params, {}, parallel);
  REQUIRE(a.completed);
  REQUIRE(b.completed);
  REQUIRE(a.trajectory.size() == b.trajectory.size());
  for (std::size_t i = 0; i < a.trajectory.size(); ++i) {
    CHECK(a.trajectory[i].u_curr == b.trajectory[i].u_curr);
    CHECK(a.trajectory[i].v_curr == b.trajectory[i].v_curr);
    CHECK(a.trajectory[i].q == b.trajectory[i].q);
  }
}

TEST_CASE("two layers mean exactly one step") {
  auto problem = make_benchmark(1);
  problem.params.steps = 2;
  problem.params.modes = 10;
  int calls = 0;
  std::vector<LayerObserver> obs{[&](const TimeStepState&) { ++calls; }};
  const auto result = run(problem.data, problem.params, obs);
  CHECK(result.completed);
  CHECK(calls == 2);
  CHECK(result.final_state.k == 2);
  CHECK(result.trajectory.empty());
}

TEST_CASE("a failed step keeps the layers computed so far") {
  auto problem = make_benchmark(1);
  problem.params.steps = 16;
  problem.params.modes = 6;
  int calls = 0;
  problem.data.forcing.f1 = [&, f = problem.data.forcing.f1](double x, double t) {
    return t > 0.5 ? std::nan("") : f(x, t);
  };
  std::vector<LayerObserver> obs{[&](const TimeStepState&) { ++calls; }};
  const auto result = run(problem.data, problem.params, obs);
  CHECK_FALSE(result.completed);
  CHECK_FALSE(result.failure.empty());
  CHECK(result.final_state.k >= 8);
  CHECK(calls == result.final_state.k);
}

TEST_CASE("monitors of the zero state vanish") {
  SchemeParameters p;
  p.modes = 4;
  TimeStepState s;
  s.u_prev = s.u_curr = s.v_prev = s.v_curr = SpectralCoefficients(2.0, 4);
  const auto m = spectral_monitors(s, assemble_operators(4), p);
  CHECK(m.du == 0.0);
  CHECK(m.dv == 0.0);
  CHECK(m.au == 0.0);
  CHECK(m.lv == 0.0);
}
