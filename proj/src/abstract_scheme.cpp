#include "timoshenko/abstract_scheme.hpp"

#include <cmath>
#include <algorithm>
#include <future>
#include <numbers>
#include <sstream>

#include "timoshenko/errors.hpp"

namespace timoshenko {

namespace {

void require_square(const Eigen::MatrixXd& m, Eigen::Index n, const char* name) {
  if (m.rows() != n || m.cols() != n) {
    std::ostringstream msg;
    msg << name << " must be " << n << "x" << n << ", got " << m.rows() << "x" << m.cols();
    throw ArgumentError(msg.str());
  }
}

bool is_symmetric(const Eigen::MatrixXd& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return (m - m.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale;
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> spd_eigen(const Eigen::MatrixXd& m,
                                                         const char* name) {
  if (m.rows() != m.cols() || !is_symmetric(m))
    throw ArgumentError(std::string(name) + " must be a symmetric matrix");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(m);
  if (eig.info() != Eigen::Success) throw NumericalError(std::string(name) + ": eigensolver failed");
  if (!(eig.eigenvalues().minCoeff() > 0.0))
    throw ArgumentError(std::string(name) + " is not positive definite");
  return eig;
}

}  // namespace

Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m) {
  const auto eig = spd_eigen(m, "matrix");
  return eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().asDiagonal() *
         eig.eigenvectors().transpose();
}

Eigen::MatrixXd spd_inverse_sqrt(const Eigen::MatrixXd& m) {
  const auto eig = spd_eigen(m, "matrix");
  return eig.eigenvectors() * eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
         eig.eigenvectors().transpose();
}

double subordination_constant(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  if (b.cols() != a.rows()) throw ArgumentError("B and A have incompatible sizes");
  const auto eig = spd_eigen(a, "A");
  const Eigen::MatrixXd a_inv_half = eig.eigenvectors() *
                                     eig.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                                     eig.eigenvectors().transpose();
  const Eigen::MatrixXd ba = b * a_inv_half;
  const Eigen::MatrixXd gram = ba.transpose() * ba;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> g(gram, Eigen::EigenvaluesOnly);
  return std::sqrt(std::max(0.0, g.eigenvalues().maxCoeff()));
}

OperatorTriple OperatorTriple::make(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c) {
  const Eigen::Index n = a.rows();
  if (n == 0) throw ArgumentError("operator triple needs a positive dimension");
  require_square(a, n, "A");
  require_square(b, n, "B");
  require_square(c, n, "C");
  const auto eig = spd_eigen(a, "A");
  if (!is_symmetric(c)) throw ArgumentError("C must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ce(c, Eigen::EigenvaluesOnly);
  if (ce.eigenvalues().minCoeff() < -1e-12 * std::max(1.0, ce.eigenvalues().cwiseAbs().maxCoeff()))
    throw ArgumentError("C must be positive semidefinite");
  OperatorTriple t;
  t.nu = eig.eigenvalues().minCoeff();
  t.b0 = subordination_constant(a, b);
  t.a = std::move(a);
  t.b = std::move(b);
  t.c = std::move(c);
  return t;
}

void AbstractParameters::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ArgumentError(std::string("invalid abstract parameters: ") + what);
  };
  require(alpha > 0.0, "alpha must be positive");
  require(beta >= 0.0, "beta must be non-negative");
  require(gamma > 0.0, "gamma must be positive");
  require(delta >= 0.0, "delta must be non-negative");
  require(tau > 0.0, "tau must be positive");
}

namespace {

double energy(const Eigen::MatrixXd& a, const Eigen::VectorXd& x) { return x.dot(a * x); }

void check_vector(const Eigen::VectorXd& x, Eigen::Index n, const char* name) {
  if (x.size() != n) {
    std::ostringstream msg;
    msg << name << " has length " << x.size() << ", expected " << n;
    throw ArgumentError(msg.str());
  }
}

Eigen::VectorXd cholesky_solve(const Eigen::MatrixXd& m, const Eigen::VectorXd& rhs,
                               const char* which, int k) {
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    std::ostringstream msg;
    msg << "layer " << k << ": Cholesky factorization of the " << which << " system failed";
    throw NumericalError(msg.str());
  }
  return llt.solve(rhs);
}

}  // namespace

AbstractState starting_vectors(const Eigen::VectorXd& phi0, const Eigen::VectorXd& phi1,
                               const Eigen::VectorXd& psi0, const Eigen::VectorXd& psi1,
                               const OperatorTriple& triple, const Eigen::VectorXd& f1_at_0,
                               const Eigen::VectorXd& f2_at_0, const AbstractParameters& params) {
  params.validate();
  const Eigen::Index n = triple.a.rows();
  check_vector(phi0, n, "phi0");
  check_vector(phi1, n, "phi1");
  check_vector(psi0, n, "psi0");
  check_vector(psi1, n, "psi1");
  check_vector(f1_at_0, n, "f1(0)");
  check_vector(f2_at_0, n, "f2(0)");

  const double tau = params.tau;
  const double q0 = params.alpha + params.beta * energy(triple.a, phi0);
  const Eigen::VectorXd phi2 = f1_at_0 - params.a1 * (triple.b * psi0) - q0 * (triple.a * phi0);
  const Eigen::MatrixXd l = params.gamma * triple.a + params.delta * triple.c;
  const Eigen::VectorXd psi2 = f2_at_0 - params.a2 * (triple.b * phi0) - l * psi0;

  AbstractState s;
  s.k = 1;
  s.u_prev = phi0;
  s.v_prev = psi0;
  s.u_curr = phi0 + tau * phi1 + 0.5 * tau * tau * phi2;
  s.v_curr = psi0 + tau * psi1 + 0.5 * tau * tau * psi2;
  s.q = params.alpha + params.beta * energy(triple.a, s.u_curr);
  return s;
}

AbstractState abstract_step(const AbstractState& state, const OperatorTriple& triple,
                            const Eigen::VectorXd& f1_k, const Eigen::VectorXd& f2_k,
                            const AbstractParameters& params, Execution execution) {
  const Eigen::Index n = triple.a.rows();
  check_vector(state.u_curr, n, "u^k");
  check_vector(state.v_curr, n, "v^k");
  check_vector(f1_k, n, "f1_k");
  check_vector(f2_k, n, "f2_k");
  const double tau2 = params.tau * params.tau;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);

  const Eigen::MatrixXd mu = id + 0.5 * tau2 * state.q * triple.a;
  const Eigen::VectorXd ru = tau2 * (f1_k - params.a1 * (triple.b * state.v_curr)) + 2.0 * state.u_curr;
  const Eigen::MatrixXd mv =
      id + 0.5 * tau2 * (params.gamma * triple.a + params.delta * triple.c);
  const Eigen::VectorXd rv = tau2 * (f2_k - params.a2 * (triple.b * state.u_curr)) + 2.0 * state.v_curr;

  Eigen::VectorXd wu, wv;
  if (execution == Execution::parallel) {
    auto second = std::async(std::launch::async,
                             [&] { return cholesky_solve(mv, rv, "v", state.k); });
    wu = cholesky_solve(mu, ru, "u", state.k);
    wv = second.get();
  } else {
    wu = cholesky_solve(mu, ru, "u", state.k);
    wv = cholesky_solve(mv, rv, "v", state.k);
  }

  AbstractState next;
  next.k = state.k + 1;
  next.u_prev = state.u_curr;
  next.v_prev = state.v_curr;
  next.u_curr = wu - state.u_prev;
  next.v_curr = wv - state.v_prev;
  next.q = params.alpha + params.beta * energy(triple.a, next.u_curr);
  return next;
}

AbstractState abstract_step(const AbstractState& state, const OperatorTriple& triple,
                            const VectorForcing& f1, const VectorForcing& f2,
                            const AbstractParameters& params, Execution execution) {
  const double t = state.k * params.tau;
  return abstract_step(state, triple, f1(t), f2(t), params, execution);
}

AbstractMonitors boundedness_monitor(const AbstractState& state, const OperatorTriple& triple,
                                     const AbstractParameters& params) {
  AbstractMonitors m;
  const Eigen::VectorXd du = state.u_curr - state.u_prev;
  const Eigen::VectorXd dv = state.v_curr - state.v_prev;
  const Eigen::VectorXd au = triple.a * state.u_curr;
  const Eigen::MatrixXd l = params.gamma * triple.a + params.delta * triple.c;
  m.du = du.norm() / params.tau;
  m.dv = dv.norm() / params.tau;
  m.au = std::sqrt(std::max(0.0, state.u_curr.dot(au)));
  m.lv = std::sqrt(std::max(0.0, state.v_curr.dot(l * state.v_curr)));
  m.au_norm = au.norm();
  m.a_du = std::sqrt(std::max(0.0, energy(triple.a, du))) / params.tau;
  return m;
}

AbstractRunSummary abstract_march(const OperatorTriple& triple, const AbstractInitialData& data,
                                  const AbstractParameters& params, int steps,
                                  Execution execution) {
  if (steps < 1) throw ArgumentError("abstract_march needs at least one layer");
  AbstractRunSummary summary;
  AbstractState s = starting_vectors(data.phi0, data.phi1, data.psi0, data.psi1, triple,
                                     data.f1(0.0), data.f2(0.0), params);
  auto track = [&](const AbstractState& st) {
    const auto v = boundedness_monitor(st, triple, params).values();
    for (std::size_t i = 0; i < v.size(); ++i)
      summary.running_max[i] = std::max(summary.running_max[i], v[i]);
  };
  track(s);
  while (s.k < steps) {
    s = abstract_step(s, triple, data.f1, data.f2, params, execution);
    track(s);
  }
  summary.final_state = std::move(s);
  summary.steps = steps;
  return summary;
}

OperatorTriple random_triple(std::size_t dimension, const TripleSpec& spec, std::mt19937_64& rng) {
  if (dimension == 0) throw ArgumentError("random_triple: dimension must be positive");
  if (!(spec.spectrum_min > 0.0 && spec.spectrum_max >= spec.spectrum_min))
    throw ArgumentError("random_triple: invalid spectrum range");
  const auto n = static_cast<Eigen::Index>(dimension);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto gaussian = [&](Eigen::Index r, Eigen::Index c) {
    Eigen::MatrixXd m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal(rng);
    return m;
  };

  const Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(gaussian(n, n)).householderQ();
  Eigen::VectorXd d(n);
  const double lo = std::log(spec.spectrum_min), hi = std::log(spec.spectrum_max);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = std::exp(lo + (hi - lo) * unit(rng));
  if (n > 0) d(0) = spec.spectrum_min;  // pin nu
  Eigen::MatrixXd a = q.transpose() * d.asDiagonal() * q;
  a = 0.5 * (a + a.transpose()).eval();

  const Eigen::MatrixXd g = gaussian(n, n);
  Eigen::MatrixXd c = g * g.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ce(c, Eigen::EigenvaluesOnly);
  c *= spec.c_norm / ce.eigenvalues().maxCoeff();
  c = 0.5 * (c + c.transpose()).eval();

  Eigen::MatrixXd b = gaussian(n, n);
  b *= spec.subordination / subordination_constant(a, b);
  return OperatorTriple::make(std::move(a), std::move(b), std::move(c));
}

AbstractInitialData random_initial_data(const OperatorTriple& triple, std::mt19937_64& rng) {
  const auto n = static_cast<Eigen::Index>(triple.dimension());
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  auto draw = [&] {
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x(i) = normal(rng);
    return x;
  };
  auto energy_normalised = [&](Eigen::VectorXd x) {
    const double e = std::sqrt(energy(triple.a, x));
    return e > 0.0 ? Eigen::VectorXd(x / e) : x;
  };
  AbstractInitialData d;
  d.phi0 = energy_normalised(draw());
  d.psi0 = energy_normalised(draw());
  d.phi1 = draw().normalized();
  d.psi1 = draw().normalized();
  const Eigen::VectorXd g1 = draw().normalized(), g2 = draw().normalized();
  const double th1 = phase(rng), th2 = phase(rng);
  d.f1 = [g1, th1](double t) -> Eigen::VectorXd {
    return g1 * std::cos(2.0 * std::numbers::pi * t + th1);
  };
  d.f2 = [g2, th2](double t) -> Eigen::VectorXd {
    return g2 * std::cos(2.0 * std::numbers::pi * t + th2);
  };
  return d;
}

double BoundednessStudy::worst_spread() const {
  return *std::max_element(spread.begin(), spread.end());
}

BoundednessStudy boundedness_study(const OperatorTriple& triple, const AbstractInitialData& data,
                                   AbstractParameters params, double final_time,
                                   const std::vector<int>& steps_grid, Execution execution) {
  if (steps_grid.empty()) throw ArgumentError("boundedness_study needs a non-empty grid");
  if (!(final_time > 0.0)) throw ArgumentError("final_time must be positive");
  BoundednessStudy study;
  study.steps = steps_grid;
  for (int n : steps_grid) {
    params.tau = final_time / n;
    study.running_max.push_back(abstract_march(triple, data, params, n, execution).running_max);
  }
  for (std::size_t q = 0; q < study.spread.size(); ++q) {
    double lo = study.running_max[0][q], hi = lo;
    for (const auto& m : study.running_max) {
      lo = std::min(lo, m[q]);
      hi = std::max(hi, m[q]);
    }
    study.spread[q] = hi > 0.0 ? (hi - lo) / hi : 0.0;
  }
  return study;
}

SpectralInstance spectral_instance(std::size_t modes, double length) {
  const GalerkinOperatorSet ops = assemble_operators(modes);
  const auto n = static_cast<Eigen::Index>(modes);
  const Eigen::MatrixXd h = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                           Eigen::RowMajor>>(ops.dense_h().data(), n, n);
  const Eigen::MatrixXd bn = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic,
                                                            Eigen::RowMajor>>(ops.dense_b().data(), n, n);
  const Eigen::MatrixXd mass = 0.25 * length * length * h;
  SpectralInstance inst;
  inst.to_abstract = spd_sqrt(mass);
  inst.to_coefficients = spd_inverse_sqrt(mass);
  Eigen::MatrixXd a = inst.to_coefficients * inst.to_coefficients;
  a = 0.5 * (a + a.transpose()).eval();
  const Eigen::MatrixXd b = inst.to_coefficients * (0.5 * length * bn) * inst.to_coefficients;
  inst.triple = OperatorTriple::make(std::move(a), b, Eigen::MatrixXd::Identity(n, n));
  return inst;
}

}  // namespace timoshenko
