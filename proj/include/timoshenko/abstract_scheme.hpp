#pragma once

#include <Eigen/Dense>
#include <array>
#include <functional>
#include <random>
#include <vector>

#include "timoshenko/execution.hpp"
#include "timoshenko/galerkin.hpp"

namespace timoshenko {

/// Finite-dimensional stand-ins for the operators of
///   u'' + (alpha + beta <A u, u>) A u + a1 B v = f1
///   v'' + gamma A v + delta C v + a2 B u       = f2
/// with A SPD, C symmetric PSD and ||B x||^2 <= b0^2 <A x, x>.
struct OperatorTriple {
  Eigen::MatrixXd a;
  Eigen::MatrixXd b;
  Eigen::MatrixXd c;
  double nu = 0.0;  // smallest eigenvalue of A
  double b0 = 0.0;  // subordination constant of B with respect to A

  std::size_t dimension() const { return static_cast<std::size_t>(a.rows()); }

  /// Checks symmetry/definiteness and fills nu and b0.
  static OperatorTriple make(Eigen::MatrixXd a, Eigen::MatrixXd b, Eigen::MatrixXd c);
};

/// Smallest b with ||B x||^2 <= b^2 <A x, x> for all x: the square root of the
/// largest eigenvalue of A^{-1/2} B^T B A^{-1/2}. Throws if A is not SPD.
double subordination_constant(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b);

/// Principal square root and inverse square root of an SPD matrix.
Eigen::MatrixXd spd_sqrt(const Eigen::MatrixXd& m);
Eigen::MatrixXd spd_inverse_sqrt(const Eigen::MatrixXd& m);

struct AbstractParameters {
  double alpha = 1.0;
  double beta = 1.0;
  double gamma = 1.0;
  double delta = 1.0;
  double a1 = 1.0;
  double a2 = 1.0;
  double tau = 0.01;

  void validate() const;
};

struct AbstractState {
  int k = 0;
  Eigen::VectorXd u_prev, u_curr;
  Eigen::VectorXd v_prev, v_curr;
  double q = 0.0;  // alpha + beta <A u^k, u^k>
};

using VectorForcing = std::function<Eigen::VectorXd(double)>;

/// u^0 = phi0, v^0 = psi0 and the second-order Taylor layer 1.
AbstractState starting_vectors(const Eigen::VectorXd& phi0, const Eigen::VectorXd& phi1,
                               const Eigen::VectorXd& psi0, const Eigen::VectorXd& psi1,
                               const OperatorTriple& triple, const Eigen::VectorXd& f1_at_0,
                               const Eigen::VectorXd& f2_at_0, const AbstractParameters& params);

/// One layer of the symmetric three-layer scheme:
///   (I + tau^2/2 q_k A)(u^{k+1} + u^{k-1}) = tau^2 (f1_k - a1 B v^k) + 2 u^k
///   (I + tau^2/2 L)(v^{k+1} + v^{k-1})     = tau^2 (f2_k - a2 B u^k) + 2 v^k
/// with L = gamma A + delta C, both solved by Cholesky.
AbstractState abstract_step(const AbstractState& state, const OperatorTriple& triple,
                            const Eigen::VectorXd& f1_k, const Eigen::VectorXd& f2_k,
                            const AbstractParameters& params,
                            Execution execution = Execution::serial);

AbstractState abstract_step(const AbstractState& state, const OperatorTriple& triple,
                            const VectorForcing& f1, const VectorForcing& f2,
                            const AbstractParameters& params,
                            Execution execution = Execution::serial);

/// The quantities kept bounded by the scheme.
struct AbstractMonitors {
  double du = 0.0;      // ||u^k - u^{k-1}|| / tau
  double dv = 0.0;      // ||v^k - v^{k-1}|| / tau
  double au = 0.0;      // <A u^k, u^k>^{1/2}
  double lv = 0.0;      // <L v^k, v^k>^{1/2}
  double au_norm = 0.0; // ||A u^k||
  double a_du = 0.0;    // <A (u^k - u^{k-1}), u^k - u^{k-1}>^{1/2} / tau

  std::array<double, 6> values() const { return {du, dv, au, lv, au_norm, a_du}; }
};

AbstractMonitors boundedness_monitor(const AbstractState& state, const OperatorTriple& triple,
                                     const AbstractParameters& params);

struct AbstractInitialData {
  Eigen::VectorXd phi0, phi1, psi0, psi1;
  VectorForcing f1, f2;
};

struct AbstractRunSummary {
  AbstractState final_state;
  std::array<double, 6> running_max{};
  int steps = 0;
};

/// Starting vectors and steps up to layer `steps`, tracking the running maxima
/// of the monitors over layers 1..steps.
AbstractRunSummary abstract_march(const OperatorTriple& triple, const AbstractInitialData& data,
                                  const AbstractParameters& params, int steps,
                                  Execution execution = Execution::serial);

struct TripleSpec {
  double spectrum_min = 1.0;   // eigenvalues of A, log-uniform
  double spectrum_max = 50.0;
  double subordination = 1.0;  // target b0
  double c_norm = 1.0;         // spectral norm of C
};

/// A = Q^T D Q with log-uniform D; C = G G^T scaled to c_norm; B Gaussian,
/// rescaled to the target subordination constant.
OperatorTriple random_triple(std::size_t dimension, const TripleSpec& spec, std::mt19937_64& rng);

/// Random Cauchy data scaled so that <A phi0, phi0> and <A psi0, psi0> are
/// about one, with smooth periodic forcings f_j(t) = g_j cos(2 pi t + theta_j).
AbstractInitialData random_initial_data(const OperatorTriple& triple, std::mt19937_64& rng);

/// Running maxima of the six monitors over [0, final_time] for each n in
/// steps_grid, plus the relative spread (max - min) / max of every quantity
/// across the grid.
struct BoundednessStudy {
  std::vector<int> steps;
  std::vector<std::array<double, 6>> running_max;
  std::array<double, 6> spread{};

  double worst_spread() const;
};

BoundednessStudy boundedness_study(const OperatorTriple& triple, const AbstractInitialData& data,
                                   AbstractParameters params, double final_time,
                                   const std::vector<int>& steps_grid,
                                   Execution execution = Execution::serial);

/// The Legendre-Galerkin system written as an abstract triple. Coordinates are
/// y = M^{1/2} c with M the L2 mass matrix of {phi_m}, so that the Euclidean
/// product of y is the L2 product of the expansions:
///   A = M^{-1}, B = M^{-1/2} (l/2) B_N M^{-1/2}, C = I, a2 -> -a2.
struct SpectralInstance {
  OperatorTriple triple;
  Eigen::MatrixXd to_abstract;      // M^{1/2}
  Eigen::MatrixXd to_coefficients;  // M^{-1/2}
  double a2_sign = -1.0;
};
SpectralInstance spectral_instance(std::size_t modes, double length);

}  // namespace timoshenko
