#include "timoshenko/legendre.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "timoshenko/errors.hpp"

namespace timoshenko {

namespace {

void check_degree(int m) {
  if (m < 0 || m > kMaxPolynomialDegree) {
    std::ostringstream msg;
    msg << "polynomial degree " << m << " outside [0, " << kMaxPolynomialDegree << "]";
    throw ArgumentError(msg.str());
  }
}

// Maps x in [0, length] to [-1, 1]; a few ulps of slack absorb grid round-off.
double to_reference(double x, double length) {
  if (!(length > 0.0)) throw ArgumentError("interval length must be positive");
  const double slack = 8.0 * std::numeric_limits<double>::epsilon() * length;
  if (!(x >= -slack && x <= length + slack)) {
    std::ostringstream msg;
    msg << "x = " << x << " outside [0, " << length << "]";
    throw DomainError(msg.str());
  }
  return std::clamp(2.0 * x / length - 1.0, -1.0, 1.0);
}

}  // namespace

Interval::Interval(double a_, double b_) : a(a_), b(b_) {
  if (!(a < b)) throw ArgumentError("interval requires a < b");
}

LegendreValue legendre(int m, double xi) {
  check_degree(m);
  if (m == 0) return {1.0, 0.0};
  double p_prev = 1.0, p = xi;
  double d_prev = 0.0, d = 1.0;
  for (int j = 1; j < m; ++j) {
    const double p_next = ((2.0 * j + 1.0) * xi * p - j * p_prev) / (j + 1.0);
    const double d_next = d_prev + (2.0 * j + 1.0) * p;
    p_prev = p;
    p = p_next;
    d_prev = d;
    d = d_next;
  }
  return {p, d};
}

double eval_shifted_legendre(int m, double x, double length) {
  check_degree(m);
  return legendre(m, to_reference(x, length)).value;
}

double eval_shifted_legendre_derivative(int m, double x, double length) {
  check_degree(m);
  return legendre(m, to_reference(x, length)).derivative * 2.0 / length;
}

void eval_shifted_legendre_all(double x, double length, std::span<double> values) {
  if (values.empty()) return;
  check_degree(static_cast<int>(values.size()) - 1);
  const double xi = to_reference(x, length);
  values[0] = 1.0;
  if (values.size() > 1) values[1] = xi;
  for (std::size_t j = 1; j + 1 < values.size(); ++j) {
    const double jd = static_cast<double>(j);
    values[j + 1] = ((2.0 * jd + 1.0) * xi * values[j] - jd * values[j - 1]) / (jd + 1.0);
  }
}

QuadratureRule gauss_legendre_rule(int order) {
  if (order < 1) throw ArgumentError("quadrature order must be >= 1");
  check_degree(order);
  QuadratureRule rule;
  rule.order = order;
  rule.nodes.assign(order, 0.0);
  rule.weights.assign(order, 0.0);

  // Roots come in +/- pairs; solve for the positive half and mirror.
  const int half = (order + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
    LegendreValue p = legendre(order, x);
    for (int iter = 0; iter < 100; ++iter) {
      const double dx = p.value / p.derivative;
      x -= dx;
      p = legendre(order, x);
      if (std::abs(dx) <= 1e-16 && std::abs(p.value) <= 1e-15) break;
    }
    if (order % 2 == 1 && i == half - 1) x = 0.0;
    p = legendre(order, x);
    const double w = 2.0 / ((1.0 - x * x) * p.derivative * p.derivative);
    rule.nodes[order - 1 - i] = x;
    rule.nodes[i] = -x;
    rule.weights[order - 1 - i] = w;
    rule.weights[i] = w;
  }
  return rule;
}

namespace {

struct Panel {
  double a;
  double b;
  int depth;
  std::vector<double> estimate;
};

template <class Eval>
std::vector<double> integrate_adaptive(Eval&& eval, std::size_t components,
                                       const Interval& interval,
                                       const IntegrationOptions& options) {
  if (!(options.tol > 0.0)) throw ArgumentError("integration tolerance must be positive");
  if (options.abs_tol < 0.0) throw ArgumentError("absolute tolerance must be non-negative");
  if (options.initial_panels < 1) throw ArgumentError("initial_panels must be >= 1");
  const QuadratureRule rule = gauss_legendre_rule(options.order);

  std::vector<double> values(components);
  std::vector<double> abs_sum(components, 0.0);
  std::vector<double> panel_abs(components, 0.0);

  // Returns the largest sum of |w f| over the components, the scale below
  // which a change is indistinguishable from rounding.
  auto panel_sum = [&](double a, double b, std::vector<double>& out, bool track_abs) {
    const double mid = 0.5 * (a + b);
    const double half = 0.5 * (b - a);
    std::fill(out.begin(), out.end(), 0.0);
    std::fill(panel_abs.begin(), panel_abs.end(), 0.0);
    for (int i = 0; i < rule.order; ++i) {
      eval(mid + half * rule.nodes[i], std::span<double>(values));
      const double w = rule.weights[i] * half;
      for (std::size_t c = 0; c < components; ++c) {
        out[c] += w * values[c];
        panel_abs[c] += w * std::abs(values[c]);
      }
    }
    if (track_abs)
      for (std::size_t c = 0; c < components; ++c) abs_sum[c] += panel_abs[c];
    return *std::max_element(panel_abs.begin(), panel_abs.end());
  };

  const double total_length = interval.length();
  std::vector<Panel> stack;
  stack.reserve(64);
  const double width = total_length / options.initial_panels;
  for (int p = options.initial_panels - 1; p >= 0; --p) {
    const double a = interval.a + p * width;
    const double b = (p + 1 == options.initial_panels) ? interval.b : a + width;
    Panel panel{a, b, 0, std::vector<double>(components)};
    panel_sum(a, b, panel.estimate, true);
    stack.push_back(std::move(panel));
  }
  const double scale = *std::max_element(abs_sum.begin(), abs_sum.end());
  const double density = std::max(options.tol * scale, options.abs_tol) / total_length;

  std::vector<double> total(components, 0.0);
  std::vector<double> left(components), right(components);
  bool depth_exceeded = false;
  long panels = options.initial_panels;

  while (!stack.empty()) {
    Panel panel = std::move(stack.back());
    stack.pop_back();
    const double mid = 0.5 * (panel.a + panel.b);
    const double noise = 64.0 * std::numeric_limits<double>::epsilon() *
                         (panel_sum(panel.a, mid, left, false) + panel_sum(mid, panel.b, right, false));
    panels += 2;

    double change = 0.0;
    for (std::size_t c = 0; c < components; ++c)
      change = std::max(change, std::abs(left[c] + right[c] - panel.estimate[c]));

    const bool converged = change <= density * (panel.b - panel.a) || change <= noise;
    const bool out_of_budget = panel.depth + 1 >= options.max_depth || panels >= options.max_panels;
    if (converged || out_of_budget) {
      if (!converged) depth_exceeded = true;
      for (std::size_t c = 0; c < components; ++c) total[c] += left[c] + right[c];
      continue;
    }
    stack.push_back(Panel{mid, panel.b, panel.depth + 1, right});
    stack.push_back(Panel{panel.a, mid, panel.depth + 1, left});
  }

  if (depth_exceeded) {
    std::ostringstream msg;
    msg << "adaptive quadrature on [" << interval.a << ", " << interval.b
        << "] did not converge within depth " << options.max_depth << " / "
        << options.max_panels << " panels";
    throw ConvergenceError(msg.str(), total.empty() ? 0.0 : total[0]);
  }
  for (double v : total)
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "integrand is not finite on [" << interval.a << ", " << interval.b << "]";
      throw NumericalError(msg.str());
    }
  return total;
}

}  // namespace

double integrate(const std::function<double(double)>& f, const Interval& interval,
                 const IntegrationOptions& options) {
  auto eval = [&f](double x, std::span<double> out) { out[0] = f(x); };
  return integrate_adaptive(eval, 1, interval, options)[0];
}

std::vector<double> integrate_vector(const VectorIntegrand& f, std::size_t components,
                                     const Interval& interval,
                                     const IntegrationOptions& options) {
  if (components == 0) return {};
  return integrate_adaptive(f, components, interval, options);
}

}  // namespace timoshenko
