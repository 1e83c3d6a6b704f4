#pragma once

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>
#include <vector>

// Small numerical kernels shared across the library: central differences with
// one Richardson step, adaptive Gauss-Kronrod quadrature, cubic splines,
// Chebyshev interpolation, tridiagonal solves and power-law fits.

namespace janglab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

using ScalarFn = std::function<double(double)>;

/// Central difference (4th order after one Richardson step) of f at x.
double richardson_derivative(const ScalarFn& f, double x, double h);

/// Plain second-order central difference.
double central_derivative(const ScalarFn& f, double x, double h);

/// Central second derivative, one Richardson step.
double richardson_second_derivative(const ScalarFn& f, double x, double h);

/// Adaptive Gauss-Kronrod (G7,K15) on [a,b]. Throws std::runtime_error when
/// the error estimate fails to reach tol within the subdivision budget.
double integrate(const ScalarFn& f, double a, double b, double tol = 1e-12,
                 int max_depth = 48);

/// Least-squares slope of log|err| against log h; used to measure
/// convergence orders.
double fit_order(const Vec& h, const Vec& err);

/// Solve a tridiagonal system in place. lower has size n-1 (sub-diagonal),
/// diag size n, upper size n-1.
Vec solve_tridiagonal(Vec lower, Vec diag, Vec upper, Vec rhs);

/// Bisection for a sign change of f on [a,b]; requires f(a)*f(b) <= 0.
double bisect(const ScalarFn& f, double a, double b, double tol);

/// Cubic spline with not-a-knot end conditions on strictly increasing nodes.
/// Evaluations clamp to the node range. d3() is piecewise constant.
class CubicSpline {
 public:
  CubicSpline() = default;
  CubicSpline(Vec x, Vec y);

  double operator()(double t) const;
  double d1(double t) const;
  double d2(double t) const;
  double d3(double t) const;

 private:
  int interval(double t) const;
  Vec x_, y_, b_, c_, d_;  // y + b*s + c*s^2 + d*s^3 on each interval
};

/// Barycentric interpolation on Chebyshev points of the second kind,
/// spectrally accurate for functions smooth on [a,b].
class ChebyshevInterpolant {
 public:
  ChebyshevInterpolant() = default;
  ChebyshevInterpolant(double a, double b, int n_nodes, const ScalarFn& f);

  double operator()(double t) const;
  const Vec& nodes() const { return nodes_; }

 private:
  double a_ = 0, b_ = 1;
  Vec nodes_, values_, weights_;
};

struct PowerFit {
  double constant = 0;   // extrapolated value
  double coefficient = 0;
  double exponent = 0;   // exponent actually used in the fit
  double residual = 0;   // rms misfit
};

/// Least squares fit  y ~ constant + coefficient * x^exponent  at fixed
/// exponent.
PowerFit fit_power_offset(const Vec& x, const Vec& y, double exponent);

/// Estimate the decay exponent from successive differences of y over a
/// decreasing schedule x. Returns NaN when the differences do not behave
/// like a consistent power.
double estimate_difference_exponent(const Vec& x, const Vec& y);

/// Area of the unit (n-1)-sphere.
double unit_sphere_area(int n);

/// Nodes and weights of m-point Gauss-Legendre quadrature on [-1,1].
void gauss_legendre(int m, Vec& nodes, Vec& weights);

/// log-spaced grid of m points between a and b (inclusive), ascending.
Vec log_spaced(double a, double b, int m);

/// uniformly spaced grid of m points between a and b (inclusive).
Vec lin_spaced(double a, double b, int m);

}  // namespace janglab
