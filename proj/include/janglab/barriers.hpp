#pragma once

#include "janglab/warped_graph.hpp"

// Explicit upper/lower barriers for the generalized Jang equation on the
// annular end {0 < rho <= rho0}: slope profile xi, its exponent function
// gamma, the mixing function F, parameter selection, the barrier integral
// f_+ with its sqrt-singularity at rho0, and the defining differential
// inequality.

namespace janglab {

struct BarrierParameters {
  double rho0;
  double lambda;
};

/// Mixing function F(x, lambda) = lambda (tau - n/2) / (lambda +
/// (1-lambda) x^{tau-n/2}) on [0,1] x (0,1); bounded by tau - n/2 and
/// decreasing in x for tau > n/2.
double barrier_mixing(double n, double tau, double x, double lambda);

/// Sampled estimate of the constant C0 controlling the remainder terms of
/// the asymptotic expansion of (g, K, u) around the exact hyperbolic
/// background, inflated by a safety factor of 2.
double estimate_C0(const InitialData& data, const RadialProfile& u,
                   double rho_lo = 1e-6, double rho_hi = 0.45,
                   int samples = 400);

/// rho0 from bisection on C0 rho + C0 rho^tau = (n-tau)/4 (halved once for
/// margin) and lambda from bisection on F(x0, lambda) = 1/16 with
/// x0 = (3(n-tau)/8)^{1/n}. Throws std::invalid_argument unless
/// tau in (n/2, n).
BarrierParameters choose_parameters(int n, double tau, double c0);

class BarrierSpec {
 public:
  /// sign = +1 builds the upper barrier, -1 the lower one (its negation).
  /// enforce_invariants = false skips the admissibility checks; useful for
  /// probing parameter choices that break the differential inequality.
  BarrierSpec(int n, double tau, double c0, double rho0, double lambda,
              int sign = +1, bool enforce_invariants = true);

  static BarrierSpec make(int n, double tau, double c0, int sign = +1);

  int n() const { return n_; }
  double tau() const { return tau_; }
  double c0() const { return c0_; }
  double rho0() const { return rho0_; }
  double lambda() const { return lambda_; }
  int sign() const { return sign_; }

  /// Slope profile xi(rho) in (0, rho0], with xi(rho0) = 1 (negated for the
  /// lower barrier). Throws std::domain_error for rho > rho0.
  double xi(double rho) const;
  /// xi' via the identity xi' = gamma xi / rho.
  double xi_prime(double rho) const;
  double gamma_exponent(double rho) const;

  /// Barrier value f_+(rho) (or -f_+ for the lower sign) from the cached
  /// interpolant; f(0) = 0 and f extends continuously to rho0.
  double value(double rho) const;
  /// Direct adaptive quadrature, bypassing the cache; used for verification.
  double value_quadrature(double rho) const;

  double derivative(double rho) const;       // xi / sqrt(1 - xi^2)
  double second_derivative(double rho) const;
  double third_derivative(double rho) const;

  /// Radial graph function of the barrier (third derivative included).
  GraphFunction graph(int chart_dim) const;
  RadialProfile profile() const;

 private:
  double xi_upper(double rho) const;
  int n_;
  double tau_, c0_, rho0_, lambda_;
  int sign_;
  ChebyshevInterpolant cache_;  // in t = sqrt(rho0 - rho), where f_+ is smooth
};

struct BarrierInequalityReport {
  bool upper_pass = false;
  bool lower_pass = false;
  double max_lhs = 0;  // most positive value of the upper-barrier left side
  std::vector<double> violating_rho;
  Vec grid;
  Vec lhs;  // upper-barrier left side at each grid point
};

/// Evaluates xi' - (xi/rho)(n - xi^2 - C0 rho) + C0 rho^{tau-1} on the grid;
/// the upper barrier passes iff it is strictly negative everywhere, and the
/// lower-barrier report is its term-by-term negation.
BarrierInequalityReport verify_barrier_inequality(const BarrierSpec& spec,
                                                  const Vec& grid);

}  // namespace janglab
