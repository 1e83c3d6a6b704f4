#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "janglab/numerics.hpp"

// Poincare-ball chart, the background hyperbolic metric b = rho^{-2} delta
// with rho = (1-|x|^2)/2, general symmetric 2-tensor fields with one and two
// derivatives, spherically symmetric initial-data families, and the tensor
// calculus (Christoffel symbols, scalar curvature, traces, divergences)
// everything downstream is built on.

namespace janglab {

/// Point of the unit-ball chart together with its boundary defining function
/// rho = (1-|x|^2)/2. Invariant: 0 < rho <= 1/2.
struct BallPoint {
  Vec x;
  double rho;

  int dim() const { return static_cast<int>(x.size()); }
};

/// Validates |x| < 1 and computes rho. Throws std::domain_error otherwise.
BallPoint ball_point(const Vec& x);

/// Point at the given rho level along a unit direction (defaults to the first
/// coordinate axis).
BallPoint ball_point_at_rho(int n, double rho, const Vec& direction = Vec());

/// Scalar profile of rho with two (optionally three) derivatives. Radial
/// tensors and warp factors are reconstructed from these.
struct RadialProfile {
  ScalarFn value;
  ScalarFn d1;
  ScalarFn d2;
  ScalarFn d3;  // optional; empty when not available

  bool has_d3() const { return static_cast<bool>(d3); }
};

RadialProfile constant_profile(double v);
RadialProfile power_profile(double coefficient, double exponent);
/// coefficient * rho^exponent rebuilt from a sum of such terms.
RadialProfile sum_profiles(RadialProfile a, RadialProfile b);
RadialProfile product_profiles(RadialProfile a, RadialProfile b);
RadialProfile scale_profile(RadialProfile a, double s);
/// Cubic-spline profile through (rho, value) samples; d3 is piecewise const.
RadialProfile spline_profile(const Vec& rho, const Vec& values);

/// rho-profiles of the hyperbolic background in the (drho^2, sigma) split:
/// b = b_rr(rho) drho^2 + b_ss(rho) sigma.
RadialProfile ads_radial_profile();   // rho^{-2}/(1-2 rho)
RadialProfile ads_angular_profile();  // rho^{-2}(1-2 rho)
RadialProfile v0_profile();           // (1-rho)/rho
RadialProfile inverse_rho_profile();  // 1/rho

/// Symmetric 2-tensor field on the chart. The evaluator returns T_{ij}(x);
/// analytic first derivatives d1 (indexed [k](i,j) = dT_ij/dx^k) and second
/// derivatives d2 (indexed [k*n+l](i,j)) are optional -- when absent,
/// consumers fall back to central finite differences with one Richardson
/// step.
class SymTensorField {
 public:
  using Eval = std::function<Mat(const Vec&)>;
  using DerivEval = std::function<std::vector<Mat>(const Vec&)>;

  SymTensorField() = default;
  SymTensorField(int n, Eval value);
  SymTensorField(int n, Eval value, DerivEval d1, DerivEval d2);

  int dim() const { return n_; }
  bool has_analytic_derivatives() const { return static_cast<bool>(d1_); }

  /// Components at x; throws std::invalid_argument if the evaluator returns
  /// an asymmetric matrix.
  Mat operator()(const Vec& x) const;
  std::vector<Mat> d1(const Vec& x) const;
  std::vector<Mat> d2(const Vec& x) const;

  /// First derivatives by finite differences (used when no analytic d1).
  std::vector<Mat> d1_numeric(const Vec& x, double h) const;

 private:
  int n_ = 0;
  Eval value_;
  DerivEval d1_, d2_;
};

SymTensorField euclidean_field(int n);
SymTensorField hyperbolic_field(int n);
/// factor(rho(x)) * T with analytic derivatives when T has them.
SymTensorField scaled_field(SymTensorField T, RadialProfile factor);
/// Spherically symmetric field radial(rho) drho^2 + angular(rho) sigma,
/// reconstructed on the chart with analytic first and second derivatives.
SymTensorField radial_field(int n, RadialProfile radial, RadialProfile angular);
SymTensorField zero_field(int n);

/// rho-profiles of a spherically symmetric initial data set. The optional
/// deviation profiles store e = g - b in closed form; without them the
/// difference of the ~rho^{-2} profiles loses precision near infinity.
struct RadialData {
  RadialProfile g_rr, g_ss;  // metric: g_rr drho^2 + g_ss sigma
  RadialProfile k_rr, k_ss;  // second fundamental form, same split
  std::optional<RadialProfile> e_rr, e_ss;
};

/// Initial data set (M, g, K) in the ball chart with declared decay rate.
struct InitialData {
  int n = 3;
  double tau = 2.0;
  double alpha = 0.0;  // Hoelder exponent, recorded only
  SymTensorField g;
  SymTensorField k;
  std::optional<RadialData> radial;

  bool is_radial() const { return radial.has_value(); }
};

/// Concrete data families.
struct DataFamily {
  enum class Kind {
    pure_ads,
    conformal_perturbation,  // g = (1 + c rho^p) b, K = 0
    tensor_perturbation,     // g = b, K = amplitude rho^p * (mode-dependent)
    radial_table             // profiles supplied directly (CSV or in-memory)
  };

  Kind kind = Kind::pure_ads;
  double c = 0.0;
  double p = 0.0;
  double amplitude = 0.0;
  int mode = 0;  // 0: K ~ b, 1: radial part only, 2: angular part only
  std::optional<RadialData> table;

  static DataFamily pure_ads();
  static DataFamily conformal(double c, double p);
  static DataFamily tensor(double amplitude, int mode, double p);
  static DataFamily from_profiles(RadialData profiles);
};

InitialData make_initial_data(const DataFamily& family, int n, double tau,
                              double alpha = 0.0);

/// Reads a two-column CSV (rho, value) with a mandatory header row.
RadialProfile profile_from_csv(const std::string& path);

// ---------------------------------------------------------------------------
// Tensor calculus

/// Hyperbolic metric with inverse and closed-form Christoffel symbols from
/// the conformal factor.
struct HyperbolicMetric {
  Mat value;
  Mat inverse;
  std::vector<Mat> christoffels;  // [k](i,j)
};
HyperbolicMetric hyperbolic_metric(const BallPoint& x);

/// Default finite-difference step near x: h = max(1e-5, 1e-3 rho). The
/// metric coefficients scale like rho^{-2}, so the step shrinks toward the
/// chart boundary.
double default_fd_step(const BallPoint& x);

/// Inverse through a pivoted factorization; throws std::domain_error unless
/// T is strictly positive definite.
Mat positive_definite_inverse(const Mat& T);

/// Levi-Civita symbols of T at x, analytic derivatives when available,
/// otherwise central differences with one Richardson step. Throws
/// std::domain_error when T is singular/indefinite at x.
std::vector<Mat> christoffels(const SymTensorField& T, const BallPoint& x,
                              double h = 0.0);

/// Pointwise residual |nabla T| of the computed symbols (diagnostic).
double metric_compatibility_residual(const SymTensorField& T,
                                     const BallPoint& x, double h = 0.0);

/// Scalar curvature of T at x by contracted curvature of the Christoffel
/// symbols (analytic derivatives when available, nested finite differences
/// otherwise).
double scalar_curvature(const SymTensorField& T, const BallPoint& x,
                        double h = 0.0);

/// Scalar curvature of the radial metric g_rr drho^2 + g_ss sigma from the
/// profile derivatives (closed form).
double radial_scalar_curvature(int n, const RadialProfile& g_rr,
                               const RadialProfile& g_ss, double rho);

/// Same closed form from raw values (a, a', c, c', c'').
double radial_scalar_curvature_values(int n, double a, double a1, double c,
                                      double c1, double c2);

/// Mean curvature of the level set {rho = rho_level} with respect to the
/// outward (decreasing rho) unit normal; data must be spherically symmetric.
double coordinate_sphere_mean_curvature(const InitialData& data,
                                        double rho_level);

/// Trace of K over the same level set.
double coordinate_sphere_k_trace(const InitialData& data, double rho_level);

/// H - |tr_sphere K| at the level (untrapped when positive).
double untrapped_margin(const InitialData& data, double rho_level);

struct MotsScan {
  std::vector<double> outer;  // roots of H - tr K
  std::vector<double> inner;  // roots of H + tr K
};

/// Sign-change locations of H -+ tr K on [rho_lo, rho_hi] by dense scan and
/// bisection to 1e-10; empty lists when no root.
MotsScan detect_mots(const InitialData& data, double rho_lo, double rho_hi,
                     int scan_cells = 1024);

/// Kernel functions V_0 = (1-rho)/rho, V_i = x^i/rho (i >= 1).
double kernel_function(int index, const BallPoint& x);
Vec kernel_gradient(int index, const BallPoint& x);

struct DecayReport {
  double sup_grr_remainder = 0;   // rho^-(tau+2) |g^rr - rho^2(1-2rho)|
  double sup_metric_decay = 0;    // rho^-tau |g-b|_b
  double sup_k_decay = 0;         // rho^-tau |K|_b
  double sup_warp_offset = 0;     // |u - 1/rho|
  double sup_warp_log_ratio = 0;  // |u_rho/u + 1/rho|
};

/// Sampled decay diagnostics over a log-spaced rho grid (radial data).
DecayReport decay_diagnostics(const InitialData& data, const RadialProfile& u,
                              double rho_lo = 1e-4, double rho_hi = 0.45,
                              int samples = 200);

}  // namespace janglab
