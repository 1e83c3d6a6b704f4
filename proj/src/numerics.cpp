#include "janglab/numerics.hpp"

#include <algorithm>
#include <cmath>

namespace janglab {

double central_derivative(const ScalarFn& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

double richardson_derivative(const ScalarFn& f, double x, double h) {
  const double d_h = central_derivative(f, x, h);
  const double d_h2 = central_derivative(f, x, 0.5 * h);
  return (4.0 * d_h2 - d_h) / 3.0;
}

double richardson_second_derivative(const ScalarFn& f, double x, double h) {
  auto second = [&](double step) {
    return (f(x + step) - 2.0 * f(x) + f(x - step)) / (step * step);
  };
  return (4.0 * second(0.5 * h) - second(h)) / 3.0;
}

namespace {

// Gauss-Kronrod 15-point rule: Kronrod nodes/weights plus the embedded
// 7-point Gauss weights (positive half, symmetric).
constexpr double kKronrodNodes[8] = {
    0.0,
    0.2077849550078985,
    0.4058451513773972,
    0.5860872354676911,
    0.7415311855993945,
    0.8648644233597691,
    0.9491079123427585,
    0.9914553711208126};
constexpr double kKronrodWeights[8] = {
    0.2094821410847278,
    0.2044329400752989,
    0.1903505780647854,
    0.1690047266392679,
    0.1406532597155259,
    0.1047900103222502,
    0.0630920926299785,
    0.0229353220105292};
constexpr double kGaussWeights[4] = {
    0.4179591836734694,
    0.3818300505051189,
    0.2797053914892767,
    0.1294849661688697};

struct GkResult {
  double value;
  double error;
};

GkResult gk15(const ScalarFn& f, double a, double b) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f0 = f(mid);
  double kronrod = kKronrodWeights[0] * f0;
  double gauss = kGaussWeights[0] * f0;
  for (int i = 1; i < 8; ++i) {
    const double dx = half * kKronrodNodes[i];
    const double fsum = f(mid - dx) + f(mid + dx);
    kronrod += kKronrodWeights[i] * fsum;
    if (i % 2 == 0) gauss += kGaussWeights[i / 2] * fsum;
  }
  kronrod *= half;
  gauss *= half;
  return {kronrod, std::abs(kronrod - gauss)};
}

double integrate_recursive(const ScalarFn& f, double a, double b, double tol,
                           int depth, int max_depth) {
  const GkResult r = gk15(f, a, b);
  if (r.error <= tol || r.error <= 1e-16 * std::abs(r.value)) return r.value;
  if (depth >= max_depth)
    throw std::runtime_error("integrate: adaptive quadrature did not converge");
  const double mid = 0.5 * (a + b);
  return integrate_recursive(f, a, mid, 0.5 * tol, depth + 1, max_depth) +
         integrate_recursive(f, mid, b, 0.5 * tol, depth + 1, max_depth);
}

}  // namespace

double integrate(const ScalarFn& f, double a, double b, double tol,
                 int max_depth) {
  if (a == b) return 0.0;
  return integrate_recursive(f, a, b, tol, 0, max_depth);
}

double fit_order(const Vec& h, const Vec& err) {
  const int m = static_cast<int>(h.size());
  Mat A(m, 2);
  Vec rhs(m);
  for (int i = 0; i < m; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = std::log(h[i]);
    rhs[i] = std::log(std::max(err[i], 1e-300));
  }
  Vec sol = A.colPivHouseholderQr().solve(rhs);
  return sol[1];
}

Vec solve_tridiagonal(Vec lower, Vec diag, Vec upper, Vec rhs) {
  const int n = static_cast<int>(diag.size());
  for (int i = 1; i < n; ++i) {
    if (diag[i - 1] == 0.0)
      throw std::runtime_error("solve_tridiagonal: zero pivot");
    const double m = lower[i - 1] / diag[i - 1];
    diag[i] -= m * upper[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  Vec x(n);
  x[n - 1] = rhs[n - 1] / diag[n - 1];
  for (int i = n - 2; i >= 0; --i)
    x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
  return x;
}

double bisect(const ScalarFn& f, double a, double b, double tol) {
  double fa = f(a), fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if (fa * fb > 0.0) throw std::invalid_argument("bisect: no sign change");
  while (b - a > tol) {
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    if (fm == 0.0) return m;
    if (fa * fm < 0.0) {
      b = m;
      fb = fm;
    } else {
      a = m;
      fa = fm;
    }
  }
  return 0.5 * (a + b);
}

CubicSpline::CubicSpline(Vec x, Vec y) : x_(std::move(x)), y_(std::move(y)) {
  const int n = static_cast<int>(x_.size());
  if (n < 4) throw std::invalid_argument("CubicSpline: need at least 4 nodes");
  for (int i = 0; i + 1 < n; ++i)
    if (!(x_[i + 1] > x_[i]))
      throw std::invalid_argument("CubicSpline: nodes must increase");

  Vec h(n - 1);
  for (int i = 0; i < n - 1; ++i) h[i] = x_[i + 1] - x_[i];

  // Solve for second derivatives with not-a-knot end conditions. The
  // boundary rows couple three unknowns; fold the third entry into the
  // tridiagonal structure by eliminating it first.
  Mat A = Mat::Zero(n, n);
  Vec rhs = Vec::Zero(n);
  for (int i = 1; i < n - 1; ++i) {
    A(i, i - 1) = h[i - 1];
    A(i, i) = 2.0 * (h[i - 1] + h[i]);
    A(i, i + 1) = h[i];
    rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h[i] - (y_[i] - y_[i - 1]) / h[i - 1]);
  }
  A(0, 0) = h[1];
  A(0, 1) = -(h[0] + h[1]);
  A(0, 2) = h[0];
  A(n - 1, n - 3) = h[n - 2];
  A(n - 1, n - 2) = -(h[n - 3] + h[n - 2]);
  A(n - 1, n - 1) = h[n - 3];
  Vec m = A.partialPivLu().solve(rhs);

  b_.resize(n - 1);
  c_.resize(n - 1);
  d_.resize(n - 1);
  for (int i = 0; i < n - 1; ++i) {
    c_[i] = 0.5 * m[i];
    d_[i] = (m[i + 1] - m[i]) / (6.0 * h[i]);
    b_[i] = (y_[i + 1] - y_[i]) / h[i] - h[i] * (2.0 * m[i] + m[i + 1]) / 6.0;
  }
}

int CubicSpline::interval(double t) const {
  const int n = static_cast<int>(x_.size());
  if (t <= x_[0]) return 0;
  if (t >= x_[n - 1]) return n - 2;
  auto it = std::upper_bound(x_.data(), x_.data() + n, t);
  return static_cast<int>(it - x_.data()) - 1;
}

double CubicSpline::operator()(double t) const {
  const int i = interval(t);
  const double s = t - x_[i];
  return y_[i] + s * (b_[i] + s * (c_[i] + s * d_[i]));
}

double CubicSpline::d1(double t) const {
  const int i = interval(t);
  const double s = t - x_[i];
  return b_[i] + s * (2.0 * c_[i] + 3.0 * s * d_[i]);
}

double CubicSpline::d2(double t) const {
  const int i = interval(t);
  const double s = t - x_[i];
  return 2.0 * c_[i] + 6.0 * s * d_[i];
}

double CubicSpline::d3(double t) const {
  const int i = interval(t);
  return 6.0 * d_[i];
}

ChebyshevInterpolant::ChebyshevInterpolant(double a, double b, int n_nodes,
                                           const ScalarFn& f)
    : a_(a), b_(b) {
  if (n_nodes < 2) throw std::invalid_argument("ChebyshevInterpolant: n < 2");
  const int n = n_nodes;
  nodes_.resize(n);
  values_.resize(n);
  weights_.resize(n);
  for (int k = 0; k < n; ++k) {
    const double theta = M_PI * k / (n - 1);
    const double xi = std::cos(theta);  // [-1,1], descending
    nodes_[k] = 0.5 * (a + b) + 0.5 * (b - a) * xi;
    values_[k] = f(nodes_[k]);
    weights_[k] = (k % 2 == 0) ? 1.0 : -1.0;
  }
  weights_[0] *= 0.5;
  weights_[n - 1] *= 0.5;
}

double ChebyshevInterpolant::operator()(double t) const {
  double num = 0.0, den = 0.0;
  for (int k = 0; k < nodes_.size(); ++k) {
    const double diff = t - nodes_[k];
    if (diff == 0.0) return values_[k];
    const double w = weights_[k] / diff;
    num += w * values_[k];
    den += w;
  }
  return num / den;
}

PowerFit fit_power_offset(const Vec& x, const Vec& y, double exponent) {
  const int m = static_cast<int>(x.size());
  Mat A(m, 2);
  for (int i = 0; i < m; ++i) {
    A(i, 0) = 1.0;
    A(i, 1) = std::pow(x[i], exponent);
  }
  Vec sol = A.colPivHouseholderQr().solve(y);
  PowerFit fit;
  fit.constant = sol[0];
  fit.coefficient = sol[1];
  fit.exponent = exponent;
  fit.residual = std::sqrt((A * sol - y).squaredNorm() / m);
  return fit;
}

double estimate_difference_exponent(const Vec& x, const Vec& y) {
  const int m = static_cast<int>(x.size());
  if (m < 3) return std::nan("");
  std::vector<double> logs_x, logs_d;
  for (int i = 0; i + 1 < m; ++i) {
    const double dy = y[i] - y[i + 1];
    const double dx = x[i] - x[i + 1];
    if (dy == 0.0 || dx <= 0.0) return std::nan("");
    logs_x.push_back(std::log(x[i]));
    logs_d.push_back(std::log(std::abs(dy)));
  }
  // Differences must keep one sign to look like a power approach.
  for (size_t i = 1; i < logs_d.size(); ++i)
    if ((y[i - 1] - y[i]) * (y[i] - y[i + 1]) <= 0.0) return std::nan("");
  Vec lx = Eigen::Map<Vec>(logs_x.data(), logs_x.size());
  Vec ld = Eigen::Map<Vec>(logs_d.data(), logs_d.size());
  Mat A(lx.size(), 2);
  A.col(0).setOnes();
  A.col(1) = lx;
  Vec sol = A.colPivHouseholderQr().solve(ld);
  return sol[1];
}

double unit_sphere_area(int n) {
  return 2.0 * std::pow(M_PI, 0.5 * n) / std::tgamma(0.5 * n);
}

void gauss_legendre(int m, Vec& nodes, Vec& weights) {
  nodes.resize(m);
  weights.resize(m);
  for (int i = 0; i < m; ++i) {
    // Newton iteration from the Chebyshev guess.
    double x = std::cos(M_PI * (i + 0.75) / (m + 0.5));
    double pp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < m; ++j) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * x * p1 - j * p2) / (j + 1.0);
      }
      pp = m * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = x;
    weights[i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
}

Vec log_spaced(double a, double b, int m) {
  if (a <= 0.0 || b <= 0.0) throw std::invalid_argument("log_spaced: a,b > 0");
  Vec out(m);
  const double la = std::log(a), lb = std::log(b);
  for (int i = 0; i < m; ++i)
    out[i] = std::exp(la + (lb - la) * i / double(m - 1));
  out[0] = a;
  out[m - 1] = b;
  return out;
}

Vec lin_spaced(double a, double b, int m) { return Vec::LinSpaced(m, a, b); }

}  // namespace janglab
