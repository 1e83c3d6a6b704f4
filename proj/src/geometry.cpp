#include "janglab/geometry.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

namespace janglab {

BallPoint ball_point(const Vec& x) {
  const double r2 = x.squaredNorm();
  if (!(r2 < 1.0))
    throw std::domain_error("ball_point: |x| >= 1 is outside the chart");
  return BallPoint{x, 0.5 * (1.0 - r2)};
}

BallPoint ball_point_at_rho(int n, double rho, const Vec& direction) {
  if (!(rho > 0.0 && rho <= 0.5))
    throw std::domain_error("ball_point_at_rho: rho must lie in (0, 1/2]");
  Vec dir = direction;
  if (dir.size() == 0) {
    dir = Vec::Zero(n);
    dir[0] = 1.0;
  }
  dir.normalize();
  return ball_point(std::sqrt(1.0 - 2.0 * rho) * dir);
}

RadialProfile constant_profile(double v) {
  return {[v](double) { return v; }, [](double) { return 0.0; },
          [](double) { return 0.0; }, [](double) { return 0.0; }};
}

RadialProfile power_profile(double coefficient, double exponent) {
  const double c = coefficient, p = exponent;
  return {[c, p](double rho) { return c * std::pow(rho, p); },
          [c, p](double rho) { return c * p * std::pow(rho, p - 1.0); },
          [c, p](double rho) { return c * p * (p - 1.0) * std::pow(rho, p - 2.0); },
          [c, p](double rho) {
            return c * p * (p - 1.0) * (p - 2.0) * std::pow(rho, p - 3.0);
          }};
}

RadialProfile sum_profiles(RadialProfile a, RadialProfile b) {
  RadialProfile out;
  out.value = [a, b](double r) { return a.value(r) + b.value(r); };
  out.d1 = [a, b](double r) { return a.d1(r) + b.d1(r); };
  out.d2 = [a, b](double r) { return a.d2(r) + b.d2(r); };
  if (a.has_d3() && b.has_d3())
    out.d3 = [a, b](double r) { return a.d3(r) + b.d3(r); };
  return out;
}

RadialProfile product_profiles(RadialProfile a, RadialProfile b) {
  RadialProfile out;
  out.value = [a, b](double r) { return a.value(r) * b.value(r); };
  out.d1 = [a, b](double r) {
    return a.d1(r) * b.value(r) + a.value(r) * b.d1(r);
  };
  out.d2 = [a, b](double r) {
    return a.d2(r) * b.value(r) + 2.0 * a.d1(r) * b.d1(r) +
           a.value(r) * b.d2(r);
  };
  if (a.has_d3() && b.has_d3())
    out.d3 = [a, b](double r) {
      return a.d3(r) * b.value(r) + 3.0 * a.d2(r) * b.d1(r) +
             3.0 * a.d1(r) * b.d2(r) + a.value(r) * b.d3(r);
    };
  return out;
}

RadialProfile scale_profile(RadialProfile a, double s) {
  RadialProfile out;
  out.value = [a, s](double r) { return s * a.value(r); };
  out.d1 = [a, s](double r) { return s * a.d1(r); };
  out.d2 = [a, s](double r) { return s * a.d2(r); };
  if (a.has_d3()) out.d3 = [a, s](double r) { return s * a.d3(r); };
  return out;
}

RadialProfile spline_profile(const Vec& rho, const Vec& values) {
  auto spline = std::make_shared<CubicSpline>(rho, values);
  return {[spline](double r) { return (*spline)(r); },
          [spline](double r) { return spline->d1(r); },
          [spline](double r) { return spline->d2(r); },
          [spline](double r) { return spline->d3(r); }};
}

RadialProfile ads_radial_profile() {
  // rho^{-2} (1-2rho)^{-1}
  auto f = [](double r) { return 1.0 / (r * r * (1.0 - 2.0 * r)); };
  auto f1 = [](double r) {
    const double q = 1.0 - 2.0 * r;
    return (-2.0 / (r * r * r)) / q + 2.0 / (r * r * q * q);
  };
  auto f2 = [](double r) {
    const double q = 1.0 - 2.0 * r;
    return 6.0 / (r * r * r * r * q) - 8.0 / (r * r * r * q * q) +
           8.0 / (r * r * q * q * q);
  };
  auto f3 = [](double r) {
    const double q = 1.0 - 2.0 * r;
    return -24.0 / (std::pow(r, 5) * q) + 36.0 / (std::pow(r, 4) * q * q) -
           48.0 / (std::pow(r, 3) * q * q * q) +
           48.0 / (r * r * q * q * q * q);
  };
  return {f, f1, f2, f3};
}

RadialProfile ads_angular_profile() {
  // rho^{-2} (1-2rho)
  auto f = [](double r) { return (1.0 - 2.0 * r) / (r * r); };
  auto f1 = [](double r) { return -2.0 * (1.0 - 2.0 * r) / (r * r * r) - 2.0 / (r * r); };
  auto f2 = [](double r) { return 6.0 * (1.0 - 2.0 * r) / std::pow(r, 4) + 8.0 / (r * r * r); };
  auto f3 = [](double r) {
    return -24.0 * (1.0 - 2.0 * r) / std::pow(r, 5) - 36.0 / std::pow(r, 4);
  };
  return {f, f1, f2, f3};
}

RadialProfile v0_profile() {
  return {[](double r) { return (1.0 - r) / r; },
          [](double r) { return -1.0 / (r * r); },
          [](double r) { return 2.0 / (r * r * r); },
          [](double r) { return -6.0 / (r * r * r * r); }};
}

RadialProfile inverse_rho_profile() {
  return {[](double r) { return 1.0 / r; },
          [](double r) { return -1.0 / (r * r); },
          [](double r) { return 2.0 / (r * r * r); },
          [](double r) { return -6.0 / (r * r * r * r); }};
}

// ---------------------------------------------------------------------------

SymTensorField::SymTensorField(int n, Eval value)
    : n_(n), value_(std::move(value)) {}

SymTensorField::SymTensorField(int n, Eval value, DerivEval d1, DerivEval d2)
    : n_(n), value_(std::move(value)), d1_(std::move(d1)), d2_(std::move(d2)) {}

Mat SymTensorField::operator()(const Vec& x) const {
  Mat T = value_(x);
  const double asym = (T - T.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10 * (1.0 + T.cwiseAbs().maxCoeff()))
    throw std::invalid_argument("SymTensorField: evaluator is not symmetric");
  return T;
}

std::vector<Mat> SymTensorField::d1(const Vec& x) const {
  if (d1_) return d1_(x);
  return d1_numeric(x, default_fd_step(ball_point(x)));
}

std::vector<Mat> SymTensorField::d2(const Vec& x) const {
  if (d2_) return d2_(x);
  throw std::runtime_error(
      "SymTensorField: no analytic second derivatives available");
}

std::vector<Mat> SymTensorField::d1_numeric(const Vec& x, double h) const {
  std::vector<Mat> out(n_);
  for (int k = 0; k < n_; ++k) {
    Vec e = Vec::Zero(n_);
    e[k] = 1.0;
    auto diff = [&](double step) {
      return ((value_(x + step * e) - value_(x - step * e)) / (2.0 * step))
          .eval();
    };
    Mat dh = diff(h), dh2 = diff(0.5 * h);
    out[k] = (4.0 * dh2 - dh) / 3.0;
  }
  return out;
}

SymTensorField euclidean_field(int n) {
  return SymTensorField(
      n, [n](const Vec&) { return Mat::Identity(n, n).eval(); },
      [n](const Vec&) { return std::vector<Mat>(n, Mat::Zero(n, n)); },
      [n](const Vec&) { return std::vector<Mat>(n * n, Mat::Zero(n, n)); });
}

SymTensorField zero_field(int n) {
  return SymTensorField(
      n, [n](const Vec&) { return Mat::Zero(n, n).eval(); },
      [n](const Vec&) { return std::vector<Mat>(n, Mat::Zero(n, n)); },
      [n](const Vec&) { return std::vector<Mat>(n * n, Mat::Zero(n, n)); });
}

SymTensorField hyperbolic_field(int n) {
  auto rho_of = [](const Vec& x) { return 0.5 * (1.0 - x.squaredNorm()); };
  return SymTensorField(
      n,
      [n, rho_of](const Vec& x) {
        const double rho = rho_of(x);
        return (Mat::Identity(n, n) / (rho * rho)).eval();
      },
      [n, rho_of](const Vec& x) {
        const double rho = rho_of(x);
        std::vector<Mat> out(n);
        for (int k = 0; k < n; ++k)
          out[k] = (2.0 * x[k] / (rho * rho * rho)) * Mat::Identity(n, n);
        return out;
      },
      [n, rho_of](const Vec& x) {
        const double rho = rho_of(x);
        std::vector<Mat> out(n * n);
        for (int k = 0; k < n; ++k)
          for (int l = 0; l < n; ++l) {
            double coef = 6.0 * x[k] * x[l] / std::pow(rho, 4);
            if (k == l) coef += 2.0 / (rho * rho * rho);
            out[k * n + l] = coef * Mat::Identity(n, n);
          }
        return out;
      });
}

SymTensorField scaled_field(SymTensorField T, RadialProfile factor) {
  const int n = T.dim();
  auto value = [T, factor](const Vec& x) {
    const double rho = 0.5 * (1.0 - x.squaredNorm());
    return (factor.value(rho) * T(x)).eval();
  };
  if (!T.has_analytic_derivatives()) return SymTensorField(n, value);
  auto d1 = [T, factor, n](const Vec& x) {
    const double rho = 0.5 * (1.0 - x.squaredNorm());
    const double f = factor.value(rho), f1 = factor.d1(rho);
    Mat base = T(x);
    std::vector<Mat> dT = T.d1(x);
    std::vector<Mat> out(n);
    for (int k = 0; k < n; ++k) out[k] = -f1 * x[k] * base + f * dT[k];
    return out;
  };
  auto d2 = [T, factor, n](const Vec& x) {
    const double rho = 0.5 * (1.0 - x.squaredNorm());
    const double f = factor.value(rho), f1 = factor.d1(rho),
                 f2 = factor.d2(rho);
    Mat base = T(x);
    std::vector<Mat> dT = T.d1(x);
    std::vector<Mat> ddT = T.d2(x);
    std::vector<Mat> out(n * n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        Mat m = f2 * x[k] * x[l] * base - f1 * x[k] * dT[l] - f1 * x[l] * dT[k] +
                f * ddT[k * n + l];
        if (k == l) m -= f1 * base;
        out[k * n + l] = m;
      }
    return out;
  };
  return SymTensorField(n, value, d1, d2);
}

namespace {

// Chart reconstruction of a radial tensor  radial(rho) drho^2 + angular(rho)
// sigma:  T_ij = m(rho) delta_ij + w(rho) x_i x_j  with
// m = angular/(1-2rho), w = radial - angular/(1-2rho)^2.
struct RadialChartCoefs {
  double m, m1, m2, w, w1, w2;
};

RadialChartCoefs radial_chart_coefs(const RadialProfile& a,
                                    const RadialProfile& c, double rho) {
  const double q = 1.0 - 2.0 * rho;
  const double iq = 1.0 / q, iq2 = iq * iq, iq3 = iq2 * iq, iq4 = iq2 * iq2;
  const double cv = c.value(rho), c1 = c.d1(rho), c2 = c.d2(rho);
  const double av = a.value(rho), a1 = a.d1(rho), a2 = a.d2(rho);
  RadialChartCoefs k;
  k.m = cv * iq;
  k.m1 = c1 * iq + 2.0 * cv * iq2;
  k.m2 = c2 * iq + 4.0 * c1 * iq2 + 8.0 * cv * iq3;
  k.w = av - cv * iq2;
  k.w1 = a1 - c1 * iq2 - 4.0 * cv * iq3;
  k.w2 = a2 - c2 * iq2 - 8.0 * c1 * iq3 - 24.0 * cv * iq4;
  return k;
}

}  // namespace

SymTensorField radial_field(int n, RadialProfile radial,
                            RadialProfile angular) {
  auto value = [n, radial, angular](const Vec& x) {
    const double rho = 0.5 * (1.0 - x.squaredNorm());
    const auto k = radial_chart_coefs(radial, angular, rho);
    return (k.m * Mat::Identity(n, n) + k.w * x * x.transpose()).eval();
  };
  auto d1 = [n, radial, angular](const Vec& x) {
    const double rho = 0.5 * (1.0 - x.squaredNorm());
    const auto kc = radial_chart_coefs(radial, angular, rho);
    std::vector<Mat> out(n);
    for (int k = 0; k < n; ++k) {
      Mat m = -kc.m1 * x[k] * Mat::Identity(n, n) -
              kc.w1 * x[k] * x * x.transpose();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double add = 0.0;
          if (i == k) add += kc.w * x[j];
          if (j == k) add += kc.w * x[i];
          m(i, j) += add;
        }
      out[k] = m;
    }
    return out;
  };
  auto d2 = [n, radial, angular](const Vec& x) {
    const double rho = 0.5 * (1.0 - x.squaredNorm());
    const auto kc = radial_chart_coefs(radial, angular, rho);
    std::vector<Mat> out(n * n);
    for (int k = 0; k < n; ++k)
      for (int l = 0; l < n; ++l) {
        Mat m = kc.m2 * x[k] * x[l] * Mat::Identity(n, n) +
                kc.w2 * x[k] * x[l] * x * x.transpose();
        if (k == l)
          m += -kc.m1 * Mat::Identity(n, n) - kc.w1 * x * x.transpose();
        for (int i = 0; i < n; ++i)
          for (int j = 0; j < n; ++j) {
            double add = 0.0;
            if (i == l) add -= kc.w1 * x[k] * x[j];
            if (j == l) add -= kc.w1 * x[k] * x[i];
            if (i == k) add -= kc.w1 * x[l] * x[j];
            if (j == k) add -= kc.w1 * x[l] * x[i];
            if (i == k && j == l) add += kc.w;
            if (j == k && i == l) add += kc.w;
            m(i, j) += add;
          }
        out[k * n + l] = m;
      }
    return out;
  };
  return SymTensorField(n, value, d1, d2);
}

DataFamily DataFamily::pure_ads() { return DataFamily{}; }

DataFamily DataFamily::conformal(double c, double p) {
  DataFamily f;
  f.kind = Kind::conformal_perturbation;
  f.c = c;
  f.p = p;
  return f;
}

DataFamily DataFamily::tensor(double amplitude, int mode, double p) {
  DataFamily f;
  f.kind = Kind::tensor_perturbation;
  f.amplitude = amplitude;
  f.mode = mode;
  f.p = p;
  return f;
}

DataFamily DataFamily::from_profiles(RadialData profiles) {
  DataFamily f;
  f.kind = Kind::radial_table;
  f.table = std::move(profiles);
  return f;
}

InitialData make_initial_data(const DataFamily& family, int n, double tau,
                              double alpha) {
  InitialData data;
  data.n = n;
  data.tau = tau;
  data.alpha = alpha;
  RadialData prof;
  switch (family.kind) {
    case DataFamily::Kind::pure_ads:
      prof.g_rr = ads_radial_profile();
      prof.g_ss = ads_angular_profile();
      prof.k_rr = constant_profile(0);
      prof.k_ss = constant_profile(0);
      prof.e_rr = constant_profile(0);
      prof.e_ss = constant_profile(0);
      break;
    case DataFamily::Kind::conformal_perturbation: {
      RadialProfile bump = power_profile(family.c, family.p);
      RadialProfile factor = sum_profiles(constant_profile(1.0), bump);
      prof.g_rr = product_profiles(factor, ads_radial_profile());
      prof.g_ss = product_profiles(factor, ads_angular_profile());
      prof.k_rr = constant_profile(0);
      prof.k_ss = constant_profile(0);
      prof.e_rr = product_profiles(bump, ads_radial_profile());
      prof.e_ss = product_profiles(bump, ads_angular_profile());
      break;
    }
    case DataFamily::Kind::tensor_perturbation: {
      RadialProfile amp = power_profile(family.amplitude, family.p);
      RadialProfile zero = constant_profile(0);
      prof.g_rr = ads_radial_profile();
      prof.g_ss = ads_angular_profile();
      prof.k_rr = (family.mode == 2)
                      ? zero
                      : product_profiles(amp, ads_radial_profile());
      prof.k_ss = (family.mode == 1)
                      ? zero
                      : product_profiles(amp, ads_angular_profile());
      prof.e_rr = constant_profile(0);
      prof.e_ss = constant_profile(0);
      break;
    }
    case DataFamily::Kind::radial_table:
      if (!family.table)
        throw std::invalid_argument("make_initial_data: missing table");
      prof = *family.table;
      break;
  }
  data.radial = prof;
  data.g = radial_field(n, prof.g_rr, prof.g_ss);
  data.k = radial_field(n, prof.k_rr, prof.k_ss);
  return data;
}

RadialProfile profile_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("profile_from_csv: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("profile_from_csv: empty file " + path);
  // header row is mandatory
  std::vector<double> rhos, vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string a, b;
    if (!std::getline(ss, a, ',') || !std::getline(ss, b, ','))
      throw std::runtime_error("profile_from_csv: malformed row: " + line);
    rhos.push_back(std::stod(a));
    vals.push_back(std::stod(b));
  }
  Vec r = Eigen::Map<Vec>(rhos.data(), rhos.size());
  Vec v = Eigen::Map<Vec>(vals.data(), vals.size());
  return spline_profile(r, v);
}

// ---------------------------------------------------------------------------

HyperbolicMetric hyperbolic_metric(const BallPoint& x) {
  const int n = x.dim();
  const double rho = x.rho;
  HyperbolicMetric out;
  out.value = Mat::Identity(n, n) / (rho * rho);
  out.inverse = Mat::Identity(n, n) * (rho * rho);
  // conformal factor e^{2 psi} delta with psi = -log rho:
  // Gamma^k_ij = delta_ki psi_j + delta_kj psi_i - delta_ij psi_k
  Vec psi_d = x.x / rho;
  out.christoffels.assign(n, Mat::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double v = 0.0;
        if (k == i) v += psi_d[j];
        if (k == j) v += psi_d[i];
        if (i == j) v -= psi_d[k];
        out.christoffels[k](i, j) = v;
      }
  return out;
}

double default_fd_step(const BallPoint& x) {
  return std::max(1e-5, 1e-3 * x.rho);
}

Mat positive_definite_inverse(const Mat& T) {
  Eigen::LDLT<Mat> ldlt(T);
  Vec D = ldlt.vectorD();
  if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
      D.minCoeff() <= 1e-14 * std::max(1.0, D.maxCoeff()))
    throw std::domain_error("metric is not positive definite");
  return ldlt.solve(Mat::Identity(T.rows(), T.cols()));
}

namespace {

std::vector<Mat> christoffels_from(const Mat& T_inv,
                                   const std::vector<Mat>& dT) {
  const int n = static_cast<int>(T_inv.rows());
  std::vector<Mat> gamma(n, Mat::Zero(n, n));
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        double sum = 0.0;
        for (int l = 0; l < n; ++l)
          sum += T_inv(k, l) * (dT[i](j, l) + dT[j](i, l) - dT[l](i, j));
        gamma[k](i, j) = 0.5 * sum;
        gamma[k](j, i) = gamma[k](i, j);
      }
  return gamma;
}

}  // namespace

std::vector<Mat> christoffels(const SymTensorField& T, const BallPoint& x,
                              double h) {
  if (h <= 0.0) h = default_fd_step(x);
  if (x.x.norm() + 2.0 * h >= 1.0)
    throw std::domain_error("christoffels: point too close to chart boundary");
  Mat T_inv = positive_definite_inverse(T(x.x));
  std::vector<Mat> dT = T.has_analytic_derivatives() ? T.d1(x.x)
                                                     : T.d1_numeric(x.x, h);
  return christoffels_from(T_inv, dT);
}

double metric_compatibility_residual(const SymTensorField& T,
                                     const BallPoint& x, double h) {
  const int n = T.dim();
  if (h <= 0.0) h = default_fd_step(x);
  Mat Tv = T(x.x);
  std::vector<Mat> dT = T.has_analytic_derivatives() ? T.d1(x.x)
                                                     : T.d1_numeric(x.x, h);
  std::vector<Mat> gamma = christoffels_from(positive_definite_inverse(Tv), dT);
  double sup = 0.0;
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) {
        double nabla = dT[k](i, j);
        for (int l = 0; l < n; ++l)
          nabla -= gamma[l](k, i) * Tv(l, j) + gamma[l](k, j) * Tv(i, l);
        sup = std::max(sup, std::abs(nabla));
      }
  return sup;
}

namespace {

// dGamma[m][k](i,j) = d_m Gamma^k_ij from analytic first/second derivatives.
std::vector<std::vector<Mat>> christoffel_derivatives_analytic(
    const SymTensorField& T, const Vec& x) {
  const int n = T.dim();
  Mat T_inv = positive_definite_inverse(T(x));
  std::vector<Mat> dT = T.d1(x);
  std::vector<Mat> ddT = T.d2(x);
  std::vector<std::vector<Mat>> out(n, std::vector<Mat>(n, Mat::Zero(n, n)));
  for (int m = 0; m < n; ++m) {
    // d_m T^{kl} = -T^{ka} (d_m T_ab) T^{bl}
    Mat dTinv = -T_inv * dT[m] * T_inv;
    for (int k = 0; k < n; ++k)
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          double sum = 0.0;
          for (int l = 0; l < n; ++l) {
            const double D = dT[i](j, l) + dT[j](i, l) - dT[l](i, j);
            const double dD = ddT[m * n + i](j, l) + ddT[m * n + j](i, l) -
                              ddT[m * n + l](i, j);
            sum += dTinv(k, l) * D + T_inv(k, l) * dD;
          }
          out[m][k](i, j) = 0.5 * sum;
        }
  }
  return out;
}

std::vector<std::vector<Mat>> christoffel_derivatives_numeric(
    const SymTensorField& T, const BallPoint& x, double h) {
  const int n = T.dim();
  std::vector<std::vector<Mat>> out(n, std::vector<Mat>(n));
  for (int m = 0; m < n; ++m) {
    Vec e = Vec::Zero(n);
    e[m] = 1.0;
    auto gamma_at = [&](double step) {
      return christoffels(T, ball_point(x.x + step * e), h);
    };
    auto diff = [&](double step) {
      auto gp = gamma_at(step);
      auto gm = gamma_at(-step);
      std::vector<Mat> d(n);
      for (int k = 0; k < n; ++k) d[k] = (gp[k] - gm[k]) / (2.0 * step);
      return d;
    };
    auto dh = diff(h), dh2 = diff(0.5 * h);
    for (int k = 0; k < n; ++k) out[m][k] = (4.0 * dh2[k] - dh[k]) / 3.0;
  }
  return out;
}

}  // namespace

double scalar_curvature(const SymTensorField& T, const BallPoint& x, double h) {
  const int n = T.dim();
  if (h <= 0.0) h = default_fd_step(x);
  Mat T_inv = positive_definite_inverse(T(x.x));
  std::vector<Mat> gamma =
      christoffels_from(T_inv, T.has_analytic_derivatives()
                                   ? T.d1(x.x)
                                   : T.d1_numeric(x.x, h));
  auto dGamma = T.has_analytic_derivatives()
                    ? christoffel_derivatives_analytic(T, x.x)
                    : christoffel_derivatives_numeric(T, x, h);
  double scal = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double ric = 0.0;
      for (int k = 0; k < n; ++k) {
        ric += dGamma[k][k](i, j) - dGamma[i][k](k, j);
        for (int l = 0; l < n; ++l)
          ric += gamma[k](k, l) * gamma[l](i, j) -
                 gamma[k](i, l) * gamma[l](k, j);
      }
      scal += T_inv(i, j) * ric;
    }
  return scal;
}

double radial_scalar_curvature(int n, const RadialProfile& g_rr,
                               const RadialProfile& g_ss, double rho) {
  return radial_scalar_curvature_values(n, g_rr.value(rho), g_rr.d1(rho),
                                        g_ss.value(rho), g_ss.d1(rho),
                                        g_ss.d2(rho));
}

double radial_scalar_curvature_values(int n, double a, double a1, double c,
                                      double c1, double c2) {
  return (n - 1.0) *
         (-c2 / (a * c) + a1 * c1 / (2.0 * a * a * c) +
          c1 * c1 / (2.0 * a * c * c) -
          (n - 2.0) * c1 * c1 / (4.0 * a * c * c) + (n - 2.0) / c);
}

namespace {

const RadialData& require_radial(const InitialData& data) {
  if (!data.radial)
    throw std::invalid_argument("operation requires spherically symmetric data");
  return *data.radial;
}

}  // namespace

double coordinate_sphere_mean_curvature(const InitialData& data,
                                        double rho_level) {
  const RadialData& prof = require_radial(data);
  if (!(rho_level > 0.0 && rho_level < 0.5))
    throw std::domain_error("rho level must lie in (0, 1/2)");
  const double a = prof.g_rr.value(rho_level);
  const double c = prof.g_ss.value(rho_level);
  const double c1 = prof.g_ss.d1(rho_level);
  if (!(a > 0.0) || !(c > 0.0))
    throw std::domain_error("degenerate induced metric on the level set");
  // tangential divergence of the outward (decreasing rho) unit normal
  return -std::sqrt(1.0 / a) * (data.n - 1.0) * c1 / (2.0 * c);
}

double coordinate_sphere_k_trace(const InitialData& data, double rho_level) {
  const RadialData& prof = require_radial(data);
  const double c = prof.g_ss.value(rho_level);
  if (!(c > 0.0)) throw std::domain_error("degenerate induced metric");
  return (data.n - 1.0) * prof.k_ss.value(rho_level) / c;
}

double untrapped_margin(const InitialData& data, double rho_level) {
  return coordinate_sphere_mean_curvature(data, rho_level) -
         std::abs(coordinate_sphere_k_trace(data, rho_level));
}

MotsScan detect_mots(const InitialData& data, double rho_lo, double rho_hi,
                     int scan_cells) {
  require_radial(data);
  MotsScan scan;
  auto find_roots = [&](double sign, std::vector<double>& out) {
    auto fn = [&](double rho) {
      return coordinate_sphere_mean_curvature(data, rho) +
             sign * coordinate_sphere_k_trace(data, rho);
    };
    double prev_rho = rho_lo, prev_val = fn(rho_lo);
    for (int i = 1; i <= scan_cells; ++i) {
      const double rho = rho_lo + (rho_hi - rho_lo) * i / double(scan_cells);
      const double val = fn(rho);
      if (prev_val == 0.0)
        out.push_back(prev_rho);
      else if (prev_val * val < 0.0)
        out.push_back(bisect(fn, prev_rho, rho, 1e-10));
      prev_rho = rho;
      prev_val = val;
    }
  };
  find_roots(-1.0, scan.outer);  // H - tr K
  find_roots(+1.0, scan.inner);  // H + tr K
  return scan;
}

double kernel_function(int index, const BallPoint& x) {
  if (index == 0) return (1.0 - x.rho) / x.rho;
  if (index < 1 || index > x.dim())
    throw std::invalid_argument("kernel_function: index out of range");
  return x.x[index - 1] / x.rho;
}

Vec kernel_gradient(int index, const BallPoint& x) {
  const int n = x.dim();
  const double rho = x.rho;
  Vec g(n);
  if (index == 0) {
    g = x.x / (rho * rho);
  } else if (index >= 1 && index <= n) {
    g = x.x[index - 1] * x.x / (rho * rho);
    g[index - 1] += 1.0 / rho;
  } else {
    throw std::invalid_argument("kernel_gradient: index out of range");
  }
  return g;
}

DecayReport decay_diagnostics(const InitialData& data, const RadialProfile& u,
                              double rho_lo, double rho_hi, int samples) {
  const RadialData& prof = require_radial(data);
  const RadialProfile b_rr = ads_radial_profile();
  const RadialProfile b_ss = ads_angular_profile();
  DecayReport rep;
  Vec rhos = log_spaced(rho_lo, rho_hi, samples);
  for (int i = 0; i < rhos.size(); ++i) {
    const double rho = rhos[i];
    const double grr_up = 1.0 / prof.g_rr.value(rho);
    const double model = rho * rho * (1.0 - 2.0 * rho);
    rep.sup_grr_remainder =
        std::max(rep.sup_grr_remainder,
                 std::abs(grr_up - model) / std::pow(rho, data.tau + 2.0));
    const double e_rr = prof.g_rr.value(rho) - b_rr.value(rho);
    const double e_ss = prof.g_ss.value(rho) - b_ss.value(rho);
    const double e_norm =
        std::sqrt(std::pow(e_rr / b_rr.value(rho), 2) +
                  (data.n - 1.0) * std::pow(e_ss / b_ss.value(rho), 2));
    rep.sup_metric_decay =
        std::max(rep.sup_metric_decay, e_norm / std::pow(rho, data.tau));
    const double k_norm =
        std::sqrt(std::pow(prof.k_rr.value(rho) / b_rr.value(rho), 2) +
                  (data.n - 1.0) *
                      std::pow(prof.k_ss.value(rho) / b_ss.value(rho), 2));
    rep.sup_k_decay =
        std::max(rep.sup_k_decay, k_norm / std::pow(rho, data.tau));
    const double uv = u.value(rho);
    rep.sup_warp_offset =
        std::max(rep.sup_warp_offset, std::abs(uv - 1.0 / rho));
    rep.sup_warp_log_ratio = std::max(
        rep.sup_warp_log_ratio, std::abs(u.d1(rho) / uv + 1.0 / rho));
  }
  return rep;
}

}  // namespace janglab
