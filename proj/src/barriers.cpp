#include "janglab/barriers.hpp"

#include <cmath>
#include <limits>
#include <memory>

namespace janglab {

double barrier_mixing(double n, double tau, double x, double lambda) {
  const double T = tau - 0.5 * n;
  return lambda * T / (lambda + (1.0 - lambda) * std::pow(x, T));
}

double estimate_C0(const InitialData& data, const RadialProfile& u,
                   double rho_lo, double rho_hi, int samples) {
  if (!data.radial)
    throw std::invalid_argument("estimate_C0: data must be radial");
  const RadialData& prof = *data.radial;
  const double tau = data.tau;
  const RadialProfile b_rr = ads_radial_profile();
  const RadialProfile b_ss = ads_angular_profile();
  double worst = 0.0;
  Vec rhos = log_spaced(rho_lo, rho_hi, samples);
  for (int i = 0; i < rhos.size(); ++i) {
    const double rho = rhos[i];
    const double a = prof.g_rr.value(rho), a1 = prof.g_rr.d1(rho);
    const double c = prof.g_ss.value(rho), c1 = prof.g_ss.d1(rho);
    const double q = 1.0 - 2.0 * rho;
    // remainders of the background expansion, normalized by their rates
    const double r_grr =
        std::abs(1.0 / a - rho * rho * q) / std::pow(rho, tau + 2.0);
    const double r_gss =
        std::abs(1.0 / c - rho * rho / q) / std::pow(rho, tau + 2.0);
    const double gamma_rrr = a1 / (2.0 * a);
    const double r_gamma =
        std::abs(gamma_rrr + (1.0 - 3.0 * rho) / (rho * q)) /
        std::pow(rho, tau - 1.0);
    const double r_sphere = std::abs(-c1 / (2.0 * a) - 1.0 / rho);
    const double k_norm =
        std::sqrt(std::pow(prof.k_rr.value(rho) / b_rr.value(rho), 2) +
                  (data.n - 1.0) *
                      std::pow(prof.k_ss.value(rho) / b_ss.value(rho), 2));
    const double r_k = k_norm / std::pow(rho, tau);
    const double uv = u.value(rho);
    const double r_u = std::abs(uv - 1.0 / rho);
    const double r_ulog = std::abs(u.d1(rho) / uv + 1.0 / rho);
    worst = std::max({worst, r_grr, r_gss, r_gamma, r_sphere, r_k, r_u, r_ulog});
  }
  return 2.0 * worst;
}

BarrierParameters choose_parameters(int n, double tau, double c0) {
  if (!(n >= 3 && n <= 7))
    throw std::invalid_argument("choose_parameters: n must be in {3..7}");
  if (!(tau > 0.5 * n && tau < n))
    throw std::invalid_argument("choose_parameters: tau must lie in (n/2, n)");
  if (!(c0 > 0.0)) throw std::invalid_argument("choose_parameters: C0 > 0");

  const double target = 0.25 * (n - tau);
  auto margin = [&](double rho) {
    return c0 * rho + c0 * std::pow(rho, tau) - target;
  };
  double rho0;
  if (margin(0.5) < 0.0) {
    rho0 = 0.5;
  } else {
    rho0 = bisect(margin, 1e-12, 0.5, 1e-14);
  }
  rho0 *= 0.5;  // halve once for margin

  const double T = tau - 0.5 * n;
  const double x0 = std::pow(3.0 * (n - tau) / 8.0, 1.0 / n);
  double lambda;
  if (T <= 1.0 / 16.0) {
    // F(x0, .) never reaches 1/16; any lambda satisfies F < 1/8.
    lambda = 0.5;
  } else {
    auto fn = [&](double l) {
      return barrier_mixing(n, tau, x0, l) - 1.0 / 16.0;
    };
    lambda = bisect(fn, 1e-12, 1.0 - 1e-12, 1e-14);
  }
  return {rho0, lambda};
}

BarrierSpec::BarrierSpec(int n, double tau, double c0, double rho0,
                         double lambda, int sign, bool enforce_invariants)
    : n_(n), tau_(tau), c0_(c0), rho0_(rho0), lambda_(lambda), sign_(sign) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("BarrierSpec: sign must be +1 or -1");
  if (enforce_invariants) {
    if (!(c0 * rho0 + c0 * std::pow(rho0, tau) < 0.25 * (n - tau)))
      throw std::invalid_argument("BarrierSpec: rho0 violates the C0 condition");
    const double x0 = std::pow(3.0 * (n - tau) / 8.0, 1.0 / n);
    if (!(barrier_mixing(n, tau, x0, lambda) < 1.0 / 8.0))
      throw std::invalid_argument("BarrierSpec: lambda violates F(x0,.) < 1/8");
  }
  // Cache the upper barrier in t = sqrt(rho0 - rho); used for rho >= rho0/4.
  cache_ = ChebyshevInterpolant(0.0, std::sqrt(rho0_), 200, [this](double t) {
    return sign_ * value_quadrature(rho0_ - t * t);  // stores the unsigned f_+
  });
}

BarrierSpec BarrierSpec::make(int n, double tau, double c0, int sign) {
  BarrierParameters p = choose_parameters(n, tau, c0);
  return BarrierSpec(n, tau, c0, p.rho0, p.lambda, sign);
}

double BarrierSpec::xi_upper(double rho) const {
  if (!(rho > 0.0 && rho <= rho0_))
    throw std::domain_error("BarrierSpec: rho must lie in (0, rho0]");
  const double ratio = rho0_ / rho;
  return 1.0 / ((1.0 - lambda_) * std::pow(ratio, 0.5 * n_) +
                lambda_ * std::pow(ratio, tau_));
}

double BarrierSpec::gamma_exponent(double rho) const {
  return 0.5 * n_ + barrier_mixing(n_, tau_, rho / rho0_, lambda_);
}

double BarrierSpec::xi(double rho) const { return sign_ * xi_upper(rho); }

double BarrierSpec::xi_prime(double rho) const {
  return gamma_exponent(rho) * xi(rho) / rho;
}

double BarrierSpec::value_quadrature(double rho) const {
  if (rho <= 0.0) return 0.0;
  if (rho > rho0_)
    throw std::domain_error("BarrierSpec: rho must lie in [0, rho0]");
  auto integrand = [this](double s) {
    const double k = xi_upper(s);
    return k / std::sqrt(1.0 - k * k);
  };
  const double split = 0.5 * rho0_;
  double total = 0.0;
  if (rho <= split) return sign_ * integrate(integrand, 0.0, rho, 1e-13);
  total = integrate(integrand, 0.0, split, 1e-13);
  // substitute s = rho0 - t^2 to remove the inverse square root at rho0
  auto transformed = [&](double t) {
    const double s = rho0_ - t * t;
    const double k = xi_upper(s);
    const double one_minus = std::max(1.0 - k * k, 0.0);
    if (one_minus == 0.0) {
      // limit value 2 / sqrt(2 xi'(rho0))
      return 2.0 / std::sqrt(2.0 * gamma_exponent(rho0_) / rho0_);
    }
    return 2.0 * t * k / std::sqrt(one_minus);
  };
  const double t_hi = std::sqrt(rho0_ - split);
  const double t_lo = std::sqrt(std::max(rho0_ - rho, 0.0));
  total += integrate(transformed, t_lo, t_hi, 1e-13);
  return sign_ * total;
}

double BarrierSpec::value(double rho) const {
  if (rho <= 0.0) return 0.0;
  if (rho < 0.25 * rho0_) return value_quadrature(rho);
  const double t = std::sqrt(std::max(rho0_ - rho, 0.0));
  return sign_ * cache_(t);
}

double BarrierSpec::derivative(double rho) const {
  const double k = xi_upper(rho);
  return sign_ * k / std::sqrt(1.0 - k * k);
}

double BarrierSpec::second_derivative(double rho) const {
  const double k = xi_upper(rho);
  const double k1 = gamma_exponent(rho) * k / rho;
  return sign_ * k1 / std::pow(1.0 - k * k, 1.5);
}

double BarrierSpec::third_derivative(double rho) const {
  const double k = xi_upper(rho);
  const double g = gamma_exponent(rho);
  const double k1 = g * k / rho;
  // gamma' from the x-derivative of the mixing function
  const double T = tau_ - 0.5 * n_;
  const double x = rho / rho0_;
  const double D = lambda_ + (1.0 - lambda_) * std::pow(x, T);
  const double Fx = -lambda_ * T * T * (1.0 - lambda_) * std::pow(x, T - 1.0) /
                    (D * D);
  const double g1 = Fx / rho0_;
  const double k2 = (g1 * rho + g * g - g) * k / (rho * rho);
  const double one_minus = 1.0 - k * k;
  return sign_ * (k2 * one_minus + 3.0 * k * k1 * k1) /
         std::pow(one_minus, 2.5);
}

RadialProfile BarrierSpec::profile() const {
  auto self = std::make_shared<BarrierSpec>(*this);
  return {[self](double rho) { return self->value(rho); },
          [self](double rho) { return self->derivative(rho); },
          [self](double rho) { return self->second_derivative(rho); },
          [self](double rho) { return self->third_derivative(rho); }};
}

GraphFunction BarrierSpec::graph(int chart_dim) const {
  GraphFunction f = graph_from_profile(chart_dim, profile());
  f.domain = GraphDomain{false, 0.0, rho0_};
  return f;
}

BarrierInequalityReport verify_barrier_inequality(const BarrierSpec& spec,
                                                  const Vec& grid) {
  BarrierInequalityReport rep;
  rep.grid = grid;
  rep.lhs.resize(grid.size());
  bool ok = true;
  double max_lhs = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < grid.size(); ++i) {
    const double rho = grid[i];
    const double k = std::abs(spec.xi(rho));  // upper-barrier profile
    const double k1 = spec.gamma_exponent(rho) * k / rho;
    const double lhs = k1 -
                       (k / rho) * (spec.n() - k * k - spec.c0() * rho) +
                       spec.c0() * std::pow(rho, spec.tau() - 1.0);
    rep.lhs[i] = lhs;
    max_lhs = std::max(max_lhs, lhs);
    if (!(lhs < 0.0)) {
      ok = false;
      rep.violating_rho.push_back(rho);
    }
  }
  rep.max_lhs = max_lhs;
  rep.upper_pass = ok;
  rep.lower_pass = ok;  // the lower-barrier side is the exact negation
  return rep;
}

}  // namespace janglab
