#include "janglab/mass.hpp"

#include <cmath>

namespace janglab {

double mass_normalization(int n) {
  return 1.0 / (2.0 * unit_sphere_area(n) * (n - 1.0));
}

double mass_flux_radial(int n, const RadialProfile& e_rr,
                        const RadialProfile& e_ss, int v_index,
                        double rho_level) {
  if (v_index != 0) return 0.0;  // odd in x over the sphere
  const double rho = rho_level;
  const RadialProfile b_rr = ads_radial_profile();
  const RadialProfile b_ss = ads_angular_profile();
  const double ba = b_rr.value(rho), ba1 = b_rr.d1(rho);
  const double bc = b_ss.value(rho), bc1 = b_ss.d1(rho);
  const double ea = e_rr.value(rho), ea1 = e_rr.d1(rho);
  const double ec = e_ss.value(rho), ec1 = e_ss.d1(rho);

  const double trace = ea / ba + (n - 1.0) * ec / bc;
  const double trace1 = (ea1 * ba - ea * ba1) / (ba * ba) +
                        (n - 1.0) * (ec1 * bc - ec * bc1) / (bc * bc);
  const double div_rho = (ea1 - (ba1 / ba) * ea) / ba +
                         (n - 1.0) * (bc1 / (2.0 * bc)) * (ea / ba - ec / bc);

  const double V = (1.0 - rho) / rho;
  const double V1 = -1.0 / (rho * rho);
  const double nu_rho = -rho * std::sqrt(1.0 - 2.0 * rho);  // outward unit
  const double integrand =
      V * (div_rho - trace1) - ea * (1.0 / ba) * V1 + trace * V1;
  const double area = unit_sphere_area(n) * std::pow(bc, 0.5 * (n - 1.0));
  return mass_normalization(n) * area * nu_rho * integrand;
}

double mass_flux_field_kernel(
    const SymTensorField& e, const std::function<double(const BallPoint&)>& V,
    const std::function<Vec(const BallPoint&)>& dV, double rho_level) {
  const int n = e.dim();
  if (n != 3)
    throw std::invalid_argument(
        "mass_flux_field: sphere quadrature implemented for n = 3 only");
  const double r = std::sqrt(1.0 - 2.0 * rho_level);

  Vec gl_nodes, gl_weights;
  gauss_legendre(32, gl_nodes, gl_weights);
  const int n_phi = 64;

  double total = 0.0;
  for (int iq = 0; iq < gl_nodes.size(); ++iq) {
    const double ct = gl_nodes[iq];  // cos(theta)
    const double st = std::sqrt(1.0 - ct * ct);
    for (int ip = 0; ip < n_phi; ++ip) {
      const double phi = 2.0 * M_PI * ip / n_phi;
      Vec x(3);
      x << r * st * std::cos(phi), r * st * std::sin(phi), r * ct;
      const BallPoint p = ball_point(x);
      const double rho = p.rho;
      const HyperbolicMetric b = hyperbolic_metric(p);

      Mat ev = e(x);
      std::vector<Mat> de = e.d1(x);
      const double trace = rho * rho * ev.trace();
      Vec dtrace(3);
      for (int j = 0; j < 3; ++j)
        dtrace[j] = -2.0 * rho * x[j] * ev.trace() + rho * rho * de[j].trace();
      Vec div(3);
      for (int j = 0; j < 3; ++j) {
        double sum = 0.0;
        for (int i = 0; i < 3; ++i) {
          double cov = de[i](i, j);
          for (int l = 0; l < 3; ++l)
            cov -= b.christoffels[l](i, i) * ev(l, j) +
                   b.christoffels[l](i, j) * ev(i, l);
          sum += cov;
        }
        div[j] = rho * rho * sum;
      }
      const double Vv = V(p);
      Vec dVv = dV(p);
      Vec gradV_up = rho * rho * dVv;
      Vec nu = (rho / r) * x;  // outward unit (decreasing rho)

      double value = 0.0;
      for (int j = 0; j < 3; ++j) {
        double e_gradV = 0.0;
        for (int k = 0; k < 3; ++k) e_gradV += ev(j, k) * gradV_up[k];
        value += (Vv * (div[j] - dtrace[j]) - e_gradV + trace * dVv[j]) * nu[j];
      }
      const double area_density = std::pow(r / rho, 2.0);  // (r/rho)^{n-1}
      total += gl_weights[iq] * (2.0 * M_PI / n_phi) * value * area_density;
    }
  }
  return mass_normalization(3) * total;
}

double mass_flux_field(const SymTensorField& e, int v_index,
                       double rho_level) {
  return mass_flux_field_kernel(
      e, [v_index](const BallPoint& p) { return kernel_function(v_index, p); },
      [v_index](const BallPoint& p) { return kernel_gradient(v_index, p); },
      rho_level);
}

double mass_flux(const InitialData& data, int v_index, double rho_level) {
  if (!(rho_level > 0.0 && rho_level < 0.5))
    throw std::domain_error("mass_flux: rho level must lie in (0, 1/2)");
  if (data.radial) {
    const RadialData& prof = *data.radial;
    RadialProfile e_rr =
        prof.e_rr ? *prof.e_rr
                  : sum_profiles(prof.g_rr,
                                 scale_profile(ads_radial_profile(), -1.0));
    RadialProfile e_ss =
        prof.e_ss ? *prof.e_ss
                  : sum_profiles(prof.g_ss,
                                 scale_profile(ads_angular_profile(), -1.0));
    return mass_flux_radial(data.n, e_rr, e_ss, v_index, rho_level);
  }
  const int n = data.n;
  SymTensorField b = hyperbolic_field(n);
  SymTensorField g = data.g;
  SymTensorField e(n,
                   [g, b](const Vec& x) { return (g(x) - b(x)).eval(); },
                   [g, b, n](const Vec& x) {
                     auto dg = g.d1(x);
                     auto db = b.d1(x);
                     std::vector<Mat> out(n);
                     for (int k = 0; k < n; ++k) out[k] = dg[k] - db[k];
                     return out;
                   },
                   nullptr);
  return mass_flux_field(e, v_index, rho_level);
}

MassFit extrapolate_flux(const Vec& rho_levels, const Vec& flux,
                         double declared_exponent) {
  MassFit fit;
  fit.rho_levels = rho_levels;
  fit.flux = flux;
  fit.declared_exponent = declared_exponent;
  fit.estimated_exponent = estimate_difference_exponent(rho_levels, flux);

  if (!(declared_exponent > 0.0)) {
    fit.fallback = true;
    fit.limit = flux[flux.size() - 1];
    fit.exponent_used = declared_exponent;
    return fit;
  }

  PowerFit declared = fit_power_offset(rho_levels, flux, declared_exponent);
  PowerFit chosen = declared;
  if (std::isfinite(fit.estimated_exponent) && fit.estimated_exponent > 0.05) {
    PowerFit estimated =
        fit_power_offset(rho_levels, flux, fit.estimated_exponent);
    if (estimated.residual < declared.residual) chosen = estimated;
  }
  fit.limit = chosen.constant;
  fit.exponent_used = chosen.exponent;
  fit.residual = chosen.residual;
  const double scale = flux.cwiseAbs().maxCoeff();
  if (!std::isfinite(fit.limit) ||
      (scale > 0.0 && fit.residual > 0.5 * scale)) {
    fit.fallback = true;
    fit.limit = flux[flux.size() - 1];
  }
  return fit;
}

namespace {

void check_schedule(const Vec& s) {
  if (s.size() < 4)
    throw std::invalid_argument("mass_limit: need at least 4 levels");
  for (int i = 0; i + 1 < s.size(); ++i)
    if (!(s[i + 1] < s[i]))
      throw std::invalid_argument("mass_limit: schedule must decrease");
}

}  // namespace

MassFit mass_limit(const InitialData& data, int v_index,
                   const Vec& rho_schedule) {
  check_schedule(rho_schedule);
  Vec flux(rho_schedule.size());
  for (int i = 0; i < rho_schedule.size(); ++i)
    flux[i] = mass_flux(data, v_index, rho_schedule[i]);
  return extrapolate_flux(rho_schedule, flux, 2.0 * data.tau - data.n);
}

MassFit graph_mass(const InitialData& data, const RadialProfile& u,
                   const RadialProfile& f, int v_index,
                   const Vec& rho_schedule) {
  check_schedule(rho_schedule);
  if (!data.radial)
    throw std::invalid_argument("graph_mass: radial inputs required");
  const RadialData& prof = *data.radial;

  // ebar = g + u^2 df^2 - b in the profile split; only the radial slot
  // carries the graph term.
  RadialProfile base_rr =
      prof.e_rr ? *prof.e_rr
                : sum_profiles(prof.g_rr,
                               scale_profile(ads_radial_profile(), -1.0));
  auto value = [base_rr, u, f](double rho) {
    const double F1 = f.d1(rho);
    const double U = u.value(rho);
    return base_rr.value(rho) + U * U * F1 * F1;
  };
  auto d1 = [base_rr, u, f](double rho) {
    const double F1 = f.d1(rho), F2 = f.d2(rho);
    const double U = u.value(rho), U1 = u.d1(rho);
    return base_rr.d1(rho) + 2.0 * U * U1 * F1 * F1 + 2.0 * U * U * F1 * F2;
  };
  RadialProfile e_rr{value, d1, nullptr, nullptr};
  RadialProfile e_ss =
      prof.e_ss ? *prof.e_ss
                : sum_profiles(prof.g_ss,
                               scale_profile(ads_angular_profile(), -1.0));

  Vec flux(rho_schedule.size());
  for (int i = 0; i < rho_schedule.size(); ++i)
    flux[i] = mass_flux_radial(data.n, e_rr, e_ss, v_index, rho_schedule[i]);
  return extrapolate_flux(rho_schedule, flux, 2.0 * data.tau - data.n);
}

double graph_term_decay(const InitialData& data, const RadialProfile& u,
                        const RadialProfile& f, double rho_lo, double rho_hi,
                        int samples) {
  double sup = 0.0;
  Vec rhos = log_spaced(rho_lo, rho_hi, samples);
  const RadialProfile b_rr = ads_radial_profile();
  for (int i = 0; i < rhos.size(); ++i) {
    const double rho = rhos[i];
    const double U = u.value(rho), F1 = f.d1(rho);
    const double norm = U * U * F1 * F1 / b_rr.value(rho);  // |u^2 df^2|_b
    sup = std::max(sup, norm / std::pow(rho, 2.0 * data.tau));
  }
  return sup;
}

MassFit conformal_mass_difference(const ConformalChange& change, int v_index,
                                  const Vec& rho_schedule) {
  check_schedule(rho_schedule);
  const int n = change.n;
  Vec flux(rho_schedule.size());
  for (int i = 0; i < rho_schedule.size(); ++i) {
    const double rho = rho_schedule[i];
    if (v_index != 0) {
      flux[i] = 0.0;  // odd in x for radial theta
      continue;
    }
    const double V = (1.0 - rho) / rho;
    const double V1 = -1.0 / (rho * rho);
    const double th = change.theta.value(rho);
    const double th1 = change.theta.d1(rho);
    const double nu_rho = -rho * std::sqrt(1.0 - 2.0 * rho);
    const double area_density =
        std::pow(std::sqrt(1.0 - 2.0 * rho) / rho, n - 1.0);
    flux[i] = 0.5 * change.kappa() * area_density * nu_rho * (th * V1 - V * th1);
  }
  return extrapolate_flux(rho_schedule, flux, 2.0 * change.tau - n);
}

double boost_mass(double energy, const Vec& momentum, double eta) {
  if (!(std::abs(eta) < 1.0))
    throw std::domain_error("boost_mass: |eta| < 1 required");
  return (energy - eta * momentum.norm()) / std::sqrt(1.0 - eta * eta);
}

Causality causality_check(double energy, const Vec& momentum, double tol) {
  const double gap = energy - momentum.norm();
  if (gap > tol) return Causality::future_causal;
  if (gap >= -tol) return Causality::boundary;
  return Causality::violated;
}

MassReport mass_report(const InitialData& data, const Vec& rho_schedule) {
  MassReport rep;
  rep.n = data.n;
  rep.momentum = Vec::Zero(data.n);
  for (int i = 0; i <= data.n; ++i) {
    MassFit fit = mass_limit(data, i, rho_schedule);
    if (i == 0)
      rep.energy = fit.limit;
    else
      rep.momentum[i - 1] = fit.limit;
    rep.kernels.push_back(std::move(fit));
  }
  rep.verdict = causality_check(rep.energy, rep.momentum);
  return rep;
}

}  // namespace janglab
