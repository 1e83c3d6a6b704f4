#pragma once

#include "janglab/warped_graph.hpp"

// Mass functional flux integrals against the kernel functions V_0..V_n,
// extrapolation of the rho -> 0 limit, the graph-deformed mass, the
// conformal mass difference, and the boost/causality algebra of the
// energy-momentum vector.

namespace janglab {

/// c_n with c_n^{-1} = 2 omega_{n-1} (n-1).
double mass_normalization(int n);

/// Flux of the mass integrand of the deviation e = g - b against kernel
/// V_index over the level set {rho = rho_level}, with respect to the
/// outward (decreasing rho) b-unit normal. Radial data reduce by symmetry;
/// n = 3 general data integrate with product Gauss-Legendre x trapezoid
/// quadrature on S^2.
double mass_flux(const InitialData& data, int v_index, double rho_level);

/// Same flux for an arbitrary deviation field e (needs one derivative).
double mass_flux_field(const SymTensorField& e, int v_index, double rho_level);

/// Flux against an arbitrary kernel (value and gradient); n = 3 quadrature.
double mass_flux_field_kernel(
    const SymTensorField& e, const std::function<double(const BallPoint&)>& V,
    const std::function<Vec(const BallPoint&)>& dV, double rho_level);

/// Radial fast path from profiles of the deviation.
double mass_flux_radial(int n, const RadialProfile& e_rr,
                        const RadialProfile& e_ss, int v_index,
                        double rho_level);

struct MassFit {
  double limit = 0;
  double exponent_used = 0;       // exponent of the fit actually chosen
  double declared_exponent = 0;   // 2 tau - n
  double estimated_exponent = 0;  // from successive flux differences (NaN if
                                  // not estimable)
  double residual = 0;            // rms misfit of the chosen fit
  bool fallback = false;          // ill-conditioned fit; smallest-rho flux used
  Vec rho_levels;
  Vec flux;
};

/// Least-squares extrapolation of the flux sequence: model
/// M(rho) = M_inf + c rho^p with p the declared 2 tau - n, cross-checked
/// against the exponent estimated from successive differences; the better
/// conditioned fit wins. Requires >= 4 decreasing levels and 2 tau > n.
MassFit mass_limit(const InitialData& data, int v_index,
                   const Vec& rho_schedule);

/// Extrapolation core shared by all mass routes.
MassFit extrapolate_flux(const Vec& rho_levels, const Vec& flux,
                         double declared_exponent);

/// Mass of the graph (Gamma(f), g + u^2 df^2): the flux machinery applied to
/// e = g + u^2 df^2 - b. Radial inputs use the profile fast path.
MassFit graph_mass(const InitialData& data, const RadialProfile& u,
                   const RadialProfile& f, int v_index,
                   const Vec& rho_schedule);

/// Sampled sup of rho^{-2 tau} |u^2 df^2|_b (decay diagnostic of the graph
/// term).
double graph_term_decay(const InitialData& data, const RadialProfile& u,
                        const RadialProfile& f, double rho_lo, double rho_hi,
                        int samples = 100);

/// Conformal change ghat = e^{kappa theta} g with kappa = 4/(n-2).
struct ConformalChange {
  int n = 3;
  double tau = 2.0;                // declared decay of theta
  RadialProfile theta;             // radial profile (value and derivative)

  double kappa() const { return 4.0 / (n - 2.0); }
};

/// (kappa / (2 omega_{n-1})) lim_rho->0 of the flux of theta dV - V dtheta;
/// extrapolated over the schedule like mass_limit.
MassFit conformal_mass_difference(const ConformalChange& change, int v_index,
                                  const Vec& rho_schedule);

/// Mass seen in a boosted chart: (E - eta |P|)/sqrt(1 - eta^2), |eta| < 1.
double boost_mass(double energy, const Vec& momentum, double eta);

enum class Causality { future_causal, boundary, violated };

Causality causality_check(double energy, const Vec& momentum,
                          double tol = 1e-12);

struct MassReport {
  int n = 3;
  std::vector<MassFit> kernels;  // index 0..n
  double energy = 0;
  Vec momentum;
  Causality verdict = Causality::boundary;
};

/// All kernels plus the energy-momentum verdict.
MassReport mass_report(const InitialData& data, const Vec& rho_schedule);

}  // namespace janglab
