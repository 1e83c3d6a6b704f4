#pragma once

#include "janglab/barriers.hpp"
#include "janglab/jang.hpp"

// Regularized Dirichlet solver for J(f) = eps f on radial annuli
// {rho1 <= rho <= rho0}: damped Newton with an adaptive continuity method in
// s, the eps -> 0 sweep, and the coupled system { J(f) = 0, Lap_gbar u = n u }
// in spherical symmetry.

namespace janglab {

struct RadialGrid {
  enum class Spacing { uniform, log_spacing };

  double rho_min;
  double rho_max;
  int n_nodes;
  Spacing spacing = Spacing::log_spacing;

  Vec nodes() const;
};

struct SolverOptions {
  double newton_tol = 1e-10;
  int max_newton = 60;
  int max_backtracks = 30;
  double ds_initial = 0.125;
  double ds_min = 1e-4;
  double phi_inner = 0.0;  // Dirichlet datum at rho_min
  double phi_outer = 0.0;  // Dirichlet datum at rho_max
};

struct RadialSolution {
  Vec rho;
  Vec f;
  double eps = 0;
  double s_reached = 0;
  double phi_inner = 0;
  double phi_outer = 0;
  int newton_iterations = 0;
  int s_steps = 0;
  double residual_sup = 0;  // discrete |J_s(f) - eps f|_inf at convergence
  bool converged = false;

  /// Cubic-spline view of the solution (third derivative available).
  RadialProfile profile() const;
};

/// Pointwise radial residual J_s(f)(rho) - eps f for a profile f.
double radial_jang_residual(const InitialData& data, const RadialProfile& u,
                            const RadialProfile& f_profile, double rho,
                            double s, double eps);

/// Stencil-based residual of J_s(f) - eps f at the solution nodes (interior
/// rows; the Dirichlet rows are zeroed). Shares the solver's discretization.
Vec discrete_jang_residual(const InitialData& data, const RadialProfile& u,
                           const Vec& rho, const Vec& f, double s, double eps);

/// Solves the discretized J_s(f) = eps f with s continued 0 -> 1,
/// second-order differences and damped Newton steps. Checks the untrapped
/// condition H - |tr K| > 0 at rho_min before starting. Throws
/// std::runtime_error when Newton fails below the minimal s step.
RadialSolution solve_regularized(const InitialData& data,
                                 const RadialProfile& u, const RadialGrid& grid,
                                 double eps, const SolverOptions& opts = {});

struct SweepResult {
  std::vector<RadialSolution> solutions;  // one per completed epsilon
  std::vector<double> epsilons;
  std::vector<double> sup_f;          // per epsilon
  std::vector<double> sup_difference; // successive sup |f_k - f_{k-1}|
  RadialSolution limit;
  bool cauchy = false;
  double limit_jang_residual = 0;  // sup |J(f)| (eps = 0) via the spline view
  std::string note;
};

/// Warm-started solves down a strictly decreasing epsilon schedule; stops
/// when successive sup-differences fall below limit_tol. Non-Cauchy
/// schedules (e.g. MOTS-induced blow-up) are reported, not thrown.
SweepResult epsilon_sweep(const InitialData& data, const RadialProfile& u,
                          const RadialGrid& grid, const Vec& eps_schedule,
                          double limit_tol = 1e-7,
                          const SolverOptions& opts = {});

/// Default schedule 1e-2 * 2^{-k}, k = 0..16.
Vec default_epsilon_schedule();

struct CoupledOptions {
  double coupled_tol = 1e-6;
  int max_outer = 30;
  double relaxation = 0.5;   // under-relaxation on u updates
  double eps_floor = 1e-6;   // epsilon floor for the inner Jang solves
  SolverOptions solver;
};

struct CoupledSolution {
  Vec rho;
  Vec f;
  Vec u;
  int outer_iterations = 0;
  double jang_residual = 0;  // sup |J(f)| at the final pair
  double warp_residual = 0;  // sup |Lap_gbar u - n u| (discrete)
  bool converged = false;
};

/// Block fixed-point iteration for { J(f) = 0, Lap_gbar u = n u }: given u,
/// an epsilon sweep for f; given f, a linear solve for u in the substituted
/// variable p = rho u with u(rho_max) matched to V0 and a Robin condition
/// at rho_min enforcing V0-type growth. Throws std::runtime_error when the
/// outer iteration exceeds max_outer without meeting the tolerance.
CoupledSolution solve_coupled(const InitialData& data, const RadialGrid& grid,
                              const CoupledOptions& opts = {});

/// Discrete residual of the warp equation for given node values (used by the
/// fixed point and by the eigenfunction diagnostics).
Vec warp_equation_residual(const InitialData& data, const Vec& rho,
                           const Vec& u_nodes, const Vec& f_nodes);

struct ComparisonReport {
  bool hypothesis_ok = false;  // J(f+) <= eps f+ and J(f-) >= eps f- sampled
  bool boundary_ok = false;    // f-(rho1) <= phi <= f+(rho1)
  bool sandwich_ok = false;    // f- <= f <= f+ node-wise with slack 1e-12
  std::vector<double> violations;
};

/// Node-wise barrier sandwich check for a computed solution; failures are
/// reported, never thrown.
ComparisonReport verify_comparison(const InitialData& data,
                                   const RadialProfile& u,
                                   const RadialSolution& solution,
                                   const BarrierSpec& upper);

}  // namespace janglab
