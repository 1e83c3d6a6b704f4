#include "janglab/radial_solver.hpp"

#include <Eigen/Sparse>
#include <cmath>

namespace janglab {

Vec RadialGrid::nodes() const {
  if (!(rho_min > 0.0 && rho_min < rho_max && rho_max <= 0.5))
    throw std::invalid_argument("RadialGrid: need 0 < rho1 < rho0 <= 1/2");
  if (n_nodes < 16) throw std::invalid_argument("RadialGrid: need N >= 16");
  return spacing == Spacing::uniform ? lin_spaced(rho_min, rho_max, n_nodes)
                                     : log_spaced(rho_min, rho_max, n_nodes);
}

RadialProfile RadialSolution::profile() const {
  return spline_profile(rho, f);
}

double radial_jang_residual(const InitialData& data, const RadialProfile& u,
                            const RadialProfile& f_profile, double rho,
                            double s, double eps) {
  const RadialJangTerms t = radial_jang_terms(
      data, u, rho, f_profile.d1(rho), f_profile.d2(rho), s);
  return t.value - eps * f_profile.value(rho);
}

namespace {

struct StencilWeights {
  // node i derivative couplings to (i-1, i, i+1)
  double d1m, d1c, d1p;
  double d2m, d2c, d2p;
};

StencilWeights stencil(double hm, double hp) {
  const double D = hm * hp * (hm + hp);
  StencilWeights w;
  w.d1m = -hp * hp / D;
  w.d1c = (hp * hp - hm * hm) / D;
  w.d1p = hm * hm / D;
  w.d2m = 2.0 * hp / D;
  w.d2c = -2.0 * (hm + hp) / D;
  w.d2p = 2.0 * hm / D;
  return w;
}

Vec discrete_residual(const InitialData& data, const RadialProfile& u,
                      const Vec& rho, const Vec& f, double s, double eps,
                      double phi_inner, double phi_outer) {
  const int N = static_cast<int>(rho.size());
  Vec res(N);
  res[0] = f[0] - s * phi_inner;
  res[N - 1] = f[N - 1] - s * phi_outer;
  for (int i = 1; i + 1 < N; ++i) {
    const StencilWeights w = stencil(rho[i] - rho[i - 1], rho[i + 1] - rho[i]);
    const double f1 = w.d1m * f[i - 1] + w.d1c * f[i] + w.d1p * f[i + 1];
    const double f2 = w.d2m * f[i - 1] + w.d2c * f[i] + w.d2p * f[i + 1];
    res[i] = radial_jang_terms(data, u, rho[i], f1, f2, s).value - eps * f[i];
  }
  return res;
}

// Tridiagonal Jacobian of the discrete residual.
void discrete_jacobian(const InitialData& data, const RadialProfile& u,
                       const Vec& rho, const Vec& f, double s, double eps,
                       Vec& lower, Vec& diag, Vec& upper) {
  const int N = static_cast<int>(rho.size());
  lower = Vec::Zero(N - 1);
  diag = Vec::Zero(N);
  upper = Vec::Zero(N - 1);
  diag[0] = 1.0;
  diag[N - 1] = 1.0;
  for (int i = 1; i + 1 < N; ++i) {
    const StencilWeights w = stencil(rho[i] - rho[i - 1], rho[i + 1] - rho[i]);
    const double f1 = w.d1m * f[i - 1] + w.d1c * f[i] + w.d1p * f[i + 1];
    const double f2 = w.d2m * f[i - 1] + w.d2c * f[i] + w.d2p * f[i + 1];
    const RadialLinearization lin =
        radial_jang_linearization(data, u, rho[i], f1, f2, s);
    lower[i - 1] = lin.second * w.d2m + lin.first * w.d1m;
    diag[i] = lin.second * w.d2c + lin.first * w.d1c - eps;
    upper[i] = lin.second * w.d2p + lin.first * w.d1p;
  }
}

// Damped Newton at fixed s. Armijo backtracking on the l2 merit (the
// sup-norm is non-smooth and stalls near turning points); convergence is
// still declared on the sup-norm. Returns false when no progress is
// possible.
bool newton_at_s(const InitialData& data, const RadialProfile& u,
                 const Vec& rho, Vec& f, double s, double eps,
                 const SolverOptions& opts, int& newton_count,
                 double& res_sup) {
  Vec res = discrete_residual(data, u, rho, f, s, eps, opts.phi_inner,
                              opts.phi_outer);
  res_sup = res.cwiseAbs().maxCoeff();
  double res_norm = res.norm();
  for (int iter = 0; iter < opts.max_newton; ++iter) {
    if (res_sup <= opts.newton_tol) return true;
    Vec lower, diag, upper;
    discrete_jacobian(data, u, rho, f, s, eps, lower, diag, upper);
    Vec delta = solve_tridiagonal(lower, diag, upper, (-res).eval());
    double step = 1.0;
    bool accepted = false;
    for (int bt = 0; bt < opts.max_backtracks; ++bt) {
      Vec trial = f + step * delta;
      Vec trial_res = discrete_residual(data, u, rho, trial, s, eps,
                                        opts.phi_inner, opts.phi_outer);
      const double trial_norm = trial_res.norm();
      if (std::isfinite(trial_norm) &&
          trial_norm <= (1.0 - 1e-4 * step) * res_norm) {
        f = trial;
        res = trial_res;
        res_norm = trial_norm;
        res_sup = trial_res.cwiseAbs().maxCoeff();
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++newton_count;
    if (!accepted) return false;
  }
  return res_sup <= opts.newton_tol;
}

RadialSolution solve_with_guess(const InitialData& data,
                                const RadialProfile& u, const Vec& rho,
                                double eps, const SolverOptions& opts,
                                const Vec* guess) {
  RadialSolution sol;
  sol.rho = rho;
  sol.eps = eps;
  sol.phi_inner = opts.phi_inner;
  sol.phi_outer = opts.phi_outer;

  // Warm starts try the target problem directly before falling back to the
  // continuity method.
  if (guess != nullptr) {
    Vec f = *guess;
    double res_sup = 0;
    int iters = 0;
    if (newton_at_s(data, u, rho, f, 1.0, eps, opts, iters, res_sup)) {
      sol.f = f;
      sol.s_reached = 1.0;
      sol.newton_iterations = iters;
      sol.s_steps = 1;
      sol.residual_sup = res_sup;
      sol.converged = true;
      return sol;
    }
  }

  Vec f = Vec::Zero(rho.size());  // exact solution at s = 0
  double s = 0.0;
  double ds = opts.ds_initial;
  int consecutive = 0;
  int total_newton = 0;
  int steps = 0;
  double res_sup = 0.0;
  while (s < 1.0) {
    const double s_try = std::min(1.0, s + ds);
    Vec f_try = f;
    int iters = 0;
    if (newton_at_s(data, u, rho, f_try, s_try, eps, opts, iters, res_sup)) {
      f = f_try;
      s = s_try;
      total_newton += iters;
      ++steps;
      if (++consecutive >= 2) {
        ds = std::min(2.0 * ds, 0.5);
        consecutive = 0;
      }
    } else {
      consecutive = 0;
      ds *= 0.5;
      if (ds < opts.ds_min)
        throw std::runtime_error(
            "solve_regularized: Newton diverged below the minimal s step");
    }
  }
  sol.f = f;
  sol.s_reached = s;
  sol.newton_iterations = total_newton;
  sol.s_steps = steps;
  sol.residual_sup = res_sup;
  sol.converged = true;
  return sol;
}

}  // namespace

Vec discrete_jang_residual(const InitialData& data, const RadialProfile& u,
                           const Vec& rho, const Vec& f, double s, double eps) {
  Vec res = discrete_residual(data, u, rho, f, s, eps, 0.0, 0.0);
  res[0] = 0.0;
  res[res.size() - 1] = 0.0;
  return res;
}

RadialSolution solve_regularized(const InitialData& data,
                                 const RadialProfile& u, const RadialGrid& grid,
                                 double eps, const SolverOptions& opts) {
  if (!(eps > 0.0))
    throw std::invalid_argument("solve_regularized: eps must be positive");
  if (!(untrapped_margin(data, grid.rho_min) > 0.0))
    throw std::invalid_argument(
        "solve_regularized: untrapped condition H - |tr K| > 0 fails at rho1");
  return solve_with_guess(data, u, grid.nodes(), eps, opts, nullptr);
}

Vec default_epsilon_schedule() {
  Vec eps(17);
  for (int k = 0; k <= 16; ++k) eps[k] = 1e-2 * std::pow(2.0, -k);
  return eps;
}

SweepResult epsilon_sweep(const InitialData& data, const RadialProfile& u,
                          const RadialGrid& grid, const Vec& eps_schedule,
                          double limit_tol, const SolverOptions& opts) {
  for (int k = 0; k + 1 < eps_schedule.size(); ++k)
    if (!(eps_schedule[k + 1] < eps_schedule[k]))
      throw std::invalid_argument("epsilon_sweep: schedule must decrease");
  if (!(untrapped_margin(data, grid.rho_min) > 0.0))
    throw std::invalid_argument(
        "epsilon_sweep: untrapped condition fails at rho1");

  const Vec rho = grid.nodes();
  SweepResult sweep;
  RadialSolution prev;
  bool have_prev = false;
  for (int k = 0; k < eps_schedule.size(); ++k) {
    const double eps = eps_schedule[k];
    RadialSolution sol;
    try {
      sol = solve_with_guess(data, u, rho, eps, opts,
                             have_prev ? &prev.f : nullptr);
    } catch (const std::runtime_error& err) {
      if (!have_prev) throw;
      sweep.note = err.what();
      break;
    }
    sweep.epsilons.push_back(eps);
    sweep.sup_f.push_back(sol.f.cwiseAbs().maxCoeff());
    sweep.solutions.push_back(sol);
    if (have_prev) {
      const double diff = (sol.f - prev.f).cwiseAbs().maxCoeff();
      sweep.sup_difference.push_back(diff);
      if (diff < limit_tol) {
        sweep.cauchy = true;
        prev = sol;
        break;
      }
    }
    prev = sol;
    have_prev = true;
  }
  sweep.limit = prev;
  RadialProfile fp = prev.profile();
  double sup = 0.0;
  for (int i = 1; i + 1 < rho.size(); ++i)
    sup = std::max(sup, std::abs(radial_jang_residual(data, u, fp, rho[i],
                                                      1.0, 0.0)));
  sweep.limit_jang_residual = sup;
  return sweep;
}

namespace {

// Coefficients of the warp equation Lap_gbar u - n u = 0 in radial form
// alpha u'' + beta u' - n u with the graph metric frozen at (u_ref, f).
struct WarpCoefs {
  double alpha, beta;
};

WarpCoefs warp_coefs(const InitialData& data, const RadialProfile& u_ref,
                     const RadialProfile& f, double rho) {
  const RadialData& prof = *data.radial;
  const int n = data.n;
  const double a = prof.g_rr.value(rho), a1 = prof.g_rr.d1(rho);
  const double c = prof.g_ss.value(rho), c1 = prof.g_ss.d1(rho);
  const double U = u_ref.value(rho), U1 = u_ref.d1(rho);
  const double F1 = f.d1(rho), F2 = f.d2(rho);
  const double W2 = 1.0 + U * U * F1 * F1 / a;
  const double abar = a * W2;
  const double abar1 = a1 + 2.0 * U * U1 * F1 * F1 + 2.0 * U * U * F1 * F2;
  WarpCoefs wc;
  wc.alpha = 1.0 / abar;
  wc.beta = -abar1 / (2.0 * abar * abar) + (n - 1.0) * c1 / (2.0 * abar * c);
  return wc;
}

// Row weights of the one-sided second-order first derivative at the first
// node (couples nodes 0, 1, 2).
void one_sided_first(const Vec& rho, double& c0, double& c1, double& c2) {
  const double h1 = rho[1] - rho[0];
  const double h2 = rho[2] - rho[1];
  c0 = -(2.0 * h1 + h2) / (h1 * (h1 + h2));
  c1 = (h1 + h2) / (h1 * h2);
  c2 = -h1 / (h2 * (h1 + h2));
}

// Solve the lagged-linear warp equation in the substituted variable
// p = rho u: A p'' + B p' + C p = 0 with Dirichlet p(rho0) = 1 - rho0 and a
// Robin row at rho1 matching V0-type growth, p'/p = -1/(1-rho1).
Vec solve_warp_linear(const InitialData& data, const Vec& rho,
                      const RadialProfile& u_ref, const RadialProfile& f) {
  const int N = static_cast<int>(rho.size());
  const int n = data.n;
  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> trip;
  Vec rhs = Vec::Zero(N);

  double r0, r1w, r2w;
  one_sided_first(rho, r0, r1w, r2w);
  trip.emplace_back(0, 0, r0 + 1.0 / (1.0 - rho[0]));
  trip.emplace_back(0, 1, r1w);
  trip.emplace_back(0, 2, r2w);

  for (int i = 1; i + 1 < N; ++i) {
    const WarpCoefs wc = warp_coefs(data, u_ref, f, rho[i]);
    // transform alpha u'' + beta u' - n u to the p variable
    const double A = wc.alpha;
    const double B = wc.beta - 2.0 * wc.alpha / rho[i];
    const double C =
        2.0 * wc.alpha / (rho[i] * rho[i]) - wc.beta / rho[i] - double(n);
    const StencilWeights w = stencil(rho[i] - rho[i - 1], rho[i + 1] - rho[i]);
    trip.emplace_back(i, i - 1, A * w.d2m + B * w.d1m);
    trip.emplace_back(i, i, A * w.d2c + B * w.d1c + C);
    trip.emplace_back(i, i + 1, A * w.d2p + B * w.d1p);
  }
  trip.emplace_back(N - 1, N - 1, 1.0);
  rhs[N - 1] = 1.0 - rho[N - 1];

  Eigen::SparseMatrix<double> M(N, N);
  M.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(M);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("solve_coupled: warp system factorization failed");
  Vec p = lu.solve(rhs);
  Vec u(N);
  for (int i = 0; i < N; ++i) u[i] = p[i] / rho[i];
  return u;
}

}  // namespace

Vec warp_equation_residual(const InitialData& data, const Vec& rho,
                           const Vec& u_nodes, const Vec& f_nodes) {
  const int N = static_cast<int>(rho.size());
  const int n = data.n;
  RadialProfile u_prof = spline_profile(rho, u_nodes);
  RadialProfile f_prof = spline_profile(rho, f_nodes);
  Vec p(N);
  for (int i = 0; i < N; ++i) p[i] = rho[i] * u_nodes[i];
  Vec res = Vec::Zero(N);
  for (int i = 1; i + 1 < N; ++i) {
    const WarpCoefs wc = warp_coefs(data, u_prof, f_prof, rho[i]);
    const double A = wc.alpha;
    const double B = wc.beta - 2.0 * wc.alpha / rho[i];
    const double C =
        2.0 * wc.alpha / (rho[i] * rho[i]) - wc.beta / rho[i] - double(n);
    const StencilWeights w = stencil(rho[i] - rho[i - 1], rho[i + 1] - rho[i]);
    const double p1 = w.d1m * p[i - 1] + w.d1c * p[i] + w.d1p * p[i + 1];
    const double p2 = w.d2m * p[i - 1] + w.d2c * p[i] + w.d2p * p[i + 1];
    res[i] = (A * p2 + B * p1 + C * p[i]) / rho[i];
  }
  return res;
}

CoupledSolution solve_coupled(const InitialData& data, const RadialGrid& grid,
                              const CoupledOptions& opts) {
  if (!data.radial)
    throw std::invalid_argument("solve_coupled: data must be radial");
  const Vec rho = grid.nodes();
  const int N = static_cast<int>(rho.size());

  CoupledSolution out;
  out.rho = rho;
  out.f = Vec::Zero(N);
  out.u.resize(N);
  RadialProfile u_prof = v0_profile();
  for (int i = 0; i < N; ++i) out.u[i] = u_prof.value(rho[i]);

  // Inner epsilon schedule down to the floor.
  std::vector<double> eps_list;
  for (double e = 1e-2; e >= opts.eps_floor * (1.0 - 1e-12); e *= 0.5)
    eps_list.push_back(e);
  Vec eps_schedule = Eigen::Map<Vec>(eps_list.data(), eps_list.size());

  for (int outer = 1; outer <= opts.max_outer; ++outer) {
    out.outer_iterations = outer;

    SweepResult sweep = epsilon_sweep(data, u_prof, grid, eps_schedule,
                                      opts.coupled_tol * 0.1, opts.solver);
    out.f = sweep.limit.f;
    // Discrete J(f) residual with the regularization removed: at the swept
    // solution this is eps_limit * f plus the Newton tolerance.
    out.jang_residual = discrete_residual(data, u_prof, rho, out.f, 1.0, 0.0,
                                          opts.solver.phi_inner,
                                          opts.solver.phi_outer)
                            .segment(1, N - 2)
                            .cwiseAbs()
                            .maxCoeff();

    RadialProfile f_prof = spline_profile(rho, out.f);
    Vec u_solved = solve_warp_linear(data, rho, u_prof, f_prof);
    Vec u_next = out.u + opts.relaxation * (u_solved - out.u);

    for (int i = 0; i < N; ++i)
      if (!(u_next[i] > 0.0))
        throw std::runtime_error("solve_coupled: warp factor lost positivity");

    out.u = u_next;
    u_prof = spline_profile(rho, out.u);

    out.warp_residual =
        warp_equation_residual(data, rho, out.u, out.f).cwiseAbs().maxCoeff();
    if (out.warp_residual < opts.coupled_tol &&
        out.jang_residual < opts.coupled_tol) {
      out.converged = true;
      return out;
    }
  }
  throw std::runtime_error(
      "solve_coupled: no convergence within max_outer iterations");
}

ComparisonReport verify_comparison(const InitialData& data,
                                   const RadialProfile& u,
                                   const RadialSolution& solution,
                                   const BarrierSpec& upper) {
  ComparisonReport rep;
  const Vec& rho = solution.rho;
  RadialProfile barrier = upper.profile();

  rep.hypothesis_ok = true;
  for (int i = 0; i < rho.size(); ++i) {
    if (!(rho[i] < upper.rho0())) continue;  // derivative blows up at rho0
    const double f_plus = barrier.value(rho[i]);
    const double jang_plus = radial_jang_residual(data, u, barrier, rho[i],
                                                  1.0, 0.0);
    // J(f+) <= eps f+ and, by oddness, J(f-) >= eps f-.
    if (!(jang_plus <= solution.eps * f_plus + 1e-10)) {
      rep.hypothesis_ok = false;
      break;
    }
  }

  const double phi = solution.phi_inner;
  const double lo = -barrier.value(rho[0]);
  const double hi = barrier.value(rho[0]);
  rep.boundary_ok = (lo <= phi && phi <= hi);

  rep.sandwich_ok = true;
  for (int i = 0; i < rho.size(); ++i) {
    const double f_plus = barrier.value(rho[i]);
    if (!(solution.f[i] <= f_plus + 1e-12 &&
          solution.f[i] >= -f_plus - 1e-12)) {
      rep.sandwich_ok = false;
      rep.violations.push_back(rho[i]);
    }
  }
  return rep;
}

}  // namespace janglab
