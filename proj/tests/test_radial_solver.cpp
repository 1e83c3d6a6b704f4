#include <doctest.h>

#include <cmath>

#include "janglab/radial_solver.hpp"
#include "test_helpers.hpp"

using namespace janglab;
using namespace janglab::testing;

namespace {

InitialData tensor_data(double amplitude, int mode, double p, int n = 3) {
  return make_initial_data(DataFamily::tensor(amplitude, mode, p), n, p);
}

InitialData mots_data(double peak, int n = 3, double tau = 2.25) {
  RadialProfile phi = power_profile(peak / std::pow(0.45, 3), 3.0);
  RadialData prof{ads_radial_profile(), ads_angular_profile(),
                  product_profiles(phi, ads_radial_profile()),
                  product_profiles(phi, ads_angular_profile())};
  return make_initial_data(DataFamily::from_profiles(prof), n, tau);
}

}  // namespace

TEST_SUITE("radial_solver") {

TEST_CASE("radial residual vanishes on the exact background") {
  InitialData ads = make_initial_data(DataFamily::pure_ads(), 3, 2.25);
  RadialProfile f = constant_profile(0.0);
  for (double rho : {0.05, 0.2, 0.4})
    CHECK(std::abs(radial_jang_residual(ads, inverse_rho_profile(), f, rho,
                                        1.0, 0.0)) < 1e-14);
}

TEST_CASE("radial residual agrees with the full chart operator") {
  for (int n : {3, 4, 5}) {
    const double tau = 0.75 * n;
    InitialData data = tensor_data(0.3, 0, tau, n);
    RadialProfile u_prof = v0_profile();
    WarpFactor u_chart = warp_v0(n);
    RadialProfile f_prof = power_profile(0.7, 2.0);
    GraphFunction f_chart = graph_from_profile(n, f_prof);
    auto rng = make_rng(401 + n);
    for (int trial = 0; trial < 8; ++trial) {
      Vec dir = random_point(rng, n);
      dir.normalize();
      std::uniform_real_distribution<double> unif(0.08, 0.42);
      const double rho = unif(rng);
      BallPoint p = ball_point_at_rho(n, rho, dir);
      const double full =
          jang_operator(data, u_chart, f_chart, p, 1.0, 0.0).value;
      const double radial =
          radial_jang_residual(data, u_prof, f_prof, rho, 1.0, 0.0);
      CHECK(std::abs(full - radial) < 1e-10 * (1.0 + std::abs(full)));
    }
  }
}

TEST_CASE("solver works across dimensions") {
  for (int n : {4, 5}) {
    const double tau = 0.75 * n;
    InitialData ads = make_initial_data(DataFamily::pure_ads(), n, tau);
    RadialGrid grid{0.05, 0.45, 64, RadialGrid::Spacing::log_spacing};
    RadialSolution exact = solve_regularized(ads, v0_profile(), grid, 1e-4, {});
    CHECK(exact.f.cwiseAbs().maxCoeff() <= 1e-8);

    InitialData data = tensor_data(1e-3, 0, tau, n);
    SweepResult sweep = epsilon_sweep(data, v0_profile(), grid,
                                      default_epsilon_schedule(), 1e-7, {});
    CHECK(sweep.cauchy);
    CHECK(sweep.limit.f.cwiseAbs().maxCoeff() > 0.0);

    CoupledSolution coupled = solve_coupled(ads, grid, {});
    CHECK(coupled.converged);
    CHECK(coupled.warp_residual <= 1e-6);
  }
}

TEST_CASE("slope substitution identities of the barrier profile") {
  BarrierSpec spec = BarrierSpec::make(3, 2.25, 1.0);
  for (double rho : {0.3 * spec.rho0(), 0.6 * spec.rho0()}) {
    const double xi = spec.xi(rho);
    const double f1 = spec.derivative(rho);
    CHECK(f1 == doctest::Approx(xi / std::sqrt(1.0 - xi * xi)).epsilon(1e-14));
    const double f2_expected =
        spec.xi_prime(rho) / std::pow(1.0 - xi * xi, 1.5);
    CHECK(spec.second_derivative(rho) ==
          doctest::Approx(f2_expected).epsilon(1e-14));
    // and the second derivative is the rho-derivative of the first
    const double fd = richardson_derivative(
        [&](double r) { return spec.derivative(r); }, rho, 1e-5 * spec.rho0());
    CHECK(spec.second_derivative(rho) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("exact solution recovery on the background") {
  InitialData ads = make_initial_data(DataFamily::pure_ads(), 3, 2.25);
  RadialGrid grid{0.05, 0.45, 256, RadialGrid::Spacing::log_spacing};
  for (double eps : {1e-6, 1e-4, 1e-2}) {
    RadialSolution sol = solve_regularized(ads, v0_profile(), grid, eps, {});
    CHECK(sol.converged);
    CHECK(sol.f.cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(sol.residual_sup <= 1e-10);
    CHECK(sol.s_reached == 1.0);
  }
}

TEST_CASE("computed solutions satisfy the a-priori bound") {
  const double tau = 2.25;
  for (double amp : {1e-3, 5e-3}) {
    for (int mode : {0, 1}) {
      InitialData data = tensor_data(amp, mode, tau);
      RadialGrid grid{0.05, 0.45, 128, RadialGrid::Spacing::log_spacing};
      SolverOptions opts;
      opts.phi_inner = 1e-5;
      const double eps = 1e-3;
      RadialSolution sol = solve_regularized(data, v0_profile(), grid, eps, opts);
      double sup_trk = 0.0;
      const RadialData& prof = *data.radial;
      for (int i = 0; i < sol.rho.size(); ++i) {
        const double r = sol.rho[i];
        sup_trk = std::max(sup_trk,
                           std::abs(prof.k_rr.value(r) / prof.g_rr.value(r) +
                                    2.0 * prof.k_ss.value(r) /
                                        prof.g_ss.value(r)));
      }
      const double bound = std::max(sup_trk / eps, std::abs(opts.phi_inner));
      CHECK(sol.f.cwiseAbs().maxCoeff() <= bound + 1e-12);
    }
  }
}

TEST_CASE("untrapped precondition is checked at the inner edge") {
  // constant K = 1.2 g is trapped at rho = 0.05
  RadialData prof{ads_radial_profile(), ads_angular_profile(),
                  scale_profile(ads_radial_profile(), 1.2),
                  scale_profile(ads_angular_profile(), 1.2)};
  InitialData data = make_initial_data(DataFamily::from_profiles(prof), 3, 2.25);
  RadialGrid grid{0.05, 0.45, 64, RadialGrid::Spacing::log_spacing};
  CHECK_THROWS_AS(solve_regularized(data, v0_profile(), grid, 1e-3, {}),
                  std::invalid_argument);
}

TEST_CASE("discrete maximum principle: K = 0 and zero data give zero") {
  InitialData data = make_initial_data(DataFamily::conformal(0.02, 2.25), 3,
                                       2.25);
  RadialGrid grid{0.05, 0.45, 64, RadialGrid::Spacing::log_spacing};
  RadialSolution sol = solve_regularized(data, v0_profile(), grid, 1e-4, {});
  CHECK(sol.f.cwiseAbs().maxCoeff() <= 1e-10);
}

TEST_CASE("sign equivariance under negating K and phi") {
  const double tau = 2.25;
  InitialData plus = tensor_data(2e-3, 0, tau);
  InitialData minus = tensor_data(-2e-3, 0, tau);
  RadialGrid grid{0.05, 0.45, 128, RadialGrid::Spacing::log_spacing};
  SolverOptions p_opts, m_opts;
  p_opts.phi_inner = 1e-4;
  m_opts.phi_inner = -1e-4;
  RadialSolution a = solve_regularized(plus, v0_profile(), grid, 1e-3, p_opts);
  RadialSolution b = solve_regularized(minus, v0_profile(), grid, 1e-3, m_opts);
  CHECK((a.f + b.f).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("s-path independence") {
  InitialData data = tensor_data(2e-3, 0, 2.25);
  RadialGrid grid{0.05, 0.45, 128, RadialGrid::Spacing::log_spacing};
  SolverOptions few, many;
  few.ds_initial = 0.25;
  many.ds_initial = 1.0 / 64.0;
  RadialSolution a = solve_regularized(data, v0_profile(), grid, 1e-3, few);
  RadialSolution b = solve_regularized(data, v0_profile(), grid, 1e-3, many);
  CHECK(a.s_steps != b.s_steps);
  CHECK(a.residual_sup <= 1e-10);
  CHECK(b.residual_sup <= 1e-10);
  CHECK((a.f - b.f).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("epsilon sweep on the background stops immediately") {
  InitialData ads = make_initial_data(DataFamily::pure_ads(), 3, 2.25);
  RadialGrid grid{0.05, 0.45, 64, RadialGrid::Spacing::log_spacing};
  SweepResult sweep = epsilon_sweep(ads, v0_profile(), grid,
                                    default_epsilon_schedule(), 1e-7, {});
  CHECK(sweep.cauchy);
  CHECK(sweep.epsilons.size() == 2);  // first comparison already converged
  CHECK(sweep.limit.f.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(sweep.limit_jang_residual < 1e-12);
}

TEST_CASE("epsilon sweep: small residual and order-two refinement") {
  const double tau = 2.25;
  InitialData data = tensor_data(1e-5, 0, tau);
  RadialGrid fine{0.05, 0.45, 512, RadialGrid::Spacing::log_spacing};
  SweepResult deep = epsilon_sweep(data, v0_profile(), fine,
                                   default_epsilon_schedule(), 1e-13, {});
  Vec disc = discrete_jang_residual(data, v0_profile(), deep.limit.rho,
                                    deep.limit.f, 1.0, 0.0);
  CHECK(disc.cwiseAbs().maxCoeff() <= 10.0 * 1e-10 * 10.0);  // 10 x newton_tol budget
  CHECK(disc.cwiseAbs().maxCoeff() <= 1e-9);

  Vec hs(3), errs(3);
  int idx = 0;
  for (int N : {64, 128, 256}) {
    RadialGrid grid{0.05, 0.45, N, RadialGrid::Spacing::log_spacing};
    SweepResult sweep = epsilon_sweep(data, v0_profile(), grid,
                                      default_epsilon_schedule(), 1e-13, {});
    RadialProfile fp = sweep.limit.profile();
    double interior = 0.0;
    for (double r = 0.1; r <= 0.4; r += 0.002)
      interior = std::max(interior,
                          std::abs(radial_jang_residual(data, v0_profile(),
                                                        fp, r, 1.0, 0.0)));
    hs[idx] = 1.0 / N;
    errs[idx] = interior;
    ++idx;
  }
  CHECK(fit_order(hs, errs) >= 2.0);
}

TEST_CASE("solutions converge at order two against a reference grid") {
  const double tau = 2.25;
  InitialData data = tensor_data(1e-3, 0, tau);
  RadialGrid ref_grid{0.05, 0.45, 4096, RadialGrid::Spacing::log_spacing};
  SweepResult ref = epsilon_sweep(data, v0_profile(), ref_grid,
                                  default_epsilon_schedule(), 1e-7, {});
  RadialProfile fref = ref.limit.profile();
  Vec hs(3), errs(3);
  int idx = 0;
  for (int N : {64, 128, 256}) {
    RadialGrid grid{0.05, 0.45, N, RadialGrid::Spacing::log_spacing};
    SweepResult sweep = epsilon_sweep(data, v0_profile(), grid,
                                      default_epsilon_schedule(), 1e-7, {});
    RadialProfile fN = sweep.limit.profile();
    double err = 0.0;
    for (double r = 0.06; r <= 0.44; r += 0.005)
      err = std::max(err, std::abs(fN.value(r) - fref.value(r)));
    hs[idx] = 1.0 / N;
    errs[idx] = err;
    ++idx;
  }
  CHECK(fit_order(hs, errs) >= 2.0);
}

TEST_CASE("mots-engineered data: sweep reports blow-up, not convergence") {
  InitialData data = mots_data(1.75);
  MotsScan scan = detect_mots(data, 0.05, 0.449);
  REQUIRE(scan.outer.size() == 1);  // one marginally trapped level inside
  CHECK(untrapped_margin(data, 0.05) > 0.0);

  Vec schedule(8);
  for (int k = 0; k < 8; ++k) schedule[k] = 16.0 * std::pow(2.0, -k);
  RadialGrid grid{0.05, 0.44, 96, RadialGrid::Spacing::log_spacing};
  SolverOptions opts;
  opts.max_newton = 100;
  SweepResult sweep =
      epsilon_sweep(data, v0_profile(), grid, schedule, 1e-9, opts);
  CHECK_FALSE(sweep.cauchy);
  CHECK(!sweep.note.empty());
  REQUIRE(sweep.sup_f.size() >= 2);
  for (size_t k = 1; k < sweep.sup_f.size(); ++k)
    CHECK(sweep.sup_f[k] > sweep.sup_f[k - 1]);  // grows as eps decreases
}

TEST_CASE("coupled system recovers the model fixed point") {
  InitialData ads = make_initial_data(DataFamily::pure_ads(), 3, 2.25);
  RadialGrid grid{0.05, 0.45, 128, RadialGrid::Spacing::log_spacing};
  CoupledSolution sol = solve_coupled(ads, grid, {});
  CHECK(sol.converged);
  CHECK(sol.outer_iterations <= 2);
  CHECK(sol.jang_residual <= 1e-6);
  CHECK(sol.warp_residual <= 1e-6);
  CHECK(sol.f.cwiseAbs().maxCoeff() < 1e-10);
  for (int i = 0; i < sol.rho.size(); ++i) {
    const double v0 = (1.0 - sol.rho[i]) / sol.rho[i];
    CHECK(std::abs(sol.u[i] - v0) < 1e-8 * v0);
  }
}

TEST_CASE("discrete warp operator annihilates the exact eigenfunction") {
  InitialData ads = make_initial_data(DataFamily::pure_ads(), 3, 2.25);
  RadialGrid grid{0.05, 0.45, 512, RadialGrid::Spacing::log_spacing};
  Vec rho = grid.nodes();
  Vec v0(rho.size());
  for (int i = 0; i < rho.size(); ++i) v0[i] = (1.0 - rho[i]) / rho[i];
  Vec res = warp_equation_residual(ads, rho, v0, Vec::Zero(rho.size()));
  CHECK(res.cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("coupled system on a small conformal perturbation") {
  const double tau = 2.25;
  InitialData data =
      make_initial_data(DataFamily::conformal(5e-3, tau), 3, tau);
  RadialGrid grid{0.05, 0.45, 128, RadialGrid::Spacing::log_spacing};
  CoupledSolution sol = solve_coupled(data, grid, {});
  CHECK(sol.converged);
  CHECK(sol.outer_iterations <= 30);
  // u - V0 decays at the declared rate tau - 1: the weighted sup is finite
  // and stable under refinement
  auto weighted = [&](const CoupledSolution& cs) {
    double sup = 0.0;
    for (int i = 0; i < cs.rho.size(); ++i) {
      const double v0 = (1.0 - cs.rho[i]) / cs.rho[i];
      sup = std::max(sup,
                     std::abs(cs.u[i] - v0) / std::pow(cs.rho[i], tau - 1.0));
    }
    return sup;
  };
  RadialGrid fine{0.05, 0.45, 256, RadialGrid::Spacing::log_spacing};
  CoupledSolution sol_fine = solve_coupled(data, fine, {});
  const double c0 = weighted(sol);
  const double c1 = weighted(sol_fine);
  CHECK(std::isfinite(c0));
  CHECK(c0 > 0.0);
  CHECK(c1 <= 2.0 * c0);
  CHECK(c0 <= 2.0 * c1);
}

TEST_CASE("coupled system on perturbed data") {
  const double tau = 2.25;
  InitialData data = tensor_data(1e-3, 0, tau);
  RadialGrid grid{0.05, 0.45, 128, RadialGrid::Spacing::log_spacing};
  CoupledSolution sol = solve_coupled(data, grid, {});
  CHECK(sol.converged);
  CHECK(sol.outer_iterations <= 30);
  CHECK(sol.jang_residual <= 1e-6);
  CHECK(sol.warp_residual <= 1e-6);
  for (int i = 0; i < sol.u.size(); ++i) CHECK(sol.u[i] > 0.0);

  // u - V0 stays bounded in the declared tau - 1 weight, stable under
  // refinement within a factor of two
  auto weighted_sup = [&](const CoupledSolution& cs) {
    double sup = 0.0;
    for (int i = 0; i < cs.rho.size(); ++i) {
      const double v0 = (1.0 - cs.rho[i]) / cs.rho[i];
      sup = std::max(sup, std::abs(cs.u[i] - v0) /
                              std::pow(cs.rho[i], tau - 1.0));
    }
    return sup;
  };
  const double coarse = weighted_sup(sol);
  RadialGrid fine{0.05, 0.45, 256, RadialGrid::Spacing::log_spacing};
  CoupledSolution sol_fine = solve_coupled(data, fine, {});
  const double refined = weighted_sup(sol_fine);
  CHECK(std::isfinite(coarse));
  CHECK(refined <= 2.0 * coarse + 1e-12);
  CHECK(coarse <= 2.0 * refined + 1e-12);
}

TEST_CASE("vertical diagnostic is stable under refinement of solutions") {
  const double tau = 2.25;
  InitialData data = tensor_data(2e-3, 0, tau);
  auto sup_u_df = [&](int N) {
    RadialGrid grid{0.05, 0.45, N, RadialGrid::Spacing::log_spacing};
    SweepResult sweep = epsilon_sweep(data, v0_profile(), grid,
                                      default_epsilon_schedule(), 1e-9, {});
    Vec sample = lin_spaced(0.08, 0.42, 40);
    VerticalDiagnostic diag = vertical_inequality_diagnostic(
        data, v0_profile(), sweep.limit.profile(), sample);
    CHECK(std::isfinite(diag.sup_ratio));
    return diag.sup_u_df;
  };
  const double coarse = sup_u_df(64);
  const double fine = sup_u_df(128);
  CHECK(std::isfinite(coarse));
  CHECK(coarse > 0.0);
  CHECK(fine <= 2.0 * coarse);
  CHECK(coarse <= 2.0 * fine);
}

TEST_CASE("barrier comparison sandwich for computed solutions") {
  const int n = 3;
  const double tau = 2.25;
  InitialData ads = make_initial_data(DataFamily::pure_ads(), n, tau);
  InitialData data = tensor_data(1e-3, 0, tau);
  const double c0 = estimate_C0(data, v0_profile());
  BarrierSpec spec = BarrierSpec::make(n, tau, c0);
  RadialGrid grid{spec.rho0() / 8.0, spec.rho0() * 0.995, 96,
                  RadialGrid::Spacing::log_spacing};

  {  // the background solution sits strictly between f- < 0 < f+
    RadialSolution sol = solve_regularized(ads, v0_profile(), grid, 1e-4, {});
    ComparisonReport rep = verify_comparison(ads, v0_profile(), sol, spec);
    CHECK(rep.hypothesis_ok);
    CHECK(rep.boundary_ok);
    CHECK(rep.sandwich_ok);
  }

  {  // perturbed data pass at all nodes
    RadialSolution sol = solve_regularized(data, v0_profile(), grid, 1e-4, {});
    ComparisonReport rep = verify_comparison(data, v0_profile(), sol, spec);
    CHECK(rep.hypothesis_ok);
    CHECK(rep.boundary_ok);
    CHECK(rep.sandwich_ok);
    CHECK(rep.violations.empty());
  }

  {  // deliberately violated boundary data raise the hypothesis flag
    SolverOptions opts;
    opts.phi_inner = 2.0 * spec.value(grid.rho_min);
    RadialSolution sol = solve_regularized(data, v0_profile(), grid, 1e-4, opts);
    ComparisonReport rep = verify_comparison(data, v0_profile(), sol, spec);
    CHECK_FALSE(rep.boundary_ok);
  }
}

}  // TEST_SUITE
