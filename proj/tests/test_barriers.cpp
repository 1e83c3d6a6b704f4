#include <doctest.h>

#include <cmath>

#include "janglab/barriers.hpp"
#include "test_helpers.hpp"

using namespace janglab;
using namespace janglab::testing;

TEST_SUITE("barriers") {

TEST_CASE("mixing function: limits, bounds and monotonicity") {
  const int n = 3;
  const double tau = 2.25;
  // F -> 0 as lambda -> 0+
  for (double x : {0.2, 0.7, 1.0})
    CHECK(barrier_mixing(n, tau, x, 1e-12) < 1e-10);
  // 0 <= F <= tau - n/2 on [0,1] x (0,1), decreasing in x
  auto rng = make_rng(307);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const double x = unif(rng);
    const double lam = std::min(std::max(unif(rng), 1e-6), 1.0 - 1e-6);
    const double F = barrier_mixing(n, tau, x, lam);
    CHECK(F >= 0.0);
    CHECK(F <= tau - 0.5 * n + 1e-14);
    CHECK(barrier_mixing(n, tau, std::min(x + 0.1, 1.0), lam) <= F + 1e-14);
  }
}

TEST_CASE("parameter choice honors both inequalities with margin") {
  for (int n : {3, 4, 5, 6, 7}) {
    for (double frac : {0.55, 0.75, 0.95}) {
      const double tau = frac * n;
      for (double c0 : {0.1, 1.0, 10.0}) {
        BarrierParameters par = choose_parameters(n, tau, c0);
        const double lhs = c0 * par.rho0 + c0 * std::pow(par.rho0, tau);
        CHECK(lhs <= 0.25 * (n - tau) / 2.0 + 1e-12);  // margin factor >= 2
        const double x0 = std::pow(3.0 * (n - tau) / 8.0, 1.0 / n);
        CHECK(barrier_mixing(n, tau, x0, par.lambda) <= 1.0 / 16.0 + 1e-12);
        CHECK(par.lambda > 0.0);
        CHECK(par.lambda < 1.0);
      }
    }
  }
  CHECK_THROWS_AS(choose_parameters(3, 1.2, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(choose_parameters(3, 3.5, 1.0), std::invalid_argument);
}

TEST_CASE("slope profile: normalization, envelope and derivative identity") {
  const int n = 4;
  const double tau = 3.0;
  BarrierSpec spec = BarrierSpec::make(n, tau, 1.0);
  CHECK(spec.xi(spec.rho0()) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK_THROWS_AS(spec.xi(spec.rho0() * 1.001), std::domain_error);

  Vec grid = log_spaced(spec.rho0() * 1e-6, spec.rho0(), 10000);
  double prev = 0.0;
  for (int i = 0; i < grid.size(); ++i) {
    const double rho = grid[i];
    const double xi = spec.xi(rho);
    const double lower = std::pow(rho / spec.rho0(), tau);
    const double upper = std::pow(rho / spec.rho0(), 0.5 * n);
    CHECK(xi >= lower - 1e-14);
    CHECK(xi <= upper + 1e-14);
    CHECK(xi > prev);  // strictly increasing
    prev = xi;
    const double g = spec.gamma_exponent(rho);
    CHECK(g >= 0.5 * n - 1e-14);
    CHECK(g <= tau + 1e-14);
  }

  // gamma identity against a central difference
  for (double rho : {0.3 * spec.rho0(), 0.6 * spec.rho0(), 0.9 * spec.rho0()}) {
    const double fd = richardson_derivative(
        [&](double r) { return spec.xi(r); }, rho, 1e-5 * spec.rho0());
    CHECK(spec.xi_prime(rho) == doctest::Approx(fd).epsilon(1e-8));
  }
}

TEST_CASE("barrier function: endpoints, decay weight and cache accuracy") {
  const int n = 3;
  const double tau = 2.25;
  BarrierSpec spec = BarrierSpec::make(n, tau, 1.0);
  CHECK(spec.value(0.0) == 0.0);
  const double at_rho0 = spec.value(spec.rho0());
  CHECK(std::isfinite(at_rho0));
  CHECK(at_rho0 > 0.0);

  // weighted sup of rho^-(tau+1) f_+ on (0, rho0/2]
  double weighted = 0.0;
  Vec rhos = log_spaced(spec.rho0() * 1e-4, spec.rho0() * 0.5, 100);
  for (int i = 0; i < rhos.size(); ++i)
    weighted = std::max(weighted,
                        spec.value(rhos[i]) / std::pow(rhos[i], tau + 1.0));
  CHECK(std::isfinite(weighted));
  CHECK(weighted > 0.0);

  // cache against direct quadrature
  auto rng = make_rng(311);
  std::uniform_real_distribution<double> unif(1e-3, 1.0);
  for (int trial = 0; trial < 40; ++trial) {
    const double rho = unif(rng) * spec.rho0();
    CHECK(std::abs(spec.value(rho) - spec.value_quadrature(rho)) < 1e-11);
  }

  // derivative identities: f' = xi/sqrt(1-xi^2), f'' and f''' by FD
  for (double rho : {0.3 * spec.rho0(), 0.7 * spec.rho0()}) {
    const double fd1 = richardson_derivative(
        [&](double r) { return spec.value_quadrature(r); }, rho,
        1e-4 * spec.rho0());
    CHECK(spec.derivative(rho) == doctest::Approx(fd1).epsilon(1e-7));
    const double fd2 = richardson_derivative(
        [&](double r) { return spec.derivative(r); }, rho, 1e-4 * spec.rho0());
    CHECK(spec.second_derivative(rho) == doctest::Approx(fd2).epsilon(1e-7));
    const double fd3 = richardson_derivative(
        [&](double r) { return spec.second_derivative(r); }, rho,
        1e-4 * spec.rho0());
    CHECK(spec.third_derivative(rho) == doctest::Approx(fd3).epsilon(1e-6));
  }
}

TEST_CASE("lower barrier is the negation of the upper one") {
  const int n = 5;
  const double tau = 0.75 * n;
  BarrierSpec up = BarrierSpec::make(n, tau, 0.5, +1);
  BarrierSpec dn = BarrierSpec::make(n, tau, 0.5, -1);
  for (double rho : {0.2 * up.rho0(), 0.5 * up.rho0(), 0.9 * up.rho0()}) {
    CHECK(dn.xi(rho) == -up.xi(rho));
    CHECK(dn.value(rho) == doctest::Approx(-up.value(rho)).epsilon(1e-13));
    CHECK(dn.derivative(rho) == -up.derivative(rho));
  }
  CHECK(up.value(0.5 * up.rho0()) > 0.0);  // f_+ > 0, f_- < 0
  CHECK(dn.value(0.5 * up.rho0()) < 0.0);
}

TEST_CASE("differential inequality holds across the parameter matrix") {
  for (int n : {3, 5, 7}) {
    for (double frac : {0.55, 0.95}) {
      const double tau = frac * n;
      for (double c0 : {0.1, 10.0}) {
        BarrierSpec spec = BarrierSpec::make(n, tau, c0);
        Vec grid = log_spaced(spec.rho0() * 1e-6, spec.rho0(), 2000);
        BarrierInequalityReport rep = verify_barrier_inequality(spec, grid);
        CHECK(rep.upper_pass);
        CHECK(rep.lower_pass);
        CHECK(rep.max_lhs < 0.0);
        CHECK(rep.violating_rho.empty());
      }
    }
  }
}

TEST_CASE("inequality failures are reported, not thrown") {
  // lambda pushed to 0.999 with a large C0 breaks the admissibility bound
  // F(x0, lambda) < 1/8; the report must list the violations.
  const int n = 3;
  const double tau = 0.95 * n, c0 = 10.0;
  BarrierParameters par = choose_parameters(n, tau, c0);
  BarrierSpec bad(n, tau, c0, par.rho0, 0.999, +1, false);
  Vec grid = log_spaced(bad.rho0() * 1e-4, bad.rho0(), 3000);
  BarrierInequalityReport rep = verify_barrier_inequality(bad, grid);
  CHECK_FALSE(rep.upper_pass);
  CHECK(!rep.violating_rho.empty());
  CHECK(rep.max_lhs > 0.0);

  // the negated (lower) assembly flags the same points
  BarrierSpec bad_lower(n, tau, c0, par.rho0, 0.999, -1, false);
  for (double rho : rep.violating_rho) {
    const double xi_m = bad_lower.xi(rho);
    const double xi_m_prime = bad_lower.xi_prime(rho);
    const double lower_lhs = xi_m_prime -
                             (xi_m / rho) * (n - xi_m * xi_m - c0 * rho) -
                             c0 * std::pow(rho, tau - 1.0);
    CHECK(lower_lhs < 0.0);  // fails the required positivity
    if (rep.violating_rho.size() > 20) break;
  }
}

TEST_CASE("lower-barrier report equals the upper report negated term-by-term") {
  const int n = 4;
  const double tau = 0.75 * n, c0 = 1.0;
  BarrierSpec up = BarrierSpec::make(n, tau, c0, +1);
  BarrierSpec dn = BarrierSpec::make(n, tau, c0, -1);
  Vec grid = log_spaced(up.rho0() * 1e-3, up.rho0(), 200);
  BarrierInequalityReport rep = verify_barrier_inequality(up, grid);
  for (int i = 0; i < grid.size(); ++i) {
    const double rho = grid[i];
    const double xi_m = dn.xi(rho);
    const double lower_lhs = dn.xi_prime(rho) -
                             (xi_m / rho) * (n - xi_m * xi_m - c0 * rho) -
                             c0 * std::pow(rho, tau - 1.0);
    CHECK(lower_lhs == doctest::Approx(-rep.lhs[i]).epsilon(1e-12));
  }
}

TEST_CASE("C0 estimates: background value, monotonicity, stability") {
  const int n = 3;
  const double tau = 2.25;
  InitialData ads = make_initial_data(DataFamily::pure_ads(), n, tau);
  const double c0_ads = estimate_C0(ads, inverse_rho_profile());
  CHECK(c0_ads > 0.0);
  CHECK(c0_ads < 10.0);  // only the exact (1-2rho) corrections contribute

  InitialData small = make_initial_data(DataFamily::tensor(0.01, 0, tau), n, tau);
  InitialData large = make_initial_data(DataFamily::tensor(0.02, 0, tau), n, tau);
  const double c_small = estimate_C0(small, inverse_rho_profile());
  const double c_large = estimate_C0(large, inverse_rho_profile());
  CHECK(c_large >= c_small);

  const double dense = estimate_C0(ads, inverse_rho_profile(), 1e-6, 0.45, 800);
  CHECK(std::abs(dense - c0_ads) <= 0.1 * c0_ads);
}

TEST_CASE("key cancellation along the barrier graph") {
  const int n = 3;
  const double tau = 2.25;
  InitialData ads = make_initial_data(DataFamily::pure_ads(), n, tau);
  RadialProfile u = inverse_rho_profile();
  BarrierSpec spec = BarrierSpec::make(n, tau, 1.0);
  double sup = 0.0;
  Vec rhos = log_spaced(spec.rho0() * 1e-5, spec.rho0() * 0.9999, 500);
  for (int i = 0; i < rhos.size(); ++i) {
    const double rho = rhos[i];
    const double xi = spec.xi(rho);
    const double fp = spec.derivative(rho);
    const double df2 = fp * fp / ads.radial->g_rr.value(rho);
    const double uu = u.value(rho);
    const double cancel = (1.0 + uu * uu * df2) * (1.0 - xi * xi);
    sup = std::max(sup, std::abs(cancel - 1.0) / rho);
  }
  // exact background: (1 + u^2 |df|^2)(1 - xi^2) = 1 - 2 rho xi^2
  CHECK(sup <= 2.0 + 1e-9);
  CHECK(sup > 0.0);
}

}  // TEST_SUITE
