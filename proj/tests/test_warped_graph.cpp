#include <doctest.h>

#include <cmath>

#include "janglab/warped_graph.hpp"
#include "test_helpers.hpp"

using namespace janglab;
using namespace janglab::testing;

namespace {

// Smooth radial mollifier supported in |x - center| < width.
struct Bump {
  Vec center;
  double width;

  // polynomial profile: C^5 at the edge, so Gauss-Legendre stays accurate
  double value(const Vec& x) const {
    const double m = (x - center).squaredNorm() / (width * width);
    if (m >= 1.0) return 0.0;
    return std::pow(1.0 - m, 6);
  }
  Vec grad(const Vec& x) const {
    const double m = (x - center).squaredNorm() / (width * width);
    if (m >= 1.0) return Vec::Zero(x.size());
    return (-12.0 * std::pow(1.0 - m, 5) / (width * width)) * (x - center);
  }
};

double graph_area_element(const SymTensorField& g, const WarpFactor& u,
                          const Vec& x, const Vec& df) {
  Mat gbar = g(x);
  const double uv = u.value(x);
  gbar += uv * uv * df * df.transpose();
  return std::sqrt(gbar.determinant());
}

}  // namespace

TEST_SUITE("warped_graph") {

TEST_CASE("warped christoffels: product metric when u is constant") {
  const int n = 3;
  WarpFactor one = warp_constant_one(n);
  auto rng = make_rng(101);
  SymTensorField g = random_smooth_metric(rng, n);
  BallPoint p = ball_point(random_point(rng, n));
  WarpedChristoffels wc = warped_christoffels(g, one, p);
  CHECK(wc.tt_spatial.cwiseAbs().maxCoeff() == 0.0);
  CHECK(wc.it_time.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("warped christoffels: mixed family is u_i/u") {
  const int n = 4;
  auto rng = make_rng(103);
  SymTensorField g = random_smooth_metric(rng, n);
  WarpFactor u = random_smooth_warp(rng, n);
  for (int trial = 0; trial < 10; ++trial) {
    BallPoint p = ball_point(random_point(rng, n));
    WarpedChristoffels wc = warped_christoffels(g, u, p);
    Vec expected = u.grad(p.x) / u.value(p.x);
    CHECK((wc.it_time - expected).cwiseAbs().maxCoeff() < 1e-14);
  }
}

TEST_CASE("warped christoffels match finite differences on the product chart") {
  const int n = 3;
  auto rng = make_rng(107);
  SymTensorField g = random_smooth_metric(rng, n);
  WarpFactor u = random_smooth_warp(rng, n);
  // value-only product field forces the finite-difference path
  SymTensorField product = product_metric_field(g, u);
  SymTensorField product_fd(n + 1,
                            [product](const Vec& xt) { return product(xt); });
  for (int trial = 0; trial < 5; ++trial) {
    BallPoint p = ball_point(random_point(rng, n, 0.2, 0.6));
    Vec xt(n + 1);
    xt.head(n) = p.x;
    xt[n] = 0.3;
    // the (n+1)-point has |xt| possibly >= 1; bypass chart validation by
    // evaluating the finite differences directly
    Mat T = product_fd(xt);
    Mat T_inv = positive_definite_inverse(T);
    auto dT = product_fd.d1_numeric(xt, 1e-4);
    std::vector<Mat> gamma(n + 1, Mat::Zero(n + 1, n + 1));
    for (int k = 0; k <= n; ++k)
      for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
          double sum = 0.0;
          for (int l = 0; l <= n; ++l)
            sum += T_inv(k, l) * (dT[i](j, l) + dT[j](i, l) - dT[l](i, j));
          gamma[k](i, j) = 0.5 * sum;
        }
    WarpedChristoffels wc = warped_christoffels(g, u, p);
    double err = 0.0;
    for (int k = 0; k < n; ++k) {
      // spatial-spatial block
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
          err = std::max(err,
                         std::abs(gamma[k](i, j) - wc.spatial[k](i, j)));
      // Gamma^k_tt = -u u^k
      err = std::max(err, std::abs(gamma[k](n, n) - wc.tt_spatial[k]));
      // Gamma^k_it = 0
      for (int i = 0; i < n; ++i)
        err = std::max(err, std::abs(gamma[k](i, n)));
    }
    for (int i = 0; i < n; ++i) {
      // Gamma^t_it = u_i/u, Gamma^t_ij = 0
      err = std::max(err, std::abs(gamma[n](i, n) - wc.it_time[i]));
      for (int j = 0; j < n; ++j) err = std::max(err, std::abs(gamma[n](i, j)));
    }
    err = std::max(err, std::abs(gamma[n](n, n)));  // Gamma^t_tt = 0
    CHECK(err < 1e-6);
  }
}

TEST_CASE("graph metric: zero slope reduces to the base metric") {
  const int n = 3;
  auto rng = make_rng(109);
  SymTensorField g = random_smooth_metric(rng, n);
  WarpFactor u = random_smooth_warp(rng, n);
  BallPoint p = ball_point(random_point(rng, n));
  GraphMetric gm = graph_metric(g, u, zero_graph(n), p);
  CHECK((gm.value - g(p.x)).cwiseAbs().maxCoeff() < 1e-15);
  CHECK((gm.inverse - positive_definite_inverse(g(p.x))).cwiseAbs().maxCoeff() <
        1e-12);
}

TEST_CASE("graph metric: rank-one inverse is exact") {
  const int n = 4;
  auto rng = make_rng(113);
  for (int trial = 0; trial < 20; ++trial) {
    SymTensorField g = random_smooth_metric(rng, n);
    WarpFactor u = random_smooth_warp(rng, n);
    GraphFunction f = random_smooth_graph(rng, n);
    BallPoint p = ball_point(random_point(rng, n));
    GraphMetric gm = graph_metric(g, u, f, p);
    CHECK((gm.inverse * gm.value - Mat::Identity(n, n)).cwiseAbs().maxCoeff() <
          1e-12);
    CHECK((gm.inverse - gm.value.inverse()).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("unit normal: zero slope, norm and orthogonality") {
  const int n = 3;
  auto rng = make_rng(127);
  SymTensorField g = random_smooth_metric(rng, n);
  WarpFactor u = random_smooth_warp(rng, n);
  {
    BallPoint p = ball_point(random_point(rng, n));
    UnitNormal nu = unit_normal(g, u, zero_graph(n), p);
    CHECK(nu.spatial.cwiseAbs().maxCoeff() == 0.0);
    CHECK(nu.vertical == doctest::Approx(-1.0 / u.value(p.x)).epsilon(1e-15));
  }
  for (int trial = 0; trial < 20; ++trial) {
    GraphFunction f = random_smooth_graph(rng, n);
    BallPoint p = ball_point(random_point(rng, n));
    UnitNormal nu = unit_normal(g, u, f, p);
    Mat gv = g(p.x);
    const double uv = u.value(p.x);
    const double norm2 = nu.spatial.dot(gv * nu.spatial) +
                         uv * uv * nu.vertical * nu.vertical;
    CHECK(std::abs(norm2 - 1.0) < 1e-12);
    CHECK(nu.vertical < 0.0);  // downward
    Vec df = f.grad(p.x);
    for (int i = 0; i < n; ++i) {
      // <nu, d_i + f_i d_t> = 0
      const double inner = (gv.row(i) * nu.spatial)(0) +
                           uv * uv * df[i] * nu.vertical;
      CHECK(std::abs(inner) < 1e-12);
    }
  }
}

TEST_CASE("second fundamental form: zero slope keeps only u Hess f") {
  const int n = 3;
  auto rng = make_rng(131);
  SymTensorField g = random_smooth_metric(rng, n);
  WarpFactor u = random_smooth_warp(rng, n);
  // graph with vanishing gradient at the evaluation point: f = |x - x0|^2
  BallPoint p = ball_point(random_point(rng, n));
  Vec x0 = p.x;
  GraphFunction f;
  f.value = [x0](const Vec& x) { return (x - x0).squaredNorm(); };
  f.grad = [x0](const Vec& x) { return (2.0 * (x - x0)).eval(); };
  f.hess = [n](const Vec&) { return (2.0 * Mat::Identity(n, n)).eval(); };
  Mat A = second_fundamental_form(g, u, f, p);
  // covariant Hessian at the critical point equals the coordinate one
  Mat expected = u.value(p.x) * 2.0 * Mat::Identity(n, n);
  CHECK((A - expected).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("trace of A equals the mean curvature") {
  const int n = 4;
  auto rng = make_rng(137);
  for (int trial = 0; trial < 25; ++trial) {
    SymTensorField g = random_smooth_metric(rng, n);
    WarpFactor u = random_smooth_warp(rng, n);
    GraphFunction f = random_smooth_graph(rng, n);
    BallPoint p = ball_point(random_point(rng, n));
    GraphGeometry geo = graph_geometry(g, u, f, p);
    const double tr = (geo.induced_inverse.array() *
                       geo.second_fundamental.array()).sum();
    CHECK(std::abs(tr - geo.mean_curvature) < 1e-12);
    CHECK(std::abs(mean_curvature(g, u, f, p) - geo.mean_curvature) < 1e-12);
    CHECK(geo.vertical_w > 0.0);
    CHECK(geo.vertical_w <= 1.0);
  }
}

TEST_CASE("second fundamental form matches the derivative-of-normal oracle") {
  const int n = 3;
  auto rng = make_rng(139);
  for (int trial = 0; trial < 8; ++trial) {
    SymTensorField g = random_smooth_metric(rng, n);
    WarpFactor u = random_smooth_warp(rng, n);
    GraphFunction f = random_smooth_graph(rng, n);
    BallPoint p = ball_point(random_point(rng, n, 0.2, 0.6));
    Mat A = second_fundamental_form(g, u, f, p);

    WarpedChristoffels wc = warped_christoffels(g, u, p);
    UnitNormal nu = unit_normal(g, u, f, p);
    Vec df = f.grad(p.x);
    Mat gv = g(p.x);
    const double uv = u.value(p.x);
    Vec du = u.grad(p.x);

    // finite differences of the normal components in the chart
    const double h = 1e-5;
    Mat dnu_s(n, n);  // dnu_s(i, k) = d_i nu^k
    Vec dnu_t(n);
    for (int i = 0; i < n; ++i) {
      Vec e = Vec::Zero(n);
      e[i] = h;
      UnitNormal plus = unit_normal(g, u, f, ball_point(p.x + e));
      UnitNormal minus = unit_normal(g, u, f, ball_point(p.x - e));
      dnu_s.row(i) = (plus.spatial - minus.spatial) / (2.0 * h);
      dnu_t[i] = (plus.vertical - minus.vertical) / (2.0 * h);
    }

    Mat oracle(n, n);
    for (int i = 0; i < n; ++i) {
      Vec cov_s(n);
      for (int k = 0; k < n; ++k) {
        double v = dnu_s(i, k);
        for (int l = 0; l < n; ++l) v += nu.spatial[l] * wc.spatial[k](i, l);
        v += df[i] * nu.vertical * wc.tt_spatial[k];
        cov_s[k] = v;
      }
      double cov_t = dnu_t[i] + nu.vertical * wc.it_time[i] +
                     df[i] * nu.spatial.dot(wc.it_time);
      for (int j = 0; j < n; ++j)
        oracle(i, j) = (gv.row(j) * cov_s)(0) + uv * uv * df[j] * cov_t;
    }
    CHECK((A - oracle).cwiseAbs().maxCoeff() < 1e-6);
    (void)du;
  }
}

TEST_CASE("mean curvature trivial values") {
  const int n = 3;
  auto rng = make_rng(149);
  SymTensorField g = random_smooth_metric(rng, n);
  WarpFactor u = random_smooth_warp(rng, n);
  GraphFunction constant = graph_from_profile(n, constant_profile(2.5));
  BallPoint p = ball_point(random_point(rng, n));
  CHECK(std::abs(mean_curvature(g, u, constant, p)) < 1e-14);

  // flat metric, unit warp, paraboloid at the origin: H = n
  GraphFunction parab;
  parab.value = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
  parab.grad = [](const Vec& x) { return x; };
  parab.hess = [n](const Vec&) { return Mat::Identity(n, n).eval(); };
  BallPoint origin = ball_point(Vec::Zero(n));
  CHECK(mean_curvature(euclidean_field(n), warp_constant_one(n), parab,
                       origin) == doctest::Approx(n).epsilon(1e-14));
}

TEST_CASE("mean curvature matches the first variation of area") {
  const int n = 3;
  auto rng = make_rng(151);
  Vec gl_nodes, gl_weights;
  gauss_legendre(14, gl_nodes, gl_weights);
  int worst_count = 0;
  for (int trial = 0; trial < 20; ++trial) {
    SymTensorField g = random_smooth_metric(rng, n);
    WarpFactor u = random_smooth_warp(rng, n);
    GraphFunction f = random_smooth_graph(rng, n);
    Bump bump{random_point(rng, n, 0.2, 0.5), 0.05};

    auto area = [&](double t) {
      double total = 0.0;
      for (int a = 0; a < gl_nodes.size(); ++a)
        for (int b = 0; b < gl_nodes.size(); ++b)
          for (int c = 0; c < gl_nodes.size(); ++c) {
            Vec x(3);
            x << bump.center[0] + bump.width * gl_nodes[a],
                bump.center[1] + bump.width * gl_nodes[b],
                bump.center[2] + bump.width * gl_nodes[c];
            Vec df = f.grad(x) + t * bump.grad(x);
            total += gl_weights[a] * gl_weights[b] * gl_weights[c] *
                     graph_area_element(g, u, x, df);
          }
      return total * std::pow(bump.width, 3);
    };

    const double t = 1e-5;
    const double lhs = (area(t) - area(-t)) / (2.0 * t);

    double rhs = 0.0, scale = 0.0;
    for (int a = 0; a < gl_nodes.size(); ++a)
      for (int b = 0; b < gl_nodes.size(); ++b)
        for (int c = 0; c < gl_nodes.size(); ++c) {
          Vec x(3);
          x << bump.center[0] + bump.width * gl_nodes[a],
              bump.center[1] + bump.width * gl_nodes[b],
              bump.center[2] + bump.width * gl_nodes[c];
          const double phi = bump.value(x);
          if (phi == 0.0) continue;
          BallPoint p = ball_point(x);
          GraphGeometry geo = graph_geometry(g, u, f, p);
          const double uv = u.value(x);
          const double w = gl_weights[a] * gl_weights[b] * gl_weights[c];
          const double dA = std::sqrt(geo.induced_metric.determinant());
          const double term = -phi * uv * geo.vertical_w *
                              geo.mean_curvature * dA;
          rhs += w * term;
          scale += w * std::abs(term);
        }
    rhs *= std::pow(bump.width, 3);
    scale *= std::pow(bump.width, 3);
    const double rel = std::abs(lhs - rhs) / std::max(scale, 1e-12);
    if (rel >= 1e-5) ++worst_count;
  }
  CHECK(worst_count == 0);
}

TEST_CASE("graph laplacian reductions and oracle") {
  const int n = 3;
  auto rng = make_rng(157);
  SymTensorField g = random_smooth_metric(rng, n);
  WarpFactor u = random_smooth_warp(rng, n);
  GraphFunction f = random_smooth_graph(rng, n);
  GraphFunction v = random_smooth_graph(rng, n);
  GraphFunction constant = graph_from_profile(n, constant_profile(1.0));
  BallPoint p = ball_point(random_point(rng, n, 0.2, 0.6));

  CHECK(std::abs(graph_laplacian(g, u, f, constant, p)) < 1e-14);

  // df = 0 reduces to the base Laplacian
  const double base = graph_laplacian(g, u, zero_graph(n), v, p);
  Mat g_inv = positive_definite_inverse(g(p.x));
  auto gamma = christoffels(g, p);
  Mat hess = v.hess(p.x);
  Vec dv = v.grad(p.x);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) hess(i, j) -= gamma[k](i, j) * dv[k];
  CHECK(std::abs(base - (g_inv.array() * hess.array()).sum()) < 1e-12);

  // generic case against the Laplacian of the induced metric
  const double lib = graph_laplacian(g, u, f, v, p);
  SymTensorField gbar(
      n,
      [g, u, f](const Vec& x) {
        const double uv = u.value(x);
        Vec df = f.grad(x);
        return (g(x) + uv * uv * df * df.transpose()).eval();
      },
      [g, u, f, n](const Vec& x) {
        auto dg = g.d1(x);
        const double uv = u.value(x);
        Vec du = u.grad(x);
        Vec df = f.grad(x);
        Mat hf = f.hess(x);
        std::vector<Mat> out(n);
        for (int k = 0; k < n; ++k)
          out[k] = dg[k] + 2.0 * uv * du[k] * df * df.transpose() +
                   uv * uv * (hf.col(k) * df.transpose() +
                              df * hf.col(k).transpose());
        return out;
      },
      nullptr);
  Mat gbar_inv = positive_definite_inverse(gbar(p.x));
  auto gamma_bar = christoffels(gbar, p);
  Mat hess_bar = v.hess(p.x);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) hess_bar(i, j) -= gamma_bar[k](i, j) * dv[k];
  const double oracle = (gbar_inv.array() * hess_bar.array()).sum();
  CHECK(std::abs(lib - oracle) < 1e-6);
}

TEST_CASE("extended trace: reductions and dual forms") {
  const int n = 3;
  auto rng = make_rng(163);
  SymTensorField g = random_smooth_metric(rng, n);
  SymTensorField k = random_smooth_metric(rng, n, 0.2);
  WarpFactor u = random_smooth_warp(rng, n);

  {  // df = 0: plain trace
    BallPoint p = ball_point(random_point(rng, n));
    const double tr = extended_trace(g, k, u, zero_graph(n), p);
    Mat g_inv = positive_definite_inverse(g(p.x));
    CHECK(std::abs(tr - (g_inv.array() * k(p.x).array()).sum()) < 1e-13);
  }

  {  // K = 0, radial graph, u = 1/rho: the closed-form correction survives
    InitialData ads = make_initial_data(DataFamily::pure_ads(), n, 2.25);
    WarpFactor u_rho = warp_rho_inverse(n);
    GraphFunction f = graph_from_profile(n, power_profile(0.4, 2.0));
    BallPoint p = ball_point(random_point(rng, n));
    const double tr = extended_trace(ads.g, zero_field(n), u_rho, f, p);
    Mat g_inv = positive_definite_inverse(ads.g(p.x));
    Vec df = f.grad(p.x);
    Vec du = u_rho.grad(p.x);
    const double uv = u_rho.value(p.x);
    const double df2 = df.dot(g_inv * df);
    const double du_df = du.dot(g_inv * df);
    const double W2 = 1.0 + uv * uv * df2;
    const double oracle = uv * uv * df2 * du_df / std::pow(W2, 1.5);
    CHECK(tr == doctest::Approx(oracle).epsilon(1e-12));
  }

  for (int trial = 0; trial < 20; ++trial) {  // dual algebraic forms
    GraphFunction f = random_smooth_graph(rng, n);
    BallPoint p = ball_point(random_point(rng, n));
    const double form_a = extended_trace(g, k, u, f, p);
    GraphGeometry geo = graph_geometry(g, u, f, p);
    const double uv = u.value(p.x);
    const double tr_k = (geo.induced_inverse.array() * k(p.x).array()).sum();
    const double nu_du = geo.normal_spatial.dot(u.grad(p.x));
    const double w = geo.vertical_w;
    const double form_b = tr_k + (nu_du / uv) * (1.0 - w * w);
    CHECK(std::abs(form_a - form_b) < 1e-12);
  }
}

TEST_CASE("vertical translation invariance") {
  const int n = 3;
  auto rng = make_rng(167);
  SymTensorField g = random_smooth_metric(rng, n);
  SymTensorField k = random_smooth_metric(rng, n, 0.2);
  WarpFactor u = random_smooth_warp(rng, n);
  SmoothScalar base = random_smooth_scalar(rng, n, 0.4);
  SmoothScalar shifted = base;
  shifted.offset += 17.5;
  GraphFunction f1 = graph_from_scalar(base);
  GraphFunction f2 = graph_from_scalar(shifted);
  BallPoint p = ball_point(random_point(rng, n));
  GraphGeometry a = graph_geometry(g, u, f1, p);
  GraphGeometry b = graph_geometry(g, u, f2, p);
  CHECK((a.induced_metric - b.induced_metric).cwiseAbs().maxCoeff() == 0.0);
  CHECK(a.mean_curvature == b.mean_curvature);
  CHECK(a.vertical_w == b.vertical_w);
  CHECK(extended_trace(g, k, u, f1, p) == extended_trace(g, k, u, f2, p));
}

TEST_CASE("warp regularity diagnostic stays bounded for admissible warps") {
  const int n = 3;
  InitialData ads = make_initial_data(DataFamily::pure_ads(), n, 2.25);
  // (|grad u| + |Hess u|)/u for u = 1/rho against b: (1 + O(rho)) + (2 + O(rho))
  for (double rho : {0.3, 0.1, 0.01, 1e-3}) {
    BallPoint p = ball_point_at_rho(n, rho);
    const double ratio = warp_regularity_ratio(ads.g, warp_rho_inverse(n), p);
    CHECK(std::isfinite(ratio));
    CHECK(ratio < 4.0);
  }
  // asymptotic value: |grad u|/u -> 1 and |Hess u|/u -> sqrt(n) in the
  // Frobenius norm (Hess(1/rho) approaches (1/rho) b)
  BallPoint deep = ball_point_at_rho(n, 1e-3);
  CHECK(warp_regularity_ratio(ads.g, warp_rho_inverse(n), deep) ==
        doctest::Approx(1.0 + std::sqrt(3.0)).epsilon(0.01));
}

TEST_CASE("unit warp reduces to the classical product formulas") {
  const int n = 3;
  auto rng = make_rng(173);
  SymTensorField g = random_smooth_metric(rng, n);
  WarpFactor one = warp_constant_one(n);
  for (int trial = 0; trial < 10; ++trial) {
    GraphFunction f = random_smooth_graph(rng, n);
    BallPoint p = ball_point(random_point(rng, n));
    Mat g_inv = positive_definite_inverse(g(p.x));
    auto gamma = christoffels(g, p);
    Vec df = f.grad(p.x);
    Mat hess = f.hess(p.x);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int kk = 0; kk < n; ++kk) hess(i, j) -= gamma[kk](i, j) * df[kk];
    Vec df_up = g_inv * df;
    const double W = std::sqrt(1.0 + df.dot(df_up));
    Mat proj = g_inv - df_up * df_up.transpose() / (W * W);
    const double classical = (proj.array() * hess.array()).sum() / W;
    CHECK(mean_curvature(g, one, f, p) ==
          doctest::Approx(classical).epsilon(1e-12));
    UnitNormal nu = unit_normal(g, one, f, p);
    CHECK((nu.spatial - df_up / W).cwiseAbs().maxCoeff() < 1e-14);
    CHECK(nu.vertical == doctest::Approx(-1.0 / W).epsilon(1e-14));
  }
}

}  // TEST_SUITE
