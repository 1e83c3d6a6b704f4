#include "janglab/warped_graph.hpp"

#include <cmath>

namespace janglab {

double WarpFactor::operator()(const Vec& x) const {
  const double u = value(x);
  if (!(u > 0.0)) throw std::domain_error("warping factor must be positive");
  return u;
}

WarpFactor warp_from_profile(int n, RadialProfile profile,
                             WarpFactor::Decay tag) {
  WarpFactor w;
  w.decay = tag;
  w.radial = profile;
  w.value = [profile](const Vec& x) {
    return profile.value(0.5 * (1.0 - x.squaredNorm()));
  };
  w.grad = [profile](const Vec& x) {
    const double rho = 0.5 * (1.0 - x.squaredNorm());
    return (-profile.d1(rho) * x).eval();
  };
  w.hess = [profile, n](const Vec& x) {
    const double rho = 0.5 * (1.0 - x.squaredNorm());
    return (profile.d2(rho) * x * x.transpose() -
            profile.d1(rho) * Mat::Identity(n, n))
        .eval();
  };
  return w;
}

WarpFactor warp_v0(int n) {
  return warp_from_profile(n, v0_profile(), WarpFactor::Decay::v0_plus_decay);
}

WarpFactor warp_rho_inverse(int n) {
  return warp_from_profile(n, inverse_rho_profile(),
                           WarpFactor::Decay::rho_inverse_plus_decay);
}

WarpFactor warp_constant_one(int n) {
  return warp_from_profile(n, constant_profile(1.0), WarpFactor::Decay::table);
}

double warp_regularity_ratio(const SymTensorField& g, const WarpFactor& u,
                             const BallPoint& x) {
  const int n = g.dim();
  Mat gv = g(x.x);
  Mat g_inv = positive_definite_inverse(gv);
  auto gamma = christoffels(g, x);
  const double uv = u(x.x);
  Vec du = u.grad(x.x);
  Mat hess = u.hess(x.x);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k) hess(i, j) -= gamma[k](i, j) * du[k];
  const double grad_norm = std::sqrt(du.dot(g_inv * du));
  const double hess_norm =
      std::sqrt((g_inv * hess * g_inv * hess).trace());
  return (grad_norm + hess_norm) / uv;
}

GraphFunction graph_from_profile(int n, RadialProfile profile) {
  GraphFunction f;
  f.radial = profile;
  f.value = [profile](const Vec& x) {
    return profile.value(0.5 * (1.0 - x.squaredNorm()));
  };
  f.grad = [profile](const Vec& x) {
    const double rho = 0.5 * (1.0 - x.squaredNorm());
    return (-profile.d1(rho) * x).eval();
  };
  f.hess = [profile, n](const Vec& x) {
    const double rho = 0.5 * (1.0 - x.squaredNorm());
    return (profile.d2(rho) * x * x.transpose() -
            profile.d1(rho) * Mat::Identity(n, n))
        .eval();
  };
  return f;
}

GraphFunction zero_graph(int n) {
  return graph_from_profile(n, constant_profile(0.0));
}

namespace {

// Shared pointwise context: g, its inverse and symbols, u with derivatives,
// f with covariant Hessian, and the graph factor W = sqrt(1 + u^2 |df|^2).
struct PointContext {
  int n;
  Mat g, g_inv;
  std::vector<Mat> gamma;
  double u;
  Vec du;
  Vec df, df_up;
  Mat hess_f;  // covariant
  double df2;  // |df|_g^2
  double W;
  double du_df;  // <du, df>_g
};

PointContext make_context(const SymTensorField& g_field, const WarpFactor& u,
                          const GraphFunction& f, const BallPoint& x) {
  PointContext c;
  c.n = g_field.dim();
  c.g = g_field(x.x);
  c.g_inv = positive_definite_inverse(c.g);
  c.gamma = christoffels(g_field, x);
  c.u = u(x.x);
  c.du = u.grad(x.x);
  c.df = f.grad(x.x);
  Mat hess_coord = f.hess(x.x);
  c.hess_f = hess_coord;
  for (int i = 0; i < c.n; ++i)
    for (int j = 0; j < c.n; ++j)
      for (int k = 0; k < c.n; ++k)
        c.hess_f(i, j) -= c.gamma[k](i, j) * c.df[k];
  c.df_up = c.g_inv * c.df;
  c.df2 = c.df.dot(c.df_up);
  c.W = std::sqrt(1.0 + c.u * c.u * c.df2);
  c.du_df = c.du.dot(c.g_inv * c.df);
  return c;
}

Mat rank_one_inverse(const PointContext& c) {
  return c.g_inv -
         (c.u * c.u / (c.W * c.W)) * (c.df_up * c.df_up.transpose());
}

}  // namespace

WarpedChristoffels warped_christoffels(const SymTensorField& g,
                                       const WarpFactor& u,
                                       const BallPoint& x) {
  WarpedChristoffels out;
  out.spatial = christoffels(g, x);
  const double uv = u(x.x);
  Vec du = u.grad(x.x);
  Mat g_inv = positive_definite_inverse(g(x.x));
  out.tt_spatial = (-uv * (g_inv * du)).eval();
  out.it_time = (du / uv).eval();
  return out;
}

SymTensorField product_metric_field(const SymTensorField& g,
                                    const WarpFactor& u) {
  const int n = g.dim();
  const int m = n + 1;
  auto value = [g, u, n, m](const Vec& xt) {
    Vec x = xt.head(n);
    Mat T = Mat::Zero(m, m);
    T.topLeftCorner(n, n) = g(x);
    const double uv = u.value(x);
    T(n, n) = uv * uv;
    return T;
  };
  if (!g.has_analytic_derivatives()) return SymTensorField(m, value);
  auto d1 = [g, u, n, m](const Vec& xt) {
    Vec x = xt.head(n);
    std::vector<Mat> out(m, Mat::Zero(m, m));
    auto dg = g.d1(x);
    const double uv = u.value(x);
    Vec du = u.grad(x);
    for (int k = 0; k < n; ++k) {
      out[k].topLeftCorner(n, n) = dg[k];
      out[k](n, n) = 2.0 * uv * du[k];
    }
    return out;  // d_t components vanish
  };
  return SymTensorField(m, value, d1, nullptr);
}

GraphMetric graph_metric(const SymTensorField& g, const WarpFactor& u,
                         const GraphFunction& f, const BallPoint& x) {
  PointContext c = make_context(g, u, f, x);
  GraphMetric out;
  out.value = c.g + c.u * c.u * (c.df * c.df.transpose());
  out.inverse = rank_one_inverse(c);
  return out;
}

UnitNormal unit_normal(const SymTensorField& g, const WarpFactor& u,
                       const GraphFunction& f, const BallPoint& x) {
  PointContext c = make_context(g, u, f, x);
  UnitNormal nu;
  nu.spatial = (c.u / c.W) * c.df_up;
  nu.vertical = -1.0 / (c.u * c.W);
  return nu;
}

Mat second_fundamental_form(const SymTensorField& g, const WarpFactor& u,
                            const GraphFunction& f, const BallPoint& x) {
  PointContext c = make_context(g, u, f, x);
  Mat A = c.u * c.hess_f + c.du * c.df.transpose() + c.df * c.du.transpose() +
          c.u * c.u * c.du_df * (c.df * c.df.transpose());
  return A / c.W;
}

double mean_curvature(const SymTensorField& g, const WarpFactor& u,
                      const GraphFunction& f, const BallPoint& x) {
  PointContext c = make_context(g, u, f, x);
  Mat gbar_inv = rank_one_inverse(c);
  Mat numer = c.u * c.hess_f + c.du * c.df.transpose() +
              c.df * c.du.transpose() +
              c.u * c.u * c.du_df * (c.df * c.df.transpose());
  return (gbar_inv.array() * numer.array()).sum() / c.W;
}

double graph_laplacian(const SymTensorField& g, const WarpFactor& u,
                       const GraphFunction& f, const GraphFunction& v,
                       const BallPoint& x) {
  PointContext c = make_context(g, u, f, x);
  Mat gbar_inv = rank_one_inverse(c);
  Vec dv = v.grad(x.x);
  Mat hess_v = v.hess(x.x);
  for (int i = 0; i < c.n; ++i)
    for (int j = 0; j < c.n; ++j)
      for (int k = 0; k < c.n; ++k)
        hess_v(i, j) -= c.gamma[k](i, j) * dv[k];
  const double du_dv = c.du.dot(c.g_inv * dv);
  const double df_dv = c.df.dot(c.g_inv * dv);
  const double H = mean_curvature(g, u, f, x);
  return (gbar_inv.array() * hess_v.array()).sum() +
         c.u * c.df2 * du_dv / (c.W * c.W) - c.u * df_dv * H / c.W;
}

double extended_trace(const SymTensorField& g, const SymTensorField& k,
                      const WarpFactor& u, const GraphFunction& f,
                      const BallPoint& x) {
  PointContext c = make_context(g, u, f, x);
  Mat gbar_inv = rank_one_inverse(c);
  const double tr_graph_k = (gbar_inv.array() * k(x.x).array()).sum();
  return tr_graph_k +
         c.u * c.u * c.df2 * c.du_df / (c.W * c.W * c.W);
}

GraphGeometry graph_geometry(const SymTensorField& g, const WarpFactor& u,
                             const GraphFunction& f, const BallPoint& x) {
  PointContext c = make_context(g, u, f, x);
  GraphGeometry out;
  out.induced_metric = c.g + c.u * c.u * (c.df * c.df.transpose());
  out.induced_inverse = rank_one_inverse(c);
  out.normal_spatial = (c.u / c.W) * c.df_up;
  out.normal_vertical = -1.0 / (c.u * c.W);
  Mat numer = c.u * c.hess_f + c.du * c.df.transpose() +
              c.df * c.du.transpose() +
              c.u * c.u * c.du_df * (c.df * c.df.transpose());
  out.second_fundamental = numer / c.W;
  out.mean_curvature =
      (out.induced_inverse.array() * out.second_fundamental.array()).sum();
  out.vertical_w = 1.0 / c.W;
  return out;
}

}  // namespace janglab
