#pragma once

#include "janglab/geometry.hpp"

// Graphs in the warped product (M x R, g + u^2 dt^2): induced metric with its
// rank-one inverse, downward unit normal, second fundamental form, mean
// curvature, the graph Laplacian, and the trace of the extended second
// fundamental form. All quantities are expressed in the coordinate frame
// (d_i, d_t); sign convention A(X,Y) = <nabla_X nu, Y> with nu downward, H
// the tangential divergence of nu.

namespace janglab {

/// Positive warping factor with coordinate first and second partials.
struct WarpFactor {
  enum class Decay { rho_inverse_plus_decay, v0_plus_decay, table };

  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;  // coordinate partials d_i d_j u
  Decay decay = Decay::rho_inverse_plus_decay;
  std::optional<RadialProfile> radial;

  double operator()(const Vec& x) const;
};

WarpFactor warp_from_profile(int n, RadialProfile profile, WarpFactor::Decay tag);
WarpFactor warp_v0(int n);
WarpFactor warp_rho_inverse(int n);
WarpFactor warp_constant_one(int n);

/// (|grad u|_g + |Hess u|_g) / u at x; the warp regularity diagnostic that
/// should stay bounded on samples for admissible warping factors.
double warp_regularity_ratio(const SymTensorField& g, const WarpFactor& u,
                             const BallPoint& x);

/// Graph function f with coordinate first and second partials; radial graphs
/// carry their rho-profile (third derivative included when available, the
/// Schoen-Yau machinery needs it). The domain descriptor is an annulus
/// [rho_min, rho_max] in the defining function, or the full chart.
struct GraphDomain {
  bool full_chart = true;
  double rho_min = 0.0;
  double rho_max = 0.5;
};

struct GraphFunction {
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> grad;
  std::function<Mat(const Vec&)> hess;
  std::optional<RadialProfile> radial;
  GraphDomain domain;

  double operator()(const Vec& x) const { return value(x); }
};

GraphFunction graph_from_profile(int n, RadialProfile profile);
GraphFunction zero_graph(int n);

/// Per-point bundle of graph quantities.
struct GraphGeometry {
  Mat induced_metric;      // gbar_ij = g_ij + u^2 f_i f_j
  Mat induced_inverse;     // rank-one update inverse
  Vec normal_spatial;      // nu^i
  double normal_vertical;  // nu^t  (negative: nu points downward)
  Mat second_fundamental;  // A_ij
  double mean_curvature;
  double vertical_w;       // <u^{-1} d_t, -nu> = (1 + u^2 |df|^2)^{-1/2}
};

/// Christoffel symbols of g + u^2 dt^2 split by index type; the families
/// Gamma^k_it, Gamma^t_ij and Gamma^t_tt vanish identically.
struct WarpedChristoffels {
  std::vector<Mat> spatial;  // Gamma^k_ij, equal to those of g
  Vec tt_spatial;            // Gamma^k_tt = -u u^k
  Vec it_time;               // Gamma^t_it = u_i / u
};

WarpedChristoffels warped_christoffels(const SymTensorField& g,
                                       const WarpFactor& u, const BallPoint& x);

/// (n+1)-dimensional tensor field of the product metric g + u^2 dt^2 in the
/// chart (x, t); used to cross-check the warped symbols against the generic
/// Christoffel path.
SymTensorField product_metric_field(const SymTensorField& g,
                                    const WarpFactor& u);

struct GraphMetric {
  Mat value;
  Mat inverse;
};

GraphMetric graph_metric(const SymTensorField& g, const WarpFactor& u,
                         const GraphFunction& f, const BallPoint& x);

/// Downward unit normal components (nu^i, nu^t).
struct UnitNormal {
  Vec spatial;
  double vertical;
};

UnitNormal unit_normal(const SymTensorField& g, const WarpFactor& u,
                       const GraphFunction& f, const BallPoint& x);

Mat second_fundamental_form(const SymTensorField& g, const WarpFactor& u,
                            const GraphFunction& f, const BallPoint& x);

double mean_curvature(const SymTensorField& g, const WarpFactor& u,
                      const GraphFunction& f, const BallPoint& x);

/// Laplacian of v on the graph via the three-term reduction to g-quantities.
double graph_laplacian(const SymTensorField& g, const WarpFactor& u,
                       const GraphFunction& f, const GraphFunction& v,
                       const BallPoint& x);

/// Trace over the graph of the extension of K to the warped product (the
/// extension has K(d_i, d_t) = 0 and K(d_t,d_t) = u^2 <df,du>/W).
double extended_trace(const SymTensorField& g, const SymTensorField& k,
                      const WarpFactor& u, const GraphFunction& f,
                      const BallPoint& x);

/// Full bundle at a point.
GraphGeometry graph_geometry(const SymTensorField& g, const WarpFactor& u,
                             const GraphFunction& f, const BallPoint& x);

}  // namespace janglab
