#include "janglab/jang.hpp"

#include <cmath>

namespace janglab {

namespace {

struct OperatorContext {
  int n;
  Mat g, g_inv, gbar_inv;
  double u;
  Vec du, df, df_up;
  Mat hess_f_cov;
  Mat P;  // u Hess f + du (x) df + df (x) du
  double W, df2;
};

OperatorContext make_operator_context(const InitialData& data,
                                      const WarpFactor& u,
                                      const GraphFunction& f,
                                      const BallPoint& x) {
  OperatorContext c;
  c.n = data.n;
  c.g = data.g(x.x);
  c.g_inv = positive_definite_inverse(c.g);
  auto gamma = christoffels(data.g, x);
  c.u = u(x.x);
  c.du = u.grad(x.x);
  c.df = f.grad(x.x);
  c.hess_f_cov = f.hess(x.x);
  for (int i = 0; i < c.n; ++i)
    for (int j = 0; j < c.n; ++j)
      for (int k = 0; k < c.n; ++k)
        c.hess_f_cov(i, j) -= gamma[k](i, j) * c.df[k];
  c.df_up = c.g_inv * c.df;
  c.df2 = c.df.dot(c.df_up);
  c.W = std::sqrt(1.0 + c.u * c.u * c.df2);
  c.P = c.u * c.hess_f_cov + c.du * c.df.transpose() +
        c.df * c.du.transpose();
  c.gbar_inv = c.g_inv -
               (c.u * c.u / (c.W * c.W)) * (c.df_up * c.df_up.transpose());
  return c;
}

}  // namespace

JangResidualReport jang_operator(const InitialData& data, const WarpFactor& u,
                                 const GraphFunction& f, const BallPoint& x,
                                 double s, double eps) {
  OperatorContext c = make_operator_context(data, u, f, x);
  JangResidualReport rep;
  rep.s = s;
  rep.eps = eps;
  rep.mean_curvature_part = (c.gbar_inv.array() * c.P.array()).sum() / c.W;
  rep.trace_part = s * (c.gbar_inv.array() * data.k(x.x).array()).sum();
  rep.value = rep.mean_curvature_part - rep.trace_part;
  rep.regularized = rep.value - eps * f(x.x);
  return rep;
}

LinearizationCoefficients linearization(const InitialData& data,
                                        const WarpFactor& u,
                                        const GraphFunction& f,
                                        const BallPoint& x, double s) {
  OperatorContext c = make_operator_context(data, u, f, x);
  LinearizationCoefficients out;
  out.G = (c.u / c.W) * c.gbar_inv;
  const double S1 = (c.gbar_inv.array() * c.P.array()).sum();
  const double W3 = c.W * c.W * c.W;
  Mat K = data.k(x.x);
  out.b = 2.0 * (c.gbar_inv * c.du) / c.W -
          (c.u * c.u / W3) * (S1 * c.df_up + 2.0 * c.gbar_inv * c.P * c.df_up) +
          (2.0 * s * c.u * c.u / (c.W * c.W)) * (c.gbar_inv * K * c.df_up);
  out.d = -(c.gbar_inv.array() * K.array()).sum();
  return out;
}

EnergyCurrent energy_current(const InitialData& data, const BallPoint& x) {
  const int n = data.n;
  Mat g = data.g(x.x);
  Mat g_inv = positive_definite_inverse(g);
  Mat K = data.k(x.x);
  auto gamma = christoffels(data.g, x);
  std::vector<Mat> dK = data.k.has_analytic_derivatives()
                            ? data.k.d1(x.x)
                            : data.k.d1_numeric(x.x, default_fd_step(x));
  std::vector<Mat> dg = data.g.has_analytic_derivatives()
                            ? data.g.d1(x.x)
                            : data.g.d1_numeric(x.x, default_fd_step(x));

  const double scal = scalar_curvature(data.g, x);
  const double tr_k = (g_inv.array() * K.array()).sum();
  const double k_norm2 = (g_inv * K * g_inv * K).trace();

  EnergyCurrent out;
  out.mu = 0.5 * (scal + n * (n - 1.0) + tr_k * tr_k - k_norm2);

  out.current = Vec::Zero(n);
  for (int j = 0; j < n; ++j) {
    // (div K)_j = g^{ik} (d_i K_kj - Gamma^l_ik K_lj - Gamma^l_ij K_kl)
    double div_term = 0.0;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) {
        double cov = dK[i](k, j);
        for (int l = 0; l < n; ++l)
          cov -= gamma[l](i, k) * K(l, j) + gamma[l](i, j) * K(k, l);
        div_term += g_inv(i, k) * cov;
      }
    // d(tr K)_j = d_j(g^{ik}) K_ik + g^{ik} d_j K_ik
    Mat dg_inv = -g_inv * dg[j] * g_inv;
    const double dtr =
        (dg_inv.array() * K.array()).sum() + (g_inv.array() * dK[j].array()).sum();
    out.current[j] = div_term - dtr;
  }
  out.current_norm = std::sqrt(out.current.dot(g_inv * out.current));
  out.dec_margin = out.mu - out.current_norm;
  return out;
}

RadialJangTerms radial_jang_terms(const InitialData& data,
                                  const RadialProfile& u, double rho, double f1,
                                  double f2, double s) {
  if (!data.radial)
    throw std::invalid_argument("radial_jang_terms: data must be radial");
  const RadialData& prof = *data.radial;
  const int n = data.n;
  const double a = prof.g_rr.value(rho), a1 = prof.g_rr.d1(rho);
  const double c = prof.g_ss.value(rho), c1 = prof.g_ss.d1(rho);
  const double ka = prof.k_rr.value(rho), kc = prof.k_ss.value(rho);
  const double U = u.value(rho), U1 = u.d1(rho);

  const double df2 = f1 * f1 / a;
  const double W2 = 1.0 + U * U * df2;
  const double W = std::sqrt(W2);
  const double gamma_rrr = a1 / (2.0 * a);
  const double sum_ang = -(n - 1.0) * c1 / (2.0 * a * c);  // g^{ab} Gamma^rho_ab

  const double P_rr = U * (f2 - gamma_rrr * f1) + 2.0 * U1 * f1;

  RadialJangTerms t;
  t.W = W;
  t.mean_part = P_rr / (a * W2 * W) - U * f1 * sum_ang / W;
  t.trace_part = s * (ka / (a * W2) + (n - 1.0) * kc / c);
  t.value = t.mean_part - t.trace_part;
  return t;
}

RadialLinearization radial_jang_linearization(const InitialData& data,
                                              const RadialProfile& u,
                                              double rho, double f1, double f2,
                                              double s) {
  if (!data.radial)
    throw std::invalid_argument("radial_jang_linearization: data must be radial");
  const RadialData& prof = *data.radial;
  const int n = data.n;
  const double a = prof.g_rr.value(rho), a1 = prof.g_rr.d1(rho);
  const double c = prof.g_ss.value(rho), c1 = prof.g_ss.d1(rho);
  const double ka = prof.k_rr.value(rho);
  const double U = u.value(rho), U1 = u.d1(rho);

  const double df2 = f1 * f1 / a;
  const double W2 = 1.0 + U * U * df2;
  const double W = std::sqrt(W2);
  const double W3 = W2 * W;
  const double gamma_rrr = a1 / (2.0 * a);
  const double sum_ang = -(n - 1.0) * c1 / (2.0 * a * c);

  const double P_rr = U * (f2 - gamma_rrr * f1) + 2.0 * U1 * f1;
  const double f_up = f1 / a;
  const double S1 = P_rr / (a * W2) - U * f1 * sum_ang;  // gbar^ij P_ij

  RadialLinearization lin;
  lin.second = U / (a * W3);
  const double b_rho = 2.0 * U1 / (a * W2 * W) -
                       (U * U / W3) * (S1 * f_up + 2.0 * P_rr * f_up / (a * W2)) +
                       2.0 * s * U * U * ka * f_up / (a * W2 * W2);
  lin.first = -lin.second * gamma_rrr - (U / W) * sum_ang + b_rho;
  lin.zeroth = 0.0;
  return lin;
}

namespace {

// Pointwise radial state shared by the Schoen-Yau residual and the vertical
// diagnostic; everything是 closed-form in the profile derivatives.
struct RadialState {
  double a, a1, a2, c, c1, c2;
  double ka, kc, ka1, kc1;
  double U, U1, U2;
  double F1, F2, F3;
  double W, W1;    // W and dW/drho
  double abar, abar1;  // gbar_rr = a W^2 and its derivative
};

RadialState make_radial_state(const InitialData& data, const RadialProfile& u,
                              const RadialProfile& f, double rho) {
  const RadialData& prof = *data.radial;
  RadialState st;
  st.a = prof.g_rr.value(rho);
  st.a1 = prof.g_rr.d1(rho);
  st.a2 = prof.g_rr.d2(rho);
  st.c = prof.g_ss.value(rho);
  st.c1 = prof.g_ss.d1(rho);
  st.c2 = prof.g_ss.d2(rho);
  st.ka = prof.k_rr.value(rho);
  st.kc = prof.k_ss.value(rho);
  st.ka1 = prof.k_rr.d1(rho);
  st.kc1 = prof.k_ss.d1(rho);
  st.U = u.value(rho);
  st.U1 = u.d1(rho);
  st.U2 = u.d2(rho);
  st.F1 = f.d1(rho);
  st.F2 = f.d2(rho);
  st.F3 = f.has_d3() ? f.d3(rho) : 0.0;
  if (!f.has_d3())
    throw std::invalid_argument(
        "schoen_yau: graph profile must provide a third derivative");
  const double G = st.U * st.U * st.F1 * st.F1 / st.a;
  st.W = std::sqrt(1.0 + G);
  const double G1 = (2.0 * st.U * st.U1 * st.F1 * st.F1 +
                     2.0 * st.U * st.U * st.F1 * st.F2) /
                        st.a -
                    st.U * st.U * st.F1 * st.F1 * st.a1 / (st.a * st.a);
  st.W1 = 0.5 * G1 / st.W;
  st.abar = st.a * st.W * st.W;
  st.abar1 = st.a1 * st.W * st.W + 2.0 * st.a * st.W * st.W1;
  return st;
}

}  // namespace

SchoenYauReport schoen_yau_residual(const InitialData& data,
                                    const RadialProfile& u,
                                    const RadialProfile& f, double rho) {
  if (!data.radial)
    throw std::invalid_argument("schoen_yau_residual: data must be radial");
  const int n = data.n;
  const RadialState s = make_radial_state(data, u, f, rho);

  // Scalar curvature of gbar = (a W^2) drho^2 + c sigma.
  const double scal_graph =
      radial_scalar_curvature_values(n, s.abar, s.abar1, s.c, s.c1, s.c2);

  // Energy density and current of (g, K).
  const double scal_g =
      radial_scalar_curvature_values(n, s.a, s.a1, s.c, s.c1, s.c2);
  const double tr_k = s.ka / s.a + (n - 1.0) * s.kc / s.c;
  const double k_norm2 = std::pow(s.ka / s.a, 2.0) +
                         (n - 1.0) * std::pow(s.kc / s.c, 2.0);
  const double mu = 0.5 * (scal_g + n * (n - 1.0) + tr_k * tr_k - k_norm2);
  const double div_k = (s.ka1 - (s.a1 / s.a) * s.ka) / s.a +
                       ((n - 1.0) / s.c) *
                           (s.c1 * s.ka / (2.0 * s.a) - s.c1 * s.kc / (2.0 * s.c));
  const double dtr_k = s.ka1 / s.a - s.ka * s.a1 / (s.a * s.a) +
                       (n - 1.0) * (s.kc1 / s.c - s.kc * s.c1 / (s.c * s.c));
  const double J_rho = div_k - dtr_k;
  // the identity's vector field (distinct from the vertical component w)
  const double jang_w_vector_up = s.U * s.F1 / (s.a * s.W);
  const double J_w = J_rho * jang_w_vector_up;

  // Second fundamental form and restricted extension.
  const double gamma_rrr = s.a1 / (2.0 * s.a);
  const double du_df = s.U1 * s.F1 / s.a;
  const double Pp_rr = s.U * (s.F2 - gamma_rrr * s.F1) + 2.0 * s.U1 * s.F1 +
                       s.U * s.U * du_df * s.F1 * s.F1;
  const double A_rr = Pp_rr / s.W;
  const double A_ss = s.U * (s.c1 / (2.0 * s.a)) * s.F1 / s.W;
  const double Kbar_tt = s.U * s.U * du_df / s.W;
  const double D_rr = A_rr - (s.ka + s.F1 * s.F1 * Kbar_tt);
  const double D_ss = A_ss - s.kc;
  const double diff_norm2 = std::pow(D_rr / s.abar, 2.0) +
                            (n - 1.0) * std::pow(D_ss / s.c, 2.0);

  const double q_rho = s.U * s.F1 * D_rr / (s.a * s.W);
  const double q_norm2 = q_rho * q_rho / s.abar;

  // div_gbar(u q): Q = u q_rho, differentiated in closed form.
  const double Q = s.U * q_rho;
  const double N = s.U * s.U * s.F1 * D_rr;  // Q = N / (a W)
  const double M = s.a * s.W;
  // D_rr' assembled term by term.
  const double gamma_rrr1 =
      s.a2 / (2.0 * s.a) - s.a1 * s.a1 / (2.0 * s.a * s.a);
  const double du_df1 = (s.U2 * s.F1 + s.U1 * s.F2) / s.a -
                        s.U1 * s.F1 * s.a1 / (s.a * s.a);
  const double Pp_rr1 =
      s.U1 * (s.F2 - gamma_rrr * s.F1) +
      s.U * (s.F3 - gamma_rrr1 * s.F1 - gamma_rrr * s.F2) + 2.0 * s.U2 * s.F1 +
      2.0 * s.U1 * s.F2 + 2.0 * s.U * s.U1 * du_df * s.F1 * s.F1 +
      s.U * s.U * du_df1 * s.F1 * s.F1 + 2.0 * s.U * s.U * du_df * s.F1 * s.F2;
  const double A_rr1 = (Pp_rr1 * s.W - Pp_rr * s.W1) / (s.W * s.W);
  const double Kbar_tt1 =
      (2.0 * s.U * s.U1 * du_df + s.U * s.U * du_df1) / s.W -
      s.U * s.U * du_df * s.W1 / (s.W * s.W);
  const double D_rr1 = A_rr1 - s.ka1 - 2.0 * s.F1 * s.F2 * Kbar_tt -
                       s.F1 * s.F1 * Kbar_tt1;
  const double N1 = 2.0 * s.U * s.U1 * s.F1 * D_rr + s.U * s.U * s.F2 * D_rr +
                    s.U * s.U * s.F1 * D_rr1;
  const double M1 = s.a1 * s.W + s.a * s.W1;
  const double Q1 = (N1 * M - N * M1) / (M * M);
  const double div_uq = (Q1 - (s.abar1 / (2.0 * s.abar)) * Q) / s.abar +
                        (n - 1.0) * s.c1 * Q / (2.0 * s.abar * s.c);

  SchoenYauReport rep;
  rep.scal_graph = scal_graph;
  rep.rhs = -n * (n - 1.0) + 2.0 * (mu - J_w) + diff_norm2 + 2.0 * q_norm2 -
            (2.0 / s.U) * div_uq;
  rep.residual = scal_graph - rep.rhs;
  rep.jang_value =
      std::abs(radial_jang_terms(data, u, rho, s.F1, s.F2, 1.0).value);
  return rep;
}

VerticalDiagnostic vertical_inequality_diagnostic(const InitialData& data,
                                                  const RadialProfile& u,
                                                  const RadialProfile& f,
                                                  const Vec& rho_grid) {
  if (!data.radial)
    throw std::invalid_argument("vertical diagnostic: data must be radial");
  const int n = data.n;
  VerticalDiagnostic out;
  for (int idx = 0; idx < rho_grid.size(); ++idx) {
    const double rho = rho_grid[idx];
    const RadialState s = make_radial_state(data, u, f, rho);
    // v = W^{-1/2}; derivatives from W', W''.
    const double G1 = (2.0 * s.U * s.U1 * s.F1 * s.F1 +
                       2.0 * s.U * s.U * s.F1 * s.F2) /
                          s.a -
                      s.U * s.U * s.F1 * s.F1 * s.a1 / (s.a * s.a);
    const double G2 =
        (2.0 * s.U1 * s.U1 * s.F1 * s.F1 + 2.0 * s.U * s.U2 * s.F1 * s.F1 +
         8.0 * s.U * s.U1 * s.F1 * s.F2 + 2.0 * s.U * s.U * s.F2 * s.F2 +
         2.0 * s.U * s.U * s.F1 * s.F3) /
            s.a -
        2.0 * (2.0 * s.U * s.U1 * s.F1 * s.F1 +
               2.0 * s.U * s.U * s.F1 * s.F2) *
            s.a1 / (s.a * s.a) -
        s.U * s.U * s.F1 * s.F1 * s.a2 / (s.a * s.a) +
        2.0 * s.U * s.U * s.F1 * s.F1 * s.a1 * s.a1 / (s.a * s.a * s.a);
    const double W1 = 0.5 * G1 / s.W;
    const double W2d = 0.5 * G2 / s.W - 0.25 * G1 * G1 / (s.W * s.W * s.W);
    const double v = 1.0 / std::sqrt(s.W);
    const double v1 = -0.5 * std::pow(s.W, -1.5) * W1;
    const double v2 = 0.75 * std::pow(s.W, -2.5) * W1 * W1 -
                      0.5 * std::pow(s.W, -1.5) * W2d;
    const double lap_v = (v2 - (s.abar1 / (2.0 * s.abar)) * v1) / s.abar +
                         (n - 1.0) * s.c1 * v1 / (2.0 * s.abar * s.c);
    const double ratio = lap_v / v;
    out.ratios.push_back(ratio);
    out.sup_ratio = std::max(out.sup_ratio, std::abs(ratio));
    out.sup_u_df = std::max(
        out.sup_u_df, s.U * std::abs(s.F1) / std::sqrt(s.a));
  }
  return out;
}

}  // namespace janglab
