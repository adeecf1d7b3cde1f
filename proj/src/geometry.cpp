#include "kerrpol/geometry.hpp"

#include <cmath>

namespace kerrpol {

std::pair<double, double> horizon_radii(const KerrParams& params) {
  const double root = std::sqrt(params.mass * params.mass - params.spin * params.spin);
  return {params.mass + root, params.mass - root};
}

double sigma_of(const KerrParams& params, double r, double theta) {
  const double c = std::cos(theta);
  return r * r + params.spin * params.spin * c * c;
}

double delta_of(const KerrParams& params, double r) {
  return r * r - 2.0 * params.mass * r + params.spin * params.spin;
}

std::pair<double, double> scalars(const KerrParams& params, const SpacetimePoint& point) {
  return {sigma_of(params, point.r, point.theta), delta_of(params, point.r)};
}

Mat4 metric_components(const KerrParams& params, const SpacetimePoint& point) {
  const double a = params.spin, M = params.mass;
  const double r = point.r, th = point.theta;
  const double S = sigma_of(params, r, th), D = delta_of(params, r);
  const double s2 = std::sin(th) * std::sin(th);
  const double rr_aa = r * r + a * a;

  Mat4 g{};
  g[0][0] = (D - a * a * s2) / S;
  g[0][3] = g[3][0] = 2.0 * M * r * a * s2 / S;
  g[1][1] = -S / D;
  g[2][2] = -S;
  g[3][3] = -s2 / S * (rr_aa * rr_aa - D * a * a * s2);
  return g;
}

Mat4 coframe(const KerrParams& params, const SpacetimePoint& point) {
  const double a = params.spin;
  const double r = point.r, th = point.theta;
  const double S = sigma_of(params, r, th), D = delta_of(params, r);
  const double sn = std::sin(th);

  Mat4 w{};
  w[0][0] = std::sqrt(D / S);
  w[0][3] = -std::sqrt(D / S) * a * sn * sn;
  w[1][1] = std::sqrt(S / D);
  w[2][0] = sn / std::sqrt(S) * a;
  w[2][3] = -sn / std::sqrt(S) * (r * r + a * a);
  w[3][2] = std::sqrt(S);
  return w;
}

Mat4 frame(const KerrParams& params, const SpacetimePoint& point) {
  const double a = params.spin;
  const double r = point.r, th = point.theta;
  const double S = sigma_of(params, r, th), D = delta_of(params, r);
  const double sn = std::sin(th);
  const double rr_aa = r * r + a * a;

  // Closed-form duals of the symmetric coframe. e_(2) needs sin(theta) != 0;
  // callers on the axis use the regular-chart machinery instead.
  Mat4 e{};
  e[0][0] = rr_aa / std::sqrt(S * D);
  e[0][3] = a / std::sqrt(S * D);
  e[1][1] = std::sqrt(D / S);
  e[2][0] = -a * sn / std::sqrt(S);
  e[2][3] = -1.0 / (sn * std::sqrt(S));
  e[3][2] = 1.0 / std::sqrt(S);
  return e;
}

FrameVector to_frame_components(const Mat4& cof, const CoordVector& v) {
  FrameVector out{};
  for (int a = 0; a < 4; ++a)
    for (int i = 0; i < 4; ++i) out[a] += cof[a][i] * v[i];
  return out;
}

CoordVector to_coord_components(const Mat4& fr, const FrameVector& v) {
  CoordVector out{};
  for (int a = 0; a < 4; ++a)
    for (int i = 0; i < 4; ++i) out[i] += fr[a][i] * v[a];
  return out;
}

std::pair<CoordVector, CoordVector> principal_null_directions(const KerrParams& params,
                                                              const SpacetimePoint& point) {
  // l = ((r^2+a^2) d_t + Delta d_r + a d_phi)/sqrt(2 Sigma Delta); the radial
  // coefficient is Delta, fixed by the symmetric-frame relations
  // omega^0(l) = omega^1(l) = 1/sqrt(2) and the null norms.
  const double a = params.spin;
  const double r = point.r, th = point.theta;
  const double S = sigma_of(params, r, th), D = delta_of(params, r);
  const double norm = 1.0 / std::sqrt(2.0 * S * D);
  const double rr_aa = r * r + a * a;

  CoordVector l{{{norm * rr_aa, norm * D, 0.0, norm * a}}};
  CoordVector n{{{norm * rr_aa, -norm * D, 0.0, norm * a}}};
  return {l, n};
}

Christoffel christoffel_at(const KerrParams& params, double r, double theta) {
  const double a = params.spin, M = params.mass;
  const double sn = std::sin(theta), cs = std::cos(theta);
  const double S = sigma_of(params, r, theta), D = delta_of(params, r);
  const double S2 = S * S, S3 = S2 * S;
  const double rr_aa = r * r + a * a;
  const double q = r * r - a * a * cs * cs;  // recurring factor r^2 - a^2 cos^2
  const double ct = cs / sn;                 // only used in phi-sector terms

  Christoffel G{};
  auto set = [&G](int i, int j, int k, double v) {
    G.g[i][j][k] = v;
    G.g[i][k][j] = v;
  };

  set(0, 1, 0, M * rr_aa * q / (S2 * D));
  set(0, 2, 0, -2.0 * M * r * a * a * cs * sn / S2);
  set(0, 1, 3,
      a * M * sn * sn *
          (a * a * a * a * cs * cs - r * r * a * a * cs * cs - r * r * a * a - 3.0 * r * r * r * r) /
          (S2 * D));
  set(0, 2, 3, 2.0 * M * r * a * a * a * sn * sn * sn * cs / S2);

  set(1, 0, 0, M * q * D / S3);
  set(1, 3, 0, -a * M * sn * sn * q * D / S3);
  set(1, 1, 1, (r * a * a * sn * sn - M * q) / (S * D));
  set(1, 2, 1, -a * a * cs * sn / S);
  set(1, 2, 2, -r * D / S);
  set(1, 3, 3, D * sn * sn * (M * a * a * sn * sn * q - r * S2) / S3);

  set(2, 0, 0, -2.0 * M * r * a * a * sn * cs / S3);
  set(2, 3, 0, 2.0 * M * r * a * sn * cs * rr_aa / S3);
  set(2, 1, 1, a * a * sn * cs / (S * D));
  set(2, 1, 2, r / S);
  set(2, 2, 2, -a * a * sn * cs / S);
  // Note: the (r^2+a^2)^2 factor; verified against the finite-difference
  // metric-compatibility residual.
  set(2, 3, 3, -cs * sn * (S2 * D + 2.0 * M * r * rr_aa * rr_aa) / S3);

  set(3, 1, 0, M * a * q / (S2 * D));
  set(3, 2, 0, -2.0 * M * r * a * ct / S2);
  set(3, 1, 3, ((r - M) * S2 - M * rr_aa * q) / (S2 * D));
  set(3, 2, 3, ct + 2.0 * M * r * a * a * cs * sn / S2);
  return G;
}

Christoffel christoffel(const KerrParams& params, const SpacetimePoint& point) {
  return christoffel_at(params, point.r, point.theta);
}

Mat4 killing_yano(const KerrParams& params, const SpacetimePoint& point) {
  const double f01 = -params.spin * std::cos(point.theta);
  Mat4 f{};
  f[0][1] = f01;
  f[1][0] = -f01;
  f[2][3] = point.r;
  f[3][2] = -point.r;
  return f;
}

Mat4 hodge_dual(const KerrParams& params, const SpacetimePoint& point) {
  const double h23 = params.spin * std::cos(point.theta);
  Mat4 h{};
  h[0][1] = point.r;
  h[1][0] = -point.r;
  h[2][3] = h23;
  h[3][2] = -h23;
  return h;
}

Mat4 killing_tensor(const KerrParams& params, const SpacetimePoint& point) {
  // K_ab = f_ac eta^{cd} f_db = diag(a^2cos^2, -a^2cos^2, r^2, r^2) in the
  // frame; push down to coordinates with the coframe.
  const double ac = params.spin * std::cos(point.theta);
  const double kdiag[4] = {ac * ac, -ac * ac, point.r * point.r, point.r * point.r};
  const Mat4 w = coframe(params, point);

  Mat4 K{};
  for (int i = 0; i < 4; ++i)
    for (int j = i; j < 4; ++j) {
      double s = 0.0;
      for (int a = 0; a < 4; ++a) s += kdiag[a] * w[a][i] * w[a][j];
      K[i][j] = K[j][i] = s;  // symmetric by construction
    }
  return K;
}

}  // namespace kerrpol
