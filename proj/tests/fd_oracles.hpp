// Test-only finite-difference oracles, independent of the closed forms they
// check. Central differences with step 1e-5 * max(1, |x|), acceptance 1e-6.
#ifndef KERRPOL_TESTS_FD_ORACLES_HPP_
#define KERRPOL_TESTS_FD_ORACLES_HPP_

#include <cmath>
#include <functional>
#include <random>

#include "kerrpol/geodesic.hpp"
#include "kerrpol/geometry.hpp"

namespace kerrpol::testing {

inline double fd_step(double x) { return 1e-5 * std::max(1.0, std::abs(x)); }

// d/dx[k] of a matrix-valued field of (r, theta); t and phi derivatives vanish
// for every field used here.
inline Mat4 fd_partial(const std::function<Mat4(double, double)>& f, double r, double theta,
                       int k) {
  Mat4 out{};
  if (k == 1) {
    const double h = fd_step(r);
    const Mat4 p = f(r + h, theta), m = f(r - h, theta);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) out[i][j] = (p[i][j] - m[i][j]) / (2.0 * h);
  } else if (k == 2) {
    const double h = fd_step(theta);
    const Mat4 p = f(r, theta + h), m = f(r, theta - h);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) out[i][j] = (p[i][j] - m[i][j]) / (2.0 * h);
  }
  return out;
}

// Numeric inverse metric from the frame legs: g^{ij} = eta^{ab} e_a^i e_b^j.
inline Mat4 inverse_metric(const KerrParams& params, const SpacetimePoint& point) {
  const Mat4 e = frame(params, point);
  const double eta[4] = {1.0, -1.0, -1.0, -1.0};
  Mat4 ginv{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int a = 0; a < 4; ++a) s += eta[a] * e[a][i] * e[a][j];
      ginv[i][j] = s;
    }
  return ginv;
}

// max_k,i,j |d_k g_ij - Gamma^l_ki g_lj - Gamma^l_kj g_il|
inline double metric_compatibility_residual(const KerrParams& params,
                                            const SpacetimePoint& point) {
  const Mat4 g = metric_components(params, point);
  const Christoffel G = christoffel(params, point);
  auto field = [&](double r, double th) {
    return metric_components(params, SpacetimePoint(params, 0.0, r, th, 0.0));
  };
  double worst = 0.0;
  for (int k = 1; k <= 2; ++k) {
    const Mat4 dg = fd_partial(field, point.r, point.theta, k);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        double res = dg[i][j];
        for (int l = 0; l < 4; ++l) res -= G(l, k, i) * g[l][j] + G(l, k, j) * g[i][l];
        worst = std::max(worst, std::abs(res));
      }
  }
  return worst;
}

// Covariant derivative nabla_k T_ij of a (0,2) field of (r, theta), by
// central differences plus Christoffel correction. k in {0..3}.
inline Mat4 fd_covariant_deriv(const KerrParams& params, const SpacetimePoint& point,
                               const std::function<Mat4(double, double)>& field, int k) {
  const Christoffel G = christoffel(params, point);
  const Mat4 T = field(point.r, point.theta);
  const Mat4 dT = fd_partial(field, point.r, point.theta, k);
  Mat4 out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double v = dT[i][j];
      for (int l = 0; l < 4; ++l) v -= G(l, k, i) * T[l][j] + G(l, k, j) * T[i][l];
      out[i][j] = v;
    }
  return out;
}

// Killing-Yano tensor in coordinate components at (r, theta).
inline Mat4 killing_yano_coord(const KerrParams& params, double r, double theta) {
  const SpacetimePoint p(params, 0.0, r, theta, 0.0);
  const Mat4 f = killing_yano(params, p);
  const Mat4 w = coframe(params, p);
  Mat4 out{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) {
      double s = 0.0;
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) s += f[a][b] * w[a][i] * w[b][j];
      out[i][j] = s;
    }
  return out;
}

struct RandomStates {
  std::mt19937_64 rng;
  explicit RandomStates(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(rng);
  }

  SpacetimePoint point(const KerrParams& params) {
    const double r = uniform(params.horizon_outer() * 1.2, 30.0);
    const double th = uniform(0.15, M_PI - 0.15);
    return SpacetimePoint(params, uniform(-10.0, 10.0), r, th, uniform(0.0, 2.0 * M_PI));
  }

  // Allowed-region state with kappa bounded away from zero.
  GeodesicState state(const KerrParams& params, ConservedSet& c_out) {
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const SpacetimePoint p = point(params);
      const ConservedSet c{1.0, uniform(-6.0, 6.0), uniform(0.5, 60.0)};
      const Potentials pot = potentials(c, params, p.r, p.theta);
      if (pot.radial <= 1e-6 || pot.polar <= 1e-6) continue;
      c_out = c;
      const int sr = rng() % 2 ? 1 : -1;
      const int sth = rng() % 2 ? 1 : -1;
      return GeodesicState{p, sr, sth, uniform(-20.0, 20.0)};
    }
    throw std::runtime_error("RandomStates: no allowed state found");
  }
};

}  // namespace kerrpol::testing

#endif  // KERRPOL_TESTS_FD_ORACLES_HPP_
