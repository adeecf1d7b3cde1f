#include <doctest.h>

#include <cmath>

#include "fd_oracles.hpp"
#include "kerrpol/geometry.hpp"

using namespace kerrpol;
using kerrpol::testing::RandomStates;

TEST_CASE("horizon radii") {
  CHECK(horizon_radii(KerrParams(1.0, 0.0)) == std::pair{2.0, 0.0});
  auto [rp, rm] = horizon_radii(KerrParams(1.0, 0.6));
  CHECK(rp == doctest::Approx(1.8).epsilon(1e-15));
  CHECK(rm == doctest::Approx(0.2).epsilon(1e-14));
  CHECK(horizon_radii(KerrParams(2.0, 0.0)).first == 4.0);
  CHECK_THROWS_AS(KerrParams(1.0, 1.0), precondition_error);
  CHECK_THROWS_AS(KerrParams(1.0, 1.5), precondition_error);
  CHECK_THROWS_AS(KerrParams(-1.0, 0.0), precondition_error);
}

TEST_CASE("Sigma and Delta scalars") {
  KerrParams pk(1.0, 0.9);
  SpacetimePoint p(pk, 0.0, 2.0, M_PI / 2, 0.0);
  auto [S, D] = scalars(pk, p);
  CHECK(S == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(D == doctest::Approx(4.0 - 4.0 + 0.81).epsilon(1e-14));

  KerrParams schw(1.0, 0.0);
  CHECK(delta_of(schw, 3.0) == doctest::Approx(3.0).epsilon(1e-15));

  // Horizon root, boundary probe on the raw function only.
  CHECK(std::abs(delta_of(pk, pk.horizon_outer())) < 1e-12);
}

TEST_CASE("coframe reproduces the metric") {
  RandomStates rnd(11);
  const double eta[4] = {1.0, -1.0, -1.0, -1.0};
  for (double a : {0.0, 0.3, 0.9, 0.999}) {
    KerrParams pk(1.0, a);
    for (int trial = 0; trial < 200; ++trial) {
      const SpacetimePoint p = rnd.point(pk);
      const Mat4 w = coframe(pk, p);
      const Mat4 g = metric_components(pk, p);
      double scale = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) scale = std::max(scale, std::abs(g[i][j]));
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double s = 0.0;
          for (int a2 = 0; a2 < 4; ++a2) s += eta[a2] * w[a2][i] * w[a2][j];
          CHECK(std::abs(s - g[i][j]) < 1e-12 * scale);
        }
    }
  }
}

TEST_CASE("coframe limits") {
  KerrParams schw(1.0, 0.0);
  SpacetimePoint p(schw, 0.0, 5.0, 1.1, 0.3);
  const Mat4 w = coframe(schw, p);
  CHECK(w[0][0] == doctest::Approx(std::sqrt(1.0 - 2.0 / 5.0)));
  CHECK(w[0][3] == 0.0);
  CHECK(w[1][1] == doctest::Approx(1.0 / std::sqrt(1.0 - 2.0 / 5.0)));
  CHECK(w[3][2] == doctest::Approx(5.0));
  // omega^2 = -r sin(theta) dphi under the paper's orientation
  CHECK(w[2][3] == doctest::Approx(-5.0 * std::sin(1.1)));
  CHECK(w[2][0] == 0.0);

  KerrParams pk(1.0, 0.9);
  SpacetimePoint eq(pk, 0.0, 4.0, M_PI / 2, 0.0);
  const Mat4 weq = coframe(pk, eq);
  // equatorial: omega^2 = (a dt - (r^2+a^2) dphi)/r
  CHECK(weq[2][0] == doctest::Approx(0.9 / 4.0));
  CHECK(weq[2][3] == doctest::Approx(-(16.0 + 0.81) / 4.0));
}

TEST_CASE("frame is dual to the coframe at 1e4 random points") {
  RandomStates rnd(12);
  for (double a : {0.0, 0.5, 0.95}) {
    KerrParams pk(1.0, a);
    for (int trial = 0; trial < 3400; ++trial) {
      const SpacetimePoint p = rnd.point(pk);
      const Mat4 w = coframe(pk, p);
      const Mat4 e = frame(pk, p);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double s = 0.0;
          for (int k = 0; k < 4; ++k) s += w[i][k] * e[j][k];
          CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) < 1e-12);
        }
    }
  }
}

TEST_CASE("timelike frame leg is the Carter observer") {
  KerrParams pk(1.0, 0.9);
  RandomStates rnd(13);
  for (int trial = 0; trial < 50; ++trial) {
    const SpacetimePoint p = rnd.point(pk);
    const Mat4 e = frame(pk, p);
    const auto [l, n] = principal_null_directions(pk, p);
    for (int i = 0; i < 4; ++i)
      CHECK(e[0][i] == doctest::Approx((l[i] + n[i]) / std::sqrt(2.0)).epsilon(1e-12));
  }
  KerrParams schw(1.0, 0.0);
  SpacetimePoint p(schw, 0.0, 8.0, 0.7, 0.0);
  CHECK(frame(schw, p)[0][0] == doctest::Approx(1.0 / std::sqrt(1.0 - 2.0 / 8.0)));
}

TEST_CASE("principal null directions") {
  RandomStates rnd(14);
  for (double a : {0.0, 0.45, 0.97}) {
    KerrParams pk(1.0, a);
    for (int trial = 0; trial < 300; ++trial) {
      const SpacetimePoint p = rnd.point(pk);
      const Mat4 g = metric_components(pk, p);
      const auto [l, n] = principal_null_directions(pk, p);
      double ll = 0.0, nn = 0.0, ln = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          ll += g[i][j] * l[i] * l[j];
          nn += g[i][j] * n[i] * n[j];
          ln += g[i][j] * l[i] * n[j];
        }
      CHECK(std::abs(ll) < 1e-12);
      CHECK(std::abs(nn) < 1e-12);
      CHECK(ln == doctest::Approx(1.0).epsilon(1e-12));

      // frame components follow the symmetric-frame pattern (1,1,0,0)/sqrt2
      const Mat4 w = coframe(pk, p);
      const FrameVector lf = to_frame_components(w, l);
      CHECK(lf[0] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
      CHECK(lf[1] == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
      CHECK(std::abs(lf[2]) < 1e-12);
      CHECK(std::abs(lf[3]) < 1e-12);
    }
  }

  // a=0, M=1, r=4: l = (1/sqrt(2 Sigma Delta)) (16 d_t + 8 d_r) with
  // Sigma = 16, Delta = 8 (radial coefficient Delta, not sqrt(Delta): the
  // sqrt form fails both null norms and the frame relations).
  KerrParams schw(1.0, 0.0);
  SpacetimePoint p(schw, 0.0, 4.0, 1.0, 0.0);
  const auto [l, n] = principal_null_directions(schw, p);
  const double norm = 1.0 / std::sqrt(2.0 * 16.0 * 8.0);
  CHECK(l[0] == doctest::Approx(norm * 16.0).epsilon(1e-14));
  CHECK(l[1] == doctest::Approx(norm * 8.0).epsilon(1e-14));
  CHECK(l[3] == 0.0);
}

TEST_CASE("christoffel symbols: symmetry, compatibility, spot value") {
  RandomStates rnd(15);
  for (double a : {0.0, 0.6, 0.9}) {
    KerrParams pk(1.0, a);
    for (int trial = 0; trial < 40; ++trial) {
      const SpacetimePoint p = rnd.point(pk);
      const Christoffel G = christoffel(pk, p);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
          for (int k = 0; k < 4; ++k) CHECK(G(i, j, k) == G(i, k, j));
      CHECK(kerrpol::testing::metric_compatibility_residual(pk, p) < 1e-6);
    }
  }

  // a=0, M=1, r=4: Gamma^r_tt = (M/r^2)(1 - 2M/r) = 1/32, evaluated from the
  // closed form M*Delta*(r^2 - a^2 cos^2)/Sigma^3 independently by hand.
  KerrParams schw(1.0, 0.0);
  SpacetimePoint p(schw, 0.0, 4.0, 0.4, 0.0);
  CHECK(christoffel(schw, p)(1, 0, 0) == doctest::Approx(1.0 / 32.0).epsilon(1e-15));
}

TEST_CASE("Killing-Yano tensor") {
  KerrParams pk(1.0, 0.9);
  SpacetimePoint eq(pk, 0.0, 3.0, M_PI / 2, 0.2);
  Mat4 f = killing_yano(pk, eq);
  CHECK(std::abs(f[0][1]) < 1e-16);
  CHECK(f[2][3] == 3.0);

  KerrParams schw(1.0, 0.0);
  SpacetimePoint p(schw, 0.0, 5.0, 1.0, 0.0);
  f = killing_yano(schw, p);
  CHECK(f[0][1] == 0.0);
  CHECK(f[2][3] == 5.0);

  // Killing-Yano equation residual nabla_i f_jk + nabla_j f_ik via coordinate
  // components and finite-difference covariant derivatives. Relative to the
  // field magnitude: the coordinate components grow like r^3, so an absolute
  // bound would be swamped by central-difference roundoff at large r.
  RandomStates rnd(16);
  for (int trial = 0; trial < 25; ++trial) {
    const SpacetimePoint q = rnd.point(pk);
    auto field = [&](double r, double th) {
      return kerrpol::testing::killing_yano_coord(pk, r, th);
    };
    const Mat4 f0 = field(q.r, q.theta);
    double scale = 1.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) scale = std::max(scale, std::abs(f0[i][j]));
    Mat4 grad[4];
    for (int k = 0; k < 4; ++k)
      grad[k] = kerrpol::testing::fd_covariant_deriv(pk, q, field, k);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          worst = std::max(worst, std::abs(grad[i][j][k] + grad[j][i][k]));
    CHECK(worst / scale < 1e-6);
  }
}

TEST_CASE("Hodge dual and Killing vector reconstruction") {
  KerrParams pk(1.0, 0.9);
  SpacetimePoint axis(pk, 0.0, 3.0, 0.0, 0.0);
  Mat4 h = hodge_dual(pk, axis);
  CHECK(h[2][3] == doctest::Approx(0.9).epsilon(1e-15));

  KerrParams schw(1.0, 0.0);
  SpacetimePoint p(schw, 0.0, 5.0, 1.0, 0.0);
  h = hodge_dual(schw, p);
  CHECK(h[0][1] == 5.0);
  CHECK(std::abs(h[2][3]) < 1e-16);

  // xi^i = (1/3) nabla_j h^{ji} = (1/3) (1/sqrt|g|) d_j (sqrt|g| h^{ji})
  // must reproduce d_t.
  RandomStates rnd(17);
  for (int trial = 0; trial < 25; ++trial) {
    const SpacetimePoint q = rnd.point(pk);
    auto h_upper = [&](double r, double th) -> Mat4 {
      const SpacetimePoint x(pk, 0.0, r, th, 0.0);
      const Mat4 hc_frame = hodge_dual(pk, x);
      const Mat4 w = coframe(pk, x);
      Mat4 h_cov{};
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double s = 0.0;
          for (int a = 0; a < 4; ++a)
            for (int b = 0; b < 4; ++b) s += hc_frame[a][b] * w[a][i] * w[b][j];
          h_cov[i][j] = s;
        }
      const Mat4 ginv = kerrpol::testing::inverse_metric(pk, x);
      Mat4 hup{};
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          double s = 0.0;
          for (int k = 0; k < 4; ++k)
            for (int l = 0; l < 4; ++l) s += ginv[i][k] * ginv[j][l] * h_cov[k][l];
          hup[i][j] = s;
        }
      // scale by sqrt|g| = Sigma sin(theta)
      const double sg = sigma_of(pk, r, th) * std::sin(th);
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) hup[i][j] *= sg;
      return hup;
    };

    const double sg = sigma_of(pk, q.r, q.theta) * std::sin(q.theta);
    const Mat4 dr = kerrpol::testing::fd_partial(h_upper, q.r, q.theta, 1);
    const Mat4 dth = kerrpol::testing::fd_partial(h_upper, q.r, q.theta, 2);
    for (int i = 0; i < 4; ++i) {
      const double xi = (dr[1][i] + dth[2][i]) / (3.0 * sg);
      CHECK(std::abs(xi - (i == 0 ? 1.0 : 0.0)) < 1e-6);
    }
  }
}

TEST_CASE("Killing tensor") {
  KerrParams pk(1.0, 0.9);
  RandomStates rnd(18);
  for (int trial = 0; trial < 25; ++trial) {
    const SpacetimePoint q = rnd.point(pk);
    const Mat4 K = killing_tensor(pk, q);
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) CHECK(K[i][j] == K[j][i]);

    // Killing equation: cyclic sum of covariant derivatives vanishes
    // (relative to the field magnitude, which grows like r^4).
    auto field = [&](double r, double th) {
      return killing_tensor(pk, SpacetimePoint(pk, 0.0, r, th, 0.0));
    };
    double scale = 1.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) scale = std::max(scale, std::abs(K[i][j]));
    Mat4 grad[4];
    for (int k = 0; k < 4; ++k)
      grad[k] = kerrpol::testing::fd_covariant_deriv(pk, q, field, k);
    double worst = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          worst = std::max(worst,
                           std::abs(grad[i][j][k] + grad[j][k][i] + grad[k][i][j]));
    CHECK(worst / scale < 1e-6);
  }

  // a = 0: K^{ij} p_i p_j = p_theta^2 + p_phi^2 / sin^2(theta)
  KerrParams schw(1.0, 0.0);
  RandomStates rnd2(19);
  for (int trial = 0; trial < 25; ++trial) {
    const SpacetimePoint q = rnd2.point(schw);
    const Mat4 K = killing_tensor(schw, q);
    const Mat4 ginv = kerrpol::testing::inverse_metric(schw, q);
    const double p[4] = {rnd2.uniform(-2, 2), rnd2.uniform(-2, 2), rnd2.uniform(-2, 2),
                         rnd2.uniform(-2, 2)};
    // K^{ij} p_i p_j via double raising
    double val = 0.0;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k)
          for (int l = 0; l < 4; ++l) val += ginv[i][k] * ginv[j][l] * K[k][l] * p[i] * p[j];
    const double sn = std::sin(q.theta);
    const double expected = p[2] * p[2] + p[3] * p[3] / (sn * sn);
    CHECK(val == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_CASE("frame/coordinate component round trip") {
  KerrParams pk(1.0, 0.8);
  RandomStates rnd(20);
  for (int trial = 0; trial < 100; ++trial) {
    const SpacetimePoint p = rnd.point(pk);
    const Mat4 w = coframe(pk, p);
    const Mat4 e = frame(pk, p);
    const CoordVector v{{{rnd.uniform(-3, 3), rnd.uniform(-3, 3), rnd.uniform(-3, 3),
                          rnd.uniform(-3, 3)}}};
    const CoordVector back = to_coord_components(e, to_frame_components(w, v));
    for (int i = 0; i < 4; ++i) CHECK(back[i] == doctest::Approx(v[i]).epsilon(1e-12));
  }
}

TEST_CASE("spacetime point domain guards") {
  KerrParams pk(1.0, 0.9);
  CHECK_THROWS_AS(SpacetimePoint(pk, 0.0, 1.0, 1.0, 0.0), precondition_error);
  CHECK_THROWS_AS(SpacetimePoint(pk, 0.0, 3.0, -0.1, 0.0), precondition_error);
  SpacetimePoint p(pk, 0.0, 3.0, 1.0, -1.0);
  CHECK(p.phi == doctest::Approx(2.0 * M_PI - 1.0));
}
