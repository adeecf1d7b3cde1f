#include <doctest.h>

#include <cmath>

#include "fd_oracles.hpp"
#include "kerrpol/geodesic.hpp"

using namespace kerrpol;
using kerrpol::testing::RandomStates;

namespace {

GeodesicState make_state(const KerrParams& pk, double r, double theta, int sr, int sth,
                         double s = 0.0) {
  return GeodesicState{SpacetimePoint(pk, 0.0, r, theta, 0.0), sr, sth, s};
}

}  // namespace

TEST_CASE("potentials") {
  KerrParams pk(1.0, 0.9);
  ConservedSet c{1.0, 3.0, 12.0};

  SUBCASE("equatorial") {
    const Potentials p = potentials(c, pk, 5.0, M_PI / 2);
    CHECK(p.polar_momentum == doctest::Approx(0.9 - 3.0).epsilon(1e-15));
    CHECK(p.polar == doctest::Approx(12.0 - (0.9 - 3.0) * (0.9 - 3.0)).epsilon(1e-15));
    CHECK(p.radial_momentum == doctest::Approx(25.0 + 0.81 - 2.7).epsilon(1e-15));
    CHECK(p.radial ==
          doctest::Approx(p.radial_momentum * p.radial_momentum - delta_of(pk, 5.0) * 12.0));
  }

  SUBCASE("horizon boundary probe: R(r+) = P(r+)^2 >= 0") {
    const double rp = pk.horizon_outer();
    const Potentials p = potentials(c, pk, rp, 1.0);
    CHECK(p.radial == doctest::Approx(p.radial_momentum * p.radial_momentum).epsilon(1e-12));
    CHECK(p.radial >= 0.0);
  }

  SUBCASE("axis limit with Phi = 0") {
    ConservedSet ax{1.0, 0.0, 5.0};
    const Potentials p = potentials(ax, pk, 5.0, 0.0);
    CHECK(p.polar_momentum == 0.0);
    CHECK(p.polar == 5.0);
  }

  SUBCASE("axis with nonzero Phi is a domain error") {
    CHECK_THROWS_AS(potentials(c, pk, 5.0, 0.0), precondition_error);
  }
}

TEST_CASE("rhs") {
  KerrParams pk(1.0, 0.9);

  SUBCASE("equatorial photon with kappa = (aE-Phi)^2 has thetadot = 0") {
    ConservedSet c{1.0, 3.0, (0.9 - 3.0) * (0.9 - 3.0)};
    const GeodesicState st = make_state(pk, 8.0, M_PI / 2, -1, 1);
    const CoordVector v = rhs(st, c, pk);
    CHECK(std::abs(v[2]) < 1e-12);
  }

  SUBCASE("a = 0: phidot reduces to Phi/(r^2 sin^2 theta)") {
    KerrParams schw(1.0, 0.0);
    RandomStates rnd(21);
    for (int trial = 0; trial < 50; ++trial) {
      ConservedSet c;
      const GeodesicState st = rnd.state(schw, c);
      const CoordVector v = rhs(st, c, schw);
      const double sn = std::sin(st.point.theta);
      CHECK(v[3] == doctest::Approx(c.angular_momentum /
                                    (st.point.r * st.point.r * sn * sn))
                        .epsilon(1e-12));
    }
  }

  SUBCASE("frame-component tangent is null and matches the coordinate rhs") {
    RandomStates rnd(22);
    for (double a : {0.1, 0.7, 0.99}) {
      KerrParams pka(1.0, a);
      for (int trial = 0; trial < 100; ++trial) {
        ConservedSet c;
        const GeodesicState st = rnd.state(pka, c);
        const FrameVector K = tangent_frame_components(st, c, pka);
        CHECK(std::abs(eta_inner(K, K)) < 1e-12 * radial_potential_scale(c, pka, st.point.r));

        const CoordVector via_frame = to_coord_components(frame(pka, st.point), K);
        const CoordVector direct = rhs(st, c, pka);
        for (int i = 0; i < 4; ++i)
          CHECK(via_frame[i] == doctest::Approx(direct[i]).epsilon(1e-10));
      }
    }
  }

  SUBCASE("leaving the allowed region is an error") {
    ConservedSet c{1.0, 3.0, 12.0};
    // Theta < 0 near the pole for Phi != 0
    CHECK_THROWS_AS(rhs(make_state(pk, 8.0, 0.05, 1, 1), c, pk), precondition_error);
  }

  SUBCASE("equatorial Theta = 0: K = (P/sqrtD, +-sqrtR/sqrtD, aE-Phi, 0)/r") {
    ConservedSet c{1.0, 3.0, (0.9 - 3.0) * (0.9 - 3.0)};
    const GeodesicState st = make_state(pk, 8.0, M_PI / 2, 1, 1);
    const FrameVector K = tangent_frame_components(st, c, pk);
    const Potentials p = potentials(c, pk, 8.0, M_PI / 2);
    const double sqD = std::sqrt(delta_of(pk, 8.0));
    CHECK(K[0] == doctest::Approx(p.radial_momentum / sqD / 8.0).epsilon(1e-13));
    CHECK(K[1] == doctest::Approx(std::sqrt(p.radial) / sqD / 8.0).epsilon(1e-13));
    CHECK(K[2] == doctest::Approx((0.9 - 3.0) / 8.0).epsilon(1e-13));
    CHECK(std::abs(K[3]) < 1e-13);
  }
}

TEST_CASE("integrate: degenerate and trivial cases") {
  KerrParams pk(1.0, 0.9);
  ConservedSet c{1.0, 3.0, 12.0};

  SUBCASE("s_max = 0 gives the single initial sample") {
    const GeodesicState init = make_state(pk, 20.0, 1.57, -1, -1);
    IntegrationControl ctl;
    ctl.s_max = 0.0;
    const Trajectory traj = integrate(init, c, pk, ctl);
    CHECK(traj.steps().empty());
    CHECK(traj.accepted_states().size() == 1);
    CHECK(traj.state(0.0).point.r == 20.0);
  }

  SUBCASE("tol must be positive") {
    IntegrationControl ctl;
    ctl.tol = 0.0;
    CHECK_THROWS_AS(integrate(make_state(pk, 20.0, 1.57, -1, -1), c, pk, ctl),
                    precondition_error);
  }

  SUBCASE("initial data outside the allowed region rejected") {
    ConservedSet bad{1.0, 3.0, 1000.0};  // Theta(0.2) << 0
    IntegrationControl ctl;
    CHECK_THROWS_AS(integrate(make_state(pk, 20.0, 0.2, -1, -1), bad, pk, ctl),
                    precondition_error);
  }
}

TEST_CASE("integrate: conserved drift and null residual along a scattering orbit") {
  KerrParams pk(1.0, 0.9);
  ConservedSet c{1.0, 3.0, 12.0};
  const GeodesicState init = make_state(pk, 20.0, 1.57, -1, -1);
  IntegrationControl ctl;
  ctl.s_max = 60.0;
  ctl.tol = 1e-10;
  const Trajectory traj = integrate(init, c, pk, ctl);

  // scatters back out: exactly one radial turning point
  int radial_events = 0;
  for (const TurningEvent& e : traj.events())
    if (e.kind == TurningKind::Radial) ++radial_events;
  CHECK(radial_events == 1);
  CHECK(traj.state(traj.s_end()).point.r > 15.0);

  for (const GeodesicState& st : traj.accepted_states()) {
    const StateDiagnostics d = diagnostics(st, c, pk);
    CHECK(std::abs(d.null_residual) < 1e-10);
    CHECK(std::abs(d.energy - c.energy) < 1e-8 * std::max(1.0, std::abs(c.energy)));
    CHECK(std::abs(d.angular_momentum - c.angular_momentum) <
          1e-8 * std::max(1.0, std::abs(c.angular_momentum)));
    CHECK(std::abs(d.carter - c.carter) < 1e-8 * std::max(1.0, std::abs(c.carter)));
  }
}

TEST_CASE("integrate: monotone r and theta between events") {
  KerrParams pk(1.0, 0.9);
  ConservedSet c{1.0, 3.0, 12.0};
  const GeodesicState init = make_state(pk, 20.0, 1.57, -1, -1);
  IntegrationControl ctl;
  ctl.s_max = 60.0;
  const Trajectory traj = integrate(init, c, pk, ctl);

  const auto states = traj.accepted_states();
  for (std::size_t i = 1; i < states.size(); ++i) {
    CHECK(states[i].s > states[i - 1].s);
    if (states[i].sign_r == states[i - 1].sign_r) {
      if (states[i - 1].sign_r > 0)
        CHECK(states[i].point.r >= states[i - 1].point.r);
      else
        CHECK(states[i].point.r <= states[i - 1].point.r);
    }
    if (states[i].sign_theta == states[i - 1].sign_theta) {
      if (states[i - 1].sign_theta > 0)
        CHECK(states[i].point.theta >= states[i - 1].point.theta - 1e-13);
      else
        CHECK(states[i].point.theta <= states[i - 1].point.theta + 1e-13);
    }
  }
}

TEST_CASE("integrate: time reversibility through turning points") {
  KerrParams pk(1.0, 0.9);
  ConservedSet c{1.0, 3.0, 12.0};
  const GeodesicState init = make_state(pk, 20.0, 1.57, -1, -1);
  IntegrationControl ctl;
  ctl.s_max = 40.0;
  ctl.tol = 1e-11;
  const Trajectory traj = integrate(init, c, pk, ctl);
  REQUIRE(!traj.events().empty());

  const GeodesicState end = traj.state(traj.s_end());
  const GeodesicState back_init{end.point, -end.sign_r, -end.sign_theta, 0.0};
  IntegrationControl back_ctl;
  back_ctl.s_max = traj.s_end() - traj.s_begin();
  back_ctl.tol = 1e-11;
  const Trajectory back = integrate(back_init, c, pk, back_ctl);
  const GeodesicState last = back.state(back.s_end());
  CHECK(last.point.r == doctest::Approx(init.point.r).epsilon(1e-6));
  CHECK(last.point.theta == doctest::Approx(init.point.theta).epsilon(1e-6));
  // t advances symmetrically: t_back_end = 2 t_end - t0
  CHECK(last.point.t == doctest::Approx(2.0 * end.point.t - init.point.t).epsilon(1e-6));
}

TEST_CASE("integrate: horizon capture and escape termination") {
  KerrParams pk(1.0, 0.9);

  SUBCASE("infall reaches the horizon margin") {
    ConservedSet c{1.0, 0.1, 0.5};
    const GeodesicState init = make_state(pk, 6.0, 1.3, -1, 1);
    IntegrationControl ctl;
    ctl.s_max = 1e4;
    const Trajectory traj = integrate(init, c, pk, ctl);
    CHECK(traj.stop_reason() == StopReason::ReachedHorizon);
    const double r_end = traj.state(traj.s_end()).point.r;
    CHECK(r_end > pk.horizon_outer());
    CHECK(r_end < pk.horizon_outer() * (1.0 + 1e-4));
  }

  SUBCASE("outgoing photon escapes") {
    ConservedSet c{1.0, 3.0, 12.0};
    const GeodesicState init = make_state(pk, 20.0, 1.57, 1, -1);
    IntegrationControl ctl;
    ctl.s_max = 1e5;
    const Trajectory traj = integrate(init, c, pk, ctl);
    CHECK(traj.stop_reason() == StopReason::Escaped);
    CHECK(traj.state(traj.s_end()).point.r >= 1000.0);
  }
}

TEST_CASE("integrate: equatorial confinement is exact") {
  KerrParams pk(1.0, 0.9);
  const double kap = (0.9 - 3.0) * (0.9 - 3.0);
  ConservedSet c{1.0, 3.0, kap};
  const GeodesicState init = make_state(pk, 20.0, M_PI / 2, -1, 1);
  IntegrationControl ctl;
  ctl.s_max = 50.0;
  const Trajectory traj = integrate(init, c, pk, ctl);
  for (const GeodesicState& st : traj.accepted_states())
    CHECK(st.point.theta == M_PI / 2);
}

TEST_CASE("integrate: axial orbit (Phi = 0, kappa = 0) stays on the axis") {
  KerrParams pk(1.0, 0.9);
  ConservedSet c{1.0, 0.0, 0.0};
  const GeodesicState init{SpacetimePoint(pk, 0.0, 20.0, 0.0, 0.0), -1, 1, 0.0};
  IntegrationControl ctl;
  ctl.s_max = 30.0;
  const Trajectory traj = integrate(init, c, pk, ctl);
  for (const GeodesicState& st : traj.accepted_states()) CHECK(st.point.theta == 0.0);
  // rdot = -E on the axis, so r decreases.
  CHECK(traj.state(traj.s_end()).point.r < 20.0);
}

TEST_CASE("integrate: dense output matches accepted states and a fine re-integration") {
  KerrParams pk(1.0, 0.9);
  ConservedSet c{1.0, 3.0, 12.0};
  const GeodesicState init = make_state(pk, 20.0, 1.57, -1, -1);
  IntegrationControl ctl;
  ctl.s_max = 40.0;
  const Trajectory traj = integrate(init, c, pk, ctl);

  const auto states = traj.accepted_states();
  for (const GeodesicState& st : states) {
    const GeodesicState interp = traj.state(st.s);
    CHECK(interp.point.r == doctest::Approx(st.point.r).epsilon(1e-12));
    CHECK(interp.point.theta == doctest::Approx(st.point.theta).epsilon(1e-12));
  }

  for (std::size_t i = 1; i + 1 < states.size(); i += 7) {
    const double sm = 0.5 * (states[i].s + states[i + 1].s);
    const GeodesicState mid = traj.state(sm);
    const GeodesicState from{states[i].point, states[i].sign_r, states[i].sign_theta,
                             states[i].s};
    IntegrationControl fine_ctl;
    fine_ctl.s_max = sm;
    fine_ctl.tol = 1e-13;
    const Trajectory ref = integrate(from, c, pk, fine_ctl);
    const GeodesicState ref_mid = ref.state(sm);
    CHECK(mid.point.r == doctest::Approx(ref_mid.point.r).epsilon(1e-9));
    CHECK(mid.point.theta == doctest::Approx(ref_mid.point.theta).epsilon(1e-9));
    CHECK(mid.point.t == doctest::Approx(ref_mid.point.t).epsilon(1e-9));
  }
}

TEST_CASE("integrate: turning points land on |R| below the bisection band") {
  KerrParams pk(1.0, 0.9);
  ConservedSet c{1.0, 3.0, 12.0};
  const GeodesicState init = make_state(pk, 20.0, 1.57, -1, -1);
  IntegrationControl ctl;
  ctl.s_max = 60.0;
  const Trajectory traj = integrate(init, c, pk, ctl);
  REQUIRE(!traj.events().empty());
  for (const TurningEvent& e : traj.events()) {
    const GeodesicState st = traj.state(e.s);
    const Potentials p = potentials(c, pk, st.point.r, st.point.theta);
    if (e.kind == TurningKind::Radial)
      CHECK(std::abs(p.radial) <= 1e-12 * radial_potential_scale(c, pk, st.point.r));
    else
      CHECK(std::abs(p.polar) <= 1e-12 * polar_potential_scale(c, pk, st.point.theta));
  }
}
