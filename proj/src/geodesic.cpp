#include "kerrpol/geodesic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kerrpol/detail/dopri5.hpp"

namespace kerrpol {

namespace {

struct RawContext {
  const ConservedSet* c;
  const KerrParams* p;
  int sign_r;
  int sign_theta;
  bool frozen_r;
  bool frozen_theta;
};

// Right-hand side on raw (t, r, theta, phi); clamps marginally negative
// potentials to zero so embedded stages near turning points stay evaluable.
Vec4 raw_rhs(const Vec4& y, const RawContext& ctx) {
  const double E = ctx.c->energy, Phi = ctx.c->angular_momentum, kap = ctx.c->carter;
  const double M = ctx.p->mass, a = ctx.p->spin;
  const double r = y[1], th = y[2];
  const double sn = std::sin(th), cs = std::cos(th);
  const double S = r * r + a * a * cs * cs;
  const double D = r * r - 2.0 * M * r + a * a;
  const double rr_aa = r * r + a * a;

  const double P = E * rr_aa - a * Phi;
  const double Dd = (Phi == 0.0) ? a * E * sn : a * E * sn - Phi / sn;
  const double R = ctx.frozen_r ? 0.0 : std::max(P * P - D * kap, 0.0);
  const double T = ctx.frozen_theta ? 0.0 : std::max(kap - Dd * Dd, 0.0);

  Vec4 f;
  f[0] = (E * (rr_aa * rr_aa - D * a * a * sn * sn) - 2.0 * M * r * a * Phi) / (S * D);
  f[1] = ctx.sign_r * std::sqrt(R) / S;
  f[2] = ctx.sign_theta * std::sqrt(T) / S;
  f[3] = (2.0 * M * r * a * E + ((Phi == 0.0) ? 0.0 : (S - 2.0 * M * r) * Phi / (sn * sn))) /
         (S * D);
  return f;
}

using StepResult = detail::StepOut<4>;

StepResult dp5_step(const Vec4& y0, const Vec4& k1, double h, double tol, const RawContext& ctx) {
  return detail::dopri5_step<4>(0.0, y0, k1, h, tol,
                                [&ctx](double, const Vec4& y) { return raw_rhs(y, ctx); });
}

double radial_value(const ConservedSet& c, const KerrParams& p, double r) {
  const double P = c.energy * (r * r + p.spin * p.spin) - p.spin * c.angular_momentum;
  return P * P - delta_of(p, r) * c.carter;
}

double polar_value(const ConservedSet& c, const KerrParams& p, double theta) {
  const double sn = std::sin(theta);
  const double Dd =
      (c.angular_momentum == 0.0) ? p.spin * c.energy * sn
                                  : p.spin * c.energy * sn - c.angular_momentum / sn;
  return c.carter - Dd * Dd;
}

double radial_slope(const ConservedSet& c, const KerrParams& p, double r) {
  const double P = c.energy * (r * r + p.spin * p.spin) - p.spin * c.angular_momentum;
  return 4.0 * r * c.energy * P - (2.0 * r - 2.0 * p.mass) * c.carter;
}

double polar_slope(const ConservedSet& c, const KerrParams& p, double theta) {
  const double sn = std::sin(theta), cs = std::cos(theta);
  if (c.angular_momentum == 0.0 && sn == 0.0) return 0.0;
  const double Dd = p.spin * c.energy * sn - c.angular_momentum / sn;
  const double Ddp = p.spin * c.energy * cs + c.angular_momentum * cs / (sn * sn);
  return -2.0 * Dd * Ddp;
}

}  // namespace

Potentials potentials(const ConservedSet& c, const KerrParams& params, double r, double theta) {
  const double sn = std::sin(theta);
  if (sn == 0.0 && c.angular_momentum != 0.0)
    throw precondition_error("potentials: theta on the axis requires Phi = 0");
  const double P = c.energy * (r * r + params.spin * params.spin) -
                   params.spin * c.angular_momentum;
  const double Dd = (c.angular_momentum == 0.0)
                        ? params.spin * c.energy * sn
                        : params.spin * c.energy * sn - c.angular_momentum / sn;
  return {P * P - delta_of(params, r) * c.carter, c.carter - Dd * Dd, P, Dd};
}

double radial_potential_scale(const ConservedSet& c, const KerrParams& params, double r) {
  const double P = c.energy * (r * r + params.spin * params.spin) -
                   params.spin * c.angular_momentum;
  return std::max({1.0, P * P, std::abs(delta_of(params, r) * c.carter)});
}

double polar_potential_scale(const ConservedSet& c, const KerrParams& params, double theta) {
  const double sn = std::sin(theta);
  const double Dd = (c.angular_momentum == 0.0 && sn == 0.0)
                        ? 0.0
                        : params.spin * c.energy * sn - c.angular_momentum / sn;
  return std::max({1.0, std::abs(c.carter), Dd * Dd});
}

CoordVector rhs(const GeodesicState& state, const ConservedSet& c, const KerrParams& params) {
  const Potentials pot = potentials(c, params, state.point.r, state.point.theta);
  if (pot.radial < -1e-12 * radial_potential_scale(c, params, state.point.r))
    throw precondition_error("rhs: R(r) negative, state outside the allowed region");
  if (pot.polar < -1e-12 * polar_potential_scale(c, params, state.point.theta))
    throw precondition_error("rhs: Theta(theta) negative, state outside the allowed region");

  RawContext ctx{&c, &params, state.sign_r, state.sign_theta, false, false};
  const Vec4 f = raw_rhs({state.point.t, state.point.r, state.point.theta, state.point.phi}, ctx);
  return {{{f[0], f[1], f[2], f[3]}}};
}

FrameVector tangent_frame_components(const GeodesicState& state, const ConservedSet& c,
                                     const KerrParams& params) {
  const Potentials pot = potentials(c, params, state.point.r, state.point.theta);
  const double S = sigma_of(params, state.point.r, state.point.theta);
  const double D = delta_of(params, state.point.r);
  const double inv = 1.0 / std::sqrt(S);
  const double sqR = state.sign_r * std::sqrt(std::max(pot.radial, 0.0));
  const double sqT = state.sign_theta * std::sqrt(std::max(pot.polar, 0.0));
  return {{{inv * pot.radial_momentum / std::sqrt(D), inv * sqR / std::sqrt(D),
            inv * pot.polar_momentum, inv * sqT}}};
}

Trajectory::Trajectory(KerrParams params, ConservedSet conserved, GeodesicState initial,
                       std::vector<TrajectoryStep> steps, std::vector<TurningEvent> events,
                       StopReason reason)
    : params_(params),
      conserved_(conserved),
      initial_(initial),
      steps_(std::move(steps)),
      events_(std::move(events)),
      reason_(reason) {}

double Trajectory::s_begin() const { return initial_.s; }

double Trajectory::s_end() const {
  if (steps_.empty()) return initial_.s;
  return steps_.back().s0 + steps_.back().h;
}

GeodesicState Trajectory::state(double s) const {
  if (steps_.empty()) return initial_;
  const double lo = s_begin(), hi = s_end();
  s = std::clamp(s, lo, hi);

  // First step whose span end covers s.
  std::size_t a = 0, b = steps_.size() - 1;
  while (a < b) {
    const std::size_t mid = (a + b) / 2;
    if (steps_[mid].s0 + steps_[mid].h < s)
      a = mid + 1;
    else
      b = mid;
  }
  const TrajectoryStep& st = steps_[a];
  const double theta = (st.h > 0.0) ? (s - st.s0) / st.h : 0.0;
  const Vec4 y = detail::dense_eval<4>(st.rcont, std::clamp(theta, 0.0, 1.0));
  return GeodesicState{SpacetimePoint(params_, y[0], y[1], y[2], y[3]), st.sign_r, st.sign_theta,
                       s};
}

std::vector<GeodesicState> Trajectory::accepted_states() const {
  std::vector<GeodesicState> out;
  out.reserve(steps_.size() + 1);
  out.push_back(initial_);
  for (const TrajectoryStep& st : steps_) {
    Vec4 y;
    for (int i = 0; i < 4; ++i) y[i] = st.rcont[0][i] + st.rcont[1][i];
    out.push_back(GeodesicState{SpacetimePoint(params_, y[0], y[1], y[2], y[3]), st.sign_r,
                                st.sign_theta, st.s0 + st.h});
  }
  return out;
}

Trajectory integrate(const GeodesicState& initial, const ConservedSet& c,
                     const KerrParams& params, const IntegrationControl& control) {
  if (!(control.tol > 0.0)) throw precondition_error("integrate: tol must be positive");
  const double tol = control.tol;
  const double r_stop = params.horizon_outer() * (1.0 + control.horizon_margin);
  const double r_escape =
      control.escape_radius > 0.0 ? control.escape_radius : 1000.0 * params.mass;

  const double R0 = radial_value(c, params, initial.point.r);
  const double T0 = polar_value(c, params, initial.point.theta);
  const double scale_R0 = radial_potential_scale(c, params, initial.point.r);
  const double scale_T0 = polar_potential_scale(c, params, initial.point.theta);
  if (R0 < -1e-12 * scale_R0 || T0 < -1e-12 * scale_T0)
    throw precondition_error("integrate: initial state outside the allowed region");

  RawContext ctx{&c, &params, initial.sign_r, initial.sign_theta, false, false};
  // Confinement at a double root (equatorial Theta, photon-sphere R): freeze
  // that coordinate for the whole run.
  ctx.frozen_r = std::abs(R0) <= 1e-12 * scale_R0 &&
                 std::abs(radial_slope(c, params, initial.point.r)) <= 1e-8 * scale_R0;
  ctx.frozen_theta = std::abs(T0) <= 1e-12 * scale_T0 &&
                     std::abs(polar_slope(c, params, initial.point.theta)) <= 1e-8 * scale_T0;

  std::vector<TrajectoryStep> steps;
  std::vector<TurningEvent> events;
  StopReason reason = StopReason::ReachedSMax;

  double s = initial.s;
  Vec4 y{initial.point.t, initial.point.r, initial.point.theta, initial.point.phi};

  if (control.s_max <= s)
    return Trajectory(params, c, initial, std::move(steps), std::move(events), reason);

  Vec4 k1 = raw_rhs(y, ctx);

  auto land_tol_r = [&](double r) { return 1e-12 * radial_potential_scale(c, params, r); };
  auto land_tol_t = [&](double th) { return 1e-12 * polar_potential_scale(c, params, th); };

  auto restart_step = [&](double pot_slope, double scale) {
    const double sn = std::abs(pot_slope);
    const double S = sigma_of(params, y[1], y[2]);
    if (sn < 1e-12) return 1e-6;
    // Sized so the first post-event step climbs well above the landing band.
    return std::max(2.0 * S * std::sqrt(1e-9 * scale) / sn, 1e-10);
  };

  // Initial step-size guess from the velocity magnitude.
  double h;
  {
    double v = 0.0;
    for (int i = 0; i < 4; ++i) v = std::max(v, std::abs(k1[i]));
    h = std::min({0.01 * (control.s_max - s), 0.1 / std::max(v, 1e-8)});
    h = std::max(h, 1e-12);
    if (std::abs(R0) <= land_tol_r(y[1]) && !ctx.frozen_r)
      h = std::min(h, restart_step(radial_slope(c, params, y[1]), scale_R0));
    if (std::abs(T0) <= land_tol_t(y[2]) && !ctx.frozen_theta)
      h = std::min(h, restart_step(polar_slope(c, params, y[2]), scale_T0));
  }

  std::size_t nsteps = 0;
  bool just_rejected = false;
  // Events are disarmed right after a flip until the potential has left the
  // landing band, so the restart cannot re-trigger on the same root.
  bool armed_r = std::abs(R0) > 1e3 * land_tol_r(y[1]);
  bool armed_theta = std::abs(T0) > 1e3 * land_tol_t(y[2]);

  // Exactly on a root the sqrt-form field vanishes and the constant curve is
  // a spurious solution (the ODE loses uniqueness there), so a restart must
  // leave the root analytically: the turning coordinate obeys
  // q(s*+h) = q* + Q'(q*) h^2 / (4 Sigma^2) + O(h^3), the others move with
  // their regular derivatives. The hop is sized so the potential climbs to
  // ~4e-12 * scale, above roundoff but below the re-arming band.
  auto kick_off_root = [&](int coord, double slope, double scale) {
    const double S = sigma_of(params, y[1], y[2]);
    if (std::abs(slope) < 1e-14 * scale) return;  // effectively a double root
    const double dq = 4e-12 * scale / std::abs(slope);
    const double h_hop = 2.0 * S * std::sqrt(dq / std::abs(slope));
    const Vec4 f = raw_rhs(y, ctx);
    Vec4 ynew = y;
    for (int i = 0; i < 4; ++i) ynew[i] += h_hop * f[i];
    ynew[coord] = y[coord] + slope * h_hop * h_hop / (4.0 * S * S);

    TrajectoryStep hop{};
    hop.s0 = s;
    hop.h = h_hop;
    hop.y0 = y;
    for (int i = 0; i < 4; ++i) {
      hop.rcont[0][i] = y[i];
      hop.rcont[1][i] = ynew[i] - y[i];
      hop.rcont[2][i] = hop.rcont[3][i] = hop.rcont[4][i] = 0.0;
    }
    hop.sign_r = ctx.sign_r;
    hop.sign_theta = ctx.sign_theta;
    steps.push_back(hop);
    s += h_hop;
    y = ynew;
  };

  // Branch signs point uphill after a turning point: s = sign(potential').
  auto flip_radial = [&]() {
    const double slope = radial_slope(c, params, y[1]);
    ctx.sign_r = slope >= 0.0 ? 1 : -1;
    events.push_back({s, TurningKind::Radial});
    armed_r = false;
    kick_off_root(1, slope, radial_potential_scale(c, params, y[1]));
    k1 = raw_rhs(y, ctx);
    h = restart_step(slope, radial_potential_scale(c, params, y[1]));
  };
  auto flip_polar = [&]() {
    const double slope = polar_slope(c, params, y[2]);
    ctx.sign_theta = slope >= 0.0 ? 1 : -1;
    events.push_back({s, TurningKind::Polar});
    armed_theta = false;
    kick_off_root(2, slope, polar_potential_scale(c, params, y[2]));
    k1 = raw_rhs(y, ctx);
    h = restart_step(slope, polar_potential_scale(c, params, y[2]));
  };

  // An initial state on a (simple) root needs the same kick; the branch sign
  // must point uphill, the only direction motion can start.
  if (!ctx.frozen_r && std::abs(R0) <= land_tol_r(y[1])) {
    const double slope = radial_slope(c, params, y[1]);
    ctx.sign_r = slope >= 0.0 ? 1 : -1;
    kick_off_root(1, slope, radial_potential_scale(c, params, y[1]));
    k1 = raw_rhs(y, ctx);
  }
  if (!ctx.frozen_theta && std::abs(T0) <= land_tol_t(y[2])) {
    const double slope = polar_slope(c, params, y[2]);
    ctx.sign_theta = slope >= 0.0 ? 1 : -1;
    kick_off_root(2, slope, polar_potential_scale(c, params, y[2]));
    k1 = raw_rhs(y, ctx);
  }

  while (s < control.s_max) {
    if (++nsteps > control.max_steps)
      throw stalled_orbit_error("integrate: step budget exhausted before termination");

    h = std::min(h, control.s_max - s);
    const double h_floor = 1e-14 * std::max(1.0, std::abs(s));
    if (h < h_floor) {
      // Cannot advance: either we are pinned on a root (flip) or stalled.
      const double Rv = ctx.frozen_r ? 1.0 : radial_value(c, params, y[1]);
      const double Tv = ctx.frozen_theta ? 1.0 : polar_value(c, params, y[2]);
      if (!ctx.frozen_r && armed_r && std::abs(Rv) <= land_tol_r(y[1])) {
        flip_radial();
        continue;
      }
      if (!ctx.frozen_theta && armed_theta && std::abs(Tv) <= land_tol_t(y[2])) {
        flip_polar();
        continue;
      }
      throw stalled_orbit_error(
          "integrate: step size underflow (degenerate turning point of R or Theta)");
    }

    StepResult trial = dp5_step(y, k1, h, tol, ctx);
    if (!trial.finite || trial.err > 1.0 || trial.y1[1] <= params.horizon_outer()) {
      const double fac = trial.finite && trial.err > 0.0
                             ? std::max(0.1, 0.9 * std::pow(trial.err, -0.2))
                             : 0.1;
      h *= std::min(fac, 0.5);
      just_rejected = true;
      continue;
    }

    // Turning-point detection: the error-accepted endpoint left the allowed
    // region, so a simple root lies inside the step. Land on it by bisecting
    // the step size; the landing must sit on the allowed side of the root so
    // the restarted motion can leave it.
    const double R_end = ctx.frozen_r ? 1.0 : radial_value(c, params, trial.y1[1]);
    const double T_end = ctx.frozen_theta ? 1.0 : polar_value(c, params, trial.y1[2]);
    const bool r_violated = !ctx.frozen_r && R_end < -land_tol_r(trial.y1[1]);
    const bool t_violated = !ctx.frozen_theta && T_end < -land_tol_t(trial.y1[2]);

    if (r_violated || t_violated) {
      auto bisect = [&](bool radial) -> std::pair<double, StepResult> {
        double lo = 0.0, hi = h;
        StepResult best = trial;
        double h_best = -1.0;
        for (int it = 0; it < 200 && h_best < 0.0; ++it) {
          const double mid = 0.5 * (lo + hi);
          StepResult res = dp5_step(y, k1, mid, tol, ctx);
          const double pv = radial ? radial_value(c, params, res.y1[1])
                                   : polar_value(c, params, res.y1[2]);
          const double lt = radial ? land_tol_r(res.y1[1]) : land_tol_t(res.y1[2]);
          if (pv >= 0.0 && pv <= lt) {
            h_best = mid;
            best = res;
            break;
          }
          if (pv > 0.0)
            lo = mid;
          else
            hi = mid;
          if ((hi - lo) <= 1e-15 * h) {
            // Land on the last allowed-side step.
            h_best = lo > 0.0 ? lo : mid;
            best = dp5_step(y, k1, h_best, tol, ctx);
            break;
          }
        }
        if (h_best < 0.0) {
          h_best = lo;
          best = dp5_step(y, k1, h_best, tol, ctx);
        }
        return {h_best, best};
      };

      double h_land;
      StepResult landed;
      TurningKind kind;
      if (r_violated && t_violated) {
        auto [hr, resr] = bisect(true);
        auto [ht, rest] = bisect(false);
        if (hr <= ht) {
          h_land = hr;
          landed = resr;
          kind = TurningKind::Radial;
        } else {
          h_land = ht;
          landed = rest;
          kind = TurningKind::Polar;
        }
      } else if (r_violated) {
        auto [hr, resr] = bisect(true);
        h_land = hr;
        landed = resr;
        kind = TurningKind::Radial;
      } else {
        auto [ht, rest] = bisect(false);
        h_land = ht;
        landed = rest;
        kind = TurningKind::Polar;
      }

      // A large landing step would commit an unquantified error at the
      // sqrt-singular endpoint. Approach the root through the main loop with
      // halved, error-controlled steps; take the landing hop only once it is
      // down at the sqrt(tol) scale of the restart step.
      const double hop =
          kind == TurningKind::Radial
              ? restart_step(radial_slope(c, params, landed.y1[1]),
                             radial_potential_scale(c, params, landed.y1[1]))
              : restart_step(polar_slope(c, params, landed.y1[2]),
                             polar_potential_scale(c, params, landed.y1[2]));
      if (h_land > std::max(2.0 * hop, 64.0 * h_floor)) {
        h = 0.5 * h_land;
        just_rejected = true;
        continue;
      }

      if (h_land > h_floor) {
        steps.push_back({s, h_land, y, landed.rcont, ctx.sign_r, ctx.sign_theta});
        s += h_land;
        y = landed.y1;
      }
      if (kind == TurningKind::Radial)
        flip_radial();
      else
        flip_polar();
      just_rejected = false;
      continue;
    }

    // Accept.
    steps.push_back({s, h, y, trial.rcont, ctx.sign_r, ctx.sign_theta});
    s += h;
    y = trial.y1;
    k1 = trial.k7;  // FSAL

    if (!ctx.frozen_r) {
      if (!armed_r && std::abs(R_end) > 1e3 * land_tol_r(y[1])) armed_r = true;
      // Exact landing on a root without a sign change in the endpoint value.
      if (armed_r && std::abs(R_end) <= land_tol_r(y[1])) {
        flip_radial();
        just_rejected = false;
        continue;
      }
    }
    if (!ctx.frozen_theta) {
      if (!armed_theta && std::abs(T_end) > 1e3 * land_tol_t(y[2])) armed_theta = true;
      if (armed_theta && std::abs(T_end) <= land_tol_t(y[2])) {
        flip_polar();
        just_rejected = false;
        continue;
      }
    }

    if (y[1] <= r_stop) {
      reason = StopReason::ReachedHorizon;
      break;
    }
    if (y[1] >= r_escape) {
      reason = StopReason::Escaped;
      break;
    }

    double fac = 0.9 * std::pow(std::max(trial.err, 1e-10), -0.2);
    fac = std::min(fac, just_rejected ? 1.0 : 5.0);
    h *= std::max(fac, 0.2);
    just_rejected = false;
  }

  return Trajectory(params, c, initial, std::move(steps), std::move(events), reason);
}

StateDiagnostics diagnostics(const GeodesicState& state, const ConservedSet& c,
                             const KerrParams& params) {
  const CoordVector v = rhs(state, c, params);
  const Mat4 g = metric_components(params, state.point);
  const Mat4 K = killing_tensor(params, state.point);

  double null_res = 0.0, energy = 0.0, ang = 0.0, carter = 0.0;
  for (int i = 0; i < 4; ++i) {
    energy += g[0][i] * v[i];
    ang -= g[3][i] * v[i];
    for (int j = 0; j < 4; ++j) {
      null_res += g[i][j] * v[i] * v[j];
      carter += K[i][j] * v[i] * v[j];
    }
  }
  return {null_res, energy, ang, carter};
}

}  // namespace kerrpol
