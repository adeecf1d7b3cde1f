#include "kerrpol/polarization.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "kerrpol/detail/dopri5.hpp"
#include "kerrpol/transport_oracle.hpp"

namespace kerrpol {

namespace {

constexpr double kKappaFloor = 1e-12;
// Residual window: fraction of the potential scale below which the
// critical-point residual is reported indeterminate.
constexpr double kResidualWindow = 1e-9;

void require_basis_preconditions(const ConservedSet& c) {
  if (!(c.carter > kKappaFloor))
    throw precondition_error(
        "measurement basis undefined: kappa ~ 0 (photon along a principal null direction)");
}

}  // namespace

double dot3(const ThreeVector& u, const ThreeVector& v) {
  return u[0] * v[0] + u[1] * v[1] + u[2] * v[2];
}

double norm3(const ThreeVector& v) { return std::sqrt(dot3(v, v)); }

ThreeVector cross3(const ThreeVector& u, const ThreeVector& v) {
  return {u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]};
}

CoordVector carter_observer(const KerrParams& params, const SpacetimePoint& point) {
  const double S = sigma_of(params, point.r, point.theta);
  const double D = delta_of(params, point.r);
  const double n = 1.0 / std::sqrt(S * D);
  return {{{n * (point.r * point.r + params.spin * params.spin), 0.0, 0.0, n * params.spin}}};
}

ThreeVector project(const FrameVector& v) { return {v[1], v[2], v[3]}; }

MeasurementBasis measurement_basis(const GeodesicState& state, const ConservedSet& c,
                                   const KerrParams& params) {
  require_basis_preconditions(c);
  const Potentials pot = potentials(c, params, state.point.r, state.point.theta);
  if (pot.radial_momentum == 0.0)
    throw precondition_error("measurement basis undefined: P(r) = 0");
  const double sqk = std::sqrt(c.carter);
  const double sqD = std::sqrt(delta_of(params, state.point.r));
  const double sqR = state.sign_r * std::sqrt(std::max(pot.radial, 0.0));
  const double sqT = state.sign_theta * std::sqrt(std::max(pot.polar, 0.0));

  MeasurementBasis basis;
  basis.b1 = {0.0, -sqT / sqk, pot.polar_momentum / sqk};
  const double n2 = 1.0 / (sqk * pot.radial_momentum);
  basis.b2 = {-c.carter * sqD * n2, pot.polar_momentum * sqR * n2, sqR * sqT * n2};
  return basis;
}

MeasurementBasis measurement_basis_from_cross(const GeodesicState& state, const ConservedSet& c,
                                              const KerrParams& params) {
  require_basis_preconditions(c);
  const auto [l, n] = principal_null_directions(params, state.point);
  const Mat4 w = coframe(params, state.point);
  const ThreeVector l3 = project(to_frame_components(w, l));
  const ThreeVector K3 = project(tangent_frame_components(state, c, params));

  const double lnorm = norm3(l3), knorm = norm3(K3);
  if (lnorm == 0.0 || knorm == 0.0)
    throw precondition_error("measurement basis undefined: degenerate direction vector");
  ThreeVector lhat{l3[0] / lnorm, l3[1] / lnorm, l3[2] / lnorm};
  ThreeVector khat{K3[0] / knorm, K3[1] / knorm, K3[2] / knorm};

  ThreeVector b1 = cross3(lhat, khat);
  const double b1n = norm3(b1);
  if (b1n < 1e-14)
    throw precondition_error("measurement basis undefined: photon direction parallel to lhat");
  for (double& x : b1) x /= b1n;

  // Orientation pinned so the closed forms are reproduced.
  ThreeVector b2 = cross3(b1, khat);
  const double b2n = norm3(b2);
  for (double& x : b2) x /= b2n;
  return {b1, b2};
}

std::pair<Vec2, Vec2> projected_pp_basis(const GeodesicState& state, const KerrParams& params) {
  const double ac = params.spin * std::cos(state.point.theta);
  const double r = state.point.r;
  const double n = 1.0 / std::sqrt(sigma_of(params, r, state.point.theta));
  return {Vec2{-ac * n, r * n}, Vec2{-r * n, -ac * n}};
}

PolarizationState initial_polarization(double c1, double c2, const GeodesicState& initial,
                                       const ConservedSet& c, const KerrParams& params) {
  if (c1 == 0.0 && c2 == 0.0)
    throw precondition_error("initial_polarization: (c1, c2) must be nonzero");
  require_basis_preconditions(c);
  const double r0 = initial.point.r;
  const double ac0 = params.spin * std::cos(initial.point.theta);
  const double n = 1.0 / std::sqrt(sigma_of(params, r0, initial.point.theta));

  PolarizationState pol;
  pol.c1 = c1;
  pol.c2 = c2;
  pol.frame_components = {{{0.0, 0.0, -n * (c1 * ac0 - c2 * r0), -n * (c1 * r0 + c2 * ac0)}}};
  return pol;
}

FrameVector polarization_vector(const PolarizationState& pol, const GeodesicState& state,
                                const ConservedSet& c, const KerrParams& params) {
  const ParallelFrame L = parallel_frame(state, c, params);
  return pol.frame_components[0] * L.L0 + pol.frame_components[1] * L.L1 +
         pol.frame_components[2] * L.L2 + pol.frame_components[3] * L.L3;
}

Vec2 measure_in_basis(const FrameVector& v, const MeasurementBasis& basis) {
  const ThreeVector p = project(v);
  return {dot3(p, basis.b1), dot3(p, basis.b2)};
}

double rotation_angle(const Vec2& in, const Vec2& out) {
  return std::atan2(in[1] * out[0] - in[0] * out[1], in[0] * out[0] + in[1] * out[1]);
}

double faraday_angle(const SpacetimePoint& from, const SpacetimePoint& to,
                     const KerrParams& params) {
  const double a = params.spin;
  const double c0 = std::cos(from.theta), cs = std::cos(to.theta);
  const double num = a * (to.r * c0 - from.r * cs);
  const double den = to.r * from.r + a * a * c0 * cs;
  return std::atan2(num, den);
}

Mat2 rotation_matrix(const SpacetimePoint& from, const SpacetimePoint& to,
                     const KerrParams& params) {
  const double a = params.spin;
  const double c0 = std::cos(from.theta), cs = std::cos(to.theta);
  const double n =
      1.0 / std::sqrt(sigma_of(params, from.r, from.theta) * sigma_of(params, to.r, to.theta));
  const double diag = n * (to.r * from.r + a * a * c0 * cs);
  const double off = n * a * (from.r * cs - to.r * c0);
  return {{{diag, -off}, {off, diag}}};
}

double critical_point_residual(const GeodesicState& state, const ConservedSet& c,
                               const KerrParams& params) {
  const Potentials pot = potentials(c, params, state.point.r, state.point.theta);
  const double tol_r = kResidualWindow * radial_potential_scale(c, params, state.point.r);
  const double tol_t = kResidualWindow * polar_potential_scale(c, params, state.point.theta);
  const double nan = std::numeric_limits<double>::quiet_NaN();

  if (pot.radial <= tol_r) return nan;
  const double term_r = state.point.r / (state.sign_r * std::sqrt(pot.radial));
  const double cot = std::cos(state.point.theta) / std::sin(state.point.theta);
  if (pot.polar <= tol_t) {
    // Orbits pinned to the equator: the polar term vanishes with cot(theta).
    if (std::abs(cot) <= 1e-8) return term_r;
    return nan;
  }
  return term_r + cot / (state.sign_theta * std::sqrt(pot.polar));
}

std::vector<double> unwrap_angles(const std::vector<double>& raw) {
  std::vector<double> out(raw.size());
  double shift = 0.0;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (i > 0) {
      const double d = raw[i] - raw[i - 1];
      if (d > M_PI) shift -= 2.0 * M_PI;
      if (d < -M_PI) shift += 2.0 * M_PI;
    }
    out[i] = raw[i] + shift;
  }
  return out;
}

std::vector<RotationSample> faraday_curve(const Trajectory& trajectory,
                                          std::size_t sample_count) {
  const std::vector<double> ss = uniform_samples(trajectory, sample_count);
  const SpacetimePoint origin = trajectory.initial_state().point;

  std::vector<double> raw;
  raw.reserve(ss.size());
  std::vector<RotationSample> out;
  out.reserve(ss.size());
  for (const double s : ss) {
    const GeodesicState st = trajectory.state(s);
    raw.push_back(faraday_angle(origin, st.point, trajectory.params()));
    out.push_back({s, st.point.r, st.point.theta, st.point.phi, 0.0,
                   critical_point_residual(st, trajectory.conserved(), trajectory.params())});
  }
  const std::vector<double> chi = unwrap_angles(raw);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].chi = chi[i];
  return out;
}

std::vector<double> locate_critical_points(const Trajectory& trajectory,
                                           std::size_t sample_count) {
  const std::vector<double> ss = uniform_samples(trajectory, sample_count);
  const ConservedSet& c = trajectory.conserved();
  const KerrParams& params = trajectory.params();

  auto residual_at = [&](double s) {
    return critical_point_residual(trajectory.state(s), c, params);
  };
  auto has_event_between = [&](double a, double b) {
    for (const TurningEvent& e : trajectory.events())
      if (e.s > a && e.s < b) return true;
    return false;
  };

  std::vector<double> roots;
  for (std::size_t i = 0; i + 1 < ss.size(); ++i) {
    const double ra = residual_at(ss[i]), rb = residual_at(ss[i + 1]);
    if (!std::isfinite(ra) || !std::isfinite(rb)) continue;
    if (ra == 0.0) {
      roots.push_back(ss[i]);
      continue;
    }
    if (ra * rb >= 0.0) continue;
    // The residual has poles at turning points; a sign change across an event
    // is not a root.
    if (has_event_between(ss[i], ss[i + 1])) continue;

    double lo = ss[i], hi = ss[i + 1];
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double rm = residual_at(mid);
      if (!std::isfinite(rm)) break;
      if (rm == 0.0) {
        lo = hi = mid;
        break;
      }
      (rm * ra > 0.0 ? lo : hi) = mid;
    }
    roots.push_back(0.5 * (lo + hi));
  }
  return roots;
}

std::vector<std::pair<double, double>> axis_rotation_curve(const Trajectory& trajectory,
                                                           double tol) {
  const ConservedSet& c = trajectory.conserved();
  const KerrParams& params = trajectory.params();
  if (c.angular_momentum != 0.0)
    throw precondition_error("axis_rotation_curve: trajectory must have Phi = 0");

  const double th0 = trajectory.initial_state().point.theta;
  const bool north = th0 < 1e-12;
  const bool south = M_PI - th0 < 1e-12;
  if (!north && !south)
    throw precondition_error("axis_rotation_curve: trajectory not on the symmetry axis");
  for (const GeodesicState& st : trajectory.accepted_states())
    if (std::min(st.point.theta, M_PI - st.point.theta) > 1e-10)
      throw precondition_error("axis_rotation_curve: trajectory leaves the axis");

  const int hemisphere = north ? 1 : -1;

  // Transport the polarization and a reference normal with the regular-chart
  // generator; chi is the angle between them, which parallel transport must
  // keep fixed.
  auto rhs_axis = [&](double s, const std::array<double, 8>& V) {
    const GeodesicState st = trajectory.state(s);
    const Mat4 A = axis_transport_generator(params, c, st.point.r, st.sign_r, hemisphere);
    std::array<double, 8> out{};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        out[i] += A[i][j] * V[j];
        out[4 + i] += A[i][j] * V[4 + j];
      }
    return out;
  };

  std::array<double, 8> V{0, 0, 1, 0, /* reference: */ 0, 0, 0, 1};
  double s = trajectory.s_begin();
  const double s_end = trajectory.s_end();
  auto k1 = rhs_axis(s, V);
  double h = std::min(1e-3, std::max(s_end - s, 1e-3));

  auto angle_between = [](const std::array<double, 8>& V) {
    return std::atan2(V[2] * V[4 + 3] - V[3] * V[4 + 2], V[2] * V[4 + 2] + V[3] * V[4 + 3]);
  };
  const double chi0 = angle_between(V);
  std::vector<std::pair<double, double>> curve{{s, 0.0}};

  while (s < s_end) {
    h = std::min(h, s_end - s);
    auto trial = detail::dopri5_step<8>(s, V, k1, h, tol, rhs_axis);
    if (!trial.finite || trial.err > 1.0) {
      h *= trial.finite && trial.err > 0.0 ? std::max(0.1, 0.9 * std::pow(trial.err, -0.2)) : 0.1;
      continue;
    }
    s += h;
    V = trial.y1;
    k1 = trial.k7;
    curve.emplace_back(s, angle_between(V) - chi0);
    h *= std::clamp(0.9 * std::pow(std::max(trial.err, 1e-10), -0.2), 0.2, 5.0);
    if (h <= 1e-15 * std::max(1.0, std::abs(s))) break;
  }
  return curve;
}

double check_zero_rotation_axis(const Trajectory& trajectory, double tol) {
  double max_chi = 0.0;
  for (const auto& [s, chi] : axis_rotation_curve(trajectory, tol))
    max_chi = std::max(max_chi, std::abs(chi));
  return max_chi;
}

}  // namespace kerrpol
