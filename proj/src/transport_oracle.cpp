#include "kerrpol/transport_oracle.hpp"

#include <algorithm>
#include <cmath>

#include "kerrpol/detail/dopri5.hpp"
#include "kerrpol/polarization.hpp"

namespace kerrpol {

namespace {

double metric_inner(const Mat4& g, const Vec4& u, const Vec4& v) {
  double s = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += g[i][j] * u[i] * v[j];
  return s;
}

}  // namespace

std::vector<double> uniform_samples(const Trajectory& trajectory, std::size_t count) {
  std::vector<double> s;
  if (count == 0) return s;
  s.reserve(count);
  const double a = trajectory.s_begin(), b = trajectory.s_end();
  if (count == 1 || b <= a) {
    s.push_back(a);
    return s;
  }
  for (std::size_t i = 0; i < count; ++i)
    s.push_back(a + (b - a) * static_cast<double>(i) / static_cast<double>(count - 1));
  return s;
}

TransportRun transport(const CoordVector& v0, const Trajectory& trajectory, double tol,
                       const std::vector<double>& sample_s) {
  if (!(tol > 0.0)) throw precondition_error("transport: tol must be positive");
  if (trajectory.steps().empty() && !sample_s.empty() &&
      (sample_s.front() < trajectory.s_begin() || sample_s.back() > trajectory.s_end()))
    throw precondition_error("transport: samples outside the trajectory span");

  const KerrParams& params = trajectory.params();
  const ConservedSet& c = trajectory.conserved();

  auto rhs_transport = [&](double s, const Vec4& V) -> Vec4 {
    const GeodesicState st = trajectory.state(s);
    const Christoffel G = christoffel_at(params, st.point.r, st.point.theta);
    const CoordVector K = rhs(st, c, params);
    Vec4 out{};
    for (int i = 0; i < 4; ++i) {
      double acc = 0.0;
      for (int j = 0; j < 4; ++j)
        for (int k = 0; k < 4; ++k) acc += G(i, j, k) * K[j] * V[k];
      out[i] = -acc;
    }
    return out;
  };

  TransportRun run;
  run.s = sample_s;
  run.v.reserve(sample_s.size());
  run.max_norm_drift = 0.0;
  run.max_tangent_drift = 0.0;

  double s = trajectory.s_begin();
  const double s_end = trajectory.s_end();
  Vec4 V = v0.c;

  // Reference inner products at the start.
  const GeodesicState st0 = trajectory.state(s);
  const Mat4 g0 = metric_components(params, st0.point);
  const Vec4 K0 = rhs(st0, c, params).c;
  const double vv0 = metric_inner(g0, V, V);
  const double vk0 = metric_inner(g0, V, K0);
  const double vv_scale = std::max(1.0, std::abs(vv0));
  const double vk_scale = std::max(1.0, std::abs(vk0));

  std::size_t next_sample = 0;
  auto record_through = [&](double s_hi, const std::array<Vec4, 5>& rcont, double s_lo,
                            double h) {
    while (next_sample < sample_s.size() && sample_s[next_sample] <= s_hi + 1e-14) {
      const double theta = h > 0.0 ? std::clamp((sample_s[next_sample] - s_lo) / h, 0.0, 1.0) : 0.0;
      const Vec4 y = detail::dense_eval<4>(rcont, theta);
      run.v.push_back(CoordVector{{{y[0], y[1], y[2], y[3]}}});
      ++next_sample;
    }
  };

  // Record any samples at or before the start.
  while (next_sample < sample_s.size() && sample_s[next_sample] <= s + 1e-14) {
    run.v.push_back(CoordVector{{{V[0], V[1], V[2], V[3]}}});
    ++next_sample;
  }

  Vec4 k1 = rhs_transport(s, V);
  double h = std::min(1e-3, (s_end - s) > 0 ? (s_end - s) : 1e-3);
  std::size_t guard = 0;

  while (s < s_end && next_sample <= sample_s.size()) {
    if (++guard > 50000000) throw stalled_orbit_error("transport: step budget exhausted");
    h = std::min(h, s_end - s);
    if (h <= 1e-15 * std::max(1.0, std::abs(s))) break;

    auto trial = detail::dopri5_step<4>(s, V, k1, h, tol, rhs_transport);
    if (!trial.finite || trial.err > 1.0) {
      h *= trial.finite && trial.err > 0.0 ? std::max(0.1, 0.9 * std::pow(trial.err, -0.2)) : 0.1;
      continue;
    }
    record_through(s + h, trial.rcont, s, h);
    s += h;
    V = trial.y1;
    k1 = trial.k7;

    // Conservation diagnostics at accepted points.
    const GeodesicState st = trajectory.state(s);
    const Mat4 g = metric_components(params, st.point);
    const Vec4 K = rhs(st, c, params).c;
    run.max_norm_drift =
        std::max(run.max_norm_drift, std::abs(metric_inner(g, V, V) - vv0) / vv_scale);
    run.max_tangent_drift =
        std::max(run.max_tangent_drift, std::abs(metric_inner(g, V, K) - vk0) / vk_scale);

    h *= std::clamp(0.9 * std::pow(std::max(trial.err, 1e-10), -0.2), 0.2, 5.0);
  }

  // Flush trailing samples at the end point.
  while (next_sample < sample_s.size()) {
    run.v.push_back(CoordVector{{{V[0], V[1], V[2], V[3]}}});
    ++next_sample;
  }
  return run;
}

TransportRun transport(const CoordVector& v0, const Trajectory& trajectory, double tol,
                       std::size_t sample_count) {
  return transport(v0, trajectory, tol, uniform_samples(trajectory, sample_count));
}

std::vector<double> faraday_numeric(double c1, double c2, const Trajectory& trajectory,
                                    double tol, const std::vector<double>& sample_s) {
  const KerrParams& params = trajectory.params();
  const ConservedSet& c = trajectory.conserved();
  const GeodesicState initial = trajectory.initial_state();

  const PolarizationState pol = initial_polarization(c1, c2, initial, c, params);
  const FrameVector f0 = polarization_vector(pol, initial, c, params);
  const CoordVector v0 = to_coord_components(frame(params, initial.point), f0);

  const TransportRun run = transport(v0, trajectory, tol, sample_s);

  const Vec2 in{c1, c2};
  std::vector<double> raw;
  raw.reserve(sample_s.size());
  for (std::size_t i = 0; i < sample_s.size(); ++i) {
    const GeodesicState st = trajectory.state(sample_s[i]);
    const FrameVector vf = to_frame_components(coframe(params, st.point), run.v[i]);
    const MeasurementBasis basis = measurement_basis(st, c, params);
    const Vec2 out = measure_in_basis(vf, basis);
    raw.push_back(rotation_angle(in, out));
  }
  return unwrap_angles(raw);
}

Mat4 axis_transport_generator(const KerrParams& params, const ConservedSet& c, double r,
                              int sign_r, int hemisphere) {
  const double M = params.mass, a = params.spin, E = c.energy;
  const double varsigma = r * r + a * a;
  const double D = delta_of(params, r);
  const double q = r * r - a * a;

  Mat4 A{};
  A[0][0] = -sign_r * E * M * q / (varsigma * D);
  A[0][1] = -E * M * q / (D * D);
  A[1][0] = -E * M * q / (varsigma * varsigma);
  A[1][1] = sign_r * E * M * q / (varsigma * D);
  A[2][2] = A[3][3] = -sign_r * E * r / varsigma;
  const double omega = 2.0 * E * M * a * r / (varsigma * D) * hemisphere;
  A[2][3] = -omega;
  A[3][2] = omega;
  return A;
}

}  // namespace kerrpol
