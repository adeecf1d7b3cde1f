#include "kerrpol/pp_frame.hpp"

#include <cmath>

namespace kerrpol {

namespace {

void require_carter(const ConservedSet& c) {
  if (!(c.carter > 1e-12))
    throw precondition_error("pp-frame: kappa must be positive (frame divides by sqrt(kappa))");
}

// Common ingredients of the closed-form frame legs at one state.
struct FrameTerms {
  double sqD;      // sqrt(Delta)
  double S;        // Sigma
  double P, Dd;    // radial / polar momentum factors
  double sqR, sqT; // branch-signed square roots of R, Theta
  double ac;       // a cos(theta)
  double Es;       // E * s
};

FrameTerms terms(const GeodesicState& state, const ConservedSet& c, const KerrParams& params) {
  const Potentials pot = potentials(c, params, state.point.r, state.point.theta);
  FrameTerms f;
  f.sqD = std::sqrt(delta_of(params, state.point.r));
  f.S = sigma_of(params, state.point.r, state.point.theta);
  f.P = pot.radial_momentum;
  f.Dd = pot.polar_momentum;
  f.sqR = state.sign_r * std::sqrt(std::max(pot.radial, 0.0));
  f.sqT = state.sign_theta * std::sqrt(std::max(pot.polar, 0.0));
  f.ac = params.spin * std::cos(state.point.theta);
  f.Es = c.energy * state.s;
  return f;
}

}  // namespace

BetaPair beta_pair(const ConservedSet& c, const KerrParams& params, const GeodesicState& state) {
  const double es2 = c.energy * c.energy * state.s * state.s;
  const double S = sigma_of(params, state.point.r, state.point.theta);
  return {0.5 * (es2 + S), 0.5 * (es2 - S)};
}

double beta_K(const ConservedSet& c, double s) { return c.energy * s; }

double beta_Y(const ConservedSet& c, const KerrParams& params, const GeodesicState& state) {
  require_carter(c);
  const double es2 = c.energy * c.energy * state.s * state.s;
  const double ac = params.spin * std::cos(state.point.theta);
  return (es2 - state.point.r * state.point.r + ac * ac) / (2.0 * std::sqrt(c.carter));
}

FrameVector vector_Y(const GeodesicState& state, const ConservedSet& c, const KerrParams& params) {
  require_carter(c);
  const FrameTerms f = terms(state, c, params);
  const double r = state.point.r;
  const double n = 1.0 / std::sqrt(c.carter * f.S);
  return {{{n * (f.Es * f.P - r * f.sqR) / f.sqD, n * (f.Es * f.sqR - r * f.P) / f.sqD,
            n * (f.Es * f.Dd + f.ac * f.sqT), n * (f.Es * f.sqT - f.ac * f.Dd)}}};
}

FrameVector vector_X(const GeodesicState& state, const ConservedSet& c, const KerrParams& params) {
  require_carter(c);
  const FrameTerms f = terms(state, c, params);
  const BetaPair b = beta_pair(c, params, state);
  const double r = state.point.r;
  const double n = 1.0 / (c.carter * std::sqrt(f.S));
  return {{{n * (f.P * b.plus - r * f.Es * f.sqR) / f.sqD,
            n * (f.sqR * b.plus - r * f.Es * f.P) / f.sqD,
            n * (f.Dd * b.minus + f.ac * f.Es * f.sqT),
            n * (f.sqT * b.minus - f.ac * f.Es * f.Dd)}}};
}

FrameVector vector_Z(const GeodesicState& state, const ConservedSet& c, const KerrParams& params) {
  require_carter(c);
  const FrameTerms f = terms(state, c, params);
  const double r = state.point.r;
  const double n = 1.0 / std::sqrt(c.carter * f.S);
  return {{{n * f.ac * f.sqR / f.sqD, n * f.ac * f.P / f.sqD, n * r * f.sqT, -n * r * f.Dd}}};
}

ParallelFrame parallel_frame(const GeodesicState& state, const ConservedSet& c,
                             const KerrParams& params) {
  const FrameVector K = tangent_frame_components(state, c, params);
  const FrameVector X = vector_X(state, c, params);
  const double inv_sq2 = 1.0 / std::sqrt(2.0);
  return {inv_sq2 * (K + X), inv_sq2 * (K - X), vector_Y(state, c, params),
          vector_Z(state, c, params)};
}

Mat4 product_matrix(const GeodesicState& state, const ConservedSet& c, const KerrParams& params) {
  const FrameVector v[4] = {tangent_frame_components(state, c, params),
                            vector_X(state, c, params), vector_Y(state, c, params),
                            vector_Z(state, c, params)};
  Mat4 m{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = eta_inner(v[i], v[j]);
  return m;
}

}  // namespace kerrpol
