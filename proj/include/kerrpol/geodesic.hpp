#ifndef KERRPOL_GEODESIC_HPP_
#define KERRPOL_GEODESIC_HPP_

#include <cstddef>
#include <vector>

#include "kerrpol/geometry.hpp"
#include "kerrpol/types.hpp"

namespace kerrpol {

// Conserved quantities of a null geodesic.
struct ConservedSet {
  double energy;            // E  = p_t
  double angular_momentum;  // Phi = -p_phi
  double carter;            // kappa, Carter's fourth integral
};

// Carter-separated potentials at (r, theta):
//   radial_momentum  P(r)     = E (r^2+a^2) - a Phi
//   polar_momentum   D(theta) = a E sin(theta) - Phi / sin(theta)
//   radial           R(r)     = P^2 - Delta * kappa
//   polar            Theta    = kappa - D^2
struct Potentials {
  double radial;
  double polar;
  double radial_momentum;
  double polar_momentum;
};

Potentials potentials(const ConservedSet& c, const KerrParams& params, double r, double theta);

// Natural magnitudes used for relative comparisons of R and Theta against 0.
double radial_potential_scale(const ConservedSet& c, const KerrParams& params, double r);
double polar_potential_scale(const ConservedSet& c, const KerrParams& params, double theta);

// State along a null geodesic. sign_r, sign_theta in {-1, +1} select the
// branch of +-sqrt(R), +-sqrt(Theta); s is the affine parameter with s = 0 at
// the emission event.
struct GeodesicState {
  SpacetimePoint point;
  int sign_r;
  int sign_theta;
  double s;
};

// Coordinate velocity (tdot, rdot, thetadot, phidot) at a state. Throws
// precondition_error if R or Theta is negative beyond -1e-12 * scale.
CoordVector rhs(const GeodesicState& state, const ConservedSet& c, const KerrParams& params);

// Tangent in symmetric-frame components,
//   K = (P/sqrt(Delta), sign_r sqrt(R)/sqrt(Delta), D, sign_theta sqrt(Theta)) / sqrt(Sigma).
FrameVector tangent_frame_components(const GeodesicState& state, const ConservedSet& c,
                                     const KerrParams& params);

struct IntegrationControl {
  double s_max = 100.0;
  double tol = 1e-10;
  // stop when r <= r_plus * (1 + horizon_margin)
  double horizon_margin = 1e-6;
  // stop when r >= escape_radius; 0 selects the default 1000*M
  double escape_radius = 0.0;
  std::size_t max_steps = 2000000;
};

enum class StopReason { ReachedSMax, ReachedHorizon, Escaped };

enum class TurningKind { Radial, Polar };

struct TurningEvent {
  double s;
  TurningKind kind;
};

// One accepted integrator step with its dense-output coefficients.
struct TrajectoryStep {
  double s0;
  double h;
  Vec4 y0;                       // (t, r, theta, phi) at s0
  std::array<Vec4, 5> rcont;     // dense-output interpolant coefficients
  int sign_r;
  int sign_theta;
};

// Dense, event-aware result of integrating a null geodesic.
class Trajectory {
 public:
  Trajectory(KerrParams params, ConservedSet conserved, GeodesicState initial,
             std::vector<TrajectoryStep> steps, std::vector<TurningEvent> events,
             StopReason reason);

  const KerrParams& params() const { return params_; }
  const ConservedSet& conserved() const { return conserved_; }
  const GeodesicState& initial_state() const { return initial_; }
  const std::vector<TrajectoryStep>& steps() const { return steps_; }
  const std::vector<TurningEvent>& events() const { return events_; }
  StopReason stop_reason() const { return reason_; }

  double s_begin() const;
  double s_end() const;

  // Interpolated state at affine parameter s (clamped to [s_begin, s_end]).
  GeodesicState state(double s) const;

  // States at the accepted step endpoints, including the initial point.
  std::vector<GeodesicState> accepted_states() const;

 private:
  KerrParams params_;
  ConservedSet conserved_;
  GeodesicState initial_;
  std::vector<TrajectoryStep> steps_;
  std::vector<TurningEvent> events_;
  StopReason reason_;
};

Trajectory integrate(const GeodesicState& initial, const ConservedSet& c,
                     const KerrParams& params, const IntegrationControl& control);

// Diagnostics recomputed from the metric along a state: the contraction
// g_ij xdot^i xdot^j (null residual) and the conserved set re-derived from
// Killing vectors / Killing tensor.
struct StateDiagnostics {
  double null_residual;
  double energy;
  double angular_momentum;
  double carter;
};

StateDiagnostics diagnostics(const GeodesicState& state, const ConservedSet& c,
                             const KerrParams& params);

}  // namespace kerrpol

#endif  // KERRPOL_GEODESIC_HPP_
