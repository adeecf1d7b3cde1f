#ifndef KERRPOL_POLARIZATION_HPP_
#define KERRPOL_POLARIZATION_HPP_

#include <cstddef>
#include <vector>

#include "kerrpol/geodesic.hpp"
#include "kerrpol/pp_frame.hpp"
#include "kerrpol/types.hpp"

namespace kerrpol {

// Carter observers, the 1+3 projection, the intrinsic measurement basis, and
// the closed-form Faraday rotation chi.
//
// Angle convention: chi is the angle in
//     chi = atan2(a (r cos(theta0) - r0 cos(theta)), r r0 + a^2 cos(theta0) cos(theta)),
// equivalently atan2(M12, M11) of rotation_matrix(); the transport oracle
// extracts angles with the same orientation so the two routes are comparable.

using ThreeVector = std::array<double, 3>;
using Vec2 = std::array<double, 2>;
using Mat2 = std::array<std::array<double, 2>, 2>;

double dot3(const ThreeVector& u, const ThreeVector& v);
double norm3(const ThreeVector& v);
ThreeVector cross3(const ThreeVector& u, const ThreeVector& v);

// Carter observer U = ((r^2+a^2) d_t + a d_phi)/sqrt(Sigma Delta); unit
// timelike everywhere outside the horizon, ergosphere included.
CoordVector carter_observer(const KerrParams& params, const SpacetimePoint& point);

// 1+3 projection onto the observer's spatial triad: drops the 0-component.
ThreeVector project(const FrameVector& v);

struct MeasurementBasis {
  ThreeVector b1;
  ThreeVector b2;
};

// Closed-form basis
//   b1 = (0, -sqrt(Theta), D)/sqrt(kappa)
//   b2 = (-kappa sqrt(Delta), D sqrt(R), sqrt(R Theta))/(sqrt(kappa) P)
// with branch signs on the roots. Requires kappa > 0 and P != 0.
MeasurementBasis measurement_basis(const GeodesicState& state, const ConservedSet& c,
                                   const KerrParams& params);

// Same basis built from the cross-product prescription: b1 ~ lhat x Khat,
// b2 ~ b1 x Khat (orientation fixed so the closed forms are reproduced).
MeasurementBasis measurement_basis_from_cross(const GeodesicState& state, const ConservedSet& c,
                                              const KerrParams& params);

// Projections of the parallel-propagated legs Y, Z onto the measurement basis:
//   yhat = (-a cos(theta), r)/sqrt(Sigma), zhat = (-r, -a cos(theta))/sqrt(Sigma).
// Independent of s.
std::pair<Vec2, Vec2> projected_pp_basis(const GeodesicState& state, const KerrParams& params);

// Constant components of the polarization vector in the parallel frame L_(a).
struct PolarizationState {
  double c1, c2;                 // measured components at s = 0
  FrameVector frame_components;  // f^(a), constant along the ray
};

PolarizationState initial_polarization(double c1, double c2, const GeodesicState& initial,
                                       const ConservedSet& c, const KerrParams& params);

// Polarization vector in symmetric-frame components at a state:
// f(s) = f^(a) L_(a)(s).
FrameVector polarization_vector(const PolarizationState& pol, const GeodesicState& state,
                                const ConservedSet& c, const KerrParams& params);

// Measured components (f . b1, f . b2) of a frame vector's projection.
Vec2 measure_in_basis(const FrameVector& v, const MeasurementBasis& basis);

// Rotation angle carrying (d1_in, d2_in) to (d1_out, d2_out) in the pinned
// convention; range (-pi, pi].
double rotation_angle(const Vec2& in, const Vec2& out);

// Closed-form Faraday rotation between two events.
double faraday_angle(const SpacetimePoint& from, const SpacetimePoint& to,
                     const KerrParams& params);

// Transfer matrix of measured components, orthogonal with determinant 1.
Mat2 rotation_matrix(const SpacetimePoint& from, const SpacetimePoint& to,
                     const KerrParams& params);

// Critical-point residual r/sqrt(R) + cot(theta)/sqrt(Theta) with branch
// signs; NaN (indeterminate) within tolerance of a turning point.
double critical_point_residual(const GeodesicState& state, const ConservedSet& c,
                               const KerrParams& params);

// Accumulates 2*pi jumps so consecutive samples differ by < pi.
std::vector<double> unwrap_angles(const std::vector<double>& raw);

struct RotationSample {
  double s, r, theta, phi;
  double chi;                // closed form, unwrapped along the curve
  double critical_residual;  // NaN near turning points
};

std::vector<RotationSample> faraday_curve(const Trajectory& trajectory,
                                          std::size_t sample_count);

// s-values of the critical points of chi, located by bisection on sign
// changes of the residual between samples (turning-point segments skipped).
std::vector<double> locate_critical_points(const Trajectory& trajectory,
                                           std::size_t sample_count);

// chi(s) for an orbit confined to the symmetry axis (Phi = 0, theta
// identically 0 or pi), where the BL chart and the (b1, b2) protocol both
// degenerate: the polarization and a reference normal are transported through
// the regular transverse chart and chi is the angle between them. Sampled at
// the transport integrator's accepted steps; rejects non-axial trajectories.
std::vector<std::pair<double, double>> axis_rotation_curve(const Trajectory& trajectory,
                                                           double tol = 1e-10);

// max |chi| of axis_rotation_curve; the zero-rotation theorem says 0.
double check_zero_rotation_axis(const Trajectory& trajectory, double tol = 1e-10);

}  // namespace kerrpol

#endif  // KERRPOL_POLARIZATION_HPP_
