#ifndef KERRPOL_PP_FRAME_HPP_
#define KERRPOL_PP_FRAME_HPP_

#include "kerrpol/geodesic.hpp"
#include "kerrpol/types.hpp"

namespace kerrpol {

// Closed-form parallel-propagated frame {K, X, Y, Z} along a null geodesic and
// its orthonormal repackaging L_(0)..L_(3). All components are given in the
// orthonormal symmetric frame; every sqrt(R), sqrt(Theta) occurrence carries
// the trajectory's branch sign. Requires kappa > 0.

struct BetaPair {
  double plus;   // (E^2 s^2 + Sigma) / 2
  double minus;  // (E^2 s^2 - Sigma) / 2
};

BetaPair beta_pair(const ConservedSet& c, const KerrParams& params, const GeodesicState& state);

// beta_K = E s
double beta_K(const ConservedSet& c, double s);

// beta_Y = (E^2 s^2 - r^2 + a^2 cos^2 theta) / (2 sqrt(kappa))
double beta_Y(const ConservedSet& c, const KerrParams& params, const GeodesicState& state);

FrameVector vector_Y(const GeodesicState& state, const ConservedSet& c, const KerrParams& params);
FrameVector vector_X(const GeodesicState& state, const ConservedSet& c, const KerrParams& params);
FrameVector vector_Z(const GeodesicState& state, const ConservedSet& c, const KerrParams& params);

struct ParallelFrame {
  FrameVector L0, L1, L2, L3;
};

// L0 = (K+X)/sqrt2, L1 = (K-X)/sqrt2, L2 = Y, L3 = Z; eta-orthonormal.
ParallelFrame parallel_frame(const GeodesicState& state, const ConservedSet& c,
                             const KerrParams& params);

// Scalar-product matrix of {K, X, Y, Z}; equals
// [[0,1,0,0],[1,0,0,0],[0,0,-1,0],[0,0,0,-1]] for a valid frame.
Mat4 product_matrix(const GeodesicState& state, const ConservedSet& c, const KerrParams& params);

}  // namespace kerrpol

#endif  // KERRPOL_PP_FRAME_HPP_
