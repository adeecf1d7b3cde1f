#ifndef KERRPOL_GEOMETRY_HPP_
#define KERRPOL_GEOMETRY_HPP_

#include <utility>

#include "kerrpol/types.hpp"

namespace kerrpol {

// Pure evaluation of the geometric objects of the Kerr exterior at a point.
// All functions are deterministic and thread-safe.
//
// Conventions:
//   - signature (+,-,-,-); frame indices raised/lowered with eta.
//   - coframe rows are omega^a_i; the omega^2 leg keeps the
//     sin(theta)(a dt - (r^2+a^2) dphi)/sqrt(Sigma) orientation, so its
//     large-r limit is -phi oriented. All frame-component formulas downstream
//     assume this.

// (r_plus, r_minus), the two roots of Delta.
std::pair<double, double> horizon_radii(const KerrParams& params);

// (Sigma, Delta) at a point.
std::pair<double, double> scalars(const KerrParams& params, const SpacetimePoint& point);

double sigma_of(const KerrParams& params, double r, double theta);
double delta_of(const KerrParams& params, double r);

// Covariant metric g_ij in BL coordinates.
Mat4 metric_components(const KerrParams& params, const SpacetimePoint& point);

// Orthonormal symmetric coframe, rows omega^a, columns dx^i.
Mat4 coframe(const KerrParams& params, const SpacetimePoint& point);

// Dual frame, rows e_(a), columns coordinate components e_(a)^i.
// Satisfies sum_i coframe[a][i] * frame[b][i] = delta^a_b.
Mat4 frame(const KerrParams& params, const SpacetimePoint& point);

FrameVector to_frame_components(const Mat4& cof, const CoordVector& v);
CoordVector to_coord_components(const Mat4& fr, const FrameVector& v);

// Principal null directions (l, n) with g(l,l)=g(n,n)=0 and g(l,n)=1.
std::pair<CoordVector, CoordVector> principal_null_directions(const KerrParams& params,
                                                              const SpacetimePoint& point);

// All Christoffel symbols Gamma^i_jk, symmetric in (j,k).
struct Christoffel {
  double g[4][4][4];
  double operator()(int i, int j, int k) const { return g[i][j][k]; }
};

Christoffel christoffel(const KerrParams& params, const SpacetimePoint& point);
Christoffel christoffel_at(const KerrParams& params, double r, double theta);

// Killing-Yano tensor f_ab in frame components: f_01 = -a cos(theta), f_23 = r.
Mat4 killing_yano(const KerrParams& params, const SpacetimePoint& point);

// Hodge dual h_ab of the Killing-Yano tensor: h_01 = r, h_23 = a cos(theta).
Mat4 hodge_dual(const KerrParams& params, const SpacetimePoint& point);

// Carter's Killing tensor K_ij in coordinate components, K_ij = f_ik f^k_j.
Mat4 killing_tensor(const KerrParams& params, const SpacetimePoint& point);

}  // namespace kerrpol

#endif  // KERRPOL_GEOMETRY_HPP_
