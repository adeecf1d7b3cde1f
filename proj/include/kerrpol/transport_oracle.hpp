#ifndef KERRPOL_TRANSPORT_ORACLE_HPP_
#define KERRPOL_TRANSPORT_ORACLE_HPP_

#include <cstddef>
#include <vector>

#include "kerrpol/geodesic.hpp"
#include "kerrpol/types.hpp"

namespace kerrpol {

// Independent brute-force verifier: integrates the parallel-transport ODE
//   dV^i/ds + Gamma^i_jk K^j V^k = 0
// in coordinate components along the trajectory's dense output, deliberately
// sharing no code path with the closed-form frame expressions it validates.

struct TransportRun {
  std::vector<double> s;
  std::vector<CoordVector> v;
  double max_norm_drift;     // relative drift of g(V,V)
  double max_tangent_drift;  // drift of g(V,K), normalized
};

// Transports v0 (given at the trajectory start) and records V at sample_s.
// sample_s must be increasing and within [s_begin, s_end].
TransportRun transport(const CoordVector& v0, const Trajectory& trajectory, double tol,
                       const std::vector<double>& sample_s);

TransportRun transport(const CoordVector& v0, const Trajectory& trajectory, double tol,
                       std::size_t sample_count = 512);

// Oracle Faraday angle: builds the polarization vector from (c1, c2) in the
// measurement basis at s = 0, transports it, re-measures at each sample, and
// unwraps. Requires kappa > 0 and a defined basis at every sample.
std::vector<double> faraday_numeric(double c1, double c2, const Trajectory& trajectory,
                                    double tol, const std::vector<double>& sample_s);

// Uniformly spaced sample parameters over the trajectory span.
std::vector<double> uniform_samples(const Trajectory& trajectory, std::size_t count);

// Transport generator dV/ds = A V on the symmetry axis, in the regular
// transverse chart (t, r, xi, upsilon) with xi = theta cos(phi),
// upsilon = theta sin(phi) (hemisphere = +1 north, -1 south flips the
// transverse orientation). The BL chart is singular there; this closed form
// is the axis limit, cross-checked in tests against finite-difference
// Christoffels of the regular chart evaluated off-axis.
Mat4 axis_transport_generator(const KerrParams& params, const ConservedSet& c, double r,
                              int sign_r, int hemisphere);

}  // namespace kerrpol

#endif  // KERRPOL_TRANSPORT_ORACLE_HPP_
