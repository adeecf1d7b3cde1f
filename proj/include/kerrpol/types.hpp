#ifndef KERRPOL_TYPES_HPP_
#define KERRPOL_TYPES_HPP_

#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kerrpol {

// Thrown when input violates a documented precondition (CLI exit code 2).
class precondition_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Thrown when the integrator cannot make progress, e.g. asymptotic approach
// to a degenerate (double) root of R or Theta (CLI exit code 4).
class stalled_orbit_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

using Vec4 = std::array<double, 4>;
using Mat4 = std::array<std::array<double, 4>, 4>;

// Kerr family parameters in geometric units, non-extreme case M > a >= 0.
struct KerrParams {
  double mass;  // M
  double spin;  // a, angular momentum per unit mass

  KerrParams(double M, double a) : mass(M), spin(a) {
    if (!(M > 0.0)) throw precondition_error("KerrParams: M must be positive");
    if (!(a >= 0.0)) throw precondition_error("KerrParams: a must be non-negative");
    if (!(M > a))
      throw precondition_error("KerrParams: extreme or super-extreme case M <= a rejected");
  }

  double horizon_outer() const { return mass + std::sqrt(mass * mass - spin * spin); }
  double horizon_inner() const { return mass - std::sqrt(mass * mass - spin * spin); }
  // Stationary limit surface r_s(theta).
  double ergosphere_radius(double theta) const {
    const double c = std::cos(theta);
    return mass + std::sqrt(mass * mass - spin * spin * c * c);
  }
};

// Boyer-Lindquist event restricted to the exterior r > r_+.
struct SpacetimePoint {
  double t, r, theta, phi;

  SpacetimePoint(const KerrParams& params, double t_, double r_, double theta_, double phi_)
      : t(t_), r(r_), theta(theta_), phi(normalize_phi(phi_)) {
    if (!(r > params.horizon_outer()))
      throw precondition_error("SpacetimePoint: r must exceed the outer horizon radius");
    if (!(theta >= 0.0 && theta <= M_PI))
      throw precondition_error("SpacetimePoint: theta outside [0, pi]");
  }

  static double normalize_phi(double phi) {
    const double two_pi = 2.0 * M_PI;
    double p = std::fmod(phi, two_pi);
    if (p < 0.0) p += two_pi;
    return p;
  }
};

// Components in the orthonormal symmetric frame, index a in {0,1,2,3};
// inner products taken with eta = diag(1,-1,-1,-1).
struct FrameVector {
  Vec4 c{};
  double& operator[](int a) { return c[static_cast<std::size_t>(a)]; }
  double operator[](int a) const { return c[static_cast<std::size_t>(a)]; }
};

// Components in Boyer-Lindquist coordinates, index order (t, r, theta, phi).
struct CoordVector {
  Vec4 c{};
  double& operator[](int i) { return c[static_cast<std::size_t>(i)]; }
  double operator[](int i) const { return c[static_cast<std::size_t>(i)]; }
};

inline double eta_inner(const FrameVector& u, const FrameVector& v) {
  return u[0] * v[0] - u[1] * v[1] - u[2] * v[2] - u[3] * v[3];
}

inline FrameVector operator+(const FrameVector& u, const FrameVector& v) {
  return {{{u[0] + v[0], u[1] + v[1], u[2] + v[2], u[3] + v[3]}}};
}

inline FrameVector operator-(const FrameVector& u, const FrameVector& v) {
  return {{{u[0] - v[0], u[1] - v[1], u[2] - v[2], u[3] - v[3]}}};
}

inline FrameVector operator*(double k, const FrameVector& v) {
  return {{{k * v[0], k * v[1], k * v[2], k * v[3]}}};
}

inline CoordVector operator+(const CoordVector& u, const CoordVector& v) {
  return {{{u[0] + v[0], u[1] + v[1], u[2] + v[2], u[3] + v[3]}}};
}

inline CoordVector operator*(double k, const CoordVector& v) {
  return {{{k * v[0], k * v[1], k * v[2], k * v[3]}}};
}

}  // namespace kerrpol

#endif  // KERRPOL_TYPES_HPP_
