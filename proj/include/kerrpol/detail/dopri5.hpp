#ifndef KERRPOL_DETAIL_DOPRI5_HPP_
#define KERRPOL_DETAIL_DOPRI5_HPP_

#include <array>
#include <cmath>
#include <cstddef>

namespace kerrpol::detail {

// Dormand-Prince 5(4) embedded pair with the standard 4th-order dense-output
// interpolant. F is f(s, y) -> y'; the FSAL stage k7 of an accepted step is
// the k1 of the next.

inline constexpr double kA21 = 1.0 / 5.0;
inline constexpr double kA31 = 3.0 / 40.0, kA32 = 9.0 / 40.0;
inline constexpr double kA41 = 44.0 / 45.0, kA42 = -56.0 / 15.0, kA43 = 32.0 / 9.0;
inline constexpr double kA51 = 19372.0 / 6561.0, kA52 = -25360.0 / 2187.0,
                        kA53 = 64448.0 / 6561.0, kA54 = -212.0 / 729.0;
inline constexpr double kA61 = 9017.0 / 3168.0, kA62 = -355.0 / 33.0, kA63 = 46732.0 / 5247.0,
                        kA64 = 49.0 / 176.0, kA65 = -5103.0 / 18656.0;
inline constexpr double kB1 = 35.0 / 384.0, kB3 = 500.0 / 1113.0, kB4 = 125.0 / 192.0,
                        kB5 = -2187.0 / 6784.0, kB6 = 11.0 / 84.0;
inline constexpr double kE1 = 71.0 / 57600.0, kE3 = -71.0 / 16695.0, kE4 = 71.0 / 1920.0,
                        kE5 = -17253.0 / 339200.0, kE6 = 22.0 / 525.0, kE7 = -1.0 / 40.0;
inline constexpr double kC2 = 1.0 / 5.0, kC3 = 3.0 / 10.0, kC4 = 4.0 / 5.0, kC5 = 8.0 / 9.0;
inline constexpr double kD1 = -12715105075.0 / 11282082432.0,
                        kD3 = 87487479700.0 / 32700410799.0,
                        kD4 = -10690763975.0 / 1880347072.0,
                        kD5 = 701980252875.0 / 199316789632.0,
                        kD6 = -1453857185.0 / 822651844.0, kD7 = 69997945.0 / 29380423.0;

template <std::size_t N>
struct StepOut {
  std::array<double, N> y1;
  std::array<double, N> k7;
  double err;  // scaled RMS error estimate; accept when <= 1
  std::array<std::array<double, N>, 5> rcont;
  bool finite;
};

template <std::size_t N, class F>
StepOut<N> dopri5_step(double s, const std::array<double, N>& y0, const std::array<double, N>& k1,
                       double h, double tol, F&& f) {
  using Arr = std::array<double, N>;
  Arr ytmp, k2, k3, k4, k5, k6;

  for (std::size_t i = 0; i < N; ++i) ytmp[i] = y0[i] + h * kA21 * k1[i];
  k2 = f(s + kC2 * h, ytmp);
  for (std::size_t i = 0; i < N; ++i) ytmp[i] = y0[i] + h * (kA31 * k1[i] + kA32 * k2[i]);
  k3 = f(s + kC3 * h, ytmp);
  for (std::size_t i = 0; i < N; ++i)
    ytmp[i] = y0[i] + h * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
  k4 = f(s + kC4 * h, ytmp);
  for (std::size_t i = 0; i < N; ++i)
    ytmp[i] = y0[i] + h * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] + kA54 * k4[i]);
  k5 = f(s + kC5 * h, ytmp);
  for (std::size_t i = 0; i < N; ++i)
    ytmp[i] =
        y0[i] + h * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] + kA64 * k4[i] + kA65 * k5[i]);
  k6 = f(s + h, ytmp);

  StepOut<N> out{};
  for (std::size_t i = 0; i < N; ++i)
    out.y1[i] =
        y0[i] + h * (kB1 * k1[i] + kB3 * k3[i] + kB4 * k4[i] + kB5 * k5[i] + kB6 * k6[i]);
  out.k7 = f(s + h, out.y1);

  double err2 = 0.0;
  out.finite = true;
  for (std::size_t i = 0; i < N; ++i) {
    const double e = h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] + kE5 * k5[i] + kE6 * k6[i] +
                          kE7 * out.k7[i]);
    const double sc = tol + tol * std::max(std::abs(y0[i]), std::abs(out.y1[i]));
    err2 += (e / sc) * (e / sc);
    out.finite = out.finite && std::isfinite(out.y1[i]) && std::isfinite(out.k7[i]);
  }
  out.err = std::sqrt(err2 / static_cast<double>(N));

  for (std::size_t i = 0; i < N; ++i) {
    const double dy = out.y1[i] - y0[i];
    const double bspl = h * k1[i] - dy;
    out.rcont[0][i] = y0[i];
    out.rcont[1][i] = dy;
    out.rcont[2][i] = bspl;
    out.rcont[3][i] = dy - h * out.k7[i] - bspl;
    out.rcont[4][i] = h * (kD1 * k1[i] + kD3 * k3[i] + kD4 * k4[i] + kD5 * k5[i] + kD6 * k6[i] +
                           kD7 * out.k7[i]);
  }
  return out;
}

template <std::size_t N>
std::array<double, N> dense_eval(const std::array<std::array<double, N>, 5>& rc, double theta) {
  std::array<double, N> y;
  const double th1 = 1.0 - theta;
  for (std::size_t i = 0; i < N; ++i)
    y[i] = rc[0][i] + theta * (rc[1][i] + th1 * (rc[2][i] + theta * (rc[3][i] + th1 * rc[4][i])));
  return y;
}

}  // namespace kerrpol::detail

#endif  // KERRPOL_DETAIL_DOPRI5_HPP_
