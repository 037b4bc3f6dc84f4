#pragma once

// Asymptotic 2x2 reduction of the Bloch operator onto a colliding pair of
// modes {e^{inz}, e^{i(n+dn)z}} at a collision (k, xi0), for dn = 1 (through
// a^2) and dn = 2 (through a^4). Only direct coupling between the two modes
// enters; the Gram matrix is the identity.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "ostro/dispersion.hpp"
#include "ostro/errors.hpp"
#include "ostro/stokes_wave.hpp"

namespace ostro {

inline constexpr double kCollisionCheckTolerance = 1e-8;

struct ReducedPencil {
  Eigen::Matrix2cd B;
  Eigen::Matrix2cd I;
  double omega{};
  int order{};  // truncation power of a
  int n{};
  int m{};
  double xi0{};
};

struct DiscriminantResult {
  double value{};  // discriminant of the quadratic in mu
  std::array<std::complex<double>, 2> shifts{};
  bool unstable{};
  double growth_rate{};
};

namespace detail {

inline double checked_collision_omega(const StokesWave& wave, int n, int m, double xi0) {
  check_xi(xi0);
  const auto& p = wave.params;
  const double wn = omega(p, wave.c0, n + xi0);
  const double wm = omega(p, wave.c0, m + xi0);
  if (std::abs(wn - wm) > kCollisionCheckTolerance * std::max(1.0, std::abs(wn))) {
    throw error(errc::not_a_collision, "omega_{" + std::to_string(n) + "} - omega_{" +
                                           std::to_string(m) + "} = " + std::to_string(wn - wm) +
                                           " at xi = " + std::to_string(xi0));
  }
  return 0.5 * (wn + wm);
}

inline ReducedPencil make_pencil(double w, double d11, double d22, double b12, double b21,
                                 int order, int n, int m, double xi0) {
  const std::complex<double> i{0.0, 1.0};
  ReducedPencil out;
  out.B << i * (w + d11), i * b12, i * b21, i * (w + d22);
  out.I = Eigen::Matrix2cd::Identity();
  out.omega = w;
  out.order = order;
  out.n = n;
  out.m = m;
  out.xi0 = xi0;
  return out;
}

}  // namespace detail

inline ReducedPencil reduced_matrix_dn1(const StokesWave& wave, int n, double xi0, Amplitude amp) {
  const double w = detail::checked_collision_omega(wave, n, n + 1, xi0);
  const double k2 = wave.params.k * wave.params.k;
  const double a = amp.value();
  const double x = n + xi0;
  const double y = n + 1 + xi0;
  return detail::make_pencil(w, k2 * a * a * x * wave.c2, k2 * a * a * y * wave.c2,
                             -k2 * a * y, -k2 * a * x, 2, n, n + 1, xi0);
}

inline ReducedPencil reduced_matrix_dn2(const StokesWave& wave, int n, double xi0, Amplitude amp) {
  const double w = detail::checked_collision_omega(wave, n, n + 2, xi0);
  const double k2 = wave.params.k * wave.params.k;
  const double a2 = amp.value() * amp.value();
  const double diag = k2 * (a2 * wave.A2 + a2 * a2 * wave.c4);
  const double off = k2 * (a2 * wave.A2 + a2 * a2 * wave.A42);
  const double x = n + xi0;
  const double y = n + 2 + xi0;
  return detail::make_pencil(w, diag * x, diag * y, -off * y, -off * x, 4, n, n + 2, xi0);
}

/// Dispatches on m - n; pairs with |m - n| >= 3 are not analyzed.
inline ReducedPencil reduced_matrix(const StokesWave& wave, int n, int m, double xi0,
                                    Amplitude amp) {
  if (n > m) std::swap(n, m);
  switch (m - n) {
    case 1: return reduced_matrix_dn1(wave, n, xi0, amp);
    case 2: return reduced_matrix_dn2(wave, n, xi0, amp);
    default:
      throw error(errc::order_not_analyzed,
                  "no reduced pencil for dn = " + std::to_string(m - n));
  }
}

/// Roots mu of det(B - (i omega + i mu) I) = 0. Growth is the largest real
/// part of i mu, taken from the exact roots.
inline DiscriminantResult eigenvalue_shifts(const ReducedPencil& pencil) {
  const std::complex<double> i{0.0, 1.0};
  // With I the identity the equation is det(M - mu) = 0, M = (B - i omega) / i.
  const Eigen::Matrix2cd M = (pencil.B - i * pencil.omega * pencil.I) / i;
  const std::complex<double> tr = M.trace();
  const std::complex<double> det = M.determinant();
  const std::complex<double> disc = tr * tr - 4.0 * det;
  const std::complex<double> root = std::sqrt(disc);

  DiscriminantResult out;
  out.value = disc.real();
  out.shifts = {(tr + root) / 2.0, (tr - root) / 2.0};
  const double tol = 1e-12 * (std::norm(tr) + 4.0 * std::abs(det));
  out.unstable = out.value < -tol;
  out.growth_rate = 0.0;
  if (out.unstable) {
    for (const auto& mu : out.shifts) out.growth_rate = std::max(out.growth_rate, (i * mu).real());
  }
  return out;
}

/// Leading term 4 k^4 a^2 (n + xi0)(n + 1 + xi0).
inline double discriminant_dn1(const StokesWave& wave, int n, double xi0, Amplitude amp) {
  const double k2 = wave.params.k * wave.params.k;
  const double a = amp.value();
  return 4.0 * k2 * k2 * a * a * (n + xi0) * (n + 1 + xi0);
}

/// Leading term 4 k^4 a^4 A2^2 (n + xi0 + 1)^2, never negative.
inline double discriminant_dn2(const StokesWave& wave, int n, double xi0, Amplitude amp) {
  const double k2 = wave.params.k * wave.params.k;
  const double a2 = amp.value() * amp.value();
  const double s = n + xi0 + 1;
  return 4.0 * k2 * k2 * a2 * a2 * wave.A2 * wave.A2 * s * s;
}

/// k^2 |a| sqrt(-(n + xi0)(n + 1 + xi0)).
inline double predicted_growth_rate(const StokesWave& wave, int n, double xi0, Amplitude amp) {
  const double xy = (n + xi0) * (n + 1 + xi0);
  if (!(xy < 0.0)) {
    throw error(errc::not_unstable, "leading discriminant is non-negative");
  }
  const double k2 = wave.params.k * wave.params.k;
  return k2 * std::abs(amp.value()) * std::sqrt(-xy);
}

/// (4 gamma / beta)^(1/4); dn = 1 instability holds for k strictly above it.
inline double instability_threshold_dn1(double beta, double gamma) {
  if (!(beta > 0.0)) throw error(errc::wrong_dispersion_sign, "threshold requires beta > 0");
  if (!(gamma > 0.0)) throw error(errc::invalid_params, "gamma must be > 0");
  return std::pow(4.0 * gamma / beta, 0.25);
}

}  // namespace ostro
