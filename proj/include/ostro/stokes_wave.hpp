#pragma once

// Small-amplitude periodic traveling waves of the Ostrovsky equation
//
//   (u_t - beta u_xxx + (u^2)_x)_x = gamma u
//
// written in the co-moving, rescaled variable z = k(x - ct) so that the
// profile w(z) is 2*pi periodic and solves
//
//   c k^2 w'' + beta k^4 w'''' - k^2 (w^2)'' + gamma w = 0.
//
// The wave is the fourth-order amplitude expansion about the n = 1 branch
// c0 = gamma/k^2 + beta k^2; no Newton refinement is applied.

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "ostro/errors.hpp"

namespace ostro {

inline constexpr double kResonanceExclusion = 1e-6;
inline constexpr double kDefaultAmplitudeMax = 0.1;

struct PhysicalParams {
  double beta{1.0};
  double gamma{1.0};
  double k{1.0};
};

/// Checks gamma > 0, k > 0, beta != 0 (all finite).
inline void validate(const PhysicalParams& p) {
  if (!std::isfinite(p.beta) || !std::isfinite(p.gamma) || !std::isfinite(p.k)) {
    throw error(errc::invalid_params, "parameters must be finite");
  }
  if (!(p.gamma > 0.0)) throw error(errc::invalid_params, "gamma must be > 0");
  if (!(p.k > 0.0)) throw error(errc::invalid_params, "k must be > 0");
  if (p.beta == 0.0) throw error(errc::invalid_params, "beta must be nonzero");
}

/// Harmonic index n >= 2 whose resonant wavenumber (gamma/(beta n^2))^(1/4)
/// lies within relative distance `radius` of p.k, or 0 if none does.
/// Always 0 for beta < 0.
inline int resonant_harmonic(const PhysicalParams& p, double radius = kResonanceExclusion) {
  if (p.beta <= 0.0) return 0;
  // k_n = (gamma/beta)^(1/4) / sqrt(n), so the nearest candidates bracket n*.
  const double n_star = std::sqrt(p.gamma / (p.beta * std::pow(p.k, 4)));
  const double base = std::floor(n_star);
  for (double n : {base, base + 1.0}) {
    if (n < 2.0) continue;
    const double kn = std::pow(p.gamma / (p.beta * n * n), 0.25);
    if (std::abs(p.k - kn) <= radius * kn) return static_cast<int>(n);
  }
  return 0;
}

inline void check_resonance(const PhysicalParams& p, double radius = kResonanceExclusion) {
  if (const int n = resonant_harmonic(p, radius); n != 0) {
    throw error(errc::resonant_wavenumber,
                "k = " + std::to_string(p.k) + " resonates with harmonic n = " + std::to_string(n));
  }
}

inline double phase_speed_c0(const PhysicalParams& p) {
  return p.gamma / (p.k * p.k) + p.beta * p.k * p.k;
}

/// Resonant wavenumbers for 2 <= n <= n_max, in decreasing order; empty when beta < 0.
inline std::vector<double> resonant_wavenumbers(const PhysicalParams& p, int n_max) {
  std::vector<double> out;
  if (p.beta <= 0.0) return out;
  for (int n = 2; n <= n_max; ++n) {
    out.push_back(std::pow(p.gamma / (p.beta * n * n), 0.25));
  }
  return out;
}

/// Expansion coefficients of
///   w = a cos z + a^2 A2 cos 2z + a^3 A3 cos 3z + a^4 (A42 cos 2z + A44 cos 4z)
///   c = c0 + a^2 c2 + a^4 c4
struct StokesWave {
  PhysicalParams params;
  double c0{};
  double A2{};
  double A3{};
  double A42{};
  double A44{};
  double c2{};
  double c4{};
};

inline StokesWave stokes_coefficients(const PhysicalParams& p,
                                      double exclusion_radius = kResonanceExclusion) {
  validate(p);
  check_resonance(p, exclusion_radius);

  const double k2 = p.k * p.k;
  const double k4 = k2 * k2;
  const double d2 = 3.0 * p.gamma - 12.0 * p.beta * k4;
  const double d3 = 8.0 * p.gamma - 72.0 * p.beta * k4;
  const double d4 = 15.0 * p.gamma - 240.0 * p.beta * k4;
  if (d2 == 0.0 || d3 == 0.0 || d4 == 0.0) {
    throw error(errc::resonant_wavenumber, "vanishing harmonic denominator");
  }

  StokesWave w;
  w.params = p;
  w.c0 = phase_speed_c0(p);
  w.A2 = 2.0 * k2 / d2;
  w.A3 = 9.0 * k2 * w.A2 / d3;
  const double A2_cubed = w.A2 * w.A2 * w.A2;
  w.A42 = 2.0 * w.A2 * w.A3 - 2.0 * A2_cubed;
  w.A44 = 8.0 * k2 * (w.A2 * w.A2 + 2.0 * w.A3) / d4;
  w.c2 = w.A2;
  w.c4 = 3.0 * w.A2 * w.A3 - 2.0 * A2_cubed;
  return w;
}

/// Amplitude parameter with its validity bound |a| <= a_max.
class Amplitude {
 public:
  explicit Amplitude(double a, double a_max = kDefaultAmplitudeMax) : a_(a), a_max_(a_max) {
    if (!std::isfinite(a) || !(std::abs(a) <= a_max)) {
      throw error(errc::amplitude_out_of_range,
                  "|a| = " + std::to_string(std::abs(a)) + " exceeds " + std::to_string(a_max));
    }
  }

  double value() const noexcept { return a_; }
  double max() const noexcept { return a_max_; }

 private:
  double a_;
  double a_max_;
};

/// Coefficient of cos(j z) in the truncated profile, j = 0..4 (j = 0 is always zero).
inline std::array<double, 5> profile_harmonics(const StokesWave& w, Amplitude amp) {
  const double a = amp.value();
  const double a2 = a * a;
  return {0.0, a, a2 * w.A2 + a2 * a2 * w.A42, a2 * a * w.A3, a2 * a2 * w.A44};
}

inline double eval_profile(const StokesWave& w, Amplitude amp, double z) {
  const auto h = profile_harmonics(w, amp);
  double s = 0.0;
  for (int j = 1; j < 5; ++j) s += h[j] * std::cos(j * z);
  return s;
}

inline double eval_speed(const StokesWave& w, Amplitude amp) {
  const double a2 = amp.value() * amp.value();
  return w.c0 + a2 * w.c2 + a2 * a2 * w.c4;
}

/// Discrete L2(T) norm of F(w, c; k) on a uniform grid of [0, 2 pi), with w and
/// c taken from the truncated expansion. Derivatives are exact derivatives of
/// the cosine series and (w^2)'' = 2 (w'^2 + w w''). Scales as O(a^5).
inline double residual_F(const StokesWave& w, Amplitude amp, int grid_size = 256) {
  if (grid_size < 64) throw error(errc::invalid_params, "residual grid needs >= 64 points");
  const auto& p = w.params;
  const auto h = profile_harmonics(w, amp);
  const double c = eval_speed(w, amp);
  const double k2 = p.k * p.k;
  const double k4 = k2 * k2;

  double sum_sq = 0.0;
  for (int i = 0; i < grid_size; ++i) {
    const double z = 2.0 * std::numbers::pi * i / grid_size;
    double u = 0.0, u1 = 0.0, u2 = 0.0, u4 = 0.0;
    for (int j = 1; j < 5; ++j) {
      const double cj = std::cos(j * z);
      const double sj = std::sin(j * z);
      const double jj = static_cast<double>(j * j);
      u += h[j] * cj;
      u1 -= j * h[j] * sj;
      u2 -= jj * h[j] * cj;
      u4 += jj * jj * h[j] * cj;
    }
    const double sq2 = 2.0 * (u1 * u1 + u * u2);
    const double F = c * k2 * u2 + p.beta * k4 * u4 - k2 * sq2 + p.gamma * u;
    sum_sq += F * F;
  }
  return std::sqrt(sum_sq / grid_size);
}

}  // namespace ostro
