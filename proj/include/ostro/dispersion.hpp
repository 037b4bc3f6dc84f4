#pragma once

// Unperturbed Bloch dispersion omega_{n,xi}, eigenvalue collisions
// omega_{n,xi} = omega_{m,xi} and their Krein signatures.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "ostro/errors.hpp"
#include "ostro/stokes_wave.hpp"

namespace ostro {

inline constexpr double kPoleTolerance = 1e-14;
inline constexpr double kSignatureTolerance = 1e-10;
inline constexpr double kXiRootTolerance = 1e-12;
inline constexpr int kXiBracketPoints = 4096;  // grid i / 8192, i = 1..4096

/// Mode n with Floquet exponent xi in (0, 1/2].
struct BlochIndex {
  int n{};
  double xi{0.5};

  double x() const noexcept { return n + xi; }
};

inline void check_xi(double xi) {
  if (!(xi > 0.0 && xi <= 0.5)) {
    throw error(errc::xi_out_of_range, "xi = " + std::to_string(xi) + " not in (0, 1/2]");
  }
}

/// k^2 x (c - beta k^2 x^2) - gamma / x, the frequency of e^{i n z} at x = n + xi.
inline double omega(const PhysicalParams& p, double c, double x) {
  if (std::abs(x) < kPoleTolerance) throw error(errc::division_by_zero, "omega at x = 0");
  const double k2 = p.k * p.k;
  return k2 * x * (c - p.beta * k2 * x * x) - p.gamma / x;
}

inline double unperturbed_omega(const PhysicalParams& p, const BlochIndex& idx) {
  return omega(p, phase_speed_c0(p), idx.x());
}

/// Collision function: k^4 = (gamma dn / beta) K(x, dn) at a collision of modes x and x + dn.
inline double collision_K(double x, int dn) {
  if (dn < 1) throw error(errc::invalid_params, "dn must be positive");
  const double y = x + dn;
  if (dn == 2) {
    // 1 + xy = (x + 1)^2 cancels the zero of the cubic at x = -1.
    if (std::abs(x) < kPoleTolerance || std::abs(y) < kPoleTolerance) {
      throw error(errc::singularity, "K(x, 2) singular at x = " + std::to_string(x));
    }
    return 1.0 / (6.0 * x * y);
  }
  const double cubic = y * y * y - x * x * x - dn;
  if (std::abs(x) < kPoleTolerance || std::abs(y) < kPoleTolerance ||
      std::abs(cubic) < kPoleTolerance) {
    throw error(errc::singularity, "K(x, dn) singular at x = " + std::to_string(x));
  }
  return (1.0 + x * y) / (x * y * cubic);
}

/// Carrier wavenumber at which modes n and m collide with Floquet exponent xi,
/// if one exists for this sign of beta. Only the sign of beta decides existence;
/// its magnitude scales the value.
inline std::optional<double> collision_wavenumber(double beta, double gamma, int n, int m,
                                                  double xi) {
  if (n == m) throw error(errc::invalid_params, "n and m must differ");
  if (n > m) std::swap(n, m);
  const int dn = m - n;
  const double k4 = gamma * dn / beta * collision_K(n + xi, dn);
  if (!(k4 > 0.0)) return std::nullopt;
  return std::pow(k4, 0.25);
}

namespace detail {

inline double xi_grid_point(int i) { return i / (2.0 * kXiBracketPoints); }

// Bisection on a bracket with f(lo), f(hi) of opposite sign.
template <typename F>
double bisect(F&& f, double lo, double hi, double f_lo, double tol) {
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (f_lo < 0.0)) {
      lo = mid;
      f_lo = f_mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Golden-section search for the minimum of a unimodal f on [lo, hi].
template <typename F>
double golden_min(F&& f, double lo, double hi, int iterations = 80) {
  constexpr double inv_phi = 0.6180339887498949;
  double c = hi - inv_phi * (hi - lo);
  double d = lo + inv_phi * (hi - lo);
  double fc = f(c), fd = f(d);
  for (int it = 0; it < iterations && hi - lo > 1e-15; ++it) {
    if (fc < fd) {
      hi = d;
      d = c;
      fd = fc;
      c = hi - inv_phi * (hi - lo);
      fc = f(c);
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + inv_phi * (hi - lo);
      fd = f(d);
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace detail

/// All xi in (0, 1/2] with omega_{n,xi} = omega_{m,xi} at c = c0(k).
///
/// Roots are bracketed by sign changes on the grid i/8192 and bisected to
/// 1e-12. The closed endpoint xi = 1/2 is also accepted when the difference
/// vanishes there without changing sign, which is the generic situation for
/// the origin collisions m = -n - 1.
inline std::vector<double> collision_xi(const PhysicalParams& p, int n, int m) {
  validate(p);
  if (n == m) throw error(errc::invalid_params, "n and m must differ");
  const double c0 = phase_speed_c0(p);
  auto diff = [&](double xi) { return omega(p, c0, n + xi) - omega(p, c0, m + xi); };

  std::vector<double> roots;
  double prev_xi = detail::xi_grid_point(1);
  double prev_f = diff(prev_xi);
  if (prev_f == 0.0) roots.push_back(prev_xi);
  for (int i = 2; i <= kXiBracketPoints; ++i) {
    const double xi = detail::xi_grid_point(i);
    const double f = diff(xi);
    if (f == 0.0) {
      roots.push_back(xi);
    } else if (prev_f != 0.0 && (f < 0.0) != (prev_f < 0.0)) {
      roots.push_back(detail::bisect(diff, prev_xi, xi, prev_f, kXiRootTolerance));
    }
    prev_xi = xi;
    prev_f = f;
  }

  const double scale = std::max(1.0, std::abs(omega(p, c0, n + 0.5)));
  if (std::abs(diff(0.5)) <= 1e-9 * scale) {
    if (!roots.empty() && 0.5 - roots.back() <= 1e-9) {
      roots.back() = 0.5;
    } else {
      roots.push_back(0.5);
    }
  }
  return roots;
}

/// sgn(omega / x); 0 when |omega| < 1e-10 (collision at the origin).
inline int krein_signature(const PhysicalParams& p, double c, double x) {
  const double w = omega(p, c, x);
  if (std::abs(w) < kSignatureTolerance) return 0;
  return (w / x) > 0.0 ? 1 : -1;
}

inline bool opposite_krein(int n, int m, double xi) { return (n + xi) * (m + xi) < 0.0; }

struct CollisionEvent {
  int n{};
  int m{};
  double xi0{};
  double k{};
  double omega{};
  bool at_origin{};
  bool opposite_krein{};
};

/// Resolved collisions of modes n and m at the carrier wavenumber p.k.
inline std::vector<CollisionEvent> collision_events(const PhysicalParams& p, int n, int m) {
  if (n > m) std::swap(n, m);
  std::vector<CollisionEvent> events;
  const double c0 = phase_speed_c0(p);
  for (double xi : collision_xi(p, n, m)) {
    CollisionEvent e;
    e.n = n;
    e.m = m;
    e.xi0 = xi;
    e.k = p.k;
    e.omega = omega(p, c0, n + xi);
    e.at_origin = std::abs(e.omega) < kSignatureTolerance;
    e.opposite_krein = opposite_krein(n, m, xi);
    events.push_back(e);
  }
  return events;
}

/// Which Floquet exponents a collision interval ranges over.
///
/// `half` is xi in (0, 1/2]. `full` is xi in [-1/2, 1/2] (x = n + xi over a
/// whole unit cell), which is the same as taking the union with the mirrored
/// pair {-m, -n} on (0, 1/2] since omega is odd in x. Plots of k versus n + xi
/// use `full`.
enum class FloquetZone { half, full };

struct CollisionInterval {
  int n{};
  int m{};
  double k_min{};
  double k_max{};          // +infinity when unbounded
  bool unbounded{};
  bool k_min_limit{};      // infimum approached where K -> 0 inside the zone
};

inline CollisionInterval collision_interval(double beta, double gamma, int n, int m,
                                            FloquetZone zone = FloquetZone::half) {
  if (n == m) throw error(errc::invalid_params, "n and m must differ");
  if (n > m) std::swap(n, m);
  const int dn = m - n;
  const double scale = gamma * dn / beta;

  // k^4 on the sampled zone; NaN marks a pole, negative marks "no collision".
  auto k4_at = [&](double xi) {
    try {
      return scale * collision_K(n + xi, dn);
    } catch (const error&) {
      return std::numeric_limits<double>::quiet_NaN();
    }
  };

  const int i_lo = zone == FloquetZone::half ? 1 : -kXiBracketPoints;
  const int i_hi = kXiBracketPoints;
  double best_min = std::numeric_limits<double>::infinity();
  double best_max = 0.0;
  int i_min = 0, i_max = 0;
  bool any = false;
  bool limit_to_zero = false;
  bool unbounded = false;
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int i = i_lo; i <= i_hi; ++i) {
    const double v = k4_at(detail::xi_grid_point(i));
    if (std::isnan(v)) {
      // A pole adjacent to admissible samples means k is unbounded there.
      if (!std::isnan(prev) && prev > 0.0) unbounded = true;
      if (i + 1 <= i_hi) {
        const double next = k4_at(detail::xi_grid_point(i + 1));
        if (!std::isnan(next) && next > 0.0) unbounded = true;
      }
      prev = v;
      continue;
    }
    if (!std::isnan(prev) && ((prev > 0.0) != (v > 0.0))) limit_to_zero = true;
    prev = v;
    if (!(v > 0.0)) continue;
    any = true;
    if (v < best_min) { best_min = v; i_min = i; }
    if (v > best_max) { best_max = v; i_max = i; }
  }
  // The excluded endpoint xi -> 0+ of the half zone is a pole when an index is 0.
  if (zone == FloquetZone::half && (n == 0 || m == 0)) {
    const double first = k4_at(detail::xi_grid_point(1));
    if (!std::isnan(first) && first > 0.0) unbounded = true;
  }
  if (!any) {
    throw error(errc::no_collision, "pair {" + std::to_string(n) + "," + std::to_string(m) +
                                        "} admits no collision for this sign of beta");
  }

  auto refine = [&](int i, double sign) {
    const double lo = detail::xi_grid_point(std::max(i - 1, i_lo));
    const double hi = detail::xi_grid_point(std::min(i + 1, i_hi));
    auto f = [&](double xi) {
      const double v = k4_at(xi);
      return (std::isnan(v) || v <= 0.0) ? std::numeric_limits<double>::infinity() * sign
                                          : sign * v;
    };
    const double xi = detail::golden_min(f, lo, hi);
    const double v = k4_at(xi);
    return (std::isnan(v) || v <= 0.0) ? std::numeric_limits<double>::quiet_NaN() : v;
  };

  CollisionInterval out;
  out.n = n;
  out.m = m;
  if (limit_to_zero) {
    out.k_min = 0.0;
    out.k_min_limit = true;
  } else {
    const double v = refine(i_min, 1.0);
    out.k_min = std::pow(std::isnan(v) ? best_min : std::min(v, best_min), 0.25);
  }
  if (unbounded) {
    out.unbounded = true;
    out.k_max = std::numeric_limits<double>::infinity();
  } else {
    const double v = refine(i_max, -1.0);
    out.k_max = std::pow(std::isnan(v) ? best_max : std::max(v, best_max), 0.25);
  }
  return out;
}

struct CollisionPair {
  int n{};
  int m{};
  bool opposite_krein{};

  friend bool operator==(const CollisionPair&, const CollisionPair&) = default;
};

/// Pairs {n, n + dn}, 1 <= dn <= dn_max, |n| <= n_range, that collide away from
/// the origin for some xi in (0, 1/2] and the given sign of beta. The sign of
/// K(n + xi, dn) is sampled on the bracketing grid.
inline std::vector<CollisionPair> enumerate_collision_pairs(double beta_sign, int dn_max,
                                                            int n_range) {
  if (dn_max < 1) throw error(errc::invalid_params, "dn_max must be >= 1");
  if (n_range < dn_max) throw error(errc::invalid_params, "n_range must be >= dn_max");
  if (beta_sign == 0.0) throw error(errc::invalid_params, "beta must be nonzero");
  const double s = beta_sign > 0.0 ? 1.0 : -1.0;

  std::vector<CollisionPair> pairs;
  for (int dn = 1; dn <= dn_max; ++dn) {
    for (int n = -n_range; n <= n_range; ++n) {
      const int m = n + dn;
      bool admits = false;
      bool opposite = false;
      for (int i = 1; i <= kXiBracketPoints; ++i) {
        const double xi = detail::xi_grid_point(i);
        const double x = n + xi;
        const double y = m + xi;
        // Origin collisions sit at x = -y, xi = 1/2 and are listed separately.
        if (xi == 0.5 && n + m == -1) continue;
        double K;
        try {
          K = collision_K(x, dn);
        } catch (const error&) {
          continue;
        }
        if (s * K > 0.0) {
          admits = true;
          opposite = opposite || x * y < 0.0;
        }
      }
      if (admits) pairs.push_back({n, m, opposite});
    }
  }
  return pairs;
}

struct OriginCollision {
  int n{};
  int m{};
  double xi{0.5};
  double k{};
};

/// Collisions at omega = 0: beta > 0 only, pairs {n, -n-1} at xi = 1/2 and
/// k = (gamma / (beta (n + 1/2)^2))^(1/4), for |n| <= n_range. The pair
/// {n, -n-1} is the same as {-n-1, n}, so each is listed once with n < m.
inline std::vector<OriginCollision> origin_collisions(double beta, double gamma, int n_range) {
  std::vector<OriginCollision> out;
  if (beta <= 0.0) return out;
  for (int n = -n_range - 1; n <= -1; ++n) {
    const double x = n + 0.5;
    out.push_back({n, -n - 1, 0.5, std::pow(gamma / (beta * x * x), 0.25)});
  }
  return out;
}

}  // namespace ostro
