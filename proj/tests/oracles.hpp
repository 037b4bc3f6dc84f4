#pragma once

// Independent reference computations used only by the tests.

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "ostro/hill_spectrum.hpp"
#include "ostro/stokes_wave.hpp"

namespace oracle {

/// Residual of the profile ODE with derivatives taken by a dense DFT of
/// sampled values rather than from the cosine series.
inline double residual_by_dft(const ostro::StokesWave& w, ostro::Amplitude amp, int M = 128) {
  using cd = std::complex<double>;
  const auto& p = w.params;
  const double c = ostro::eval_speed(w, amp);
  const double k2 = p.k * p.k;
  std::vector<double> u(M), u2(M);
  for (int i = 0; i < M; ++i) {
    u[i] = ostro::eval_profile(w, amp, 2.0 * std::numbers::pi * i / M);
    u2[i] = u[i] * u[i];
  }
  auto derivative = [&](const std::vector<double>& f, int order) {
    std::vector<cd> hat(M);
    for (int j = 0; j < M; ++j) {
      cd s = 0;
      for (int i = 0; i < M; ++i) s += f[i] * std::polar(1.0, -2.0 * std::numbers::pi * i * j / M);
      hat[j] = s / static_cast<double>(M);
    }
    std::vector<double> out(M, 0.0);
    for (int j = 0; j < M; ++j) {
      const int q = j <= M / 2 ? j : j - M;
      // The residual is a trigonometric polynomial of degree 8; higher bins hold
      // only rounding noise, which the fourth derivative would amplify.
      if (std::abs(q) > 8) continue;
      const cd factor = std::pow(cd(0.0, q), order);
      for (int i = 0; i < M; ++i) {
        out[i] += (factor * hat[j] * std::polar(1.0, 2.0 * std::numbers::pi * i * j / M)).real();
      }
    }
    return out;
  };
  const auto d2u = derivative(u, 2);
  const auto d4u = derivative(u, 4);
  const auto d2sq = derivative(u2, 2);
  double s = 0.0;
  for (int i = 0; i < M; ++i) {
    const double F = c * k2 * d2u[i] + p.beta * k2 * k2 * d4u[i] - k2 * d2sq[i] + p.gamma * u[i];
    s += F * F;
  }
  return std::sqrt(s / M);
}

/// Brute-force collision test: does omega_n - omega_m change sign (or vanish)
/// on a fine xi grid over (0, 1/2], away from omega = 0?
inline bool collides(double beta, double gamma, double k, int n, int m, int samples = 20000) {
  const double c0 = gamma / (k * k) + beta * k * k;
  auto w = [&](double x) { return k * k * x * (c0 - beta * k * k * x * x) - gamma / x; };
  double prev = 0.0;
  for (int i = 1; i <= samples; ++i) {
    const double xi = 0.5 * i / samples;
    const double d = w(n + xi) - w(m + xi);
    if (i > 1 && (d == 0.0 || (d < 0.0) != (prev < 0.0))) {
      if (std::abs(w(n + xi)) > 1e-6) return true;
    }
    prev = d;
  }
  return false;
}

/// Effective 2x2 operator for modes {n, m} from the Schur complement of the
/// real Bloch matrix, frozen at the unperturbed collision frequency. Returns
/// the largest |Im| of its eigenvalues (the predicted growth rate).
inline double schur_pencil_growth(const ostro::StokesWave& w, ostro::Amplitude amp, double xi,
                                  int n, int m, int N = 24) {
  const Eigen::MatrixXd R = ostro::detail::bloch_matrix_imag(w, amp, xi, N);
  const int dim = 2 * N + 1;
  const int ip = n + N, iq = m + N;
  std::vector<int> rest;
  for (int r = 0; r < dim; ++r)
    if (r != ip && r != iq) rest.push_back(r);
  const double w0 = ostro::omega(w.params, w.c0, n + xi);
  Eigen::Matrix2d Hpp;
  Hpp << R(ip, ip), R(ip, iq), R(iq, ip), R(iq, iq);
  const int q = static_cast<int>(rest.size());
  Eigen::MatrixXd Rpq(2, q), Rqp(q, 2), Rqq(q, q);
  for (int j = 0; j < q; ++j) {
    Rpq(0, j) = R(ip, rest[j]);
    Rpq(1, j) = R(iq, rest[j]);
    Rqp(j, 0) = R(rest[j], ip);
    Rqp(j, 1) = R(rest[j], iq);
    for (int l = 0; l < q; ++l) Rqq(j, l) = R(rest[j], rest[l]);
  }
  const Eigen::MatrixXd G = (w0 * Eigen::MatrixXd::Identity(q, q) - Rqq).inverse();
  const Eigen::Matrix2d H = Hpp + Rpq * G * Rqp;
  const double tr = H.trace(), det = H.determinant();
  const double disc = tr * tr - 4.0 * det;
  return disc < 0.0 ? 0.5 * std::sqrt(-disc) : 0.0;
}

}  // namespace oracle
