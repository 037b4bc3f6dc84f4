#pragma once

// Fourier truncation of the Bloch operator
//
//   A_{a,xi} = k^2 J (c + beta k^2 J^2 - 2 w) + gamma J^{-1},  J = d/dz + i xi,
//
// and of its self-adjoint factor L_{a,xi} (A = J L), on modes -N..N.
// Every entry of A is i times a real number, so the spectrum is computed from
// the real matrix -iA; this makes the lambda -> -conj(lambda) pairing exact.

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <exception>
#include <limits>
#include <string>
#include <thread>
#include <vector>

#include "ostro/dispersion.hpp"
#include "ostro/errors.hpp"
#include "ostro/stokes_wave.hpp"

namespace ostro {

using cplx = std::complex<double>;

inline constexpr double kPairingTolerance = 1e-9;
inline constexpr double kBoundaryMassFraction = 0.01;
inline constexpr double kKreinTolerance = 1e-10;
inline constexpr int kMaxEigenDimension = 10000;

/// Uniform grid xi_i = i / (2 points), i = 1..points, on (0, 1/2].
inline std::vector<double> default_xi_grid(int points = 512) {
  std::vector<double> grid;
  grid.reserve(points);
  for (int i = 1; i <= points; ++i) grid.push_back(i / (2.0 * points));
  return grid;
}

struct TruncationConfig {
  int N{32};
  std::vector<double> xi_grid{default_xi_grid()};
  int boundary_margin{4};
  unsigned threads{1};  // 0 means one per hardware thread

  void validate() const {
    if (N < 8) throw error(errc::invalid_params, "truncation N must be >= 8");
    if (boundary_margin < 0 || boundary_margin >= N) {
      throw error(errc::invalid_params, "boundary margin must lie in [0, N)");
    }
    for (double xi : xi_grid) check_xi(xi);
  }

  int dimension() const noexcept { return 2 * N + 1; }
};

/// Half-amplitude Fourier coefficients w_hat_j, j = 0..4, of the profile:
/// w = sum_j w_hat_j (e^{ijz} + e^{-ijz}).
inline std::array<double, 5> wave_fourier_coefficients(const StokesWave& wave, Amplitude amp) {
  auto h = profile_harmonics(wave, amp);
  for (double& v : h) v *= 0.5;
  return h;
}

namespace detail {

// No range check on xi; the reflection identity needs xi < 0.
inline Eigen::MatrixXd bloch_matrix_imag(const StokesWave& wave, Amplitude amp, double xi, int N) {
  const auto& p = wave.params;
  const double c = eval_speed(wave, amp);
  const double k2 = p.k * p.k;
  const auto w_hat = wave_fourier_coefficients(wave, amp);
  const int dim = 2 * N + 1;
  Eigen::MatrixXd R = Eigen::MatrixXd::Zero(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const double x = (r - N) + xi;
    R(r, r) = omega(p, c, x);
    for (int j = 1; j <= 4; ++j) {
      if (r - j >= 0) R(r, r - j) = -2.0 * k2 * x * w_hat[j];
      if (r + j < dim) R(r, r + j) = -2.0 * k2 * x * w_hat[j];
    }
  }
  return R;
}

inline Eigen::MatrixXcd times_i(const Eigen::MatrixXd& R) {
  return Eigen::MatrixXcd(R.cast<cplx>() * cplx{0.0, 1.0});
}

inline bool purely_imaginary(const Eigen::MatrixXcd& M) {
  for (Eigen::Index c = 0; c < M.cols(); ++c)
    for (Eigen::Index r = 0; r < M.rows(); ++r)
      if (M(r, c).real() != 0.0) return false;
  return true;
}

inline void check_dimension(const Eigen::MatrixXcd& M) {
  if (M.rows() != M.cols()) throw error(errc::invalid_params, "eigenvalues need a square matrix");
  if (M.rows() > kMaxEigenDimension) throw error(errc::invalid_params, "matrix too large");
}

}  // namespace detail

inline Eigen::MatrixXcd assemble_matrix(const StokesWave& wave, Amplitude amp, double xi,
                                        const TruncationConfig& cfg) {
  check_xi(xi);
  return detail::times_i(detail::bloch_matrix_imag(wave, amp, xi, cfg.N));
}

/// Hermitian (here real symmetric) truncation of L_{a,xi}.
inline Eigen::MatrixXcd assemble_L_matrix(const StokesWave& wave, Amplitude amp, double xi,
                                          const TruncationConfig& cfg) {
  check_xi(xi);
  const auto& p = wave.params;
  const double c = eval_speed(wave, amp);
  const double k2 = p.k * p.k;
  const auto w_hat = wave_fourier_coefficients(wave, amp);
  const int N = cfg.N;
  const int dim = cfg.dimension();
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(dim, dim);
  for (int r = 0; r < dim; ++r) {
    const double x = (r - N) + xi;
    L(r, r) = k2 * (c - p.beta * k2 * x * x) - p.gamma / (x * x);
    for (int j = 1; j <= 4; ++j) {
      if (r - j >= 0) L(r, r - j) = -2.0 * k2 * w_hat[j];
      if (r + j < dim) L(r, r + j) = -2.0 * k2 * w_hat[j];
    }
  }
  return L;
}

/// diag(i (n + xi)), the truncation of J = d/dz + i xi.
inline Eigen::VectorXcd J_diagonal(double xi, int N) {
  Eigen::VectorXcd d(2 * N + 1);
  for (int r = 0; r < 2 * N + 1; ++r) d(r) = cplx{0.0, (r - N) + xi};
  return d;
}

struct EigenPairs {
  std::vector<cplx> values;
  Eigen::MatrixXcd vectors;  // columns, unit 2-norm
};

namespace detail {

inline EigenPairs solve(const Eigen::MatrixXcd& M, bool with_vectors) {
  check_dimension(M);
  EigenPairs out;
  if (!with_vectors && M.isDiagonal(0.0)) {
    // Exact; the Schur route rescales by the largest entry and can lose an ulp.
    const Eigen::VectorXcd d = M.diagonal();
    out.values.assign(d.data(), d.data() + d.size());
    return out;
  }
  if (purely_imaginary(M)) {
    // M = i R with R real: lambda = i mu for each eigenvalue mu of R.
    const Eigen::MatrixXd R = M.imag();
    Eigen::EigenSolver<Eigen::MatrixXd> es(R, with_vectors);
    if (es.info() != Eigen::Success) {
      throw error(errc::convergence_failure, "real Schur iteration did not converge");
    }
    const auto& mu = es.eigenvalues();
    out.values.reserve(mu.size());
    for (Eigen::Index j = 0; j < mu.size(); ++j) out.values.push_back(cplx{0.0, 1.0} * mu(j));
    if (with_vectors) out.vectors = es.eigenvectors();
  } else {
    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(M, with_vectors);
    if (es.info() != Eigen::Success) {
      throw error(errc::convergence_failure, "complex Schur iteration did not converge");
    }
    const auto& lam = es.eigenvalues();
    out.values.assign(lam.data(), lam.data() + lam.size());
    if (with_vectors) out.vectors = es.eigenvectors();
  }
  if (with_vectors) out.vectors.colwise().normalize();
  return out;
}

}  // namespace detail

/// All eigenvalues of a dense square matrix (no ordering guarantee).
inline std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& M) {
  return detail::solve(M, false).values;
}

inline EigenPairs eigenpairs(const Eigen::MatrixXcd& M) { return detail::solve(M, true); }

/// True when the multiset is invariant under lambda -> -conj(lambda).
inline bool spectrum_paired(const std::vector<cplx>& values, double tol = kPairingTolerance) {
  std::vector<bool> used(values.size(), false);
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (used[i]) continue;
    const cplx target = -std::conj(values[i]);
    std::size_t best = values.size();
    double best_dist = tol * std::max(1.0, std::abs(values[i]));
    if (std::abs(target - values[i]) <= best_dist) {
      used[i] = true;  // on the imaginary axis, self-paired
      continue;
    }
    for (std::size_t j = 0; j < values.size(); ++j) {
      if (used[j] || j == i) continue;
      const double d = std::abs(values[j] - target);
      if (d <= best_dist) {
        best_dist = d;
        best = j;
      }
    }
    if (best == values.size()) return false;
    used[i] = used[best] = true;
  }
  return true;
}

/// Fraction of |v|^2 carried by modes within `margin` of the truncation edges.
inline double boundary_mass(const Eigen::VectorXcd& v, int margin) {
  const Eigen::Index dim = v.size();
  double edge = 0.0;
  for (Eigen::Index r = 0; r < dim; ++r) {
    if (r < margin || r >= dim - margin) edge += std::norm(v(r));
  }
  const double total = v.squaredNorm();
  return total > 0.0 ? edge / total : 0.0;
}

struct SpectrumSlice {
  double xi{};
  double a{};
  std::vector<cplx> eigenvalues;
  double max_real_part{};
  bool paired{};
  std::size_t edge_modes_excluded{};
};

/// Spectrum at one (a, xi). The growth statistic ignores eigenvalues whose
/// eigenvector has more than 1% of its mass within `boundary_margin` modes of
/// +-N; eigenvectors are only computed when some eigenvalue leaves the
/// imaginary axis.
inline SpectrumSlice spectrum_slice(const StokesWave& wave, Amplitude amp, double xi,
                                    const TruncationConfig& cfg) {
  const Eigen::MatrixXcd A = assemble_matrix(wave, amp, xi, cfg);
  SpectrumSlice s;
  s.xi = xi;
  s.a = amp.value();
  s.eigenvalues = eigenvalues(A);

  double raw_max = 0.0;
  for (const auto& l : s.eigenvalues) raw_max = std::max(raw_max, l.real());

  if (raw_max > 0.0 && cfg.boundary_margin > 0) {
    EigenPairs ep = eigenpairs(A);
    s.eigenvalues = std::move(ep.values);
    s.max_real_part = 0.0;
    for (std::size_t j = 0; j < s.eigenvalues.size(); ++j) {
      const double re = s.eigenvalues[j].real();
      if (re <= 0.0) continue;
      if (boundary_mass(ep.vectors.col(static_cast<Eigen::Index>(j)), cfg.boundary_margin) >
          kBoundaryMassFraction) {
        ++s.edge_modes_excluded;
        continue;
      }
      s.max_real_part = std::max(s.max_real_part, re);
    }
  } else {
    s.max_real_part = raw_max;
  }
  s.paired = spectrum_paired(s.eigenvalues);
  return s;
}

struct GrowthScan {
  double xi_star{};
  double growth{};
  SpectrumSlice slice;
};

namespace detail {

inline unsigned worker_count(unsigned requested, std::size_t jobs) {
  unsigned n = requested == 0 ? std::max(1u, std::thread::hardware_concurrency()) : requested;
  return static_cast<unsigned>(std::min<std::size_t>(n, std::max<std::size_t>(jobs, 1)));
}

}  // namespace detail

/// Slices for every xi, evaluated by up to cfg.threads workers. Each worker
/// owns its own solver, so no solver state is shared.
inline std::vector<SpectrumSlice> sweep(const StokesWave& wave, Amplitude amp,
                                        const std::vector<double>& xis,
                                        const TruncationConfig& cfg) {
  std::vector<SpectrumSlice> out(xis.size());
  const unsigned workers = detail::worker_count(cfg.threads, xis.size());
  if (workers <= 1) {
    for (std::size_t i = 0; i < xis.size(); ++i) out[i] = spectrum_slice(wave, amp, xis[i], cfg);
    return out;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> failures(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = w; i < xis.size(); i += workers) {
          out[i] = spectrum_slice(wave, amp, xis[i], cfg);
        }
      } catch (...) {
        failures[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
  return out;
}

/// Largest growth over the xi grid, then three rounds of local trisection
/// around the best grid point.
inline GrowthScan max_growth(const StokesWave& wave, Amplitude amp, const TruncationConfig& cfg) {
  cfg.validate();
  if (cfg.xi_grid.empty()) throw error(errc::invalid_params, "empty xi grid");
  std::vector<SpectrumSlice> slices = sweep(wave, amp, cfg.xi_grid, cfg);

  std::size_t best = 0;
  for (std::size_t i = 1; i < slices.size(); ++i) {
    if (slices[i].max_real_part > slices[best].max_real_part) best = i;
  }
  GrowthScan scan{slices[best].xi, slices[best].max_real_part, slices[best]};

  // Step: distance to the nearest grid neighbour.
  double h = 0.5;
  if (slices.size() > 1) {
    h = std::numeric_limits<double>::infinity();
    if (best > 0) h = std::min(h, cfg.xi_grid[best] - cfg.xi_grid[best - 1]);
    if (best + 1 < slices.size()) h = std::min(h, cfg.xi_grid[best + 1] - cfg.xi_grid[best]);
    h = std::abs(h);
  }
  if (scan.growth > 0.0) {
    for (int round = 0; round < 3; ++round) {
      std::vector<double> trial;
      for (int j : {-2, -1, 1, 2}) {
        const double xi = scan.xi_star + j * h / 3.0;
        if (xi > 0.0 && xi <= 0.5) trial.push_back(xi);
      }
      for (auto& s : sweep(wave, amp, trial, cfg)) {
        if (s.max_real_part > scan.growth) {
          scan.growth = s.max_real_part;
          scan.xi_star = s.xi;
          scan.slice = std::move(s);
        }
      }
      h /= 3.0;
    }
  }
  return scan;
}

/// sgn(v^H L v) for an eigenvector v of a purely imaginary eigenvalue.
inline int krein_of_eigenpair(const Eigen::MatrixXcd& L, const Eigen::VectorXcd& v) {
  const double norm = v.norm();
  if (norm == 0.0) throw error(errc::invalid_params, "zero eigenvector");
  const Eigen::VectorXcd u = v / norm;
  const double q = u.dot(L * u).real();  // dot() conjugates the left operand
  if (std::abs(q) < kKreinTolerance) {
    throw error(errc::indefinite_near_zero, "energy form vanishes on this eigenvector");
  }
  return q > 0.0 ? 1 : -1;
}

}  // namespace ostro
