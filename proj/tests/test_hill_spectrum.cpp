#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "ostro/dispersion.hpp"
#include "ostro/hill_spectrum.hpp"
#include "ostro/reduced_system.hpp"

using namespace ostro;

namespace {

TruncationConfig small_config(int N = 32, int points = 64) {
  TruncationConfig cfg;
  cfg.N = N;
  cfg.xi_grid = default_xi_grid(points);
  return cfg;
}

double nearest_distance(const std::vector<cplx>& values, cplx target) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto& v : values) best = std::min(best, std::abs(v - target));
  return best;
}

}  // namespace

TEST(HillSpectrum, ZeroAmplitudeReproducesDispersion) {
  const TruncationConfig cfg = small_config();
  for (PhysicalParams p : {PhysicalParams{1, 1, 1}, PhysicalParams{-1, 1, 1}, PhysicalParams{1, 6, 2.5}}) {
    const StokesWave w = stokes_coefficients(p);
    for (double xi : {0.1, 0.25, 0.5}) {
      const auto ev = eigenvalues(assemble_matrix(w, Amplitude(0.0), xi, cfg));
      for (int n = -cfg.N; n <= cfg.N; ++n) {
        EXPECT_LE(nearest_distance(ev, {0.0, unperturbed_omega(p, {n, xi})}), 1e-10)
            << "n=" << n << " xi=" << xi;
      }
    }
  }
}

TEST(HillSpectrum, ZeroAmplitudeMatrixIsDiagonal) {
  const PhysicalParams p{1, 1, 1};
  const auto A = assemble_matrix(stokes_coefficients(p), Amplitude(0.0), 0.3, small_config(8));
  for (int r = 0; r < A.rows(); ++r)
    for (int c = 0; c < A.cols(); ++c) {
      if (r == c) EXPECT_DOUBLE_EQ(A(r, c).imag(), unperturbed_omega(p, {r - 8, 0.3}));
      else EXPECT_EQ(A(r, c), cplx(0.0));
    }
}

TEST(HillSpectrum, EntriesArePurelyImaginary) {
  const auto A = assemble_matrix(stokes_coefficients({1, 1, 1.6}), Amplitude(0.05), 0.2, small_config(16));
  EXPECT_EQ(A.real().cwiseAbs().maxCoeff(), 0.0);
}

TEST(HillSpectrum, ReflectionIdentity) {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> uxi(0.01, 0.5), ua(-0.05, 0.05);
  const StokesWave w = stokes_coefficients({1, 1, 1.6});
  for (int t = 0; t < 10; ++t) {
    const double xi = uxi(rng);
    const Amplitude a(ua(rng));
    const int N = 6;
    const auto M = detail::bloch_matrix_imag(w, a, xi, N);
    const auto Mr = detail::bloch_matrix_imag(w, a, -xi, N);
    for (int r = 0; r <= 2 * N; ++r)
      for (int c = 0; c <= 2 * N; ++c)
        EXPECT_DOUBLE_EQ(Mr(2 * N - r, 2 * N - c), -M(r, c));
  }
}

TEST(HillSpectrum, DiagonalInputEigenvalues) {
  Eigen::MatrixXcd D = Eigen::MatrixXcd::Zero(3, 3);
  D(0, 0) = {1, 2};
  D(1, 1) = {-3, 0};
  D(2, 2) = {0, 5};
  const auto ev = eigenvalues(D);
  for (int i = 0; i < 3; ++i) EXPECT_LE(nearest_distance(ev, D(i, i)), 1e-14);
}

TEST(HillSpectrum, EmbeddedPencilMatchesShifts) {
  const double k = *collision_wavenumber(1, 1, -1, 0, 0.3);
  const StokesWave w = stokes_coefficients({1, 1, k});
  const ReducedPencil pen = reduced_matrix(w, -1, 0, 0.3, Amplitude(0.02));
  const auto d = eigenvalue_shifts(pen);
  const auto ev = eigenvalues(Eigen::MatrixXcd(pen.B));
  const cplx i{0, 1};
  for (const auto& mu : d.shifts) EXPECT_LE(nearest_distance(ev, i * pen.omega + i * mu), 1e-12);
  EXPECT_NEAR(std::max(ev[0].real(), ev[1].real()), d.growth_rate, 1e-12);
}

TEST(HillSpectrum, SpectrumIsPaired) {
  const StokesWave w = stokes_coefficients({1, 1, 1.6});
  const TruncationConfig cfg = small_config(32, 16);
  for (const auto& s : sweep(w, Amplitude(0.05), cfg.xi_grid, cfg)) EXPECT_TRUE(s.paired) << s.xi;
  EXPECT_FALSE(spectrum_paired({{1.0, 0.0}, {2.0, 0.0}}));
  EXPECT_TRUE(spectrum_paired({{1.0, 2.0}, {-1.0, 2.0}, {0.0, 3.0}}));
}

TEST(HillSpectrum, LFactorizationAndHermiticity) {
  const StokesWave w = stokes_coefficients({1, 1, 1.6});
  const TruncationConfig cfg = small_config(16);
  for (double xi : {0.1, 0.37, 0.5}) {
    const Amplitude a(0.04);
    const auto A = assemble_matrix(w, a, xi, cfg);
    const auto L = assemble_L_matrix(w, a, xi, cfg);
    EXPECT_EQ((L - L.adjoint()).cwiseAbs().maxCoeff(), 0.0);
    const Eigen::MatrixXcd JL = J_diagonal(xi, cfg.N).asDiagonal() * L;
    EXPECT_LE((JL - A).cwiseAbs().maxCoeff(), 1e-13 * A.cwiseAbs().maxCoeff());
  }
}

TEST(HillSpectrum, LDiagonalAtZeroAmplitude) {
  const PhysicalParams p{1, 1, 1.6};
  const StokesWave w = stokes_coefficients(p);
  const auto L = assemble_L_matrix(w, Amplitude(0.0), 0.3, small_config(8));
  for (int n = -8; n <= 8; ++n) {
    const double x = n + 0.3;
    EXPECT_NEAR(L(n + 8, n + 8).real(), unperturbed_omega(p, {n, 0.3}) / x, 1e-12);
  }
}

TEST(HillSpectrum, ZeroAmplitudeHasNoGrowth) {
  const TruncationConfig cfg = small_config(16, 32);
  const StokesWave w = stokes_coefficients({1, 1, 1.6});
  EXPECT_LE(spectrum_slice(w, Amplitude(0.0), 0.3, cfg).max_real_part, 1e-12);
  EXPECT_LE(max_growth(w, Amplitude(0.0), cfg).growth, 1e-12);
}

TEST(HillSpectrum, GrowthMatchesPredictionAtCollision) {
  const PhysicalParams p{1, 1, 1.6};
  const StokesWave w = stokes_coefficients(p);
  const double xi0 = collision_xi(p, -1, 0).front();
  const Amplitude a(0.01);
  const auto s = spectrum_slice(w, a, xi0, small_config());
  const double pred = predicted_growth_rate(w, -1, xi0, a);
  EXPECT_NEAR(s.max_real_part, pred, 0.1 * pred);
}

TEST(HillSpectrum, MaxGrowthNearCollisionAndLinearInAmplitude) {
  const PhysicalParams p{1, 1, 1.6};
  const StokesWave w = stokes_coefficients(p);
  const double xi0 = collision_xi(p, -1, 0).front();
  const TruncationConfig cfg = small_config(24, 256);
  const GrowthScan g1 = max_growth(w, Amplitude(0.02), cfg);
  const GrowthScan g2 = max_growth(w, Amplitude(0.01), cfg);
  EXPECT_NEAR(g1.xi_star, xi0, 1.0 / 512);
  const double ratio = g1.growth / g2.growth;
  EXPECT_GE(ratio, 1.8);
  EXPECT_LE(ratio, 2.2);
}

TEST(HillSpectrum, StableBelowThresholdAwayFromLongWaves) {
  const StokesWave w = stokes_coefficients({1, 1, 1.2});
  const TruncationConfig cfg = small_config();
  for (double xi : {0.05, 0.1, 0.25, 0.4, 0.5}) {
    EXPECT_LT(spectrum_slice(w, Amplitude(0.01), xi, cfg).max_real_part, 1e-8) << xi;
  }
}

// Below the threshold, the only growth left sits at xi = O(a) on the modes
// +-1: a long-wave (modulational) band, quadratic in a.
TEST(HillSpectrum, LongWaveBandBelowThreshold) {
  const StokesWave w = stokes_coefficients({1, 1, 1.2});
  TruncationConfig cfg = small_config(32, 512);
  const GrowthScan g = max_growth(w, Amplitude(0.005), cfg);
  EXPECT_GT(g.growth, 1e-6);
  EXPECT_LT(g.xi_star, 0.005);
  const EigenPairs ep = eigenpairs(assemble_matrix(w, Amplitude(0.005), g.xi_star, cfg));
  std::size_t j = 0;
  for (std::size_t i = 1; i < ep.values.size(); ++i)
    if (ep.values[i].real() > ep.values[j].real()) j = i;
  const auto v = ep.vectors.col(static_cast<Eigen::Index>(j));
  const double mass = std::norm(v(cfg.N - 1)) + std::norm(v(cfg.N + 1));
  EXPECT_GT(mass / v.squaredNorm(), 0.95);
}

TEST(HillSpectrum, TruncationConvergence) {
  const StokesWave w = stokes_coefficients({1, 1, 1.6});
  const double xi0 = collision_xi(w.params, -1, 0).front();
  for (double a : {0.05, 0.02}) {
    const double g32 = spectrum_slice(w, Amplitude(a), xi0, small_config(32)).max_real_part;
    const double g64 = spectrum_slice(w, Amplitude(a), xi0, small_config(64)).max_real_part;
    EXPECT_LT(std::abs(g32 - g64), 1e-8) << a;
  }
}

TEST(HillSpectrum, KreinSignaturesAtZeroAmplitude) {
  const double xi = 0.3;
  const double k = *collision_wavenumber(1, 1, -1, 0, xi);
  const PhysicalParams p{1, 1, k};
  const StokesWave w = stokes_coefficients(p);
  const TruncationConfig cfg = small_config(8);
  const auto L = assemble_L_matrix(w, Amplitude(0.0), xi, cfg);
  auto unit = [&](int n) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(cfg.dimension());
    v(n + cfg.N) = 1.0;
    return v;
  };
  for (int n : {-3, -1, 0, 2}) {
    EXPECT_EQ(krein_of_eigenpair(L, unit(n)), krein_signature(p, w.c0, n + xi)) << n;
  }
  EXPECT_EQ(krein_of_eigenpair(L, unit(-1)), -krein_of_eigenpair(L, unit(0)));
}

TEST(HillSpectrum, UnstableEigenvectorHasIndefiniteEnergy) {
  const PhysicalParams p{1, 1, 1.6};
  const StokesWave w = stokes_coefficients(p);
  const double xi0 = collision_xi(p, -1, 0).front();
  const TruncationConfig cfg = small_config(16);
  const Amplitude a(0.02);
  const EigenPairs ep = eigenpairs(assemble_matrix(w, a, xi0, cfg));
  std::size_t j = 0;
  for (std::size_t i = 1; i < ep.values.size(); ++i)
    if (ep.values[i].real() > ep.values[j].real()) j = i;
  ASSERT_GT(ep.values[j].real(), 1e-4);
  try {
    krein_of_eigenpair(assemble_L_matrix(w, a, xi0, cfg), ep.vectors.col(static_cast<Eigen::Index>(j)));
    FAIL();
  } catch (const error& e) {
    EXPECT_EQ(e.code(), errc::indefinite_near_zero);
  }
}

TEST(HillSpectrum, XiOutsideZoneRejected) {
  const StokesWave w = stokes_coefficients({1, 1, 1});
  EXPECT_THROW(assemble_matrix(w, Amplitude(0.01), 0.0, small_config(8)), error);
  EXPECT_THROW(assemble_matrix(w, Amplitude(0.01), 0.7, small_config(8)), error);
}

TEST(HillSpectrum, ThreadedSweepMatchesSerial) {
  const StokesWave w = stokes_coefficients({1, 1, 1.6});
  TruncationConfig cfg = small_config(16, 24);
  const auto serial = sweep(w, Amplitude(0.02), cfg.xi_grid, cfg);
  cfg.threads = 3;
  const auto threaded = sweep(w, Amplitude(0.02), cfg.xi_grid, cfg);
  ASSERT_EQ(serial.size(), threaded.size());
  for (std::size_t i = 0; i < serial.size(); ++i)
    EXPECT_EQ(serial[i].max_real_part, threaded[i].max_real_part);
}
