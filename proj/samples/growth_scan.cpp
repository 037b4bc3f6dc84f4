// Growth rate of the {-1,0} high-frequency instability across the threshold,
// next to the leading-order prediction.

#include <cstdio>

#include "ostro/dispersion.hpp"
#include "ostro/hill_spectrum.hpp"
#include "ostro/reduced_system.hpp"
#include "ostro/stokes_wave.hpp"

int main() {
  using namespace ostro;
  const double beta = 1.0, gamma = 1.0;
  const Amplitude amp(0.01);
  TruncationConfig cfg;
  cfg.N = 24;
  cfg.xi_grid = default_xi_grid(256);

  std::printf("threshold k = %.6f\n", instability_threshold_dn1(beta, gamma));
  std::printf("%6s %10s %12s %12s\n", "k", "xi0", "growth", "predicted");
  for (double k : {1.5, 1.6, 1.8, 2.0}) {
    const PhysicalParams p{beta, gamma, k};
    const StokesWave w = stokes_coefficients(p);
    const GrowthScan g = max_growth(w, amp, cfg);
    const double xi0 = collision_xi(p, -1, 0).front();
    std::printf("%6.2f %10.6f %12.4e %12.4e\n", k, xi0, g.growth,
                predicted_growth_rate(w, -1, xi0, amp));
  }
}
