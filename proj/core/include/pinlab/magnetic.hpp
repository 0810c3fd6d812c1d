#ifndef PINLAB_MAGNETIC_HPP
#define PINLAB_MAGNETIC_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <utility>
#include <vector>

#include "pinlab/grid.hpp"
#include "pinlab/pinning.hpp"

namespace pinlab {

struct EnergyParts {
  double kinetic = 0.0;    // 1/2 int |grad u - i A u|^2
  double potential = 0.0;  // 1/(4 eps^2) int (a - |u|^2)^2
  double field = 0.0;      // 1/2 int |curl A - hex|^2
  double total() const { return kinetic + potential + field; }
};

struct GLState {
  ComplexField u;
  ScalarField A1, A2;
  double hex = 0.0;
  EnergyParts energy_parts;
};

struct GLEnergy {
  EnergyParts parts;
  ScalarField density;  // pointwise energy density g
  double total = 0.0;
};

struct Ball {
  double cx = 0.0, cy = 0.0, radius = 0.0;
};

struct BallSum {
  Ball ball;
  double circulation = 0.0;
};

struct VorticityReport {
  ScalarField mu;
  ScalarField j1, j2;  // supercurrent components
  double total_mu = 0.0;
  std::vector<BallSum> ball_sums;
};

struct GLOpts {
  double tol = 1e-9;       // relative energy decrease over a 50-sweep window
  int max_sweeps = 20000;
  double init_step = 1.0;
};

struct QuasiminReport {
  double denoised = 0.0;      // GL^pin(u,A) - E^pin(U)
  double unpinned_of_v = 0.0; // GL of v = u/U with the mean-value well
  double ratio = 0.0;
  double weighted = 0.0;      // U-weighted energy of v
  bool sandwich_ok = false;   // m^4 GL(v) <= weighted <= M^4 GL(v)
};

// Energy of a state; a == 1 when p is absent.
GLEnergy gl_energy(const GLState& s, const PinningField* p, double eps);

// Product of degree-d mollified vortices at the given centers, |u| = tanh(r/eps),
// A = 0.
GLState make_vortex_state(const Grid& grid, const std::vector<std::pair<double, double>>& centers,
                          const std::vector<int>& degrees, double eps, double hex);

// Alternating u-sweep / A-sweep backtracking descent on the discrete energy.
// Energy is nonincreasing across accepted sweeps; throws on divergence.
GLState minimize_gl(const PinningField* p, double eps, double hex, const Grid& grid,
                    const GLState* init = nullptr, const GLOpts& opts = {});

// j = (i u, grad u) - |u|^2 A, mu = curl j + curl A; balls integrate mu over disks.
VorticityReport vorticity(const GLState& s, const std::vector<Ball>& balls = {});

// Energy comparison of pinned vs unpinned states through v = u/U.
QuasiminReport quasiminimizer_report(const ComplexField& u, const ScalarField& A1,
                                     const ScalarField& A2, const PinningField& p,
                                     const ScalarField& U, double eps, double hex);

// 1/2 int U^2 |grad v - iAv|^2 + 1/(4eps^2) int U^4 (1-|v|^2)^2 + field term
double weighted_gl_energy(const ComplexField& v, const ScalarField& A1, const ScalarField& A2,
                          const ScalarField& U, double eps, double hex);

// Checkpoint: manifest line "# eps hex delta kind seed" then four field blocks
// (re u, im u, A1, A2).
void save_state(std::ostream& os, const GLState& s, double eps, double delta,
                const std::string& kind, std::uint64_t seed);
GLState load_state(std::istream& is, double& eps, double& delta, std::string& kind,
                   std::uint64_t& seed);

}  // namespace pinlab

#endif
