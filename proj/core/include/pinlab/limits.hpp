#ifndef PINLAB_LIMITS_HPP
#define PINLAB_LIMITS_HPP

#include <cstdint>
#include <memory>
#include <utility>
#include <vector>

#include "pinlab/grid.hpp"

namespace pinlab {

// Prefactored (-Lap + I) with Dirichlet boundary on a grid; interior unknowns
// only.  Shared between the h0 solve and every h_mu solve so that mu = 0
// reproduces h0 bit-for-bit.
class HelmholtzDirichlet {
 public:
  explicit HelmholtzDirichlet(const Grid& g);
  ~HelmholtzDirichlet();
  HelmholtzDirichlet(HelmholtzDirichlet&&) noexcept;
  HelmholtzDirichlet& operator=(HelmholtzDirichlet&&) noexcept;

  // solve -Lap h + h = rhs in the interior, h = bdry on the boundary nodes
  ScalarField solve(const ScalarField& rhs, double bdry) const;
  ScalarField solve(const ScalarField& rhs, const ScalarField& bdry) const;
  const Grid& grid() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct Quadform {
  // Q(x) = qxx x^2 + 2 qxy x y + qyy y^2
  double qxx = 1.0, qxy = 0.0, qyy = 1.0;
  double operator()(double x, double y) const {
    return qxx * x * x + 2.0 * qxy * x * y + qyy * y * y;
  }
  static Quadform identity() { return {1.0, 0.0, 1.0}; }
};

struct LimitFields {
  ScalarField h0;
  ScalarField xi0;  // h0 - 1
  double xi0_min = 0.0;
  double px = 0.0, py = 0.0;  // interpolated minimizer of xi0
  Quadform Qform;             // Hessian of xi0 at p
  double J0 = 0.0;
  double H0c1_per_logeps = 0.0;  // 1 / (2 |min xi0|)
  double SG_pp = 0.0;            // Green regular part at p
  std::shared_ptr<const HelmholtzDirichlet> solver;
};

struct MeasureDensity {
  ScalarField rho;
  double total = 0.0;
};

struct PointConfig {
  std::vector<std::pair<double, double>> points;
  int n = 0;
};

struct CriticalRow {
  int n = 0;
  double f_eps = 0.0;       // at hex = H_n root
  double g_eps = 0.0;       // at hex = H_n root
  double H_n_root = 0.0;
  double H_n_asymptotic = 0.0;
  double K_n = 0.0;
  double min_w_n = 0.0;
};

LimitFields solve_limit_fields(const Grid& grid);

// ||mu|| / (2 lam) + 1/2 int |grad h_mu|^2 + (h_mu - 1)^2 with
// -Lap h_mu + h_mu = mu, h_mu = 1 on the boundary.
double e_lambda(const MeasureDensity& mu, double lam, const LimitFields& lf);

struct ELambdaSolve {
  MeasureDensity mu;
  double value = 0.0;
  double kkt_defect = 0.0;
  int iterations = 0;
};

// Projected gradient over nonnegative grid densities.
ELambdaSolve minimize_e_lambda(double lam, const LimitFields& lf, double tol = 1e-8,
                               int max_iter = 20000);

double w_n_energy(const PointConfig& cfg, const Quadform& Q);

struct WnSolve {
  PointConfig cfg;
  double value = 0.0;
  double grad_max = 0.0;
};

// Best of restarts; descent with step halving until gradient max-norm <= 1e-8.
WnSolve minimize_w_n(int n, const Quadform& Q, int restarts = 8, std::uint64_t seed = 1);

// I(mu) for a probability density on the grid of mu; the diagonal cell uses
// the closed-form self-interaction of a uniform square.
double i_mu_energy(const MeasureDensity& mu, const Quadform& Q);

// One row per n in [1, n_max]; gamma is the universal additive constant of the
// K_n formula, supplied by the caller.
std::vector<CriticalRow> critical_fields(int n_max, double eps, const LimitFields& lf,
                                         double gamma, double I0);

// min of I over probability densities on [-L, L]^2 at the given resolution,
// by simplex-projected gradient descent.
double minimize_i_mu(const Quadform& Q, double L, int n_per_unit, double tol = 1e-7);

}  // namespace pinlab

#endif
