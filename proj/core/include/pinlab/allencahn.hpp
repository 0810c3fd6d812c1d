#ifndef PINLAB_ALLENCAHN_HPP
#define PINLAB_ALLENCAHN_HPP

#include <vector>

#include "pinlab/grid.hpp"
#include "pinlab/pinning.hpp"

namespace pinlab {

struct ACSolve {
  ScalarField u;
  double beta = 0.0;
  double energy = 0.0;
  double lagrange = 0.0;            // mass-constraint multiplier at convergence
  double interface_length = 0.0;    // arc length of the u = 0 level set
  double per_length_constant = 0.0; // energy / interface_length
  int iterations = 0;
  bool converged = false;
};

struct ACOpts {
  double tol = 1e-10;  // relative energy change over a 100-step window
  int max_iter = 200000;
};

// eps int |grad u|^2 + (1/eps) int (a - u^2)^2, no extra normalizing factors
double ac_energy(const ScalarField& u, const ScalarField& a, double eps);

// tanh profile across a vertical line, mean-shifted to beta
ScalarField ac_vertical_split(const Grid& grid, double eps, double beta);
ScalarField ac_diagonal_split(const Grid& grid, double eps);

// Projected descent under the mass constraint mean(u) = beta (additive shift
// after every step).
ACSolve minimize_ac(const PinningField& p, double eps, double beta, const Grid& grid,
                    const ScalarField* init = nullptr, const ACOpts& opts = {});

// arc length of the zero level set by marching squares
double level_set_length(const ScalarField& u);

// 1-D constrained runs at the given decreasing eps values, Richardson
// extrapolated per-interface energy.
double interface_constant_1d(const std::vector<double>& eps_list);

struct ACHomogenized {
  double v_deviation = 0.0;         // || |v| - 1 || away from the interface band
  double v_interface_length = 0.0;
  ACSolve ac;
};

// u = U v factorization diagnostic for oscillatory pinning
ACHomogenized homogenized_ac_check(const PinningField& p, double eps, double beta);

}  // namespace pinlab

#endif
