#ifndef PINLAB_SCALAR_HPP
#define PINLAB_SCALAR_HPP

#include <optional>
#include <utility>

#include "pinlab/grid.hpp"
#include "pinlab/pinning.hpp"

namespace pinlab {

struct ScalarSolve {
  ScalarField U;
  double energy = 0.0;       // E^pin_eps(U)
  double el_residual = 0.0;  // max-norm Euler-Lagrange defect
  int iterations = 0;
  double grad_sup = 0.0;     // max |grad U|
  double sup_error = 0.0;    // max |U - M_target|
  bool converged = false;
};

struct CellSolve {
  ScalarField Uhat;          // on the unit square
  double chi = 0.0;          // delta / eps
  double ell = 0.0;          // integral of Uhat over the cell
  double w1p_deficit = 0.0;  // ||Uhat - ell|| in discrete W^{1,2}
  double energy = 0.0;
  double el_residual = 0.0;
  bool cell_symmetric = false;
};

struct ScalarDiagnostics {
  double sup_error = 0.0;
  double grad_bound_ratio = 0.0;  // eps * sup |grad U|
  double l2_error = 0.0;
};

// E^pin_eps(u) = 1/2 int |grad u|^2 + 1/(4 eps^2) int (a - u^2)^2 with the
// edge-based kinetic term whose gradient is the reflected 5-point Laplacian.
double scalar_energy(const ScalarField& U, const ScalarField& a, double eps);

// Unique positive minimizer with Neumann reflection.  Damped Newton with an
// energy-decrease line search; semi-implicit gradient flow fallback after
// repeated step rejections.  Initial guess sqrt(mean of a) unless given.
ScalarSolve minimize_scalar(const PinningField& p, double eps, double tol = 1e-10,
                            int max_iter = 200,
                            const ScalarField* init = nullptr);

// Unit-cell problem: -Lap Uhat = chi^2 Uhat (a0 - Uhat^2), Neumann on Q.
CellSolve cell_minimize(const CellFunction& cell, double chi, int n_per_unit,
                        double tol = 1e-10);

// Periodic extension of a symmetric cell minimizer to the (reps*delta)^2 square.
ScalarField tile_cell(const CellSolve& c, int reps, double delta);

// |LHS - RHS| of the decomposition identity with v = u / U.  When A is
// present the magnetic identity is evaluated with applied field hex.
double decomposition_residual(const ComplexField& u,
                              const std::optional<std::pair<ScalarField, ScalarField>>& A,
                              const ScalarField& U, const PinningField& p, double eps,
                              double hex = 0.0);

ScalarDiagnostics scalar_diagnostics(const ScalarSolve& s, double eps, double M_target);

}  // namespace pinlab

#endif
