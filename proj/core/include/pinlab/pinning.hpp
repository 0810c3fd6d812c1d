#ifndef PINLAB_PINNING_HPP
#define PINLAB_PINNING_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pinlab/grid.hpp"

namespace pinlab {

enum class CellKind { Constant, Checkerboard2x2, PiecewiseK, Trig };

// One unit cell of the periodic pinning coefficient.  Values are strictly
// inside the essential bounds (m, M) and the squared cell mean is cached.
struct CellFunction {
  CellKind kind = CellKind::Constant;
  std::vector<double> values;  // constant: 1 value; checkerboard: 2; piecewise_k: k*k
  int k = 1;                   // block count per side for PiecewiseK
  double alpha = 0.0;          // Trig: 1 + alpha*cos(2 pi x)*cos(2 pi y)
  bool symmetric = false;
  double m = 0.0, M = 0.0;     // essential bounds
  double mean = 0.0;           // M^2 = cell mean of a0

  static CellFunction constant(double c);
  static CellFunction checkerboard(double lo, double hi);
  // 4x4-block mirror-even checkerboard; traces of its cell minimizer match
  // across opposite faces, so it is safe to tile.
  static CellFunction symmetric_checkerboard(double lo, double hi);
  static CellFunction piecewise(int k, std::vector<double> values, bool symmetric_flag);
  static CellFunction trig(double alpha);

  // a0 evaluated on the unit cell, extended 1-periodically via fractional parts.
  double eval(double x, double y) const;
};

// Finite law for one random checkerboard cell value.
struct RandomCellLaw {
  std::vector<double> support;
  std::vector<double> prob;
  double m = 0.0, M = 0.0;

  RandomCellLaw(std::vector<double> support, std::vector<double> prob);
  double expectation() const;
};

struct PinningField {
  ScalarField field;
  double delta = 0.0;
  double epsilon_hint = 0.0;
  double m = 0.0, M = 0.0;
  double target_mean = 0.0;  // cell mean (periodic) or expectation (random)
  bool aliasing_warning = false;
  std::optional<CellFunction> cell;  // set for periodic fields
  std::uint64_t seed = 0;            // random fields only
  double shift_x = 0.0, shift_y = 0.0;
};

// a_eps(x) = a0(x/delta), sampled pointwise at the nodes.
PinningField sample_periodic(const CellFunction& cell, double delta, const Grid& grid);

// Random checkerboard: iid draws from the law on the shifted lattice
// s + delta*Z^2, shift s uniform in [0,delta)^2 from the same seed.  The cell
// index is hashed into the stream so the field is traversal-order independent.
PinningField sample_random(const RandomCellLaw& law, double delta, std::uint64_t seed,
                           const Grid& grid);

// |mean over G of a_eps - target|, target = cell mean or E(a1).
double empirical_mean_drift(const PinningField& p);

// counter-based generator used by sample_random; exposed for tests
std::uint64_t hash_counter(std::uint64_t seed, std::uint64_t k);
double uniform01(std::uint64_t bits);

}  // namespace pinlab

#endif
