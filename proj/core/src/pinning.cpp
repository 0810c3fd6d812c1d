#include "pinlab/pinning.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pinlab {

namespace {

double frac(double x) { return x - std::floor(x); }

// strict essential bounds around the attained value range
void set_bounds(CellFunction& c, double vmin, double vmax) {
  c.m = vmin * (1.0 - 1e-6) - 1e-12;
  c.M = vmax * (1.0 + 1e-6) + 1e-12;
  if (c.m <= 0.0) throw std::invalid_argument("CellFunction: values must be positive");
}

}  // namespace

CellFunction CellFunction::constant(double c) {
  if (c <= 0.0) throw std::invalid_argument("CellFunction: non-positive value");
  CellFunction f;
  f.kind = CellKind::Constant;
  f.values = {c};
  f.symmetric = true;
  f.mean = c;
  set_bounds(f, c, c);
  return f;
}

CellFunction CellFunction::checkerboard(double lo, double hi) {
  if (lo <= 0.0 || hi <= lo)
    throw std::invalid_argument("CellFunction: need 0 < lo < hi");
  CellFunction f;
  f.kind = CellKind::Checkerboard2x2;
  f.values = {lo, hi};
  f.k = 2;
  // not mirror-even: the cell minimizer's traces on opposite faces differ,
  // so this cell must not be tiled (use symmetric_checkerboard for that)
  f.symmetric = false;
  f.mean = 0.5 * (lo + hi);
  set_bounds(f, lo, hi);
  return f;
}

CellFunction CellFunction::symmetric_checkerboard(double lo, double hi) {
  if (lo <= 0.0 || hi <= lo)
    throw std::invalid_argument("CellFunction: need 0 < lo < hi");
  std::vector<double> v(16);
  for (int by = 0; by < 4; ++by)
    for (int bx = 0; bx < 4; ++bx) {
      const int qx = (bx == 0 || bx == 3) ? 0 : 1;
      const int qy = (by == 0 || by == 3) ? 0 : 1;
      v[by * 4 + bx] = ((qx + qy) % 2 == 0) ? lo : hi;
    }
  return piecewise(4, std::move(v), true);
}

CellFunction CellFunction::piecewise(int k, std::vector<double> values, bool symmetric_flag) {
  if (k < 1 || static_cast<int>(values.size()) != k * k)
    throw std::invalid_argument("CellFunction: piecewise needs k*k values");
  CellFunction f;
  f.kind = CellKind::PiecewiseK;
  f.k = k;
  f.values = std::move(values);
  double vmin = f.values[0], vmax = f.values[0], sum = 0.0;
  for (double v : f.values) {
    vmin = std::min(vmin, v);
    vmax = std::max(vmax, v);
    sum += v;
  }
  f.mean = sum / (k * k);
  set_bounds(f, vmin, vmax);
  if (symmetric_flag) {
    // mirror evenness about both cell midlines; this is what makes the cell
    // minimizer's traces on opposite faces coincide
    for (int by = 0; by < k; ++by)
      for (int bx = 0; bx < k; ++bx)
        if (f.values[by * k + bx] != f.values[by * k + (k - 1 - bx)] ||
            f.values[by * k + bx] != f.values[(k - 1 - by) * k + bx])
          throw std::invalid_argument("CellFunction: values violate symmetry flag");
  }
  f.symmetric = symmetric_flag;
  return f;
}

CellFunction CellFunction::trig(double alpha) {
  if (std::abs(alpha) >= 1.0)
    throw std::invalid_argument("CellFunction: |alpha| must be < 1");
  CellFunction f;
  f.kind = CellKind::Trig;
  f.alpha = alpha;
  f.symmetric = false;
  f.mean = 1.0;  // the cosine product integrates to zero over the cell
  set_bounds(f, 1.0 - std::abs(alpha), 1.0 + std::abs(alpha));
  return f;
}

double CellFunction::eval(double x, double y) const {
  const double fx = frac(x);
  const double fy = frac(y);
  switch (kind) {
    case CellKind::Constant:
      return values[0];
    case CellKind::Checkerboard2x2: {
      const int bx = (fx < 0.5) ? 0 : 1;
      const int by = (fy < 0.5) ? 0 : 1;
      return values[(bx + by) % 2];
    }
    case CellKind::PiecewiseK: {
      // at a block boundary average the adjacent blocks, so sampling a
      // mirror-even cell on a symmetric grid stays mirror-even
      const double tol = 1e-9;
      auto blocks = [&](double f, int& lo, int& hi) {
        const double t = f * k;
        const double r = std::round(t);
        if (std::abs(t - r) < tol && r > 0.0 && r < k) {
          lo = static_cast<int>(r) - 1;
          hi = static_cast<int>(r);
        } else {
          lo = hi = std::min(static_cast<int>(t), k - 1);
        }
      };
      int bx0, bx1, by0, by1;
      blocks(fx, bx0, bx1);
      blocks(fy, by0, by1);
      return 0.25 * (values[by0 * k + bx0] + values[by0 * k + bx1] +
                     values[by1 * k + bx0] + values[by1 * k + bx1]);
    }
    case CellKind::Trig:
      return 1.0 + alpha * std::cos(2.0 * std::numbers::pi * fx) *
                       std::cos(2.0 * std::numbers::pi * fy);
  }
  return 0.0;
}

RandomCellLaw::RandomCellLaw(std::vector<double> s, std::vector<double> p)
    : support(std::move(s)), prob(std::move(p)) {
  if (support.empty()) throw std::invalid_argument("RandomCellLaw: empty support");
  if (prob.size() != support.size())
    throw std::invalid_argument("RandomCellLaw: size mismatch");
  double sum = 0.0;
  double vmin = support[0], vmax = support[0];
  for (std::size_t i = 0; i < prob.size(); ++i) {
    if (prob[i] < 0.0) throw std::invalid_argument("RandomCellLaw: negative probability");
    if (support[i] <= 0.0) throw std::invalid_argument("RandomCellLaw: non-positive value");
    sum += prob[i];
    vmin = std::min(vmin, support[i]);
    vmax = std::max(vmax, support[i]);
  }
  if (std::abs(sum - 1.0) > 1e-12)
    throw std::invalid_argument("RandomCellLaw: probabilities must sum to 1");
  m = vmin * (1.0 - 1e-6) - 1e-12;
  M = vmax * (1.0 + 1e-6) + 1e-12;
}

double RandomCellLaw::expectation() const {
  double e = 0.0;
  for (std::size_t i = 0; i < support.size(); ++i) e += support[i] * prob[i];
  return e;
}

// SplitMix64; the cell index is folded into the seed so values do not depend
// on traversal order.
std::uint64_t hash_counter(std::uint64_t seed, std::uint64_t k) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (k + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

double uniform01(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

PinningField sample_periodic(const CellFunction& cell, double delta, const Grid& grid) {
  if (delta <= 0.0) throw std::invalid_argument("sample_periodic: delta must be positive");
  PinningField p;
  p.field = ScalarField(grid);
  p.delta = delta;
  p.m = cell.m;
  p.M = cell.M;
  p.target_mean = cell.mean;
  p.cell = cell;
  p.aliasing_warning = delta < grid.h / 4.0;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      p.field(i, j) = cell.eval(grid.x(i) / delta, grid.y(j) / delta);
  return p;
}

PinningField sample_random(const RandomCellLaw& law, double delta, std::uint64_t seed,
                           const Grid& grid) {
  if (delta <= 0.0) throw std::invalid_argument("sample_random: delta must be positive");
  PinningField p;
  p.field = ScalarField(grid);
  p.delta = delta;
  p.m = law.m;
  p.M = law.M;
  p.target_mean = law.expectation();
  p.seed = seed;
  p.aliasing_warning = delta < grid.h / 4.0;
  // stationarizing lattice shift, from the same stream
  p.shift_x = delta * uniform01(hash_counter(seed, 0xffffffffffff0001ULL));
  p.shift_y = delta * uniform01(hash_counter(seed, 0xffffffffffff0002ULL));

  std::vector<double> cdf(law.prob.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < law.prob.size(); ++i) {
    acc += law.prob[i];
    cdf[i] = acc;
  }
  cdf.back() = 1.0;

  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const auto ci = static_cast<std::int64_t>(std::floor((grid.x(i) - p.shift_x) / delta));
      const auto cj = static_cast<std::int64_t>(std::floor((grid.y(j) - p.shift_y) / delta));
      // pair the two signed cell indices into one counter
      const std::uint64_t key =
          (static_cast<std::uint64_t>(ci + 0x40000000LL) << 32) |
          static_cast<std::uint64_t>(cj + 0x40000000LL);
      const double u = uniform01(hash_counter(seed, key));
      std::size_t pick = 0;
      while (pick + 1 < cdf.size() && u >= cdf[pick]) ++pick;
      p.field(i, j) = law.support[pick];
    }
  return p;
}

double empirical_mean_drift(const PinningField& p) {
  const double mean = integrate(p.field) / p.field.grid.area();
  return std::abs(mean - p.target_mean);
}

}  // namespace pinlab
