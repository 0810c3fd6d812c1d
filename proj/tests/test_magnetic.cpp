#include <doctest.h>

#include <cmath>
#include <complex>
#include <sstream>

#include "pinlab/magnetic.hpp"
#include "pinlab/scalar.hpp"

using namespace pinlab;

namespace {

GLState uniform_state(const Grid& g, double re, double hex) {
  GLState s;
  s.u = ComplexField(g);
  for (auto& v : s.u.re) v = re;
  s.A1 = ScalarField(g);
  s.A2 = ScalarField(g);
  s.hex = hex;
  return s;
}

}  // namespace

TEST_CASE("energy of uniform states is exact") {
  Grid g = build_grid(1.0, 1.0, 32);
  GLState s = uniform_state(g, 1.0, 0.0);
  GLEnergy e = gl_energy(s, nullptr, 0.5);
  CHECK(e.total == doctest::Approx(0.0).epsilon(1e-14));

  // u = 0, hex = 1: potential 1/(4 eps^2), field 1/2, per unit area
  GLState z = uniform_state(g, 0.0, 1.0);
  GLEnergy ez = gl_energy(z, nullptr, 0.5);
  CHECK(ez.parts.kinetic == doctest::Approx(0.0));
  CHECK(ez.parts.potential == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(ez.parts.field == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("energy is gauge invariant up to discretization order") {
  const double pi = std::acos(-1.0);
  auto gauge_gap = [&](int n) {
    Grid g = build_grid(1.0, 1.0, n);
    GLState s = make_vortex_state(g, {{0.5, 0.5}}, {1}, 0.15, 0.3);
    // smooth gauge function and its discrete gradient
    ScalarField phi(g);
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        phi(i, j) = 0.7 * std::sin(pi * g.x(i)) * std::cos(pi * g.y(j));
    GLState t = s;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        t.u.set(i, j, s.u.at(i, j) * std::polar(1.0, phi(i, j)));
    const ScalarField px = diff_x(phi), py = diff_y(phi);
    for (std::size_t n2 = 0; n2 < t.A1.v.size(); ++n2) {
      t.A1.v[n2] += px.v[n2];
      t.A2.v[n2] += py.v[n2];
    }
    return std::abs(gl_energy(t, nullptr, 0.15).total - gl_energy(s, nullptr, 0.15).total);
  };
  const double g64 = gauge_gap(64);
  const double g128 = gauge_gap(128);
  CHECK(g128 < g64);
  CHECK(g64 / g128 > 3.0);
}

TEST_CASE("vortex state has the prescribed modulus profile") {
  Grid g = build_grid(1.0, 1.0, 64);
  const double eps = 0.1;
  GLState s = make_vortex_state(g, {{0.5, 0.5}}, {1}, eps, 0.0);
  // node at (0.75, 0.5): r = 0.25
  const auto z = s.u.at(48, 32);
  CHECK(std::abs(z) == doctest::Approx(std::tanh(0.25 / eps)).epsilon(1e-12));
  // phase winds: value at (0.5, 0.75) is i * |u|
  const auto ztop = s.u.at(32, 48);
  CHECK(ztop.real() == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(ztop.imag() > 0.0);
}

TEST_CASE("vorticity vanishes for real states without field") {
  Grid g = build_grid(1.0, 1.0, 48);
  GLState s = uniform_state(g, 1.0, 0.0);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      s.u.set(i, j, {1.0 + 0.3 * std::sin(3.0 * g.x(i)) * g.y(j), 0.0});
  VorticityReport r = vorticity(s);
  for (double m : r.mu.v) CHECK(std::abs(m) < 1e-10);
}

TEST_CASE("unit-degree vortex carries circulation close to 2 pi") {
  Grid g = build_grid(1.0, 1.0, 256);
  GLState s = make_vortex_state(g, {{0.5, 0.5}}, {1}, 0.05, 0.0);
  VorticityReport r = vorticity(s, {{0.5, 0.5, 0.3}});
  const double two_pi = 2.0 * std::acos(-1.0);
  REQUIRE(r.ball_sums.size() == 1);
  CHECK(r.ball_sums[0].circulation == doctest::Approx(two_pi).epsilon(0.05));

  GLState s2 = make_vortex_state(g, {{0.3, 0.3}, {0.7, 0.7}}, {1, 1}, 0.05, 0.0);
  VorticityReport r2 = vorticity(s2, {{0.3, 0.3, 0.2}, {0.7, 0.7, 0.2}});
  CHECK(r2.ball_sums[0].circulation == doctest::Approx(two_pi).epsilon(0.05));
  CHECK(r2.ball_sums[1].circulation == doctest::Approx(two_pi).epsilon(0.05));
}

TEST_CASE("descent leaves the uniform ground state in place") {
  Grid g = build_grid(1.0, 1.0, 24);
  GLOpts opts;
  opts.max_sweeps = 200;
  GLState s = minimize_gl(nullptr, 0.3, 0.0, g, nullptr, opts);
  CHECK(s.energy_parts.total() < 1e-12);
  for (std::size_t n = 0; n < s.u.re.size(); ++n) {
    CHECK(s.u.re[n] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(s.u.im[n]) < 1e-10);
  }
}

TEST_CASE("descent relaxes a perturbed state without raising the energy") {
  Grid g = build_grid(1.0, 1.0, 24);
  GLState init = uniform_state(g, 1.0, 0.2);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      init.u.set(i, j, {1.0 + 0.1 * std::sin(5.0 * g.x(i)), 0.1 * std::cos(4.0 * g.y(j))});
  const double E0 = gl_energy(init, nullptr, 0.3).total;
  GLOpts opts;
  opts.max_sweeps = 500;
  GLState s = minimize_gl(nullptr, 0.3, 0.2, g, &init, opts);
  CHECK(s.energy_parts.total() <= E0);
  CHECK(s.energy_parts.total() >= 0.0);
}

TEST_CASE("constant pinning makes the denoised and unpinned energies agree") {
  Grid g = build_grid(1.0, 1.0, 64);
  PinningField p = sample_periodic(CellFunction::constant(1.0), 0.5, g);
  ScalarField U(g, 1.0);
  GLState s = make_vortex_state(g, {{0.5, 0.5}}, {1}, 0.1, 0.0);
  QuasiminReport r = quasiminimizer_report(s.u, s.A1, s.A2, p, U, 0.1, 0.0);
  CHECK(r.unpinned_of_v > 0.1);
  CHECK(r.ratio == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(r.weighted == doctest::Approx(r.unpinned_of_v).epsilon(1e-10));
  CHECK(r.sandwich_ok);
}

TEST_CASE("checkpoint round-trips the state and manifest") {
  Grid g = build_grid(1.0, 1.0, 16);
  GLState s = make_vortex_state(g, {{0.4, 0.6}}, {1}, 0.2, 0.7);
  std::stringstream ss;
  save_state(ss, s, 0.2, 0.05, "checkerboard", 99);

  double eps = 0.0, delta = 0.0;
  std::string kind;
  std::uint64_t seed = 0;
  GLState r = load_state(ss, eps, delta, kind, seed);
  CHECK(eps == doctest::Approx(0.2));
  CHECK(delta == doctest::Approx(0.05));
  CHECK(kind == "checkerboard");
  CHECK(seed == 99);
  CHECK(r.hex == doctest::Approx(0.7));
  REQUIRE(r.u.grid.same_as(g));
  for (std::size_t n = 0; n < s.u.re.size(); ++n) {
    CHECK(r.u.re[n] == doctest::Approx(s.u.re[n]).epsilon(1e-15));
    CHECK(r.u.im[n] == doctest::Approx(s.u.im[n]).epsilon(1e-15));
  }
}
