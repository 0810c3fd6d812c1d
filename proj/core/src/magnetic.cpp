#include "pinlab/magnetic.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pinlab {

namespace {

struct KineticFields {
  // covariant derivative components at the nodes
  ScalarField gr1, gi1, gr2, gi2;
};

KineticFields covariant(const ComplexField& u, const ScalarField& A1, const ScalarField& A2) {
  const Grid& g = u.grid;
  ScalarField ur(g), ui(g);
  ur.v = u.re;
  ui.v = u.im;
  const ScalarField urx = diff_x(ur), ury = diff_y(ur);
  const ScalarField uix = diff_x(ui), uiy = diff_y(ui);
  KineticFields k{ScalarField(g), ScalarField(g), ScalarField(g), ScalarField(g)};
  for (std::size_t n = 0; n < ur.v.size(); ++n) {
    k.gr1.v[n] = urx.v[n] + A1.v[n] * ui.v[n];
    k.gi1.v[n] = uix.v[n] - A1.v[n] * ur.v[n];
    k.gr2.v[n] = ury.v[n] + A2.v[n] * ui.v[n];
    k.gi2.v[n] = uiy.v[n] - A2.v[n] * ur.v[n];
  }
  return k;
}

ScalarField curl(const ScalarField& A1, const ScalarField& A2) {
  ScalarField c = diff_x(A2);
  const ScalarField dy = diff_y(A1);
  for (std::size_t n = 0; n < c.v.size(); ++n) c.v[n] -= dy.v[n];
  return c;
}

}  // namespace

GLEnergy gl_energy(const GLState& s, const PinningField* p, double eps) {
  if (eps <= 0.0) throw std::invalid_argument("gl_energy: eps must be positive");
  const Grid& g = s.u.grid;
  const KineticFields k = covariant(s.u, s.A1, s.A2);
  const ScalarField h = curl(s.A1, s.A2);
  const double inv_4e2 = 1.0 / (4.0 * eps * eps);

  GLEnergy e;
  e.density = ScalarField(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int n = g.idx(i, j);
      const double w = g.weight(i, j);
      const double a = p ? p->field.v[n] : 1.0;
      const double uu = s.u.re[n] * s.u.re[n] + s.u.im[n] * s.u.im[n];
      const double kin = 0.5 * (k.gr1.v[n] * k.gr1.v[n] + k.gi1.v[n] * k.gi1.v[n] +
                                k.gr2.v[n] * k.gr2.v[n] + k.gi2.v[n] * k.gi2.v[n]);
      const double pot = inv_4e2 * (a - uu) * (a - uu);
      const double fld = 0.5 * (h.v[n] - s.hex) * (h.v[n] - s.hex);
      e.density.v[n] = kin + pot + fld;
      e.parts.kinetic += w * kin;
      e.parts.potential += w * pot;
      e.parts.field += w * fld;
    }
  e.total = e.parts.total();
  return e;
}

GLState make_vortex_state(const Grid& grid,
                          const std::vector<std::pair<double, double>>& centers,
                          const std::vector<int>& degrees, double eps, double hex) {
  if (centers.size() != degrees.size())
    throw std::invalid_argument("make_vortex_state: centers/degrees size mismatch");
  GLState s;
  s.u = ComplexField(grid);
  s.A1 = ScalarField(grid);
  s.A2 = ScalarField(grid);
  s.hex = hex;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      std::complex<double> z{1.0, 0.0};
      for (std::size_t c = 0; c < centers.size(); ++c) {
        const double dx = grid.x(i) - centers[c].first;
        const double dy = grid.y(j) - centers[c].second;
        const double r = std::hypot(dx, dy);
        const double mod = std::tanh(r / eps);
        const double th = std::atan2(dy, dx);
        z *= std::polar(std::pow(mod, std::abs(degrees[c])),
                        degrees[c] * th);
      }
      s.u.set(i, j, z);
    }
  return s;
}

namespace {

// analytic gradient of the discrete energy with respect to (re u, im u)
void grad_u(const GLState& s, const PinningField* p, double eps, ScalarField& gur,
            ScalarField& gui) {
  const Grid& g = s.u.grid;
  const KineticFields k = covariant(s.u, s.A1, s.A2);
  const double inv_e2 = 1.0 / (eps * eps);

  ScalarField wgr1(g), wgi1(g), wgr2(g), wgi2(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int n = g.idx(i, j);
      const double w = g.weight(i, j);
      wgr1.v[n] = w * k.gr1.v[n];
      wgi1.v[n] = w * k.gi1.v[n];
      wgr2.v[n] = w * k.gr2.v[n];
      wgi2.v[n] = w * k.gi2.v[n];
    }
  const ScalarField tr1 = diff_x_t(wgr1), tr2 = diff_y_t(wgr2);
  const ScalarField ti1 = diff_x_t(wgi1), ti2 = diff_y_t(wgi2);

  gur = ScalarField(g);
  gui = ScalarField(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int n = g.idx(i, j);
      const double w = g.weight(i, j);
      const double a = p ? p->field.v[n] : 1.0;
      const double uu = s.u.re[n] * s.u.re[n] + s.u.im[n] * s.u.im[n];
      gur.v[n] = tr1.v[n] + tr2.v[n] -
                 wgi1.v[n] * s.A1.v[n] - wgi2.v[n] * s.A2.v[n] -
                 w * inv_e2 * (a - uu) * s.u.re[n];
      gui.v[n] = ti1.v[n] + ti2.v[n] +
                 wgr1.v[n] * s.A1.v[n] + wgr2.v[n] * s.A2.v[n] -
                 w * inv_e2 * (a - uu) * s.u.im[n];
    }
}

void grad_A(const GLState& s, ScalarField& gA1, ScalarField& gA2) {
  const Grid& g = s.u.grid;
  const KineticFields k = covariant(s.u, s.A1, s.A2);
  const ScalarField h = curl(s.A1, s.A2);

  ScalarField q(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int n = g.idx(i, j);
      q.v[n] = g.weight(i, j) * (h.v[n] - s.hex);
    }
  const ScalarField qx = diff_x_t(q);  // contributes to A2
  const ScalarField qy = diff_y_t(q);  // contributes to -A1

  gA1 = ScalarField(g);
  gA2 = ScalarField(g);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int n = g.idx(i, j);
      const double w = g.weight(i, j);
      gA1.v[n] = w * (k.gr1.v[n] * s.u.im[n] - k.gi1.v[n] * s.u.re[n]) - qy.v[n];
      gA2.v[n] = w * (k.gr2.v[n] * s.u.im[n] - k.gi2.v[n] * s.u.re[n]) + qx.v[n];
    }
}

}  // namespace

GLState minimize_gl(const PinningField* p, double eps, double hex, const Grid& grid,
                    const GLState* init, const GLOpts& opts) {
  if (eps <= 0.0) throw std::invalid_argument("minimize_gl: eps must be positive");
  if (hex < 0.0) throw std::invalid_argument("minimize_gl: hex must be nonnegative");

  GLState s;
  if (init) {
    s = *init;
    s.hex = hex;
  } else {
    s.u = ComplexField(grid);
    for (auto& r : s.u.re) r = 1.0;
    s.A1 = ScalarField(grid);
    s.A2 = ScalarField(grid);
    s.hex = hex;
  }

  double E = gl_energy(s, p, eps).total;
  double step_u = opts.init_step, step_A = opts.init_step;
  std::vector<double> window;
  window.push_back(E);

  for (int sweep = 0; sweep < opts.max_sweeps; ++sweep) {
    // u-sweep
    {
      ScalarField gur, gui;
      grad_u(s, p, eps, gur, gui);
      bool ok = false;
      for (int bt = 0; bt < 60 && !ok; ++bt) {
        GLState t = s;
        for (std::size_t n = 0; n < t.u.re.size(); ++n) {
          t.u.re[n] -= step_u * gur.v[n];
          t.u.im[n] -= step_u * gui.v[n];
        }
        const double Et = gl_energy(t, p, eps).total;
        if (Et <= E) {
          s = std::move(t);
          E = Et;
          ok = true;
          step_u *= 1.2;
        } else {
          step_u *= 0.5;
        }
      }
    }
    // A-sweep
    {
      ScalarField gA1, gA2;
      grad_A(s, gA1, gA2);
      double gmax = 0.0;
      for (std::size_t n = 0; n < gA1.v.size(); ++n)
        gmax = std::max({gmax, std::abs(gA1.v[n]), std::abs(gA2.v[n])});
      if (gmax > 0.0) {
        for (int bt = 0; bt < 60; ++bt) {
          GLState t = s;
          for (std::size_t n = 0; n < t.A1.v.size(); ++n) {
            t.A1.v[n] -= step_A * gA1.v[n];
            t.A2.v[n] -= step_A * gA2.v[n];
          }
          const double Et = gl_energy(t, p, eps).total;
          if (Et <= E) {
            s = std::move(t);
            E = Et;
            step_A *= 1.2;
            break;
          }
          step_A *= 0.5;
        }
      }
    }

    window.push_back(E);
    if (window.size() > 51) window.erase(window.begin());
    if (window.size() == 51) {
      const double drop = window.front() - window.back();
      if (drop < opts.tol * (1.0 + std::abs(window.back()))) break;
      if (drop < 0.0) throw std::runtime_error("minimize_gl: energy increased");
    }
  }

  s.energy_parts = gl_energy(s, p, eps).parts;
  return s;
}

VorticityReport vorticity(const GLState& s, const std::vector<Ball>& balls) {
  const Grid& g = s.u.grid;
  ScalarField ur(g), ui(g);
  ur.v = s.u.re;
  ui.v = s.u.im;
  const ScalarField urx = diff_x(ur), ury = diff_y(ur);
  const ScalarField uix = diff_x(ui), uiy = diff_y(ui);

  VorticityReport r;
  r.j1 = ScalarField(g);
  r.j2 = ScalarField(g);
  for (std::size_t n = 0; n < ur.v.size(); ++n) {
    const double uu = ur.v[n] * ur.v[n] + ui.v[n] * ui.v[n];
    r.j1.v[n] = ur.v[n] * uix.v[n] - ui.v[n] * urx.v[n] - uu * s.A1.v[n];
    r.j2.v[n] = ur.v[n] * uiy.v[n] - ui.v[n] * ury.v[n] - uu * s.A2.v[n];
  }
  r.mu = curl(r.j1, r.j2);
  const ScalarField ca = curl(s.A1, s.A2);
  for (std::size_t n = 0; n < r.mu.v.size(); ++n) r.mu.v[n] += ca.v[n];
  r.total_mu = integrate(r.mu);

  for (const Ball& b : balls) {
    BallSum bs;
    bs.ball = b;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i)
        if (std::hypot(g.x(i) - b.cx, g.y(j) - b.cy) <= b.radius)
          bs.circulation += g.weight(i, j) * r.mu(i, j);
    r.ball_sums.push_back(bs);
  }
  return r;
}

double weighted_gl_energy(const ComplexField& v, const ScalarField& A1, const ScalarField& A2,
                          const ScalarField& U, double eps, double hex) {
  const Grid& g = v.grid;
  const KineticFields k = covariant(v, A1, A2);
  const ScalarField h = curl(A1, A2);
  const double inv_4e2 = 1.0 / (4.0 * eps * eps);
  double E = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int n = g.idx(i, j);
      const double w = g.weight(i, j);
      const double U2 = U.v[n] * U.v[n];
      const double vv = v.re[n] * v.re[n] + v.im[n] * v.im[n];
      const double kin = 0.5 * U2 * (k.gr1.v[n] * k.gr1.v[n] + k.gi1.v[n] * k.gi1.v[n] +
                                     k.gr2.v[n] * k.gr2.v[n] + k.gi2.v[n] * k.gi2.v[n]);
      const double pot = inv_4e2 * U2 * U2 * (1.0 - vv) * (1.0 - vv);
      const double fld = 0.5 * (h.v[n] - hex) * (h.v[n] - hex);
      E += w * (kin + pot + fld);
    }
  return E;
}

QuasiminReport quasiminimizer_report(const ComplexField& u, const ScalarField& A1,
                                     const ScalarField& A2, const PinningField& p,
                                     const ScalarField& U, double eps, double hex) {
  if (U.min() <= 0.0)
    throw std::invalid_argument("quasiminimizer_report: U must be positive");
  const Grid& g = u.grid;

  GLState su;
  su.u = u;
  su.A1 = A1;
  su.A2 = A2;
  su.hex = hex;
  const double pinned = gl_energy(su, &p, eps).total;

  // scalar part E^pin(U): kinetic + potential of the real state (U, A=0)
  GLState sU;
  sU.u = ComplexField(g);
  sU.u.re = U.v;
  sU.A1 = ScalarField(g);
  sU.A2 = ScalarField(g);
  sU.hex = 0.0;
  const GLEnergy eU = gl_energy(sU, &p, eps);
  const double scalar_part = eU.parts.kinetic + eU.parts.potential;

  ComplexField v(g);
  for (std::size_t n = 0; n < v.re.size(); ++n) {
    v.re[n] = u.re[n] / U.v[n];
    v.im[n] = u.im[n] / U.v[n];
  }

  GLState sv;
  sv.u = v;
  sv.A1 = A1;
  sv.A2 = A2;
  sv.hex = hex;
  // mean-value well: (M - |v|^2)^2 with M the cell mean, which is 1 for the
  // tested media; realized by a constant pinning field
  PinningField mean_p;
  mean_p.field = ScalarField(g, p.target_mean);
  mean_p.m = p.target_mean;
  mean_p.M = p.target_mean;
  mean_p.target_mean = p.target_mean;
  const double unpinned = gl_energy(sv, &mean_p, eps).total;

  QuasiminReport r;
  r.denoised = pinned - scalar_part;
  r.unpinned_of_v = unpinned;
  r.ratio = unpinned != 0.0 ? r.denoised / unpinned : 0.0;
  r.weighted = weighted_gl_energy(v, A1, A2, U, eps, hex);
  // U lies in [sqrt(m), sqrt(M)], so the weights U^2 and U^4 lie in [m, M]
  // and [m^2, M^2]; with m <= 1 <= M the fourth-power sandwich follows
  const double lo = std::pow(p.m, 4) * unpinned;
  const double hi = std::pow(p.M, 4) * unpinned;
  r.sandwich_ok = lo <= r.weighted + 1e-12 * (1.0 + hi) &&
                  r.weighted <= hi + 1e-12 * (1.0 + hi);
  return r;
}

void save_state(std::ostream& os, const GLState& s, double eps, double delta,
                const std::string& kind, std::uint64_t seed) {
  os.precision(17);
  os << "# " << eps << " " << s.hex << " " << delta << " " << kind << " " << seed << "\n";
  ScalarField t(s.u.grid);
  t.v = s.u.re;
  dump_field(os, t);
  t.v = s.u.im;
  dump_field(os, t);
  dump_field(os, s.A1);
  dump_field(os, s.A2);
}

GLState load_state(std::istream& is, double& eps, double& delta, std::string& kind,
                   std::uint64_t& seed) {
  std::string line;
  if (!std::getline(is, line) || line.empty() || line[0] != '#')
    throw std::runtime_error("load_state: missing manifest");
  std::istringstream ms(line.substr(1));
  double hex;
  if (!(ms >> eps >> hex >> delta >> kind >> seed))
    throw std::runtime_error("load_state: malformed manifest");
  GLState s;
  ScalarField re = read_field(is);
  ScalarField im = read_field(is);
  s.A1 = read_field(is);
  s.A2 = read_field(is);
  s.u = ComplexField(re.grid);
  s.u.re = re.v;
  s.u.im = im.v;
  s.hex = hex;
  return s;
}

}  // namespace pinlab
