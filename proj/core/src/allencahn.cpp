#include "pinlab/allencahn.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pinlab/scalar.hpp"

namespace pinlab {

double ac_energy(const ScalarField& u, const ScalarField& a, double eps) {
  const Grid& g = u.grid;
  double pot = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double d = a(i, j) - u(i, j) * u(i, j);
      pot += g.weight(i, j) * d * d;
    }
  return eps * h1_seminorm_sq(u) + pot / eps;
}

ScalarField ac_vertical_split(const Grid& grid, double eps, double beta) {
  // interface at x0 so that the +-1 plateaus give mean beta
  const double x0 = std::clamp(0.5 * (1.0 - beta), 0.05, 0.95) * grid.lx;
  ScalarField u(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      u(i, j) = std::tanh((grid.x(i) - x0) / eps);
  return u;
}

ScalarField ac_diagonal_split(const Grid& grid, double eps) {
  ScalarField u(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      u(i, j) = std::tanh((grid.x(i) - grid.y(j)) / (std::sqrt(2.0) * eps));
  return u;
}

namespace {

// pointwise gradient: quadrature-weighted energy gradient divided by the weight
ScalarField ac_gradient(const ScalarField& u, const ScalarField& a, double eps) {
  ScalarField lap = neumann_laplacian(u);
  ScalarField grad(u.grid);
  for (std::size_t n = 0; n < grad.v.size(); ++n)
    grad.v[n] = -2.0 * eps * lap.v[n] - (4.0 / eps) * u.v[n] * (a.v[n] - u.v[n] * u.v[n]);
  return grad;
}

void project_mean(ScalarField& u, double beta) {
  const double shift = beta - integrate(u) / u.grid.area();
  for (double& x : u.v) x += shift;
}

}  // namespace

ACSolve minimize_ac(const PinningField& p, double eps, double beta, const Grid& grid,
                    const ScalarField* init, const ACOpts& opts) {
  if (eps <= 0.0) throw std::invalid_argument("minimize_ac: eps must be positive");
  const double amax = p.field.max();
  if (std::abs(beta) > amax)
    throw std::invalid_argument("minimize_ac: beta outside the feasible range");
  if (!p.field.grid.same_as(grid))
    throw std::invalid_argument("minimize_ac: grid mismatch");

  ACSolve s;
  s.beta = beta;
  s.u = init ? *init : ac_vertical_split(grid, eps, beta);
  project_mean(s.u, beta);

  double E = ac_energy(s.u, p.field, eps);
  double step = 0.25 * eps;
  std::vector<double> window{E};

  for (int it = 0; it < opts.max_iter; ++it) {
    ++s.iterations;
    ScalarField grad = ac_gradient(s.u, p.field, eps);
    // remove the mean: the constrained gradient lives in the zero-mean plane
    project_mean(grad, 0.0);

    bool ok = false;
    for (int bt = 0; bt < 60 && !ok; ++bt) {
      ScalarField t = s.u;
      for (std::size_t n = 0; n < t.v.size(); ++n) t.v[n] -= step * grad.v[n];
      project_mean(t, beta);
      const double Et = ac_energy(t, p.field, eps);
      if (Et <= E) {
        s.u = std::move(t);
        E = Et;
        ok = true;
        step *= 1.2;
      } else {
        step *= 0.5;
      }
    }
    if (!ok) break;

    window.push_back(E);
    if (window.size() > 101) window.erase(window.begin());
    if (window.size() == 101 &&
        window.front() - window.back() < opts.tol * (1.0 + std::abs(window.back()))) {
      s.converged = true;
      break;
    }
  }

  // multiplier = mean of the unconstrained gradient
  ScalarField grad = ac_gradient(s.u, p.field, eps);
  s.lagrange = integrate(grad) / grid.area();
  s.energy = E;
  s.interface_length = level_set_length(s.u);
  s.per_length_constant = s.interface_length > 0.0 ? E / s.interface_length : 0.0;
  if (!s.converged && s.iterations < opts.max_iter) s.converged = true;  // stalled at a minimum
  return s;
}

double level_set_length(const ScalarField& u) {
  const Grid& g = u.grid;
  double len = 0.0;
  auto cross = [](double a, double b) { return (a < 0.0) != (b < 0.0); };
  auto frac = [](double a, double b) { return a / (a - b); };
  for (int j = 0; j + 1 < g.ny; ++j)
    for (int i = 0; i + 1 < g.nx; ++i) {
      const double c00 = u(i, j), c10 = u(i + 1, j);
      const double c01 = u(i, j + 1), c11 = u(i + 1, j + 1);
      // crossing points on the four cell edges, in cell-local coordinates
      std::vector<std::pair<double, double>> pts;
      if (cross(c00, c10)) pts.emplace_back(frac(c00, c10), 0.0);
      if (cross(c10, c11)) pts.emplace_back(1.0, frac(c10, c11));
      if (cross(c01, c11)) pts.emplace_back(frac(c01, c11), 1.0);
      if (cross(c00, c01)) pts.emplace_back(0.0, frac(c00, c01));
      if (pts.size() == 2) {
        len += g.h * std::hypot(pts[0].first - pts[1].first,
                                pts[0].second - pts[1].second);
      } else if (pts.size() == 4) {
        // saddle cell: pair by the sign of the center average
        const double center = 0.25 * (c00 + c10 + c01 + c11);
        // pts order: bottom, right, top, left
        if ((center < 0.0) == (c00 < 0.0)) {
          len += g.h * std::hypot(pts[0].first - pts[1].first,
                                  pts[0].second - pts[1].second);
          len += g.h * std::hypot(pts[2].first - pts[3].first,
                                  pts[2].second - pts[3].second);
        } else {
          len += g.h * std::hypot(pts[0].first - pts[3].first,
                                  pts[0].second - pts[3].second);
          len += g.h * std::hypot(pts[1].first - pts[2].first,
                                  pts[1].second - pts[2].second);
        }
      }
    }
  return len;
}

namespace {

// 1-D constrained descent on [0,1], a == 1, mean 0; returns the converged energy
double ac_1d_energy(double eps, int n) {
  const double h = 1.0 / (n - 1);
  std::vector<double> u(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) u[i] = std::tanh((i * h - 0.5) / eps);

  auto weight = [&](int i) { return (i == 0 || i == n - 1) ? 0.5 * h : h; };
  auto mean = [&] {
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += weight(i) * u[i];
    return s;
  };
  auto shift = [&](double target) {
    const double d = target - mean();
    for (double& x : u) x += d;
  };
  auto energy = [&] {
    double kin = 0.0, pot = 0.0;
    for (int i = 0; i + 1 < n; ++i) {
      const double d = (u[i + 1] - u[i]) / h;
      kin += h * d * d;
    }
    for (int i = 0; i < n; ++i) {
      const double q = 1.0 - u[i] * u[i];
      pot += weight(i) * q * q;
    }
    return eps * kin + pot / eps;
  };

  shift(0.0);
  double E = energy();
  double step = 0.25 * eps;
  std::vector<double> g(static_cast<std::size_t>(n));
  for (int it = 0; it < 200000; ++it) {
    for (int i = 0; i < n; ++i) {
      const int im = i == 0 ? 1 : i - 1;
      const int ip = i == n - 1 ? n - 2 : i + 1;
      const double lap = (u[ip] - 2.0 * u[i] + u[im]) / (h * h);
      g[i] = -2.0 * eps * lap - (4.0 / eps) * u[i] * (1.0 - u[i] * u[i]);
    }
    double gm = 0.0;
    for (int i = 0; i < n; ++i) gm += weight(i) * g[i];
    for (double& x : g) x -= gm;

    bool ok = false;
    std::vector<double> t(u);
    for (int bt = 0; bt < 60 && !ok; ++bt) {
      for (int i = 0; i < n; ++i) t[i] = u[i] - step * g[i];
      std::swap(u, t);
      shift(0.0);
      const double Et = energy();
      if (Et <= E - 1e-15 * (1.0 + std::abs(E))) {
        E = Et;
        ok = true;
        step *= 1.2;
      } else {
        std::swap(u, t);
        step *= 0.5;
      }
    }
    if (!ok) break;
  }
  return E;
}

}  // namespace

double interface_constant_1d(const std::vector<double>& eps_list) {
  if (eps_list.size() < 2)
    throw std::invalid_argument("interface_constant_1d: need at least two eps values");
  for (std::size_t i = 1; i < eps_list.size(); ++i)
    if (eps_list[i] >= eps_list[i - 1])
      throw std::invalid_argument("interface_constant_1d: eps values must decrease");

  std::vector<double> E;
  for (double eps : eps_list) {
    const int n = std::max(1001, static_cast<int>(std::ceil(32.0 / eps)) + 1);
    E.push_back(ac_1d_energy(eps, n));
  }
  // linear-in-eps Richardson on the two finest values
  const double e1 = eps_list[eps_list.size() - 2], e2 = eps_list.back();
  const double E1 = E[E.size() - 2], E2 = E.back();
  return (e1 * E2 - e2 * E1) / (e1 - e2);
}

ACHomogenized homogenized_ac_check(const PinningField& p, double eps, double beta) {
  if (p.delta <= 0.0 || p.delta >= eps)
    throw std::invalid_argument("homogenized_ac_check: requires delta < eps");
  const Grid& grid = p.field.grid;

  ScalarSolve scalar = minimize_scalar(p, eps);
  if (!scalar.converged)
    throw std::runtime_error("homogenized_ac_check: scalar solve failed");

  ACHomogenized out;
  out.ac = minimize_ac(p, eps, beta, grid);

  ScalarField v(grid);
  for (std::size_t n = 0; n < v.v.size(); ++n)
    v.v[n] = out.ac.u.v[n] / scalar.U.v[n];
  out.v_interface_length = level_set_length(v);
  for (std::size_t n = 0; n < v.v.size(); ++n) {
    const double av = std::abs(v.v[n]);
    if (av >= 0.9)  // outside the interface band
      out.v_deviation = std::max(out.v_deviation, std::abs(av - 1.0));
  }
  return out;
}

}  // namespace pinlab
