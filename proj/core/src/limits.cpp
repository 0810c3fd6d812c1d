#include "pinlab/limits.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "pinlab/pinning.hpp"  // hash_counter / uniform01 for restarts

namespace pinlab {

namespace {
constexpr double kPi = std::numbers::pi;

// mean of log|x| over the unit square centered at the origin, computed once
double log_center_mean() {
  static const double c = [] {
    const int n = 2048;
    const double h = 1.0 / n;
    double s = 0.0;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) {
        const double x = -0.5 + (i + 0.5) * h;
        const double y = -0.5 + (j + 0.5) * h;
        s += std::log(std::hypot(x, y));
      }
    return s * h * h;
  }();
  return c;
}

// mean of log|x-y| over (unit square)^2 centered cells; closed form
constexpr double kLogPairMean =
    std::numbers::ln2 / 3.0 + std::numbers::pi / 3.0 - 25.0 / 12.0;

}  // namespace

struct HelmholtzDirichlet::Impl {
  Grid g;
  std::vector<int> interior;        // node index -> interior index or -1
  std::vector<int> nodes;           // interior index -> node index
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;

  explicit Impl(const Grid& grid) : g(grid) {
    interior.assign(static_cast<std::size_t>(g.size()), -1);
    for (int j = 1; j + 1 < g.ny; ++j)
      for (int i = 1; i + 1 < g.nx; ++i) {
        interior[g.idx(i, j)] = static_cast<int>(nodes.size());
        nodes.push_back(g.idx(i, j));
      }
    const int N = static_cast<int>(nodes.size());
    const double inv_h2 = 1.0 / (g.h * g.h);
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(5 * N));
    for (int j = 1; j + 1 < g.ny; ++j)
      for (int i = 1; i + 1 < g.nx; ++i) {
        const int r = interior[g.idx(i, j)];
        trip.emplace_back(r, r, 4.0 * inv_h2 + 1.0);
        const int nb[4] = {g.idx(i - 1, j), g.idx(i + 1, j), g.idx(i, j - 1),
                           g.idx(i, j + 1)};
        for (int q : nb)
          if (interior[q] >= 0) trip.emplace_back(r, interior[q], -inv_h2);
      }
    Eigen::SparseMatrix<double> A(N, N);
    A.setFromTriplets(trip.begin(), trip.end());
    ldlt.compute(A);
    if (ldlt.info() != Eigen::Success)
      throw std::runtime_error("HelmholtzDirichlet: factorization failed");
  }

  ScalarField solve(const ScalarField& rhs, const ScalarField& bdry) const {
    if (!rhs.grid.same_as(g))
      throw std::invalid_argument("HelmholtzDirichlet: grid mismatch");
    const int N = static_cast<int>(nodes.size());
    const double inv_h2 = 1.0 / (g.h * g.h);
    Eigen::VectorXd b(N);
    for (int j = 1; j + 1 < g.ny; ++j)
      for (int i = 1; i + 1 < g.nx; ++i) {
        const int r = interior[g.idx(i, j)];
        double val = rhs(i, j);
        const int nb[4] = {g.idx(i - 1, j), g.idx(i + 1, j), g.idx(i, j - 1),
                           g.idx(i, j + 1)};
        for (int q : nb)
          if (interior[q] < 0) val += inv_h2 * bdry.v[q];
        b[r] = val;
      }
    Eigen::VectorXd x = ldlt.solve(b);
    ScalarField h(g);
    for (int n = 0; n < g.size(); ++n)
      h.v[n] = interior[n] >= 0 ? x[interior[n]] : bdry.v[n];
    return h;
  }
};

HelmholtzDirichlet::HelmholtzDirichlet(const Grid& g) : impl_(std::make_unique<Impl>(g)) {}
HelmholtzDirichlet::~HelmholtzDirichlet() = default;
HelmholtzDirichlet::HelmholtzDirichlet(HelmholtzDirichlet&&) noexcept = default;
HelmholtzDirichlet& HelmholtzDirichlet::operator=(HelmholtzDirichlet&&) noexcept = default;

ScalarField HelmholtzDirichlet::solve(const ScalarField& rhs, double bdry) const {
  ScalarField b(impl_->g, bdry);
  return impl_->solve(rhs, b);
}

ScalarField HelmholtzDirichlet::solve(const ScalarField& rhs, const ScalarField& bdry) const {
  return impl_->solve(rhs, bdry);
}

const Grid& HelmholtzDirichlet::grid() const { return impl_->g; }

LimitFields solve_limit_fields(const Grid& grid) {
  LimitFields lf;
  auto solver = std::make_shared<HelmholtzDirichlet>(grid);
  lf.solver = solver;

  lf.h0 = solver->solve(ScalarField(grid, 0.0), 1.0);
  lf.xi0 = lf.h0;
  for (double& x : lf.xi0.v) x -= 1.0;

  // minimizing node, uniqueness up to the immediate neighborhood
  lf.xi0_min = lf.xi0.min();
  int imin = -1, jmin = -1;
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (lf.xi0(i, j) == lf.xi0_min) {
        if (imin >= 0 && (std::abs(i - imin) > 1 || std::abs(j - jmin) > 1))
          throw std::runtime_error("solve_limit_fields: non-unique minimizer");
        if (imin < 0) {
          imin = i;
          jmin = j;
        }
      }
  if (imin < 1 || imin > grid.nx - 2 || jmin < 1 || jmin > grid.ny - 2)
    throw std::runtime_error("solve_limit_fields: minimizer on the boundary");
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i)
      if (std::abs(i - imin) > 1 || std::abs(j - jmin) > 1)
        if (lf.xi0(i, j) <= lf.xi0_min + 1e-13)
          throw std::runtime_error("solve_limit_fields: non-unique minimizer");

  const double h = grid.h;
  auto f = [&](int di, int dj) { return lf.xi0(imin + di, jmin + dj); };
  const double fx = (f(1, 0) - f(-1, 0)) / (2.0 * h);
  const double fy = (f(0, 1) - f(0, -1)) / (2.0 * h);
  const double fxx = (f(1, 0) - 2.0 * f(0, 0) + f(-1, 0)) / (h * h);
  const double fyy = (f(0, 1) - 2.0 * f(0, 0) + f(0, -1)) / (h * h);
  const double fxy = (f(1, 1) - f(1, -1) - f(-1, 1) + f(-1, -1)) / (4.0 * h * h);
  lf.px = grid.x(imin) - (fxx > 0.0 ? fx / fxx : 0.0);
  lf.py = grid.y(jmin) - (fyy > 0.0 ? fy / fyy : 0.0);
  lf.Qform = Quadform{fxx, fxy, fyy};

  lf.J0 = 0.5 * (h1_seminorm_sq(lf.xi0) + integrate_product(lf.xi0, lf.xi0));
  lf.H0c1_per_logeps = 1.0 / (2.0 * std::abs(lf.xi0_min));

  // Green regular part: -Lap R + R = (1/2pi) log|x-p| with matching Dirichlet
  // data; the node nearest p takes the cell average of the log
  ScalarField rhs(grid), bdry(grid);
  for (int j = 0; j < grid.ny; ++j)
    for (int i = 0; i < grid.nx; ++i) {
      const double r = std::hypot(grid.x(i) - lf.px, grid.y(j) - lf.py);
      const double lg = r < 0.5 * h ? std::log(h) + log_center_mean() : std::log(r);
      rhs(i, j) = lg / (2.0 * kPi);
      bdry(i, j) = lg / (2.0 * kPi);
    }
  const ScalarField R = solver->solve(rhs, bdry);
  // bilinear interpolation of R at p
  {
    const int i0 = std::clamp(static_cast<int>(lf.px / h), 0, grid.nx - 2);
    const int j0 = std::clamp(static_cast<int>(lf.py / h), 0, grid.ny - 2);
    const double tx = lf.px / h - i0;
    const double ty = lf.py / h - j0;
    const double Rp = (1 - tx) * (1 - ty) * R(i0, j0) + tx * (1 - ty) * R(i0 + 1, j0) +
                      (1 - tx) * ty * R(i0, j0 + 1) + tx * ty * R(i0 + 1, j0 + 1);
    lf.SG_pp = 2.0 * kPi * Rp;
  }
  return lf;
}

double e_lambda(const MeasureDensity& mu, double lam, const LimitFields& lf) {
  if (lam <= 0.0) throw std::invalid_argument("e_lambda: lam must be positive");
  const ScalarField h = lf.solver->solve(mu.rho, 1.0);
  ScalarField xi = h;
  for (double& x : xi.v) x -= 1.0;
  return mu.total / (2.0 * lam) +
         0.5 * (h1_seminorm_sq(xi) + integrate_product(xi, xi));
}

ELambdaSolve minimize_e_lambda(double lam, const LimitFields& lf, double tol, int max_iter) {
  if (lam <= 0.0) throw std::invalid_argument("minimize_e_lambda: lam must be positive");
  const Grid& g = lf.solver->grid();

  ELambdaSolve out;
  out.mu.rho = ScalarField(g, 0.0);
  out.mu.total = 0.0;
  double F = e_lambda(out.mu, lam, lf);

  double step = lam;
  for (int it = 0; it < max_iter; ++it) {
    ++out.iterations;
    const ScalarField h = lf.solver->solve(out.mu.rho, 1.0);
    // pointwise gradient of the smooth objective w.r.t. the density value
    ScalarField grad(g);
    for (std::size_t n = 0; n < grad.v.size(); ++n)
      grad.v[n] = 1.0 / (2.0 * lam) + (h.v[n] - 1.0);

    double defect = 0.0;
    for (int j = 1; j + 1 < g.ny; ++j)
      for (int i = 1; i + 1 < g.nx; ++i) {
        const int n = g.idx(i, j);
        defect = out.mu.rho.v[n] > 0.0
                     ? std::max(defect, std::abs(grad.v[n]))
                     : std::max(defect, std::max(0.0, -grad.v[n]));
      }
    out.kkt_defect = defect;
    if (defect <= tol) break;

    bool accepted = false;
    for (int bt = 0; bt < 60 && !accepted; ++bt) {
      MeasureDensity trial;
      trial.rho = ScalarField(g, 0.0);
      for (int j = 1; j + 1 < g.ny; ++j)
        for (int i = 1; i + 1 < g.nx; ++i) {
          const int n = g.idx(i, j);
          trial.rho.v[n] = std::max(0.0, out.mu.rho.v[n] - step * grad.v[n]);
        }
      trial.total = integrate(trial.rho);
      const double Ft = e_lambda(trial, lam, lf);
      if (Ft <= F + 1e-14 * (1.0 + std::abs(F))) {
        out.mu = std::move(trial);
        F = std::min(F, Ft);
        accepted = true;
        step *= 1.5;
      } else {
        step *= 0.5;
      }
    }
    if (!accepted) break;
  }
  out.value = F;
  return out;
}

double w_n_energy(const PointConfig& cfg, const Quadform& Q) {
  const int n = cfg.n;
  double s = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dx = cfg.points[i].first - cfg.points[j].first;
      const double dy = cfg.points[i].second - cfg.points[j].second;
      const double d = std::hypot(dx, dy);
      if (d < 1e-14) throw std::invalid_argument("w_n_energy: coincident points");
      s -= kPi * std::log(d);
    }
  for (int i = 0; i < n; ++i)
    s += kPi * n * Q(cfg.points[i].first, cfg.points[i].second);
  return s;
}

namespace {

void w_n_gradient(const PointConfig& cfg, const Quadform& Q,
                  std::vector<std::pair<double, double>>& grad) {
  const int n = cfg.n;
  grad.assign(static_cast<std::size_t>(n), {0.0, 0.0});
  for (int i = 0; i < n; ++i) {
    double gx = 0.0, gy = 0.0;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dx = cfg.points[i].first - cfg.points[j].first;
      const double dy = cfg.points[i].second - cfg.points[j].second;
      const double d2 = dx * dx + dy * dy;
      gx -= 2.0 * kPi * dx / d2;
      gy -= 2.0 * kPi * dy / d2;
    }
    const double x = cfg.points[i].first, y = cfg.points[i].second;
    gx += kPi * n * (2.0 * Q.qxx * x + 2.0 * Q.qxy * y);
    gy += kPi * n * (2.0 * Q.qxy * x + 2.0 * Q.qyy * y);
    grad[i] = {gx, gy};
  }
}

// Hessian of the point energy; 2n x 2n, ordered (x0, y0, x1, y1, ...).
Eigen::MatrixXd w_n_hessian(const PointConfig& cfg, const Quadform& Q) {
  const int n = cfg.n;
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int i = 0; i < n; ++i) {
    H(2 * i, 2 * i) += 2.0 * kPi * n * Q.qxx;
    H(2 * i, 2 * i + 1) += 2.0 * kPi * n * Q.qxy;
    H(2 * i + 1, 2 * i) += 2.0 * kPi * n * Q.qxy;
    H(2 * i + 1, 2 * i + 1) += 2.0 * kPi * n * Q.qyy;
    for (int j = 0; j < n; ++j) {
      if (i == j) continue;
      const double dx = cfg.points[i].first - cfg.points[j].first;
      const double dy = cfg.points[i].second - cfg.points[j].second;
      const double d2 = dx * dx + dy * dy;
      // second derivatives of -pi log d2
      const double hxx = -2.0 * kPi * (1.0 / d2 - 2.0 * dx * dx / (d2 * d2));
      const double hyy = -2.0 * kPi * (1.0 / d2 - 2.0 * dy * dy / (d2 * d2));
      const double hxy = 4.0 * kPi * dx * dy / (d2 * d2);
      H(2 * i, 2 * i) += hxx;
      H(2 * i + 1, 2 * i + 1) += hyy;
      H(2 * i, 2 * i + 1) += hxy;
      H(2 * i + 1, 2 * i) += hxy;
      H(2 * i, 2 * j) -= hxx;
      H(2 * i + 1, 2 * j + 1) -= hyy;
      H(2 * i, 2 * j + 1) -= hxy;
      H(2 * i + 1, 2 * j) -= hxy;
    }
  }
  return H;
}

}  // namespace

WnSolve minimize_w_n(int n, const Quadform& Q, int restarts, std::uint64_t seed) {
  if (n < 0) throw std::invalid_argument("minimize_w_n: n must be nonnegative");
  WnSolve best;
  best.cfg.n = n;
  if (n == 0) return best;
  if (Q.qxx <= 0.0 || Q.qxx * Q.qyy - Q.qxy * Q.qxy <= 0.0)
    throw std::invalid_argument("minimize_w_n: Qform must be positive definite");

  bool have = false;
  for (int r = 0; r < std::max(1, restarts); ++r) {
    PointConfig cfg;
    cfg.n = n;
    for (int i = 0; i < n; ++i) {
      // Box-Muller from the counter stream; spread scales mildly with n
      const double u1 = uniform01(hash_counter(seed, 4ull * (r * n + i) + 1)) + 1e-16;
      const double u2 = uniform01(hash_counter(seed, 4ull * (r * n + i) + 2));
      const double rad = std::sqrt(-2.0 * std::log(u1)) * 0.5 * std::sqrt(n);
      cfg.points.emplace_back(rad * std::cos(2.0 * kPi * u2),
                              rad * std::sin(2.0 * kPi * u2));
    }
    double E;
    try {
      E = w_n_energy(cfg, Q);
    } catch (const std::invalid_argument&) {
      continue;
    }
    std::vector<std::pair<double, double>> grad;
    double step = 0.05;
    double gmax = 1.0;
    for (int it = 0; it < 200000; ++it) {
      w_n_gradient(cfg, Q, grad);
      gmax = 0.0;
      for (auto& gp : grad) gmax = std::max({gmax, std::abs(gp.first), std::abs(gp.second)});
      if (gmax <= 1e-8) break;
      bool ok = false;
      for (int bt = 0; bt < 60 && !ok; ++bt) {
        PointConfig t = cfg;
        for (int i = 0; i < n; ++i) {
          t.points[i].first -= step * grad[i].first;
          t.points[i].second -= step * grad[i].second;
        }
        double Et;
        try {
          Et = w_n_energy(t, Q);
        } catch (const std::invalid_argument&) {
          step *= 0.5;
          continue;
        }
        if (Et < E) {
          cfg = std::move(t);
          E = Et;
          ok = true;
          step *= 1.1;
        } else {
          step *= 0.5;
        }
      }
      if (!ok) break;
    }
    // the plain descent stalls once the energy decrease drops below roundoff;
    // a few Newton steps take the gradient the rest of the way down
    for (int nt = 0; nt < 50 && gmax > 1e-12; ++nt) {
      w_n_gradient(cfg, Q, grad);
      gmax = 0.0;
      Eigen::VectorXd gv(2 * n);
      for (int i = 0; i < n; ++i) {
        gv[2 * i] = grad[i].first;
        gv[2 * i + 1] = grad[i].second;
        gmax = std::max({gmax, std::abs(grad[i].first), std::abs(grad[i].second)});
      }
      if (gmax <= 1e-12) break;
      Eigen::MatrixXd H = w_n_hessian(cfg, Q);
      Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
      if (ldlt.info() != Eigen::Success) break;
      Eigen::VectorXd s = ldlt.solve(-gv);
      if (!s.allFinite()) break;
      PointConfig t = cfg;
      for (int i = 0; i < n; ++i) {
        t.points[i].first += s[2 * i];
        t.points[i].second += s[2 * i + 1];
      }
      std::vector<std::pair<double, double>> gt;
      w_n_gradient(t, Q, gt);
      double gtmax = 0.0;
      for (auto& gp : gt) gtmax = std::max({gtmax, std::abs(gp.first), std::abs(gp.second)});
      if (gtmax >= gmax) break;
      cfg = std::move(t);
      gmax = gtmax;
    }
    try {
      E = w_n_energy(cfg, Q);
    } catch (const std::invalid_argument&) {
      continue;
    }
    if (gmax > 1e-8) continue;
    std::sort(cfg.points.begin(), cfg.points.end());
    if (!have || E < best.value - 1e-15 ||
        (std::abs(E - best.value) <= 1e-15 && cfg.points < best.cfg.points)) {
      best.cfg = cfg;
      best.value = E;
      best.grad_max = gmax;
      have = true;
    }
  }
  if (!have) throw std::runtime_error("minimize_w_n: no restart converged");
  return best;
}

double i_mu_energy(const MeasureDensity& mu, const Quadform& Q) {
  if (std::abs(mu.total - 1.0) > 1e-8)
    throw std::invalid_argument("i_mu_energy: density must have total mass 1");
  const Grid& g = mu.rho.grid;
  const int N = g.size();
  std::vector<double> w(static_cast<std::size_t>(N));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) w[g.idx(i, j)] = g.weight(i, j);

  double log_term = 0.0;
  for (int a = 0; a < N; ++a) {
    const double qa = w[a] * mu.rho.v[a];
    if (qa == 0.0) continue;
    const int ia = a % g.nx, ja = a / g.nx;
    for (int b = a + 1; b < N; ++b) {
      const double qb = w[b] * mu.rho.v[b];
      if (qb == 0.0) continue;
      const int ib = b % g.nx, jb = b / g.nx;
      const double d = g.h * std::hypot(ia - ib, ja - jb);
      log_term += 2.0 * qa * qb * std::log(d);
    }
    // self-interaction of the cell, uniform square of the same area
    const double side = std::sqrt(w[a]);
    log_term += qa * qa * (std::log(side) + kLogPairMean);
  }

  double q_term = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      q_term += g.weight(i, j) * mu.rho(i, j) * Q(g.x(i), g.y(j));

  return -kPi * log_term + kPi * q_term;
}

double minimize_i_mu(const Quadform& Q, double L, int n_per_unit, double tol) {
  const Grid g = build_grid(2.0 * L, 2.0 * L, n_per_unit);
  const int N = g.size();
  std::vector<double> w(static_cast<std::size_t>(N)), qv(static_cast<std::size_t>(N));
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      w[g.idx(i, j)] = g.weight(i, j);
      qv[g.idx(i, j)] = Q(g.x(i) - L, g.y(j) - L);
    }

  MeasureDensity mu;
  mu.rho = ScalarField(g, 1.0 / (4.0 * L * L));
  mu.total = 1.0;

  // objective with the well centered on the box: log part from the shared
  // routine, quadratic part from the shifted samples
  auto objective = [&](const MeasureDensity& m) {
    double q_term = 0.0;
    for (int a = 0; a < N; ++a) q_term += w[a] * m.rho.v[a] * qv[a];
    return i_mu_energy(m, Quadform{0.0, 0.0, 0.0}) + kPi * q_term;
  };

  // projection onto { rho >= 0, sum w rho = 1 } in the weighted metric
  auto project = [&](std::vector<double>& rho) {
    double lo = -1e12, hi = 1e12;
    for (int it = 0; it < 200; ++it) {
      const double tau = 0.5 * (lo + hi);
      double mass = 0.0;
      for (int a = 0; a < N; ++a) mass += w[a] * std::max(0.0, rho[a] - tau);
      (mass > 1.0 ? lo : hi) = tau;
    }
    const double tau = 0.5 * (lo + hi);
    for (int a = 0; a < N; ++a) rho[a] = std::max(0.0, rho[a] - tau);
  };

  auto gradient = [&](const MeasureDensity& m, std::vector<double>& grad) {
    // d I / d rho_a = w_a * (-2 pi sum_b w_b rho_b log|x_a-x_b| + pi Q(x_a));
    // descent uses the pointwise part (gradient in the weighted metric)
    grad.assign(static_cast<std::size_t>(N), 0.0);
    for (int a = 0; a < N; ++a) {
      const int ia = a % g.nx, ja = a / g.nx;
      double pot = 0.0;
      for (int b = 0; b < N; ++b) {
        if (w[b] * m.rho.v[b] == 0.0) continue;
        const int ib = b % g.nx, jb = b / g.nx;
        double lg;
        if (a == b)
          lg = std::log(std::sqrt(w[a])) + kLogPairMean;
        else
          lg = std::log(g.h * std::hypot(ia - ib, ja - jb));
        pot += w[b] * m.rho.v[b] * lg;
      }
      grad[a] = -2.0 * kPi * pot + kPi * qv[a];
    }
  };

  double F = objective(mu);
  double step = 0.1;
  std::vector<double> grad;
  for (int it = 0; it < 2000; ++it) {
    gradient(mu, grad);
    bool ok = false;
    double moved = 0.0;
    for (int bt = 0; bt < 40 && !ok; ++bt) {
      MeasureDensity trial = mu;
      for (int a = 0; a < N; ++a) trial.rho.v[a] = mu.rho.v[a] - step * grad[a];
      project(trial.rho.v);
      trial.total = 0.0;
      for (int a = 0; a < N; ++a) trial.total += w[a] * trial.rho.v[a];
      const double Ft = objective(trial);
      if (Ft < F) {
        moved = 0.0;
        for (int a = 0; a < N; ++a)
          moved = std::max(moved, std::abs(trial.rho.v[a] - mu.rho.v[a]));
        mu = std::move(trial);
        F = Ft;
        ok = true;
        step *= 1.2;
      } else {
        step *= 0.5;
      }
    }
    if (!ok || (it > 10 && moved * step < tol)) break;
  }
  return F;
}

std::vector<CriticalRow> critical_fields(int n_max, double eps, const LimitFields& lf,
                                         double gamma, double I0) {
  if (eps <= 0.0 || eps >= 1.0)
    throw std::invalid_argument("critical_fields: eps must lie in (0,1)");
  if (n_max < 1) throw std::invalid_argument("critical_fields: n_max must be >= 1");

  const double logeps = std::abs(std::log(eps));
  const double xim = std::abs(lf.xi0_min);
  const double SG = lf.SG_pp;

  auto g_of = [&](int n, double hex) {
    if (n == 0) return hex * hex * lf.J0;
    const double ell = std::sqrt(n / hex);
    return hex * hex * lf.J0 + kPi * n * logeps - 2.0 * kPi * n * hex * xim +
           kPi * (static_cast<double>(n) * n - n) * std::log(1.0 / ell) +
           kPi * n * static_cast<double>(n) * SG + static_cast<double>(n) * n * I0;
  };
  auto f_of = [&](int n, double hex) {
    if (n == 0) return hex * hex * lf.J0;
    const double ell = std::sqrt(n / hex);
    return hex * hex * lf.J0 + kPi * n * std::log(ell / eps) -
           2.0 * kPi * n * hex * xim + kPi * n * static_cast<double>(n) * SG +
           kPi * n * static_cast<double>(n) * std::log(1.0 / ell);
  };

  std::vector<double> min_wn(static_cast<std::size_t>(n_max) + 1, 0.0);
  for (int n = 1; n <= n_max; ++n) min_wn[n] = minimize_w_n(n, lf.Qform).value;

  std::vector<CriticalRow> rows;
  for (int n = 1; n <= n_max; ++n) {
    CriticalRow row;
    row.n = n;
    row.min_w_n = min_wn[n];

    // root of g(n, hex) = g(n-1, hex).  The difference is positive below the
    // crossing and negative above it, but also dips negative as hex -> 0
    // (the log(1/ell) term), so start the bracket near the expected location
    // instead of near zero.
    auto d = [&](double hex) { return g_of(n, hex) - g_of(n - 1, hex); };
    double lo = logeps / (2.0 * xim);
    for (int guard = 0; d(lo) <= 0.0 && guard < 400; ++guard) lo *= 0.5;
    double hi = 2.0 * lo;
    while (d(hi) > 0.0 && hi < 1e12) hi *= 2.0;
    if (d(lo) <= 0.0 || d(hi) > 0.0) {
      std::ostringstream os;
      os << "critical_fields: no bracket for n=" << n << " in [" << lo << ", " << hi << "]";
      throw std::runtime_error(os.str());
    }
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      (d(mid) > 0.0 ? lo : hi) = mid;
      if ((hi - lo) <= 1e-8 * hi) break;
    }
    row.H_n_root = 0.5 * (lo + hi);
    row.g_eps = g_of(n, row.H_n_root);
    row.f_eps = f_of(n, row.H_n_root);

    double Kn = (1.0 / kPi) * (min_wn[n] - min_wn[n - 1] + gamma +
                               (2.0 * n - 1.0) * kPi * SG);
    Kn += (n - 1) * std::log(1.0 / n);
    const double c2 = (static_cast<double>(n) * n - 3.0 * n + 2.0) / 2.0;
    if (c2 != 0.0) Kn += c2 * std::log((n - 1.0) / n);
    row.K_n = Kn;
    row.H_n_asymptotic =
        (logeps + (n - 1) * std::log(logeps / (2.0 * xim)) + Kn) / (2.0 * xim);

    rows.push_back(row);
  }
  return rows;
}

}  // namespace pinlab
