#include "pinlab/scalar.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace pinlab {

namespace {

// Euler-Lagrange defect F(U) = -Lap U - eps^-2 U (a - U^2); zero at the
// positive minimizer.
ScalarField el_defect(const ScalarField& U, const ScalarField& a, double eps) {
  ScalarField lap = neumann_laplacian(U);
  ScalarField r(U.grid);
  const double inv_e2 = 1.0 / (eps * eps);
  for (std::size_t n = 0; n < r.v.size(); ++n)
    r.v[n] = -lap.v[n] - inv_e2 * U.v[n] * (a.v[n] - U.v[n] * U.v[n]);
  return r;
}

double max_abs(const ScalarField& f) {
  double m = 0.0;
  for (double x : f.v) m = std::max(m, std::abs(x));
  return m;
}

// Direct solve of (-Lap + diag(c)) d = rhs.  Left-multiplying by the
// quadrature weights turns -Lap into the symmetric edge stiffness matrix, so
// the weighted system K + W diag(c) is SPD and factors with LDLT.
void solve_newton_system(const ScalarField& rhs, const ScalarField& c, ScalarField& d) {
  const Grid& g = rhs.grid;
  const int N = g.size();

  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(5 * N));
  for (int j = 0; j < g.ny; ++j) {
    const double cj = (j == 0 || j == g.ny - 1) ? 0.5 : 1.0;
    for (int i = 0; i + 1 < g.nx; ++i) {
      const int p = g.idx(i, j), q = g.idx(i + 1, j);
      trip.emplace_back(p, p, cj);
      trip.emplace_back(q, q, cj);
      trip.emplace_back(p, q, -cj);
      trip.emplace_back(q, p, -cj);
    }
  }
  for (int i = 0; i < g.nx; ++i) {
    const double ci = (i == 0 || i == g.nx - 1) ? 0.5 : 1.0;
    for (int j = 0; j + 1 < g.ny; ++j) {
      const int p = g.idx(i, j), q = g.idx(i, j + 1);
      trip.emplace_back(p, p, ci);
      trip.emplace_back(q, q, ci);
      trip.emplace_back(p, q, -ci);
      trip.emplace_back(q, p, -ci);
    }
  }
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int p = g.idx(i, j);
      trip.emplace_back(p, p, g.weight(i, j) * c.v[p]);
    }

  Eigen::SparseMatrix<double> A(N, N);
  A.setFromTriplets(trip.begin(), trip.end());

  Eigen::VectorXd b(N);
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i)
      b[g.idx(i, j)] = g.weight(i, j) * rhs.v[g.idx(i, j)];

  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(A);
  if (ldlt.info() != Eigen::Success)
    throw std::runtime_error("solve_newton_system: factorization failed");
  Eigen::VectorXd x = ldlt.solve(b);

  d = ScalarField(g);
  for (int n = 0; n < N; ++n) d.v[n] = x[n];
}

}  // namespace

double scalar_energy(const ScalarField& U, const ScalarField& a, double eps) {
  const Grid& g = U.grid;
  double pot = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const double w = g.weight(i, j);
      const double d = a(i, j) - U(i, j) * U(i, j);
      pot += w * d * d;
    }
  return 0.5 * h1_seminorm_sq(U) + pot / (4.0 * eps * eps);
}

ScalarSolve minimize_scalar(const PinningField& p, double eps, double tol, int max_iter,
                            const ScalarField* init) {
  if (eps <= 0.0) throw std::invalid_argument("minimize_scalar: eps must be positive");
  const ScalarField& a = p.field;
  const Grid& g = a.grid;
  const double inv_e2 = 1.0 / (eps * eps);

  ScalarSolve s;
  if (init) {
    s.U = *init;
    if (s.U.min() <= 0.0)
      throw std::invalid_argument("minimize_scalar: initial guess must be positive");
  } else {
    const double mean_a = integrate(a) / g.area();
    s.U = ScalarField(g, std::sqrt(mean_a));
  }

  double E = scalar_energy(s.U, a, eps);
  int newton_rejections = 0;
  long flow_steps_used = 0;
  const long flow_budget = 100000;

  ScalarField r = el_defect(s.U, a, eps);
  s.el_residual = max_abs(r);

  for (int it = 0; it < max_iter && s.el_residual > tol; ++it) {
    ++s.iterations;

    // Newton direction: (-Lap + diag(eps^-2 (3U^2 - a) + shift)) d = -F
    ScalarField c(g);
    double cmin = 0.0;
    for (std::size_t n = 0; n < c.v.size(); ++n) {
      c.v[n] = inv_e2 * (3.0 * s.U.v[n] * s.U.v[n] - a.v[n]);
      cmin = std::min(cmin, c.v[n]);
    }
    if (cmin < 0.0)
      for (double& x : c.v) x += -cmin + 1e-8 * inv_e2;

    ScalarField rhs(g);
    for (std::size_t n = 0; n < rhs.v.size(); ++n) rhs.v[n] = -r.v[n];
    ScalarField d(g);
    solve_newton_system(rhs, c, d);

    // positivity line search with step halving; a step is taken when it
    // lowers the energy or shrinks the defect
    double alpha = 1.0;
    bool accepted = false;
    ScalarField Utry(g);
    for (int ls = 0; ls < 40; ++ls) {
      bool positive = true;
      for (std::size_t n = 0; n < Utry.v.size(); ++n) {
        Utry.v[n] = s.U.v[n] + alpha * d.v[n];
        if (Utry.v[n] <= 0.0) positive = false;
      }
      if (positive) {
        const double Etry = scalar_energy(Utry, a, eps);
        const double rtry = max_abs(el_defect(Utry, a, eps));
        if (Etry <= E + 1e-13 * (1.0 + std::abs(E)) || rtry < 0.9 * s.el_residual) {
          s.U = Utry;
          E = std::min(E, Etry);
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }

    if (accepted) {
      newton_rejections = 0;
    } else if (++newton_rejections >= 5 && flow_steps_used < flow_budget) {
      // globally safe fallback: semi-implicit gradient flow, implicit in the
      // Laplacian, with step control on the energy
      double tau = 0.25 * eps * eps / std::max(1.0, a.max());
      ScalarField Unew(g);
      for (int k = 0; k < 200 && flow_steps_used < flow_budget; ++k, ++flow_steps_used) {
        // (1/tau - Lap) Unew = U/tau + eps^-2 U (a - U^2)
        ScalarField crhs(g), cdiag(g, 1.0 / tau);
        for (std::size_t n = 0; n < crhs.v.size(); ++n)
          crhs.v[n] = s.U.v[n] / tau +
                      inv_e2 * s.U.v[n] * (a.v[n] - s.U.v[n] * s.U.v[n]);
        solve_newton_system(crhs, cdiag, Unew);
        bool positive = Unew.min() > 0.0;
        const double Enew = positive ? scalar_energy(Unew, a, eps) : 0.0;
        if (positive && Enew <= E + 1e-13 * (1.0 + std::abs(E))) {
          s.U = Unew;
          E = std::min(E, Enew);
          tau *= 1.1;
        } else {
          tau *= 0.5;
        }
      }
      newton_rejections = 0;
    }

    r = el_defect(s.U, a, eps);
    s.el_residual = max_abs(r);
  }

  s.energy = E;
  s.converged = s.el_residual <= tol;
  s.grad_sup = grad_sup(s.U);
  return s;
}

CellSolve cell_minimize(const CellFunction& cell, double chi, int n_per_unit, double tol) {
  if (chi <= 0.0)
    throw std::invalid_argument("cell_minimize: chi must be positive (chi = 0 degenerates)");
  const Grid g = build_grid(1.0, 1.0, n_per_unit);
  const PinningField a0 = sample_periodic(cell, 1.0, g);
  ScalarSolve s = minimize_scalar(a0, 1.0 / chi, tol);
  if (!s.converged) throw std::runtime_error("cell_minimize: Newton did not converge");

  CellSolve c;
  c.chi = chi;
  c.ell = integrate(s.U);
  c.energy = s.energy;
  c.el_residual = s.el_residual;
  c.cell_symmetric = cell.symmetric;
  ScalarField dev = s.U;
  for (double& x : dev.v) x -= c.ell;
  c.w1p_deficit = std::sqrt(integrate_product(dev, dev) + h1_seminorm_sq(dev));
  c.Uhat = std::move(s.U);
  return c;
}

ScalarField tile_cell(const CellSolve& c, int reps, double delta) {
  if (!c.cell_symmetric)
    throw std::invalid_argument("tile_cell: cell is not symmetric; traces need not match");
  if (reps < 1) throw std::invalid_argument("tile_cell: reps must be >= 1");
  if (delta <= 0.0) throw std::invalid_argument("tile_cell: delta must be positive");
  const int nc = c.Uhat.grid.nx;
  const int nt = reps * (nc - 1) + 1;
  const double l = reps * delta;
  ScalarField out(Grid(l, l, nt, nt));
  auto fold = [nc](int i) {
    const int m = i % (nc - 1);
    return m;
  };
  for (int j = 0; j < nt; ++j) {
    const int cj = (j == nt - 1) ? nc - 1 : fold(j);
    for (int i = 0; i < nt; ++i) {
      const int ci = (i == nt - 1) ? nc - 1 : fold(i);
      out(i, j) = c.Uhat(ci, cj);
    }
  }
  return out;
}

double decomposition_residual(const ComplexField& u,
                              const std::optional<std::pair<ScalarField, ScalarField>>& A,
                              const ScalarField& U, const PinningField& p, double eps,
                              double hex) {
  const Grid& g = U.grid;
  if (U.min() <= 0.0)
    throw std::invalid_argument("decomposition_residual: U touches zero");

  // node-centered differences throughout, so both sides share one quadrature
  ScalarField ur(g), ui(g);
  ur.v = u.re;
  ui.v = u.im;
  const ScalarField urx = diff_x(ur), ury = diff_y(ur);
  const ScalarField uix = diff_x(ui), uiy = diff_y(ui);

  ScalarField vr(g), vi(g);
  for (std::size_t n = 0; n < vr.v.size(); ++n) {
    vr.v[n] = ur.v[n] / U.v[n];
    vi.v[n] = ui.v[n] / U.v[n];
  }
  const ScalarField vrx = diff_x(vr), vry = diff_y(vr);
  const ScalarField vix = diff_x(vi), viy = diff_y(vi);
  const ScalarField Ux = diff_x(U), Uy = diff_y(U);

  const double inv_4e2 = 1.0 / (4.0 * eps * eps);
  double lhs = 0.0, rhs = 0.0;

  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) {
      const int n = g.idx(i, j);
      const double w = g.weight(i, j);
      const double a = p.field.v[n];
      const double uu = ur.v[n] * ur.v[n] + ui.v[n] * ui.v[n];
      const double vv = vr.v[n] * vr.v[n] + vi.v[n] * vi.v[n];
      const double U2 = U.v[n] * U.v[n];

      if (!A) {
        const double ku = urx.v[n] * urx.v[n] + ury.v[n] * ury.v[n] +
                          uix.v[n] * uix.v[n] + uiy.v[n] * uiy.v[n];
        lhs += w * (0.5 * ku + inv_4e2 * (a - uu) * (a - uu));
        const double kv = vrx.v[n] * vrx.v[n] + vry.v[n] * vry.v[n] +
                          vix.v[n] * vix.v[n] + viy.v[n] * viy.v[n];
        const double kU = Ux.v[n] * Ux.v[n] + Uy.v[n] * Uy.v[n];
        const double dU = a - U2;
        rhs += w * (0.5 * kU + inv_4e2 * dU * dU + 0.5 * U2 * kv +
                    inv_4e2 * U2 * U2 * (1.0 - vv) * (1.0 - vv));
      } else {
        const double A1 = A->first.v[n];
        const double A2 = A->second.v[n];
        // |grad u - i A u|^2 componentwise
        const double gr1 = urx.v[n] + A1 * ui.v[n];
        const double gi1 = uix.v[n] - A1 * ur.v[n];
        const double gr2 = ury.v[n] + A2 * ui.v[n];
        const double gi2 = uiy.v[n] - A2 * ur.v[n];
        const double ku = gr1 * gr1 + gi1 * gi1 + gr2 * gr2 + gi2 * gi2;
        lhs += w * (0.5 * ku + inv_4e2 * (a - uu) * (a - uu));

        const double hr1 = vrx.v[n] + A1 * vi.v[n];
        const double hi1 = vix.v[n] - A1 * vr.v[n];
        const double hr2 = vry.v[n] + A2 * vi.v[n];
        const double hi2 = viy.v[n] - A2 * vr.v[n];
        const double kv = hr1 * hr1 + hi1 * hi1 + hr2 * hr2 + hi2 * hi2;
        const double kU = Ux.v[n] * Ux.v[n] + Uy.v[n] * Uy.v[n];
        const double dU = a - U2;
        rhs += w * (0.5 * kU + inv_4e2 * dU * dU + 0.5 * U2 * kv +
                    inv_4e2 * U2 * U2 * (1.0 - vv) * (1.0 - vv));
      }
    }

  if (A) {
    // both sides carry the identical field term; it cancels in the residual
    const ScalarField curl_a = [&] {
      ScalarField cx = diff_x(A->second);
      ScalarField cy = diff_y(A->first);
      for (std::size_t n = 0; n < cx.v.size(); ++n) cx.v[n] -= cy.v[n];
      return cx;
    }();
    double field = 0.0;
    for (int j = 0; j < g.ny; ++j)
      for (int i = 0; i < g.nx; ++i) {
        const double d = curl_a(i, j) - hex;
        field += 0.5 * g.weight(i, j) * d * d;
      }
    lhs += field;
    rhs += field;
  }

  return std::abs(lhs - rhs);
}

ScalarDiagnostics scalar_diagnostics(const ScalarSolve& s, double eps, double M_target) {
  ScalarDiagnostics d;
  ScalarField dev = s.U;
  for (double& x : dev.v) x -= M_target;
  d.sup_error = 0.0;
  for (double x : dev.v) d.sup_error = std::max(d.sup_error, std::abs(x));
  d.l2_error = std::sqrt(integrate_product(dev, dev));
  d.grad_bound_ratio = eps * s.grad_sup;
  return d;
}

}  // namespace pinlab
