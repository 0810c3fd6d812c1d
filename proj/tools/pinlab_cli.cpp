// command line front end for the pinned Ginzburg-Landau laboratory
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pinlab/allencahn.hpp"
#include "pinlab/lab.hpp"
#include "pinlab/limits.hpp"
#include "pinlab/magnetic.hpp"
#include "pinlab/scalar.hpp"

namespace {

using namespace pinlab;

struct Global {
  std::string out = ".";
  int workers = 1;
  double tol = 1e-10;
  std::uint64_t seed = 1;
  bool allow_underresolved = false;
};

CellFunction cell_from(const std::string& kind, double lo, double hi, double alpha) {
  if (kind == "constant") return CellFunction::constant(lo);
  if (kind == "checkerboard") return CellFunction::checkerboard(lo, hi);
  if (kind == "symmetric_checkerboard") return CellFunction::symmetric_checkerboard(lo, hi);
  if (kind == "trig") return CellFunction::trig(alpha);
  throw CLI::ValidationError("kind", "unknown cell kind '" + kind + "'");
}

std::ofstream open_out(const Global& g, const std::string& name) {
  std::filesystem::create_directories(g.out);
  const auto path = std::filesystem::path(g.out) / name;
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open output file " + path.string());
  f.precision(17);
  return f;
}

int check_resolution(const Global& g, double eps, double delta, int requested,
                     std::string& status) {
  const int need = static_cast<int>(std::ceil(8.0 / std::min(eps, delta)));
  if (requested >= need) return requested;
  if (g.allow_underresolved) {
    status = "underresolved";
    return requested;
  }
  return need;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"numerical laboratory for pinned Ginzburg-Landau energies"};
  app.require_subcommand(1);

  Global g;
  app.add_option("--out", g.out, "output directory");
  app.add_option("--workers", g.workers, "concurrent sweep workers");
  app.add_option("--tol", g.tol, "solver tolerance");
  app.add_option("--seed", g.seed, "base seed for random media");
  app.add_flag("--allow-underresolved", g.allow_underresolved,
               "keep the requested resolution even below 8 nodes per min(eps, delta)");

  // cell
  auto* cell_cmd = app.add_subcommand("cell", "unit-cell problem at ratio chi");
  double chi = 0.5;
  std::string kind = "symmetric_checkerboard";
  double lo = 0.5, hi = 1.5, alpha = 0.5;
  int resolution = 64;
  cell_cmd->add_option("--chi", chi, "delta / eps ratio");
  cell_cmd->add_option("--kind", kind, "cell kind");
  cell_cmd->add_option("--lo", lo, "low cell value");
  cell_cmd->add_option("--hi", hi, "high cell value");
  cell_cmd->add_option("--alpha", alpha, "trig amplitude");
  cell_cmd->add_option("--resolution", resolution, "nodes per unit");

  // scalar
  auto* scalar_cmd = app.add_subcommand("scalar", "positive minimizer on a square domain");
  double eps = 0.05, delta = 0.01, domain = 1.0;
  bool random = false;
  scalar_cmd->add_option("--eps", eps, "coherence length");
  scalar_cmd->add_option("--delta", delta, "pinning period");
  scalar_cmd->add_option("--kind", kind, "cell kind");
  scalar_cmd->add_option("--lo", lo, "low cell value");
  scalar_cmd->add_option("--hi", hi, "high cell value");
  scalar_cmd->add_option("--alpha", alpha, "trig amplitude");
  scalar_cmd->add_option("--domain", domain, "square side length");
  scalar_cmd->add_option("--resolution", resolution, "nodes per unit");
  scalar_cmd->add_flag("--random", random, "iid random checkerboard instead of periodic");

  // tile
  auto* tile_cmd = app.add_subcommand("tile", "tile a symmetric cell minimizer");
  int reps = 4;
  tile_cmd->add_option("--chi", chi, "delta / eps ratio");
  tile_cmd->add_option("--reps", reps, "cells per side");
  tile_cmd->add_option("--delta", delta, "physical cell size");
  tile_cmd->add_option("--kind", kind, "cell kind");
  tile_cmd->add_option("--lo", lo, "low cell value");
  tile_cmd->add_option("--hi", hi, "high cell value");
  tile_cmd->add_option("--resolution", resolution, "nodes per unit cell");

  // magnetic
  auto* mag_cmd = app.add_subcommand("magnetic", "magnetic minimization from a vortex imprint");
  double hex = 0.0;
  int vortices = 1;
  bool pinned = false;
  mag_cmd->add_option("--eps", eps, "coherence length");
  mag_cmd->add_option("--hex", hex, "applied field");
  mag_cmd->add_option("--vortices", vortices, "imprinted degree-1 vortices");
  mag_cmd->add_option("--domain", domain, "square side length");
  mag_cmd->add_option("--resolution", resolution, "nodes per unit");
  mag_cmd->add_flag("--pinned", pinned, "use the periodic cell medium");
  mag_cmd->add_option("--delta", delta, "pinning period (with --pinned)");
  mag_cmd->add_option("--kind", kind, "cell kind (with --pinned)");
  mag_cmd->add_option("--lo", lo, "low cell value");
  mag_cmd->add_option("--hi", hi, "high cell value");

  // limits
  auto* lim_cmd = app.add_subcommand("limits", "critical-field table of the limit model");
  int n_max = 3;
  double gamma = 0.0, i0_in = 0.0;
  bool have_i0 = false;
  lim_cmd->add_option("--eps", eps, "coherence length in the formulas");
  lim_cmd->add_option("--n-max", n_max, "largest vortex number");
  lim_cmd->add_option("--gamma", gamma, "additive universal constant");
  lim_cmd->add_option("--i0", i0_in, "precomputed min of the interaction energy")
      ->each([&](const std::string&) { have_i0 = true; });
  lim_cmd->add_option("--domain", domain, "square side length");
  lim_cmd->add_option("--resolution", resolution, "nodes per unit");

  // ac
  auto* ac_cmd = app.add_subcommand("ac", "mass-constrained Allen-Cahn minimization");
  double beta = 0.0;
  ac_cmd->add_option("--eps", eps, "interface width parameter");
  ac_cmd->add_option("--beta", beta, "prescribed mean");
  ac_cmd->add_option("--delta", delta, "pinning period (0 for uniform)");
  ac_cmd->add_option("--kind", kind, "cell kind");
  ac_cmd->add_option("--lo", lo, "low cell value");
  ac_cmd->add_option("--hi", hi, "high cell value");
  ac_cmd->add_option("--domain", domain, "square side length");
  ac_cmd->add_option("--resolution", resolution, "nodes per unit");

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "run a configured experiment sweep");
  std::string config_path;
  sweep_cmd->add_option("config", config_path, "key = value config file")->required();

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "log-log rate fit of two CSV columns");
  std::string csv_path, xcol, ycol;
  fit_cmd->add_option("csv", csv_path, "CSV produced by sweep")->required();
  fit_cmd->add_option("xcol", xcol, "abscissa column name")->required();
  fit_cmd->add_option("ycol", ycol, "ordinate column name")->required();

  // global options (--out, --tol, ...) may also appear after the subcommand
  for (auto* sc : app.get_subcommands([](const CLI::App*) { return true; }))
    sc->fallthrough();

  CLI11_PARSE(app, argc, argv);

  std::cout.precision(17);
  try {
    if (*cell_cmd) {
      const CellSolve cs = cell_minimize(cell_from(kind, lo, hi, alpha), chi,
                                         resolution, g.tol);
      ScalarField dev = cs.Uhat;
      for (double& x : dev.v) x -= 1.0;
      double sup = 0;
      for (double x : dev.v) sup = std::max(sup, std::abs(x));
      std::cout << "chi,ell,sup_dev,w1p_deficit,energy,el_residual\n"
                << cs.chi << "," << cs.ell << "," << sup << "," << cs.w1p_deficit
                << "," << cs.energy << "," << cs.el_residual << "\n";
      auto f = open_out(g, "cell.dat");
      dump_field(f, cs.Uhat);
    } else if (*scalar_cmd) {
      std::string status = "ok";
      const int res = check_resolution(g, eps, delta, resolution, status);
      const Grid grid = build_grid(domain, domain, res);
      PinningField p;
      if (random) {
        RandomCellLaw law({lo, hi}, {0.5, 0.5});
        p = sample_random(law, delta, g.seed, grid);
      } else {
        p = sample_periodic(cell_from(kind, lo, hi, alpha), delta, grid);
      }
      const ScalarSolve s = minimize_scalar(p, eps, g.tol);
      const ScalarDiagnostics d = scalar_diagnostics(s, eps, std::sqrt(p.target_mean));
      std::cout << "eps,delta,chi,kind,seed,sup_error,l2_error,grad_ratio,energy,"
                   "el_residual,iters,status\n"
                << eps << "," << delta << "," << delta / eps << "," << kind << ","
                << (random ? g.seed : 0) << "," << d.sup_error << "," << d.l2_error
                << "," << d.grad_bound_ratio << "," << s.energy << ","
                << s.el_residual << "," << s.iterations << "," << status << "\n";
      auto f = open_out(g, "scalar.dat");
      dump_field(f, s.U);
    } else if (*tile_cmd) {
      const CellSolve cs = cell_minimize(cell_from(kind, lo, hi, alpha), chi,
                                         resolution, g.tol);
      const ScalarField tiled = tile_cell(cs, reps, delta);
      auto f = open_out(g, "tile.dat");
      dump_field(f, tiled);
      std::cout << "tiled " << reps << "x" << reps << " cells to " << g.out
                << "/tile.dat\n";
    } else if (*mag_cmd) {
      std::string status = "ok";
      const int res = pinned ? check_resolution(g, eps, delta, resolution, status)
                             : std::max(resolution, static_cast<int>(std::ceil(8.0 / eps)));
      const Grid grid = build_grid(domain, domain, res);
      std::vector<std::pair<double, double>> centers;
      std::vector<int> degrees;
      for (int k = 0; k < vortices; ++k) {
        const double t = (k + 1.0) / (vortices + 1.0);
        centers.emplace_back(t * domain, 0.5 * domain);
        degrees.push_back(1);
      }
      const GLState init = make_vortex_state(grid, centers, degrees, eps, hex);
      PinningField p;
      if (pinned) p = sample_periodic(cell_from(kind, lo, hi, alpha), delta, grid);
      const GLState s = minimize_gl(pinned ? &p : nullptr, eps, hex, grid, &init);
      const VorticityReport v = vorticity(s);
      std::cout << "kinetic,potential,field,total,total_mu,status\n"
                << s.energy_parts.kinetic << "," << s.energy_parts.potential << ","
                << s.energy_parts.field << "," << s.energy_parts.total() << ","
                << v.total_mu << "," << status << "\n";
      auto f = open_out(g, "state.dat");
      save_state(f, s, eps, pinned ? delta : 0.0, pinned ? kind : "none", g.seed);
    } else if (*lim_cmd) {
      const Grid grid = build_grid(domain, domain, resolution);
      const LimitFields lf = solve_limit_fields(grid);
      const double I0 =
          have_i0 ? i0_in
                  : minimize_i_mu(lf.Qform,
                                  3.0 / std::sqrt(std::sqrt(lf.Qform.qxx * lf.Qform.qyy)),
                                  8);
      const auto rows = critical_fields(n_max, eps, lf, gamma, I0);
      std::cout << "n,f_eps,g_eps,H_n_root,H_n_asymptotic,K_n,min_w_n\n";
      for (const auto& r : rows)
        std::cout << r.n << "," << r.f_eps << "," << r.g_eps << "," << r.H_n_root
                  << "," << r.H_n_asymptotic << "," << r.K_n << "," << r.min_w_n
                  << "\n";
    } else if (*ac_cmd) {
      std::string status = "ok";
      const bool uniform = delta <= 0.0;
      const int res = uniform ? std::max(resolution, static_cast<int>(std::ceil(8.0 / eps)))
                              : check_resolution(g, eps, delta, resolution, status);
      const Grid grid = build_grid(domain, domain, res);
      const PinningField p =
          uniform ? sample_periodic(CellFunction::constant(1.0), 1.0, grid)
                  : sample_periodic(cell_from(kind, lo, hi, alpha), delta, grid);
      const ACSolve s = minimize_ac(p, eps, beta, grid);
      std::cout << "eps,delta,beta,energy,interface_length,per_length_constant,"
                   "lagrange,status\n"
                << eps << "," << delta << "," << beta << "," << s.energy << ","
                << s.interface_length << "," << s.per_length_constant << ","
                << s.lagrange << "," << status << "\n";
      auto f = open_out(g, "ac.dat");
      dump_field(f, s.u);
    } else if (*sweep_cmd) {
      const SweepConfig cfg = load_config(config_path);
      const SweepResult r = run_sweep(cfg, g.workers, g.tol, g.seed,
                                      g.allow_underresolved);
      const std::string out_name = cfg.out.empty() ? "sweep.csv" : cfg.out;
      auto f = open_out(g, out_name);
      for (const auto& line : r.lines) f << line << "\n";
      std::cout << "rows=" << r.rows << " failures=" << r.failures << " -> "
                << (std::filesystem::path(g.out) / out_name).string() << "\n";
      if (r.failures > 0) return 2;
    } else if (*fit_cmd) {
      std::ifstream f(csv_path);
      if (!f) throw std::runtime_error("cannot open " + csv_path);
      std::vector<std::string> lines;
      std::string line;
      while (std::getline(f, line)) lines.push_back(line);
      const RateFit fit = fit_csv(lines, xcol, ycol);
      std::cout << "slope=" << fit.slope << " intercept=" << fit.intercept
                << " r2=" << fit.r2 << " n=" << fit.n_points << "\n";
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
