#include "pinlab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace pinlab {

Grid::Grid(double lx_, double ly_, int nx_, int ny_)
    : lx(lx_), ly(ly_), nx(nx_), ny(ny_) {
  if (lx <= 0.0 || ly <= 0.0)
    throw std::invalid_argument("Grid: non-positive dimensions");
  if (nx < 3 || ny < 3) throw std::invalid_argument("Grid: nx, ny must be >= 3");
  const double hx = lx / (nx - 1);
  const double hy = ly / (ny - 1);
  if (std::abs(hx - hy) > 1e-12 * std::max(hx, hy))
    throw std::invalid_argument("Grid: spacing mismatch between axes");
  h = hx;
}

Grid build_grid(double lx, double ly, int n_per_unit) {
  if (lx <= 0.0 || ly <= 0.0)
    throw std::invalid_argument("build_grid: non-positive dimensions");
  if (n_per_unit < 2) throw std::invalid_argument("build_grid: resolution too small");
  const double cx = lx * n_per_unit;
  const double cy = ly * n_per_unit;
  const auto near_int = [](double c) {
    return std::abs(c - std::round(c)) <= 1e-9 * std::max(1.0, c);
  };
  if (!near_int(cx) || !near_int(cy))
    throw std::invalid_argument("build_grid: side lengths incompatible with spacing");
  const int nx = static_cast<int>(std::llround(cx)) + 1;
  const int ny = static_cast<int>(std::llround(cy)) + 1;
  return Grid(lx, ly, nx, ny);
}

double ScalarField::min() const { return *std::min_element(v.begin(), v.end()); }
double ScalarField::max() const { return *std::max_element(v.begin(), v.end()); }

bool ScalarField::all_finite() const {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

ScalarField neumann_laplacian(const ScalarField& f) {
  const Grid& g = f.grid;
  ScalarField out(g);
  const double inv_h2 = 1.0 / (g.h * g.h);
  for (int j = 0; j < g.ny; ++j) {
    const int jm = (j == 0) ? 1 : j - 1;
    const int jp = (j == g.ny - 1) ? g.ny - 2 : j + 1;
    for (int i = 0; i < g.nx; ++i) {
      const int im = (i == 0) ? 1 : i - 1;
      const int ip = (i == g.nx - 1) ? g.nx - 2 : i + 1;
      out(i, j) = (f(ip, j) + f(im, j) + f(i, jp) + f(i, jm) - 4.0 * f(i, j)) * inv_h2;
    }
  }
  return out;
}

double integrate(const ScalarField& f) {
  const Grid& g = f.grid;
  double s = 0.0;
  for (int j = 0; j < g.ny; ++j)
    for (int i = 0; i < g.nx; ++i) s += g.weight(i, j) * f(i, j);
  return s;
}

double integrate_product(const ScalarField& f, const ScalarField& g) {
  const Grid& gr = f.grid;
  double s = 0.0;
  for (int j = 0; j < gr.ny; ++j)
    for (int i = 0; i < gr.nx; ++i) s += gr.weight(i, j) * f(i, j) * g(i, j);
  return s;
}

double h1_inner(const ScalarField& f, const ScalarField& g) {
  const Grid& gr = f.grid;
  double s = 0.0;
  // x-edges, trapezoid weight in j
  for (int j = 0; j < gr.ny; ++j) {
    const double cj = (j == 0 || j == gr.ny - 1) ? 0.5 : 1.0;
    for (int i = 0; i + 1 < gr.nx; ++i)
      s += cj * (f(i + 1, j) - f(i, j)) * (g(i + 1, j) - g(i, j));
  }
  // y-edges, trapezoid weight in i
  for (int i = 0; i < gr.nx; ++i) {
    const double ci = (i == 0 || i == gr.nx - 1) ? 0.5 : 1.0;
    for (int j = 0; j + 1 < gr.ny; ++j)
      s += ci * (f(i, j + 1) - f(i, j)) * (g(i, j + 1) - g(i, j));
  }
  return s;
}

double h1_seminorm_sq(const ScalarField& f) { return h1_inner(f, f); }

ScalarField diff_x(const ScalarField& f) {
  const Grid& g = f.grid;
  ScalarField out(g);
  const double inv_2h = 0.5 / g.h;
  const double inv_h = 1.0 / g.h;
  for (int j = 0; j < g.ny; ++j) {
    out(0, j) = (f(1, j) - f(0, j)) * inv_h;
    for (int i = 1; i + 1 < g.nx; ++i) out(i, j) = (f(i + 1, j) - f(i - 1, j)) * inv_2h;
    out(g.nx - 1, j) = (f(g.nx - 1, j) - f(g.nx - 2, j)) * inv_h;
  }
  return out;
}

ScalarField diff_y(const ScalarField& f) {
  const Grid& g = f.grid;
  ScalarField out(g);
  const double inv_2h = 0.5 / g.h;
  const double inv_h = 1.0 / g.h;
  for (int i = 0; i < g.nx; ++i) {
    out(i, 0) = (f(i, 1) - f(i, 0)) * inv_h;
    for (int j = 1; j + 1 < g.ny; ++j) out(i, j) = (f(i, j + 1) - f(i, j - 1)) * inv_2h;
    out(i, g.ny - 1) = (f(i, g.ny - 1) - f(i, g.ny - 2)) * inv_h;
  }
  return out;
}

ScalarField diff_x_t(const ScalarField& f) {
  const Grid& g = f.grid;
  ScalarField out(g);
  const double inv_2h = 0.5 / g.h;
  const double inv_h = 1.0 / g.h;
  for (int j = 0; j < g.ny; ++j) {
    // row 0: -f0/h - f1/(2h); row 1: f0/h - f2/(2h); etc.
    out(0, j) -= f(0, j) * inv_h;
    out(1, j) += f(0, j) * inv_h;
    for (int i = 1; i + 1 < g.nx; ++i) {
      out(i + 1, j) += f(i, j) * inv_2h;
      out(i - 1, j) -= f(i, j) * inv_2h;
    }
    out(g.nx - 1, j) += f(g.nx - 1, j) * inv_h;
    out(g.nx - 2, j) -= f(g.nx - 1, j) * inv_h;
  }
  return out;
}

ScalarField diff_y_t(const ScalarField& f) {
  const Grid& g = f.grid;
  ScalarField out(g);
  const double inv_2h = 0.5 / g.h;
  const double inv_h = 1.0 / g.h;
  for (int i = 0; i < g.nx; ++i) {
    out(i, 0) -= f(i, 0) * inv_h;
    out(i, 1) += f(i, 0) * inv_h;
    for (int j = 1; j + 1 < g.ny; ++j) {
      out(i, j + 1) += f(i, j) * inv_2h;
      out(i, j - 1) -= f(i, j) * inv_2h;
    }
    out(i, g.ny - 1) += f(i, g.ny - 1) * inv_h;
    out(i, g.ny - 2) -= f(i, g.ny - 1) * inv_h;
  }
  return out;
}

double grad_sup(const ScalarField& f) {
  const ScalarField fx = diff_x(f);
  const ScalarField fy = diff_y(f);
  double m = 0.0;
  for (std::size_t n = 0; n < f.v.size(); ++n)
    m = std::max(m, std::hypot(fx.v[n], fy.v[n]));
  return m;
}

void dump_field(std::ostream& os, const ScalarField& f) {
  const Grid& g = f.grid;
  os << "# " << g.nx << " " << g.ny << " ";
  os.precision(17);
  os << g.h << " " << g.lx << " " << g.ly << "\n";
  for (int j = 0; j < g.ny; ++j) {
    for (int i = 0; i < g.nx; ++i) {
      if (i) os << " ";
      os << f(i, j);
    }
    os << "\n";
  }
}

ScalarField read_field(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.empty() || line[0] != '#')
    throw std::runtime_error("read_field: missing header");
  std::istringstream hs(line.substr(1));
  int nx, ny;
  double h, lx, ly;
  if (!(hs >> nx >> ny >> h >> lx >> ly))
    throw std::runtime_error("read_field: malformed header");
  ScalarField f(Grid(lx, ly, nx, ny));
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i)
      if (!(is >> f(i, j))) throw std::runtime_error("read_field: short data");
  is.ignore(1);  // trailing newline
  return f;
}

}  // namespace pinlab
