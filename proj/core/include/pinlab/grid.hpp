#ifndef PINLAB_GRID_HPP
#define PINLAB_GRID_HPP

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <string>
#include <vector>

namespace pinlab {

// Uniform node-centered grid on the rectangle [0,lx] x [0,ly].
// Node (i,j) sits at (i*h, j*h); spacing is identical in both directions.
struct Grid {
  double lx = 0.0;
  double ly = 0.0;
  int nx = 0;
  int ny = 0;
  double h = 0.0;

  Grid() = default;
  Grid(double lx_, double ly_, int nx_, int ny_);

  int size() const { return nx * ny; }
  int idx(int i, int j) const { return j * nx + i; }
  double x(int i) const { return i * h; }
  double y(int j) const { return j * h; }
  double area() const { return lx * ly; }

  // Trapezoidal quadrature weight of node (i,j).
  double weight(int i, int j) const {
    const double ci = (i == 0 || i == nx - 1) ? 0.5 : 1.0;
    const double cj = (j == 0 || j == ny - 1) ? 0.5 : 1.0;
    return h * h * ci * cj;
  }

  bool same_as(const Grid& o) const {
    return nx == o.nx && ny == o.ny && lx == o.lx && ly == o.ly;
  }
};

// lx, ly > 0 and n_per_unit >= 2 nodes per unit length.
// Throws std::invalid_argument if the two axes cannot share one spacing.
Grid build_grid(double lx, double ly, int n_per_unit);

struct ScalarField {
  Grid grid;
  std::vector<double> v;

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0)
      : grid(g), v(static_cast<std::size_t>(g.size()), fill) {}

  double& operator()(int i, int j) { return v[grid.idx(i, j)]; }
  double operator()(int i, int j) const { return v[grid.idx(i, j)]; }

  double min() const;
  double max() const;
  bool all_finite() const;
};

struct ComplexField {
  Grid grid;
  std::vector<double> re, im;

  ComplexField() = default;
  explicit ComplexField(const Grid& g)
      : grid(g),
        re(static_cast<std::size_t>(g.size()), 0.0),
        im(static_cast<std::size_t>(g.size()), 0.0) {}

  std::complex<double> at(int i, int j) const {
    const int n = grid.idx(i, j);
    return {re[n], im[n]};
  }
  void set(int i, int j, std::complex<double> z) {
    const int n = grid.idx(i, j);
    re[n] = z.real();
    im[n] = z.imag();
  }
};

// 5-point Laplacian with ghost nodes reflected across the boundary
// (homogeneous Neumann). Annihilates constants exactly.
ScalarField neumann_laplacian(const ScalarField& f);

// Trapezoidal quadrature over the rectangle; exact for bilinear functions.
double integrate(const ScalarField& f);
double integrate_product(const ScalarField& f, const ScalarField& g);

// Dirichlet-style H1 seminorm square: sum of squared edge differences with
// trapezoid weights transverse to the edge direction.  Discretely adjoint to
// neumann_laplacian: integrate(f * neumann_laplacian(g)) == -h1_inner(f, g).
double h1_seminorm_sq(const ScalarField& f);
double h1_inner(const ScalarField& f, const ScalarField& g);

// Node-centered first differences: centered in the interior, one-sided on
// the boundary.  Used for diagnostics and for the energy densities.
ScalarField diff_x(const ScalarField& f);
ScalarField diff_y(const ScalarField& f);
// Transposes of diff_x/diff_y as linear maps on node vectors.
ScalarField diff_x_t(const ScalarField& f);
ScalarField diff_y_t(const ScalarField& f);

// max over nodes of sqrt(fx^2 + fy^2)
double grad_sup(const ScalarField& f);

// Plain-text matrix dump: header "# nx ny h lx ly", one row per j index,
// space-separated, 17 significant digits.
void dump_field(std::ostream& os, const ScalarField& f);
ScalarField read_field(std::istream& is);

}  // namespace pinlab

#endif
