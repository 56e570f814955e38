#pragma once

#include <array>
#include <vector>

namespace obsdual {

/// Structured 1D/2D grid: scalars live on nodes, vector data on cell centers.
struct Grid {
  int dim = 1;
  std::array<double, 2> lo{0.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<int, 2> cells{1, 1}; ///< cells[1] ignored in 1D

  double spacing(int axis) const { return (hi[axis] - lo[axis]) / cells[axis]; }
  double cell_volume() const {
    return dim == 1 ? spacing(0) : spacing(0) * spacing(1);
  }
  double total_volume() const {
    return dim == 1 ? hi[0] - lo[0] : (hi[0] - lo[0]) * (hi[1] - lo[1]);
  }

  int nodes_per_axis(int axis) const { return cells[axis] + 1; }
  int node_count() const {
    return dim == 1 ? cells[0] + 1 : (cells[0] + 1) * (cells[1] + 1);
  }
  int cell_count() const { return dim == 1 ? cells[0] : cells[0] * cells[1]; }

  int node_id(int i, int j = 0) const { return j * (cells[0] + 1) + i; }
  int cell_id(int i, int j = 0) const { return j * cells[0] + i; }

  std::array<double, 2> node_coord(int id) const {
    if (dim == 1) return {lo[0] + id * spacing(0), 0.0};
    int i = id % (cells[0] + 1), j = id / (cells[0] + 1);
    return {lo[0] + i * spacing(0), lo[1] + j * spacing(1)};
  }
  std::array<double, 2> cell_center(int c) const {
    if (dim == 1) return {lo[0] + (c + 0.5) * spacing(0), 0.0};
    int i = c % cells[0], j = c / cells[0];
    return {lo[0] + (i + 0.5) * spacing(0), lo[1] + (j + 0.5) * spacing(1)};
  }

  bool is_boundary_node(int id) const {
    if (dim == 1) return id == 0 || id == cells[0];
    int i = id % (cells[0] + 1), j = id / (cells[0] + 1);
    return i == 0 || i == cells[0] || j == 0 || j == cells[1];
  }

  bool operator==(const Grid& o) const {
    return dim == o.dim && lo == o.lo && hi == o.hi &&
           (dim == 1 ? cells[0] == o.cells[0] : cells == o.cells);
  }
};

struct ScalarField {
  Grid grid;
  std::vector<double> v; ///< one value per node

  ScalarField() = default;
  explicit ScalarField(const Grid& g, double fill = 0.0) : grid(g), v(g.node_count(), fill) {}
};

struct VectorField {
  Grid grid;
  std::vector<double> v; ///< cell-major, dim components per cell

  VectorField() = default;
  explicit VectorField(const Grid& g, double fill = 0.0)
      : grid(g), v(static_cast<size_t>(g.cell_count()) * g.dim, fill) {}

  double* at(int c) { return v.data() + static_cast<size_t>(c) * grid.dim; }
  const double* at(int c) const { return v.data() + static_cast<size_t>(c) * grid.dim; }
};

/// Node weights w_i = sum_cells <sigma, grad hat_i> vol: the exact transpose
/// of the cell-gradient stencil, i.e. the action of -div sigma on nodal hats.
struct DivergenceWeights {
  Grid grid;
  std::vector<double> w;

  DivergenceWeights() = default;
  explicit DivergenceWeights(const Grid& g) : grid(g), w(g.node_count(), 0.0) {}

  double max_abs() const;
  double min_interior() const;
};

/// Cell-centered gradient: forward differences, axis-averaged over the cell's
/// node pairs in 2D (the bilinear interpolant's gradient at the center).
VectorField gradient(const ScalarField& u);

DivergenceWeights divergence_weights(const VectorField& sigma);

/// [[sigma, U]] = sum_interior w_i (U_i - u0_i) + sum_cells <sigma, grad u0> vol.
double pairing(const VectorField& sigma, const ScalarField& U, const ScalarField& u0);

} // namespace obsdual
