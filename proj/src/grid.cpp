#include "obsdual/grid.hpp"

#include <algorithm>
#include <cmath>

#include "obsdual/errors.hpp"

namespace obsdual {

double DivergenceWeights::max_abs() const {
  double m = 0.0;
  for (double x : w) m = std::max(m, std::abs(x));
  return m;
}

double DivergenceWeights::min_interior() const {
  double m = 0.0;
  bool any = false;
  for (int id = 0; id < grid.node_count(); ++id) {
    if (grid.is_boundary_node(id)) continue;
    m = any ? std::min(m, w[id]) : w[id];
    any = true;
  }
  return any ? m : 0.0;
}

VectorField gradient(const ScalarField& u) {
  const Grid& g = u.grid;
  if (static_cast<int>(u.v.size()) != g.node_count())
    fail(errc::invalid_argument, "gradient: field size does not match grid");
  VectorField out(g);
  if (g.dim == 1) {
    const double inv = 1.0 / g.spacing(0);
    for (int c = 0; c < g.cells[0]; ++c)
      out.v[c] = (u.v[c + 1] - u.v[c]) * inv;
    return out;
  }
  const double ix = 1.0 / (2.0 * g.spacing(0));
  const double iy = 1.0 / (2.0 * g.spacing(1));
  for (int j = 0; j < g.cells[1]; ++j)
    for (int i = 0; i < g.cells[0]; ++i) {
      const double u00 = u.v[g.node_id(i, j)];
      const double u10 = u.v[g.node_id(i + 1, j)];
      const double u01 = u.v[g.node_id(i, j + 1)];
      const double u11 = u.v[g.node_id(i + 1, j + 1)];
      double* d = out.at(g.cell_id(i, j));
      d[0] = (u10 - u00 + u11 - u01) * ix;
      d[1] = (u01 - u00 + u11 - u10) * iy;
    }
  return out;
}

DivergenceWeights divergence_weights(const VectorField& sigma) {
  const Grid& g = sigma.grid;
  if (sigma.v.size() != static_cast<size_t>(g.cell_count()) * g.dim)
    fail(errc::invalid_argument, "divergence_weights: field size does not match grid");
  DivergenceWeights out(g);
  const double vol = g.cell_volume();
  if (g.dim == 1) {
    // vol/h = 1: each cell pushes -sigma to its left node, +sigma to its right.
    for (int c = 0; c < g.cells[0]; ++c) {
      out.w[c] -= sigma.v[c];
      out.w[c + 1] += sigma.v[c];
    }
    return out;
  }
  const double cx = vol / (2.0 * g.spacing(0));
  const double cy = vol / (2.0 * g.spacing(1));
  for (int j = 0; j < g.cells[1]; ++j)
    for (int i = 0; i < g.cells[0]; ++i) {
      const double* s = sigma.at(g.cell_id(i, j));
      const double ax = s[0] * cx, ay = s[1] * cy;
      const int n00 = g.node_id(i, j), n10 = g.node_id(i + 1, j);
      const int n01 = g.node_id(i, j + 1), n11 = g.node_id(i + 1, j + 1);
      out.w[n00] -= ax + ay;
      out.w[n10] += ax - ay;
      out.w[n01] -= ax - ay;
      out.w[n11] += ax + ay;
    }
  return out;
}

double pairing(const VectorField& sigma, const ScalarField& U, const ScalarField& u0) {
  const Grid& g = sigma.grid;
  if (!(U.grid == g) || !(u0.grid == g))
    fail(errc::invalid_argument, "pairing: fields live on different grids");
  DivergenceWeights w = divergence_weights(sigma);
  double acc = 0.0;
  for (int id = 0; id < g.node_count(); ++id)
    if (!g.is_boundary_node(id)) acc += w.w[id] * (U.v[id] - u0.v[id]);
  VectorField g0 = gradient(u0);
  const double vol = g.cell_volume();
  for (int c = 0; c < g.cell_count(); ++c) {
    const double* s = sigma.at(c);
    const double* d = g0.at(c);
    double dot = s[0] * d[0];
    if (g.dim == 2) dot += s[1] * d[1];
    acc += dot * vol;
  }
  return acc;
}

} // namespace obsdual
