#include "obsdual/instance.hpp"

#include <cmath>

#include "obsdual/errors.hpp"

namespace obsdual {

ObstacleInstance make_instance(const Grid& grid, const RadialLagrangian& L,
                               const ScalarField& psi, const ScalarField& u0,
                               double t_stretch) {
  ObstacleInstance inst;
  inst.grid = grid;
  inst.lagrangian = L;
  inst.conjugate = ConjugateTable{L};
  inst.psi = psi;
  inst.u0 = u0;
  inst.t_stretch = t_stretch;
  validate(inst);
  return inst;
}

static double energy_of(const ObstacleInstance& inst, const ScalarField& u, double scale) {
  VectorField du = gradient(u);
  const Grid& g = inst.grid;
  const double vol = g.cell_volume();
  double acc = 0.0;
  for (int c = 0; c < g.cell_count(); ++c) {
    const double* d = du.at(c);
    double r = g.dim == 1 ? std::abs(d[0]) : std::hypot(d[0], d[1]);
    acc += inst.lagrangian.value(scale * r) * vol;
  }
  return acc;
}

void validate(const ObstacleInstance& inst) {
  const Grid& g = inst.grid;
  if (g.dim != 1 && g.dim != 2)
    fail(errc::invalid_argument, "instance: grid dimension must be 1 or 2");
  if (g.cells[0] < 1 || (g.dim == 2 && g.cells[1] < 1))
    fail(errc::invalid_argument, "instance: grid needs at least one cell per axis");
  if (g.hi[0] <= g.lo[0] || (g.dim == 2 && g.hi[1] <= g.lo[1]))
    fail(errc::invalid_argument, "instance: domain extents are empty");
  if (!(inst.psi.grid == g) || !(inst.u0.grid == g))
    fail(errc::invalid_argument, "instance: psi/u0 grids do not match the domain grid");
  if (!(inst.t_stretch > 1.0))
    fail(errc::invalid_argument, "instance: t_stretch must exceed 1");

  for (int id = 0; id < g.node_count(); ++id) {
    if (!std::isfinite(inst.psi.v[id]) || !std::isfinite(inst.u0.v[id]))
      fail(errc::invalid_argument, "instance: psi/u0 must be finite");
    if (g.is_boundary_node(id) && inst.psi.v[id] > inst.u0.v[id] + 1e-12)
      fail(errc::infeasible_instance,
           "obstacle exceeds boundary data at a boundary node (psi > u0)");
  }

  double e1 = energy_of(inst, inst.u0, 1.0);
  double es = energy_of(inst, inst.u0, inst.t_stretch);
  if (!std::isfinite(e1) || !std::isfinite(es))
    fail(errc::infeasible_instance,
         "boundary data has infinite energy under the stretched profile");
}

} // namespace obsdual
