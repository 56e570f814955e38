#pragma once

#include <string>

#include "obsdual/conjugate.hpp"
#include "obsdual/grid.hpp"
#include "obsdual/lagrangian.hpp"

namespace obsdual {

/// A discretized obstacle problem: minimize sum_c F(grad v)|cell| over nodal
/// fields with v >= psi inside and v = u0 on the boundary.
struct ObstacleInstance {
  Grid grid;
  RadialLagrangian lagrangian;
  ConjugateTable conjugate;
  ScalarField psi; ///< obstacle, nodal
  ScalarField u0;  ///< boundary data, nodal (interior values define the default start)
  double t_stretch = 2.0;
  std::string label;
};

ObstacleInstance make_instance(const Grid& grid, const RadialLagrangian& L,
                               const ScalarField& psi, const ScalarField& u0,
                               double t_stretch = 2.0);

/// Checks boundary compatibility (psi <= u0 on the boundary) and that the
/// energy stays finite under a t_stretch dilation of the boundary data.
void validate(const ObstacleInstance& inst);

} // namespace obsdual
