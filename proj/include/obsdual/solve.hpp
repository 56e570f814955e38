#pragma once

#include <vector>

#include "obsdual/instance.hpp"
#include "obsdual/ladder.hpp"

namespace obsdual {

struct SolveParams {
  int max_iter = 50000;
  double tol_kkt = -1.0;  ///< <0: 1e-8 * max(1, |E(start)|)
  double step = -1.0;     ///< <0: estimate 1/L from curvature and stencil norm
  bool monotone = true;   ///< drop momentum on a gross energy increase
  int trace_every = 0;    ///< 0: record only start, power-of-two iters, final
};

struct TracePoint {
  int iter;
  double energy;
  double residual;
};

struct SolveResult {
  ScalarField u;
  double energy = 0.0;
  double residual = 0.0; ///< max over interior of |min(u - psi, w)|
  int iterations = 0;
  bool converged = false;
  int restarts = 0;
  double step_final = 0.0;
  std::vector<TracePoint> trace;
};

/// Total energy sum_c F(grad u)|cell| of a nodal field.
double primal_energy(const ObstacleInstance& inst, const ScalarField& u);

/// Projected accelerated descent with spaced momentum restarts and step
/// backtracking. Never throws on a slow run: if max_iter is reached the best
/// iterate seen so far is returned with converged=false.
SolveResult solve_primal(const ObstacleInstance& inst, const SolveParams& params = {});

/// Cellwise dual field sigma = f'(|grad u|) grad u / |grad u| (0 at 0).
VectorField extract_dual(const ObstacleInstance& inst, const ScalarField& u);

/// sum_int w_i (psi_i - u0_i) + sum_c <sigma, grad u0>|cell| - sum_c f*(|sigma|)|cell|.
/// Returns -inf when f*(|sigma|) is infinite in some cell.
double dual_objective(const ObstacleInstance& inst, const VectorField& sigma);

/// primal - dual. Requires sigma to pass the sign test on interior weights
/// (min_i w_i >= -tol_div); throws SMinusViolation otherwise.
/// tol_div < 0 selects 1e-9 * max(1, max_i |w_i|).
double duality_gap(const ObstacleInstance& inst, const ScalarField& u,
                   const VectorField& sigma, double tol_div = -1.0);

struct LadderRunLevel {
  LadderLevel level;
  SolveResult result;
  VectorField sigma;
  double energy = 0.0;           ///< sum F_k(grad u_k)|cell|, may be negative
  double energy_unshifted = 0.0; ///< energy + mu_k |Omega|
};

/// Solves the instance once per ladder level with the truncated-mollified
/// Lagrangian substituted, reporting per-level energies and dual fields.
std::vector<LadderRunLevel> ladder_solve_sequence(const ObstacleInstance& inst,
                                                  const std::vector<int>& k_list,
                                                  const SolveParams& params = {},
                                                  const LadderOptions& opt = {});

} // namespace obsdual
