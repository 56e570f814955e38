#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "obsdual/instance.hpp"
#include "obsdual/solve.hpp"

namespace obsdual {

struct CertificateResult {
  std::string name;
  bool passed = false;
  double residual = 0.0;
  double tolerance = 0.0;
  std::string detail;
};

/// u >= psi on interior nodes and u = u0 on the boundary, exactly up to
/// the round-trip slack of 15-digit field files.
CertificateResult check_feasibility(const ObstacleInstance& inst, const ScalarField& u,
                                    double tol = -1.0);

/// residual = max(0, -min interior weight); tol < 0 selects 1e-9 * max|w|.
CertificateResult check_div_nonpositive(const DivergenceWeights& weights,
                                        double tol_div = -1.0);

/// residual = number of cells where F*(|sigma|) is not finite; reports the
/// conjugate and pairing-integrand sums, flagging slope-cap cells.
CertificateResult check_integrability(const ObstacleInstance& inst, const ScalarField& u,
                                      const VectorField& sigma);

/// residual = |primal + sum F*(sigma) vol - pairing(sigma, psi, u0)| / max(1, primal).
CertificateResult check_extremality_identity(const ObstacleInstance& inst,
                                             const ScalarField& u, const VectorField& sigma,
                                             double tol_gap = -1.0);

/// residual = |sum_i w_i (u_i - psi_i)| / max(1, primal). An infeasible (u, psi)
/// pair short-circuits with detail "InfeasiblePair".
CertificateResult check_complementarity(const ObstacleInstance& inst, const ScalarField& u,
                                        const DivergenceWeights& weights,
                                        double tol_gap = -1.0);

/// residual = max(0, -min over trials of sum <sigma, grad(eta - u)> vol);
/// passes iff residual <= tol * max trial l1 deviation (tol < 0: 1e-8).
/// Throws InfeasibleTrial naming the offending index.
CertificateResult check_variational_inequality(const ObstacleInstance& inst,
                                               const ScalarField& u, const VectorField& sigma,
                                               const std::vector<ScalarField>& trials,
                                               double tol = -1.0);

/// Twelve feasible trial fields: the clamped boundary interpolant, u itself,
/// nonnegative bumps, pull-aways from the obstacle, convex combinations, and
/// seeded random feasible perturbations.
std::vector<ScalarField> standard_trials(const ObstacleInstance& inst, const ScalarField& u,
                                         uint64_t seed = 0);

struct OracleGrid {
  double t_max = 100.0;
  double step = 1e-4;
};

/// Dense-grid sup of s*t - f(t): the independent cross-check for conjugate
/// evaluation. Throws TMaxTooSmall when the argmax lands on the last node.
double oracle_conjugate(const Profile& f, double s, const OracleGrid& grid = {});

/// Value-only bracketing of the argmax of s*t - f(t), for choosing an oracle
/// grid without consulting any conjugate machinery.
OracleGrid suggest_oracle_grid(const Profile& f, double s);

/// Exact solution of the quadratic-energy obstacle problem on [-1,1] with
/// psi = height - x^2 and zero boundary data: the obstacle's parabola on the
/// contact set [-a, a], tangent lines outside, glued C^1.
struct MembraneSolution {
  double height = 0.0;
  double a = 0.0;      ///< contact half-width, 1 - sqrt(1 - height)
  double energy = 0.0; ///< integral of |u'|^2: 8a^2 - 16a^3/3
  double eval(double x) const;
  double slope(double x) const;
};

MembraneSolution analytic_membrane_1d(double obstacle_height);

} // namespace obsdual
