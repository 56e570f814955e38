#pragma once

#include <span>
#include <vector>

#include "obsdual/conjugate.hpp"
#include "obsdual/lagrangian.hpp"

namespace obsdual {

/// F-bar_k**: the profile with slopes truncated at k, recovered in closed form
/// as f(t) below the truncation radius and k t - f*(k) above it.
double truncated_bipolar(const RadialLagrangian& L, const ConjugateTable& C, double k, double t);

/// G_k** = max(truncated bipolar, minorant).
double g_level(const RadialLagrangian& L, const ConjugateTable& C, double k, double t);

struct LadderOptions {
  double max_radius = 1e9;     ///< crossing search horizon
  double join_tol = 1e-8;      ///< relative mismatch allowed at the r_k join
  double probe_factor = 4.0;   ///< verify tb <= theta on [r_k, probe_factor r_k]
  int quad_nodes = 32;         ///< kernel-support quadrature nodes
  double grid_step = 0.01;     ///< build_ladder validation sweep resolution
};

/// Smallest radius past which the truncated bipolar stays at or below the
/// minorant, floored by the radius where the profile slope reaches k.
double find_rk(const RadialLagrangian& L, const ConjugateTable& C, double k,
               const LadderOptions& opt = {});

/// One rung of the approximation ladder. value/slope callables are pure and
/// capture an immutable shared payload.
struct LadderLevel {
  int k = 0;
  double r_k = 0.0;     ///< truncation radius
  double m_k = 0.0;     ///< Lipschitz constant theta(r_k)/r_k
  double delta_k = 0.0; ///< mollification half-width 1/(k^2 m_k)
  double mu_k = 0.0;    ///< downward shift 1/(k-1)
  double t_star = 0.0;  ///< where the Lipschitz envelope leaves G_k**
  double tail_intercept = 0.0; ///< h(t) = m_k t + intercept for t >= t_star
  double fstar_at_k = 0.0;     ///< cached f*(k)

  Profile g;   ///< G_k**
  Profile h;   ///< m_k-Lipschitz convex envelope of G_k**
  Profile fk;  ///< smoothed level profile F_k (shift included)
  Profile dfk; ///< F_k slope
};

LadderLevel build_level(const RadialLagrangian& L, const ConjugateTable& C, int k,
                        const LadderOptions& opt = {});

/// Point evaluators matching the level pieces (build a level internally).
double h_level(const RadialLagrangian& L, const ConjugateTable& C, int k, double t,
               const LadderOptions& opt = {});
double mollify_level(const RadialLagrangian& L, const ConjugateTable& C, int k, double t,
                     const LadderOptions& opt = {});

/// Build every requested level and sweep-check the ordering
/// F_k <= F_{k+1} <= F; throws MonotonicityViolation with the offending k, t.
std::vector<LadderLevel> build_ladder(const RadialLagrangian& L, const ConjugateTable& C,
                                      std::span<const int> k_list,
                                      const LadderOptions& opt = {});

/// Wrap a level as a Lipschitz Lagrangian so the solver and conjugation can
/// consume it unchanged.
RadialLagrangian as_lagrangian(const LadderLevel& level, const std::string& base_name);

/// Smoothing kernel exp(1/(x^2 - 1)) on (-1, 1), zero outside (unnormalized),
/// and the constant c that gives the normalized kernel unit mass.
double bump_kernel(double x);
double bump_normalization();

} // namespace obsdual
