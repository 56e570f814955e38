#include "obsdual/solve.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "obsdual/errors.hpp"

namespace obsdual {

namespace {

double radius(const double* d, int dim) {
  return dim == 1 ? std::abs(d[0]) : std::hypot(d[0], d[1]);
}

// Largest sampled difference quotient of the profile slope on [0, t_hi].
double curvature_bound(const RadialLagrangian& L, double t_hi) {
  const int n = 512;
  const double h = t_hi / n;
  double best = 1e-12, prev = L.slope(0.0);
  for (int i = 1; i <= n; ++i) {
    double cur = L.slope(i * h);
    if (std::isfinite(cur)) best = std::max(best, (cur - prev) / h);
    prev = cur;
  }
  return best;
}

// Spectral bound of the interior grad-transpose-vol-grad stencil, by power
// iteration with a fixed splitmix seed so runs are reproducible.
double stencil_norm(const Grid& g) {
  ScalarField x(g);
  uint64_t s = 0x9e3779b97f4a7c15ull;
  double nrm2 = 0.0;
  for (int id = 0; id < g.node_count(); ++id) {
    s += 0x9e3779b97f4a7c15ull;
    uint64_t z = s;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    if (!g.is_boundary_node(id)) {
      x.v[id] = (z >> 11) * 0x1.0p-53 - 0.5;
      nrm2 += x.v[id] * x.v[id];
    }
  }
  if (nrm2 == 0.0) return 1.0;
  double inv = 1.0 / std::sqrt(nrm2);
  for (double& v : x.v) v *= inv;
  double lam = 1.0;
  for (int it = 0; it < 60; ++it) {
    DivergenceWeights y = divergence_weights(gradient(x));
    double ray = 0.0, ynrm2 = 0.0;
    for (int id = 0; id < g.node_count(); ++id) {
      if (g.is_boundary_node(id)) { y.w[id] = 0.0; continue; }
      ray += y.w[id] * x.v[id];
      ynrm2 += y.w[id] * y.w[id];
    }
    if (ynrm2 <= 0.0) break;
    double next = ray;
    inv = 1.0 / std::sqrt(ynrm2);
    for (int id = 0; id < g.node_count(); ++id) x.v[id] = y.w[id] * inv;
    if (it > 4 && std::abs(next - lam) <= 1e-9 * std::abs(next)) { lam = next; break; }
    lam = next;
  }
  return std::max(lam, 1e-12) * 1.05;
}

double kkt_residual(const ObstacleInstance& inst, const ScalarField& u,
                    const DivergenceWeights& w) {
  const Grid& g = inst.grid;
  double r = 0.0;
  for (int id = 0; id < g.node_count(); ++id) {
    if (g.is_boundary_node(id)) continue;
    double m = std::min(u.v[id] - inst.psi.v[id], w.w[id]);
    r = std::max(r, std::abs(m));
  }
  return r;
}

// Projection onto the feasible set: clamp to the obstacle, pin the boundary.
void clamp_feasible(const ObstacleInstance& inst, ScalarField& u) {
  const Grid& g = inst.grid;
  for (int id = 0; id < g.node_count(); ++id)
    u.v[id] = g.is_boundary_node(id) ? inst.u0.v[id] : std::max(u.v[id], inst.psi.v[id]);
}

double max_gradient_radius(const Grid& g, const VectorField& du) {
  double m = 0.0;
  for (int c = 0; c < g.cell_count(); ++c) m = std::max(m, radius(du.at(c), g.dim));
  return m;
}

} // namespace

double primal_energy(const ObstacleInstance& inst, const ScalarField& u) {
  const Grid& g = inst.grid;
  VectorField du = gradient(u);
  const double vol = g.cell_volume();
  double acc = 0.0;
  for (int c = 0; c < g.cell_count(); ++c)
    acc += inst.lagrangian.value(radius(du.at(c), g.dim)) * vol;
  return acc;
}

VectorField extract_dual(const ObstacleInstance& inst, const ScalarField& u) {
  const Grid& g = inst.grid;
  VectorField du = gradient(u);
  VectorField sigma(g);
  for (int c = 0; c < g.cell_count(); ++c) {
    const double* d = du.at(c);
    double r = radius(d, g.dim);
    double* s = sigma.at(c);
    if (r == 0.0) {
      s[0] = 0.0;
      if (g.dim == 2) s[1] = 0.0;
      continue;
    }
    double scale = inst.lagrangian.slope(r) / r;
    s[0] = scale * d[0];
    if (g.dim == 2) s[1] = scale * d[1];
  }
  return sigma;
}

SolveResult solve_primal(const ObstacleInstance& inst, const SolveParams& params) {
  validate(inst);
  const Grid& g = inst.grid;
  const int n = g.node_count();

  ScalarField u = inst.u0;
  clamp_feasible(inst, u);

  const double e_start = primal_energy(inst, u);
  const double scale = std::max(1.0, std::abs(e_start));
  const double tol = params.tol_kkt > 0.0 ? params.tol_kkt : 1e-8 * scale;

  double gamma;
  if (params.step > 0.0) {
    gamma = params.step;
  } else {
    double t_hi = std::max({1.0, max_gradient_radius(g, gradient(u)),
                            inst.t_stretch * max_gradient_radius(g, gradient(inst.u0))});
    gamma = 1.0 / (curvature_bound(inst.lagrangian, 1.5 * t_hi) * stencil_norm(g));
  }
  const double gamma_cap = 4.0 * gamma;

  SolveResult res;
  res.u = u;
  res.energy = e_start;
  double e_u = e_start;
  DivergenceWeights w_u = divergence_weights(extract_dual(inst, u));
  res.residual = kkt_residual(inst, u, w_u);
  res.trace.push_back({0, e_u, res.residual});
  if (res.residual <= tol) {
    res.converged = true;
    res.step_final = gamma;
    return res;
  }

  ScalarField u_prev = u, y = u, cand(g);
  double t_mom = 1.0;
  double best_res = res.residual;
  int next_trace = 1;
  int last_restart = 0, restart_interval = 16;
  int last_gain = 0;
  const int stall_window = 256;

  for (int iter = 1; iter <= params.max_iter; ++iter) {
    DivergenceWeights w_y = divergence_weights(extract_dual(inst, y));
    const double e_y = primal_energy(inst, y);

    // Projection-arc backtracking: halve the step until sufficient decrease.
    double e_c = 0.0;
    bool halved = false;
    for (int half = 0; half <= 60; ++half) {
      for (int id = 0; id < n; ++id) cand.v[id] = y.v[id] - gamma * w_y.w[id];
      clamp_feasible(inst, cand);
      e_c = primal_energy(inst, cand);
      double decr = 0.0;
      for (int id = 0; id < n; ++id)
        if (!g.is_boundary_node(id)) decr += w_y.w[id] * (cand.v[id] - y.v[id]);
      if (e_c <= e_y + 1e-4 * decr + 1e-14 * scale) break;
      gamma *= 0.5;
      halved = true;
    }

    if (params.monotone && e_c > e_u + 1e-6 * scale && t_mom > 1.0) {
      // Gross momentum overshoot: drop back to the last accepted iterate.
      ++res.restarts;
      t_mom = 1.0;
      y = u;
      last_restart = iter;
      continue;
    }

    double sweep = 0.0; // restart indicator <w_y, u_new - u_old>
    for (int id = 0; id < n; ++id)
      if (!g.is_boundary_node(id)) sweep += w_y.w[id] * (cand.v[id] - u.v[id]);

    u_prev = u;
    u = cand;
    e_u = e_c;

    DivergenceWeights w_new = divergence_weights(extract_dual(inst, u));
    double r = kkt_residual(inst, u, w_new);
    if (r < best_res || r <= tol) {
      best_res = std::min(best_res, r);
      res.u = u;
      res.energy = e_u;
      res.residual = r;
      res.iterations = iter;
      last_gain = iter;
    }
    if (iter == next_trace || (params.trace_every > 0 && iter % params.trace_every == 0)) {
      res.trace.push_back({iter, e_u, r});
      if (iter == next_trace) next_trace *= 2;
    }
    if (r <= tol) {
      res.converged = true;
      res.iterations = iter;
      if (res.trace.back().iter != iter) res.trace.push_back({iter, e_u, r});
      break;
    }

    // A whole window without a new best residual means the iterate is
    // orbiting: projection plus momentum plus step growth admits exact limit
    // cycles. Halving the step and dropping the momentum breaks the orbit.
    if (iter - last_gain >= stall_window && gamma > 1e-12 * gamma_cap) {
      gamma *= 0.5;
      t_mom = 1.0;
      y = u;
      last_restart = iter;
      last_gain = iter;
      ++res.restarts;
      continue;
    }

    // Momentum reset when the gradient sweeps against the step direction,
    // spaced out geometrically so the accelerated rate survives the tail.
    if (sweep > 0.0 && iter - last_restart >= restart_interval) {
      ++res.restarts;
      t_mom = 1.0;
      last_restart = iter;
      restart_interval = std::min(2 * restart_interval, 4096);
    }
    double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_mom * t_mom));
    double beta = (t_mom - 1.0) / t_next;
    for (int id = 0; id < n; ++id)
      y.v[id] = u.v[id] + beta * (u.v[id] - u_prev.v[id]);
    clamp_feasible(inst, y);
    t_mom = t_next;
    if (!halved) gamma = std::min(gamma * 1.02, gamma_cap);
  }

  res.step_final = gamma;
  if (!res.converged) {
    if (res.trace.empty() || res.trace.back().iter != params.max_iter)
      res.trace.push_back({params.max_iter, e_u, res.residual});
    res.iterations = params.max_iter;
  }
  return res;
}

double dual_objective(const ObstacleInstance& inst, const VectorField& sigma) {
  const Grid& g = inst.grid;
  const double vol = g.cell_volume();
  double conj_sum = 0.0;
  for (int c = 0; c < g.cell_count(); ++c) {
    double r = radius(sigma.at(c), g.dim);
    double fs;
    try {
      fs = inst.conjugate.eval(r);
    } catch (const Error& e) {
      if (e.code() == errc::domain_exceeded)
        return -std::numeric_limits<double>::infinity();
      throw;
    }
    if (!std::isfinite(fs)) return -std::numeric_limits<double>::infinity();
    conj_sum += fs * vol;
  }
  return pairing(sigma, inst.psi, inst.u0) - conj_sum;
}

double duality_gap(const ObstacleInstance& inst, const ScalarField& u,
                   const VectorField& sigma, double tol_div) {
  DivergenceWeights w = divergence_weights(sigma);
  double tol = tol_div >= 0.0 ? tol_div : 1e-9 * w.max_abs();
  double lo = w.min_interior();
  if (lo < -tol)
    fail(errc::s_minus_violation,
         "dual candidate has an interior weight " + std::to_string(lo) +
             " below -" + std::to_string(tol));
  return primal_energy(inst, u) - dual_objective(inst, sigma);
}

std::vector<LadderRunLevel> ladder_solve_sequence(const ObstacleInstance& inst,
                                                  const std::vector<int>& k_list,
                                                  const SolveParams& params,
                                                  const LadderOptions& opt) {
  validate(inst);
  std::vector<LadderLevel> levels =
      build_ladder(inst.lagrangian, inst.conjugate, k_list, opt);

  ScalarField start = inst.u0;
  clamp_feasible(inst, start);
  const double base_scale = std::max(1.0, std::abs(primal_energy(inst, start)));
  const double base_tol = params.tol_kkt > 0.0 ? params.tol_kkt : 1e-8 * base_scale;

  std::vector<LadderRunLevel> out;
  out.reserve(levels.size());
  double prev_energy = -std::numeric_limits<double>::infinity();
  for (const LadderLevel& lv : levels) {
    ObstacleInstance sub = inst;
    sub.lagrangian = as_lagrangian(lv, inst.lagrangian.name);
    sub.conjugate = ConjugateTable{sub.lagrangian};

    SolveParams p = params;
    p.tol_kkt = base_tol / (static_cast<double>(lv.k) * lv.k);
    SolveResult res;
    try {
      res = solve_primal(sub, p);
    } catch (const Error& e) {
      fail(e.code(), "ladder level k=" + std::to_string(lv.k) + ": " + e.what());
    }

    LadderRunLevel entry;
    entry.level = lv;
    entry.sigma = extract_dual(sub, res.u);
    entry.energy = res.energy;
    entry.energy_unshifted = res.energy + lv.mu_k * inst.grid.total_volume();
    entry.result = std::move(res);

    if (entry.energy < prev_energy - 1e-9 * std::max(1.0, std::abs(prev_energy)))
      fail(errc::monotonicity_violation,
           "ladder energies decreased at k=" + std::to_string(lv.k));
    prev_energy = entry.energy;
    out.push_back(std::move(entry));
  }
  return out;
}

} // namespace obsdual
