#include "obsdual/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "obsdual/errors.hpp"

namespace obsdual {

namespace {

double radius(const double* d, int dim) {
  return dim == 1 ? std::abs(d[0]) : std::hypot(d[0], d[1]);
}

std::string locate(const Grid& g, int node) {
  auto xy = g.node_coord(node);
  std::ostringstream os;
  os << "node " << node << " at x=" << xy[0];
  if (g.dim == 2) os << ", y=" << xy[1];
  return os.str();
}

double field_range(const ScalarField& f) {
  double lo = f.v.empty() ? 0.0 : f.v[0], hi = lo;
  for (double v : f.v) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi - lo;
}

uint64_t splitmix(uint64_t& s) {
  s += 0x9e3779b97f4a7c15ull;
  uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

double unit(uint64_t& s) { return (splitmix(s) >> 11) * 0x1.0p-53; }

} // namespace

CertificateResult check_feasibility(const ObstacleInstance& inst, const ScalarField& u,
                                    double tol) {
  const Grid& g = inst.grid;
  CertificateResult out;
  out.name = "feasibility";
  out.tolerance = tol >= 0.0 ? tol : 1e-12 * std::max(1.0, field_range(u));
  int worst = -1;
  for (int id = 0; id < g.node_count(); ++id) {
    double v = g.is_boundary_node(id) ? std::abs(u.v[id] - inst.u0.v[id])
                                      : std::max(0.0, inst.psi.v[id] - u.v[id]);
    if (v > out.residual) {
      out.residual = v;
      worst = id;
    }
  }
  out.passed = out.residual <= out.tolerance;
  out.detail = worst < 0 ? "all nodes feasible" : "worst at " + locate(g, worst);
  return out;
}

CertificateResult check_div_nonpositive(const DivergenceWeights& weights, double tol_div) {
  CertificateResult out;
  out.name = "div_nonpositive";
  out.tolerance = tol_div >= 0.0 ? tol_div : 1e-9 * weights.max_abs();
  const Grid& g = weights.grid;
  int worst = -1;
  double lo = 0.0;
  for (int id = 0; id < g.node_count(); ++id) {
    if (g.is_boundary_node(id)) continue;
    if (weights.w[id] < lo) {
      lo = weights.w[id];
      worst = id;
    }
  }
  out.residual = std::max(0.0, -lo);
  out.passed = out.residual <= out.tolerance;
  out.detail = worst < 0 ? "no negative interior weight"
                         : "most negative weight at " + locate(g, worst);
  return out;
}

CertificateResult check_integrability(const ObstacleInstance& inst, const ScalarField& u,
                                      const VectorField& sigma) {
  const Grid& g = inst.grid;
  CertificateResult out;
  out.name = "integrability";
  out.tolerance = 0.0;
  VectorField du = gradient(u);
  const double vol = g.cell_volume();
  double conj_sum = 0.0, pair_sum = 0.0;
  int bad = 0, capped = 0;
  const bool lipschitz = inst.lagrangian.growth == Growth::lipschitz;
  const double cap = inst.lagrangian.slope_cap;
  for (int c = 0; c < g.cell_count(); ++c) {
    const double* s = sigma.at(c);
    const double* d = du.at(c);
    double r = radius(s, g.dim);
    if (lipschitz && r >= cap * (1.0 - 1e-9)) ++capped;
    double fs;
    try {
      fs = inst.conjugate.eval(r);
    } catch (const Error&) {
      fs = std::numeric_limits<double>::infinity();
    }
    double dot = s[0] * d[0] + (g.dim == 2 ? s[1] * d[1] : 0.0);
    if (!std::isfinite(fs) || !std::isfinite(dot)) {
      ++bad;
      continue;
    }
    conj_sum += std::abs(fs) * vol;
    pair_sum += std::abs(dot) * vol;
  }
  out.residual = bad;
  out.passed = bad == 0;
  std::ostringstream os;
  os << "sum|F*(sigma)|vol=" << conj_sum << ", sum|<sigma,grad u>|vol=" << pair_sum;
  if (capped > 0) os << ", " << capped << " cells at the slope cap";
  if (bad > 0) os << ", " << bad << " cells with infinite conjugate";
  out.detail = os.str();
  return out;
}

CertificateResult check_extremality_identity(const ObstacleInstance& inst,
                                             const ScalarField& u, const VectorField& sigma,
                                             double tol_gap) {
  const Grid& g = inst.grid;
  CertificateResult out;
  out.name = "extremality_identity";
  out.tolerance = tol_gap >= 0.0 ? tol_gap : 1e-6;
  const double primal = primal_energy(inst, u);
  const double vol = g.cell_volume();
  double conj_sum = 0.0;
  for (int c = 0; c < g.cell_count(); ++c) {
    double fs;
    try {
      fs = inst.conjugate.eval(radius(sigma.at(c), g.dim));
    } catch (const Error&) {
      fs = std::numeric_limits<double>::infinity();
    }
    conj_sum += fs * vol;
  }
  const double pair = pairing(sigma, inst.psi, inst.u0);
  out.residual = std::abs(primal + conj_sum - pair) / std::max(1.0, std::abs(primal));
  out.passed = out.residual <= out.tolerance;
  std::ostringstream os;
  os << "primal=" << primal << ", conjugate term=" << conj_sum << ", pairing=" << pair;
  out.detail = os.str();
  return out;
}

CertificateResult check_complementarity(const ObstacleInstance& inst, const ScalarField& u,
                                        const DivergenceWeights& weights, double tol_gap) {
  const Grid& g = inst.grid;
  CertificateResult out;
  out.name = "complementarity";
  out.tolerance = tol_gap >= 0.0 ? tol_gap : 1e-6;

  const double slack = 1e-12 * std::max(1.0, field_range(u));
  for (int id = 0; id < g.node_count(); ++id) {
    bool ok = g.is_boundary_node(id) ? std::abs(u.v[id] - inst.u0.v[id]) <= slack
                                     : u.v[id] >= inst.psi.v[id] - slack;
    if (!ok) {
      out.passed = false;
      out.residual = std::numeric_limits<double>::infinity();
      out.detail = "InfeasiblePair: " + locate(g, id);
      return out;
    }
  }

  double acc = 0.0;
  int worst = -1;
  double worst_term = 0.0;
  for (int id = 0; id < g.node_count(); ++id) {
    if (g.is_boundary_node(id)) continue;
    double term = weights.w[id] * (u.v[id] - inst.psi.v[id]);
    acc += term;
    if (std::abs(term) > std::abs(worst_term)) {
      worst_term = term;
      worst = id;
    }
  }
  const double primal = primal_energy(inst, u);
  out.residual = std::abs(acc) / std::max(1.0, std::abs(primal));
  out.passed = out.residual <= out.tolerance;
  out.detail = worst < 0 ? "no interior nodes"
                         : "largest term " + std::to_string(worst_term) + " at " + locate(g, worst);
  return out;
}

CertificateResult check_variational_inequality(const ObstacleInstance& inst,
                                               const ScalarField& u, const VectorField& sigma,
                                               const std::vector<ScalarField>& trials,
                                               double tol) {
  const Grid& g = inst.grid;
  CertificateResult out;
  out.name = "variational_inequality";

  const double slack = 1e-12 * std::max(1.0, field_range(u));
  const double vol = g.cell_volume();
  double lo = 0.0, trial_size = 1.0;
  int worst = -1;
  for (size_t j = 0; j < trials.size(); ++j) {
    const ScalarField& eta = trials[j];
    if (!(eta.grid == g))
      fail(errc::infeasible_trial, "trial " + std::to_string(j) + " lives on a different grid");
    for (int id = 0; id < g.node_count(); ++id) {
      bool ok = g.is_boundary_node(id) ? std::abs(eta.v[id] - inst.u0.v[id]) <= slack
                                       : eta.v[id] >= inst.psi.v[id] - slack;
      if (!ok)
        fail(errc::infeasible_trial,
             "trial " + std::to_string(j) + " infeasible at " + locate(g, id));
    }
    ScalarField diff(g);
    double l1 = 0.0;
    for (int id = 0; id < g.node_count(); ++id) {
      diff.v[id] = eta.v[id] - u.v[id];
      if (!g.is_boundary_node(id)) l1 += std::abs(diff.v[id]);
    }
    trial_size = std::max(trial_size, l1);
    VectorField dd = gradient(diff);
    double val = 0.0;
    for (int c = 0; c < g.cell_count(); ++c) {
      const double* s = sigma.at(c);
      const double* d = dd.at(c);
      val += (s[0] * d[0] + (g.dim == 2 ? s[1] * d[1] : 0.0)) * vol;
    }
    if (val < lo) {
      lo = val;
      worst = static_cast<int>(j);
    }
  }
  // A field solved to KKT residual r can pair as low as -r sum|eta - u| over
  // interior nodes, so the trial size has to enter the pass threshold.
  out.tolerance = (tol >= 0.0 ? tol : 1e-8) * trial_size;
  out.residual = std::max(0.0, -lo);
  out.passed = out.residual <= out.tolerance;
  out.detail = worst < 0 ? "all trial directions nonnegative"
                         : "most negative pairing at trial " + std::to_string(worst);
  return out;
}

std::vector<ScalarField> standard_trials(const ObstacleInstance& inst, const ScalarField& u,
                                         uint64_t seed) {
  const Grid& g = inst.grid;
  const int n = g.node_count();
  const double range = std::max(1e-3, field_range(u));

  auto clamp_feas = [&](ScalarField& f) {
    for (int id = 0; id < n; ++id)
      f.v[id] = g.is_boundary_node(id) ? inst.u0.v[id] : std::max(f.v[id], inst.psi.v[id]);
  };

  std::vector<ScalarField> trials;
  trials.reserve(12);

  ScalarField start = inst.u0;
  clamp_feas(start);
  trials.push_back(start); // clamped boundary interpolant
  trials.push_back(u);     // the candidate itself, pairing must vanish

  // Nonnegative bumps centered at the midpoint and the quarter point.
  auto bump_at = [&](double cx, double cy, double width) {
    ScalarField f = u;
    for (int id = 0; id < n; ++id) {
      if (g.is_boundary_node(id)) continue;
      auto xy = g.node_coord(id);
      double d = g.dim == 1 ? std::abs(xy[0] - cx) : std::hypot(xy[0] - cx, xy[1] - cy);
      f.v[id] += 0.1 * range * std::max(0.0, 1.0 - d / width);
    }
    clamp_feas(f);
    return f;
  };
  const double wx = 0.25 * (g.hi[0] - g.lo[0]);
  const double mx = 0.5 * (g.lo[0] + g.hi[0]);
  const double my = 0.5 * (g.lo[1] + g.hi[1]);
  trials.push_back(bump_at(mx, my, wx));
  trials.push_back(bump_at(g.lo[0] + 0.25 * (g.hi[0] - g.lo[0]), my, 0.5 * wx));

  // Convex combinations toward the interpolant.
  for (double lam : {0.5, 0.25}) {
    ScalarField f(g);
    for (int id = 0; id < n; ++id) f.v[id] = (1.0 - lam) * u.v[id] + lam * start.v[id];
    clamp_feas(f);
    trials.push_back(f);
  }

  // Pull-aways from the obstacle: eta - psi = (1 + c)(u - psi) >= 0.
  for (double c : {0.5, 1.0}) {
    ScalarField f = u;
    for (int id = 0; id < n; ++id)
      if (!g.is_boundary_node(id)) f.v[id] = u.v[id] + c * (u.v[id] - inst.psi.v[id]);
    clamp_feas(f);
    trials.push_back(f);
  }

  // Seeded random feasible perturbations, two one-sided and two signed.
  uint64_t s = seed * 0x9e3779b97f4a7c15ull + 0x243f6a8885a308d3ull;
  for (int rep = 0; rep < 2; ++rep) {
    ScalarField f = u;
    for (int id = 0; id < n; ++id)
      if (!g.is_boundary_node(id)) f.v[id] += 0.05 * range * unit(s);
    clamp_feas(f);
    trials.push_back(f);
  }
  for (int rep = 0; rep < 2; ++rep) {
    ScalarField f = u;
    for (int id = 0; id < n; ++id)
      if (!g.is_boundary_node(id)) f.v[id] += 0.05 * range * (unit(s) - 0.5);
    clamp_feas(f);
    trials.push_back(f);
  }
  return trials;
}

double oracle_conjugate(const Profile& f, double s, const OracleGrid& grid) {
  if (!(grid.t_max > 0.0) || !(grid.step > 0.0))
    fail(errc::invalid_argument, "oracle grid needs positive t_max and step");
  if (s < 0.0) fail(errc::invalid_argument, "oracle slope must be nonnegative");
  const long long count = static_cast<long long>(std::ceil(grid.t_max / grid.step));
  double best = -std::numeric_limits<double>::infinity();
  long long best_i = 0;
  for (long long i = 0; i <= count; ++i) {
    double t = std::min(i * grid.step, grid.t_max);
    double v = s * t - f(t);
    if (v > best) {
      best = v;
      best_i = i;
    }
  }
  if (best_i == count)
    fail(errc::t_max_too_small,
         "conjugate argmax at the grid edge t=" + std::to_string(grid.t_max));
  return best;
}

OracleGrid suggest_oracle_grid(const Profile& f, double s) {
  // Doubling on function values only: past the peak once s*t - f(t) drops.
  double t = 1.0, best = s * 0.0 - f(0.0);
  for (int it = 0; it < 200; ++it) {
    double v = s * t - f(t);
    if (v < best - 1e-12 * std::max(1.0, std::abs(best))) break;
    best = std::max(best, v);
    t *= 2.0;
    if (t > 1e12)
      fail(errc::search_horizon_exceeded, "no conjugate peak below t=1e12");
  }
  OracleGrid g;
  g.t_max = 2.0 * t;
  g.step = g.t_max / 5e5;
  return g;
}

double MembraneSolution::eval(double x) const {
  double ax = std::abs(x);
  return ax <= a ? height - x * x : 2.0 * a * (1.0 - ax);
}

double MembraneSolution::slope(double x) const {
  double ax = std::abs(x);
  double m = ax <= a ? -2.0 * ax : -2.0 * a;
  return x < 0.0 ? -m : m;
}

MembraneSolution analytic_membrane_1d(double obstacle_height) {
  if (!(obstacle_height > 0.0) || !(obstacle_height < 1.0))
    fail(errc::height_out_of_range,
         "membrane obstacle height must lie in (0,1), got " + std::to_string(obstacle_height));
  MembraneSolution sol;
  sol.height = obstacle_height;
  sol.a = 1.0 - std::sqrt(1.0 - obstacle_height);
  sol.energy = 8.0 * sol.a * sol.a - 16.0 * sol.a * sol.a * sol.a / 3.0;
  return sol;
}

} // namespace obsdual
