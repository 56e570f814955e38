#include "obsdual/ladder.hpp"

#include <cmath>
#include <memory>
#include <sstream>

#include "obsdual/errors.hpp"
#include "obsdual/numerics.hpp"

namespace obsdual {

double bump_kernel(double x) {
  if (std::abs(x) >= 1.0) return 0.0;
  return std::exp(1.0 / (x * x - 1.0));
}

double bump_normalization() {
  static const double c = [] {
    double mass = integrate([](double x) { return bump_kernel(x); }, -1.0, 1.0, 64, 16);
    return 1.0 / mass;
  }();
  return c;
}

double truncated_bipolar(const RadialLagrangian& L, const ConjugateTable& C, double k, double t) {
  if (!(k > 0.0)) fail(errc::invalid_argument, "truncation slope must be positive");
  if (L.growth == Growth::lipschitz && k > L.slope_cap + 1e-9 * std::max(1.0, L.slope_cap))
    fail(errc::domain_exceeded, "truncation slope beyond the profile's cap");
  if (L.df(t) <= k) return L.f(t);
  double fstar = C.eval(k);
  return k * t - fstar;
}

double g_level(const RadialLagrangian& L, const ConjugateTable& C, double k, double t) {
  if (!L.has_minorant()) fail(errc::missing_minorant, L.name);
  return std::max(truncated_bipolar(L, C, k, t), L.theta(t));
}

namespace {

struct LevelData {
  RadialLagrangian L; // copied: levels outlive their builder inputs
  double k = 0.0;
  double fstar = 0.0;
  double r_k = 0.0, m_k = 0.0, delta = 0.0, mu = 0.0;
  double t_star = 0.0, g_at_tstar = 0.0;
  // positive-half quadrature: kernel-weighted nodes on (0, 1], scaled by delta
  std::vector<double> qy, qc;
  double qmass = 0.0;

  double tb(double t) const { return L.df(t) <= k ? L.f(t) : k * t - fstar; }
  double tb_slope(double t) const { return std::min(L.df(t), k); }
  double g(double t) const { return std::max(tb(t), L.theta(t)); }
  double g_slope(double t) const {
    double a = tb(t), b = L.theta(t);
    double tie = 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
    if (a > b + tie) return tb_slope(t);
    if (b > a + tie) return L.dtheta(t);
    return std::max(tb_slope(t), L.dtheta(t));
  }
  double h(double t) const {
    return t <= t_star ? g(t) : g_at_tstar + m_k * (t - t_star);
  }
  double h_slope(double t) const { return t <= t_star ? g_slope(t) : m_k; }

  double fk(double t) const {
    // the whole kernel window sits on the linear branch: smoothing is exact
    if (t - delta >= t_star) return g_at_tstar + m_k * (t - t_star) - mu;
    double s = 0.0;
    for (size_t i = 0; i < qy.size(); ++i)
      s += qc[i] * (h(std::abs(t - qy[i])) + h(t + qy[i]));
    return s / qmass - mu;
  }
  double dfk(double t) const {
    if (t - delta >= t_star) return m_k;
    double s = 0.0;
    for (size_t i = 0; i < qy.size(); ++i) {
      double a = t - qy[i];
      double da = a == 0.0 ? 0.0 : (a > 0 ? h_slope(a) : -h_slope(-a));
      s += qc[i] * (da + h_slope(t + qy[i]));
    }
    return s / qmass;
  }
};

struct Crossing {
  double t_k = 0.0, r_k = 0.0;
};

Crossing locate_crossing(const RadialLagrangian& L, const ConjugateTable& C, double k,
                         double fstar, const LadderOptions& opt) {
  Crossing out;
  double cap_slope = L.growth == Growth::lipschitz ? std::min(k, L.slope_cap) : k;
  out.t_k = C.invert_slope(cap_slope);

  auto d = [&](double t) { return k * t - fstar - L.theta(t); }; // concave past t_k
  double scale = std::max(1.0, std::abs(L.theta(std::max(out.t_k, 1.0))));

  double hi = std::max(out.t_k, 1.0);
  while (d(hi) > -1e-12 * scale) {
    hi *= 2.0;
    if (hi > opt.max_radius)
      fail(errc::search_horizon_exceeded,
           "minorant never overtakes the truncated profile below radius " +
               std::to_string(opt.max_radius));
  }

  // d is concave on [t_k, hi]: locate its peak, then the final sign change
  double a = out.t_k, b = hi;
  for (int i = 0; i < 200 && (b - a) > 1e-13 * std::max(1.0, b); ++i) {
    double m1 = a + (b - a) / 3.0, m2 = b - (b - a) / 3.0;
    if (d(m1) < d(m2))
      a = m1;
    else
      b = m2;
  }
  double peak = 0.5 * (a + b);
  double r_hat;
  if (d(peak) <= 1e-12 * scale) {
    r_hat = out.t_k; // never strictly above the minorant past t_k
  } else {
    auto md = [&](double t) { return -d(t); }; // nondecreasing on [peak, hi]
    r_hat = bisect_nondecreasing(md, 0.0, peak, hi, 1e-12 * std::max(1.0, hi));
  }
  out.r_k = std::max(out.t_k, r_hat);

  // the crossing must be final, not a grazing touch
  double probe_hi = std::max(out.r_k * opt.probe_factor, out.r_k + 1.0);
  for (int i = 1; i <= 256; ++i) {
    double t = out.r_k + (probe_hi - out.r_k) * i / 256.0;
    if (d(t) > opt.join_tol * std::max(1.0, std::abs(L.theta(t))))
      fail(errc::search_horizon_exceeded, "truncated profile re-crosses the minorant past r_k");
  }
  return out;
}

} // namespace

double find_rk(const RadialLagrangian& L, const ConjugateTable& C, double k,
               const LadderOptions& opt) {
  if (!L.has_minorant()) fail(errc::missing_minorant, L.name);
  double fstar = C.eval(k);
  if (!std::isfinite(fstar)) fail(errc::domain_exceeded, "f*(k) not finite");
  return locate_crossing(L, C, k, fstar, opt).r_k;
}

LadderLevel build_level(const RadialLagrangian& L, const ConjugateTable& C, int k,
                        const LadderOptions& opt) {
  if (k < 2) fail(errc::invalid_argument, "ladder levels need integer k >= 2");
  if (!L.has_minorant()) fail(errc::missing_minorant, L.name);

  auto data = std::make_shared<LevelData>();
  data->L = L;
  data->k = k;
  data->fstar = C.eval(static_cast<double>(k));
  if (!std::isfinite(data->fstar)) fail(errc::domain_exceeded, "f*(k) not finite");

  Crossing cross = locate_crossing(L, C, k, data->fstar, opt);
  data->r_k = cross.r_k;
  double th_r = L.theta(data->r_k);
  if (std::abs(data->g(data->r_k) - th_r) > opt.join_tol * std::max(1.0, std::abs(th_r))) {
    std::ostringstream os;
    os << L.name << ": G_k(r_k) = " << data->g(data->r_k) << " vs theta(r_k) = " << th_r
       << " at r_k = " << data->r_k;
    fail(errc::discontinuity_at_join, os.str());
  }
  data->m_k = th_r / data->r_k;
  data->delta = 1.0 / (static_cast<double>(k) * k * data->m_k);
  data->mu = 1.0 / (k - 1.0);

  // envelope departure: last radius whose g-slope still sits at or below m_k.
  // Bisect keeping the lower endpoint so the envelope slope never exceeds m_k.
  {
    double hi = std::max(data->r_k, 1.0);
    while (data->g_slope(hi) < data->m_k) {
      hi *= 2.0;
      if (hi > opt.max_radius)
        fail(errc::search_horizon_exceeded, "envelope slope never reaches m_k");
    }
    double lo = 0.0;
    while (hi - lo > 1e-12 * std::max(1.0, hi)) {
      double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      if (data->g_slope(mid) < data->m_k)
        lo = mid;
      else
        hi = mid;
    }
    data->t_star = lo;
    data->g_at_tstar = data->g(lo);
  }

  // symmetric positive-half kernel quadrature; self-normalized so the
  // convexity, Lipschitz, and sandwich bounds hold sample-exactly
  const QuadratureRule& rule = gauss_legendre(opt.quad_nodes);
  for (int i = 0; i < opt.quad_nodes; ++i) {
    if (rule.nodes[i] <= 0.0) continue;
    data->qy.push_back(rule.nodes[i] * data->delta);
    data->qc.push_back(rule.weights[i] * bump_kernel(rule.nodes[i]));
  }
  for (double c : data->qc) data->qmass += 2.0 * c;

  LadderLevel level;
  level.k = k;
  level.r_k = data->r_k;
  level.m_k = data->m_k;
  level.delta_k = data->delta;
  level.mu_k = data->mu;
  level.t_star = data->t_star;
  level.tail_intercept = data->g_at_tstar - data->m_k * data->t_star;
  level.fstar_at_k = data->fstar;
  level.g = [data](double t) { return data->g(t); };
  level.h = [data](double t) { return data->h(t); };
  level.fk = [data](double t) { return data->fk(t); };
  level.dfk = [data](double t) { return data->dfk(t); };

  // the smoothed profile must stay inside the Lipschitz sandwich
  double span = 3.0 * data->r_k;
  for (int i = 0; i <= 60; ++i) {
    double t = span * i / 60.0;
    double lo = data->h(t) - data->mu;
    double hi = data->h(t) + data->delta * data->m_k - data->mu;
    double v = data->fk(t);
    double slack = 1e-9 * std::max(1.0, std::abs(hi));
    if (v < lo - slack || v > hi + slack) {
      std::ostringstream os;
      os << "level k=" << k << " at t=" << t << ": " << v << " outside [" << lo << ", " << hi
         << "]";
      fail(errc::quadrature_failure, os.str());
    }
  }
  return level;
}

double h_level(const RadialLagrangian& L, const ConjugateTable& C, int k, double t,
               const LadderOptions& opt) {
  return build_level(L, C, k, opt).h(t);
}

double mollify_level(const RadialLagrangian& L, const ConjugateTable& C, int k, double t,
                     const LadderOptions& opt) {
  return build_level(L, C, k, opt).fk(t);
}

std::vector<LadderLevel> build_ladder(const RadialLagrangian& L, const ConjugateTable& C,
                                      std::span<const int> k_list, const LadderOptions& opt) {
  if (k_list.empty()) fail(errc::invalid_argument, "empty level list");
  std::vector<LadderLevel> levels;
  levels.reserve(k_list.size());
  int prev_k = 1;
  for (int k : k_list) {
    if (k <= prev_k) fail(errc::invalid_argument, "level list must strictly increase");
    prev_k = k;
    levels.push_back(build_level(L, C, k, opt));
  }

  double span = 3.0 * levels.back().r_k;
  int n = std::max(60, static_cast<int>(span / opt.grid_step));
  n = std::min(n, 20000);
  for (int i = 0; i <= n; ++i) {
    double t = span * i / n;
    double f_t = L.f(t);
    double prev = -kInf;
    for (const auto& lv : levels) {
      double v = lv.fk(t);
      double slack = 1e-9 * std::max(1.0, std::abs(f_t));
      if (v < prev - slack || v > f_t + slack) {
        std::ostringstream os;
        os << "ladder order broken at k=" << lv.k << ", t=" << t;
        fail(errc::monotonicity_violation, os.str());
      }
      prev = v;
    }
  }
  return levels;
}

RadialLagrangian as_lagrangian(const LadderLevel& level, const std::string& base_name) {
  RadialLagrangian L;
  std::ostringstream os;
  os << base_name << "[k=" << level.k << "]";
  L.name = os.str();
  L.f = level.fk;
  L.df = level.dfk;
  L.growth = Growth::lipschitz;
  L.slope_cap = level.m_k;
  return L;
}

} // namespace obsdual
