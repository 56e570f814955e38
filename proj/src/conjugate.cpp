#include "obsdual/conjugate.hpp"

#include <cmath>
#include <vector>

#include "obsdual/errors.hpp"
#include "obsdual/numerics.hpp"

namespace obsdual {

namespace {
constexpr double kRadiusHorizon = 1e250;
}

double ConjugateTable::invert_slope(double s) const {
  if (s < 0.0) fail(errc::invalid_argument, "slope inversion needs s >= 0");
  if (s == 0.0) return 0.0;
  double hi = 1.0;
  while (source.df(hi) < s) {
    hi *= 2.0;
    if (hi > kRadiusHorizon)
      fail(errc::search_horizon_exceeded, "slope " + std::to_string(s) + " never reached");
  }
  double lo = hi * 0.5 < 1.0 ? 0.0 : hi * 0.5;
  return bisect_nondecreasing(source.df, s, lo, hi, inversion_tol * std::max(1.0, hi));
}

double ConjugateTable::eval(double s) const {
  if (s < 0.0) fail(errc::invalid_argument, "conjugate evaluated at negative slope");
  if (s == 0.0) return -source.f(0.0); // exact: the profile minimum sits at 0
  if (source.growth == Growth::lipschitz) {
    double cap = source.slope_cap;
    if (s > cap + 1e-9 * std::max(1.0, cap)) return kInf;
    if (s >= cap * (1.0 - 1e-12)) {
      // at (or numerically at) the cap: s t - f(t) is nondecreasing; chase its limit
      double t = 1.0, prev = s * t - source.f(t);
      for (int i = 0; i < 2000; ++i) {
        t *= 2.0;
        double v = s * t - source.f(t);
        if (std::abs(v - prev) <= 1e-12 * std::max(1.0, std::abs(v))) return v;
        prev = v;
        if (t > kRadiusHorizon)
          fail(errc::domain_exceeded, "conjugate did not settle at the slope cap");
      }
    }
  }
  double hi = 1.0;
  while (source.df(hi) < s) {
    hi *= 2.0;
    if (hi > kRadiusHorizon) {
      if (source.growth == Growth::superlinear) return kInf; // value overflows doubles
      fail(errc::domain_exceeded, "slope below cap but never attained");
    }
  }
  double lo = hi * 0.5 < 1.0 ? 0.0 : hi * 0.5;
  double t = bisect_nondecreasing(source.df, s, lo, hi, inversion_tol * std::max(1.0, hi));
  return s * t - source.f(t);
}

double conjugate_eval(const ConjugateTable& C, double s) { return C.eval(s); }

double fenchel_gap(const RadialLagrangian& L, const ConjugateTable& C,
                   std::span<const double> xi, std::span<const double> z) {
  if (xi.size() != z.size()) fail(errc::invalid_argument, "fenchel_gap dimension mismatch");
  double zr2 = 0.0, dot = 0.0;
  for (size_t i = 0; i < xi.size(); ++i) {
    zr2 += z[i] * z[i];
    dot += xi[i] * z[i];
  }
  double fstar = C.eval(std::sqrt(zr2));
  if (!std::isfinite(fstar)) return kInf;
  return fstar + eval_lagrangian(L, xi) - dot;
}

double bipolar_check(const RadialLagrangian& L, const ConjugateTable& C,
                     std::span<const double> radius_samples, const SlopeGrid& grid) {
  if (!(grid.step > 0.0) || !(grid.s_max > 0.0))
    fail(errc::invalid_argument, "bipolar_check needs a positive slope grid");
  const int n = static_cast<int>(grid.s_max / grid.step) + 1;
  std::vector<double> fstar(n);
  for (int i = 0; i < n; ++i) fstar[i] = C.eval(i * grid.step);

  double worst = 0.0;
  for (double t : radius_samples) {
    double best = -kInf;
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(fstar[i])) break; // conjugate and grid are both increasing
      double v = i * grid.step * t - fstar[i];
      if (v > best) best = v;
    }
    worst = std::max(worst, std::abs(best - L.f(t)));
  }
  return worst;
}

} // namespace obsdual
