#pragma once

#include <span>

#include "obsdual/lagrangian.hpp"

namespace obsdual {

/// Fenchel conjugation of a radial profile by monotone slope inversion.
/// Stateless apart from the copied source; safe to share across threads.
struct ConjugateTable {
  ConjugateTable() = default; ///< empty until paired with a profile
  explicit ConjugateTable(RadialLagrangian src) : source(std::move(src)) {}

  RadialLagrangian source;
  double inversion_tol = 1e-12; ///< radius resolution, relative to the bracket

  /// f*(s) = sup_t (s t - f(t)) for s >= 0. Returns +inf past the slope cap
  /// (lipschitz mode) or when the true value overflows doubles.
  double eval(double s) const;

  /// Radius t with f'(t) = s (smallest such, up to tolerance).
  double invert_slope(double s) const;
};

double conjugate_eval(const ConjugateTable& C, double s);

/// F*(z) + F(xi) - <xi, z>, nonnegative by Fenchel-Young; zero exactly on the
/// graph z = F'(xi). +inf propagates from the conjugate.
double fenchel_gap(const RadialLagrangian& L, const ConjugateTable& C,
                   std::span<const double> xi, std::span<const double> z);

struct SlopeGrid {
  double s_max = 10.0;
  double step = 1e-3;
};

/// Reconstruct f through the double conjugate on a slope grid and return the
/// largest |f**(t) - f(t)| over the given radius samples.
double bipolar_check(const RadialLagrangian& L, const ConjugateTable& C,
                     std::span<const double> radius_samples, const SlopeGrid& grid);

} // namespace obsdual
