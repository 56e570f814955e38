#pragma once

#include <functional>
#include <limits>
#include <span>
#include <string>

namespace obsdual {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

using Profile = std::function<double(double)>;

enum class Growth {
  superlinear, ///< f(t)/t unbounded; conjugate finite everywhere
  lipschitz,   ///< slope capped; conjugate +inf beyond the cap
};

/// Radial integrand F(xi) = f(|xi|): convex profile f on [0, inf) with
/// f(0) >= 0 and f'(0) = 0, plus an optional strictly convex superlinear
/// minorant theta <= f used by the truncation ladder.
struct RadialLagrangian {
  std::string name;
  Profile f;       ///< profile value
  Profile df;      ///< profile slope, nondecreasing, df(0) = 0
  Growth growth = Growth::superlinear;
  double slope_cap = kInf; ///< sup of df; finite only in lipschitz mode

  Profile theta;    ///< minorant profile (may be empty)
  Profile dtheta;   ///< minorant slope (set iff theta is)
  std::string theta_name;

  bool has_minorant() const { return static_cast<bool>(theta); }
  double value(double t) const { return f(t); }
  double slope(double t) const { return df(t); }
};

/// What construction-time validation samples and rejects on.
struct ValidationOptions {
  double t_max = 10.0;   ///< radius range probed
  int samples = 2000;
  bool check_minorant = true; ///< theta <= f and f - theta convex on samples
};

/// F(xi) for an n-vector xi (n = xi.size(), 1 or 2).
double eval_lagrangian(const RadialLagrangian& L, std::span<const double> xi);

/// Nabla F(xi) = f'(|xi|) xi / |xi|, written into `out` (same length as xi).
void eval_gradient(const RadialLagrangian& L, std::span<const double> xi,
                   std::span<double> out);

/// Sampled checks of the structural hypotheses; throws NonConvexProfile /
/// InvalidArgument / MissingMinorant-adjacent failures with a located message.
void validate(const RadialLagrangian& L, const ValidationOptions& opt = {});

/// Catalog constructors.
RadialLagrangian make_power(double alpha);
RadialLagrangian make_cosh();
RadialLagrangian make_xlogx_shifted();
RadialLagrangian make_custom(const std::string& csv_path);

/// Attach a minorant profile: spec is "default", "power:{alpha}" or
/// "power:{alpha}:{coef}" meaning coef * t^alpha.
void set_minorant(RadialLagrangian& L, const std::string& spec);

/// Parse catalog spec strings: "power:{alpha}", "cosh", "xlogx_shifted",
/// "custom:{path}". Applies the default minorant unless `minorant` overrides.
RadialLagrangian parse_lagrangian(const std::string& spec,
                                  const std::string& minorant = "default");

} // namespace obsdual
