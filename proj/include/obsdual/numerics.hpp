#pragma once

#include <functional>
#include <vector>

namespace obsdual {

/// Smallest t in [lo, hi] with g(t) >= target, for nondecreasing g.
/// Plain bisection; lo must satisfy g(lo) <= target <= g(hi).
double bisect_nondecreasing(const std::function<double(double)>& g, double target, double lo,
                            double hi, double tol);

/// Gauss-Legendre rule on [-1, 1]. Nodes ascend; weights are positive.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

const QuadratureRule& gauss_legendre(int n);

/// Integrate f over [a, b] with an n-point rule split over `panels` subintervals.
double integrate(const std::function<double(double)>& f, double a, double b, int n, int panels);

/// C1 interpolant of convex data through strictly increasing abscissae:
/// Schumaker's shape-preserving quadratic spline, one inserted knot per
/// interval. The derivative is piecewise linear, vanishes at the left end,
/// and never decreases, so end_slope() bounds the slope everywhere. Extends
/// linearly beyond either end. Rejects data whose secants decrease.
class ConvexSpline {
public:
  ConvexSpline() = default;
  ConvexSpline(std::vector<double> x, std::vector<double> y);

  double value(double t) const;
  double deriv(double t) const;
  double x_back() const { return x_.back(); }
  double end_slope() const { return d_.back(); }

private:
  int interval(double t) const;
  std::vector<double> x_, y_, d_; ///< breakpoints; derivative linear between
};

} // namespace obsdual
