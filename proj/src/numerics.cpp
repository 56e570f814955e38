#include "obsdual/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <string>

#include "obsdual/errors.hpp"

namespace obsdual {

double bisect_nondecreasing(const std::function<double(double)>& g, double target, double lo,
                            double hi, double tol) {
  if (!(lo <= hi)) fail(errc::invalid_argument, "bisection bracket is empty");
  double a = lo, b = hi;
  while (b - a > tol) {
    double m = 0.5 * (a + b);
    if (m <= a || m >= b) break; // interval no longer splittable in doubles
    if (g(m) >= target)
      b = m;
    else
      a = m;
  }
  return b;
}

namespace {

QuadratureRule make_gauss_legendre(int n) {
  // Newton on the Legendre polynomial from the Chebyshev-like initial guess.
  QuadratureRule rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int j = 2; j <= n; ++j) {
        double p2 = ((2.0 * j - 1.0) * x * p1 - (j - 1.0) * p0) / j;
        p0 = p1;
        p1 = p2;
      }
      pp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / pp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    rule.nodes[n - 1 - i] = x;
    rule.weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * pp * pp);
  }
  return rule;
}

} // namespace

const QuadratureRule& gauss_legendre(int n) {
  static std::map<int, QuadratureRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, make_gauss_legendre(n)).first;
  return it->second;
}

double integrate(const std::function<double(double)>& f, double a, double b, int n, int panels) {
  const QuadratureRule& rule = gauss_legendre(n);
  double total = 0.0;
  double w = (b - a) / panels;
  for (int p = 0; p < panels; ++p) {
    double lo = a + p * w;
    double mid = lo + 0.5 * w, half = 0.5 * w;
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += rule.weights[i] * f(mid + half * rule.nodes[i]);
    total += s * half;
  }
  return total;
}

ConvexSpline::ConvexSpline(std::vector<double> x, std::vector<double> y) {
  const size_t n = x.size();
  if (n < 2 || y.size() != n) fail(errc::invalid_argument, "convex spline needs >= 2 samples");
  std::vector<double> h(n - 1), s(n - 1);
  for (size_t i = 0; i + 1 < n; ++i) {
    h[i] = x[i + 1] - x[i];
    if (!(h[i] > 0.0)) fail(errc::invalid_argument, "convex spline abscissae must increase");
    s[i] = (y[i + 1] - y[i]) / h[i];
  }
  for (size_t i = 1; i + 1 < n; ++i) {
    double tol = 1e-9 * std::max({1.0, std::fabs(s[i - 1]), std::fabs(s[i])});
    if (s[i] < s[i - 1] - tol)
      fail(errc::non_convex_profile, "secants decrease near x = " + std::to_string(x[i]));
  }
  if (s[0] < -1e-9 * std::max(1.0, std::fabs(s[0])))
    fail(errc::non_convex_profile, "data decreases at the left end");
  if (n >= 3 && s[0] > 0.0 && s[1] == s[0])
    fail(errc::invalid_argument,
         "data starts with a linear run; the slope cannot vanish at the left end");

  // Knot slopes: pinned to zero at the origin, secant midpoints inside.
  // Exactly tied secants mean the data is linear there, which forces the
  // slope at every knot the run touches; two runs meeting at a knot would
  // need a derivative jump, so that case is rejected.
  std::vector<double> d(n);
  d[0] = 0.0;
  for (size_t i = 1; i + 1 < n; ++i) {
    double L = s[i - 1], R = s[i];
    bool run_left = i >= 2 && s[i - 2] == L;
    bool run_right = i + 2 < n && s[i + 1] == R;
    if (L == R)
      d[i] = R;
    else if (run_left && run_right)
      fail(errc::invalid_argument,
           "two linear runs meet at x = " + std::to_string(x[i]) +
               "; C1 convex interpolation needs a curved row between them");
    else if (run_left)
      d[i] = L;
    else if (run_right)
      d[i] = R;
    else
      d[i] = 0.5 * (L + R);
  }
  if (n >= 3 && s[n - 2] == s[n - 3])
    d[n - 1] = s[n - 2];
  else
    d[n - 1] = 0.5 * (3.0 * s[n - 2] - d[n - 2]);

  // One quadratic piece per side of the inserted knot; placing it at
  // xi = x_l + h (d_r - sec) / (d_r - d_l) makes the middle slope equal the
  // secant, so the piece hits the right sample exactly.
  x_.push_back(x[0]);
  y_.push_back(y[0]);
  d_.push_back(d[0]);
  for (size_t i = 0; i + 1 < n; ++i) {
    double dl = d[i], dr = d[i + 1];
    if (dr - dl > 1e-12 * std::max({1.0, std::fabs(dl), std::fabs(dr)})) {
      double a = h[i] * (dr - s[i]) / (dr - dl);
      if (a > 1e-12 * h[i] && a < h[i] * (1.0 - 1e-12)) {
        x_.push_back(x[i] + a);
        y_.push_back(y[i] + a * 0.5 * (dl + s[i]));
        d_.push_back(s[i]);
      }
    }
    x_.push_back(x[i + 1]);
    y_.push_back(y[i + 1]);
    d_.push_back(dr);
  }
}

int ConvexSpline::interval(double t) const {
  int lo = 0, hi = static_cast<int>(x_.size()) - 1;
  while (hi - lo > 1) {
    int m = (lo + hi) / 2;
    if (x_[m] <= t)
      lo = m;
    else
      hi = m;
  }
  return lo;
}

double ConvexSpline::value(double t) const {
  if (t <= x_.front()) return y_.front() + d_.front() * (t - x_.front());
  if (t >= x_.back()) return y_.back() + d_.back() * (t - x_.back());
  int i = interval(t);
  double w = x_[i + 1] - x_[i];
  double u = t - x_[i];
  return y_[i] + u * (d_[i] + 0.5 * u * (d_[i + 1] - d_[i]) / w);
}

double ConvexSpline::deriv(double t) const {
  if (t <= x_.front()) return d_.front();
  if (t >= x_.back()) return d_.back();
  int i = interval(t);
  double w = x_[i + 1] - x_[i];
  double u = t - x_[i];
  return d_[i] + u * (d_[i + 1] - d_[i]) / w;
}

} // namespace obsdual
