#include "obsdual/lagrangian.hpp"

#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>
#include <vector>

#include "obsdual/errors.hpp"
#include "obsdual/numerics.hpp"

namespace obsdual {

double eval_lagrangian(const RadialLagrangian& L, std::span<const double> xi) {
  double r2 = 0.0;
  for (double c : xi) r2 += c * c;
  return L.f(std::sqrt(r2));
}

void eval_gradient(const RadialLagrangian& L, std::span<const double> xi, std::span<double> out) {
  if (out.size() != xi.size()) fail(errc::invalid_argument, "gradient output size mismatch");
  double r2 = 0.0;
  for (double c : xi) r2 += c * c;
  double r = std::sqrt(r2);
  if (r == 0.0) {
    for (auto& c : out) c = 0.0;
    return;
  }
  double scale = L.df(r) / r;
  for (size_t i = 0; i < xi.size(); ++i) out[i] = scale * xi[i];
}

void validate(const RadialLagrangian& L, const ValidationOptions& opt) {
  auto where = [&](double t) {
    std::ostringstream os;
    os << L.name << " at t = " << t;
    return os.str();
  };
  if (L.f(0.0) < -1e-12) fail(errc::invalid_argument, L.name + ": profile negative at 0");
  if (std::abs(L.df(0.0)) > 1e-9)
    fail(errc::invalid_argument, L.name + ": profile slope at 0 must vanish");

  const int n = opt.samples;
  const double h = opt.t_max / n;
  double prev_df = L.df(0.0);
  double prev_f = L.f(0.0);
  for (int i = 1; i <= n; ++i) {
    double t = i * h;
    double ft = L.f(t), dft = L.df(t);
    if (!std::isfinite(ft) || !std::isfinite(dft))
      fail(errc::invalid_argument, where(t) + ": profile not finite");
    if (ft < -1e-12) fail(errc::invalid_argument, where(t) + ": profile negative");
    double scale = std::max(1.0, std::abs(dft));
    if (dft < prev_df - 1e-9 * scale) fail(errc::non_convex_profile, where(t));
    if (L.growth == Growth::lipschitz && dft > L.slope_cap + 1e-9 * scale)
      fail(errc::invalid_argument, where(t) + ": slope exceeds declared cap");
    prev_df = dft;
    prev_f = ft;
  }
  (void)prev_f;

  if (L.growth == Growth::superlinear) {
    // slope must keep climbing; a flat tail means the declared growth is wrong
    if (L.df(opt.t_max) <= L.df(opt.t_max * 0.5) + 1e-12)
      fail(errc::invalid_argument, L.name + ": slope saturates but growth is superlinear");
  }

  if (opt.check_minorant && L.has_minorant()) {
    if (L.theta(0.0) < -1e-12) fail(errc::invalid_argument, L.name + ": minorant negative at 0");
    double prev_gap_q = -kInf; // difference quotients of f - theta must not decrease
    double prev_gap = L.f(0.0) - L.theta(0.0);
    double prev_th = L.theta(0.0);
    for (int i = 1; i <= n; ++i) {
      double t = i * h;
      double th = L.theta(t);
      double ft = L.f(t);
      double scale = std::max(1.0, std::abs(ft));
      if (th > ft + 1e-9 * scale)
        fail(errc::invalid_argument, where(t) + ": minorant exceeds profile");
      if (th < prev_th - 1e-12 * scale)
        fail(errc::invalid_argument, where(t) + ": minorant decreases");
      double gap = ft - th;
      double q = (gap - prev_gap) / h;
      if (q < prev_gap_q - 1e-7 * scale)
        fail(errc::non_convex_profile, where(t) + ": profile minus minorant not convex");
      prev_gap_q = q;
      prev_gap = gap;
      prev_th = th;
    }
  }
}

RadialLagrangian make_power(double alpha) {
  if (!(alpha > 1.0)) fail(errc::invalid_argument, "power profile needs alpha > 1");
  RadialLagrangian L;
  std::ostringstream os;
  os << "power:" << alpha;
  L.name = os.str();
  if (alpha == 2.0) {
    L.f = [](double t) { return t * t; };
    L.df = [](double t) { return 2.0 * t; };
  } else if (alpha == 3.0) {
    L.f = [](double t) { return t * t * t; };
    L.df = [](double t) { return 3.0 * t * t; };
  } else if (alpha == 1.5) {
    L.f = [](double t) { return t * std::sqrt(t); };
    L.df = [](double t) { return 1.5 * std::sqrt(t); };
  } else {
    L.f = [alpha](double t) { return std::pow(t, alpha); };
    L.df = [alpha](double t) { return t == 0.0 ? 0.0 : alpha * std::pow(t, alpha - 1.0); };
  }
  L.growth = Growth::superlinear;
  L.theta = L.f;
  L.dtheta = L.df;
  L.theta_name = L.name;
  return L;
}

RadialLagrangian make_cosh() {
  RadialLagrangian L;
  L.name = "cosh";
  L.f = [](double t) { return std::cosh(t); };
  L.df = [](double t) { return std::sinh(t); };
  L.growth = Growth::superlinear;
  // t^2/2: the largest quadratic minorant for which cosh - theta stays convex
  L.theta = [](double t) { return 0.5 * t * t; };
  L.dtheta = [](double t) { return t; };
  L.theta_name = "power:2:0.5";
  return L;
}

RadialLagrangian make_xlogx_shifted() {
  RadialLagrangian L;
  L.name = "xlogx_shifted";
  const double a = 1.0 / M_E;
  L.f = [a](double t) { return (t + a) * std::log(t + a) + a; };
  L.df = [a](double t) { return std::log(t + a) + 1.0; };
  L.growth = Growth::superlinear;
  L.theta = L.f;
  L.dtheta = L.df;
  L.theta_name = L.name;
  return L;
}

RadialLagrangian make_custom(const std::string& csv_path) {
  std::ifstream in(csv_path);
  if (!in) fail(errc::io_error, "cannot open profile table " + csv_path);
  std::vector<double> ts, fs;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    for (auto& ch : line)
      if (ch == ',' || ch == ';' || ch == '\t') ch = ' ';
    std::istringstream ls(line);
    double t, v;
    if (!(ls >> t >> v)) {
      if (lineno == 1) continue; // header row
      fail(errc::config_error, csv_path + ":" + std::to_string(lineno) + ": expected 't value'");
    }
    ts.push_back(t);
    fs.push_back(v);
  }
  if (ts.size() < 3) fail(errc::config_error, csv_path + ": profile table needs >= 3 rows");
  if (ts.front() != 0.0) fail(errc::config_error, csv_path + ": profile table must start at t = 0");

  auto interp = std::make_shared<ConvexSpline>(std::move(ts), std::move(fs));
  RadialLagrangian L;
  L.name = "custom:" + csv_path;
  L.f = [interp](double t) { return interp->value(t); };
  L.df = [interp](double t) { return interp->deriv(t); };
  L.growth = Growth::lipschitz; // table extends with its terminal slope
  L.slope_cap = interp->end_slope();
  ValidationOptions opt;
  opt.t_max = interp->x_back();
  opt.check_minorant = false;
  validate(L, opt);
  return L;
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  parts.push_back(cur);
  return parts;
}

double parse_num(const std::string& s, const std::string& what) {
  try {
    size_t pos = 0;
    double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    fail(errc::config_error, "bad number '" + s + "' in " + what);
  }
}

} // namespace

void set_minorant(RadialLagrangian& L, const std::string& spec) {
  if (spec.empty() || spec == "default") return; // constructors already installed it
  if (spec == "none") {
    L.theta = nullptr;
    L.dtheta = nullptr;
    L.theta_name.clear();
    return;
  }
  auto parts = split(spec, ':');
  if (parts[0] == "power" && (parts.size() == 2 || parts.size() == 3)) {
    double alpha = parse_num(parts[1], "minorant spec");
    double coef = parts.size() == 3 ? parse_num(parts[2], "minorant spec") : 1.0;
    if (!(alpha > 1.0) || !(coef > 0.0))
      fail(errc::config_error, "minorant power needs alpha > 1, coef > 0");
    L.theta = [alpha, coef](double t) { return coef * std::pow(t, alpha); };
    L.dtheta = [alpha, coef](double t) {
      return t == 0.0 ? 0.0 : coef * alpha * std::pow(t, alpha - 1.0);
    };
    L.theta_name = spec;
    return;
  }
  fail(errc::config_error, "unknown minorant spec '" + spec + "'");
}

RadialLagrangian parse_lagrangian(const std::string& spec, const std::string& minorant) {
  auto parts = split(spec, ':');
  RadialLagrangian L;
  if (parts[0] == "power" && parts.size() == 2) {
    L = make_power(parse_num(parts[1], "lagrangian spec"));
  } else if (parts[0] == "cosh" && parts.size() == 1) {
    L = make_cosh();
  } else if (parts[0] == "xlogx_shifted" && parts.size() == 1) {
    L = make_xlogx_shifted();
  } else if (parts[0] == "custom" && parts.size() >= 2) {
    L = make_custom(spec.substr(std::string("custom:").size()));
  } else {
    fail(errc::config_error, "unknown lagrangian spec '" + spec + "'");
  }
  set_minorant(L, minorant);
  return L;
}

} // namespace obsdual
