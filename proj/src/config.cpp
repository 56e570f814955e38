#include "obsdual/config.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "obsdual/errors.hpp"
#include "obsdual/fieldio.hpp"

namespace obsdual {

namespace {

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

struct Where {
  const std::string& source;
  int line;
  [[noreturn]] void fail_at(const std::string& msg) const {
    fail(errc::config_error, source + ":" + std::to_string(line) + ": " + msg);
  }
};

double want_real(const Where& w, const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    double x = std::stod(v, &used);
    if (trim(v.substr(used)).empty()) return x;
  } catch (...) {
  }
  w.fail_at(key + " wants a real number, got '" + v + "'");
}

int want_int(const Where& w, const std::string& key, const std::string& v) {
  try {
    size_t used = 0;
    long x = std::stol(v, &used);
    if (trim(v.substr(used)).empty()) return static_cast<int>(x);
  } catch (...) {
  }
  w.fail_at(key + " wants an integer, got '" + v + "'");
}

std::vector<std::string> split_ws(const std::string& v) {
  std::vector<std::string> out;
  std::istringstream is(v);
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

double want_real_or_auto(const Where& w, const std::string& key, const std::string& v) {
  if (v == "auto") return -1.0;
  double x = want_real(w, key, v);
  if (!(x > 0.0)) w.fail_at(key + " wants 'auto' or a positive real");
  return x;
}

void set_kv(RunConfig& cfg, const std::string& section, const std::string& key,
            const std::string& value, const Where& w) {
  if (section == "lagrangian") {
    if (key == "profile") cfg.profile = value;
    else if (key == "minorant") cfg.minorant = value;
    else w.fail_at("unknown key '" + key + "' in [lagrangian]");
    return;
  }
  if (section == "domain") {
    if (key == "dim") {
      cfg.dim = want_int(w, key, value);
      if (cfg.dim != 1 && cfg.dim != 2) w.fail_at("dim wants 1 or 2");
    } else if (key == "x" || key == "y") {
      auto parts = split_ws(value);
      if (parts.size() != 2) w.fail_at(key + " wants 'lo hi'");
      int ax = key == "x" ? 0 : 1;
      cfg.lo[ax] = want_real(w, key, parts[0]);
      cfg.hi[ax] = want_real(w, key, parts[1]);
      if (!(cfg.lo[ax] < cfg.hi[ax])) w.fail_at(key + " wants lo < hi");
    } else if (key == "cells") {
      auto parts = split_ws(value);
      if (parts.empty() || parts.size() > 2) w.fail_at("cells wants one or two integers");
      cfg.cells[0] = want_int(w, key, parts[0]);
      cfg.cells[1] = parts.size() == 2 ? want_int(w, key, parts[1]) : cfg.cells[0];
      if (cfg.cells[0] < 1 || cfg.cells[1] < 1) w.fail_at("cells wants positive counts");
    } else {
      w.fail_at("unknown key '" + key + "' in [domain]");
    }
    return;
  }
  if (section == "obstacle") {
    if (key == "kind") {
      if (value != "parabola" && value != "cone" && value != "table")
        w.fail_at("obstacle kind wants parabola, cone, or table");
      cfg.obstacle_kind = value;
    } else if (key == "height") cfg.obstacle_height = want_real(w, key, value);
    else if (key == "slope") cfg.obstacle_slope = want_real(w, key, value);
    else if (key == "path") cfg.obstacle_path = value;
    else w.fail_at("unknown key '" + key + "' in [obstacle]");
    return;
  }
  if (section == "boundary") {
    if (key == "kind") {
      if (value != "zero" && value != "affine" && value != "table")
        w.fail_at("boundary kind wants zero, affine, or table");
      cfg.boundary_kind = value;
    } else if (key == "a") cfg.boundary_a = want_real(w, key, value);
    else if (key == "b" || key == "bx") cfg.boundary_bx = want_real(w, key, value);
    else if (key == "by") cfg.boundary_by = want_real(w, key, value);
    else if (key == "path") cfg.boundary_path = value;
    else w.fail_at("unknown key '" + key + "' in [boundary]");
    return;
  }
  if (section == "solver") {
    if (key == "max_iter") {
      cfg.solver.max_iter = want_int(w, key, value);
      if (cfg.solver.max_iter < 1) w.fail_at("max_iter wants a positive integer");
    } else if (key == "tol_kkt") cfg.solver.tol_kkt = want_real_or_auto(w, key, value);
    else if (key == "step") cfg.solver.step = want_real_or_auto(w, key, value);
    else if (key == "t_stretch") {
      cfg.t_stretch = want_real(w, key, value);
      if (!(cfg.t_stretch > 1.0)) w.fail_at("t_stretch wants a real above 1");
    } else w.fail_at("unknown key '" + key + "' in [solver]");
    return;
  }
  if (section == "ladder") {
    if (key == "k_list") {
      auto parts = split_ws(value);
      if (parts.empty()) w.fail_at("k_list wants at least one level");
      std::vector<int> ks;
      for (auto& p : parts) {
        int k = want_int(w, key, p);
        if (k < 2) w.fail_at("k_list entries want integers >= 2");
        if (!ks.empty() && k <= ks.back()) w.fail_at("k_list wants strictly increasing levels");
        ks.push_back(k);
      }
      cfg.k_list = std::move(ks);
    } else if (key == "grid_step") {
      cfg.ladder_grid_step = want_real(w, key, value);
      if (!(cfg.ladder_grid_step > 0.0)) w.fail_at("grid_step wants a positive real");
    } else w.fail_at("unknown key '" + key + "' in [ladder]");
    return;
  }
  if (section == "sweep") {
    if (key == "cells") {
      auto parts = split_ws(value);
      if (parts.empty()) w.fail_at("sweep cells wants at least one count");
      std::vector<int> cs;
      for (auto& p : parts) {
        int c = want_int(w, key, p);
        if (c < 2) w.fail_at("sweep cells want integers >= 2");
        if (!cs.empty() && c <= cs.back()) w.fail_at("sweep cells want a strictly increasing list");
        cs.push_back(c);
      }
      cfg.sweep_cells = std::move(cs);
    } else {
      w.fail_at("unknown key '" + key + "' in [sweep]");
    }
    return;
  }
  if (section == "conjugate") {
    if (key == "s_max") {
      cfg.s_max = want_real(w, key, value);
      if (!(cfg.s_max > 0.0)) w.fail_at("s_max wants a positive real");
    } else if (key == "s_step") {
      cfg.s_step = want_real(w, key, value);
      if (!(cfg.s_step > 0.0)) w.fail_at("s_step wants a positive real");
    } else if (key == "pairs") {
      cfg.fenchel_pairs = want_int(w, key, value);
      if (cfg.fenchel_pairs < 0) w.fail_at("pairs wants a nonnegative integer");
    } else if (key == "equality_pairs") {
      cfg.equality_pairs = want_int(w, key, value);
      if (cfg.equality_pairs < 0) w.fail_at("equality_pairs wants a nonnegative integer");
    } else w.fail_at("unknown key '" + key + "' in [conjugate]");
    return;
  }
  if (section == "run") {
    if (key == "label") cfg.label = value;
    else if (key == "seed") {
      try {
        cfg.seed = std::stoull(value);
      } catch (...) {
        w.fail_at("seed wants a nonnegative integer");
      }
    } else w.fail_at("unknown key '" + key + "' in [run]");
    return;
  }
  if (section == "output") {
    if (key == "dir") cfg.out_dir = value;
    else w.fail_at("unknown key '" + key + "' in [output]");
    return;
  }
  w.fail_at("unknown section [" + section + "]");
}

RunConfig parse_lines(std::istream& in, const std::string& name, const std::string& base_dir) {
  RunConfig cfg;
  cfg.source = name;
  cfg.base_dir = base_dir;
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    Where w{cfg.source, lineno};
    size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::string t = trim(line);
    if (t.empty() || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') w.fail_at("unterminated section header");
      section = trim(t.substr(1, t.size() - 2));
      if (section.empty()) w.fail_at("empty section name");
      continue;
    }
    size_t eq = t.find('=');
    if (eq == std::string::npos) w.fail_at("expected 'key = value'");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty()) w.fail_at("empty key");
    if (value.empty()) w.fail_at("empty value for '" + key + "'");
    if (section.empty()) w.fail_at("key '" + key + "' appears before any [section]");
    set_kv(cfg, section, key, value, w);
  }
  return cfg;
}

std::string dir_of(const std::string& path) {
  size_t cut = path.find_last_of('/');
  return cut == std::string::npos ? std::string(".") : path.substr(0, cut);
}

std::string resolve(const std::string& base, const std::string& path) {
  if (path.empty() || path.front() == '/') return path;
  return base + "/" + path;
}

} // namespace

RunConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(errc::io_error, "cannot open config file '" + path + "'");
  return parse_lines(in, path, dir_of(path));
}

RunConfig parse_config_text(const std::string& text, const std::string& name) {
  std::istringstream in(text);
  return parse_lines(in, name.empty() ? "<inline>" : name, ".");
}

void apply_override(RunConfig& cfg, const std::string& dotted_key, const std::string& value) {
  Where w{cfg.source, 0};
  size_t dot = dotted_key.find('.');
  if (dot == std::string::npos)
    fail(errc::config_error, "override key '" + dotted_key + "' wants the form section.key");
  set_kv(cfg, dotted_key.substr(0, dot), dotted_key.substr(dot + 1), value, w);
}

RadialLagrangian build_lagrangian(const RunConfig& cfg) {
  RadialLagrangian L =
      parse_lagrangian(cfg.profile.rfind("custom:", 0) == 0
                           ? "custom:" + resolve(cfg.base_dir, cfg.profile.substr(7))
                           : cfg.profile,
                       cfg.minorant);
  validate(L); // configs fail fast on a bad profile/minorant pairing
  return L;
}

ObstacleInstance build_instance(const RunConfig& cfg) {
  Grid g;
  g.dim = cfg.dim;
  g.lo = cfg.lo;
  g.hi = cfg.hi;
  g.cells = cfg.cells;
  if (g.dim == 1) g.cells[1] = 1;

  RadialLagrangian L = build_lagrangian(cfg);

  const double mx = 0.5 * (g.lo[0] + g.hi[0]);
  const double my = 0.5 * (g.lo[1] + g.hi[1]);

  ScalarField psi(g);
  if (cfg.obstacle_kind == "table") {
    if (cfg.obstacle_path.empty())
      fail(errc::config_error, cfg.source + ": obstacle table needs a path");
    psi = read_scalar_csv(resolve(cfg.base_dir, cfg.obstacle_path), g);
  } else {
    for (int id = 0; id < g.node_count(); ++id) {
      auto xy = g.node_coord(id);
      double d2 = (xy[0] - mx) * (xy[0] - mx) +
                  (g.dim == 2 ? (xy[1] - my) * (xy[1] - my) : 0.0);
      psi.v[id] = cfg.obstacle_kind == "parabola"
                      ? cfg.obstacle_height - d2
                      : cfg.obstacle_height - cfg.obstacle_slope * std::sqrt(d2);
    }
  }

  ScalarField u0(g);
  if (cfg.boundary_kind == "table") {
    if (cfg.boundary_path.empty())
      fail(errc::config_error, cfg.source + ": boundary table needs a path");
    u0 = read_scalar_csv(resolve(cfg.base_dir, cfg.boundary_path), g);
  } else if (cfg.boundary_kind == "affine") {
    for (int id = 0; id < g.node_count(); ++id) {
      auto xy = g.node_coord(id);
      u0.v[id] = cfg.boundary_a + cfg.boundary_bx * xy[0] +
                 (g.dim == 2 ? cfg.boundary_by * xy[1] : 0.0);
    }
  }

  ObstacleInstance inst = make_instance(g, L, psi, u0, cfg.t_stretch);
  inst.label = cfg.label.empty() ? cfg.profile : cfg.label;
  return inst;
}

} // namespace obsdual
