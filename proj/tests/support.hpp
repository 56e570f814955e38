#pragma once

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "obsdual/instance.hpp"

namespace testsupport {

// splitmix64: keeps the random checks independent of <random> engine details.
inline uint64_t splitmix(uint64_t& s) {
  s += 0x9e3779b97f4a7c15ull;
  uint64_t z = s;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

inline double unit(uint64_t& s) { return (splitmix(s) >> 11) * 0x1.0p-53; }

inline double symmetric(uint64_t& s, double scale) { return scale * (2.0 * unit(s) - 1.0); }

inline std::filesystem::path fresh_dir(const std::string& tag) {
  static uint64_t counter = 0;
  auto dir = std::filesystem::temp_directory_path() /
             ("obsdual_" + tag + "_" + std::to_string(::getpid()) + "_" +
              std::to_string(counter++));
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

// 1D benchmark: [-1,1], psi = height - x^2, zero boundary data.
inline obsdual::ObstacleInstance membrane_instance(
    int cells, double height = 0.5,
    const obsdual::RadialLagrangian& L = obsdual::make_power(2.0)) {
  obsdual::Grid g;
  g.dim = 1;
  g.lo = {-1.0, 0.0};
  g.hi = {1.0, 1.0};
  g.cells = {cells, 1};
  obsdual::ScalarField psi(g), u0(g);
  for (int id = 0; id < g.node_count(); ++id) {
    double x = g.node_coord(id)[0];
    psi.v[id] = height - x * x;
  }
  return obsdual::make_instance(g, L, psi, u0);
}

// 2D benchmark: unit square, psi = 0.25 - (x-1/2)^2 - (y-1/2)^2, zero boundary.
inline obsdual::ObstacleInstance dome_instance(int cells_per_axis) {
  obsdual::Grid g;
  g.dim = 2;
  g.lo = {0.0, 0.0};
  g.hi = {1.0, 1.0};
  g.cells = {cells_per_axis, cells_per_axis};
  obsdual::ScalarField psi(g), u0(g);
  for (int id = 0; id < g.node_count(); ++id) {
    auto xy = g.node_coord(id);
    double dx = xy[0] - 0.5, dy = xy[1] - 0.5;
    psi.v[id] = 0.25 - dx * dx - dy * dy;
  }
  return obsdual::make_instance(g, obsdual::make_power(2.0), psi, u0);
}

inline double max_node_diff(const obsdual::ScalarField& a, const obsdual::ScalarField& b) {
  double m = 0.0;
  for (size_t i = 0; i < a.v.size(); ++i) m = std::max(m, std::abs(a.v[i] - b.v[i]));
  return m;
}

} // namespace testsupport
