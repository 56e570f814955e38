#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "obsdual/instance.hpp"
#include "obsdual/solve.hpp"

namespace obsdual {

/// Flat-section key-value run description. Every field has a working default;
/// parse errors carry file and line. Sections: [lagrangian] [domain] [obstacle]
/// [boundary] [solver] [ladder] [sweep] [conjugate] [run] [output].
struct RunConfig {
  std::string source = "<defaults>";
  std::string base_dir = "."; ///< table paths resolve against this

  std::string profile = "power:2";
  std::string minorant = "default";

  int dim = 1;
  std::array<double, 2> lo{-1.0, 0.0};
  std::array<double, 2> hi{1.0, 1.0};
  std::array<int, 2> cells{128, 128};

  std::string obstacle_kind = "parabola"; ///< parabola | cone | table
  double obstacle_height = 0.5;
  double obstacle_slope = 1.0;
  std::string obstacle_path;

  std::string boundary_kind = "zero"; ///< zero | affine | table
  double boundary_a = 0.0, boundary_bx = 0.0, boundary_by = 0.0;
  std::string boundary_path;

  SolveParams solver; ///< tol_kkt/step stay <0 for auto
  double t_stretch = 2.0;

  std::vector<int> k_list{2, 4, 8, 16, 32};
  double ladder_grid_step = 0.01;

  std::vector<int> sweep_cells{64, 128, 256, 512};

  double s_max = 10.0;
  double s_step = 0.1;
  int fenchel_pairs = 10000;
  int equality_pairs = 1000;

  std::string label;
  uint64_t seed = 0;
  std::string out_dir = "out";
};

RunConfig parse_config_file(const std::string& path);
RunConfig parse_config_text(const std::string& text, const std::string& name = "");

/// Routes "section.key" through the same setter the parser uses.
void apply_override(RunConfig& cfg, const std::string& dotted_key, const std::string& value);

/// Parses the configured profile/minorant, resolving custom-table paths
/// against the config file's directory, and validates the pairing.
RadialLagrangian build_lagrangian(const RunConfig& cfg);

ObstacleInstance build_instance(const RunConfig& cfg);

} // namespace obsdual
