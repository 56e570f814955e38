#include <doctest.h>

#include <cmath>
#include <string>

#include "obsdual/config.hpp"
#include "obsdual/errors.hpp"
#include "obsdual/fieldio.hpp"
#include "support.hpp"

using namespace obsdual;

namespace {

void expect_parse_error(const std::string& text, const std::string& fragment) {
  try {
    parse_config_text(text);
    FAIL("expected a config error for:\n" << text);
  } catch (const Error& e) {
    CHECK(e.code() == errc::config_error);
    CHECK(std::string(e.what()).find(fragment) != std::string::npos);
  }
}

} // namespace

TEST_CASE("empty text yields the documented defaults") {
  RunConfig cfg = parse_config_text("");
  CHECK(cfg.source == "<inline>");
  CHECK(cfg.base_dir == ".");
  CHECK(cfg.profile == "power:2");
  CHECK(cfg.minorant == "default");
  CHECK(cfg.dim == 1);
  CHECK(cfg.lo[0] == -1.0);
  CHECK(cfg.hi[0] == 1.0);
  CHECK(cfg.lo[1] == 0.0);
  CHECK(cfg.hi[1] == 1.0);
  CHECK(cfg.cells[0] == 128);
  CHECK(cfg.cells[1] == 128);
  CHECK(cfg.obstacle_kind == "parabola");
  CHECK(cfg.obstacle_height == 0.5);
  CHECK(cfg.obstacle_slope == 1.0);
  CHECK(cfg.boundary_kind == "zero");
  CHECK(cfg.solver.max_iter == 50000);
  CHECK(cfg.solver.tol_kkt == -1.0);
  CHECK(cfg.solver.step == -1.0);
  CHECK(cfg.t_stretch == 2.0);
  CHECK(cfg.k_list == std::vector<int>{2, 4, 8, 16, 32});
  CHECK(cfg.ladder_grid_step == 0.01);
  CHECK(cfg.sweep_cells == std::vector<int>{64, 128, 256, 512});
  CHECK(cfg.s_max == 10.0);
  CHECK(cfg.s_step == 0.1);
  CHECK(cfg.fenchel_pairs == 10000);
  CHECK(cfg.equality_pairs == 1000);
  CHECK(cfg.seed == 0);
  CHECK(cfg.label.empty());
  CHECK(cfg.out_dir == "out");
}

TEST_CASE("a full file sets every section") {
  const std::string text = R"(
[lagrangian]
profile = cosh
minorant = power:2:0.5

[domain]
dim = 2
x = -1 1
y = 0 2
cells = 48 32

[obstacle]
kind = cone
height = 0.4
slope = 1.25

[boundary]
kind = affine
a = 0.1
bx = 0.2
by = -0.05

[solver]
max_iter = 1234
tol_kkt = 1e-9
step = auto
t_stretch = 3

[ladder]
k_list = 2 3 5 8
grid_step = 0.02

[sweep]
cells = 16 32 64

[conjugate]
s_max = 4
s_step = 0.5
pairs = 77
equality_pairs = 33

[run]
label = smoke
seed = 99

[output]
dir = results/run1
)";
  RunConfig cfg = parse_config_text(text, "full.ini");
  CHECK(cfg.source == "full.ini");
  CHECK(cfg.profile == "cosh");
  CHECK(cfg.minorant == "power:2:0.5");
  CHECK(cfg.dim == 2);
  CHECK(cfg.lo[0] == -1.0);
  CHECK(cfg.hi[0] == 1.0);
  CHECK(cfg.lo[1] == 0.0);
  CHECK(cfg.hi[1] == 2.0);
  CHECK(cfg.cells[0] == 48);
  CHECK(cfg.cells[1] == 32);
  CHECK(cfg.obstacle_kind == "cone");
  CHECK(cfg.obstacle_height == 0.4);
  CHECK(cfg.obstacle_slope == 1.25);
  CHECK(cfg.boundary_kind == "affine");
  CHECK(cfg.boundary_a == 0.1);
  CHECK(cfg.boundary_bx == 0.2);
  CHECK(cfg.boundary_by == -0.05);
  CHECK(cfg.solver.max_iter == 1234);
  CHECK(cfg.solver.tol_kkt == 1e-9);
  CHECK(cfg.solver.step == -1.0); // auto
  CHECK(cfg.t_stretch == 3.0);
  CHECK(cfg.k_list == std::vector<int>{2, 3, 5, 8});
  CHECK(cfg.ladder_grid_step == 0.02);
  CHECK(cfg.sweep_cells == std::vector<int>{16, 32, 64});
  CHECK(cfg.s_max == 4.0);
  CHECK(cfg.s_step == 0.5);
  CHECK(cfg.fenchel_pairs == 77);
  CHECK(cfg.equality_pairs == 33);
  CHECK(cfg.label == "smoke");
  CHECK(cfg.seed == 99);
  CHECK(cfg.out_dir == "results/run1");
}

TEST_CASE("comments and blank lines are skipped") {
  const std::string text =
      "# leading comment\n"
      "; another style\n"
      "\n"
      "[domain]\n"
      "cells = 10   # trailing comment\n"
      "  dim = 1  \n";
  RunConfig cfg = parse_config_text(text);
  CHECK(cfg.cells[0] == 10);
  CHECK(cfg.cells[1] == 10); // single count applies to both axes
  CHECK(cfg.dim == 1);
}

TEST_CASE("a single cell count fans out and dim 1 collapses the second axis") {
  RunConfig cfg = parse_config_text("[domain]\ndim = 1\ncells = 7\n");
  ObstacleInstance inst = build_instance(cfg);
  CHECK(inst.grid.cells[0] == 7);
  CHECK(inst.grid.cells[1] == 1);
  CHECK(inst.grid.dim == 1);
}

TEST_CASE("parse errors carry the source name and line number") {
  expect_parse_error("cells = 4\n", "<inline>:1: key 'cells' appears before any [section]");
  expect_parse_error("[domain]\ndim = 7\n", "<inline>:2: dim wants 1 or 2");
  expect_parse_error("[domain]\ndim = x\n", "dim wants an integer, got 'x'");
  expect_parse_error("[domain]\nfoo = 1\n", "unknown key 'foo' in [domain]");
  expect_parse_error("[mystery]\nx = 1\n", "unknown section [mystery]");
  expect_parse_error("[domain\n", ":1: unterminated section header");
  expect_parse_error("[]\n", "empty section name");
  expect_parse_error("[domain]\nx = 3\n", "x wants 'lo hi'");
  expect_parse_error("[domain]\nx = 2 1\n", "x wants lo < hi");
  expect_parse_error("[domain]\ncells = 0\n", "cells wants positive counts");
  expect_parse_error("[domain]\njust words\n", "expected 'key = value'");
  expect_parse_error("[run]\nlabel =\n", "empty value for 'label'");
  expect_parse_error("[run]\n= 3\n", "empty key");
  expect_parse_error("[solver]\ntol_kkt = -3\n", "tol_kkt wants 'auto' or a positive real");
  expect_parse_error("[solver]\nmax_iter = 0\n", "max_iter wants a positive integer");
  expect_parse_error("[solver]\nt_stretch = 1\n", "t_stretch wants a real above 1");
  expect_parse_error("[ladder]\nk_list = 4 2\n", "k_list wants strictly increasing levels");
  expect_parse_error("[ladder]\nk_list = 1 2\n", "k_list entries want integers >= 2");
  expect_parse_error("[ladder]\ngrid_step = 0\n", "grid_step wants a positive real");
  expect_parse_error("[sweep]\ncells = 8 8\n", "sweep cells want a strictly increasing list");
  expect_parse_error("[obstacle]\nkind = blob\n", "obstacle kind wants parabola, cone, or table");
  expect_parse_error("[boundary]\nkind = blob\n", "boundary kind wants zero, affine, or table");
  expect_parse_error("[conjugate]\npairs = -1\n", "pairs wants a nonnegative integer");
  expect_parse_error("[run]\nseed = banana\n", "seed wants a nonnegative integer");
}

TEST_CASE("overrides reuse the file setters") {
  RunConfig cfg = parse_config_text("");
  apply_override(cfg, "output.dir", "elsewhere");
  apply_override(cfg, "domain.cells", "12 9");
  apply_override(cfg, "run.seed", "7");
  CHECK(cfg.out_dir == "elsewhere");
  CHECK(cfg.cells[0] == 12);
  CHECK(cfg.cells[1] == 9);
  CHECK(cfg.seed == 7);

  CHECK_THROWS_AS(apply_override(cfg, "outputdir", "x"), Error);
  try {
    apply_override(cfg, "outputdir", "x");
  } catch (const Error& e) {
    CHECK(e.code() == errc::config_error);
    CHECK(std::string(e.what()).find("wants the form section.key") != std::string::npos);
  }
  CHECK_THROWS_AS(apply_override(cfg, "domain.frobnicate", "1"), Error);
}

TEST_CASE("assembled instances match the configured geometry") {
  SUBCASE("parabola about the domain midpoint with zero boundary") {
    RunConfig cfg = parse_config_text("[domain]\ncells = 8\n[obstacle]\nheight = 0.5\n");
    ObstacleInstance inst = build_instance(cfg);
    CHECK(inst.label == "power:2");
    CHECK(inst.lagrangian.name == "power:2");
    int mid = 4; // node at x = 0 on [-1,1] with 8 cells
    CHECK(inst.psi.v[mid] == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(inst.psi.v[6] == doctest::Approx(0.5 - 0.25).epsilon(1e-15)); // x = 0.5
    CHECK(inst.psi.v[0] == doctest::Approx(-0.5).epsilon(1e-15));
    for (double b : inst.u0.v) CHECK(b == 0.0);
  }

  SUBCASE("cone obstacle and affine boundary in 2d") {
    const std::string text =
        "[domain]\ndim = 2\nx = 0 2\ny = 0 2\ncells = 4\n"
        "[obstacle]\nkind = cone\nheight = 0.4\nslope = 0.25\n"
        "[boundary]\nkind = affine\na = 1\nbx = 0.5\nby = -0.25\n"
        "[run]\nlabel = dome\n";
    RunConfig cfg = parse_config_text(text);
    ObstacleInstance inst = build_instance(cfg);
    CHECK(inst.label == "dome");
    const Grid& g = inst.grid;
    for (int id = 0; id < g.node_count(); ++id) {
      auto xy = g.node_coord(id);
      double r = std::hypot(xy[0] - 1.0, xy[1] - 1.0);
      CHECK(inst.psi.v[id] == doctest::Approx(0.4 - 0.25 * r).epsilon(1e-14));
      CHECK(inst.u0.v[id] ==
            doctest::Approx(1.0 + 0.5 * xy[0] - 0.25 * xy[1]).epsilon(1e-14));
    }
  }
}

TEST_CASE("table fields resolve relative to the config file") {
  std::string dir = testsupport::fresh_dir("cfg");
  Grid g;
  g.dim = 1;
  g.lo = {0.0, 0.0};
  g.hi = {1.0, 1.0};
  g.cells = {4, 1};
  ScalarField psi(g);
  for (int i = 0; i <= 4; ++i) psi.v[i] = -0.1 * i;
  write_scalar_csv(dir + "/psi.csv", psi);
  testsupport::write_file(dir + "/run.ini",
                          "[domain]\nx = 0 1\ncells = 4\n"
                          "[obstacle]\nkind = table\npath = psi.csv\n");

  RunConfig cfg = parse_config_file(dir + "/run.ini");
  CHECK(cfg.source == dir + "/run.ini");
  CHECK(cfg.base_dir == dir);
  ObstacleInstance inst = build_instance(cfg);
  for (int i = 0; i <= 4; ++i) CHECK(inst.psi.v[i] == doctest::Approx(-0.1 * i).epsilon(1e-15));

  SUBCASE("a table kind without a path is rejected") {
    RunConfig bad = parse_config_text("[obstacle]\nkind = table\n");
    CHECK_THROWS_AS(build_instance(bad), Error);
  }
  SUBCASE("a missing table file is an io error") {
    RunConfig bad = parse_config_text("[obstacle]\nkind = table\npath = nope.csv\n");
    try {
      build_instance(bad);
      FAIL("expected an io error");
    } catch (const Error& e) {
      CHECK(e.code() == errc::io_error);
    }
  }
}

TEST_CASE("a missing config file is an io error") {
  try {
    parse_config_file("/nonexistent/run.ini");
    FAIL("expected an io error");
  } catch (const Error& e) {
    CHECK(e.code() == errc::io_error);
    CHECK(std::string(e.what()).find("cannot open config file") != std::string::npos);
  }
}

TEST_CASE("profile and minorant pairings are validated at build time") {
  RunConfig good = parse_config_text("[lagrangian]\nprofile = cosh\n");
  CHECK(build_lagrangian(good).name == "cosh");

  // t^2 overtakes cosh near t = 2, so this minorant is not admissible
  RunConfig bad = parse_config_text("[lagrangian]\nprofile = cosh\nminorant = power:2\n");
  CHECK_THROWS_AS(build_lagrangian(bad), Error);
}

TEST_CASE("infeasible geometry is rejected at assembly") {
  RunConfig cfg = parse_config_text("[obstacle]\nheight = 2\n"); // psi(+-1) = 1 > u0 = 0
  try {
    build_instance(cfg);
    FAIL("expected an infeasible instance");
  } catch (const Error& e) {
    CHECK(e.code() == errc::infeasible_instance);
  }
}
