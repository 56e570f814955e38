#include <cmath>
#include <vector>

#include "doctest.h"
#include "obsdual/errors.hpp"
#include "obsdual/fieldio.hpp"
#include "obsdual/grid.hpp"
#include "obsdual/instance.hpp"
#include "obsdual/solve.hpp"
#include "support.hpp"

using namespace obsdual;
using testsupport::fresh_dir;
using testsupport::splitmix;
using testsupport::symmetric;

namespace {

Grid grid_1d(int cells, double lo = 0.0, double hi = 1.0) {
  Grid g;
  g.dim = 1;
  g.lo = {lo, 0.0};
  g.hi = {hi, 1.0};
  g.cells = {cells, 1};
  return g;
}

Grid grid_2d(int nx, int ny, double hx = 1.0, double hy = 1.0) {
  Grid g;
  g.dim = 2;
  g.lo = {0.0, 0.0};
  g.hi = {hx, hy};
  g.cells = {nx, ny};
  return g;
}

double volume_pairing(const VectorField& sigma, const ScalarField& u) {
  const Grid& g = sigma.grid;
  VectorField du = gradient(u);
  double acc = 0.0;
  for (int c = 0; c < g.cell_count(); ++c) {
    const double* s = sigma.at(c);
    const double* d = du.at(c);
    acc += (s[0] * d[0] + (g.dim == 2 ? s[1] * d[1] : 0.0)) * g.cell_volume();
  }
  return acc;
}

} // namespace

TEST_CASE("grid bookkeeping") {
  Grid g = grid_2d(3, 2, 3.0, 1.0);
  CHECK(g.spacing(0) == 1.0);
  CHECK(g.spacing(1) == 0.5);
  CHECK(g.cell_volume() == 0.5);
  CHECK(g.total_volume() == 3.0);
  CHECK(g.node_count() == 12);
  CHECK(g.cell_count() == 6);
  CHECK(g.node_id(2, 1) == 6);
  CHECK(g.cell_id(1, 1) == 4);
  auto xy = g.node_coord(g.node_id(2, 1));
  CHECK(xy[0] == 2.0);
  CHECK(xy[1] == 0.5);
  auto cc = g.cell_center(g.cell_id(0, 1));
  CHECK(cc[0] == 0.5);
  CHECK(cc[1] == 0.75);
  int interior = 0;
  for (int id = 0; id < g.node_count(); ++id) interior += g.is_boundary_node(id) ? 0 : 1;
  CHECK(interior == 2); // only (1,1) and (2,1)

  Grid l = grid_1d(4);
  CHECK(l.node_count() == 5);
  CHECK(l.is_boundary_node(0));
  CHECK(l.is_boundary_node(4));
  CHECK(!l.is_boundary_node(2));
}

TEST_CASE("gradient is exact on affine fields") {
  ScalarField u1(grid_1d(7, -1.0, 2.5));
  for (int id = 0; id < u1.grid.node_count(); ++id)
    u1.v[id] = 2.0 * u1.grid.node_coord(id)[0] + 1.0;
  VectorField d1 = gradient(u1);
  for (int c = 0; c < u1.grid.cell_count(); ++c)
    CHECK(d1.at(c)[0] == doctest::Approx(2.0).epsilon(1e-13));

  ScalarField u2(grid_2d(5, 4, 2.0, 1.0));
  for (int id = 0; id < u2.grid.node_count(); ++id) {
    auto xy = u2.grid.node_coord(id);
    u2.v[id] = 1.0 + 2.0 * xy[0] - 3.0 * xy[1];
  }
  VectorField d2 = gradient(u2);
  for (int c = 0; c < u2.grid.cell_count(); ++c) {
    CHECK(d2.at(c)[0] == doctest::Approx(2.0).epsilon(1e-13));
    CHECK(d2.at(c)[1] == doctest::Approx(-3.0).epsilon(1e-13));
  }
}

TEST_CASE("hand-checked divergence weights and pairing in 1D") {
  Grid g = grid_1d(4);
  VectorField sigma(g);
  sigma.at(0)[0] = 1.0;
  sigma.at(1)[0] = 1.0;
  sigma.at(2)[0] = 2.0;
  sigma.at(3)[0] = 2.0;
  DivergenceWeights w = divergence_weights(sigma);
  CHECK(w.w[0] == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(w.w[1] == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(w.w[2] == doctest::Approx(-1.0).epsilon(1e-13));
  CHECK(w.w[3] == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(w.w[4] == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(w.max_abs() == doctest::Approx(2.0).epsilon(1e-13));
  CHECK(w.min_interior() == doctest::Approx(-1.0).epsilon(1e-13));

  ScalarField U(g), u0(g);
  U.v[2] = 0.5;
  CHECK(pairing(sigma, U, u0) == doctest::Approx(-0.5).epsilon(1e-13));
}

TEST_CASE("interior weights vanish for constant fields") {
  VectorField s1(grid_1d(9), 3.25);
  DivergenceWeights w1 = divergence_weights(s1);
  for (int id = 1; id < 9; ++id) CHECK(std::abs(w1.w[id]) <= 1e-13);

  Grid g2 = grid_2d(6, 5);
  VectorField s2(g2);
  for (int c = 0; c < g2.cell_count(); ++c) {
    s2.at(c)[0] = 1.5;
    s2.at(c)[1] = -2.0;
  }
  DivergenceWeights w2 = divergence_weights(s2);
  for (int id = 0; id < g2.node_count(); ++id)
    if (!g2.is_boundary_node(id)) CHECK(std::abs(w2.w[id]) <= 1e-13);
}

TEST_CASE("gradient and divergence weights are exact adjoints") {
  uint64_t rng = 11;
  for (int dim = 1; dim <= 2; ++dim) {
    Grid g = dim == 1 ? grid_1d(13, -2.0, 1.0) : grid_2d(7, 5, 2.0, 1.5);
    VectorField sigma(g);
    for (int c = 0; c < g.cell_count(); ++c)
      for (int a = 0; a < dim; ++a) sigma.at(c)[a] = symmetric(rng, 2.0);
    ScalarField u(g);
    for (int id = 0; id < g.node_count(); ++id) u.v[id] = symmetric(rng, 3.0);

    DivergenceWeights w = divergence_weights(sigma);
    double node_sum = 0.0;
    for (int id = 0; id < g.node_count(); ++id) node_sum += w.w[id] * u.v[id];
    double cell_sum = volume_pairing(sigma, u);
    CHECK(std::abs(node_sum - cell_sum) <= 1e-12 * std::max(1.0, std::abs(cell_sum)));
  }
}

TEST_CASE("pairing matches the volume integral on conforming fields") {
  uint64_t rng = 23;
  for (int dim = 1; dim <= 2; ++dim) {
    Grid g = dim == 1 ? grid_1d(17) : grid_2d(6, 9);
    VectorField sigma(g);
    for (int c = 0; c < g.cell_count(); ++c)
      for (int a = 0; a < dim; ++a) sigma.at(c)[a] = symmetric(rng, 1.5);
    ScalarField u0(g), U(g);
    for (int id = 0; id < g.node_count(); ++id) {
      u0.v[id] = symmetric(rng, 1.0);
      U.v[id] = g.is_boundary_node(id) ? u0.v[id] : symmetric(rng, 2.0);
    }
    double want = volume_pairing(sigma, U);
    CHECK(std::abs(pairing(sigma, U, u0) - want) <= 1e-12 * std::max(1.0, std::abs(want)));

    // a boundary mismatch contributes through the weights, not the volume term
    ScalarField V = U;
    for (int id = 0; id < g.node_count(); ++id)
      if (!g.is_boundary_node(id)) V.v[id] = symmetric(rng, 2.0);
    ScalarField merged = V;
    for (int id = 0; id < g.node_count(); ++id)
      if (g.is_boundary_node(id)) merged.v[id] = u0.v[id];
    double merged_want = volume_pairing(sigma, merged);
    CHECK(std::abs(pairing(sigma, V, u0) - merged_want) <=
          1e-12 * std::max(1.0, std::abs(merged_want)));
  }
}

TEST_CASE("hand-checked primal energy of a sampled parabola") {
  Grid g = grid_1d(8);
  ScalarField psi(g, -1.0), u0(g), u(g);
  for (int id = 0; id < g.node_count(); ++id) {
    double x = g.node_coord(id)[0];
    u0.v[id] = x * x;
    u.v[id] = x * x;
  }
  ObstacleInstance inst = make_instance(g, make_power(2.0), psi, u0);
  CHECK(primal_energy(inst, u) == 1.328125); // sum of odd squares over 512
}

TEST_CASE("field files round-trip at 15 digits") {
  auto dir = fresh_dir("fieldio");
  uint64_t rng = 31;
  Grid g = grid_2d(4, 3);
  ScalarField u(g);
  for (int id = 0; id < g.node_count(); ++id) u.v[id] = symmetric(rng, 5.0);
  write_scalar_csv((dir / "u.csv").string(), u);
  ScalarField back = read_scalar_csv((dir / "u.csv").string(), g);
  for (int id = 0; id < g.node_count(); ++id)
    CHECK(std::abs(back.v[id] - u.v[id]) <= 1e-13 * std::max(1.0, std::abs(u.v[id])));

  VectorField sigma(g);
  for (int c = 0; c < g.cell_count(); ++c) {
    sigma.at(c)[0] = symmetric(rng, 4.0);
    sigma.at(c)[1] = symmetric(rng, 4.0);
  }
  write_vector_csv((dir / "sigma.csv").string(), sigma);
  VectorField sback = read_vector_csv((dir / "sigma.csv").string(), g);
  for (int c = 0; c < g.cell_count(); ++c)
    for (int a = 0; a < 2; ++a)
      CHECK(std::abs(sback.at(c)[a] - sigma.at(c)[a]) <=
            1e-13 * std::max(1.0, std::abs(sigma.at(c)[a])));

  DivergenceWeights w = divergence_weights(sigma);
  write_weights_csv((dir / "weights.csv").string(), w);
  CHECK(!testsupport::read_file(dir / "weights.csv").empty());

  CHECK_THROWS_AS(read_scalar_csv((dir / "missing.csv").string(), g), Error);
  Grid wrong = grid_2d(5, 5);
  CHECK_THROWS_AS(read_scalar_csv((dir / "u.csv").string(), wrong), Error);
}

TEST_CASE("instance validation") {
  Grid g = grid_1d(8);
  ScalarField psi(g), u0(g);

  ScalarField bad_psi(g);
  bad_psi.v[0] = 1.0; // above the boundary datum
  try {
    make_instance(g, make_power(2.0), bad_psi, u0);
    CHECK(false);
  } catch (const Error& e) {
    CHECK(e.code() == errc::infeasible_instance);
  }

  CHECK_THROWS_AS(make_instance(g, make_power(2.0), psi, u0, 0.5), Error);

  Grid other = grid_1d(9);
  ScalarField psi_other(other);
  CHECK_THROWS_AS(make_instance(g, make_power(2.0), psi_other, u0), Error);

  ScalarField nan_psi(g);
  nan_psi.v[3] = std::nan("");
  CHECK_THROWS_AS(make_instance(g, make_power(2.0), nan_psi, u0), Error);
}
