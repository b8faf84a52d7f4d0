#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "nlrt/error.hpp"
#include "nlrt/mixture.hpp"
#include "nlrt/verification.hpp"

using namespace nlrt;

namespace {

PerturbedWalkModel tm1() {
  PerturbedWalkModel m;
  m.vector = VectorLaw::centered_increment();
  m.quadratic = QuadraticSpec{Matrix{{0.5}}};
  m.stationary = with_auto_centering(StationarySpec::geometric_ma(WMap::identity, 0.5, 40), m.increment);
  return m;
}

PerturbedWalkModel zeta_only() {
  PerturbedWalkModel m;
  m.vector = VectorLaw::centered_increment();
  m.quadratic = QuadraticSpec{Matrix{{0.5}}};
  return m;
}

const double inf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("window bounds") {
  const auto w = WindowBounds::compute(0.4, 100.0, 1.0);
  const double spread = std::pow(100.0, -0.4);
  CHECK(w.m == static_cast<std::int64_t>(std::floor((1 - spread) * 100.0)));
  CHECK(w.M == static_cast<std::int64_t>(std::floor((1 + spread) * 100.0)));
  CHECK_THROWS_AS(WindowBounds::compute(0.3, 100.0, 1.0), ConfigError);
  CHECK_THROWS_AS(WindowBounds::compute(0.5, 100.0, 1.0), ConfigError);
}

TEST_CASE("theorem report verdict") {
  CHECK(TheoremReport::make("x", 1.0, 1.2, 0.1, 10).pass);
  CHECK_FALSE(TheoremReport::make("x", 1.0, 1.4, 0.1, 10).pass);
}

TEST_CASE("trend check") {
  const std::vector<MeanSe> down{{3.0, 0.1, 10}, {2.0, 0.1, 10}, {1.0, 0.1, 10}};
  const std::vector<MeanSe> tie{{3.0, 0.1, 10}, {3.2, 0.1, 10}};
  const std::vector<MeanSe> up{{3.0, 0.1, 10}, {4.0, 0.1, 10}};
  CHECK(nonincreasing_within_noise(down));
  CHECK(nonincreasing_within_noise(tie));
  CHECK_FALSE(nonincreasing_within_noise(up));
}

TEST_CASE("theorem 1, Poisson renewal oracle") {
  PerturbedWalkModel m;
  const auto r = theorem1_experiment(m, EventPredicate::always(), inf, 50.0, 1.5, 20000, {1, 0, 0});
  CHECK(r.report.theory == doctest::Approx(1.5));
  CHECK(r.report.pass);
}

TEST_CASE("theorem 1, impossible event") {
  const auto r = theorem1_experiment(tm1(), EventPredicate::never(), 1.0, 50.0, 0.5, 200, {1, 0, 0});
  CHECK(r.report.estimate == 0.0);
  CHECK(r.report.theory == 0.0);
}

TEST_CASE("theorem 1 on the perturbed model") {
  const auto m = tm1();
  const double y = mixture_quantile(m.mixture(), 0.5);
  const auto r = theorem1_experiment(m, EventPredicate::xi_at_most(0.0), y, 100.0, 0.5, 20000, {2, 0, 0});
  CHECK(r.report.pass);
  CHECK(r.mixture_cdf_y == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("theorem 3, memoryless overshoot") {
  PerturbedWalkModel m;
  const auto r = theorem3_experiment(m, 100.0, 10000, {3, 0, 0}, {}, 10000);
  CHECK(r.excess.pass);
  CHECK(r.xi_degenerate);
  CHECK(r.passages.mean_xi == 0.0);
}

TEST_CASE("theorem 3, zeta at the stopping time follows the mixture") {
  const auto r = theorem3_experiment(zeta_only(), 200.0, 10000, {4, 0, 0}, {}, 10000);
  CHECK(r.zeta.upper < 0.03);
  CHECK(r.zeta.pass);
}

TEST_CASE("theorem 4, Wald oracle") {
  PerturbedWalkModel m;
  const std::vector<double> grid{25.0, 50.0, 100.0};
  const auto r = theorem4_experiment(m, grid, 20000, {5, 0, 0}, {}, 20000);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    // rho = 1, nu = 0, lambda = 0 here; a + 1 up to the rho estimate.
    CHECK(r.rows[i].predicted == doctest::Approx(grid[i] + r.constants.rho));
    CHECK(std::abs(r.rows[i].predicted - (grid[i] + 1.0)) <= 3.0 * r.constants.se_rho);
  }
  CHECK(r.final_within);
}

TEST_CASE("theorem 4, quadratic perturbation only") {
  const auto m = zeta_only();
  const std::vector<double> grid{100.0};
  const auto r = theorem4_experiment(m, grid, 20000, {6, 0, 0}, {}, 20000);
  CHECK(r.constants.lambda == doctest::Approx(0.5));
  CHECK(r.constants.nu == 0.0);
  CHECK(r.rows[0].predicted == doctest::Approx(100.0 + r.constants.rho - 0.5));
  CHECK(r.final_within);
}

TEST_CASE("theorem 4, constant residual shifts the prediction") {
  auto m = zeta_only();
  const std::vector<double> grid{100.0};
  const auto base = theorem4_experiment(m, grid, 200, {7, 0, 0}, {}, 2000);
  m.residual = ResidualSpec::constant(2.0);
  const auto shifted = theorem4_experiment(m, grid, 200, {7, 0, 0}, {}, 2000);
  CHECK(shifted.rows[0].predicted == doctest::Approx(base.rows[0].predicted - 2.0));
}

TEST_CASE("lemma 1 on a lattice walk") {
  PerturbedWalkModel m;
  m.increment = IncrementLaw::deterministic(1.0, OracleOnly{});
  const std::vector<double> grid{50.5, 100.5};
  const auto rows = lemma1_diagnostic(m, 0.4, grid, 10, {8, 0, 0});
  for (const auto& r : rows) {
    CHECK(r.delta0.mean == 0.0);
    CHECK(r.delta1.mean == 0.0);
  }
}

TEST_CASE("lemma 1 trend on the perturbed model") {
  const std::vector<double> grid{25.0, 50.0, 100.0, 200.0};
  const auto rows = lemma1_diagnostic(tm1(), 0.4, grid, 2000, {9, 0, 0});
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) {
    CHECK(r.delta0.mean >= 0.0);
    CHECK(r.drift_tail_bound < 1e-3);
  }
}

TEST_CASE("lemma 3 with Q = 0") {
  PerturbedWalkModel m;
  const std::vector<double> grid{50.0, 100.0};
  const auto rows = lemma3_diagnostic(m, 0.4, 0.5, grid, 10, {10, 0, 0});
  for (const auto& r : rows) CHECK(r.count.mean == 0.0);
}

TEST_CASE("lemma 3 per-index rates at the window edge") {
  const std::vector<double> grid{400.0};
  const auto rows = lemma3_diagnostic(zeta_only(), 0.4, 0.5, grid, 2000, {11, 0, 0});
  REQUIRE(!rows[0].per_index_rate.empty());
  CHECK(rows[0].per_index_rate.front() < 0.05);
  CHECK(rows[0].per_index_rate.front() <= rows[0].per_index_rate.back());
}
