#include <doctest.h>

#include <cmath>
#include <vector>

#include "nlrt/error.hpp"
#include "nlrt/exponential_model.hpp"
#include "nlrt/stats.hpp"

using namespace nlrt;

namespace {

StaggeredExponentialModel fwci(double theta = 1.0) {
  StaggeredExponentialModel m;
  m.theta = theta;
  return m;
}

StaggeredExponentialModel rst(double theta = 1.0) {
  StaggeredExponentialModel m;
  m.theta = theta;
  m.g = GStatistic::repeated_lrt();
  return m;
}

}  // namespace

TEST_CASE("hand-evaluated state") {
  const auto s = TrialState::observe({0.0, 1.0, 2.0}, {0.5, 3.0});
  CHECK(s.deaths == 1);
  CHECK(s.total_time == doctest::Approx(1.5));
}

TEST_CASE("statistics at a hand-evaluated state") {
  const auto s = TrialState::observe({0.0, 1.0, 2.0}, {0.5, 3.0});
  CHECK(*statistic_Z(s, GStatistic::fixed_width_ci()) == doctest::Approx(4.5));
  CHECK(*statistic_Z(s, GStatistic::repeated_lrt()) ==
        doctest::Approx(0.5 * std::log(0.5 / 0.75) * 2.0 + 0.5));
}

TEST_CASE("rate one empirical estimate gives a zero likelihood ratio") {
  // K = 2, T* = 2: two deaths of total duration 2.
  const auto s = TrialState::observe({0.0, 5.0, 10.0}, {1.5, 0.5});
  REQUIRE(s.deaths == 2);
  REQUIRE(s.total_time == doctest::Approx(2.0));
  CHECK(*statistic_Z(s, GStatistic::repeated_lrt()) == doctest::Approx(0.0));
}

TEST_CASE("no deaths leaves the statistic undefined") {
  const auto s = TrialState::observe({0.0, 0.1}, {5.0});
  CHECK(s.deaths == 0);
  CHECK_FALSE(statistic_Z(s, GStatistic::fixed_width_ci()).has_value());
  CHECK_THROWS_AS(decompose(s, GStatistic::fixed_width_ci(), 1.0, 200), ContractViolation);
}

TEST_CASE("fast deaths are all observed") {
  const auto s = simulate_trial(fwci(1e6), 50, {1, 0, 4});
  CHECK(s.deaths == 50);
  double sum = 0;
  for (double l : s.lifetimes) sum += l;
  CHECK(s.total_time == doctest::Approx(sum));
}

TEST_CASE("observed death fraction increases with n") {
  const auto m = fwci(1.0);
  std::vector<double> frac10, frac100;
  for (std::uint64_t r = 0; r < 4000; ++r) {
    const auto s = simulate_trial(m, 100, {2, r, 4});
    frac100.push_back(s.deaths / 100.0);
    std::vector<double> tau(s.tau.begin(), s.tau.begin() + 11);
    std::vector<double> life(s.lifetimes.begin(), s.lifetimes.begin() + 10);
    frac10.push_back(TrialState::observe(tau, life).deaths / 10.0);
  }
  const auto a = mean_se(frac10), b = mean_se(frac100);
  CHECK(b.mean - a.mean > 3.0 * std::hypot(a.se, b.se));
  CHECK(b.mean < 1.0);
}

TEST_CASE("residual lifetimes") {
  CHECK(xi_staggered_residual(TrialState::observe({0.0, 2.0, 3.0}, {5.0, 1.0})) == doctest::Approx(2.0));
  CHECK(xi_staggered_residual(TrialState::observe({0.0, 2.0, 3.0}, {1e-9, 1e-9})) == 0.0);
}

TEST_CASE("total time identity") {
  const auto m = fwci(1.3);
  for (std::uint64_t r = 0; r < 200; ++r) {
    const auto s = simulate_trial(m, 60, {3, r, 4});
    double sum = 0;
    for (double l : s.lifetimes) sum += l;
    CHECK(sum - xi_staggered_residual(s) == doctest::Approx(s.total_time).epsilon(1e-12));
  }
}

TEST_CASE("decomposition adds up") {
  for (const auto& m : {fwci(1.0), rst(2.0)}) {
    for (std::uint64_t r = 0; r < 500; ++r) {
      const auto s = simulate_trial(m, 20 + r % 80, {4, r, 4});
      if (s.deaths == 0) continue;
      const auto d = decompose(s, m.g, m.theta, m.xi_truncation);
      const double sum = d.s + d.xi + d.zeta1 + d.zeta2 + d.zeta3;
      CHECK(std::abs(sum - d.z) <= 1e-9 * std::max(1.0, std::abs(d.z)));
      CHECK(d.zeta1 == doctest::Approx(d.zeta_quad + d.zeta1_rest));
    }
  }
}

TEST_CASE("expired residuals contribute nothing") {
  // Every lifetime ends before the next arrival.
  const auto s = TrialState::observe({0.0, 2.0, 4.0, 6.0}, {1.0, 0.5, 1.5});
  CHECK(xi_staggered_residual(s) == 0.0);
  CHECK(s.deaths == 3);
  CHECK(s.total_time == doctest::Approx(3.0));
}

TEST_CASE("zeta2 vanishes without late residuals") {
  auto s = TrialState::observe({0.0, 2.0, 4.0, 6.0}, {1.0, 0.5, 1.5});
  s.pre_lifetimes.assign(10, 1e-6);
  s.pre_gaps.assign(10, 1.0);
  const auto d = decompose(s, GStatistic::fixed_width_ci(), 1.0, 200);
  CHECK(d.zeta2 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("hard-coded derivatives match finite differences") {
  for (double theta : {0.5, 1.0, 2.0}) {
    for (const auto& g : {GStatistic::fixed_width_ci(), GStatistic::repeated_lrt()}) {
      const auto a = g.derivatives_at(theta);
      const auto b = g.numeric_derivatives_at(theta, 1e-5);
      auto close = [](double x, double y) { return std::abs(x - y) <= 1e-4 * std::max(1.0, std::abs(x)); };
      CHECK(close(a.g, b.g));
      CHECK(close(a.g10, b.g10));
      CHECK(close(a.g01, b.g01));
      CHECK(close(a.g20, b.g20));
      CHECK(close(a.g11, b.g11));
      CHECK(close(a.g02, b.g02));
    }
  }
}

TEST_CASE("statistic names round trip") {
  CHECK(g_statistic_from_string("fixed_width_ci").kind() == GStatistic::Kind::fixed_width_ci);
  CHECK(g_statistic_from_string("repeated_lrt").kind() == GStatistic::Kind::repeated_lrt);
  CHECK_THROWS_AS(g_statistic_from_string("nope"), ConfigError);
}

TEST_CASE("tracker agrees with the batch definitions") {
  const auto m = fwci(0.8);
  for (std::uint64_t r = 0; r < 50; ++r) {
    const auto s = simulate_trial(m, 40, {5, r, 4});
    TrialTracker t;
    for (std::size_t k = 0; k < s.n(); ++k) t.admit(s.lifetimes[k], s.gaps[k]);
    CHECK(t.deaths() == s.deaths);
    CHECK(t.total_time() == doctest::Approx(s.total_time).epsilon(1e-12));
  }
}

TEST_CASE("equivalent perturbed walk") {
  const auto p = to_perturbed_model(fwci(2.0));
  const auto d = GStatistic::fixed_width_ci().derivatives_at(2.0);
  CHECK(p.mu() == doctest::Approx(d.g));
  CHECK(p.sigma2() == doctest::Approx(d.g01 * d.g01 / 4.0));
  CHECK(p.quadratic.q(0, 0) == doctest::Approx(d.g02 / (2.0 * d.g01 * d.g01)));
  CHECK_THROWS_AS(to_perturbed_model(rst(1.0)), ConfigError);
}

TEST_CASE("example 1 boundary") {
  const auto s = example1_run(fwci(), 0.2, 1.96, 50, {6, 0, 0}, {}, 200);
  CHECK(s.a == doctest::Approx(96.04));
  const auto half = example1_run(fwci(), 0.1, 1.96, 2, {6, 0, 0}, {}, 50);
  CHECK(half.a == doctest::Approx(4.0 * s.a));
}

TEST_CASE("repeated significance test size and power") {
  const auto null = rst(1.0);
  const double a = calibrate_rst_boundary(null, 0.04, 2000, 300, {7, 0, 0});
  const auto h0 = example2_run(null, a, 4000, 300, {8, 0, 0});
  CHECK(h0.rejection_rate < 0.05);
  const auto h1 = example2_run(rst(2.0), a, 1000, 300, {8, 0, 0});
  CHECK(h1.rejection_rate > 0.9);
}

TEST_CASE("rescaling time changes the fixed-width statistic by the square") {
  const auto m = fwci(1.0);
  for (std::uint64_t r = 0; r < 100; ++r) {
    const auto a = run_trial(m, 50.0, 2000, {9, r, 4});
    const auto b = run_trial(m, 200.0, 2000, {9, r, 4}, 2.0);
    CHECK(a.t == b.t);
    CHECK(b.z == doctest::Approx(4.0 * a.z));
  }
}
