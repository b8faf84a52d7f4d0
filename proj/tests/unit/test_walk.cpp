#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "nlrt/error.hpp"
#include "nlrt/increment_law.hpp"
#include "nlrt/stats.hpp"
#include "nlrt/walk.hpp"

using namespace nlrt;

TEST_CASE("deterministic walk") {
  const auto law = IncrementLaw::deterministic(2.0, OracleOnly{});
  const WalkPath p = sample_walk(law, VectorLaw::none(), 3, {1, 0, 0});
  REQUIRE(p.size() == 3);
  CHECK(p.partial_sums == std::vector<double>{2.0, 4.0, 6.0});
}

TEST_CASE("empty path") {
  const WalkPath p = sample_walk(IncrementLaw::exponential(1.0), VectorLaw::none(), 0, {1, 0, 0});
  CHECK(p.size() == 0);
  CHECK(p.partial_sums.empty());
}

TEST_CASE("invalid laws are rejected") {
  CHECK_THROWS_AS(IncrementLaw::exponential(0.0).validate(), ConfigError);
  CHECK_THROWS_AS(IncrementLaw::exponential(-1.0).validate(), ConfigError);
  CHECK_THROWS_AS(IncrementLaw::normal(std::numeric_limits<double>::quiet_NaN(), 1.0).validate(),
                  ConfigError);
  CHECK_THROWS_AS(IncrementLaw::uniform(2.0, 1.0).validate(), ConfigError);
  CHECK_THROWS_AS(IncrementLaw::normal(-1.0, 1.0).validate(), ConfigError);
}

TEST_CASE("same stream gives the same path") {
  const auto law = IncrementLaw::gamma(2.0, 3.0);
  const auto a = sample_walk(law, VectorLaw::centered_increment(), 500, {4, 2, 1});
  const auto b = sample_walk(law, VectorLaw::centered_increment(), 500, {4, 2, 1});
  CHECK(a.increments == b.increments);
  CHECK(a.vector_sums == b.vector_sums);
}

TEST_CASE("centered increment vector") {
  const auto law = IncrementLaw::exponential(2.0);
  const auto p = sample_walk(law, VectorLaw::centered_increment(), 100, {1, 0, 0});
  for (std::size_t k = 0; k < p.size(); ++k) CHECK(p.y(k)[0] == doctest::Approx(p.increments[k] - 0.5));
  CHECK(p.t(99)[0] == doctest::Approx(p.partial_sums[99] - 50.0));
}

TEST_CASE("gaussian vector covariance") {
  const Matrix cov{{2.0, 0.6}, {0.6, 1.0}};
  const auto p = sample_walk(IncrementLaw::exponential(1.0), VectorLaw::gaussian(cov), 200000, {8, 0, 0});
  double s00 = 0, s01 = 0, s11 = 0;
  for (std::size_t k = 0; k < p.size(); ++k) {
    const auto y = p.y(k);
    s00 += y[0] * y[0];
    s01 += y[0] * y[1];
    s11 += y[1] * y[1];
  }
  const double n = static_cast<double>(p.size());
  // Var of a product of jointly normal coordinates is s_ii s_jj + s_ij^2.
  CHECK(std::abs(s00 / n - 2.0) < 4.0 * std::sqrt(2.0 * 4.0 / n));
  CHECK(std::abs(s01 / n - 0.6) < 4.0 * std::sqrt((2.0 + 0.36) / n));
  CHECK(std::abs(s11 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
}

TEST_CASE("non-PSD covariance is rejected") {
  CHECK_THROWS_AS(VectorLaw::gaussian(Matrix{{1.0, 2.0}, {2.0, 1.0}}), ConfigError);
  CHECK_THROWS_AS(VectorLaw::gaussian(Matrix{{1.0, 0.5}, {0.0, 1.0}}), ConfigError);
}

TEST_CASE("sample means obey the CLT bound in nearly all seeds") {
  const std::size_t n = 10000;
  const int seeds = 200;
  int inside = 0;
  for (int s = 0; s < seeds; ++s) {
    const auto p = sample_walk(IncrementLaw::exponential(1.0), VectorLaw::none(), n,
                               {static_cast<std::uint64_t>(s + 1), 0, 0});
    if (std::abs(p.partial_sums.back() / n - 1.0) <= 3.0 / std::sqrt(double(n))) ++inside;
  }
  const double p_inside = std::erf(3.0 / std::sqrt(2.0));
  const double sd = std::sqrt(p_inside * (1 - p_inside) / seeds);
  CHECK(inside >= 0.99 * seeds - 3.0 * sd * seeds);
  CHECK(double(inside) / seeds >= 0.985);
}

TEST_CASE("renewal window count, Poisson oracle") {
  for (double b : {1.0, 2.0}) {
    const auto est = renewal_window_count(IncrementLaw::exponential(1.0), 50.0, b, 2000, 20000, {3, 0, 0});
    CHECK(std::abs(est.mean - b) <= 3.0 * est.se);
    CHECK_FALSE(est.warning.has_value());
  }
}

TEST_CASE("renewal window count, lattice walk") {
  const auto est = renewal_window_count(IncrementLaw::deterministic(1.0, OracleOnly{}), 50.5, 1.0,
                                        200, 10, {3, 0, 0});
  CHECK(est.mean == 1.0);
  CHECK(est.se == 0.0);
}

TEST_CASE("renewal window count flags short horizons") {
  CHECK_THROWS_AS(renewal_window_count(IncrementLaw::exponential(1.0), 50.0, 1.0, 100, 10, {1, 0, 0}),
                  ContractViolation);
  const auto est = renewal_window_count(IncrementLaw::normal(1.0, 20.0), 50.0, 1.0, 160, 10, {1, 0, 0});
  CHECK(est.warning.has_value());
}

TEST_CASE("overshoot of a lattice walk") {
  const auto r = plain_overshoot(IncrementLaw::deterministic(1.0, OracleOnly{}), 10.25, 20, {1, 0, 0});
  for (double x : r) CHECK(x == doctest::Approx(0.75));
}

TEST_CASE("overshoot of exponential(2) is exponential(2)") {
  auto r = plain_overshoot(IncrementLaw::exponential(2.0), 100.0, 20000, {5, 0, 0});
  const auto m = mean_se(r);
  CHECK(std::abs(m.mean - 0.5) <= 3.0 * m.se);
  std::sort(r.begin(), r.end());
  const double d = ks_statistic(r, [](double x) { return x <= 0 ? 0.0 : 1.0 - std::exp(-2.0 * x); });
  CHECK(d < ks_critical(0.01, r.size()));
}

TEST_CASE("overshoot of uniform(0,2) approaches E X^2 / (2 E X)") {
  // Moments of U(0,2) by direct integration: E X = 1, E X^2 = 4/3.
  const double oracle = (4.0 / 3.0) / (2.0 * 1.0);
  const auto r = plain_overshoot(IncrementLaw::uniform(0.0, 2.0), 100.0, 40000, {6, 0, 0});
  const auto m = mean_se(r);
  CHECK(std::abs(m.mean - oracle) <= 3.0 * m.se);
}
