#include <doctest.h>

#include <cmath>
#include <vector>

#include "nlrt/error.hpp"
#include "nlrt/mixture.hpp"
#include "nlrt/model.hpp"
#include "nlrt/perturbation.hpp"
#include "nlrt/stats.hpp"

using namespace nlrt;

namespace {

Draw draw(double x) {
  Draw w;
  w.x = x;
  w.base = x;
  return w;
}

}  // namespace

TEST_CASE("xi_value closed cases") {
  const std::vector<Draw> one{draw(1.7)};
  CHECK(xi_value(StationarySpec::zero(), one) == 0.0);
  CHECK(xi_value(StationarySpec::instantaneous(WMap::identity), one) == doctest::Approx(1.7));
  CHECK(xi_value(StationarySpec::instantaneous(WMap::identity, 0.2), one) == doctest::Approx(1.5));
  CHECK(xi_value(StationarySpec::instantaneous(WMap::square), one) == doctest::Approx(1.7 * 1.7));

  const std::vector<Draw> two{draw(4.0), draw(2.0)};  // W_n, W_{n-1}
  CHECK(xi_value(StationarySpec::geometric_ma(WMap::identity, 0.5, 2), two) == doctest::Approx(5.0));
  CHECK(xi_value(StationarySpec::geometric_ma(WMap::identity, 0.5, 2, 1.0), two) == doctest::Approx(4.0));
}

TEST_CASE("xi_value needs the full window") {
  const std::vector<Draw> one{draw(1.0)};
  CHECK_THROWS_AS(xi_value(StationarySpec::geometric_ma(WMap::identity, 0.5, 3), one), ContractViolation);
}

TEST_CASE("staggered xi by hand") {
  // Newest first: patient n entered gap_n before now; patient n-1 a further gap_{n-1} earlier.
  std::vector<Draw> w(3);
  w[0].base = 2.5;
  w[0].gap = 1.0;  // 1.5 left
  w[1].base = 1.5;
  w[1].gap = 1.0;  // dead
  w[2].base = 4.0;
  w[2].gap = 0.5;  // 1.5 left
  const auto spec = StationarySpec::staggered_residual(1.0, 2.0, 3.0, 3);
  CHECK(xi_value(spec, w) == doctest::Approx(-(2.0 * 2 + 3.0 * 3.0)));
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS(StationarySpec::geometric_ma(WMap::identity, 1.0, 5), ConfigError);
  CHECK_THROWS_AS(StationarySpec::geometric_ma(WMap::identity, 0.5, 0), ConfigError);
  CHECK_THROWS_AS(StationarySpec::staggered_residual(0.0, 1.0, 1.0, 5), ConfigError);
}

TEST_CASE("zeta_quadratic") {
  QuadraticSpec q{Matrix::identity(2)};
  const std::vector<double> t{3.0, 4.0};
  CHECK(zeta_quadratic(t, 5, q) == doctest::Approx(5.0));
  QuadraticSpec off{Matrix{{0.0, 1.0}, {1.0, 0.0}}};
  const std::vector<double> t2{1.0, 2.0};
  CHECK(zeta_quadratic(t2, 1, off) == doctest::Approx(4.0));
  QuadraticSpec zero{Matrix(2, 2), true};
  CHECK(zeta_quadratic(t, 5, zero) == 0.0);
  CHECK_THROWS_AS(zeta_quadratic(std::vector<double>{1.0}, 1, q), ConfigError);
  CHECK_THROWS_AS(zeta_quadratic(t, 0, q), ContractViolation);
}

TEST_CASE("zeta_window") {
  QuadraticSpec q{Matrix::identity(2)};
  // Y_1 = (1, 0), Y_2 = (0, 1), Y_3 = (1, 1)
  const std::vector<double> y{1.0, 0.0, 0.0, 1.0, 1.0, 1.0};
  CHECK(zeta_window(y, 1, 3, q) == doctest::Approx(2.0));
  CHECK(zeta_window(y, 2, 2, q) == doctest::Approx(1.0));
  const std::vector<double> t3{2.0, 2.0};
  CHECK(zeta_window(y, 3, 3, q) == doctest::Approx(zeta_quadratic(t3, 3, q)));
  CHECK_THROWS_AS(zeta_window(y, 1, 4, q), ContractViolation);
  CHECK_THROWS_AS(zeta_window(y, 0, 2, q), ContractViolation);
  CHECK_THROWS_AS(zeta_window(std::vector<double>{1.0, 2.0, 3.0}, 1, 1, q), ConfigError);
}

TEST_CASE("quadratic spec validation") {
  CHECK_THROWS_AS((QuadraticSpec{Matrix{{1.0, 2.0}, {0.0, 1.0}}}.validate()), ConfigError);
  CHECK_THROWS_AS((QuadraticSpec{Matrix(1, 1)}.validate()), ConfigError);
  CHECK_NOTHROW((QuadraticSpec{Matrix(1, 1), true}.validate()));
}

TEST_CASE("residual level") {
  CHECK(ResidualSpec::constant(2.5).evaluate({}) == 2.5);
  CHECK(ResidualSpec::zero().evaluate({}) == 0.0);
  const auto hook = ResidualSpec::from_hook([](const ResidualContext& c) { return 1.0 / c.n; });
  ResidualContext ctx;
  ctx.n = 4;
  CHECK(hook.evaluate(ctx) == 0.25);
}

TEST_CASE("truncation bound covers the dropped tail") {
  const auto law = IncrementLaw::uniform(0.0, 1.0);
  const auto shallow = StationarySpec::geometric_ma(WMap::identity, 0.7, 10);
  const auto deep = StationarySpec::geometric_ma(WMap::identity, 0.7, 400);
  const auto bound = truncation_bound(shallow, law);
  CHECK(bound.almost_sure);
  Philox4x32 g({1, 0, 0});
  std::vector<Draw> w(400);
  for (int rep = 0; rep < 200; ++rep) {
    for (auto& d : w) d = draw(g.uniform_open());
    CHECK(std::abs(xi_value(deep, w) - xi_value(shallow, w)) <= bound.value);
  }
}

TEST_CASE("staggered closed-form mean against simulation") {
  const double theta = 1.5, r = 0.8;
  const auto law = IncrementLaw::exponential(theta);
  const auto spec = StationarySpec::staggered_residual(r, 0.7, -1.2, 60);
  std::exponential_distribution<double> life(theta), gap(r);
  Philox4x32 g({2, 0, 0});
  std::vector<double> xs(40000);
  std::vector<Draw> w(60);
  for (auto& x : xs) {
    for (auto& d : w) {
      d.base = life(g);
      d.gap = gap(g);
    }
    x = xi_value(spec, w);
  }
  const auto m = mean_se(xs);
  CHECK(std::abs(m.mean - stationary_raw_mean(spec, law)) <= 3.0 * m.se);
}

TEST_CASE("auto centering removes the mean") {
  const auto law = IncrementLaw::gamma(2.0, 1.0);
  const auto spec = with_auto_centering(StationarySpec::geometric_ma(WMap::square, 0.5, 30), law);
  PerturbedWalkModel model;
  model.increment = law;
  model.stationary = spec;
  std::vector<double> xs(20000);
  for (std::size_t r = 0; r < xs.size(); ++r) {
    PathStepper p(model, {3, r, 0});
    p.step();
    xs[r] = p.xi();
  }
  const auto m = mean_se(xs);
  CHECK(std::abs(m.mean) <= 3.0 * m.se);
}

TEST_CASE("mean of zeta_n approaches the sum of mixture weights") {
  PerturbedWalkModel model;
  model.vector = VectorLaw::centered_increment();
  model.quadratic = QuadraticSpec{Matrix{{0.5}}};
  const std::size_t n = 10000;
  std::vector<double> z(1000);
  for (std::size_t r = 0; r < z.size(); ++r) {
    PathStepper p(model, {4, r, 0});
    for (std::size_t k = 0; k < n; ++k) p.step();
    z[r] = p.zeta();
  }
  const auto m = mean_se(z);
  CHECK(std::abs(m.mean - mixture_mean(model.mixture())) <= 3.0 * m.se);
}
