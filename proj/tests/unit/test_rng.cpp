#include <doctest.h>

#include <cmath>
#include <set>
#include <vector>

#include "nlrt/rng.hpp"
#include "nlrt/stats.hpp"

using nlrt::Philox4x32;
using nlrt::RngStream;

TEST_CASE("philox known answers") {
  using B = Philox4x32::Block;
  using K = Philox4x32::Key;
  CHECK(Philox4x32::bijection(B{0, 0, 0, 0}, K{0, 0}) ==
        B{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32::bijection(B{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                              K{0xffffffff, 0xffffffff}) ==
        B{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32::bijection(B{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                              K{0xa4093822, 0x299f31d0}) ==
        B{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("stream is a pure function of its identity") {
  Philox4x32 a({42, 7, 3});
  Philox4x32 b({42, 7, 3});
  for (int i = 0; i < 1000; ++i) CHECK(a() == b());
}

TEST_CASE("distinct identities give distinct streams") {
  std::set<std::uint64_t> first;
  for (std::uint64_t seed : {1u, 2u})
    for (std::uint64_t rep : {0u, 1u, 2u})
      for (std::uint64_t id : {0u, 1u}) first.insert(Philox4x32({seed, rep, id})());
  CHECK(first.size() == 12);
}

TEST_CASE("discard matches stepping") {
  Philox4x32 a({5, 1, 1});
  Philox4x32 b({5, 1, 1});
  for (int i = 0; i < 37; ++i) a();
  b.discard(37);
  for (int i = 0; i < 10; ++i) CHECK(a() == b());
}

TEST_CASE("uniform_open stays inside (0,1) and has mean 1/2") {
  Philox4x32 g({9, 0, 0});
  std::vector<double> u(100000);
  for (auto& x : u) {
    x = g.uniform_open();
    REQUIRE(x > 0.0);
    REQUIRE(x < 1.0);
  }
  const auto m = nlrt::mean_se(u);
  CHECK(std::abs(m.mean - 0.5) < 4.0 * std::sqrt(1.0 / 12.0 / 1e5));
}

TEST_CASE("replication streams are uncorrelated") {
  std::vector<double> x(20000), y(20000);
  Philox4x32 a(RngStream{3, 0, 1});
  Philox4x32 b(RngStream{3, 1, 1});
  for (std::size_t i = 0; i < x.size(); ++i) {
    x[i] = a.uniform_open();
    y[i] = b.uniform_open();
  }
  CHECK(std::abs(nlrt::sample_correlation(x, y)) < 4.0 / std::sqrt(20000.0));
}
