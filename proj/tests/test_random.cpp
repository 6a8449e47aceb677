#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dormancy/random.hpp"

using namespace dormancy;
using Block = Philox4x32::Block;

// Known-answer vectors of Philox4x32-10.
TEST_CASE("philox known answers") {
  CHECK(Philox4x32::bijection({0, 0, 0, 0}, {0, 0}) == Block{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u});
  CHECK(Philox4x32::bijection({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}) ==
        Block{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu});
  CHECK(Philox4x32::bijection({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}) ==
        Block{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u});
}

TEST_CASE("streams are deterministic and distinct") {
  RandomStream a(42, 3), b(42, 3), c(42, 4), d(43, 3);
  bool differ_stream = false, differ_seed = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.uniform();
    CHECK(x == b.uniform());
    differ_stream = differ_stream || x != c.uniform();
    differ_seed = differ_seed || x != d.uniform();
  }
  CHECK(differ_stream);
  CHECK(differ_seed);
}

TEST_CASE("variate moments") {
  RandomStream rng(7, 0);
  const int n = 200000;
  double su = 0, se = 0, sn = 0, sn2 = 0, umin = 1, umax = 0;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    umin = std::min(umin, u);
    umax = std::max(umax, u);
    su += u;
    se += rng.exponential(2.0);
    const double z = rng.normal();
    sn += z;
    sn2 += z * z;
  }
  CHECK(umin > 0.0);
  CHECK(umax < 1.0);
  CHECK(su / n == doctest::Approx(0.5).epsilon(0.005));
  CHECK(se / n == doctest::Approx(0.5).epsilon(0.01));
  CHECK(std::abs(sn / n) < 0.01);
  CHECK(sn2 / n == doctest::Approx(1.0).epsilon(0.01));
}
