#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "dormancy/errors.hpp"
#include "dormancy/model.hpp"

using namespace dormancy;

TEST_CASE("offspring law validation") {
  CHECK_NOTHROW(OffspringLaw({0.25, 0.75}));
  CHECK_THROWS_AS(OffspringLaw({}), DomainError);
  CHECK_THROWS_AS(OffspringLaw({0.5, 0.6}), DomainError);
  CHECK_THROWS_AS(OffspringLaw({-0.1, 1.1}), DomainError);
  CHECK_THROWS_AS(OffspringLaw(std::vector<double>(65, 1.0 / 65)), DomainError);
  CHECK_NOTHROW(OffspringLaw({0.5, 0.5 + 5e-13}));
}

TEST_CASE("binary law and nonlinearity") {
  const auto law = OffspringLaw::binary();
  CHECK(law.support() == 1);
  CHECK(law.mean_increment() == 1.0);
  CHECK(law.nonlinearity(0.0) == 0.0);
  CHECK(law.nonlinearity(1.0) == 0.0);
  CHECK(law.nonlinearity(0.5) == doctest::Approx(-0.25));

  const OffspringLaw mixed({0.5, 0.5});
  CHECK(mixed.mean_increment() == doctest::Approx(1.5));
  // 0.5 (u^2 - u) + 0.5 (u^3 - u) at u = 0.5
  CHECK(mixed.nonlinearity(0.5) == doctest::Approx(0.5 * (0.25 - 0.5) + 0.5 * (0.125 - 0.5)));
  CHECK(mixed.nonlinearity(1.0) == 0.0);
}

TEST_CASE("inverse-cdf sampling of the increment") {
  const OffspringLaw law({0.2, 0.3, 0.5});
  CHECK(law.sample_increment(0.0) == 1);
  CHECK(law.sample_increment(0.19) == 1);
  CHECK(law.sample_increment(0.21) == 2);
  CHECK(law.sample_increment(0.49) == 2);
  CHECK(law.sample_increment(0.51) == 3);
  CHECK(law.sample_increment(0.999999) == 3);
}

TEST_CASE("parameter invariants") {
  CHECK_NOTHROW(make_params(Variant::SeedBank, 1.0, 1.0, 1.0));
  CHECK_THROWS_AS(make_params(Variant::SeedBank, -1.0, 1.0, 1.0), DomainError);
  CHECK_THROWS_AS(make_params(Variant::Spore, 1.0, 1.0, 0.0), DomainError);
  CHECK_THROWS_AS(make_params(Variant::Classical, 1.0, 0.0, 1.0), DomainError);
  CHECK_NOTHROW(make_params(Variant::Classical, 0.0, 0.0, 2.0));
  CHECK_THROWS_AS(make_params(Variant::SeedBank, std::nan(""), 1.0, 1.0), DomainError);
}

TEST_CASE("selection rate and rescaling") {
  const auto p = make_params(Variant::SeedBank, 1.0, 1.0, 2.0, OffspringLaw({0.5, 0.5}));
  CHECK(effective_selection(p) == doctest::Approx(3.0));
  const auto q = with_selection(p, 1.5);
  CHECK(effective_selection(q) == doctest::Approx(1.5));
  CHECK(q.kappa == doctest::Approx(1.0));
  CHECK(selection_term(1.0, p) == 0.0);
  CHECK_THROWS_AS(selection_term(1.5, p), DomainError);
  CHECK_THROWS_AS(selection_term(-0.1, p), DomainError);
}

TEST_CASE("variant names") {
  CHECK(parse_variant("seedbank") == Variant::SeedBank);
  CHECK(parse_variant("seed-bank") == Variant::SeedBank);
  CHECK(parse_variant("I") == Variant::SeedBank);
  CHECK(parse_variant("II") == Variant::Spore);
  CHECK(parse_variant("spore") == Variant::Spore);
  CHECK(parse_variant("classical") == Variant::Classical);
  CHECK_THROWS_AS(parse_variant("bogus"), DomainError);
  for (auto v : {Variant::Classical, Variant::SeedBank, Variant::Spore}) CHECK(parse_variant(to_string(v)) == v);
}

TEST_CASE("with_variant zeroes switching for classical") {
  const auto p = with_variant(unit_params(Variant::SeedBank), Variant::Classical);
  CHECK(p.c == 0.0);
  CHECK(p.c_prime == 0.0);
  CHECK(unit_params(Variant::Classical).c == 0.0);
}

TEST_CASE("describe echo") {
  CHECK(describe(unit_params(Variant::SeedBank)) == "variant=seedbank c=1 c_prime=1 kappa=1 offspring=1");
}
