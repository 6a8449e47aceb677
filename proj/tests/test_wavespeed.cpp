#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dormancy/errors.hpp"
#include "dormancy/random.hpp"
#include "dormancy/wavespeed.hpp"

using namespace dormancy;

namespace {

ModelParams seedbank(double c, double cp, double s) {
  return with_selection(make_params(Variant::SeedBank, c, cp, 1.0), s);
}

// Newton iteration on (det, d det / d mu) = 0 with a finite-difference Jacobian:
// the minimum of lambda_plus is where the root curve of det has a horizontal tangent.
std::pair<double, double> double_root(const ModelParams& p, double mu, double lambda) {
  const double h = 1e-5;
  auto F = [&](double m, double l) {
    const double dmu = (determinant_poly(m + h, l, p) - determinant_poly(m - h, l, p)) / (2 * h);
    return std::array<double, 2>{determinant_poly(m, l, p), dmu};
  };
  for (int it = 0; it < 50; ++it) {
    const auto f = F(mu, lambda);
    const auto fm = F(mu + h, lambda), fl = F(mu, lambda + h);
    const double a = (fm[0] - f[0]) / h, b = (fl[0] - f[0]) / h;
    const double c = (fm[1] - f[1]) / h, d = (fl[1] - f[1]) / h;
    const double det = a * d - b * c;
    const double dm = (d * f[0] - b * f[1]) / det;
    const double dl = (a * f[1] - c * f[0]) / det;
    mu -= dm;
    lambda -= dl;
    if (std::abs(dm) + std::abs(dl) < 1e-13) break;
  }
  return {mu, lambda};
}

}  // namespace

TEST_CASE("critical speeds at unit parameters") {
  const auto sb = critical_speed(unit_params(Variant::SeedBank));
  CHECK(sb.mu_star == doctest::Approx(-1.191029268689).epsilon(1e-9));
  CHECK(sb.lambda_star == doctest::Approx(0.982416232234).epsilon(1e-10));
  CHECK(std::abs(sb.det_residual) < 1e-9);

  const auto sp = critical_speed(unit_params(Variant::Spore));
  CHECK(std::abs(sp.lambda_star - std::numbers::sqrt2 / 2) < 1e-10);
  CHECK(std::abs(sp.mu_star + std::numbers::sqrt2) < 1e-6);

  const auto cl = critical_speed(unit_params(Variant::Classical));
  CHECK(std::abs(cl.lambda_star - std::numbers::sqrt2) < 1e-10);
  CHECK(std::abs(cl.mu_star + std::numbers::sqrt2) < 1e-6);
}

TEST_CASE("critical point agrees with the double root of the determinant") {
  for (auto p : {unit_params(Variant::SeedBank), unit_params(Variant::Spore), seedbank(0.3, 2.0, 1.7),
                 with_selection(make_params(Variant::Spore, 2.5, 0.4, 1.0), 0.8)}) {
    const auto cs = critical_speed(p);
    const auto [mu, lambda] = double_root(p, cs.mu_star - 0.05, cs.lambda_star + 0.01);
    CHECK(mu == doctest::Approx(cs.mu_star).epsilon(1e-6));
    CHECK(lambda == doctest::Approx(cs.lambda_star).epsilon(1e-9));
  }
}

TEST_CASE("speed function values") {
  const auto p = unit_params(Variant::SeedBank);
  CHECK(speed_function(-0.6, p).lambda_plus == doctest::Approx(1.2517951436).epsilon(1e-10));
  CHECK(speed_function(-3.0, p).lambda_plus == doctest::Approx(1.5587249926).epsilon(1e-10));
  CHECK(speed_function(-1.0, p).lambda_plus == doctest::Approx(1.0).epsilon(1e-14));
  const auto cl = speed_function(-std::numbers::sqrt2, unit_params(Variant::Classical));
  CHECK(cl.lambda_plus == doctest::Approx(std::numbers::sqrt2));
  CHECK(cl.lambda_minus == cl.lambda_plus);
  CHECK_THROWS_AS(speed_function(0.0, p), DomainError);
  CHECK_THROWS_AS(speed_function(0.5, p), DomainError);
}

TEST_CASE("closed form matches numerical eigen-decomposition") {
  RandomStream rng(11, 0);
  for (int k = 0; k < 200; ++k) {
    const Variant v = k % 2 ? Variant::SeedBank : Variant::Spore;
    const auto p = with_selection(make_params(v, 0.1 + 5 * rng.uniform(), 0.1 + 5 * rng.uniform(), 1.0),
                                  0.1 + 5 * rng.uniform());
    const double mu = -(0.05 + 5 * rng.uniform());
    const auto a = speed_function(mu, p);
    const auto b = speed_function_eigensolve(mu, p);
    CHECK(std::abs(a.lambda_plus - b.lambda_plus) < 1e-10 * std::max(1.0, std::abs(a.lambda_plus)));
    CHECK(std::abs(a.lambda_minus - b.lambda_minus) < 1e-10 * std::max(1.0, std::abs(a.lambda_minus)));
    CHECK(perron_root(mu, p) == doctest::Approx(-mu * a.lambda_plus).epsilon(1e-12));
  }
}

TEST_CASE("analytic derivative") {
  for (auto p : {unit_params(Variant::SeedBank), unit_params(Variant::Spore), unit_params(Variant::Classical)}) {
    for (double mu : {-0.3, -0.9, -1.7, -4.0}) {
      const double h = 1e-6;
      const double fd =
          (speed_function(mu + h, p).lambda_plus - speed_function(mu - h, p).lambda_plus) / (2 * h);
      CHECK(speed_derivative(mu, p) == doctest::Approx(fd).epsilon(1e-6));
    }
  }
}

TEST_CASE("Perron vector and diagonal entries") {
  const auto p = seedbank(0.7, 2.2, 1.3);
  for (double mu : {-0.2, -1.0, -2.5}) {
    const auto d = perron_eigenvector(mu, p);
    CHECK(d.d1 > 0.0);
    CHECK(d.d2 == 1.0);
    const auto m = eigen_matrix(mu, speed_function(mu, p).lambda_plus, p);
    CHECK(std::abs(m[0][0] * d.d1 + m[0][1] * d.d2) < 1e-12);
    CHECK(std::abs(m[1][0] * d.d1 + m[1][1] * d.d2) < 1e-12);
  }
  const auto cs = critical_speed(p);
  const auto diag = diagonal_entries(cs.mu_star, p);
  CHECK(diag.active < 0.0);
  CHECK(diag.dormant < 0.0);
  // unit seed bank: d1 has a closed form
  const auto q = unit_params(Variant::SeedBank);
  const double mu = -0.6;
  const double r = speed_radicand(mu, q);
  CHECK(perron_eigenvector(mu, q).d1 ==
        doctest::Approx((0.5 - 0.5 - 0.5 + std::sqrt(4 * r) / 4 + mu * mu / 4) / 1.0 + 1.0));
  const auto cv = perron_eigenvector(-1.0, unit_params(Variant::Classical));
  CHECK(cv.d1 == 1.0);
  CHECK(cv.d2 == 0.0);
}

TEST_CASE("ordering of the speed functions") {
  const auto sp = unit_params(Variant::Spore), sb = unit_params(Variant::SeedBank),
             cl = unit_params(Variant::Classical);
  for (int i = 0; i < 200; ++i) {
    const double mu = -3.0 + 2.9 * i / 199.0;
    const double a = speed_function(mu, sp).lambda_plus, b = speed_function(mu, sb).lambda_plus,
                 c = speed_function(mu, cl).lambda_plus;
    CHECK(a <= b + 1e-12);
    CHECK(b <= c + 1e-12);
  }
}

TEST_CASE("nearly dormant seed bank") {
  CHECK(critical_speed(seedbank(1.0, 1e-4, 1.5)).lambda_star == doctest::Approx(1.0001).epsilon(1e-4));
  CHECK(critical_speed(seedbank(1.0, 1e-4, 0.5)).lambda_star < 0.05);
  CHECK(critical_speed(seedbank(1.0, 1e-2, 1.5)).lambda_star == doctest::Approx(1.00962).epsilon(1e-5));
  CHECK(critical_speed(seedbank(1.0, 1.0, 1.5)).lambda_star == doctest::Approx(1.30788).epsilon(1e-5));
  CHECK(critical_speed(seedbank(1e-3, 1e-3, 1.0)).lambda_star == doctest::Approx(1.4135).epsilon(1e-4));
}

TEST_CASE("sweeps") {
  const std::vector<double> grid{0.25, 0.5, 1.0, 2.0, 8.0};
  const auto rows = sweep_critical(unit_params(Variant::SeedBank), SweepAxis::Selection, grid);
  REQUIRE(rows.size() == grid.size());
  for (const auto& r : rows) {
    CHECK(r.error.empty());
    CHECK(std::abs(r.lambda_star[0] - std::sqrt(2 * r.value)) < 1e-8);
    CHECK(std::abs(2 * r.lambda_star[2] - std::sqrt(2 * r.value)) < 1e-8);
  }
  const std::vector<double> both{0.1, 1.0, 10.0};
  for (const auto& r : sweep_critical(unit_params(Variant::SeedBank), SweepAxis::SwitchBoth, both))
    CHECK(std::abs(r.lambda_star[2] - std::numbers::sqrt2 / 2) < 1e-8);

  const std::vector<double> bad{1.0, -1.0};
  const auto rows2 = sweep_critical(unit_params(Variant::SeedBank), SweepAxis::SwitchOut, bad);
  CHECK(rows2[0].error.empty());
  CHECK_FALSE(rows2[1].error.empty());
  CHECK(std::isnan(rows2[1].lambda_star[1]));

  CHECK(parse_sweep_axis("c_prime") == SweepAxis::SwitchIn);
  CHECK(parse_sweep_axis("s") == SweepAxis::Selection);
  CHECK_THROWS(parse_sweep_axis("zz"));
}

TEST_CASE("scan options are validated") {
  CriticalOptions o;
  o.mu_hi = 1.0;
  CHECK_THROWS_AS(critical_speed(unit_params(Variant::SeedBank), o), ConfigError);
  o = {};
  o.mu_lo = -0.5;  // minimum at -1.19 lies outside
  CHECK_THROWS_AS(critical_speed(unit_params(Variant::SeedBank), o), SolverError);
}
