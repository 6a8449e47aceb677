#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>

#include "dormancy/errors.hpp"
#include "dormancy/pde.hpp"

using namespace dormancy;

namespace {

FieldPair constant_field(const Grid1D& g, double u, double v) {
  return FieldPair{g, std::vector<double>(g.n, u), std::vector<double>(g.n, v), 0.0};
}

}  // namespace

TEST_CASE("grid construction") {
  const auto g = Grid1D::spanning(-1.0, 1.0, 0.1);
  CHECK(g.n == 21);
  CHECK(g.x(0) == -1.0);
  CHECK(g.x_max() == doctest::Approx(1.0));
  CHECK_THROWS(Grid1D::spanning(0.0, 1.0, 0.1));  // fewer than 16 points
  CHECK_THROWS(Grid1D::spanning(1.0, -1.0, 0.1));
}

TEST_CASE("initial data") {
  const auto g = Grid1D::spanning(-2.0, 2.0, 0.1);
  const auto h = heaviside_ic(g);
  for (std::size_t i = 0; i < g.n; ++i) {
    CHECK(h.u[i] == (g.x(i) >= -1e-12 ? 1.0 : 0.0));
    CHECK(h.v[i] == h.u[i]);
  }
  CHECK_THROWS_AS(heaviside_ic(Grid1D::spanning(1.0, 5.0, 0.1)), DomainError);
  const auto e = exponential_ic(g, -0.6, PerronVector{1.5, 1.0});
  CHECK(e.u[20] == doctest::Approx(std::exp(-1.5)));
  CHECK(e.v[20] == doctest::Approx(std::exp(-1.0)));
}

TEST_CASE("constant states are fixed points") {
  const auto g = Grid1D::spanning(-5.0, 5.0, 0.1);
  for (auto v : {Variant::SeedBank, Variant::Spore, Variant::Classical}) {
    for (double w : {0.0, 1.0}) {
      const auto out = integrate(unit_params(v), constant_field(g, w, w), 2.0).final;
      for (std::size_t i = 0; i < g.n; ++i) {
        CHECK(out.u[i] == w);
        CHECK(out.v[i] == w);
      }
    }
  }
}

TEST_CASE("spatially flat data follows the reaction ODE") {
  // No spatial gradient, so only the reaction terms act; RK4 reference.
  const auto p = unit_params(Variant::SeedBank);
  const auto g = Grid1D::spanning(-20.0, 20.0, 0.1);  // ends are Dirichlet, keep them far away
  IntegrateOptions o;
  o.dt = 1e-4;
  const auto out = integrate(p, constant_field(g, 0.6, 0.3), 1.0, o).final;
  auto rhs = [](double u, double v) { return std::array<double, 2>{(v - u) + (u * u - u), (u - v)}; };
  double u = 0.6, v = 0.3;
  const double h = 1e-4;
  for (int k = 0; k < 10000; ++k) {
    const auto k1 = rhs(u, v);
    const auto k2 = rhs(u + h / 2 * k1[0], v + h / 2 * k1[1]);
    const auto k3 = rhs(u + h / 2 * k2[0], v + h / 2 * k2[1]);
    const auto k4 = rhs(u + h * k3[0], v + h * k3[1]);
    u += h / 6 * (k1[0] + 2 * k2[0] + 2 * k3[0] + k4[0]);
    v += h / 6 * (k1[1] + 2 * k2[1] + 2 * k3[1] + k4[1]);
  }
  CHECK(sample_field(out, Component::U, 0.0) == doctest::Approx(u).epsilon(1e-4));
  CHECK(sample_field(out, Component::V, 0.0) == doctest::Approx(v).epsilon(1e-4));
}

TEST_CASE("classical variant mirrors v") {
  const auto g = Grid1D::spanning(-10.0, 10.0, 0.1);
  const auto out = integrate(unit_params(Variant::Classical), heaviside_ic(g), 1.0).final;
  for (std::size_t i = 0; i < g.n; ++i) CHECK(out.v[i] == out.u[i]);
}

TEST_CASE("time step limit") {
  const auto g = Grid1D::spanning(-5.0, 5.0, 0.1);
  CHECK(max_stable_dt(g) == doctest::Approx(0.004));
  IntegrateOptions o;
  o.dt = 0.01;
  CHECK_THROWS_AS(integrate(unit_params(Variant::SeedBank), heaviside_ic(g), 1.0, o), ConfigError);
}

TEST_CASE("linear drifted system: flat data against the matrix exponential") {
  const auto p = unit_params(Variant::SeedBank);
  const auto g = Grid1D::spanning(-20.0, 20.0, 0.1);
  const auto out = integrate_linear_drifted(p, 1.3, constant_field(g, 1.0, 0.0), 1.0, 1e-5);
  Eigen::Matrix2d m;
  m << 0.0, 1.0, 1.0, -1.0;  // (s - c, c; c', -c')
  const Eigen::Vector2d exact = (m.exp()) * Eigen::Vector2d(1.0, 0.0);
  CHECK(sample_field(out, Component::U, 0.0) == doctest::Approx(exact(0)).epsilon(1e-4));
  CHECK(sample_field(out, Component::V, 0.0) == doctest::Approx(exact(1)).epsilon(1e-4));
}

TEST_CASE("linear drifted system: exponential eigen-profile is stationary") {
  for (auto v : {Variant::SeedBank, Variant::Spore}) {
    const auto p = unit_params(v);
    const double mu = -0.6;
    const double lam = speed_function(mu, p).lambda_plus;
    const auto d = perron_eigenvector(mu, p);
    const auto g = Grid1D::spanning(-5.0, 5.0, 0.01);
    FieldPair ic{g, std::vector<double>(g.n), std::vector<double>(g.n), 0.0};
    for (std::size_t i = 0; i < g.n; ++i) {
      ic.u[i] = d.d1 * std::exp(mu * g.x(i));
      ic.v[i] = d.d2 * std::exp(mu * g.x(i));
    }
    const auto out = integrate_linear_drifted(p, lam, ic, 1.0);
    for (double x : {-1.0, 0.0, 1.0}) {
      CHECK(sample_field(out, Component::U, x) == doctest::Approx(sample_field(ic, Component::U, x)).epsilon(0.01));
      CHECK(sample_field(out, Component::V, x) == doctest::Approx(sample_field(ic, Component::V, x)).epsilon(0.01));
    }
  }
}

TEST_CASE("front location and speed fitting") {
  const auto g = Grid1D::spanning(-5.0, 5.0, 0.1);
  FieldPair f{g, std::vector<double>(g.n), std::vector<double>(g.n), 0.0};
  for (std::size_t i = 0; i < g.n; ++i) f.u[i] = 1.0 / (1.0 + std::exp(-(g.x(i) - 0.37) * 3.0));
  CHECK(front_position(f, 0.5) == doctest::Approx(0.37).epsilon(1e-3));
  CHECK_THROWS_AS(front_position(f, 1.5), NotBracketed);

  FrontTrace t;
  for (int k = 0; k <= 100; ++k) {
    t.times.push_back(0.1 * k);
    t.positions.push_back(0.75 * 0.1 * k + 2.0);
  }
  const auto fit = front_speed(t, 2.0, 8.0);
  CHECK(fit.slope == doctest::Approx(0.75));
  CHECK(fit.intercept == doctest::Approx(2.0));
  CHECK_THROWS_AS(front_speed(t, 2.0, 2.5), InsufficientSamples);
}

TEST_CASE("tail decay fit") {
  const auto g = Grid1D::spanning(-5.0, 20.0, 0.1);
  FieldPair f{g, std::vector<double>(g.n), std::vector<double>(g.n), 0.0};
  for (std::size_t i = 0; i < g.n; ++i) f.u[i] = 1.0 - 2.0 * std::exp(-0.7 * (g.x(i) + 6.0));
  CHECK(tail_decay_rate(f, Component::U, 2.0, 15.0) == doctest::Approx(-0.7).epsilon(1e-6));
}

TEST_CASE("heaviside front moves right at roughly the classical speed") {
  const auto g = Grid1D::spanning(-20.0, 60.0, 0.1);
  IntegrateOptions o;
  o.sample_every = 0.1;
  const auto tr = integrate(unit_params(Variant::Classical), heaviside_ic(g), 20.0, o);
  const auto fit = front_speed(tr.trace, 10.0, 20.0);
  CHECK(fit.slope > 1.25);
  CHECK(fit.slope < std::sqrt(2.0));
}
