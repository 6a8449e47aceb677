#pragma once

#include <cstddef>
#include <vector>

#include "dormancy/model.hpp"
#include "dormancy/wavespeed.hpp"

namespace dormancy {

/// Uniform grid x_i = x0 + i*dx, i = 0..n-1.
struct Grid1D {
  double x0 = 0.0;
  double dx = 0.1;
  std::size_t n = 16;

  double x(std::size_t i) const noexcept { return x0 + static_cast<double>(i) * dx; }
  double x_max() const noexcept { return x(n - 1); }

  /// Grid covering [x_min, x_max] with spacing dx (x_max rounded to the grid).
  static Grid1D spanning(double x_min, double x_max, double dx);
};

enum class Component { U, V };

/// Discretised (u, v) at time t.
struct FieldPair {
  Grid1D grid;
  std::vector<double> u;
  std::vector<double> v;
  double t = 0.0;

  const std::vector<double>& component(Component c) const noexcept {
    return c == Component::U ? u : v;
  }
};

/// Level-set locations sampled along an integration. Positions are NaN
/// while the level set is outside the grid.
struct FrontTrace {
  double level = 0.5;
  Component component = Component::U;
  std::vector<double> times;
  std::vector<double> positions;
};

struct IntegrateOptions {
  double dt = 0.0;            ///< 0 selects 0.4*dx^2
  double sample_every = 0.0;  ///< front sampling interval in time units, 0 disables
  double level = 0.5;
  Component component = Component::U;
  std::vector<double> snapshot_times;  ///< fields stored at the nearest step
};

struct Trajectory {
  FieldPair final;
  FrontTrace trace;
  std::vector<FieldPair> snapshots;
};

/// Largest admissible explicit step, 0.4*dx^2.
double max_stable_dt(const Grid1D& grid);

/// Explicit Euler integration of the nonlinear system selected by
/// params.variant up to time ic.t + T. Boundary values stay at their
/// initial values; both fields are clamped to [0,1] after every step.
Trajectory integrate(const ModelParams& params, FieldPair ic, double T,
                     const IntegrateOptions& options = {});

/// Linear system with growth s on the active field and drift lambda*grad on
/// both fields (first-order upwind). The Laplacian sits on u for SeedBank and
/// Classical, on v for Spore. No clamping.
FieldPair integrate_linear_drifted(const ModelParams& params, double lambda, FieldPair ic,
                                   double T, double dt = 0.0);

/// u = v = 1 on [0, inf), 0 elsewhere. The grid must contain 0.
FieldPair heaviside_ic(const Grid1D& grid);

/// u0 = exp(-d1 e^{mu x}), v0 = exp(-d2 e^{mu x}), so 1 - u0 ~ d1 e^{mu x} as x -> inf.
FieldPair exponential_ic(const Grid1D& grid, double mu, PerronVector d);

/// Leftmost crossing of `level`, linearly interpolated. Throws NotBracketed.
double front_position(const FieldPair& field, double level, Component component = Component::U);

/// Linear interpolation of a component at x (clamped to the grid ends).
double sample_field(const FieldPair& field, Component component, double x);

struct SpeedFit {
  double slope = 0.0;
  double std_error = 0.0;
  double intercept = 0.0;
  std::size_t samples = 0;
};

/// Least-squares slope of finite positions with t in [t_lo, t_hi]; needs >= 8 samples.
SpeedFit front_speed(const FrontTrace& trace, double t_lo, double t_hi);

/// Least-squares slope of log(1 - w) against x on [x_lo, x_hi].
double tail_decay_rate(const FieldPair& field, Component component, double x_lo, double x_hi);

}  // namespace dormancy
