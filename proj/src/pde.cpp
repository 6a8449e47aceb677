#include "dormancy/pde.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "dormancy/errors.hpp"

namespace dormancy {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_field(const FieldPair& f, bool unit_range) {
  if (f.grid.n < 16 || !(f.grid.dx > 0.0)) {
    throw ConfigError(fmt::format("grid needs n >= 16 and dx > 0 (n={}, dx={})", f.grid.n,
                                  f.grid.dx));
  }
  if (f.u.size() != f.grid.n || f.v.size() != f.grid.n) {
    throw ConfigError("field length does not match the grid");
  }
  if (!unit_range) return;
  const auto outside = [](double w) { return !(w >= 0.0 && w <= 1.0); };
  if (std::any_of(f.u.begin(), f.u.end(), outside) ||
      std::any_of(f.v.begin(), f.v.end(), outside)) {
    throw DomainError("initial data must take values in [0,1]");
  }
}

struct StepPlan {
  double dt = 0.0;
  std::size_t steps = 0;
};

StepPlan plan_steps(const Grid1D& grid, double T, double requested, double lambda = 0.0) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw ConfigError(fmt::format("bad horizon T={}", T));
  double limit = max_stable_dt(grid);
  if (lambda != 0.0) limit = std::min(limit, grid.dx / std::abs(lambda));
  const double dt = requested > 0.0 ? requested : limit;
  if (dt > limit * (1.0 + 1e-12)) {
    throw ConfigError(
        fmt::format("time step {} violates the explicit stability limit {}", dt, limit));
  }
  StepPlan plan;
  if (T == 0.0) return plan;
  plan.steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
  plan.steps = std::max<std::size_t>(plan.steps, 1);
  plan.dt = T / static_cast<double>(plan.steps);
  return plan;
}

inline double laplacian(const std::vector<double>& w, std::size_t i, double inv_dx2) {
  return (w[i - 1] - 2.0 * w[i] + w[i + 1]) * inv_dx2;
}

inline double upwind(const std::vector<double>& w, std::size_t i, double lambda, double inv_dx) {
  return lambda > 0.0 ? lambda * (w[i + 1] - w[i]) * inv_dx : lambda * (w[i] - w[i - 1]) * inv_dx;
}

double try_front(const FieldPair& f, double level, Component component) {
  try {
    return front_position(f, level, component);
  } catch (const NotBracketed&) {
    return kNaN;
  }
}

}  // namespace

Grid1D Grid1D::spanning(double x_min, double x_max, double dx) {
  if (!(dx > 0.0) || !(x_max > x_min)) {
    throw ConfigError(fmt::format("bad grid [{}, {}] with dx={}", x_min, x_max, dx));
  }
  const auto n = static_cast<std::size_t>(std::llround((x_max - x_min) / dx)) + 1;
  if (n < 16) throw ConfigError(fmt::format("grid needs at least 16 points, got {}", n));
  return Grid1D{x_min, dx, n};
}

double max_stable_dt(const Grid1D& grid) { return 0.4 * grid.dx * grid.dx; }

Trajectory integrate(const ModelParams& params, FieldPair ic, double T,
                     const IntegrateOptions& options) {
  validate(params);
  check_field(ic, true);
  const StepPlan plan = plan_steps(ic.grid, T, options.dt);
  const std::size_t n = ic.grid.n;
  const double dt = plan.dt;
  const double inv_dx2 = 1.0 / (ic.grid.dx * ic.grid.dx);
  const double c = params.c;
  const double cp = params.c_prime;
  const double kappa = params.kappa;
  const OffspringLaw& law = params.law;
  const double t0 = ic.t;

  Trajectory out;
  out.trace.level = options.level;
  out.trace.component = options.component;

  if (params.variant == Variant::Classical) ic.v = ic.u;

  std::size_t sample_stride = 0;
  if (options.sample_every > 0.0 && plan.steps > 0) {
    sample_stride = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(options.sample_every / dt)));
  }
  std::vector<std::size_t> snapshot_steps;
  for (const double ts : options.snapshot_times) {
    const double rel = plan.steps > 0 ? (ts - t0) / dt : 0.0;
    snapshot_steps.push_back(static_cast<std::size_t>(
        std::clamp<long long>(std::llround(rel), 0, static_cast<long long>(plan.steps))));
  }
  const auto record = [&](const FieldPair& f, std::size_t step) {
    if (sample_stride > 0 && step % sample_stride == 0) {
      out.trace.times.push_back(f.t);
      out.trace.positions.push_back(try_front(f, options.level, options.component));
    }
    for (const std::size_t s : snapshot_steps) {
      if (s == step) out.snapshots.push_back(f);
    }
  };

  FieldPair cur = std::move(ic);
  FieldPair next = cur;
  record(cur, 0);

  const auto clamp01 = [](double w) { return std::clamp(w, 0.0, 1.0); };

  for (std::size_t step = 1; step <= plan.steps; ++step) {
    const std::vector<double>& u = cur.u;
    const std::vector<double>& v = cur.v;
    std::vector<double>& un = next.u;
    std::vector<double>& vn = next.v;
    bool finite = true;
    switch (params.variant) {
      case Variant::SeedBank:
        for (std::size_t i = 1; i + 1 < n; ++i) {
          const double du = 0.5 * laplacian(u, i, inv_dx2) + c * (v[i] - u[i]) +
                            kappa * law.nonlinearity(u[i]);
          un[i] = clamp01(u[i] + dt * du);
          vn[i] = clamp01(v[i] + dt * cp * (u[i] - v[i]));
          finite = finite && !std::isnan(un[i]) && !std::isnan(vn[i]);
        }
        break;
      case Variant::Spore:
        for (std::size_t i = 1; i + 1 < n; ++i) {
          const double du = c * (v[i] - u[i]) + kappa * law.nonlinearity(u[i]);
          const double dv = 0.5 * laplacian(v, i, inv_dx2) + cp * (u[i] - v[i]);
          un[i] = clamp01(u[i] + dt * du);
          vn[i] = clamp01(v[i] + dt * dv);
          finite = finite && !std::isnan(un[i]) && !std::isnan(vn[i]);
        }
        break;
      case Variant::Classical:
        for (std::size_t i = 1; i + 1 < n; ++i) {
          const double du = 0.5 * laplacian(u, i, inv_dx2) + kappa * law.nonlinearity(u[i]);
          un[i] = clamp01(u[i] + dt * du);
          vn[i] = un[i];
          finite = finite && !std::isnan(un[i]);
        }
        break;
    }
    if (!finite) throw DivergenceError(step);
    // Dirichlet ends keep their initial values
    un.front() = u.front();
    un.back() = u.back();
    vn.front() = v.front();
    vn.back() = v.back();
    next.t = t0 + static_cast<double>(step) * dt;
    std::swap(cur, next);
    record(cur, step);
  }
  cur.t = t0 + T;
  out.final = std::move(cur);
  return out;
}

FieldPair integrate_linear_drifted(const ModelParams& params, double lambda, FieldPair ic,
                                   double T, double dt) {
  validate(params);
  check_field(ic, false);
  const StepPlan plan = plan_steps(ic.grid, T, dt, lambda);
  const std::size_t n = ic.grid.n;
  const double h = plan.dt;
  const double inv_dx2 = 1.0 / (ic.grid.dx * ic.grid.dx);
  const double inv_dx = 1.0 / ic.grid.dx;
  const double s = effective_selection(params);
  const double c = params.c;
  const double cp = params.c_prime;
  const bool diffuse_u = params.variant != Variant::Spore;
  const double t0 = ic.t;

  FieldPair cur = std::move(ic);
  FieldPair next = cur;
  for (std::size_t step = 1; step <= plan.steps; ++step) {
    const std::vector<double>& u = cur.u;
    const std::vector<double>& v = cur.v;
    bool finite = true;
    for (std::size_t i = 1; i + 1 < n; ++i) {
      double du = upwind(u, i, lambda, inv_dx) + c * (v[i] - u[i]) + s * u[i];
      double dv = upwind(v, i, lambda, inv_dx) + cp * (u[i] - v[i]);
      if (diffuse_u) {
        du += 0.5 * laplacian(u, i, inv_dx2);
      } else {
        dv += 0.5 * laplacian(v, i, inv_dx2);
      }
      next.u[i] = u[i] + h * du;
      next.v[i] = v[i] + h * dv;
      finite = finite && std::isfinite(next.u[i]) && std::isfinite(next.v[i]);
    }
    if (!finite) throw DivergenceError(step);
    next.u.front() = u.front();
    next.u.back() = u.back();
    next.v.front() = v.front();
    next.v.back() = v.back();
    next.t = t0 + static_cast<double>(step) * h;
    std::swap(cur, next);
  }
  cur.t = t0 + T;
  return cur;
}

FieldPair heaviside_ic(const Grid1D& grid) {
  if (!(grid.x0 <= 0.0 && grid.x_max() >= 0.0)) {
    throw DomainError(fmt::format("grid [{}, {}] does not contain 0", grid.x0, grid.x_max()));
  }
  FieldPair f{grid, std::vector<double>(grid.n), std::vector<double>(grid.n), 0.0};
  const double snap = 1e-9 * grid.dx;
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double value = grid.x(i) >= -snap ? 1.0 : 0.0;
    f.u[i] = value;
    f.v[i] = value;
  }
  return f;
}

FieldPair exponential_ic(const Grid1D& grid, double mu, PerronVector d) {
  FieldPair f{grid, std::vector<double>(grid.n), std::vector<double>(grid.n), 0.0};
  for (std::size_t i = 0; i < grid.n; ++i) {
    const double e = std::exp(mu * grid.x(i));
    f.u[i] = std::exp(-d.d1 * e);
    f.v[i] = std::exp(-d.d2 * e);
  }
  return f;
}

double front_position(const FieldPair& field, double level, Component component) {
  const std::vector<double>& w = field.component(component);
  const Grid1D& g = field.grid;
  for (std::size_t i = 0; i + 1 < w.size(); ++i) {
    const double a = w[i] - level;
    const double b = w[i + 1] - level;
    if (a == 0.0) return g.x(i);
    if ((a < 0.0 && b > 0.0) || (a > 0.0 && b < 0.0)) {
      return g.x(i) + g.dx * (level - w[i]) / (w[i + 1] - w[i]);
    }
  }
  if (!w.empty() && w.back() == level) return g.x(w.size() - 1);
  throw NotBracketed(fmt::format("level {} is not crossed inside [{}, {}]", level, g.x0,
                                 g.x_max()));
}

double sample_field(const FieldPair& field, Component component, double x) {
  const std::vector<double>& w = field.component(component);
  const Grid1D& g = field.grid;
  const double pos = (x - g.x0) / g.dx;
  if (pos <= 0.0) return w.front();
  if (pos >= static_cast<double>(g.n - 1)) return w.back();
  const auto i = static_cast<std::size_t>(pos);
  const double frac = pos - static_cast<double>(i);
  return w[i] + frac * (w[i + 1] - w[i]);
}

SpeedFit front_speed(const FrontTrace& trace, double t_lo, double t_hi) {
  const double eps = 1e-9 * std::max(1.0, std::abs(t_hi));
  std::vector<double> ts;
  std::vector<double> xs;
  for (std::size_t i = 0; i < trace.times.size(); ++i) {
    const double t = trace.times[i];
    if (t >= t_lo - eps && t <= t_hi + eps && std::isfinite(trace.positions[i])) {
      ts.push_back(t);
      xs.push_back(trace.positions[i]);
    }
  }
  if (ts.size() < 8) {
    throw InsufficientSamples(
        fmt::format("front speed needs >= 8 samples in [{}, {}], got {}", t_lo, t_hi, ts.size()));
  }
  const auto count = static_cast<double>(ts.size());
  double t_mean = 0.0;
  double x_mean = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    t_mean += ts[i];
    x_mean += xs[i];
  }
  t_mean /= count;
  x_mean /= count;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    sxx += (ts[i] - t_mean) * (ts[i] - t_mean);
    sxy += (ts[i] - t_mean) * (xs[i] - x_mean);
  }
  SpeedFit fit;
  fit.samples = ts.size();
  fit.slope = sxy / sxx;
  fit.intercept = x_mean - fit.slope * t_mean;
  double ssr = 0.0;
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double r = xs[i] - (fit.intercept + fit.slope * ts[i]);
    ssr += r * r;
  }
  fit.std_error = std::sqrt(ssr / (count - 2.0) / sxx);
  return fit;
}

double tail_decay_rate(const FieldPair& field, Component component, double x_lo, double x_hi) {
  const std::vector<double>& w = field.component(component);
  std::vector<double> xs;
  std::vector<double> ys;
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double x = field.grid.x(i);
    if (x < x_lo || x > x_hi) continue;
    const double gap = 1.0 - w[i];
    if (!(gap > 0.0)) {
      throw DomainError(fmt::format("1 - w is not positive at x={} (w={})", x, w[i]));
    }
    xs.push_back(x);
    ys.push_back(std::log(gap));
  }
  if (xs.size() < 2) throw InsufficientSamples("tail fit range holds fewer than 2 grid points");
  const auto m = static_cast<double>(xs.size());
  double x_mean = 0.0;
  double y_mean = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    x_mean += xs[i];
    y_mean += ys[i];
  }
  x_mean /= m;
  y_mean /= m;
  double sxx = 0.0;
  double sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - x_mean) * (xs[i] - x_mean);
    sxy += (xs[i] - x_mean) * (ys[i] - y_mean);
  }
  return sxy / sxx;
}

}  // namespace dormancy
