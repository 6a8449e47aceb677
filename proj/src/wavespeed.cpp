#include "dormancy/wavespeed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "dormancy/errors.hpp"

namespace dormancy {
namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// mu^2/2 A + Q + R written out; the diffusive slot depends on the variant.
Matrix2 base_matrix(double mu, const ModelParams& p) {
  const double s = effective_selection(p);
  const double half_mu2 = 0.5 * mu * mu;
  switch (p.variant) {
    case Variant::Spore:
      return {{{s - p.c, p.c}, {p.c_prime, half_mu2 - p.c_prime}}};
    case Variant::Classical:
    case Variant::SeedBank:
      break;
  }
  return {{{half_mu2 - p.c + s, p.c}, {p.c_prime, -p.c_prime}}};
}

void require_negative(double mu) {
  if (!(mu < 0.0)) throw DomainError(fmt::format("decay rate must be negative, got {}", mu));
}

}  // namespace

double speed_radicand(double mu, const ModelParams& p) {
  const double s = effective_selection(p);
  const double c = p.c;
  const double cp = p.c_prime;
  const double mu2 = mu * mu;
  switch (p.variant) {
    case Variant::Spore:
      return c * c + 2 * c * cp + c * mu2 - 2 * c * s + cp * cp - cp * mu2 + 2 * cp * s +
             mu2 * mu2 / 4 - mu2 * s + s * s;
    case Variant::Classical:
    case Variant::SeedBank:
      break;
  }
  return c * c + 2 * c * cp - c * mu2 - 2 * c * s + cp * cp + cp * mu2 + 2 * cp * s +
         mu2 * mu2 / 4 + mu2 * s + s * s;
}

SpeedEval speed_function(double mu, const ModelParams& p) {
  require_negative(mu);
  const double s = effective_selection(p);
  SpeedEval out;
  out.mu = mu;
  if (p.variant == Variant::Classical) {
    out.lambda_plus = -(mu / 2 + s / mu);
    out.lambda_minus = out.lambda_plus;
    out.discriminant = speed_radicand(mu, p);
    return out;
  }
  const double r = speed_radicand(mu, p);
  out.discriminant = r;
  if (r < 0.0) throw NonRealSpeed(mu, r);
  const double root = std::sqrt(r);
  const double rest = s - p.c_prime - p.c + mu * mu / 2;
  out.lambda_plus = -(rest + root) / (2 * mu);
  out.lambda_minus = -(rest - root) / (2 * mu);
  return out;
}

SpeedEval speed_function_eigensolve(double mu, const ModelParams& p) {
  require_negative(mu);
  const Matrix2 b = base_matrix(mu, p);
  Eigen::Matrix2d m;
  m << b[0][0], b[0][1], b[1][0], b[1][1];
  const Eigen::EigenSolver<Eigen::Matrix2d> solver(m, false);
  const auto ev = solver.eigenvalues();
  const double tr = m.trace();
  SpeedEval out;
  out.mu = mu;
  out.discriminant = tr * tr - 4 * m.determinant();
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (std::abs(ev[0].imag()) > 1e-12 * scale || std::abs(ev[1].imag()) > 1e-12 * scale) {
    throw NonRealSpeed(mu, out.discriminant);
  }
  const double hi = std::max(ev[0].real(), ev[1].real());
  const double lo = std::min(ev[0].real(), ev[1].real());
  out.lambda_plus = -hi / mu;
  out.lambda_minus = p.variant == Variant::Classical ? out.lambda_plus : -lo / mu;
  return out;
}

double perron_root(double mu, const ModelParams& p) {
  const Matrix2 b = base_matrix(mu, p);
  const double mid = 0.5 * (b[0][0] + b[1][1]);
  const double half_gap = 0.5 * (b[0][0] - b[1][1]);
  return mid + std::sqrt(half_gap * half_gap + b[0][1] * b[1][0]);
}

double speed_derivative(double mu, const ModelParams& p) {
  require_negative(mu);
  const double s = effective_selection(p);
  if (p.variant == Variant::Classical) return -0.5 + s / (mu * mu);
  const Matrix2 b = base_matrix(mu, p);
  const double half_gap = 0.5 * (b[0][0] - b[1][1]);
  const double root = std::sqrt(half_gap * half_gap + p.c * p.c_prime);
  if (!(root > 0.0)) throw NonRealSpeed(mu, 4 * root * root);
  // the diffusive entry carries mu^2/2, so the gap moves by +-mu/2
  const double gap_slope = p.variant == Variant::Spore ? -0.5 * mu : 0.5 * mu;
  const double e = 0.5 * (b[0][0] + b[1][1]) + root;
  const double de = 0.5 * mu + half_gap * gap_slope / root;
  return -de / mu + e / (mu * mu);
}

Matrix2 eigen_matrix(double mu, double lambda, const ModelParams& p) {
  Matrix2 m = base_matrix(mu, p);
  m[0][0] += mu * lambda;
  m[1][1] += mu * lambda;
  return m;
}

double determinant_poly(double mu, double lambda, const ModelParams& p) {
  const Matrix2 m = eigen_matrix(mu, lambda, p);
  return m[0][0] * m[1][1] - m[0][1] * m[1][0];
}

PerronVector perron_eigenvector(double mu, const ModelParams& p) {
  require_negative(mu);
  if (p.variant == Variant::Classical) return {1.0, 0.0};
  const double r = speed_radicand(mu, p);
  if (r < 0.0) throw NonRealSpeed(mu, r);
  const double s = effective_selection(p);
  const double c = p.c;
  const double cp = p.c_prime;
  const double mu2 = mu * mu;
  if (cp > 0.0) {
    // second row of (B - e I) d = 0 with d2 = 1
    const double root4 = std::sqrt(4 * r) / 4;
    if (p.variant == Variant::SeedBank) {
      return {(s / 2 - cp / 2 - c / 2 + root4 + mu2 / 4) / cp + 1, 1.0};
    }
    return {(s / 2 - cp / 2 - c / 2 + root4 - mu2 / 4) / cp + 1, 1.0};
  }
  // c' = 0: the dormant class cannot feed back, use the first row instead
  const Matrix2 b = base_matrix(mu, p);
  const double e = perron_root(mu, p);
  const double gap = e - b[0][0];
  if (c > 0.0 && gap > 0.0) return {c / gap, 1.0};
  return {1.0, 0.0};
}

DiagonalEntries diagonal_entries(double mu, const ModelParams& p) {
  const double lambda = speed_function(mu, p).lambda_plus;
  const Matrix2 m = eigen_matrix(mu, lambda, p);
  return {m[0][0], m[1][1]};
}

CriticalSpeed critical_speed(const ModelParams& params, const CriticalOptions& options) {
  validate(params);
  if (!(options.mu_lo < options.mu_hi && options.mu_hi < 0.0) || options.scan_points < 3) {
    throw ConfigError("critical speed scan needs mu_lo < mu_hi < 0 and >= 3 points");
  }
  const auto speed_or_inf = [&](double mu) {
    try {
      return speed_function(mu, params).lambda_plus;
    } catch (const NonRealSpeed&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  // log-spaced scan from mu_lo towards mu_hi
  const std::size_t n = options.scan_points;
  const double log_lo = std::log(-options.mu_lo);
  const double log_hi = std::log(-options.mu_hi);
  std::vector<std::pair<double, double>> trace;
  trace.reserve(n);
  CriticalSpeed out;
  std::size_t best = n;
  for (std::size_t i = 0; i < n; ++i) {
    const double frac = static_cast<double>(i) / static_cast<double>(n - 1);
    const double mu = -std::exp(log_lo + frac * (log_hi - log_lo));
    const double value = speed_or_inf(mu);
    if (!std::isfinite(value)) ++out.excluded_points;
    trace.emplace_back(mu, std::isfinite(value) ? value : kNaN);
    if (std::isfinite(value) && (best == n || value < trace[best].second)) best = i;
  }
  if (best == n) throw SolverError("speed function is not real anywhere on the scan", trace);
  if (best == 0 || best == n - 1 || !std::isfinite(trace[best - 1].second) ||
      !std::isfinite(trace[best + 1].second)) {
    throw SolverError(
        fmt::format("minimum of the speed function not bracketed (scan minimum at mu={})",
                    trace[best].first),
        trace);
  }

  double a = trace[best - 1].first;
  double b = trace[best + 1].first;
  out.bracket_lo = a;
  out.bracket_hi = b;

  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  double f1 = speed_or_inf(x1);
  double f2 = speed_or_inf(x2);
  while (b - a > options.golden_width) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = speed_or_inf(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = speed_or_inf(x2);
    }
  }
  out.golden_mu = 0.5 * (a + b);

  // Values are flat at the minimum, so finish on the sign change of the derivative.
  double mu_star = out.golden_mu;
  try {
    double lo = out.bracket_lo;
    double hi = out.bracket_hi;
    if (speed_derivative(lo, params) < 0.0 && speed_derivative(hi, params) > 0.0) {
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (speed_derivative(mid, params) < 0.0) {
          lo = mid;
        } else {
          hi = mid;
        }
      }
      mu_star = 0.5 * (lo + hi);
    }
  } catch (const NonRealSpeed&) {
    mu_star = out.golden_mu;
  }

  out.mu_star = mu_star;
  out.lambda_star = speed_function(mu_star, params).lambda_plus;
  out.det_residual = std::abs(determinant_poly(mu_star, out.lambda_star, params));
  out.eigvec = perron_eigenvector(mu_star, params);
  return out;
}

std::string_view to_string(SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Selection:
      return "s";
    case SweepAxis::SwitchOut:
      return "c";
    case SweepAxis::SwitchIn:
      return "c_prime";
    case SweepAxis::SwitchBoth:
      return "c_equals_c_prime";
  }
  return "unknown";
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "s") return SweepAxis::Selection;
  if (name == "c") return SweepAxis::SwitchOut;
  if (name == "c_prime" || name == "cprime") return SweepAxis::SwitchIn;
  if (name == "c_equals_c_prime" || name == "c_both") return SweepAxis::SwitchBoth;
  throw DomainError(fmt::format("unknown sweep axis '{}'", name));
}

std::vector<SweepRow> sweep_critical(const ModelParams& base, SweepAxis axis,
                                     std::span<const double> grid) {
  constexpr std::array<Variant, 3> kColumns{Variant::Classical, Variant::SeedBank,
                                            Variant::Spore};
  std::vector<SweepRow> rows;
  rows.reserve(grid.size());
  for (const double value : grid) {
    SweepRow row;
    row.value = value;
    ModelParams moved = with_variant(base, Variant::SeedBank);
    if (axis == SweepAxis::Selection) {
      if (value > 0.0) moved = with_selection(moved, value);
    } else if (axis == SweepAxis::SwitchOut) {
      moved.c = value;
    } else if (axis == SweepAxis::SwitchIn) {
      moved.c_prime = value;
    } else {
      moved.c = value;
      moved.c_prime = value;
    }
    for (std::size_t col = 0; col < kColumns.size(); ++col) {
      try {
        if (!(value > 0.0)) throw DomainError(fmt::format("grid value {} is not positive", value));
        const CriticalSpeed cs = critical_speed(with_variant(moved, kColumns[col]));
        row.lambda_star[col] = cs.lambda_star;
        row.mu_star[col] = cs.mu_star;
      } catch (const std::exception& e) {
        row.lambda_star[col] = kNaN;
        row.mu_star[col] = kNaN;
        if (!row.error.empty()) row.error += "; ";
        row.error += fmt::format("{}: {}", to_string(kColumns[col]), e.what());
      }
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace dormancy
