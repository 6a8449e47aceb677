#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "dormancy/model.hpp"

namespace dormancy {

/// Both branches of the speed function at one decay rate.
struct SpeedEval {
  double mu = 0.0;
  double lambda_plus = 0.0;
  double lambda_minus = 0.0;
  double discriminant = 0.0;  ///< radicand under the square root
};

/// Positive eigenvector, normalised so that d2 = 1 (d2 = 0 for Classical).
struct PerronVector {
  double d1 = 1.0;
  double d2 = 1.0;
};

using Matrix2 = std::array<std::array<double, 2>, 2>;

struct DiagonalEntries {
  double active = 0.0;   ///< F_a, top-left
  double dormant = 0.0;  ///< F_d, bottom-right
};

struct CriticalSpeed {
  double mu_star = 0.0;
  double lambda_star = 0.0;
  double det_residual = 0.0;
  PerronVector eigvec;
  double bracket_lo = 0.0;  ///< scan bracket handed to the refinement
  double bracket_hi = 0.0;
  double golden_mu = 0.0;   ///< golden-section estimate before the derivative polish
  std::size_t excluded_points = 0;  ///< scan points with a negative radicand
};

struct CriticalOptions {
  double mu_lo = -64.0;
  double mu_hi = -1e-3;
  std::size_t scan_points = 256;
  double golden_width = 1e-10;
};

/// Radicand of the closed-form speed function (variant specific).
double speed_radicand(double mu, const ModelParams& params);

/// Closed-form speed branches. Requires mu < 0; throws NonRealSpeed for a
/// negative radicand. Classical returns -(mu/2 + s/mu) in both branches.
SpeedEval speed_function(double mu, const ModelParams& params);

/// Same quantity from a numerical eigen-decomposition of mu^2/2 A + Q + R.
SpeedEval speed_function_eigensolve(double mu, const ModelParams& params);

/// d lambda_plus / d mu, analytic.
double speed_derivative(double mu, const ModelParams& params);

/// Largest eigenvalue of mu^2/2 A + Q + R; equals -mu * lambda_plus(mu) for mu < 0.
double perron_root(double mu, const ModelParams& params);

/// mu^2/2 A + Q + R + mu*lambda I.
Matrix2 eigen_matrix(double mu, double lambda, const ModelParams& params);

/// det(eigen_matrix(mu, lambda)).
double determinant_poly(double mu, double lambda, const ModelParams& params);

PerronVector perron_eigenvector(double mu, const ModelParams& params);

/// Diagonal of eigen_matrix(mu, lambda_plus(mu)); both entries are negative
/// whenever c, c' > 0.
DiagonalEntries diagonal_entries(double mu, const ModelParams& params);

/// Global minimiser of mu -> lambda_plus(mu) on the negative half axis.
CriticalSpeed critical_speed(const ModelParams& params, const CriticalOptions& options = {});

enum class SweepAxis { Selection, SwitchOut, SwitchIn, SwitchBoth };

std::string_view to_string(SweepAxis axis);
SweepAxis parse_sweep_axis(std::string_view name);

/// Columns ordered Classical, SeedBank, Spore.
struct SweepRow {
  double value = 0.0;
  std::array<double, 3> lambda_star{};
  std::array<double, 3> mu_star{};
  std::string error;  ///< empty unless some column failed (that column is NaN)
};

/// Critical speeds of all three variants while one parameter of `base` moves
/// along `grid`. Per-row failures are recorded, the sweep continues.
std::vector<SweepRow> sweep_critical(const ModelParams& base, SweepAxis axis,
                                     std::span<const double> grid);

}  // namespace dormancy
