#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dormancy/model.hpp"
#include "dormancy/wavespeed.hpp"

namespace dormancy {

/// How a metric value is judged against its reference.
enum class Relation {
  AbsDiff,  ///< |value - reference| <= tolerance
  RelDiff,  ///< |value - reference| <= tolerance * |reference|
  AtMost,   ///< value <= reference + tolerance
  Greater,  ///< value > reference + tolerance
  Less,     ///< value < reference - tolerance
};

std::string_view to_string(Relation r);

struct Metric {
  std::string label;
  double value = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  Relation relation = Relation::AbsDiff;
  std::string provenance;  ///< where the reference comes from
  bool pass = false;
};

/// Evaluates the relation (NaN values never pass).
Metric make_metric(std::string label, double value, double reference, double tolerance,
                   Relation relation, std::string provenance);

struct ExperimentReport {
  std::string name;
  std::string params;
  std::vector<Metric> metrics;
  std::vector<std::string> artifacts;
  std::vector<std::string> notes;

  bool passed() const noexcept;
  void add(Metric m) { metrics.push_back(std::move(m)); }
  /// Appends every metric, artifact and note of `other`, prefixing labels.
  void merge(const ExperimentReport& other, std::string_view prefix);
};

void render(std::ostream& out, const ExperimentReport& report);

struct ExperimentContext {
  std::filesystem::path out_dir;  ///< empty: no artifacts
  bool quick = false;             ///< replicates / 4, stochastic tolerances x 2
  std::uint64_t seed = 1;
  unsigned threads = 0;

  std::size_t replicates(std::size_t full) const noexcept;
  /// Tolerance of a Monte Carlo metric.
  double mc_tol(double full) const noexcept { return quick ? 2.0 * full : full; }
  /// Path for an artifact, or empty when artifacts are disabled.
  std::filesystem::path artifact(std::string_view experiment, std::string_view file) const;
};

// Parameterised experiments. Each is a pure function of its arguments and ctx.seed.

/// Pointwise ordering of the three speed functions on a grid and the critical values.
ExperimentReport exp_ordering(const ExperimentContext& ctx, std::size_t grid_points = 200,
                              double mu_lo = -3.0, double mu_hi = -0.1);

/// Perron vector positivity, eigen residuals, determinant roots and diagonal signs
/// over random parameter sets.
ExperimentReport exp_eigenstructure(const ExperimentContext& ctx, std::size_t sets = 50,
                                    std::size_t mus_per_set = 20);

enum class SweepScenario { VaryS, VaryC, VaryCPrime, VaryCBoth };
std::string_view to_string(SweepScenario s);
SweepScenario parse_sweep_scenario(std::string_view name);
/// Default grid of a scenario.
std::vector<double> default_sweep_grid(SweepScenario s);

/// Critical speeds of the three variants along one axis, with the exact
/// identities that hold on that axis.
ExperimentReport exp_figure_sweeps(SweepScenario scenario, std::span<const double> grid,
                                   const ExperimentContext& ctx, ModelParams base = unit_params(Variant::SeedBank));

/// Nearly-dormant regime: sign of lambda* around the threshold and monotonicity in c'.
ExperimentReport exp_phase_transition(const ExperimentContext& ctx);

struct FrontSpeedConfig {
  double x_min = -60.0;
  double x_max = 140.0;
  double dx = 0.1;
  double T = 40.0;
  double fit_lo = 20.0;
  double fit_hi = 40.0;
  double level = 0.5;
  double tolerance = 0.05;  ///< relative
};

/// Heaviside front speed against lambda* for one variant.
ExperimentReport exp_front_speed(const ModelParams& params, const ExperimentContext& ctx,
                                 const FrontSpeedConfig& config = {});

struct SupercriticalConfig {
  double x_min = -40.0;
  double x_max = 260.0;
  double dx = 0.1;
  double profile_lo = -20.0;  ///< co-moving window for the shape check
  double profile_hi = 40.0;
  double tail_offset_lo = 6.0;   ///< tail window relative to the front
  double tail_offset_hi = 14.0;
};

/// Exponential initial data with decay mu in (mu*, 0): speed, tail decay and
/// co-moving shape, plus a Heaviside control run.
ExperimentReport exp_supercritical_wave(double mu, const ModelParams& params, double T,
                                        const ExperimentContext& ctx,
                                        const SupercriticalConfig& config = {});

/// PDE solution from Heaviside data against the empirical law of the rightmost particle.
ExperimentReport exp_duality(const ModelParams& params, double t, std::size_t replicates,
                             std::span<const double> probes, const ExperimentContext& ctx);

/// Additive martingale: constant mean for mu in (mu*, 0), vanishing median below mu*.
ExperimentReport exp_martingale(const ModelParams& params, double mu_super,
                                std::span<const double> times, double mu_sub, double t_sub,
                                std::size_t replicates, const ExperimentContext& ctx);

/// Mean R_T / T for the three variants and the ordering of the two dormancy variants.
ExperimentReport exp_rightmost(double T, std::size_t replicates, const ExperimentContext& ctx);

/// Gaussian-bump terminal data used by the Feynman-Kac comparison.
double fk_terminal_f(double y);
double fk_terminal_g(double y);

/// Single-path on/off Feynman-Kac estimate against the linear drifted system.
ExperimentReport exp_feynman_kac(const ModelParams& params, double mu, double t,
                                 std::span<const double> probes, std::size_t paths,
                                 const ExperimentContext& ctx);

struct ExperimentEntry {
  std::string name;
  std::string description;
  std::function<ExperimentReport(const ExperimentContext&)> run;
};

/// Named experiments with their default settings.
const std::vector<ExperimentEntry>& catalog();
const ExperimentEntry* find_experiment(std::string_view name);

}  // namespace dormancy
