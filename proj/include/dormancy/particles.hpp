#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "dormancy/model.hpp"
#include "dormancy/random.hpp"
#include "dormancy/wavespeed.hpp"

namespace dormancy {

enum class Flag : std::uint8_t { Active, Dormant };

struct Particle {
  double position = 0.0;
  Flag flag = Flag::Active;
};

/// Particles alive at time t. Active and dormant particles share one array.
struct Population {
  std::vector<Particle> particles;
  double t = 0.0;
  std::uint64_t event_count = 0;  ///< branching and switching events before t

  std::size_t active_count() const noexcept;
  std::size_t dormant_count() const noexcept { return particles.size() - active_count(); }
};

struct SimulationOptions {
  std::size_t cap = 2'000'000;         ///< maximum number of particles
  std::vector<double> snapshot_times;  ///< sorted, within [0, T]
};

struct SimulationResult {
  Population final;
  std::vector<Population> snapshots;  ///< one per snapshot time
};

/// True when a particle with this flag moves under params.variant.
bool is_mobile(Variant variant, Flag flag) noexcept;

/// Exact realisation of on/off branching Brownian motion up to time T from a
/// single active particle at 0. Classical uses the seed-bank rules with c = 0.
SimulationResult simulate(const ModelParams& params, double T, RandomStream& rng,
                          const SimulationOptions& options = {});

double rightmost(const Population& pop);

/// Perron root of the mean-count generator, the exponential growth rate of E[N_t].
double mean_growth_rate(const ModelParams& params);

struct ReplicateOptions {
  std::uint64_t seed = 1;
  std::size_t replicates = 200;
  std::size_t cap = 2'000'000;
  unsigned threads = 0;  ///< 0 = hardware concurrency
};

struct RightmostStat {
  double T = 0.0;
  std::vector<double> samples;  ///< R_T per replicate, NaN for overflowed ones
  std::size_t overflows = 0;
  double mean_speed = 0.0;  ///< mean of R_T / T over completed replicates
  double std_error = 0.0;
};

/// R_T for replicate `index`, streamed without storing the population.
/// Throws PopulationOverflow.
double sample_rightmost(const ModelParams& params, double T, std::uint64_t seed,
                        std::uint64_t index, std::size_t cap);

/// Mean R_T / T over independent replicates. Replicate r draws from stream r
/// of the seed. Throws ReplicateFailure when more than 10% overflow.
RightmostStat rightmost_speed(const ModelParams& params, double T, const ReplicateOptions& options);

struct CdfPoint {
  double x = 0.0;
  double p_hat = 0.0;
  double std_error = 0.0;
};

/// Monte Carlo estimate of P(R_t <= x) at each probe.
std::vector<CdfPoint> empirical_rightmost_cdf(const ModelParams& params, double t,
                                              std::span<const double> probes,
                                              const ReplicateOptions& options);

/// sum_active d1 e^{mu(x + lambda t)} + sum_dormant d2 e^{mu(x + lambda t)}.
double additive_martingale(const Population& pop, double mu, double lambda, PerronVector d);

/// One non-branching on/off Brownian path started active at x.
struct PathSample {
  double position = 0.0;
  double active_time = 0.0;
  Flag flag = Flag::Active;
};

PathSample onoff_path(const ModelParams& params, double t, double x, RandomStream& rng);

struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// E[exp(s * active time) (f(B_t + lambda t) 1{active} + g(B_t + lambda t) 1{dormant})]
/// over single on/off paths started active at x.
Estimate onoff_bm_feynman_kac(const ModelParams& params, double lambda, double t, double x,
                              const std::function<double(double)>& terminal_f,
                              const std::function<double(double)>& terminal_g,
                              std::size_t replicates, std::uint64_t seed, unsigned threads = 1);

}  // namespace dormancy
