#include "dormancy/particles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "dormancy/errors.hpp"
#include "dormancy/parallel.hpp"

namespace dormancy {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Pending {
  double position;
  double time;
  Flag flag;
};

void check_horizon(double T) {
  if (!(std::isfinite(T) && T >= 0.0)) throw ConfigError("time horizon must be finite and >= 0");
}

// Depth-first realisation. Particles evolve independently, so each lineage is
// run to T before its siblings. leaf(x, flag) sees every particle alive at T,
// snap(j, x, flag) every particle alive at snapshot time j.
template <class Leaf, class Snap>
std::uint64_t grow(const ModelParams& p, double T, std::span<const double> snaps, std::size_t cap,
                   RandomStream& rng, Leaf&& leaf, Snap&& snap) {
  const double kappa = p.kappa;
  const double c = p.variant == Variant::Classical ? 0.0 : p.c;
  const double cp = p.variant == Variant::Classical ? 0.0 : p.c_prime;
  const double active_rate = kappa + c;
  const bool single_increment = p.law.support() == 1;

  std::vector<Pending> stack;
  stack.push_back({0.0, 0.0, Flag::Active});
  std::size_t population = 1;
  std::uint64_t events = 0;

  while (!stack.empty()) {
    auto [x, t, flag] = stack.back();
    stack.pop_back();
    double t_pos = t;  // time up to which x is current
    for (;;) {
      const double rate = flag == Flag::Active ? active_rate : cp;
      const double t_next = rate > 0.0 ? t + rng.exponential(rate) : kInf;
      const bool ends = t_next >= T;
      const bool mobile = is_mobile(p.variant, flag);
      auto advance = [&](double to) {
        if (mobile && to > t_pos) x += std::sqrt(to - t_pos) * rng.normal();
        t_pos = to;
      };

      if (!snaps.empty()) {
        auto it = std::lower_bound(snaps.begin(), snaps.end(), t);
        for (; it != snaps.end(); ++it) {
          const double s = *it;
          if (!(s < t_next || (ends && s <= T))) break;
          advance(s);
          snap(static_cast<std::size_t>(it - snaps.begin()), x, flag);
        }
      }

      if (ends) {
        advance(T);
        leaf(x, flag);
        break;
      }
      advance(t_next);
      t = t_next;
      ++events;

      if (flag == Flag::Active) {
        if (c == 0.0 || rng.uniform() * active_rate < kappa) {
          const std::size_t k = single_increment ? 1 : p.law.sample_increment(rng.uniform());
          population += k;
          if (population > cap) throw PopulationOverflow(cap, t);
          for (std::size_t j = 0; j < k; ++j) stack.push_back({x, t, Flag::Active});
        } else {
          flag = Flag::Dormant;
        }
      } else {
        flag = Flag::Active;
      }
    }
  }
  return events;
}

double mean_of(const std::vector<double>& v, std::size_t* n_out = nullptr) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : v)
    if (!std::isnan(x)) {
      sum += x;
      ++n;
    }
  if (n_out) *n_out = n;
  return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
}

double std_error_of(const std::vector<double>& v, double mean) {
  double ss = 0.0;
  std::size_t n = 0;
  for (double x : v)
    if (!std::isnan(x)) {
      ss += (x - mean) * (x - mean);
      ++n;
    }
  if (n < 2) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

void check_replicates(const ReplicateOptions& o) {
  if (o.replicates < 30) throw ConfigError("at least 30 replicates are required");
  if (o.cap < 1) throw ConfigError("particle cap must be positive");
}

// Runs fn(r) -> value for each replicate, NaN on overflow.
template <class Fn>
std::vector<double> run_replicates(const ReplicateOptions& o, Fn&& fn, std::size_t& overflows) {
  std::vector<double> out(o.replicates, std::numeric_limits<double>::quiet_NaN());
  parallel_for(o.replicates, o.threads, [&](std::size_t r) {
    try {
      out[r] = fn(r);
    } catch (const PopulationOverflow&) {
    }
  });
  overflows = static_cast<std::size_t>(std::count_if(out.begin(), out.end(), [](double v) { return std::isnan(v); }));
  if (overflows * 10 > o.replicates)
    throw ReplicateFailure(fmt::format("{} of {} replicates exceeded the particle cap {}", overflows, o.replicates, o.cap));
  return out;
}

}  // namespace

std::size_t Population::active_count() const noexcept {
  return static_cast<std::size_t>(std::count_if(particles.begin(), particles.end(),
                                                [](const Particle& q) { return q.flag == Flag::Active; }));
}

bool is_mobile(Variant variant, Flag flag) noexcept {
  return variant == Variant::Spore ? flag == Flag::Dormant : flag == Flag::Active;
}

SimulationResult simulate(const ModelParams& params, double T, RandomStream& rng,
                          const SimulationOptions& options) {
  validate(params);
  check_horizon(T);
  const auto& snaps = options.snapshot_times;
  if (!std::is_sorted(snaps.begin(), snaps.end())) throw ConfigError("snapshot times must be sorted");
  if (!snaps.empty() && (snaps.front() < 0.0 || snaps.back() > T))
    throw ConfigError("snapshot times must lie in [0, T]");

  SimulationResult result;
  result.final.t = T;
  result.snapshots.resize(snaps.size());
  for (std::size_t j = 0; j < snaps.size(); ++j) result.snapshots[j].t = snaps[j];

  // Event counts per snapshot are not tracked by the depth-first walk.
  result.final.event_count = grow(
      params, T, snaps, options.cap, rng,
      [&](double x, Flag f) { result.final.particles.push_back({x, f}); },
      [&](std::size_t j, double x, Flag f) { result.snapshots[j].particles.push_back({x, f}); });
  return result;
}

double rightmost(const Population& pop) {
  if (pop.particles.empty()) throw DomainError("rightmost of an empty population");
  double best = -kInf;
  for (const auto& q : pop.particles) best = std::max(best, q.position);
  return best;
}

double mean_growth_rate(const ModelParams& params) {
  validate(params);
  const double s = effective_selection(params);
  if (params.variant == Variant::Classical) return s;
  const double a = s - params.c;
  const double d = -params.c_prime;
  const double half = 0.5 * (a - d);
  return 0.5 * (a + d) + std::sqrt(half * half + params.c * params.c_prime);
}

double sample_rightmost(const ModelParams& params, double T, std::uint64_t seed,
                        std::uint64_t index, std::size_t cap) {
  RandomStream rng(seed, index);
  double best = -kInf;
  grow(params, T, {}, cap, rng, [&](double x, Flag) { best = std::max(best, x); },
       [](std::size_t, double, Flag) {});
  return best;
}

RightmostStat rightmost_speed(const ModelParams& params, double T, const ReplicateOptions& options) {
  validate(params);
  check_horizon(T);
  if (T <= 0.0) throw ConfigError("time horizon must be positive");
  check_replicates(options);

  RightmostStat stat;
  stat.T = T;
  stat.samples = run_replicates(
      options, [&](std::size_t r) { return sample_rightmost(params, T, options.seed, r, options.cap); },
      stat.overflows);
  std::vector<double> speeds(stat.samples.size());
  std::transform(stat.samples.begin(), stat.samples.end(), speeds.begin(), [T](double r) { return r / T; });
  stat.mean_speed = mean_of(speeds);
  stat.std_error = std_error_of(speeds, stat.mean_speed);
  return stat;
}

std::vector<CdfPoint> empirical_rightmost_cdf(const ModelParams& params, double t,
                                              std::span<const double> probes,
                                              const ReplicateOptions& options) {
  validate(params);
  check_horizon(t);
  check_replicates(options);
  std::size_t overflows = 0;
  const auto samples = run_replicates(
      options, [&](std::size_t r) { return sample_rightmost(params, t, options.seed, r, options.cap); },
      overflows);
  std::size_t n = 0;
  mean_of(samples, &n);

  std::vector<CdfPoint> out;
  out.reserve(probes.size());
  for (double x : probes) {
    const auto hits = std::count_if(samples.begin(), samples.end(),
                                    [x](double r) { return !std::isnan(r) && r <= x; });
    const double p = static_cast<double>(hits) / static_cast<double>(n);
    out.push_back({x, p, std::sqrt(p * (1.0 - p) / static_cast<double>(n))});
  }
  return out;
}

double additive_martingale(const Population& pop, double mu, double lambda, PerronVector d) {
  double sum = 0.0;
  for (const auto& q : pop.particles) {
    const double w = q.flag == Flag::Active ? d.d1 : d.d2;
    sum += w * std::exp(mu * (q.position + lambda * pop.t));
  }
  return sum;
}

PathSample onoff_path(const ModelParams& params, double t, double x, RandomStream& rng) {
  const bool classical = params.variant == Variant::Classical;
  const double c = classical ? 0.0 : params.c;
  const double cp = classical ? 0.0 : params.c_prime;
  PathSample path{x, 0.0, Flag::Active};
  double now = 0.0;
  while (now < t) {
    const double rate = path.flag == Flag::Active ? c : cp;
    const double next = rate > 0.0 ? now + rng.exponential(rate) : kInf;
    const double stop = std::min(next, t);
    const double span = stop - now;
    if (is_mobile(params.variant, path.flag)) path.position += std::sqrt(span) * rng.normal();
    if (path.flag == Flag::Active) path.active_time += span;
    now = stop;
    if (next < t) path.flag = path.flag == Flag::Active ? Flag::Dormant : Flag::Active;
  }
  return path;
}

Estimate onoff_bm_feynman_kac(const ModelParams& params, double lambda, double t, double x,
                              const std::function<double(double)>& terminal_f,
                              const std::function<double(double)>& terminal_g,
                              std::size_t replicates, std::uint64_t seed, unsigned threads) {
  validate(params);
  check_horizon(t);
  if (replicates < 2) throw ConfigError("at least 2 replicates are required");
  if (t == 0.0) return {terminal_f(x), 0.0};
  const double s = effective_selection(params);
  std::vector<double> values(replicates);
  parallel_for(replicates, threads, [&](std::size_t r) {
    RandomStream rng(seed, r);
    const PathSample path = onoff_path(params, t, x, rng);
    const double y = path.position + lambda * t;
    const double h = path.flag == Flag::Active ? terminal_f(y) : terminal_g(y);
    values[r] = std::exp(s * path.active_time) * h;
  });
  Estimate e;
  e.value = mean_of(values);
  e.std_error = std_error_of(values, e.value);
  return e;
}

}  // namespace dormancy
