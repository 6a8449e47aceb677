#include "dormancy/harness.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "dormancy/csv.hpp"
#include "dormancy/errors.hpp"
#include "dormancy/parallel.hpp"
#include "dormancy/particles.hpp"
#include "dormancy/pde.hpp"
#include "dormancy/random.hpp"

namespace dormancy {

namespace {

constexpr std::array<Variant, 3> kVariants{Variant::Classical, Variant::SeedBank, Variant::Spore};

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double f = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
    g[i] = lo * std::pow(hi / lo, f);
  }
  return g;
}

std::string vname(Variant v) { return std::string(to_string(v)); }

CsvHeader header_for(const std::string& config, std::optional<std::uint64_t> seed = std::nullopt) {
  return CsvHeader{config, seed};
}

double quantile_median(std::vector<double> v) {
  std::erase_if(v, [](double x) { return std::isnan(x); });
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
  std::nth_element(v.begin(), mid, v.end());
  if (v.size() % 2 == 1) return *mid;
  return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

}  // namespace

std::string_view to_string(Relation r) {
  switch (r) {
    case Relation::AbsDiff: return "abs";
    case Relation::RelDiff: return "rel";
    case Relation::AtMost: return "<=";
    case Relation::Greater: return ">";
    case Relation::Less: return "<";
  }
  return "?";
}

Metric make_metric(std::string label, double value, double reference, double tolerance,
                   Relation relation, std::string provenance) {
  Metric m{std::move(label), value, reference, tolerance, relation, std::move(provenance), false};
  switch (relation) {
    case Relation::AbsDiff: m.pass = std::abs(value - reference) <= tolerance; break;
    case Relation::RelDiff: m.pass = std::abs(value - reference) <= tolerance * std::abs(reference); break;
    case Relation::AtMost: m.pass = value <= reference + tolerance; break;
    case Relation::Greater: m.pass = value > reference + tolerance; break;
    case Relation::Less: m.pass = value < reference - tolerance; break;
  }
  if (std::isnan(value)) m.pass = false;
  return m;
}

bool ExperimentReport::passed() const noexcept {
  return std::all_of(metrics.begin(), metrics.end(), [](const Metric& m) { return m.pass; });
}

void ExperimentReport::merge(const ExperimentReport& other, std::string_view prefix) {
  for (auto m : other.metrics) {
    m.label = fmt::format("{}: {}", prefix, m.label);
    metrics.push_back(std::move(m));
  }
  artifacts.insert(artifacts.end(), other.artifacts.begin(), other.artifacts.end());
  for (const auto& n : other.notes) notes.push_back(fmt::format("{}: {}", prefix, n));
}

void render(std::ostream& out, const ExperimentReport& report) {
  out << "experiment: " << report.name << '\n';
  if (!report.params.empty()) out << "params: " << report.params << '\n';
  for (const auto& m : report.metrics) {
    out << fmt::format("  [{}] {} = {} (ref {}, {} tol {}) [{}]\n", m.pass ? "PASS" : "FAIL", m.label,
                       format_number(m.value), format_number(m.reference), to_string(m.relation),
                       format_number(m.tolerance), m.provenance);
  }
  for (const auto& a : report.artifacts) out << "  artifact: " << a << '\n';
  for (const auto& n : report.notes) out << "  note: " << n << '\n';
  out << "result: " << (report.passed() ? "PASS" : "FAIL") << '\n';
}

std::size_t ExperimentContext::replicates(std::size_t full) const noexcept {
  return quick ? std::max<std::size_t>(30, full / 4) : full;
}

std::filesystem::path ExperimentContext::artifact(std::string_view experiment,
                                                  std::string_view file) const {
  if (out_dir.empty()) return {};
  return out_dir / std::string(experiment) / std::string(file);
}

// ---------------------------------------------------------------------------

ExperimentReport exp_ordering(const ExperimentContext& ctx, std::size_t grid_points, double mu_lo,
                              double mu_hi) {
  if (grid_points < 2 || !(mu_lo < mu_hi && mu_hi < 0.0)) throw ConfigError("invalid ordering grid");
  ExperimentReport rep;
  rep.name = "ordering";
  rep.params = "c=1 c_prime=1 kappa=1 offspring=1";

  const ModelParams spore = unit_params(Variant::Spore);
  const ModelParams seed = unit_params(Variant::SeedBank);
  const ModelParams classical = unit_params(Variant::Classical);

  std::vector<std::array<double, 4>> rows;
  double violation = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < grid_points; ++i) {
    const double mu = mu_lo + (mu_hi - mu_lo) * static_cast<double>(i) / static_cast<double>(grid_points - 1);
    const double ls = speed_function(mu, spore).lambda_plus;
    const double lb = speed_function(mu, seed).lambda_plus;
    const double lc = speed_function(mu, classical).lambda_plus;
    violation = std::max({violation, ls - lb, lb - lc});
    rows.push_back({mu, ls, lb, lc});
  }
  rep.add(make_metric("max ordering violation spore<=seedbank<=classical", violation, 0.0, 1e-12,
                      Relation::AtMost, "ordering of speed functions"));

  const auto cb = critical_speed(seed);
  const auto cs = critical_speed(spore);
  const auto cc = critical_speed(classical);
  rep.add(make_metric("lambda* seedbank", cb.lambda_star, 0.982416, 1e-3, Relation::AbsDiff, "closed form"));
  rep.add(make_metric("mu* seedbank", cb.mu_star, -1.19103, 1e-3, Relation::AbsDiff, "closed form"));
  rep.add(make_metric("lambda* spore", cs.lambda_star, std::numbers::sqrt2 / 2.0, 1e-8, Relation::AbsDiff,
                      "closed form"));
  rep.add(make_metric("mu* spore", cs.mu_star, -std::numbers::sqrt2, 1e-6, Relation::AbsDiff, "closed form"));
  rep.add(make_metric("lambda* classical", cc.lambda_star, std::numbers::sqrt2, 1e-10, Relation::AbsDiff,
                      "closed form"));
  const double historical = std::sqrt(std::sqrt(5.0) - 1.0);
  rep.add(make_metric("lambda* seedbank below earlier upper bound sqrt(sqrt5-1)", cb.lambda_star, historical,
                      0.0, Relation::Less, "earlier upper bound"));
  rep.notes.push_back(fmt::format("reference line sqrt(sqrt(5)-1) = {}", format_number(historical)));

  if (auto path = ctx.artifact(rep.name, "ordering.csv"); !path.empty()) {
    OutputFile file(path);
    CsvWriter csv(file.stream(), header_for(rep.params), {"mu", "lambda_spore", "lambda_seedbank", "lambda_classical"});
    for (const auto& r : rows) csv.row(std::span<const double>(r));
    rep.artifacts.push_back(path.string());
  }
  return rep;
}

ExperimentReport exp_eigenstructure(const ExperimentContext& ctx, std::size_t sets, std::size_t mus_per_set) {
  ExperimentReport rep;
  rep.name = "eigenstructure";
  rep.params = fmt::format("sets={} mus_per_set={} c,c_prime,s~U[0.2,5] mu~U[-4,-0.05] seed={}", sets,
                           mus_per_set, ctx.seed);
  RandomStream rng(ctx.seed, 0);
  double min_component = std::numeric_limits<double>::infinity();
  double max_residual = 0.0;
  double max_det = 0.0;
  double max_diag = -std::numeric_limits<double>::infinity();
  std::size_t evaluated = 0;

  for (std::size_t k = 0; k < sets; ++k) {
    const double c = 0.2 + 4.8 * rng.uniform();
    const double cp = 0.2 + 4.8 * rng.uniform();
    const double s = 0.2 + 4.8 * rng.uniform();
    for (Variant v : {Variant::SeedBank, Variant::Spore}) {
      const ModelParams p = with_selection(make_params(v, c, cp, 1.0), s);
      std::size_t taken = 0;
      for (std::size_t attempt = 0; taken < mus_per_set && attempt < 100 * mus_per_set; ++attempt) {
        const double mu = -(0.05 + 3.95 * rng.uniform());
        if (speed_radicand(mu, p) < 0.0) continue;
        ++taken;
        const SpeedEval ev = speed_function(mu, p);
        const PerronVector d = perron_eigenvector(mu, p);
        const Matrix2 m = eigen_matrix(mu, ev.lambda_plus, p);
        const double r0 = m[0][0] * d.d1 + m[0][1] * d.d2;
        const double r1 = m[1][0] * d.d1 + m[1][1] * d.d2;
        min_component = std::min({min_component, d.d1, d.d2});
        max_residual = std::max({max_residual, std::abs(r0), std::abs(r1)});
        max_det = std::max({max_det, std::abs(determinant_poly(mu, ev.lambda_plus, p)),
                            std::abs(determinant_poly(mu, ev.lambda_minus, p))});
        ++evaluated;
      }
      const CriticalSpeed cs = critical_speed(p);
      const DiagonalEntries diag = diagonal_entries(cs.mu_star, p);
      max_diag = std::max({max_diag, diag.active, diag.dormant});
    }
  }
  rep.add(make_metric("min Perron vector component", min_component, 0.0, 0.0, Relation::Greater,
                      "positivity of the Perron vector"));
  rep.add(make_metric("max eigen residual", max_residual, 0.0, 1e-9, Relation::AtMost, "eigen equation"));
  rep.add(make_metric("max |det| at lambda+-", max_det, 0.0, 1e-9, Relation::AtMost, "characteristic polynomial"));
  rep.add(make_metric("max diagonal entry at mu*", max_diag, 0.0, 0.0, Relation::Less, "sign of the B diagonal"));
  rep.notes.push_back(fmt::format("{} (parameter set, mu) evaluations", evaluated));
  return rep;
}

std::string_view to_string(SweepScenario s) {
  switch (s) {
    case SweepScenario::VaryS: return "vary_s";
    case SweepScenario::VaryC: return "vary_c";
    case SweepScenario::VaryCPrime: return "vary_cprime";
    case SweepScenario::VaryCBoth: return "vary_c_both";
  }
  return "?";
}

SweepScenario parse_sweep_scenario(std::string_view name) {
  for (auto s : {SweepScenario::VaryS, SweepScenario::VaryC, SweepScenario::VaryCPrime, SweepScenario::VaryCBoth})
    if (name == to_string(s)) return s;
  throw ConfigError(fmt::format("unknown sweep scenario '{}'", name));
}

std::vector<double> default_sweep_grid(SweepScenario s) {
  if (s == SweepScenario::VaryS) return log_grid(0.25, 8.0, 10);
  return log_grid(1e-2, 1e2, 21);
}

ExperimentReport exp_figure_sweeps(SweepScenario scenario, std::span<const double> grid,
                                   const ExperimentContext& ctx, ModelParams base) {
  if (grid.empty()) throw ConfigError("empty sweep grid");
  for (double g : grid)
    if (!(g > 0.0)) throw ConfigError("sweep grid values must be positive");
  if (base.variant == Variant::Classical) base = with_variant(base, Variant::SeedBank);

  ExperimentReport rep;
  rep.name = std::string(to_string(scenario));
  rep.params = describe(base);
  const SweepAxis axis = scenario == SweepScenario::VaryS       ? SweepAxis::Selection
                         : scenario == SweepScenario::VaryC     ? SweepAxis::SwitchOut
                         : scenario == SweepScenario::VaryCPrime ? SweepAxis::SwitchIn
                                                                 : SweepAxis::SwitchBoth;
  const auto rows = sweep_critical(base, axis, grid);
  const double s0 = effective_selection(base);

  std::size_t failures = 0;
  double violation = -std::numeric_limits<double>::infinity();
  double classical_gap = 0.0;
  double spore_gap = 0.0;
  for (const auto& r : rows) {
    if (!r.error.empty()) {
      ++failures;
      rep.notes.push_back(fmt::format("value {}: {}", format_number(r.value), r.error));
      continue;
    }
    const double s = axis == SweepAxis::Selection ? r.value : s0;
    const double c = axis == SweepAxis::SwitchOut || axis == SweepAxis::SwitchBoth ? r.value : base.c;
    const double cp = axis == SweepAxis::SwitchIn || axis == SweepAxis::SwitchBoth ? r.value : base.c_prime;
    const double target = std::sqrt(2.0 * s);
    classical_gap = std::max(classical_gap, std::abs(r.lambda_star[0] - target));
    if (c == cp) spore_gap = std::max(spore_gap, std::abs(2.0 * r.lambda_star[2] - target));
    // The two dormancy variants swap order where s - c + c' changes sign.
    const double dormancy_gap = s - c + cp >= 0.0 ? r.lambda_star[2] - r.lambda_star[1]
                                                  : r.lambda_star[1] - r.lambda_star[2];
    violation = std::max({violation, dormancy_gap, r.lambda_star[1] - r.lambda_star[0],
                          r.lambda_star[2] - r.lambda_star[0]});
  }
  rep.add(make_metric("failed rows", static_cast<double>(failures), 0.0, 0.0, Relation::AtMost, "solver"));
  rep.add(make_metric("max ordering violation", violation, 0.0, 1e-9, Relation::AtMost,
                      "ordering of critical speeds"));
  rep.add(make_metric("max |lambda*classical - sqrt(2s)|", classical_gap, 0.0, 1e-8, Relation::AtMost,
                      "exact identity"));
  if (base.c == base.c_prime || axis == SweepAxis::SwitchBoth)
    rep.add(make_metric("max |2 lambda*spore - sqrt(2s)| where c = c'", spore_gap, 0.0, 1e-8, Relation::AtMost,
                        "exact identity"));

  if (auto path = ctx.artifact("sweeps", fmt::format("{}.csv", rep.name)); !path.empty()) {
    OutputFile file(path);
    write_sweep(file.stream(), header_for(rep.params), axis, rows);
    rep.artifacts.push_back(path.string());
  }
  return rep;
}

ExperimentReport exp_phase_transition(const ExperimentContext& ctx) {
  ExperimentReport rep;
  rep.name = "phase_transition";
  rep.params = "variant=seedbank c=1 offspring=1";
  auto lambda_at = [](double s, double cp) {
    return critical_speed(with_selection(make_params(Variant::SeedBank, 1.0, cp, 1.0), s)).lambda_star;
  };
  rep.add(make_metric("lambda* at s=3/2, c_prime=1e-4", lambda_at(1.5, 1e-4), 0.05, 0.0, Relation::Greater,
                      "closed form threshold"));
  rep.add(make_metric("lambda* at s=1/2, c_prime=1e-4", lambda_at(0.5, 1e-4), 0.05, 0.0, Relation::Less,
                      "closed form threshold"));
  const std::array<double, 3> cps{1e-4, 1e-2, 1.0};
  double min_step = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < cps.size(); ++i)
    min_step = std::min(min_step, lambda_at(1.5, cps[i]) - lambda_at(1.5, cps[i - 1]));
  rep.add(make_metric("min increment of lambda* over c_prime in {1e-4,1e-2,1}, s=3/2", min_step, 0.0, 0.0,
                      Relation::Greater, "monotone trend"));

  if (auto path = ctx.artifact(rep.name, "phase_transition.csv"); !path.empty()) {
    OutputFile file(path);
    CsvWriter csv(file.stream(), header_for(rep.params), {"c_prime", "lambda_s1.5", "lambda_s0.5"});
    for (double cp : log_grid(1e-4, 1.0, 17)) csv.row({cp, lambda_at(1.5, cp), lambda_at(0.5, cp)});
    rep.artifacts.push_back(path.string());
  }
  return rep;
}

ExperimentReport exp_front_speed(const ModelParams& params, const ExperimentContext& ctx,
                                 const FrontSpeedConfig& config) {
  ExperimentReport rep;
  rep.name = fmt::format("front_speed_{}", vname(params.variant));
  rep.params = fmt::format("{} domain=[{},{}] dx={} T={} window=[{},{}] level={}", describe(params),
                           config.x_min, config.x_max, config.dx, config.T, config.fit_lo, config.fit_hi,
                           config.level);
  const Grid1D grid = Grid1D::spanning(config.x_min, config.x_max, config.dx);
  IntegrateOptions opts;
  opts.sample_every = 0.1;
  opts.level = config.level;
  const Trajectory traj = integrate(params, heaviside_ic(grid), config.T, opts);
  const SpeedFit fit = front_speed(traj.trace, config.fit_lo, config.fit_hi);
  const double target = critical_speed(params).lambda_star;
  rep.add(make_metric("front speed", fit.slope, target, config.tolerance, Relation::RelDiff,
                      "critical speed"));
  rep.notes.push_back(fmt::format("relative error {:+.4f}, fit stderr {}", fit.slope / target - 1.0,
                                  format_number(fit.std_error)));

  if (auto path = ctx.artifact("front_speed", fmt::format("front_{}.csv", vname(params.variant))); !path.empty()) {
    OutputFile file(path);
    write_front_trace(file.stream(), header_for(rep.params), traj.trace);
    rep.artifacts.push_back(path.string());
    OutputFile field(ctx.artifact("front_speed", fmt::format("field_{}.csv", vname(params.variant))));
    write_field(field.stream(), header_for(rep.params), traj.final);
    rep.artifacts.push_back(field.path().string());
  }
  return rep;
}

ExperimentReport exp_supercritical_wave(double mu, const ModelParams& params, double T,
                                        const ExperimentContext& ctx, const SupercriticalConfig& config) {
  const CriticalSpeed cs = critical_speed(params);
  if (!(mu > cs.mu_star + 0.05 && mu < 0.0))
    throw DomainError(fmt::format("mu = {} is not in (mu* + 0.05, 0) = ({}, 0)", mu, cs.mu_star + 0.05));
  if (!(T > 0.0)) throw ConfigError("T must be positive");

  ExperimentReport rep;
  rep.name = fmt::format("supercritical_mu{}", format_number(mu));
  rep.params = fmt::format("{} mu={} T={} domain=[{},{}] dx={}", describe(params), mu, T, config.x_min,
                           config.x_max, config.dx);
  const double lam = speed_function(mu, params).lambda_plus;
  const PerronVector d = perron_eigenvector(mu, params);
  const Grid1D grid = Grid1D::spanning(config.x_min, config.x_max, config.dx);

  IntegrateOptions opts;
  opts.sample_every = 0.1;
  opts.snapshot_times = {T / 2.0};
  const Trajectory traj = integrate(params, exponential_ic(grid, mu, d), T, opts);
  const SpeedFit fit = front_speed(traj.trace, T / 2.0, T);
  rep.add(make_metric("front speed", fit.slope, lam, 0.05, Relation::RelDiff, "speed function at mu"));

  const double front = front_position(traj.final, 0.5);
  const double decay =
      tail_decay_rate(traj.final, Component::U, front + config.tail_offset_lo, front + config.tail_offset_hi);
  rep.add(make_metric("tail decay rate", decay, mu, 0.05, Relation::AbsDiff, "initial decay rate"));

  const FieldPair& half = traj.snapshots.at(0);
  double drift = 0.0;
  for (double y = config.profile_lo; y <= config.profile_hi; y += config.dx) {
    const double a = sample_field(half, Component::U, y + lam * half.t);
    const double b = sample_field(traj.final, Component::U, y + lam * traj.final.t);
    drift = std::max(drift, std::abs(a - b));
  }
  rep.add(make_metric("co-moving profile drift T/2 -> T", drift, 0.0, 0.02, Relation::AtMost,
                      "convergence to the travelling wave"));

  const Trajectory control = integrate(params, heaviside_ic(grid), T, opts);
  const SpeedFit control_fit = front_speed(control.trace, T / 2.0, T);
  rep.add(make_metric("Heaviside control speed below supercritical speed", control_fit.slope, fit.slope, 0.0,
                      Relation::Less, "monotonicity of the speed function"));
  rep.notes.push_back(fmt::format("lambda+(mu) = {}, lambda* = {}, control speed = {}", format_number(lam),
                                  format_number(cs.lambda_star), format_number(control_fit.slope)));

  if (auto path = ctx.artifact("supercritical", fmt::format("front_mu{}.csv", format_number(mu))); !path.empty()) {
    OutputFile file(path);
    write_front_trace(file.stream(), header_for(rep.params), traj.trace);
    rep.artifacts.push_back(path.string());
    OutputFile field(ctx.artifact("supercritical", fmt::format("field_mu{}.csv", format_number(mu))));
    write_field(field.stream(), header_for(rep.params), traj.final);
    rep.artifacts.push_back(field.path().string());
  }
  return rep;
}

ExperimentReport exp_duality(const ModelParams& params, double t, std::size_t replicates,
                             std::span<const double> probes, const ExperimentContext& ctx) {
  if (probes.empty()) throw ConfigError("no probe points");
  ExperimentReport rep;
  rep.name = fmt::format("duality_{}", vname(params.variant));
  rep.params = fmt::format("{} t={} replicates={}", describe(params), t, replicates);

  const Grid1D grid = Grid1D::spanning(-40.0, 40.0, 0.05);
  const Trajectory pde = integrate(params, heaviside_ic(grid), t);
  ReplicateOptions ro;
  ro.seed = ctx.seed;
  ro.replicates = replicates;
  ro.threads = ctx.threads;
  const auto cdf = empirical_rightmost_cdf(params, t, probes, ro);

  double gap = 0.0;
  double max_se = 0.0;
  for (const auto& p : cdf) {
    gap = std::max(gap, std::abs(sample_field(pde.final, Component::U, p.x) - p.p_hat));
    max_se = std::max(max_se, p.std_error);
  }
  rep.add(make_metric("sup |u_pde - P(R_t <= x)|", gap, 0.0, ctx.mc_tol(3.0 * max_se + 0.02), Relation::AtMost,
                      "McKean representation"));

  if (auto path = ctx.artifact("duality", fmt::format("cdf_{}.csv", vname(params.variant))); !path.empty()) {
    OutputFile file(path);
    write_cdf(file.stream(), header_for(rep.params, ctx.seed), cdf);
    rep.artifacts.push_back(path.string());
    OutputFile field(ctx.artifact("duality", fmt::format("field_{}.csv", vname(params.variant))));
    write_field(field.stream(), header_for(rep.params), pde.final);
    rep.artifacts.push_back(field.path().string());
  }
  return rep;
}

ExperimentReport exp_martingale(const ModelParams& params, double mu_super, std::span<const double> times,
                                double mu_sub, double t_sub, std::size_t replicates,
                                const ExperimentContext& ctx) {
  const CriticalSpeed cs = critical_speed(params);
  if (!(mu_super > cs.mu_star && mu_super < 0.0)) throw DomainError("mu_super must lie in (mu*, 0)");
  if (!(mu_sub < cs.mu_star)) throw DomainError("mu_sub must lie below mu*");
  if (times.empty() || !std::is_sorted(times.begin(), times.end())) throw ConfigError("times must be sorted");
  if (replicates < 2) throw ConfigError("at least 2 replicates are required");

  ExperimentReport rep;
  rep.name = "martingale";
  rep.params = fmt::format("{} mu_super={} mu_sub={} t_sub={} replicates={}", describe(params), mu_super, mu_sub,
                           t_sub, replicates);

  const double lam = speed_function(mu_super, params).lambda_plus;
  const PerronVector d = perron_eigenvector(mu_super, params);
  const std::vector<double> snaps(times.begin(), times.end());
  std::vector<std::vector<double>> x(replicates);
  parallel_for(replicates, ctx.threads, [&](std::size_t r) {
    RandomStream rng(ctx.seed, r);
    SimulationOptions so;
    so.snapshot_times = snaps;
    const auto res = simulate(params, snaps.back(), rng, so);
    x[r].reserve(snaps.size());
    for (const auto& pop : res.snapshots) x[r].push_back(additive_martingale(pop, mu_super, lam, d));
  });
  for (std::size_t j = 0; j < snaps.size(); ++j) {
    double mean = 0.0;
    for (const auto& row : x) mean += row[j];
    mean /= static_cast<double>(replicates);
    double ss = 0.0;
    for (const auto& row : x) ss += (row[j] - mean) * (row[j] - mean);
    const double se = std::sqrt(ss / static_cast<double>(replicates - 1) / static_cast<double>(replicates));
    rep.add(make_metric(fmt::format("mean X_t at t={} (mu={})", format_number(snaps[j]), format_number(mu_super)),
                        mean, d.d1, ctx.mc_tol(3.0) * se, Relation::AbsDiff, "martingale property"));
  }

  const double lam_sub = speed_function(mu_sub, params).lambda_plus;
  const PerronVector d_sub = perron_eigenvector(mu_sub, params);
  std::vector<double> sub(replicates);
  parallel_for(replicates, ctx.threads, [&](std::size_t r) {
    RandomStream rng(ctx.seed, replicates + r);
    const auto res = simulate(params, t_sub, rng);
    sub[r] = additive_martingale(res.final, mu_sub, lam_sub, d_sub);
  });
  rep.add(make_metric(fmt::format("median X_t at t={} (mu={})", format_number(t_sub), format_number(mu_sub)),
                      quantile_median(sub), 0.1 * d_sub.d1, 0.0, Relation::Less, "almost sure convergence to 0"));

  if (auto path = ctx.artifact(rep.name, "martingale.csv"); !path.empty()) {
    OutputFile file(path);
    CsvWriter csv(file.stream(), header_for(rep.params, ctx.seed), {"mu", "t", "replicate", "X"});
    for (std::size_t r = 0; r < replicates; ++r)
      for (std::size_t j = 0; j < snaps.size(); ++j) csv.row({mu_super, snaps[j], static_cast<double>(r), x[r][j]});
    for (std::size_t r = 0; r < replicates; ++r) csv.row({mu_sub, t_sub, static_cast<double>(r), sub[r]});
    rep.artifacts.push_back(path.string());
  }
  return rep;
}

ExperimentReport exp_rightmost(double T, std::size_t replicates, const ExperimentContext& ctx) {
  ExperimentReport rep;
  rep.name = "rightmost";
  rep.params = fmt::format("unit rates, T={} replicates={}", T, replicates);
  struct Range {
    Variant variant;
    double lo, hi;
    std::size_t cap;
  };
  const std::array<Range, 3> ranges{{{Variant::SeedBank, 0.88, 1.08, 2'000'000},
                                     {Variant::Spore, 0.62, 0.80, 2'000'000},
                                     {Variant::Classical, 1.25, 1.50, 50'000'000}}};
  std::array<double, 3> means{};
  for (std::size_t i = 0; i < ranges.size(); ++i) {
    const auto& rg = ranges[i];
    const ModelParams p = unit_params(rg.variant);
    ReplicateOptions ro;
    ro.seed = ctx.seed;
    ro.replicates = replicates;
    ro.cap = rg.cap;
    ro.threads = ctx.threads;
    const RightmostStat stat = rightmost_speed(p, T, ro);
    means[i] = stat.mean_speed;
    rep.add(make_metric(fmt::format("mean R_T/T {}", vname(rg.variant)), stat.mean_speed, 0.5 * (rg.lo + rg.hi),
                        ctx.mc_tol(0.5 * (rg.hi - rg.lo)), Relation::AbsDiff, "finite-T range"));
    rep.notes.push_back(fmt::format("{}: mean R_T/T = {} (stderr {}), lambda* = {}, overflows {}", vname(rg.variant),
                                    format_number(stat.mean_speed), format_number(stat.std_error),
                                    format_number(critical_speed(p).lambda_star), stat.overflows));
    if (auto path = ctx.artifact(rep.name, fmt::format("rightmost_{}.csv", vname(rg.variant))); !path.empty()) {
      OutputFile file(path);
      write_rightmost(file.stream(), header_for(fmt::format("{} T={} cap={}", describe(p), T, rg.cap), ctx.seed),
                      stat);
      rep.artifacts.push_back(path.string());
    }
  }
  rep.add(make_metric("mean R_T/T seedbank above spore", means[0], means[1], 0.0, Relation::Greater,
                      "ordering of critical speeds"));
  return rep;
}

double fk_terminal_f(double y) { return std::exp(-0.5 * y * y); }

double fk_terminal_g(double y) { return 0.5 * std::exp(-0.5 * (y - 1.0) * (y - 1.0)); }

ExperimentReport exp_feynman_kac(const ModelParams& params, double mu, double t, std::span<const double> probes,
                                 std::size_t paths, const ExperimentContext& ctx) {
  if (probes.empty()) throw ConfigError("no probe points");
  ExperimentReport rep;
  rep.name = "feynman_kac";
  const double lam = speed_function(mu, params).lambda_plus;
  rep.params = fmt::format("{} lambda={} t={} paths={}", describe(params), format_number(lam), t, paths);
  rep.notes.push_back("terminals f(y) = exp(-y^2/2), g(y) = exp(-(y-1)^2/2)/2");

  const auto f = fk_terminal_f;
  const auto g = fk_terminal_g;
  // The drift is first-order upwind, so the oracle is Richardson-extrapolated
  // from two grids.
  auto solve = [&](double dx) {
    const Grid1D grid = Grid1D::spanning(-15.0, 15.0, dx);
    FieldPair ic{grid, std::vector<double>(grid.n), std::vector<double>(grid.n), 0.0};
    for (std::size_t i = 0; i < grid.n; ++i) {
      ic.u[i] = f(grid.x(i));
      ic.v[i] = g(grid.x(i));
    }
    return integrate_linear_drifted(params, lam, ic, t);
  };
  const FieldPair coarse = solve(0.02);
  const FieldPair fine = solve(0.01);
  const auto fd_at = [&](double x) {
    return 2.0 * sample_field(fine, Component::U, x) - sample_field(coarse, Component::U, x);
  };

  std::vector<std::array<double, 4>> rows;
  for (std::size_t i = 0; i < probes.size(); ++i) {
    const double x = probes[i];
    const Estimate est = onoff_bm_feynman_kac(params, lam, t, x, f, g, paths, ctx.seed + 7919 * (i + 1), ctx.threads);
    const double fdv = fd_at(x);
    rep.add(make_metric(fmt::format("|MC - FD| at x={}", format_number(x)), std::abs(est.value - fdv), 0.0,
                        ctx.mc_tol(3.0 * est.std_error + 0.02), Relation::AtMost, "finite-difference oracle"));
    rows.push_back({x, est.value, est.std_error, fdv});
  }
  if (auto path = ctx.artifact(rep.name, "feynman_kac.csv"); !path.empty()) {
    OutputFile file(path);
    CsvWriter csv(file.stream(), header_for(rep.params, ctx.seed), {"x", "mc", "stderr", "fd"});
    for (const auto& r : rows) csv.row(std::span<const double>(r));
    rep.artifacts.push_back(path.string());
  }
  return rep;
}

// ---------------------------------------------------------------------------

namespace {

std::vector<double> duality_probes() {
  std::vector<double> xs;
  for (int i = 0; i < 13; ++i) xs.push_back(-1.5 + i);
  return xs;
}

ExperimentReport combined(std::string name, std::string params) {
  ExperimentReport r;
  r.name = std::move(name);
  r.params = std::move(params);
  return r;
}

std::vector<ExperimentEntry> build_catalog() {
  std::vector<ExperimentEntry> c;
  c.push_back({"ordering", "pointwise ordering of the three speed functions and the critical values",
               [](const ExperimentContext& ctx) { return exp_ordering(ctx); }});
  c.push_back({"eigenstructure", "Perron vector positivity, eigen residuals and diagonal signs at mu*",
               [](const ExperimentContext& ctx) { return exp_eigenstructure(ctx); }});
  c.push_back({"sweeps", "critical speeds along s, c, c' and c=c' with the exact identities",
               [](const ExperimentContext& ctx) {
                 auto rep = combined("sweeps", "base c=1 c_prime=1 kappa=1 offspring=1");
                 for (auto s : {SweepScenario::VaryS, SweepScenario::VaryC, SweepScenario::VaryCPrime,
                                SweepScenario::VaryCBoth}) {
                   const auto grid = default_sweep_grid(s);
                   rep.merge(exp_figure_sweeps(s, grid, ctx), to_string(s));
                 }
                 return rep;
               }});
  c.push_back({"phase_transition", "nearly-dormant seed bank: lambda* on both sides of the threshold",
               [](const ExperimentContext& ctx) { return exp_phase_transition(ctx); }});
  c.push_back({"front_speed", "Heaviside front speed of the PDE against lambda* for all variants",
               [](const ExperimentContext& ctx) {
                 auto rep = combined("front_speed", "unit rates, domain [-60,140], dx=0.1, T=40");
                 for (Variant v : kVariants) rep.merge(exp_front_speed(unit_params(v), ctx), to_string(v));
                 return rep;
               }});
  c.push_back({"supercritical", "travelling waves from exponential data, mu = -0.6 and -1",
               [](const ExperimentContext& ctx) {
                 auto rep = combined("supercritical", "variant=seedbank unit rates, T=40");
                 const ModelParams p = unit_params(Variant::SeedBank);
                 for (double mu : {-0.6, -1.0}) rep.merge(exp_supercritical_wave(mu, p, 40.0, ctx), fmt::format("mu={}", mu));
                 return rep;
               }});
  c.push_back({"duality", "PDE solution against the empirical law of the rightmost particle",
               [](const ExperimentContext& ctx) {
                 auto rep = combined("duality", "unit rates, 13 probes");
                 const auto xs = duality_probes();
                 const std::size_t n = ctx.replicates(2000);
                 rep.merge(exp_duality(unit_params(Variant::SeedBank), 5.0, n, xs, ctx), "seedbank t=5");
                 rep.merge(exp_duality(unit_params(Variant::Spore), 5.0, n, xs, ctx), "spore t=5");
                 rep.merge(exp_duality(unit_params(Variant::Classical), 3.0, n, xs, ctx), "classical t=3");
                 return rep;
               }});
  c.push_back({"martingale", "additive martingale: constant mean above mu*, vanishing median below",
               [](const ExperimentContext& ctx) {
                 const std::array<double, 3> ts{0.5, 1.0, 2.0};
                 return exp_martingale(unit_params(Variant::SeedBank), -0.6, ts, -3.0, 6.0, ctx.replicates(5000), ctx);
               }});
  c.push_back({"rightmost", "speed of the rightmost particle at T=15 for all variants",
               [](const ExperimentContext& ctx) { return exp_rightmost(15.0, ctx.replicates(200), ctx); }});
  c.push_back({"feynman_kac", "single-path on/off Feynman-Kac estimate against finite differences",
               [](const ExperimentContext& ctx) {
                 const std::array<double, 5> xs{-2.0, -1.0, 0.0, 1.0, 2.0};
                 return exp_feynman_kac(unit_params(Variant::SeedBank), -0.6, 1.0, xs, ctx.replicates(100'000), ctx);
               }});
  return c;
}

}  // namespace

const std::vector<ExperimentEntry>& catalog() {
  static const std::vector<ExperimentEntry> entries = build_catalog();
  return entries;
}

const ExperimentEntry* find_experiment(std::string_view name) {
  for (const auto& e : catalog())
    if (e.name == name) return &e;
  return nullptr;
}

}  // namespace dormancy
