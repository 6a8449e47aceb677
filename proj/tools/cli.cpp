#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include "dormancy/csv.hpp"
#include "dormancy/errors.hpp"
#include "dormancy/harness.hpp"
#include "dormancy/model.hpp"
#include "dormancy/particles.hpp"
#include "dormancy/pde.hpp"
#include "dormancy/wavespeed.hpp"

namespace dormancy {

namespace {

using json = nlohmann::json;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  return parts;
}

double to_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw UsageError(fmt::format("'{}' is not a number", s));
  }
  if (used != s.size()) throw UsageError(fmt::format("'{}' is not a number", s));
  return v;
}

std::vector<double> to_doubles(const std::string& list) {
  std::vector<double> out;
  for (const auto& p : split(list, ',')) out.push_back(to_double(p));
  return out;
}

// Model flags shared by every subcommand. Unset flags fall back to the
// config file, then to defaults.
struct ModelFlags {
  std::string variant;
  double c = 0.0;
  double c_prime = 0.0;
  double kappa = 1.0;
  std::vector<double> p;
  std::string config;
  std::uint64_t seed = 1;
  unsigned threads = 0;

  CLI::Option* o_variant = nullptr;
  CLI::Option* o_c = nullptr;
  CLI::Option* o_cp = nullptr;
  CLI::Option* o_kappa = nullptr;
  CLI::Option* o_p = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_threads = nullptr;
};

void add_model_flags(CLI::App& app, ModelFlags& f) {
  f.o_variant = app.add_option("--variant", f.variant, "classical | seedbank | spore (default seedbank)");
  f.o_c = app.add_option("--c", f.c, "active -> dormant rate (default 1, 0 for classical)");
  f.o_cp = app.add_option("--cprime,--c_prime", f.c_prime, "dormant -> active rate (default 1, 0 for classical)");
  f.o_kappa = app.add_option("--kappa", f.kappa, "branching rate (default 1)");
  f.o_p = app.add_option("--p,--offspring", f.p, "offspring law p_1,...,p_K (default 1.0: binary)")->delimiter(',');
  app.add_option("--config", f.config, "JSON file with variant, c, c_prime, kappa, p, seed, threads")
      ->check(CLI::ExistingFile);
  f.o_seed = app.add_option("--seed", f.seed, "master seed (default 1)");
  f.o_threads = app.add_option("--threads", f.threads, "worker threads, 0 = machine parallelism");
}

struct Resolved {
  ModelParams params;
  std::uint64_t seed = 1;
  unsigned threads = 0;
};

Resolved resolve(const ModelFlags& f) {
  json cfg = json::object();
  if (!f.config.empty()) {
    std::ifstream in(f.config);
    try {
      cfg = json::parse(in);
    } catch (const json::exception& e) {
      throw UsageError(fmt::format("config {}: {}", f.config, e.what()));
    }
    if (!cfg.is_object()) throw UsageError("config file must hold a JSON object");
    for (const auto& [key, _] : cfg.items()) {
      static const std::vector<std::string> known{"variant", "c", "c_prime", "kappa", "p", "seed", "threads"};
      if (std::find(known.begin(), known.end(), key) == known.end())
        throw UsageError(fmt::format("config {}: unknown key '{}'", f.config, key));
    }
  }
  try {
    const std::string vname = f.o_variant->count() ? f.variant : cfg.value("variant", std::string("seedbank"));
    const Variant variant = parse_variant(vname);
    const double rate_default = variant == Variant::Classical ? 0.0 : 1.0;
    const double c = f.o_c->count() ? f.c : cfg.value("c", rate_default);
    const double cp = f.o_cp->count() ? f.c_prime : cfg.value("c_prime", rate_default);
    const double kappa = f.o_kappa->count() ? f.kappa : cfg.value("kappa", 1.0);
    const std::vector<double> p = f.o_p->count() ? f.p : cfg.value("p", std::vector<double>{1.0});
    Resolved r{make_params(variant, c, cp, kappa, OffspringLaw(p)), 1, 0};
    r.seed = f.o_seed->count() ? f.seed : cfg.value("seed", std::uint64_t{1});
    r.threads = f.o_threads->count() ? f.threads : cfg.value("threads", 0u);
    return r;
  } catch (const json::exception& e) {
    throw UsageError(fmt::format("config {}: {}", f.config, e.what()));
  }
}

// Writes to `path` when given, otherwise to `fallback`.
template <class Fn>
void emit(const std::string& path, std::ostream& fallback, Fn&& fn) {
  if (path.empty()) {
    fn(fallback);
    return;
  }
  OutputFile file(path);
  fn(file.stream());
}

std::string experiment_listing() {
  std::string text = "Experiments (verify <name>):\n";
  for (const auto& e : catalog()) text += fmt::format("  {:<18}{}\n", e.name, e.description);
  return text;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Reaction-diffusion fronts and on/off branching Brownian motion", "dormancy"};
  app.require_subcommand(1);
  app.footer(experiment_listing());
  ModelFlags mf;
  add_model_flags(app, mf);

  // speed
  auto* speed = app.add_subcommand("speed", "evaluate the speed function at a decay rate mu < 0");
  double mu = 0.0;
  speed->add_option("--mu", mu, "decay rate")->required();

  // critical
  auto* critical = app.add_subcommand("critical", "critical decay rate and minimal wave speed");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "critical speeds of all variants along one parameter");
  std::string axis_name = "s";
  std::string grid_list;
  std::string log_spec;
  std::string sweep_out;
  sweep->add_option("--axis", axis_name, "s | c | c_prime | c_both");
  auto* o_grid = sweep->add_option("--grid", grid_list, "comma separated values");
  auto* o_log = sweep->add_option("--log", log_spec, "lo:hi:n logarithmic grid");
  o_grid->excludes(o_log);
  sweep->add_option("--out", sweep_out, "CSV path (default stdout)");

  // pde
  auto* pde = app.add_subcommand("pde", "integrate the reaction-diffusion system and track the front");
  double x_min = -60.0, x_max = 140.0, dx = 0.1, pde_T = 40.0, dt = 0.0, sample_every = 0.1, level = 0.5;
  std::string ic_spec = "heaviside";
  std::string pde_out;
  pde->add_option("--xmin", x_min, "left end of the domain");
  pde->add_option("--xmax", x_max, "right end of the domain");
  pde->add_option("--dx", dx, "grid spacing")->check(CLI::PositiveNumber);
  pde->add_option("--T", pde_T, "time horizon")->check(CLI::PositiveNumber);
  pde->add_option("--dt", dt, "time step (0: 0.4 dx^2)")->check(CLI::NonNegativeNumber);
  pde->add_option("--ic", ic_spec, "heaviside | exponential:MU[:D1:D2]");
  pde->add_option("--sample-every", sample_every, "front sampling interval")->check(CLI::PositiveNumber);
  pde->add_option("--level", level, "tracked level of u")->check(CLI::Range(0.0, 1.0));
  pde->add_option("--out-dir", pde_out, "directory for front.csv and field.csv (default: front to stdout)");

  // bbm
  auto* bbm = app.add_subcommand("bbm", "simulate on/off branching Brownian motion");
  double bbm_T = 10.0;
  std::size_t replicates = 200;
  std::size_t cap = 2'000'000;
  std::string emit_spec = "rightmost";
  std::string bbm_out;
  bbm->add_option("--T", bbm_T, "time horizon for rightmost")->check(CLI::PositiveNumber);
  bbm->add_option("--replicates", replicates, "independent replicates")->check(CLI::PositiveNumber);
  bbm->add_option("--cap", cap, "maximum particles per replicate")->check(CLI::PositiveNumber);
  bbm->add_option("--emit", emit_spec, "rightmost | cdf:T:X1,X2,... | martingale:MU:T1,T2,... | fk:LAMBDA:T:X1,X2,...");
  bbm->add_option("--out", bbm_out, "CSV path (default stdout)");

  // verify
  auto* verify = app.add_subcommand("verify", "run named experiments and check their metrics");
  std::vector<std::string> names;
  bool all = false, quick = false;
  std::string verify_out;
  verify->add_option("name", names, "experiment names");
  verify->add_flag("--all", all, "run every experiment");
  verify->add_flag("--quick", quick, "replicates / 4, Monte Carlo tolerances x 2");
  verify->add_option("--out-dir", verify_out, "directory for CSV artifacts");
  verify->footer(experiment_listing());

  for (auto* sub : {speed, critical, sweep, pde, bbm, verify}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    const Resolved r = resolve(mf);
    const ModelParams& params = r.params;
    const std::string echo = describe(params);

    if (speed->parsed()) {
      const SpeedEval ev = speed_function(mu, params);
      out << echo << '\n';
      out << "mu=" << format_number(ev.mu) << '\n';
      out << "lambda=" << format_number(ev.lambda_plus) << '\n';
      out << "lambda_minus=" << format_number(ev.lambda_minus) << '\n';
      return 0;
    }

    if (critical->parsed()) {
      const CriticalSpeed cs = critical_speed(params);
      out << echo << '\n';
      out << "mu_star=" << format_number(cs.mu_star) << '\n';
      out << "lambda_star=" << format_number(cs.lambda_star) << '\n';
      out << "d1=" << format_number(cs.eigvec.d1) << '\n';
      out << "d2=" << format_number(cs.eigvec.d2) << '\n';
      out << "det_residual=" << format_number(cs.det_residual) << '\n';
      return 0;
    }

    if (sweep->parsed()) {
      const SweepAxis axis = parse_sweep_axis(axis_name);
      std::vector<double> grid;
      if (!log_spec.empty()) {
        const auto parts = split(log_spec, ':');
        if (parts.size() != 3) throw UsageError("--log expects lo:hi:n");
        const double lo = to_double(parts[0]), hi = to_double(parts[1]);
        const double n = to_double(parts[2]);
        if (!(lo > 0.0 && hi > lo && n >= 2.0 && n == std::floor(n))) throw UsageError("--log expects 0 < lo < hi, n >= 2");
        for (int i = 0; i < static_cast<int>(n); ++i) grid.push_back(lo * std::pow(hi / lo, i / (n - 1.0)));
      } else if (!grid_list.empty()) {
        grid = to_doubles(grid_list);
      } else {
        throw UsageError("sweep needs --grid or --log");
      }
      const auto rows = sweep_critical(params, axis, grid);
      emit(sweep_out, out, [&](std::ostream& os) { write_sweep(os, CsvHeader{echo, std::nullopt}, axis, rows); });
      for (const auto& row : rows)
        if (!row.error.empty()) err << "warning: " << axis_name << "=" << format_number(row.value) << ": " << row.error << '\n';
      return 0;
    }

    if (pde->parsed()) {
      const Grid1D grid = Grid1D::spanning(x_min, x_max, dx);
      FieldPair ic;
      const auto parts = split(ic_spec, ':');
      if (parts[0] == "heaviside" && parts.size() == 1) {
        ic = heaviside_ic(grid);
      } else if (parts[0] == "exponential" && (parts.size() == 2 || parts.size() == 4)) {
        const double m = to_double(parts[1]);
        const PerronVector d = parts.size() == 4 ? PerronVector{to_double(parts[2]), to_double(parts[3])}
                                                 : perron_eigenvector(m, params);
        ic = exponential_ic(grid, m, d);
      } else {
        throw UsageError(fmt::format("unknown initial condition '{}'", ic_spec));
      }
      IntegrateOptions opts;
      opts.dt = dt;
      opts.sample_every = sample_every;
      opts.level = level;
      const Trajectory traj = integrate(params, std::move(ic), pde_T, opts);
      const std::string config = fmt::format("{} domain=[{},{}] dx={} T={} dt={} ic={} level={}", echo, x_min, x_max,
                                             dx, pde_T, dt, ic_spec, level);
      const CsvHeader header{config, std::nullopt};
      if (pde_out.empty()) {
        write_front_trace(out, header, traj.trace);
      } else {
        const std::filesystem::path dir(pde_out);
        OutputFile front(dir / "front.csv");
        write_front_trace(front.stream(), header, traj.trace);
        OutputFile field(dir / "field.csv");
        write_field(field.stream(), header, traj.final);
        out << config << '\n';
        try {
          const SpeedFit fit = front_speed(traj.trace, pde_T / 2.0, pde_T);
          out << "front_speed=" << format_number(fit.slope) << '\n';
          out << "front_speed_stderr=" << format_number(fit.std_error) << '\n';
        } catch (const InsufficientSamples& e) {
          err << "warning: " << e.what() << '\n';
        }
        out << "artifact: " << front.path().string() << '\n';
        out << "artifact: " << field.path().string() << '\n';
      }
      return 0;
    }

    if (bbm->parsed()) {
      ReplicateOptions ro;
      ro.seed = r.seed;
      ro.replicates = replicates;
      ro.cap = cap;
      ro.threads = r.threads;
      const auto parts = split(emit_spec, ':');
      const std::string& kind = parts[0];
      const auto config = [&](const std::string& extra) {
        return fmt::format("{} replicates={} cap={} emit={}{}", echo, replicates, cap, emit_spec, extra);
      };
      const auto warn_cap = [&](double T) {
        const double expected = std::exp(mean_growth_rate(params) * T);
        if (expected > static_cast<double>(cap))
          err << fmt::format("warning: expected population {:.3g} at T={} exceeds cap {}\n", expected, T, cap);
      };

      if (kind == "rightmost" && parts.size() == 1) {
        warn_cap(bbm_T);
        const RightmostStat stat = rightmost_speed(params, bbm_T, ro);
        emit(bbm_out, out, [&](std::ostream& os) {
          write_rightmost(os, CsvHeader{config(fmt::format(" T={}", bbm_T)), r.seed}, stat);
        });
        err << fmt::format("mean R_T/T = {} (stderr {}), overflows {}\n", format_number(stat.mean_speed),
                           format_number(stat.std_error), stat.overflows);
        return 0;
      }
      if (kind == "cdf" && parts.size() == 3) {
        const double t = to_double(parts[1]);
        warn_cap(t);
        const auto xs = to_doubles(parts[2]);
        const auto cdf = empirical_rightmost_cdf(params, t, xs, ro);
        emit(bbm_out, out, [&](std::ostream& os) { write_cdf(os, CsvHeader{config(""), r.seed}, cdf); });
        return 0;
      }
      if (kind == "martingale" && parts.size() == 3) {
        const double m = to_double(parts[1]);
        auto ts = to_doubles(parts[2]);
        std::sort(ts.begin(), ts.end());
        warn_cap(ts.back());
        const double lam = speed_function(m, params).lambda_plus;
        const PerronVector d = perron_eigenvector(m, params);
        std::vector<std::vector<double>> values(replicates);
        for (std::size_t i = 0; i < replicates; ++i) {
          RandomStream rng(r.seed, i);
          SimulationOptions so;
          so.cap = cap;
          so.snapshot_times = ts;
          const auto res = simulate(params, ts.back(), rng, so);
          for (const auto& pop : res.snapshots) values[i].push_back(additive_martingale(pop, m, lam, d));
        }
        emit(bbm_out, out, [&](std::ostream& os) {
          CsvWriter csv(os, CsvHeader{config(fmt::format(" lambda={} d1={} d2={}", format_number(lam),
                                                         format_number(d.d1), format_number(d.d2))),
                                      r.seed},
                        {"t", "replicate", "X"});
          for (std::size_t i = 0; i < replicates; ++i)
            for (std::size_t j = 0; j < ts.size(); ++j) csv.row({ts[j], static_cast<double>(i), values[i][j]});
        });
        return 0;
      }
      if (kind == "fk" && parts.size() == 4) {
        const double lam = to_double(parts[1]);
        const double t = to_double(parts[2]);
        const auto xs = to_doubles(parts[3]);
        emit(bbm_out, out, [&](std::ostream& os) {
          CsvWriter csv(os, CsvHeader{config(" f=exp(-y^2/2) g=exp(-(y-1)^2/2)/2"), r.seed},
                        {"x", "estimate", "stderr"});
          for (double x : xs) {
            const Estimate e = onoff_bm_feynman_kac(params, lam, t, x, fk_terminal_f, fk_terminal_g, replicates,
                                                    r.seed, r.threads);
            csv.row({x, e.value, e.std_error});
          }
        });
        return 0;
      }
      throw UsageError(fmt::format("unknown --emit '{}'", emit_spec));
    }

    if (verify->parsed()) {
      std::vector<const ExperimentEntry*> chosen;
      if (all) {
        for (const auto& e : catalog()) chosen.push_back(&e);
      } else {
        if (names.empty()) throw UsageError("verify needs an experiment name or --all");
        for (const auto& n : names) {
          const ExperimentEntry* e = find_experiment(n);
          if (!e) throw UsageError(fmt::format("unknown experiment '{}'", n));
          chosen.push_back(e);
        }
      }
      ExperimentContext ctx;
      ctx.out_dir = verify_out;
      ctx.quick = quick;
      ctx.seed = r.seed;
      ctx.threads = r.threads;
      bool ok = true;
      for (const auto* e : chosen) {
        try {
          const ExperimentReport rep = e->run(ctx);
          render(out, rep);
          ok = ok && rep.passed();
        } catch (const std::exception& ex) {
          out << "experiment: " << e->name << "\n  error: " << ex.what() << "\nresult: FAIL\n";
          ok = false;
        }
      }
      return ok ? 0 : 1;
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace dormancy
