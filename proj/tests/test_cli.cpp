#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "dormancy");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = dormancy::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

bool contains(const std::string& text, const std::string& needle) { return text.find(needle) != std::string::npos; }

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("dormancy_cli_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("critical speed of the seed bank") {
  const auto r = run({"critical", "--variant", "seedbank", "--c", "1", "--cprime", "1", "--kappa", "1", "--p", "1.0"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "mu_star=-1.19102926869\n"));
  CHECK(contains(r.out, "lambda_star=0.982416232234\n"));
}

TEST_CASE("classical speed function") {
  const auto r = run({"speed", "--variant", "classical", "--kappa", "1", "--p", "1.0", "--mu", "-1.41421"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "lambda=1.4142135"));
}

TEST_CASE("options may follow the subcommand") {
  const auto r = run({"critical", "--variant", "spore"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "lambda_star=0.707106781187\n"));
}

TEST_CASE("usage errors exit with 2") {
  CHECK(run({"critical", "--bogus"}).code == 2);
  CHECK(run({"critical", "--c", "-1"}).code == 2);
  CHECK(run({"critical", "--variant", "nope"}).code == 2);
  CHECK(run({"critical", "--p", "0.5,0.6"}).code == 2);
  CHECK(run({"speed"}).code == 2);
  CHECK(run({}).code == 2);
  CHECK(run({"verify", "no_such_experiment"}).code == 2);
  CHECK(run({"bbm", "--emit", "histogram"}).code == 2);
}

TEST_CASE("help lists the experiments") {
  const auto r = run({"--help"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "feynman_kac"));
  CHECK(contains(r.out, "supercritical"));
}

TEST_CASE("verify ordering succeeds") {
  const auto r = run({"verify", "ordering"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "result: PASS"));
}

TEST_CASE("sweep CSV") {
  const auto r = run({"sweep", "--axis", "s", "--grid", "0.5,2"});
  CHECK(r.code == 0);
  CHECK(r.out.rfind("# dormancy 0.1.0\n", 0) == 0);
  CHECK(contains(r.out, "\naxis,value,lambda_classical,lambda_seedbank,lambda_spore,mu_classical,mu_seedbank,mu_spore\n"));
  CHECK(contains(r.out, "\ns,2,2,"));
  const auto l = run({"sweep", "--axis", "c_both", "--log", "0.1:10:3"});
  CHECK(l.code == 0);
  CHECK(contains(l.out, "\nc_equals_c_prime,10,"));
}

TEST_CASE("config file with flag override") {
  const auto dir = scratch("config");
  const auto cfg = dir / "run.json";
  std::ofstream(cfg) << R"({"variant": "seedbank", "c": 1, "c_prime": 1e-4, "kappa": 0.5})";
  const auto low = run({"critical", "--config", cfg.string()});
  CHECK(low.code == 0);
  CHECK(contains(low.out, "c_prime=0.0001"));
  CHECK(contains(low.out, "kappa=0.5"));
  const auto high = run({"critical", "--config", cfg.string(), "--kappa", "1.5"});
  CHECK(contains(high.out, "kappa=1.5"));
  std::ofstream(dir / "bad.json") << R"({"variant": "seedbank", "colour": 3})";
  CHECK(run({"critical", "--config", (dir / "bad.json").string()}).code == 2);
  fs::remove_all(dir);
}

TEST_CASE("bbm outputs") {
  const auto r = run({"bbm", "--variant", "spore", "--T", "3", "--replicates", "30", "--seed", "4"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "# seed: 4\nreplicate,R_T\n0,"));
  CHECK(contains(r.err, "mean R_T/T"));
  const auto again = run({"bbm", "--variant", "spore", "--T", "3", "--replicates", "30", "--seed", "4"});
  CHECK(again.out == r.out);

  const auto c = run({"bbm", "--replicates", "40", "--emit", "cdf:2:-50,0,50"});
  CHECK(c.code == 0);
  CHECK(contains(c.out, "\nx,p_hat,stderr\n-50,0,0\n"));
  CHECK(contains(c.out, "\n50,1,0\n"));

  const auto m = run({"bbm", "--replicates", "5", "--emit", "martingale:-0.6:0,1"});
  CHECK(m.code == 0);
  CHECK(contains(m.out, "\nt,replicate,X\n0,0,"));

  const auto f = run({"bbm", "--replicates", "100", "--emit", "fk:1.25:0.5:0,1"});
  CHECK(f.code == 0);
  CHECK(contains(f.out, "\nx,estimate,stderr\n0,"));

  CHECK(contains(run({"bbm", "--variant", "classical", "--T", "20", "--replicates", "30", "--cap", "1000"}).err,
                 "exceeds cap"));
}

TEST_CASE("pde subcommand") {
  const auto r = run({"pde", "--variant", "classical", "--xmin", "-10", "--xmax", "30", "--T", "5"});
  CHECK(r.code == 0);
  CHECK(contains(r.out, "\nt,front_x\n0,"));
  const auto dir = scratch("pde");
  const auto w = run({"pde", "--xmin", "-20", "--xmax", "60", "--T", "10", "--ic", "exponential:-0.6",
                      "--out-dir", dir.string()});
  CHECK(w.code == 0);
  CHECK(contains(w.out, "front_speed="));
  CHECK(fs::exists(dir / "front.csv"));
  CHECK(fs::exists(dir / "field.csv"));
  CHECK(run({"pde", "--ic", "gaussian"}).code == 2);
  fs::remove_all(dir);
}
