#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace dormancy {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Invalid numeric configuration (CFL violation, bad grid, bad option).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The radicand of the speed function is negative, so both branches are complex.
class NonRealSpeed : public std::runtime_error {
 public:
  NonRealSpeed(double mu, double radicand);
  double mu() const noexcept { return mu_; }
  double radicand() const noexcept { return radicand_; }

 private:
  double mu_;
  double radicand_;
};

/// Minimisation of the speed function failed; carries the coarse scan.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, std::vector<std::pair<double, double>> trace)
      : std::runtime_error(what), trace_(std::move(trace)) {}
  const std::vector<std::pair<double, double>>& trace() const noexcept { return trace_; }

 private:
  std::vector<std::pair<double, double>> trace_;
};

class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(std::size_t step);
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

/// Level set not found inside the grid.
class NotBracketed : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class InsufficientSamples : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Branching population exceeded the particle cap before the horizon.
class PopulationOverflow : public std::runtime_error {
 public:
  PopulationOverflow(std::size_t cap, double time_reached);
  std::size_t cap() const noexcept { return cap_; }
  double time_reached() const noexcept { return time_reached_; }

 private:
  std::size_t cap_;
  double time_reached_;
};

/// Too many replicates of a Monte Carlo run overflowed their particle cap.
class ReplicateFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace dormancy
