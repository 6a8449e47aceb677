#include "dormancy/errors.hpp"

#include <fmt/format.h>

namespace dormancy {

NonRealSpeed::NonRealSpeed(double mu, double radicand)
    : std::runtime_error(fmt::format("speed function is not real at mu={} (radicand {})", mu, radicand)),
      mu_(mu),
      radicand_(radicand) {}

DivergenceError::DivergenceError(std::size_t step)
    : std::runtime_error(fmt::format("non-finite value after step {}", step)), step_(step) {}

PopulationOverflow::PopulationOverflow(std::size_t cap, double time_reached)
    : std::runtime_error(
          fmt::format("population exceeded cap {} at t={}", cap, time_reached)),
      cap_(cap),
      time_reached_(time_reached) {}

}  // namespace dormancy
