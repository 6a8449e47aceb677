#include "dormancy/model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>
#include <fmt/ranges.h>

#include "dormancy/errors.hpp"

namespace dormancy {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::Classical:
      return "classical";
    case Variant::SeedBank:
      return "seedbank";
    case Variant::Spore:
      return "spore";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  if (name == "classical") return Variant::Classical;
  if (name == "seedbank" || name == "seed-bank" || name == "I") return Variant::SeedBank;
  if (name == "spore" || name == "II") return Variant::Spore;
  throw DomainError(fmt::format("unknown variant '{}'", name));
}

OffspringLaw::OffspringLaw(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty() || probs_.size() > kMaxSupport) {
    throw DomainError(fmt::format("offspring law needs 1..{} entries, got {}", kMaxSupport,
                                  probs_.size()));
  }
  double total = 0.0;
  cdf_.reserve(probs_.size());
  for (std::size_t i = 0; i < probs_.size(); ++i) {
    const double p = probs_[i];
    if (!(p >= 0.0 && p <= 1.0)) {
      throw DomainError(fmt::format("offspring probability p_{} = {} outside [0,1]", i + 1, p));
    }
    total += p;
    cdf_.push_back(total);
    mean_increment_ += p * static_cast<double>(i + 1);
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw DomainError(fmt::format("offspring probabilities sum to {}, not 1", total));
  }
  cdf_.back() = 1.0;
}

OffspringLaw OffspringLaw::binary() { return OffspringLaw({1.0}); }

double OffspringLaw::nonlinearity(double u) const noexcept {
  // termwise so that u = 0 and u = 1 give exact zeros
  double power = u;
  double acc = 0.0;
  for (const double p : probs_) {
    power *= u;
    acc += p * (power - u);
  }
  return acc;
}

std::size_t OffspringLaw::sample_increment(double uniform) const noexcept {
  const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), uniform);
  const auto k = static_cast<std::size_t>(it - cdf_.begin());
  return std::min(k, cdf_.size() - 1) + 1;
}

void validate(const ModelParams& params) {
  if (!(params.c >= 0.0) || !(params.c_prime >= 0.0) || !std::isfinite(params.c) ||
      !std::isfinite(params.c_prime)) {
    throw DomainError(
        fmt::format("switching rates must be finite and >= 0 (c={}, c'={})", params.c,
                    params.c_prime));
  }
  if (!(params.kappa > 0.0) || !std::isfinite(params.kappa)) {
    throw DomainError(fmt::format("branching rate must be positive (kappa={})", params.kappa));
  }
  if (params.variant == Variant::Classical && (params.c != 0.0 || params.c_prime != 0.0)) {
    throw DomainError("classical variant has no dormant compartment: c and c' must be 0");
  }
  if (!(effective_selection(params) > 0.0)) {
    throw DomainError("effective selection must be positive");
  }
}

ModelParams make_params(Variant variant, double c, double c_prime, double kappa,
                        OffspringLaw law) {
  ModelParams params{variant, c, c_prime, kappa, std::move(law)};
  validate(params);
  return params;
}

ModelParams unit_params(Variant variant) {
  const double rate = variant == Variant::Classical ? 0.0 : 1.0;
  return make_params(variant, rate, rate, 1.0);
}

double effective_selection(const ModelParams& params) {
  return params.kappa * params.law.mean_increment();
}

ModelParams with_selection(ModelParams params, double s) {
  if (!(s > 0.0)) throw DomainError(fmt::format("selection must be positive, got {}", s));
  params.kappa = s / params.law.mean_increment();
  return params;
}

ModelParams with_variant(ModelParams params, Variant variant) {
  params.variant = variant;
  if (variant == Variant::Classical) {
    params.c = 0.0;
    params.c_prime = 0.0;
  }
  return params;
}

double selection_term(double u, const ModelParams& params) {
  if (!(u >= 0.0 && u <= 1.0)) {
    throw DomainError(fmt::format("selection term needs u in [0,1], got {}", u));
  }
  return params.kappa * params.law.nonlinearity(u);
}

std::string describe(const ModelParams& params) {
  return fmt::format("variant={} c={} c_prime={} kappa={} offspring={}",
                     to_string(params.variant), params.c, params.c_prime, params.kappa,
                     fmt::join(params.law.probs(), ","));
}

}  // namespace dormancy
