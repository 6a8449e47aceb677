#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dormancy {

enum class Variant {
  Classical,  ///< scalar F-KPP, no dormant compartment
  SeedBank,   ///< active individuals diffuse, dormant ones are static
  Spore,      ///< dormant individuals diffuse, active ones are static
};

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view name);

/// Offspring law of a branching event: probs()[k-1] is the probability of
/// k+1 offspring, k = 1..K_max.
class OffspringLaw {
 public:
  static constexpr std::size_t kMaxSupport = 64;

  /// Throws DomainError unless every entry is in [0,1] and they sum to 1 (1e-12).
  explicit OffspringLaw(std::vector<double> probs);

  /// Two offspring per event.
  static OffspringLaw binary();

  std::span<const double> probs() const noexcept { return probs_; }
  std::size_t support() const noexcept { return probs_.size(); }

  /// Mean number of additional particles per event, sum_k p_k k.
  double mean_increment() const noexcept { return mean_increment_; }

  /// sum_k p_k (u^{k+1} - u), no domain check.
  double nonlinearity(double u) const noexcept;

  /// Number of additional particles (k >= 1) for a uniform variate in [0,1).
  std::size_t sample_increment(double uniform) const noexcept;

 private:
  std::vector<double> probs_;
  std::vector<double> cdf_;
  double mean_increment_ = 0.0;
};

/// Switching rates, branching rate and offspring law shared by every layer.
/// For Variant::Classical the switching rates are unused and must be zero.
struct ModelParams {
  Variant variant = Variant::SeedBank;
  double c = 1.0;        ///< active -> dormant
  double c_prime = 1.0;  ///< dormant -> active
  double kappa = 1.0;    ///< branching rate
  OffspringLaw law = OffspringLaw::binary();
};

/// Throws DomainError when an invariant of ModelParams is violated.
void validate(const ModelParams& params);

/// Validating constructor.
ModelParams make_params(Variant variant, double c, double c_prime, double kappa,
                        OffspringLaw law = OffspringLaw::binary());

/// c = c' = kappa = 1 with binary branching (c = c' = 0 for Classical).
ModelParams unit_params(Variant variant);

/// Linear growth rate of the selection term at u = 1: s = kappa * sum_k p_k k.
double effective_selection(const ModelParams& params);

/// Copy of params with kappa rescaled so that effective_selection equals s.
ModelParams with_selection(ModelParams params, double s);

/// Same rates and law, different variant (switching rates zeroed for Classical).
ModelParams with_variant(ModelParams params, Variant variant);

/// kappa * sum_k p_k (u^{k+1} - u). Throws DomainError for u outside [0,1].
double selection_term(double u, const ModelParams& params);

/// One-line key=value echo, e.g. "variant=seedbank c=1 c_prime=1 kappa=1 offspring=1".
std::string describe(const ModelParams& params);

}  // namespace dormancy
