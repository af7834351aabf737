#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faircover/coverage.hpp"
#include "faircover/types.hpp"

namespace faircover {

enum class AuxMode { UtilityMax, CostPerUtilityMin, CompositeMax, CompositeMin, NoAux };

std::string_view to_string(AuxMode mode);

constexpr bool is_maximization(AuxMode m) {
  return m == AuxMode::UtilityMax || m == AuxMode::CompositeMax;
}
constexpr bool is_minimization(AuxMode m) {
  return m == AuxMode::CostPerUtilityMin || m == AuxMode::CompositeMin;
}

/// Per-item attributes available to the composite objective:
///   "utility"          r_{u,b}
///   "cost"             -c_u
///   "cost_per_utility" -c_u / r_{u,b}
struct CompositeWeight {
  std::string attribute;
  double beta = 0.0;  // in [0, 1]
  friend bool operator==(const CompositeWeight&, const CompositeWeight&) = default;
};

struct ObjectiveSpec {
  double alpha = 1.0;
  std::size_t k = 20;
  AuxMode aux = AuxMode::NoAux;
  std::vector<CompositeWeight> composite_weights;
  double epsilon = 0.1;
  std::uint64_t seed = 0;

  /// Throws ConfigError on alpha outside [0,1], k == 0, epsilon outside (0,1),
  /// or bad composite weights.
  void validate() const;
};

/// Per-candidate auxiliary value, aligned with query.candidates.
///
/// For minimization modes the returned value is the non-negative cost g(u);
/// for CompositeMin this is the negated composite. Throws ValidationError for
/// negative utility under UtilityMax and non-positive utility whenever a ratio
/// is taken, ConfigError for mixed composite signs.
std::vector<double> aux_item_values(const ObjectiveSpec& spec, const BuyerQuery& query,
                                    const Catalog& catalog);

/// CompositeMax when every candidate's composite value is >= 0, CompositeMin
/// when every value is <= 0 (and at least one is negative). Mixed signs throw
/// ConfigError.
AuxMode composite_direction(std::span<const CompositeWeight> weights, const BuyerQuery& query,
                            const Catalog& catalog);

/// G(chosen). Modular: a plain sum of aux_item_values over chosen.
double aux_value(const ObjectiveSpec& spec, const BuyerQuery& query, const Catalog& catalog,
                 std::span<const ItemId> chosen);

/// alpha F + (1 - alpha) G, alpha F - (1 - alpha) G, or alpha F by mode.
constexpr double combine(AuxMode mode, double alpha, double coverage, double aux) {
  if (mode == AuxMode::NoAux) return alpha * coverage;
  if (is_minimization(mode)) return alpha * coverage - (1.0 - alpha) * aux;
  return alpha * coverage + (1.0 - alpha) * aux;
}

double combined_value(const ObjectiveSpec& spec, const FairnessProfile& profile,
                      const BuyerQuery& query, const Catalog& catalog,
                      std::span<const ItemId> chosen);

}  // namespace faircover
