#pragma once

#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "faircover/snapshot.hpp"

namespace faircover {

struct UniformDistribution {
  double low = 0.0;
  double high = 1.0;
};
struct ExponentialDistribution {
  double rate = 1.0;
};
struct LognormalDistribution {
  double mu = 0.0;
  double sigma = 1.0;
};

using UtilityDistribution = std::variant<UniformDistribution, ExponentialDistribution>;
using CostDistribution = std::variant<LognormalDistribution, UniformDistribution>;

/// p_s = 0.4 * 0.75^s
std::vector<double> default_membership_probabilities(std::size_t stakeholders);

/// Synthetic marketplace. Defaults: 5 stakeholders, 2000 items, 200 buyers,
/// each buyer seeing 5-15% of the catalog.
struct GeneratorConfig {
  std::size_t n_items = 2000;
  std::size_t m_buyers = 200;
  std::size_t t_stakeholders = 5;
  std::vector<double> membership_probabilities = default_membership_probabilities(5);
  /// true: every stakeholder joins independently with its probability.
  /// false: at most one stakeholder per item, drawn with p_s / max(1, sum p).
  bool multi_membership = true;
  std::pair<double, double> candidate_fraction{0.05, 0.15};
  UtilityDistribution utility = UniformDistribution{0.05, 1.0};
  CostDistribution cost = LognormalDistribution{12.5, 0.5};
  std::uint64_t seed = 42;

  void validate() const;  // throws ValidationError
};

/// Deterministic in config (including seed). Candidate lists are sorted by id.
Snapshot generate_instance(const GeneratorConfig& config);

}  // namespace faircover
