#include "faircover/objective.hpp"

#include <cmath>
#include <unordered_map>

#include "faircover/errors.hpp"

namespace faircover {

std::string_view to_string(AuxMode mode) {
  switch (mode) {
    case AuxMode::UtilityMax: return "utility-max";
    case AuxMode::CostPerUtilityMin: return "cost-per-utility-min";
    case AuxMode::CompositeMax: return "composite-max";
    case AuxMode::CompositeMin: return "composite-min";
    case AuxMode::NoAux: return "none";
  }
  return "?";
}

void ObjectiveSpec::validate() const {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw ConfigError("alpha must lie in [0, 1], got " + std::to_string(alpha));
  if (k == 0) throw ConfigError("k must be at least 1");
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw ConfigError("epsilon must lie in (0, 1), got " + std::to_string(epsilon));
  const bool composite = aux == AuxMode::CompositeMax || aux == AuxMode::CompositeMin;
  if (composite && composite_weights.empty())
    throw ConfigError("composite auxiliary objective needs at least one weight");
  for (const auto& w : composite_weights) {
    if (w.attribute != "utility" && w.attribute != "cost" && w.attribute != "cost_per_utility")
      throw ConfigError("unknown composite attribute '" + w.attribute +
                        "' (expected utility, cost or cost_per_utility)");
    if (!(w.beta >= 0.0 && w.beta <= 1.0))
      throw ConfigError("composite weight for '" + w.attribute + "' must lie in [0, 1]");
  }
}

namespace {

std::string item_label(const BuyerQuery& query, ItemId id) {
  return "item " + std::to_string(id.value) + " for buyer '" + query.buyer + "'";
}

double composite_raw(std::span<const CompositeWeight> weights, const BuyerQuery& query,
                     const Candidate& c, const Catalog& catalog) {
  double value = 0.0;
  for (const auto& w : weights) {
    if (w.attribute == "utility") {
      value += w.beta * c.utility;
    } else if (w.attribute == "cost") {
      value += w.beta * -catalog.cost(c.item);
    } else if (w.attribute == "cost_per_utility") {
      if (!(c.utility > 0.0))
        throw ValidationError(item_label(query, c.item) +
                              " has non-positive utility; cost per utility is undefined");
      value += w.beta * -(catalog.cost(c.item) / c.utility);
    } else {
      throw ConfigError("unknown composite attribute '" + w.attribute + "'");
    }
  }
  return value;
}

}  // namespace

AuxMode composite_direction(std::span<const CompositeWeight> weights, const BuyerQuery& query,
                            const Catalog& catalog) {
  bool any_positive = false;
  bool any_negative = false;
  for (const auto& c : query.candidates) {
    const double v = composite_raw(weights, query, c, catalog);
    any_positive |= v > 0.0;
    any_negative |= v < 0.0;
  }
  if (any_positive && any_negative)
    throw ConfigError("sign of composite auxiliary cannot be verified in advance for buyer '" +
                      query.buyer + "': per-item values have mixed signs");
  return any_negative ? AuxMode::CompositeMin : AuxMode::CompositeMax;
}

std::vector<double> aux_item_values(const ObjectiveSpec& spec, const BuyerQuery& query,
                                    const Catalog& catalog) {
  std::vector<double> values(query.candidates.size(), 0.0);
  switch (spec.aux) {
    case AuxMode::NoAux:
      break;
    case AuxMode::UtilityMax:
      for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& c = query.candidates[i];
        if (c.utility < 0.0)
          throw ValidationError(item_label(query, c.item) +
                                " has negative utility; utility maximization needs r >= 0");
        values[i] = c.utility;
      }
      break;
    case AuxMode::CostPerUtilityMin:
      for (std::size_t i = 0; i < values.size(); ++i) {
        const auto& c = query.candidates[i];
        if (!(c.utility > 0.0))
          throw ValidationError(item_label(query, c.item) +
                                " has non-positive utility; cost per utility needs r > 0");
        values[i] = catalog.cost(c.item) / c.utility;
      }
      break;
    case AuxMode::CompositeMax:
    case AuxMode::CompositeMin: {
      const auto direction = composite_direction(spec.composite_weights, query, catalog);
      bool all_zero = true;
      for (std::size_t i = 0; i < values.size(); ++i) {
        values[i] = composite_raw(spec.composite_weights, query, query.candidates[i], catalog);
        all_zero &= values[i] == 0.0;
      }
      if (direction != spec.aux && !all_zero) {
        throw ConfigError("composite auxiliary values for buyer '" + query.buyer + "' are " +
                          (direction == AuxMode::CompositeMin ? "non-positive" : "non-negative") +
                          ", which does not match mode " + std::string(to_string(spec.aux)));
      }
      if (spec.aux == AuxMode::CompositeMin)
        for (double& v : values) v = -v;
      break;
    }
  }
  return values;
}

double aux_value(const ObjectiveSpec& spec, const BuyerQuery& query, const Catalog& catalog,
                 std::span<const ItemId> chosen) {
  const auto values = aux_item_values(spec, query, catalog);
  std::unordered_map<std::uint32_t, std::size_t> index;
  index.reserve(query.candidates.size());
  for (std::size_t i = 0; i < query.candidates.size(); ++i)
    index.emplace(query.candidates[i].item.value, i);
  double total = 0.0;
  for (auto id : chosen) {
    auto it = index.find(id.value);
    if (it == index.end())
      throw PreconditionError("item " + std::to_string(id.value) + " is not a candidate of buyer '" +
                              query.buyer + "'");
    total += values[it->second];
  }
  return total;
}

double combined_value(const ObjectiveSpec& spec, const FairnessProfile& profile,
                      const BuyerQuery& query, const Catalog& catalog,
                      std::span<const ItemId> chosen) {
  spec.validate();
  const double coverage = coverage_value(profile, chosen, catalog, spec.k);
  const double aux = aux_value(spec, query, catalog, chosen);
  return combine(spec.aux, spec.alpha, coverage, aux);
}

}  // namespace faircover
