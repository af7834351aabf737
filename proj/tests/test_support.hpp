#pragma once

// Independent oracles and instance builders for the test suites. Nothing here
// goes through CoverageCounter or the solvers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <random>
#include <vector>

#include "faircover/objective.hpp"
#include "faircover/snapshot.hpp"
#include "faircover/types.hpp"

namespace faircover::testing {

inline Catalog make_catalog(std::size_t stakeholders,
                            const std::vector<std::vector<std::uint32_t>>& memberships,
                            const std::vector<double>& costs = {}) {
  std::vector<std::string> names;
  for (std::size_t s = 0; s < stakeholders; ++s) names.push_back("s" + std::to_string(s));
  std::vector<ItemRecord> items;
  for (std::size_t i = 0; i < memberships.size(); ++i) {
    ItemRecord rec;
    rec.item = ItemId{static_cast<std::uint32_t>(i)};
    for (auto s : memberships[i]) rec.memberships.push_back(StakeholderId{s});
    std::sort(rec.memberships.begin(), rec.memberships.end());
    rec.cost = costs.empty() ? 0.0 : costs[i];
    items.push_back(std::move(rec));
  }
  return Catalog(std::move(names), std::move(items));
}

inline BuyerQuery make_query(const std::vector<std::uint32_t>& ids, const std::vector<double>& utilities = {},
                             std::string buyer = "b") {
  BuyerQuery q{std::move(buyer), {}};
  for (std::size_t i = 0; i < ids.size(); ++i)
    q.candidates.push_back({ItemId{ids[i]}, utilities.empty() ? 1.0 : utilities[i]});
  return q;
}

struct RandomInstanceOptions {
  std::size_t items = 10;
  std::size_t stakeholders = 3;
  double membership = 0.4;
  double cost_high = 0.05;
  double utility_low = 0.05;
  double utility_high = 1.0;
};

/// A catalog plus one buyer whose candidate set is the whole catalog. Uses
/// std::mt19937_64 with std distributions: reproducible on one toolchain,
/// which is all a test needs.
inline Snapshot random_instance(std::uint64_t seed, const RandomInstanceOptions& o = {}) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<std::vector<std::uint32_t>> members(o.items);
  std::vector<double> costs(o.items);
  for (std::size_t i = 0; i < o.items; ++i) {
    for (std::uint32_t s = 0; s < o.stakeholders; ++s)
      if (unit(gen) < o.membership) members[i].push_back(s);
    costs[i] = o.cost_high * unit(gen);
  }
  auto catalog = make_catalog(o.stakeholders, members, costs);
  std::vector<std::uint32_t> ids(o.items);
  std::vector<double> utilities(o.items);
  for (std::size_t i = 0; i < o.items; ++i) {
    ids[i] = static_cast<std::uint32_t>(i);
    utilities[i] = o.utility_low + (o.utility_high - o.utility_low) * unit(gen);
  }
  std::vector<BuyerQuery> queries{make_query(ids, utilities, "b" + std::to_string(seed))};
  return Snapshot{std::move(catalog), std::move(queries)};
}

/// Coverage objective written straight from its definition.
inline double oracle_coverage(const Catalog& catalog, const BuyerQuery& query,
                              const std::vector<ItemId>& chosen, std::size_t k) {
  double total = 0.0;
  for (std::uint32_t s = 0; s < catalog.stakeholder_count(); ++s) {
    double in_candidates = 0;
    for (const auto& c : query.candidates) {
      const auto m = catalog.memberships(c.item);
      if (std::find(m.begin(), m.end(), StakeholderId{s}) != m.end()) in_candidates += 1;
    }
    double in_chosen = 0;
    for (auto id : chosen) {
      const auto m = catalog.memberships(id);
      if (std::find(m.begin(), m.end(), StakeholderId{s}) != m.end()) in_chosen += 1;
    }
    const double delta = in_candidates / static_cast<double>(query.candidates.size());
    total += std::min(in_chosen / static_cast<double>(k), delta);
  }
  return total;
}

/// Fair coverage condition checked with integer cross-multiplication.
inline bool oracle_is_fair(const Catalog& catalog, const BuyerQuery& query,
                           const std::vector<ItemId>& chosen, std::size_t k) {
  for (std::uint32_t s = 0; s < catalog.stakeholder_count(); ++s) {
    std::int64_t in_candidates = 0, in_chosen = 0;
    for (const auto& c : query.candidates)
      for (auto m : catalog.memberships(c.item)) in_candidates += m.value == s;
    for (auto id : chosen)
      for (auto m : catalog.memberships(id)) in_chosen += m.value == s;
    // in_chosen / k >= in_candidates / |U_b|
    if (in_chosen * static_cast<std::int64_t>(query.candidates.size()) <
        in_candidates * static_cast<std::int64_t>(k))
      return false;
  }
  return true;
}

/// Per-item auxiliary value for the plain modes, written from the formulas.
inline double oracle_item_aux(AuxMode mode, const Catalog& catalog, const Candidate& c) {
  switch (mode) {
    case AuxMode::UtilityMax: return c.utility;
    case AuxMode::CostPerUtilityMin: return catalog.cost(c.item) / c.utility;
    default: return 0.0;
  }
}

inline double oracle_combined(const ObjectiveSpec& spec, const Catalog& catalog, const BuyerQuery& query,
                              const std::vector<ItemId>& chosen) {
  const double f = oracle_coverage(catalog, query, chosen, spec.k);
  double g = 0.0;
  for (auto id : chosen)
    for (const auto& c : query.candidates)
      if (c.item == id) g += oracle_item_aux(spec.aux, catalog, c);
  if (spec.aux == AuxMode::NoAux) return spec.alpha * f;
  if (is_minimization(spec.aux)) return spec.alpha * f - (1 - spec.alpha) * g;
  return spec.alpha * f + (1 - spec.alpha) * g;
}

struct OracleOptimum {
  std::vector<ItemId> chosen;
  double combined = -std::numeric_limits<double>::infinity();
  double coverage = 0.0;
  double aux = 0.0;
};

/// Best subset by bitmask enumeration over all subsets with size in
/// [min_size, max_size]. Candidates must number at most 20.
inline OracleOptimum oracle_optimum(const ObjectiveSpec& spec, const Catalog& catalog, const BuyerQuery& query,
                                    std::size_t min_size, std::size_t max_size) {
  const auto n = query.candidates.size();
  OracleOptimum best;
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    const auto size = static_cast<std::size_t>(__builtin_popcount(mask));
    if (size < min_size || size > max_size) continue;
    std::vector<ItemId> chosen;
    double g = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1u << i)) {
        chosen.push_back(query.candidates[i].item);
        g += oracle_item_aux(spec.aux, catalog, query.candidates[i]);
      }
    const double v = oracle_combined(spec, catalog, query, chosen);
    if (v > best.combined) {
      best.combined = v;
      best.chosen = chosen;
      best.coverage = oracle_coverage(catalog, query, chosen, spec.k);
      best.aux = g;
    }
  }
  return best;
}

inline constexpr double kOneMinusInvE = 1.0 - 0.36787944117144233;  // 1 - 1/e

}  // namespace faircover::testing
