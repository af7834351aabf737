#include "faircover/coverage.hpp"

#include <algorithm>
#include <numeric>

#include "faircover/errors.hpp"

namespace faircover {

namespace {

void check_chosen(std::span<const ItemId> chosen, const Catalog& catalog, std::size_t k) {
  if (k == 0) throw PreconditionError("k must be positive");
  if (chosen.size() > k)
    throw PreconditionError("chosen set has " + std::to_string(chosen.size()) +
                            " items, more than k = " + std::to_string(k));
  std::vector<ItemId> sorted(chosen.begin(), chosen.end());
  std::sort(sorted.begin(), sorted.end());
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    if (!catalog.contains(sorted[i]))
      throw ValidationError("unknown item id " + std::to_string(sorted[i].value));
    if (i > 0 && sorted[i] == sorted[i - 1])
      throw PreconditionError("item " + std::to_string(sorted[i].value) + " chosen twice");
  }
}

std::vector<std::int64_t> tally(std::span<const ItemId> chosen, const Catalog& catalog) {
  std::vector<std::int64_t> counts(catalog.stakeholder_count(), 0);
  for (auto id : chosen)
    for (auto s : catalog.memberships(id)) ++counts[s.value];
  return counts;
}

}  // namespace

FairnessProfile::FairnessProfile(std::vector<std::int64_t> member_counts,
                                 std::int64_t candidate_count)
    : members_(std::move(member_counts)), candidates_(candidate_count) {
  if (candidates_ <= 0) throw ValidationError("fairness profile needs a non-empty candidate set");
  for (auto m : members_)
    if (m < 0 || m > candidates_)
      throw ValidationError("stakeholder member count outside [0, |U_b|]");
}

double FairnessProfile::threshold_sum() const noexcept {
  double sum = 0.0;
  for (auto m : members_) sum += static_cast<double>(m) / static_cast<double>(candidates_);
  return sum;
}

FairnessProfile compute_fairness_profile(const Catalog& catalog, const BuyerQuery& query) {
  validate_query(catalog, query);
  std::vector<std::int64_t> members(catalog.stakeholder_count(), 0);
  for (const auto& c : query.candidates)
    for (auto s : catalog.memberships(c.item)) ++members[s.value];
  return FairnessProfile(std::move(members), static_cast<std::int64_t>(query.candidates.size()));
}

CoverageCounter::CoverageCounter(const FairnessProfile& profile, const Catalog& catalog,
                                 std::size_t k)
    : profile_(&profile), catalog_(&catalog), k_(k), counts_(profile.stakeholder_count(), 0) {
  if (k == 0) throw PreconditionError("k must be positive");
  if (profile.stakeholder_count() != catalog.stakeholder_count())
    throw PreconditionError("profile and catalog disagree on the stakeholder count");
}

// min((c+1)/k, delta) - min(c/k, delta), branching on integers so the
// saturation point is exact.
double CoverageCounter::increment(std::size_t s) const {
  const auto c = counts_[s];
  const auto k = static_cast<std::int64_t>(k_);
  const auto num = profile_->member_count(StakeholderId{static_cast<std::uint32_t>(s)});
  const auto den = profile_->candidate_count();
  if ((c + 1) * den <= num * k) return 1.0 / static_cast<double>(k);
  if (c * den < num * k)
    return static_cast<double>(num) / static_cast<double>(den) -
           static_cast<double>(c) / static_cast<double>(k);
  return 0.0;
}

double CoverageCounter::gain(ItemId item) const {
  double g = 0.0;
  for (auto s : catalog_->memberships(item)) g += increment(s.value);
  return g;
}

void CoverageCounter::add(ItemId item) {
  for (auto s : catalog_->memberships(item)) ++counts_[s.value];
}

void CoverageCounter::remove(ItemId item) {
  for (auto s : catalog_->memberships(item)) {
    if (counts_[s.value] == 0) throw PreconditionError("removing an item that was never added");
    --counts_[s.value];
  }
}

double CoverageCounter::value() const {
  const auto k = static_cast<std::int64_t>(k_);
  const auto den = profile_->candidate_count();
  double total = 0.0;
  for (std::size_t s = 0; s < counts_.size(); ++s) {
    const auto num = profile_->member_count(StakeholderId{static_cast<std::uint32_t>(s)});
    if (counts_[s] * den >= num * k)
      total += static_cast<double>(num) / static_cast<double>(den);
    else
      total += static_cast<double>(counts_[s]) / static_cast<double>(k);
  }
  return total;
}

double coverage_value(const FairnessProfile& profile, std::span<const ItemId> chosen,
                      const Catalog& catalog, std::size_t k) {
  check_chosen(chosen, catalog, k);
  CoverageCounter counter(profile, catalog, k);
  for (auto id : chosen) counter.add(id);
  return counter.value();
}

double coverage_marginal(const FairnessProfile& profile, std::span<const ItemId> chosen,
                         ItemId candidate, const Catalog& catalog, std::size_t k) {
  check_chosen(chosen, catalog, k);
  if (!catalog.contains(candidate))
    throw ValidationError("unknown item id " + std::to_string(candidate.value));
  if (std::find(chosen.begin(), chosen.end(), candidate) != chosen.end())
    throw PreconditionError("item " + std::to_string(candidate.value) + " is already chosen");
  CoverageCounter counter(profile, catalog, k);
  for (auto id : chosen) counter.add(id);
  return counter.gain(candidate);
}

std::vector<std::int64_t> fairness_deltas(const FairnessProfile& profile,
                                          std::span<const ItemId> chosen,
                                          const Catalog& catalog, std::size_t k) {
  check_chosen(chosen, catalog, k);
  const auto counts = tally(chosen, catalog);
  const auto den = profile.candidate_count();
  const auto kk = static_cast<std::int64_t>(k);
  std::vector<std::int64_t> deltas(counts.size());
  for (std::size_t s = 0; s < counts.size(); ++s) {
    // k (count/k - num/den) = (count*den - k*num) / den, ceiling of a ratio
    // with positive denominator.
    const auto num = profile.member_count(StakeholderId{static_cast<std::uint32_t>(s)});
    const auto diff = counts[s] * den - kk * num;
    auto q = diff / den;
    if (diff % den != 0 && diff > 0) ++q;
    deltas[s] = q;
  }
  return deltas;
}

bool satisfies_fair_coverage(const FairnessProfile& profile, std::span<const ItemId> chosen,
                             const Catalog& catalog, std::size_t k) {
  check_chosen(chosen, catalog, k);
  const auto counts = tally(chosen, catalog);
  const auto den = profile.candidate_count();
  const auto kk = static_cast<std::int64_t>(k);
  for (std::size_t s = 0; s < counts.size(); ++s) {
    const auto num = profile.member_count(StakeholderId{static_cast<std::uint32_t>(s)});
    if (counts[s] * den < num * kk) return false;
  }
  return true;
}

std::vector<ProviderCheck> provider_constraint_check(const Catalog& catalog,
                                                     std::span<const BuyerQuery> queries,
                                                     std::span<const std::vector<ItemId>> chosen,
                                                     std::size_t k) {
  if (queries.size() != chosen.size())
    throw PreconditionError("need exactly one chosen set per query");
  if (k == 0) throw PreconditionError("k must be positive");
  std::vector<std::int64_t> totals(catalog.stakeholder_count(), 0);
  for (const auto& set : chosen) {
    check_chosen(set, catalog, k);
    const auto counts = tally(set, catalog);
    for (std::size_t s = 0; s < counts.size(); ++s) totals[s] += counts[s];
  }
  const auto m = static_cast<std::int64_t>(queries.size());
  const auto n = static_cast<std::int64_t>(catalog.item_count());
  const auto kk = static_cast<std::int64_t>(k);
  std::vector<ProviderCheck> out(totals.size());
  for (std::size_t s = 0; s < totals.size(); ++s) {
    const auto inventory =
        static_cast<std::int64_t>(catalog.inventory_size(StakeholderId{static_cast<std::uint32_t>(s)}));
    auto& check = out[s];
    check.required = static_cast<double>(inventory) / static_cast<double>(n);
    if (m == 0) {
      check.achieved = 0.0;
      check.satisfied = inventory == 0;
      continue;
    }
    check.achieved = static_cast<double>(totals[s]) / static_cast<double>(m * kk);
    // totals / (m k) >= inventory / n
    check.satisfied = totals[s] * n >= inventory * m * kk;
  }
  return out;
}

}  // namespace faircover
