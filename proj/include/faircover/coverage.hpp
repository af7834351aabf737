#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "faircover/types.hpp"

namespace faircover {

/// Exact non-negative fraction num/den, den > 0. Not reduced.
struct Ratio {
  std::int64_t num = 0;
  std::int64_t den = 1;

  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }

  friend bool operator==(Ratio a, Ratio b) noexcept { return a.num * b.den == b.num * a.den; }
  friend std::strong_ordering operator<=>(Ratio a, Ratio b) noexcept {
    return a.num * b.den <=> b.num * a.den;
  }
};

/// Per-buyer fair coverage thresholds delta_{s,b} = |U_b(s)| / |U_b|.
///
/// Kept as integer counts; the double view is derived on demand. Every
/// stakeholder of the catalog has an entry, zero when it has no candidate.
class FairnessProfile {
 public:
  FairnessProfile(std::vector<std::int64_t> member_counts, std::int64_t candidate_count);

  std::size_t stakeholder_count() const noexcept { return members_.size(); }
  std::int64_t candidate_count() const noexcept { return candidates_; }
  /// |U_b(s)|
  std::int64_t member_count(StakeholderId s) const { return members_.at(s.value); }

  Ratio threshold(StakeholderId s) const { return {member_count(s), candidates_}; }
  double threshold_value(StakeholderId s) const { return threshold(s).value(); }

  /// Upper bound of the coverage objective: sum of all thresholds.
  double threshold_sum() const noexcept;

  friend bool operator==(const FairnessProfile&, const FairnessProfile&) = default;

 private:
  std::vector<std::int64_t> members_;
  std::int64_t candidates_;
};

FairnessProfile compute_fairness_profile(const Catalog& catalog, const BuyerQuery& query);

/// Incremental state for the coverage objective
///   F(R) = sum_s min(|R ∩ U(s)| / k, delta_s).
///
/// Both value() and gain() depend only on the per-stakeholder counts, so two
/// counters holding the same set always agree bit for bit.
class CoverageCounter {
 public:
  CoverageCounter(const FairnessProfile& profile, const Catalog& catalog, std::size_t k);

  /// F(u | R). Does not check membership of u in R.
  double gain(ItemId item) const;
  void add(ItemId item);
  void remove(ItemId item);
  double value() const;

  std::span<const std::int64_t> counts() const noexcept { return counts_; }
  std::size_t k() const noexcept { return k_; }

 private:
  double increment(std::size_t s) const;

  const FairnessProfile* profile_;
  const Catalog* catalog_;
  std::size_t k_;
  std::vector<std::int64_t> counts_;
};

/// F(chosen). Throws PreconditionError for duplicates, |chosen| > k or k == 0.
double coverage_value(const FairnessProfile& profile, std::span<const ItemId> chosen,
                      const Catalog& catalog, std::size_t k);

/// F(candidate | chosen). Throws PreconditionError if candidate is in chosen.
double coverage_marginal(const FairnessProfile& profile, std::span<const ItemId> chosen,
                         ItemId candidate, const Catalog& catalog, std::size_t k);

/// Delta_{s,b} = ceil(k (eta_{s,b} - delta_{s,b})), evaluated in integers.
/// Since k eta is an integer this is count - floor(k delta): an entry is >= 0
/// exactly when the count reaches floor(k delta).
std::vector<std::int64_t> fairness_deltas(const FairnessProfile& profile,
                                          std::span<const ItemId> chosen,
                                          const Catalog& catalog, std::size_t k);

/// The fair coverage inequality |R ∩ U(s)| / k >= delta_s for every s, decided
/// exactly. Stronger than "all deltas >= 0" when k * delta_s is fractional.
bool satisfies_fair_coverage(const FairnessProfile& profile, std::span<const ItemId> chosen,
                             const Catalog& catalog, std::size_t k);

struct ProviderCheck {
  double achieved = 0.0;  // sum_b |R_b ∩ U(s)| / (m k)
  double required = 0.0;  // |U(s)| / n
  bool satisfied = false; // decided on integers, not on the doubles above
};

/// Global provider constraint, one entry per stakeholder. chosen[i] is the
/// recommendation for queries[i].
std::vector<ProviderCheck> provider_constraint_check(const Catalog& catalog,
                                                     std::span<const BuyerQuery> queries,
                                                     std::span<const std::vector<ItemId>> chosen,
                                                     std::size_t k);

}  // namespace faircover
