#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "faircover/coverage.hpp"
#include "faircover/objective.hpp"
#include "faircover/types.hpp"

namespace faircover {

enum class SolverKind { Greedy, LazyGreedy, DistortedGreedy, StochasticDistortedGreedy, BruteForce };

std::string_view to_string(SolverKind kind);

/// Absolute tolerance under which two gains count as tied; ties go to the
/// smaller ItemId.
inline constexpr double kTieTolerance = 1e-9;

/// Hard limit on the number of subsets solve_brute_force will enumerate.
inline constexpr std::uint64_t kBruteForceLimit = 10'000'000;

/// Throws ConfigError when the solver cannot optimize the aux mode.
void check_compatibility(SolverKind kind, AuxMode mode);

struct SolveReport {
  std::string buyer;
  SolverKind solver = SolverKind::Greedy;
  std::vector<ItemId> chosen;  // selection order
  double coverage_value = 0.0;
  double aux_value = 0.0;
  double combined_value = 0.0;
  std::vector<std::int64_t> deltas;  // indexed by StakeholderId
  std::uint64_t oracle_calls = 0;
  std::chrono::nanoseconds wall_time{0};
  std::uint64_t seed_used = 0;
  std::vector<std::size_t> sample_sizes;  // stochastic only: items evaluated per round

  /// Equality ignoring wall_time.
  bool same_result(const SolveReport& other) const;
};

/// Lazy-greedy heap entry.
struct HeapEntry {
  ItemId item;
  double cached_gain = 0.0;
  std::size_t stale_round = 0;  // round in which cached_gain was computed
};

/// Max-heap order: larger cached_gain first, then smaller ItemId.
struct HeapOrder {
  bool operator()(const HeapEntry& a, const HeapEntry& b) const {
    if (a.cached_gain != b.cached_gain) return a.cached_gain < b.cached_gain;
    return a.item > b.item;
  }
};

/// ceil((candidates / k) * ln(1 / epsilon))
std::size_t stochastic_sample_size(std::size_t candidates, std::size_t k, double epsilon);

SolveReport solve_greedy(const Catalog& catalog, const BuyerQuery& query, const ObjectiveSpec& spec);
SolveReport solve_lazy_greedy(const Catalog& catalog, const BuyerQuery& query,
                              const ObjectiveSpec& spec);
SolveReport solve_distorted_greedy(const Catalog& catalog, const BuyerQuery& query,
                                   const ObjectiveSpec& spec);
SolveReport solve_stochastic_distorted_greedy(const Catalog& catalog, const BuyerQuery& query,
                                              const ObjectiveSpec& spec);

struct BruteForceResult {
  /// Best subset of size exactly min(k, |U_b|).
  SolveReport exact_k;
  /// Best subset of size <= k (empty set included). Minimization modes only.
  std::optional<SolveReport> at_most_k;
};

/// Exhaustive search. Ties go to the lexicographically smallest sorted id
/// sequence. Throws TooLargeError above kBruteForceLimit subsets.
BruteForceResult solve_brute_force(const Catalog& catalog, const BuyerQuery& query,
                                   const ObjectiveSpec& spec);

/// Dispatch by kind. BruteForce yields the exact_k report.
SolveReport solve(SolverKind kind, const Catalog& catalog, const BuyerQuery& query,
                  const ObjectiveSpec& spec);

struct BatchEntry {
  std::string buyer;
  std::optional<SolveReport> report;
  std::string error;  // set when report is empty
  bool ok() const noexcept { return report.has_value(); }
};

/// Solves every query independently on `parallelism` worker threads. Output
/// is in input order and does not depend on parallelism; a failing query
/// produces an error entry without stopping the others.
std::vector<BatchEntry> solve_batch(const Catalog& catalog, std::span<const BuyerQuery> queries,
                                    const ObjectiveSpec& spec, SolverKind kind,
                                    std::size_t parallelism);

}  // namespace faircover
