#include "faircover/solvers.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <thread>

#include "faircover/errors.hpp"
#include "faircover/rng.hpp"

namespace faircover {

std::string_view to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::Greedy: return "greedy";
    case SolverKind::LazyGreedy: return "lazy";
    case SolverKind::DistortedGreedy: return "distorted";
    case SolverKind::StochasticDistortedGreedy: return "stochastic";
    case SolverKind::BruteForce: return "brute";
  }
  return "?";
}

void check_compatibility(SolverKind kind, AuxMode mode) {
  switch (kind) {
    case SolverKind::Greedy:
    case SolverKind::LazyGreedy:
      if (is_minimization(mode))
        throw ConfigError(std::string(to_string(kind)) + " cannot optimize the minimization aux mode " +
                          std::string(to_string(mode)) + "; use the distorted greedy solvers");
      break;
    case SolverKind::DistortedGreedy:
    case SolverKind::StochasticDistortedGreedy:
      if (is_maximization(mode))
        throw ConfigError(std::string(to_string(kind)) + " cannot optimize the maximization aux mode " +
                          std::string(to_string(mode)) + "; use greedy or lazy greedy");
      break;
    case SolverKind::BruteForce:
      break;
  }
}

bool SolveReport::same_result(const SolveReport& o) const {
  return buyer == o.buyer && solver == o.solver && chosen == o.chosen &&
         coverage_value == o.coverage_value && aux_value == o.aux_value &&
         combined_value == o.combined_value && deltas == o.deltas &&
         oracle_calls == o.oracle_calls && seed_used == o.seed_used &&
         sample_sizes == o.sample_sizes;
}

std::size_t stochastic_sample_size(std::size_t candidates, std::size_t k, double epsilon) {
  if (k == 0) throw ConfigError("k must be at least 1");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ConfigError("epsilon must lie in (0, 1)");
  const double s = static_cast<double>(candidates) / static_cast<double>(k) * std::log(1.0 / epsilon);
  return static_cast<std::size_t>(std::ceil(s));
}

namespace {

using Clock = std::chrono::steady_clock;

/// One buyer's instance with candidates reindexed in ascending ItemId order,
/// so index order is tie-break order.
struct BuyerProblem {
  const Catalog& catalog;
  const BuyerQuery& query;
  const ObjectiveSpec& spec;
  FairnessProfile profile;
  std::vector<ItemId> items;
  std::vector<double> aux;  // non-negative for every mode the solvers accept
  std::size_t target;       // min(k, |U_b|)

  BuyerProblem(const Catalog& c, const BuyerQuery& q, const ObjectiveSpec& s)
      : catalog(c), query(q), spec(s), profile(compute_fairness_profile(c, q)) {
    spec.validate();
    const auto raw = aux_item_values(spec, query, catalog);
    std::vector<std::size_t> order(query.candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return query.candidates[a].item < query.candidates[b].item;
    });
    items.reserve(order.size());
    aux.reserve(order.size());
    for (auto i : order) {
      items.push_back(query.candidates[i].item);
      aux.push_back(raw[i]);
    }
    target = std::min(spec.k, items.size());
  }

  std::size_t size() const { return items.size(); }

  /// alpha F(u|R) + (1 - alpha) g(u); NoAux has g == 0.
  double max_gain(const CoverageCounter& cov, std::size_t i) const {
    return spec.alpha * cov.gain(items[i]) + (1.0 - spec.alpha) * aux[i];
  }

  double distorted_gain(const CoverageCounter& cov, std::size_t i, double factor) const {
    return factor * spec.alpha * cov.gain(items[i]) - (1.0 - spec.alpha) * aux[i];
  }

  void require_nonnegative_aux() const {
    for (std::size_t i = 0; i < aux.size(); ++i)
      if (aux[i] < 0.0)
        throw ValidationError("item " + std::to_string(items[i].value) + " for buyer '" +
                              query.buyer + "' has negative auxiliary cost");
  }
};

SolveReport finish_report(const BuyerProblem& p, SolverKind kind, const std::vector<std::size_t>& picks,
                          std::uint64_t calls, Clock::time_point start, std::uint64_t seed) {
  SolveReport r;
  r.buyer = p.query.buyer;
  r.solver = kind;
  r.chosen.reserve(picks.size());
  CoverageCounter cov(p.profile, p.catalog, p.spec.k);
  double aux = 0.0;
  for (auto i : picks) {
    r.chosen.push_back(p.items[i]);
    cov.add(p.items[i]);
    aux += p.aux[i];
  }
  r.coverage_value = cov.value();
  r.aux_value = aux;
  r.combined_value = combine(p.spec.aux, p.spec.alpha, r.coverage_value, r.aux_value);
  r.deltas = fairness_deltas(p.profile, r.chosen, p.catalog, p.spec.k);
  r.oracle_calls = calls;
  r.seed_used = seed;
  r.wall_time = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start);
  return r;
}

/// Smallest index among `indices` whose gain is within tolerance of the max.
/// `indices` must be ascending.
template <typename Gains>
std::size_t pick_best(const std::vector<std::size_t>& indices, const Gains& gain_of) {
  double best = -std::numeric_limits<double>::infinity();
  for (auto i : indices) best = std::max(best, gain_of(i));
  for (auto i : indices)
    if (gain_of(i) >= best - kTieTolerance) return i;
  return indices.front();
}

}  // namespace

SolveReport solve_greedy(const Catalog& catalog, const BuyerQuery& query, const ObjectiveSpec& spec) {
  const auto start = Clock::now();
  check_compatibility(SolverKind::Greedy, spec.aux);
  const BuyerProblem p(catalog, query, spec);
  CoverageCounter cov(p.profile, catalog, spec.k);

  std::vector<std::size_t> remaining(p.size());
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  std::vector<double> gains(p.size(), 0.0);
  std::vector<std::size_t> picks;
  std::uint64_t calls = 0;

  while (picks.size() < p.target) {
    for (auto i : remaining) {
      gains[i] = p.max_gain(cov, i);
      ++calls;
    }
    const auto z = pick_best(remaining, [&](std::size_t i) { return gains[i]; });
    picks.push_back(z);
    cov.add(p.items[z]);
    remaining.erase(std::find(remaining.begin(), remaining.end(), z));
  }
  return finish_report(p, SolverKind::Greedy, picks, calls, start, spec.seed);
}

SolveReport solve_lazy_greedy(const Catalog& catalog, const BuyerQuery& query,
                              const ObjectiveSpec& spec) {
  const auto start = Clock::now();
  check_compatibility(SolverKind::LazyGreedy, spec.aux);
  const BuyerProblem p(catalog, query, spec);
  CoverageCounter cov(p.profile, catalog, spec.k);

  auto index_of = [&](ItemId id) {
    return static_cast<std::size_t>(std::lower_bound(p.items.begin(), p.items.end(), id) -
                                    p.items.begin());
  };

  std::priority_queue<HeapEntry, std::vector<HeapEntry>, HeapOrder> heap;
  std::uint64_t calls = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    heap.push({p.items[i], p.max_gain(cov, i), 0});
    ++calls;
  }

  std::vector<std::size_t> picks;
  std::vector<std::pair<std::size_t, double>> evaluated;  // (index, fresh gain)
  for (std::size_t round = 0; round < p.target; ++round) {
    evaluated.clear();
    double best = -std::numeric_limits<double>::infinity();
    // Cached gains only shrink as R grows, so once the top cached value is
    // below best - tolerance nothing left in the heap can win or tie.
    while (!heap.empty()) {
      const HeapEntry top = heap.top();
      if (!evaluated.empty() && top.cached_gain < best - kTieTolerance) break;
      heap.pop();
      const auto i = index_of(top.item);
      double fresh = top.cached_gain;
      if (top.stale_round != round) {
        fresh = p.max_gain(cov, i);
        ++calls;
      }
      evaluated.emplace_back(i, fresh);
      best = std::max(best, fresh);
    }

    std::size_t z = std::numeric_limits<std::size_t>::max();
    for (const auto& [i, g] : evaluated)
      if (g >= best - kTieTolerance) z = std::min(z, i);
    picks.push_back(z);
    cov.add(p.items[z]);

    if (round + 1 == p.target) break;
    for (const auto& [i, g] : evaluated) {
      if (i == z) continue;
      heap.push({p.items[i], p.max_gain(cov, i), round + 1});
      ++calls;
    }
  }
  return finish_report(p, SolverKind::LazyGreedy, picks, calls, start, spec.seed);
}

namespace {

double distortion(std::size_t k, std::size_t round) {
  // (1 - 1/k)^(k - (round + 1)); std::pow(0, 0) == 1 covers k == 1.
  return std::pow(1.0 - 1.0 / static_cast<double>(k), static_cast<double>(k - (round + 1)));
}

SolveReport run_distorted(const Catalog& catalog, const BuyerQuery& query, const ObjectiveSpec& spec,
                          SolverKind kind) {
  const auto start = Clock::now();
  check_compatibility(kind, spec.aux);
  const BuyerProblem p(catalog, query, spec);
  p.require_nonnegative_aux();
  CoverageCounter cov(p.profile, catalog, spec.k);

  const bool stochastic = kind == SolverKind::StochasticDistortedGreedy;
  const std::uint64_t seed = stochastic ? derive_buyer_seed(spec.seed, query.buyer) : spec.seed;
  Rng rng(seed);
  const std::size_t sample_size =
      stochastic ? stochastic_sample_size(p.size(), spec.k, spec.epsilon) : 0;

  std::vector<std::size_t> remaining(p.size());
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  std::vector<std::size_t> pool;
  std::vector<double> gains(p.size(), 0.0);
  std::vector<std::size_t> picks;
  std::vector<std::size_t> sample_sizes;
  std::uint64_t calls = 0;

  for (std::size_t round = 0; round < spec.k; ++round) {
    if (remaining.empty()) break;
    const std::vector<std::size_t>* candidates = &remaining;
    if (stochastic) {
      if (sample_size < remaining.size()) {
        pool.clear();
        for (std::size_t d = 0; d < sample_size; ++d)
          pool.push_back(remaining[rng.below(remaining.size())]);
        std::sort(pool.begin(), pool.end());
        pool.erase(std::unique(pool.begin(), pool.end()), pool.end());
        candidates = &pool;
      }
      sample_sizes.push_back(candidates->size());
    }

    const double factor = distortion(spec.k, round);
    for (auto i : *candidates) {
      gains[i] = p.distorted_gain(cov, i, factor);
      ++calls;
    }
    const auto z = pick_best(*candidates, [&](std::size_t i) { return gains[i]; });
    if (gains[z] > 0.0) {
      picks.push_back(z);
      cov.add(p.items[z]);
      remaining.erase(std::find(remaining.begin(), remaining.end(), z));
    }
  }
  auto report = finish_report(p, kind, picks, calls, start, seed);
  report.sample_sizes = std::move(sample_sizes);
  return report;
}

}  // namespace

SolveReport solve_distorted_greedy(const Catalog& catalog, const BuyerQuery& query,
                                   const ObjectiveSpec& spec) {
  return run_distorted(catalog, query, spec, SolverKind::DistortedGreedy);
}

SolveReport solve_stochastic_distorted_greedy(const Catalog& catalog, const BuyerQuery& query,
                                              const ObjectiveSpec& spec) {
  return run_distorted(catalog, query, spec, SolverKind::StochasticDistortedGreedy);
}

namespace {

constexpr std::uint64_t kSaturated = std::numeric_limits<std::uint64_t>::max();

std::uint64_t binomial_capped(std::uint64_t n, std::uint64_t r) {
  if (r > n) return 0;
  r = std::min(r, n - r);
  unsigned __int128 acc = 1;
  for (std::uint64_t i = 1; i <= r; ++i) {
    acc = acc * (n - r + i) / i;
    if (acc >= kSaturated) return kSaturated;
  }
  return static_cast<std::uint64_t>(acc);
}

/// Depth-first enumeration of index subsets in lexicographic order. visit()
/// sees every subset whose size is in [min_size, max_size].
class SubsetWalker {
 public:
  SubsetWalker(const BuyerProblem& p, std::size_t min_size, std::size_t max_size)
      : p_(p), cov_(p.profile, p.catalog, p.spec.k), min_(min_size), max_(max_size) {}

  template <typename Visit>
  void run(Visit&& visit) {
    current_.clear();
    walk(0, 0.0, visit);
  }

  const std::vector<std::size_t>& current() const { return current_; }

 private:
  template <typename Visit>
  void walk(std::size_t from, double aux_sum, Visit& visit) {
    if (current_.size() >= min_) {
      visit(combine(p_.spec.aux, p_.spec.alpha, cov_.value(), aux_sum));
    }
    if (current_.size() == max_) return;
    const std::size_t needed = min_ > current_.size() + 1 ? min_ - current_.size() - 1 : 0;
    for (std::size_t i = from; i + needed < p_.size(); ++i) {
      current_.push_back(i);
      cov_.add(p_.items[i]);
      walk(i + 1, aux_sum + p_.aux[i], visit);
      cov_.remove(p_.items[i]);
      current_.pop_back();
    }
  }

  const BuyerProblem& p_;
  CoverageCounter cov_;
  std::size_t min_;
  std::size_t max_;
  std::vector<std::size_t> current_;
};

SolveReport best_subset(const BuyerProblem& p, std::size_t min_size, std::size_t max_size,
                        Clock::time_point start) {
  SubsetWalker walker(p, min_size, max_size);
  std::uint64_t calls = 0;
  double best = -std::numeric_limits<double>::infinity();
  walker.run([&](double v) {
    ++calls;
    best = std::max(best, v);
  });
  std::vector<std::size_t> winner;
  bool found = false;
  walker.run([&](double v) {
    ++calls;
    if (!found && v >= best - kTieTolerance) {
      winner = walker.current();
      found = true;
    }
  });
  return finish_report(p, SolverKind::BruteForce, winner, calls, start, p.spec.seed);
}

}  // namespace

BruteForceResult solve_brute_force(const Catalog& catalog, const BuyerQuery& query,
                                   const ObjectiveSpec& spec) {
  const auto start = Clock::now();
  const BuyerProblem p(catalog, query, spec);
  const bool minimization = is_minimization(spec.aux);

  std::uint64_t count = 0;
  if (minimization) {
    for (std::size_t j = 0; j <= p.target; ++j) {
      const auto c = binomial_capped(p.size(), j);
      count = (c == kSaturated || count + c < count) ? kSaturated : count + c;
      if (count == kSaturated) break;
    }
  } else {
    count = binomial_capped(p.size(), p.target);
  }
  if (count > kBruteForceLimit) {
    throw TooLargeError("brute force refused for buyer '" + query.buyer + "': " +
                            (count == kSaturated ? std::string("more than 2^64 - 1")
                                                 : std::to_string(count)) +
                            " subsets exceed the limit of " + std::to_string(kBruteForceLimit),
                        count);
  }

  BruteForceResult result{best_subset(p, p.target, p.target, start), std::nullopt};
  if (minimization) result.at_most_k = best_subset(p, 0, p.target, start);
  return result;
}

SolveReport solve(SolverKind kind, const Catalog& catalog, const BuyerQuery& query,
                  const ObjectiveSpec& spec) {
  switch (kind) {
    case SolverKind::Greedy: return solve_greedy(catalog, query, spec);
    case SolverKind::LazyGreedy: return solve_lazy_greedy(catalog, query, spec);
    case SolverKind::DistortedGreedy: return solve_distorted_greedy(catalog, query, spec);
    case SolverKind::StochasticDistortedGreedy:
      return solve_stochastic_distorted_greedy(catalog, query, spec);
    case SolverKind::BruteForce: return solve_brute_force(catalog, query, spec).exact_k;
  }
  throw ConfigError("unknown solver");
}

std::vector<BatchEntry> solve_batch(const Catalog& catalog, std::span<const BuyerQuery> queries,
                                    const ObjectiveSpec& spec, SolverKind kind,
                                    std::size_t parallelism) {
  if (parallelism == 0) throw ConfigError("parallelism must be at least 1");
  std::vector<BatchEntry> out(queries.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < queries.size(); i = next++) {
      auto& entry = out[i];
      entry.buyer = queries[i].buyer;
      try {
        entry.report = solve(kind, catalog, queries[i], spec);
      } catch (const std::exception& e) {
        entry.error = e.what();
      }
    }
  };
  const auto workers = std::min(parallelism, std::max<std::size_t>(queries.size(), 1));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return out;
}

}  // namespace faircover
