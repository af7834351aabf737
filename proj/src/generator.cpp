#include "faircover/generator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "faircover/errors.hpp"
#include "faircover/rng.hpp"

namespace faircover {

std::vector<double> default_membership_probabilities(std::size_t stakeholders) {
  std::vector<double> p(stakeholders);
  double v = 0.4;
  for (auto& x : p) {
    x = v;
    v *= 0.75;
  }
  return p;
}

void GeneratorConfig::validate() const {
  if (n_items == 0 || m_buyers == 0 || t_stakeholders == 0)
    throw ValidationError("n_items, m_buyers and t_stakeholders must be positive");
  if (membership_probabilities.size() != t_stakeholders)
    throw ValidationError("need one membership probability per stakeholder (" +
                          std::to_string(t_stakeholders) + "), got " +
                          std::to_string(membership_probabilities.size()));
  for (double p : membership_probabilities)
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("membership probabilities must lie in [0, 1]");
  const auto [low, high] = candidate_fraction;
  if (!(low > 0.0 && low <= high && high <= 1.0))
    throw ValidationError("candidate_fraction must satisfy 0 < low <= high <= 1");
  if (const auto* u = std::get_if<UniformDistribution>(&utility)) {
    if (!(std::isfinite(u->low) && std::isfinite(u->high) && u->low <= u->high))
      throw ValidationError("utility uniform(a, b) needs finite a <= b");
  } else if (const auto* e = std::get_if<ExponentialDistribution>(&utility)) {
    if (!(e->rate > 0.0 && std::isfinite(e->rate)))
      throw ValidationError("utility exponential rate must be positive");
  }
  if (const auto* l = std::get_if<LognormalDistribution>(&cost)) {
    if (!(std::isfinite(l->mu) && l->sigma >= 0.0 && std::isfinite(l->sigma)))
      throw ValidationError("cost lognormal needs finite mu and sigma >= 0");
  } else if (const auto* u = std::get_if<UniformDistribution>(&cost)) {
    if (!(u->low >= 0.0 && u->low <= u->high && std::isfinite(u->high)))
      throw ValidationError("cost uniform(a, b) needs 0 <= a <= b");
  }
}

Snapshot generate_instance(const GeneratorConfig& config) {
  config.validate();
  Rng rng(config.seed);

  std::vector<std::string> names(config.t_stakeholders);
  for (std::size_t s = 0; s < names.size(); ++s) names[s] = "s" + std::to_string(s);

  const auto& probs = config.membership_probabilities;
  const double mass = std::max(1.0, std::accumulate(probs.begin(), probs.end(), 0.0));

  std::vector<ItemRecord> items(config.n_items);
  for (std::size_t i = 0; i < items.size(); ++i) {
    auto& rec = items[i];
    rec.item = ItemId{static_cast<std::uint32_t>(i)};
    if (config.multi_membership) {
      for (std::size_t s = 0; s < probs.size(); ++s)
        if (rng.bernoulli(probs[s])) rec.memberships.push_back(StakeholderId{static_cast<std::uint32_t>(s)});
    } else {
      double u = rng.uniform01() * mass;
      for (std::size_t s = 0; s < probs.size(); ++s) {
        if (u < probs[s]) {
          rec.memberships.push_back(StakeholderId{static_cast<std::uint32_t>(s)});
          break;
        }
        u -= probs[s];
      }
    }
    rec.cost = std::visit(
        [&](const auto& d) -> double {
          using D = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<D, LognormalDistribution>)
            return rng.lognormal(d.mu, d.sigma);
          else
            return rng.uniform(d.low, d.high);
        },
        config.cost);
  }

  Catalog catalog(std::move(names), std::move(items));

  const auto n = config.n_items;
  std::vector<std::uint32_t> pool(n);
  std::vector<BuyerQuery> queries(config.m_buyers);
  const auto width = std::to_string(config.m_buyers - 1).size();
  for (std::size_t b = 0; b < queries.size(); ++b) {
    auto& q = queries[b];
    auto id = std::to_string(b);
    q.buyer = "b" + std::string(width - id.size(), '0') + id;

    const double fraction = rng.uniform(config.candidate_fraction.first, config.candidate_fraction.second);
    auto size = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    size = std::clamp<std::size_t>(size, 1, n);

    // partial Fisher-Yates
    std::iota(pool.begin(), pool.end(), 0u);
    for (std::size_t j = 0; j < size; ++j) std::swap(pool[j], pool[j + rng.below(n - j)]);
    std::vector<std::uint32_t> chosen(pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(size));
    std::sort(chosen.begin(), chosen.end());

    q.candidates.reserve(size);
    for (auto item : chosen) {
      const double utility = std::visit(
          [&](const auto& d) -> double {
            using D = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<D, ExponentialDistribution>)
              return rng.exponential(d.rate);
            else
              return rng.uniform(d.low, d.high);
          },
          config.utility);
      q.candidates.push_back({ItemId{item}, utility});
    }
  }
  return Snapshot{std::move(catalog), std::move(queries)};
}

}  // namespace faircover
