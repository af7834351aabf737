#include <doctest.h>

#include <random>
#include <sstream>

#include "faircover/coverage.hpp"
#include "faircover/errors.hpp"
#include "faircover/generator.hpp"
#include "faircover/solvers.hpp"
#include "test_support.hpp"

using namespace faircover;
using namespace faircover::testing;

namespace {

std::vector<ItemId> ids(std::initializer_list<std::uint32_t> v) {
  std::vector<ItemId> out;
  for (auto x : v) out.push_back(ItemId{x});
  return out;
}

}  // namespace

TEST_CASE("catalog rejects broken invariants") {
  CHECK_THROWS_AS(make_catalog(2, {{0, 2}}), ValidationError);
  CHECK_THROWS_AS(Catalog({"a"}, {ItemRecord{ItemId{1}, {}, 0.0}}), ValidationError);
  CHECK_THROWS_AS(Catalog({"a"}, {ItemRecord{ItemId{0}, {}, -1.0}}), ValidationError);
  CHECK_THROWS_AS(Catalog({"a", "b"}, {ItemRecord{ItemId{0}, {StakeholderId{1}, StakeholderId{0}}, 0.0}}),
                  ValidationError);
  CHECK_THROWS_AS(Catalog({"a", "a"}, {ItemRecord{ItemId{0}, {}, 0.0}}), ValidationError);
  // empty membership is fine
  const auto c = make_catalog(1, {{}});
  CHECK(c.inventory_size(StakeholderId{0}) == 0);
}

TEST_CASE("fairness profile: direct ratios") {
  // u0,u1 in a; u2 in b; u3 in nothing
  const auto catalog = make_catalog(2, {{0}, {0}, {1}, {}});
  const auto profile = compute_fairness_profile(catalog, make_query({0, 1, 2, 3}));
  CHECK(profile.threshold(StakeholderId{0}) == Ratio{2, 4});
  CHECK(profile.threshold(StakeholderId{1}) == Ratio{1, 4});
  CHECK(profile.threshold_value(StakeholderId{0}) == 0.5);
  CHECK(profile.candidate_count() == 4);

  const auto both = make_catalog(2, {{0, 1}});
  const auto single = compute_fairness_profile(both, make_query({0}));
  CHECK(single.threshold(StakeholderId{0}) == Ratio{1, 1});
  CHECK(single.threshold(StakeholderId{1}) == Ratio{1, 1});
  CHECK(single.threshold_sum() == 2.0);
}

TEST_CASE("fairness profile: stakeholders absent from candidates get zero") {
  const auto catalog = make_catalog(3, {{0}, {1}, {2}});
  const auto profile = compute_fairness_profile(catalog, make_query({0, 1}));
  CHECK(profile.stakeholder_count() == 3);
  CHECK(profile.member_count(StakeholderId{2}) == 0);
  CHECK(profile.threshold_value(StakeholderId{2}) == 0.0);
}

TEST_CASE("fairness profile: unknown item id is named") {
  const auto catalog = make_catalog(1, {{0}, {0}});
  try {
    (void)compute_fairness_profile(catalog, make_query({0, 7}));
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("7") != std::string::npos);
  }
  CHECK_THROWS_AS(compute_fairness_profile(catalog, make_query({0, 0})), ValidationError);
  CHECK_THROWS_AS(compute_fairness_profile(catalog, BuyerQuery{"x", {}}), ValidationError);
}

TEST_CASE("fairness profile matches a tally over the generated file (seed 42, 200 candidates)") {
  GeneratorConfig cfg;
  cfg.seed = 42;
  cfg.m_buyers = 3;
  cfg.candidate_fraction = {0.1, 0.1};
  const auto snap = generate_instance(cfg);
  const auto& query = snap.queries.front();
  REQUIRE(query.candidates.size() == 200);
  const auto tables = to_csv_tables(snap);

  // one pass over items.csv text: item id -> membership names
  std::map<std::uint32_t, std::vector<std::string>> members;
  std::istringstream items(tables.items);
  std::string line;
  std::getline(items, line);
  while (std::getline(items, line)) {
    const auto a = line.find(','), b = line.find(',', a + 1);
    const auto id = static_cast<std::uint32_t>(std::stoul(line.substr(0, a)));
    std::istringstream field(line.substr(b + 1));
    for (std::string name; std::getline(field, name, '|');) members[id].push_back(name);
  }
  std::map<std::string, std::int64_t> tally;
  std::istringstream sessions(tables.sessions);
  std::getline(sessions, line);
  std::int64_t total = 0;
  while (std::getline(sessions, line)) {
    if (line.substr(0, line.find(',')) != query.buyer) continue;
    const auto a = line.find(','), b = line.find(',', a + 1);
    const auto id = static_cast<std::uint32_t>(std::stoul(line.substr(a + 1, b - a - 1)));
    for (const auto& n : members[id]) ++tally[n];
    ++total;
  }
  const auto profile = compute_fairness_profile(snap.catalog, query);
  CHECK(profile.candidate_count() == total);
  for (std::uint32_t s = 0; s < 5; ++s)
    CHECK(profile.threshold(StakeholderId{s}) == Ratio{tally["s" + std::to_string(s)], total});
}

TEST_CASE("threshold exactness: rational reproduces the real view") {
  std::mt19937_64 gen(3);
  for (int trial = 0; trial < 1000; ++trial) {
    const std::int64_t den = 1 + static_cast<std::int64_t>(gen() % 100000);
    const std::int64_t num = static_cast<std::int64_t>(gen() % static_cast<std::uint64_t>(den + 1));
    const FairnessProfile p({num}, den);
    const long double exact = static_cast<long double>(num) / static_cast<long double>(den);
    CHECK(std::fabs(static_cast<long double>(p.threshold_value(StakeholderId{0})) - exact) <= 1e-15L);
  }
}

TEST_CASE("coverage value: boundaries") {
  // one stakeholder, delta = 1/2, k = 2
  const auto catalog = make_catalog(1, {{0}, {}});
  const auto query = make_query({0, 1});
  const auto profile = compute_fairness_profile(catalog, query);
  CHECK(coverage_value(profile, ids({0}), catalog, 2) == 0.5);
  CHECK(coverage_value(profile, {}, catalog, 2) == 0.0);
  CHECK_THROWS_AS(coverage_value(profile, ids({0, 0}), catalog, 2), PreconditionError);
  CHECK_THROWS_AS(coverage_value(profile, ids({0, 1}), catalog, 1), PreconditionError);
}

TEST_CASE("coverage value matches the definition on every 2-subset of random 8-item instances") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto snap = random_instance(seed, {.items = 8, .stakeholders = 4, .membership = 0.35});
    const auto& q = snap.queries.front();
    const auto profile = compute_fairness_profile(snap.catalog, q);
    for (std::uint32_t a = 0; a < 8; ++a)
      for (std::uint32_t b = a + 1; b < 8; ++b) {
        const auto chosen = ids({a, b});
        CHECK(coverage_value(profile, chosen, snap.catalog, 2) ==
              doctest::Approx(oracle_coverage(snap.catalog, q, chosen, 2)).epsilon(1e-12));
      }
  }
}

TEST_CASE("coverage marginal: both cases of the submodularity argument") {
  // Not yet fairly covered: delta = 3/4, k = 2, nothing chosen -> 1/k
  const auto catalog = make_catalog(1, {{0}, {0}, {0}, {}});
  const auto q = make_query({0, 1, 2, 3});
  const auto profile = compute_fairness_profile(catalog, q);
  CHECK(coverage_marginal(profile, {}, ItemId{0}, catalog, 2) == 0.5);
  // Already at delta: delta = 1/4, k = 4, one covering item chosen -> 0
  const auto c2 = make_catalog(1, {{0}, {}, {}, {0}});
  const auto p2 = compute_fairness_profile(c2, make_query({0, 1, 2}));
  // delta = 1/3 with k = 3: one item reaches it
  CHECK(coverage_marginal(p2, ids({0}), ItemId{3}, c2, 3) == 0.0);

  CHECK_THROWS_AS(coverage_marginal(profile, ids({0}), ItemId{0}, catalog, 2), PreconditionError);
}

TEST_CASE("coverage marginal equals a difference of coverage values and stays in [0, |S(u)|/k]") {
  std::mt19937_64 gen(11);
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto snap = random_instance(seed, {.items = 12, .stakeholders = 4, .membership = 0.5});
    const auto& q = snap.queries.front();
    const auto profile = compute_fairness_profile(snap.catalog, q);
    const std::size_t k = 2 + gen() % 5;
    std::vector<std::uint32_t> perm(12);
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), gen);
    const std::size_t size = gen() % k;
    std::vector<ItemId> chosen;
    for (std::size_t i = 0; i < size; ++i) chosen.push_back(ItemId{perm[i]});
    const ItemId e{perm[size]};
    auto with = chosen;
    with.push_back(e);
    const double m = coverage_marginal(profile, chosen, e, snap.catalog, k);
    CHECK(m == doctest::Approx(coverage_value(profile, with, snap.catalog, k) -
                               coverage_value(profile, chosen, snap.catalog, k))
                   .epsilon(1e-12));
    CHECK(m >= 0.0);
    CHECK(m <= static_cast<double>(snap.catalog.memberships(e).size()) / static_cast<double>(k) + 1e-15);
  }
}

TEST_CASE("submodularity, monotonicity and the upper bound on sampled triples") {
  std::mt19937_64 gen(5);
  int checked = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const auto snap = random_instance(seed, {.items = 15, .stakeholders = 5, .membership = 0.3});
    const auto& q = snap.queries.front();
    const auto profile = compute_fairness_profile(snap.catalog, q);
    const std::size_t k = 3 + gen() % 6;
    for (int t = 0; t < 50; ++t) {
      std::vector<std::uint32_t> perm(15);
      std::iota(perm.begin(), perm.end(), 0u);
      std::shuffle(perm.begin(), perm.end(), gen);
      const std::size_t b_size = gen() % k;
      const std::size_t a_size = b_size == 0 ? 0 : gen() % (b_size + 1);
      std::vector<ItemId> a, b;
      for (std::size_t i = 0; i < b_size; ++i) {
        b.push_back(ItemId{perm[i]});
        if (i < a_size) a.push_back(ItemId{perm[i]});
      }
      const ItemId e{perm[b_size]};
      auto ae = a, be = b;
      ae.push_back(e);
      be.push_back(e);
      const double fa = coverage_value(profile, a, snap.catalog, k);
      const double fb = coverage_value(profile, b, snap.catalog, k);
      const double fae = coverage_value(profile, ae, snap.catalog, k);
      const double fbe = coverage_value(profile, be, snap.catalog, k);
      CHECK(fae - fa >= fbe - fb - 1e-12);
      CHECK(fae >= fa);
      CHECK(fb >= fa - 1e-15);
      CHECK(fbe <= profile.threshold_sum() + 1e-12);
      ++checked;
    }
  }
  CHECK(checked == 2000);
}

TEST_CASE("fairness deltas: arithmetic and equality") {
  // 20 items, the first five cover stakeholder 0
  std::vector<std::vector<std::uint32_t>> m(20);
  for (int i = 0; i < 5; ++i) m[i] = {0};
  const auto catalog = make_catalog(1, m);
  const auto five = ids({0, 1, 2, 3, 4});

  // k = 20, eta = 5/20 = 0.25, delta = 4/20 = 0.2 -> ceil(20 * 0.05) = 1
  CHECK(fairness_deltas(FairnessProfile({4}, 20), five, catalog, 20) == std::vector<std::int64_t>{1});
  // eta == delta
  CHECK(fairness_deltas(FairnessProfile({5}, 20), five, catalog, 20) == std::vector<std::int64_t>{0});
  // one short
  CHECK(fairness_deltas(FairnessProfile({5}, 20), ids({0, 1, 2, 3}), catalog, 20) ==
        std::vector<std::int64_t>{-1});
}

TEST_CASE("fairness deltas against the fair coverage inequality") {
  std::mt19937_64 gen(21);
  int fair_seen = 0, unfair_seen = 0;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const auto snap = random_instance(seed, {.items = 9, .stakeholders = 3, .membership = 0.35});
    const auto& q = snap.queries.front();
    const auto profile = compute_fairness_profile(snap.catalog, q);
    const std::size_t k = 1 + gen() % 6;
    std::vector<std::uint32_t> perm(9);
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<ItemId> chosen;
    for (std::size_t i = 0; i < 1 + gen() % k; ++i) chosen.push_back(ItemId{perm[i]});
    const auto deltas = fairness_deltas(profile, chosen, snap.catalog, k);
    const bool all_nonneg = std::all_of(deltas.begin(), deltas.end(), [](auto d) { return d >= 0; });
    const bool fair = oracle_is_fair(snap.catalog, q, chosen, k);
    CHECK(satisfies_fair_coverage(profile, chosen, snap.catalog, k) == fair);
    if (fair) CHECK(all_nonneg);
    // exact characterization: delta_s >= 0 iff count >= floor(k |U_b(s)| / |U_b|)
    for (std::uint32_t s = 0; s < 3; ++s) {
      std::int64_t count = 0;
      for (auto id : chosen)
        for (auto m : snap.catalog.memberships(id)) count += m.value == s;
      const auto floor_kd = static_cast<std::int64_t>(k) * profile.member_count(StakeholderId{s}) / 9;
      CHECK((deltas[s] >= 0) == (count >= floor_kd));
    }
    (fair ? fair_seen : unfair_seen)++;
  }
  CHECK(fair_seen > 10);
  CHECK(unfair_seen > 10);
}

TEST_CASE("fairness deltas are equivalent to the inequality when k * delta is integral") {
  // 6 candidates with k in {6, 12}: k * |U_b(s)| / 6 is always an integer
  std::mt19937_64 gen(8);
  int fair_seen = 0, unfair_seen = 0;
  for (std::uint64_t seed = 0; seed < 1000; ++seed) {
    const auto snap = random_instance(seed, {.items = 6, .stakeholders = 3, .membership = 0.4});
    const auto& q = snap.queries.front();
    const auto profile = compute_fairness_profile(snap.catalog, q);
    const std::size_t k = gen() % 2 ? 6 : 12;
    std::vector<std::uint32_t> perm(6);
    std::iota(perm.begin(), perm.end(), 0u);
    std::shuffle(perm.begin(), perm.end(), gen);
    std::vector<ItemId> chosen;
    for (std::size_t i = 0; i < 1 + gen() % 6; ++i) chosen.push_back(ItemId{perm[i]});
    const auto deltas = fairness_deltas(profile, chosen, snap.catalog, k);
    const bool all_nonneg = std::all_of(deltas.begin(), deltas.end(), [](auto d) { return d >= 0; });
    const bool fair = oracle_is_fair(snap.catalog, q, chosen, k);
    CHECK(all_nonneg == fair);
    (fair ? fair_seen : unfair_seen)++;
  }
  CHECK(fair_seen > 10);
  CHECK(unfair_seen > 10);
}

TEST_CASE("fairness deltas: a fractional shortfall rounds up to zero") {
  // k = 3, delta = 1/2, one covering item chosen: eta = 1/3 < 1/2 but ceil(-0.5) = 0
  const auto catalog = make_catalog(1, {{0}, {}});
  const auto profile = compute_fairness_profile(catalog, make_query({0, 1}));
  CHECK(fairness_deltas(profile, ids({0}), catalog, 3) == std::vector<std::int64_t>{0});
  CHECK_FALSE(satisfies_fair_coverage(profile, ids({0}), catalog, 3));
  CHECK(satisfies_fair_coverage(profile, ids({0}), catalog, 2));
}

TEST_CASE("provider constraint: single fair buyer over the whole catalog") {
  // 4 items, s0 = {0,1}, s1 = {2}; k = 2
  const auto catalog = make_catalog(2, {{0}, {0}, {1}, {}});
  const std::vector<BuyerQuery> queries{make_query({0, 1, 2, 3})};
  // deltas: s0 needs 1 of 2 (0.5), s1 needs ceil(0.5) -> 1 of 2 is 0.5 >= 0.25
  const std::vector<std::vector<ItemId>> chosen{ids({0, 2})};
  const auto profile = compute_fairness_profile(catalog, queries[0]);
  const auto d = fairness_deltas(profile, chosen[0], catalog, 2);
  REQUIRE(std::all_of(d.begin(), d.end(), [](auto x) { return x >= 0; }));
  const auto checks = provider_constraint_check(catalog, queries, chosen, 2);
  REQUIRE(checks.size() == 2);
  for (const auto& c : checks) CHECK(c.satisfied);
  CHECK(checks[0].achieved == 0.5);
  CHECK(checks[0].required == 0.5);
}

TEST_CASE("provider constraint: empty recommendations") {
  const auto catalog = make_catalog(3, {{0}, {0}, {1}});
  const std::vector<BuyerQuery> queries{make_query({0, 1, 2}), make_query({0, 2})};
  const std::vector<std::vector<ItemId>> chosen{{}, {}};
  const auto checks = provider_constraint_check(catalog, queries, chosen, 2);
  CHECK(checks[0].achieved == 0.0);
  CHECK_FALSE(checks[0].satisfied);
  CHECK_FALSE(checks[1].satisfied);
  CHECK(checks[2].satisfied);  // empty inventory
  CHECK_THROWS_AS(provider_constraint_check(catalog, queries, std::span(chosen).first(1), 2),
                  PreconditionError);
}

TEST_CASE("supersession: per-buyer fair coverage over the full catalog implies the provider constraint") {
  std::mt19937_64 gen(99);
  int fair_cases = 0;
  for (std::uint64_t seed = 0; seed < 600; ++seed) {
    const auto base = random_instance(seed, {.items = 10, .stakeholders = 3, .membership = 0.3});
    const std::size_t k = 3 + gen() % 5;
    const std::size_t buyers = 1 + gen() % 4;
    std::vector<BuyerQuery> queries;
    std::vector<std::vector<ItemId>> chosen;
    bool all_fair = true;
    for (std::size_t b = 0; b < buyers; ++b) {
      auto q = base.queries.front();
      q.buyer = "b" + std::to_string(b);
      std::vector<std::uint32_t> perm(10);
      std::iota(perm.begin(), perm.end(), 0u);
      std::shuffle(perm.begin(), perm.end(), gen);
      std::vector<ItemId> set;
      for (std::size_t i = 0; i < k; ++i) set.push_back(ItemId{perm[i]});
      all_fair &= oracle_is_fair(base.catalog, q, set, k);
      queries.push_back(std::move(q));
      chosen.push_back(std::move(set));
    }
    if (!all_fair) continue;
    ++fair_cases;
    for (const auto& c : provider_constraint_check(base.catalog, queries, chosen, k)) CHECK(c.satisfied);
  }
  CHECK(fair_cases > 20);
}
