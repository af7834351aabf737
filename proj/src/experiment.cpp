#include "faircover/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "faircover/errors.hpp"
#include "faircover/rng.hpp"

namespace faircover {

namespace fs = std::filesystem;

SweepRow make_sweep_row(double alpha, const SolveReport& report, const SweepOptions& options) {
  SweepRow row;
  row.alpha = alpha;
  row.solver = report.solver;
  row.buyer = report.buyer;
  row.deltas = report.deltas;
  row.coverage = report.coverage_value;
  row.aux = report.aux_value * options.aux_scale;
  row.combined = report.combined_value;
  row.n_chosen = report.chosen.size();
  row.oracle_calls = report.oracle_calls;
  row.wall_time_us =
      options.record_timing
          ? std::chrono::duration_cast<std::chrono::microseconds>(report.wall_time).count()
          : 0;
  row.seed = report.seed_used;
  return row;
}

std::vector<SweepAggregate> aggregate_rows(std::size_t stakeholders, std::span<const SweepRow> rows) {
  std::vector<SweepAggregate> out;
  std::vector<std::vector<const SweepRow*>> groups;
  for (const auto& row : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const SweepAggregate& a) {
      return a.alpha == row.alpha && a.solver == row.solver;
    });
    if (it == out.end()) {
      out.push_back(SweepAggregate{});
      out.back().alpha = row.alpha;
      out.back().solver = row.solver;
      groups.emplace_back();
      it = out.end() - 1;
    }
    groups[static_cast<std::size_t>(it - out.begin())].push_back(&row);
  }
  for (std::size_t g = 0; g < out.size(); ++g) {
    auto& a = out[g];
    const auto& members = groups[g];
    const auto count = static_cast<double>(members.size());
    a.buyers = members.size();
    a.mean_delta.assign(stakeholders, 0.0);
    double nonnegative = 0.0;
    double delta_sum = 0.0;
    for (const auto* row : members) {
      if (row->deltas.size() != stakeholders)
        throw PreconditionError("sweep row for buyer '" + row->buyer + "' has the wrong delta count");
      for (std::size_t s = 0; s < stakeholders; ++s) {
        a.mean_delta[s] += static_cast<double>(row->deltas[s]);
        delta_sum += static_cast<double>(row->deltas[s]);
        nonnegative += row->deltas[s] >= 0 ? 1.0 : 0.0;
      }
      a.mean_coverage += row->coverage;
      a.mean_aux += row->aux;
      a.mean_combined += row->combined;
      a.mean_n_chosen += static_cast<double>(row->n_chosen);
      a.mean_oracle_calls += static_cast<double>(row->oracle_calls);
      a.mean_wall_time_us += static_cast<double>(row->wall_time_us);
    }
    for (auto& m : a.mean_delta) m /= count;
    const double pairs = count * static_cast<double>(stakeholders);
    a.mean_delta_all = delta_sum / pairs;
    a.fraction_nonnegative = nonnegative / pairs;
    a.mean_coverage /= count;
    a.mean_aux /= count;
    a.mean_combined /= count;
    a.mean_n_chosen /= count;
    a.mean_oracle_calls /= count;
    a.mean_wall_time_us /= count;
  }
  return out;
}

SweepResult run_sweep(const Snapshot& snapshot, const ObjectiveSpec& spec,
                      std::span<const double> alphas, SolverKind solver,
                      const SweepOptions& options) {
  if (alphas.empty()) throw ConfigError("alpha grid must not be empty");
  check_compatibility(solver, spec.aux);
  for (double alpha : alphas) {
    auto s = spec;
    s.alpha = alpha;
    s.validate();
  }

  SweepResult result;
  result.report.stakeholders = snapshot.catalog.stakeholder_names();
  result.report.seed = spec.seed;
  for (double alpha : alphas) {
    auto s = spec;
    s.alpha = alpha;
    const auto batch = solve_batch(snapshot.catalog, snapshot.queries, s, solver, options.parallelism);
    for (const auto& entry : batch) {
      if (entry.ok())
        result.report.rows.push_back(make_sweep_row(alpha, *entry.report, options));
      else
        result.errors.push_back("alpha " + format_double(alpha) + ", buyer '" + entry.buyer +
                                "': " + entry.error);
    }
  }
  result.report.aggregates =
      aggregate_rows(result.report.stakeholders.size(), result.report.rows);
  return result;
}

std::string sweep_report_csv(const SweepReport& report) {
  std::string out(kSweepCsvHeader);
  out += '\n';
  for (const auto& row : report.rows) {
    const std::string tail = "," + format_double(row.coverage) + "," + format_double(row.aux) + "," +
                             format_double(row.combined) + "," + std::to_string(row.n_chosen) + "," +
                             std::to_string(row.oracle_calls) + "," +
                             std::to_string(row.wall_time_us) + "," + std::to_string(row.seed) + "\n";
    const std::string head =
        format_double(row.alpha) + "," + std::string(to_string(row.solver)) + "," + row.buyer + ",";
    for (std::size_t s = 0; s < row.deltas.size(); ++s)
      out += head + report.stakeholders.at(s) + "," + std::to_string(row.deltas[s]) + tail;
  }
  for (const auto& a : report.aggregates) {
    out += format_double(a.alpha) + "," + std::string(to_string(a.solver)) + ",*,*," +
           format_double(a.mean_delta_all) + "," + format_double(a.mean_coverage) + "," +
           format_double(a.mean_aux) + "," + format_double(a.mean_combined) + "," +
           format_double(a.mean_n_chosen) + "," + format_double(a.mean_oracle_calls) + "," +
           format_double(a.mean_wall_time_us) + "," + std::to_string(report.seed) + "\n";
  }
  return out;
}

std::string sweep_report_json(const SweepReport& report) {
  using nlohmann::json;
  json doc;
  doc["stakeholders"] = report.stakeholders;
  doc["seed"] = report.seed;
  json rows = json::array();
  for (const auto& row : report.rows) {
    json deltas = json::object();
    for (std::size_t s = 0; s < row.deltas.size(); ++s) deltas[report.stakeholders.at(s)] = row.deltas[s];
    rows.push_back({{"alpha", row.alpha},
                    {"solver", to_string(row.solver)},
                    {"buyer_id", row.buyer},
                    {"deltas", deltas},
                    {"F", row.coverage},
                    {"G", row.aux},
                    {"F_alpha", row.combined},
                    {"n_chosen", row.n_chosen},
                    {"oracle_calls", row.oracle_calls},
                    {"wall_time_us", row.wall_time_us},
                    {"seed", row.seed}});
  }
  json aggregates = json::array();
  for (const auto& a : report.aggregates) {
    json mean_delta = json::object();
    for (std::size_t s = 0; s < a.mean_delta.size(); ++s)
      mean_delta[report.stakeholders.at(s)] = a.mean_delta[s];
    aggregates.push_back({{"alpha", a.alpha},
                          {"solver", to_string(a.solver)},
                          {"buyers", a.buyers},
                          {"mean_delta", mean_delta},
                          {"mean_delta_all", a.mean_delta_all},
                          {"fraction_nonnegative", a.fraction_nonnegative},
                          {"F", a.mean_coverage},
                          {"G", a.mean_aux},
                          {"F_alpha", a.mean_combined},
                          {"n_chosen", a.mean_n_chosen},
                          {"oracle_calls", a.mean_oracle_calls},
                          {"wall_time_us", a.mean_wall_time_us}});
  }
  doc["rows"] = std::move(rows);
  doc["aggregates"] = std::move(aggregates);
  return doc.dump(1) + "\n";
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

template <typename T>
T parse_number(const std::string& text, std::size_t line, std::size_t field) {
  T value{};
  auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || end != text.data() + text.size())
    throw ParseError("sweep report: invalid number '" + text + "' in field " + std::to_string(field + 1),
                     line, 1);
  return value;
}

std::optional<SolverKind> solver_from_name(std::string_view name) {
  for (auto k : {SolverKind::Greedy, SolverKind::LazyGreedy, SolverKind::DistortedGreedy,
                 SolverKind::StochasticDistortedGreedy, SolverKind::BruteForce})
    if (to_string(k) == name) return k;
  return std::nullopt;
}

}  // namespace

void write_sweep_report(const SweepReport& report, const fs::path& path, FileFormat format) {
  write_text(path, format == FileFormat::Csv ? sweep_report_csv(report) : sweep_report_json(report));
}

std::vector<SweepRow> read_sweep_rows(const fs::path& path, std::span<const std::string> stakeholders) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  std::size_t line_no = 0;
  std::vector<SweepRow> rows;
  std::vector<bool> filled;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != kSweepCsvHeader) throw ParseError("sweep report: unexpected header", 1, 1);
      continue;
    }
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) f.push_back(cell);
    if (f.size() != 12) throw ParseError("sweep report: expected 12 fields", line_no, 1);
    if (f[2] == "*") continue;

    const double alpha = parse_number<double>(f[0], line_no, 0);
    const auto solver = solver_from_name(f[1]);
    if (!solver) throw ParseError("sweep report: unknown solver '" + f[1] + "'", line_no, 1);
    const auto s = std::find(stakeholders.begin(), stakeholders.end(), f[3]);
    if (s == stakeholders.end())
      throw IntegrityError("sweep report line " + std::to_string(line_no) +
                           " names stakeholder '" + f[3] + "' which the snapshot does not have");
    const auto s_index = static_cast<std::size_t>(s - stakeholders.begin());

    const bool same_group = !rows.empty() && rows.back().alpha == alpha &&
                            rows.back().solver == *solver && rows.back().buyer == f[2];
    if (!same_group) {
      SweepRow row;
      row.alpha = alpha;
      row.solver = *solver;
      row.buyer = f[2];
      row.deltas.assign(stakeholders.size(), 0);
      row.coverage = parse_number<double>(f[5], line_no, 5);
      row.aux = parse_number<double>(f[6], line_no, 6);
      row.combined = parse_number<double>(f[7], line_no, 7);
      row.n_chosen = parse_number<std::size_t>(f[8], line_no, 8);
      row.oracle_calls = parse_number<std::uint64_t>(f[9], line_no, 9);
      row.wall_time_us = parse_number<std::int64_t>(f[10], line_no, 10);
      row.seed = parse_number<std::uint64_t>(f[11], line_no, 11);
      rows.push_back(std::move(row));
      filled.assign(stakeholders.size(), false);
    }
    if (filled[s_index])
      throw IntegrityError("sweep report line " + std::to_string(line_no) + ": stakeholder '" + f[3] +
                           "' repeated for buyer '" + f[2] + "'");
    filled[s_index] = true;
    rows.back().deltas[s_index] = parse_number<std::int64_t>(f[4], line_no, 4);
  }
  return rows;
}

std::vector<BuyerQuery> sample_queries(std::span<const BuyerQuery> queries, std::size_t count,
                                       std::uint64_t seed) {
  if (count >= queries.size()) return {queries.begin(), queries.end()};
  Rng rng(seed);
  std::vector<std::size_t> idx(queries.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  for (std::size_t j = 0; j < count; ++j) std::swap(idx[j], idx[j + rng.below(idx.size() - j)]);
  idx.resize(count);
  std::sort(idx.begin(), idx.end());
  std::vector<BuyerQuery> out;
  out.reserve(count);
  for (auto i : idx) out.push_back(queries[i]);
  return out;
}

SubmodularityCheck check_submodularity(const Snapshot& snapshot, std::size_t k, std::size_t triples,
                                       std::uint64_t seed, double tolerance) {
  if (k == 0) throw ConfigError("k must be at least 1");
  SubmodularityCheck out;
  std::vector<const BuyerQuery*> usable;
  for (const auto& q : snapshot.queries)
    if (q.candidates.size() >= 2) usable.push_back(&q);
  if (usable.empty() || triples == 0) return out;

  Rng rng(seed);
  std::vector<std::size_t> perm;
  for (std::size_t t = 0; t < triples; ++t) {
    const auto& q = *usable[rng.below(usable.size())];
    const auto profile = compute_fairness_profile(snapshot.catalog, q);
    const auto n = q.candidates.size();
    // |B| in [0, min(k - 1, n - 1)] so B + e stays within the size-k contract.
    const auto b_max = std::min(k - 1, n - 1);
    const auto b_size = static_cast<std::size_t>(rng.below(b_max + 1));
    const auto a_size = static_cast<std::size_t>(rng.below(b_size + 1));
    perm.resize(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t j = 0; j <= b_size; ++j) std::swap(perm[j], perm[j + rng.below(n - j)]);
    // perm[0..a_size) = A, perm[0..b_size) = B, perm[b_size] = e
    std::vector<ItemId> a, b;
    for (std::size_t j = 0; j < b_size; ++j) {
      const auto id = q.candidates[perm[j]].item;
      b.push_back(id);
      if (j < a_size) a.push_back(id);
    }
    const auto e = q.candidates[perm[b_size]].item;
    const double f_a = coverage_value(profile, a, snapshot.catalog, k);
    const double f_b = coverage_value(profile, b, snapshot.catalog, k);
    a.push_back(e);
    b.push_back(e);
    const double gain_a = coverage_value(profile, a, snapshot.catalog, k) - f_a;
    const double gain_b = coverage_value(profile, b, snapshot.catalog, k) - f_b;
    ++out.triples;
    out.worst_gap = std::max(out.worst_gap, gain_b - gain_a);
    if (gain_a < gain_b - tolerance) {
      if (out.violations++ == 0)
        out.first_violation = "buyer '" + q.buyer + "', item " + std::to_string(e.value) + ": " +
                              format_double(gain_a) + " < " + format_double(gain_b);
    }
  }
  return out;
}

std::vector<BenchRow> run_bench(const Snapshot& snapshot, std::span<const BenchCase> cases,
                                std::size_t trials, std::size_t warmup) {
  if (trials == 0) throw ConfigError("bench needs at least one trial");
  if (snapshot.queries.empty()) throw ConfigError("bench needs at least one buyer");
  for (const auto& c : cases) {
    c.spec.validate();
    check_compatibility(c.solver, c.spec.aux);
  }
  std::vector<BenchRow> out;
  for (const auto& c : cases) {
    for (std::size_t w = 0; w < warmup; ++w)
      for (const auto& q : snapshot.queries) (void)solve(c.solver, snapshot.catalog, q, c.spec);

    std::vector<double> times;
    double calls = 0.0;
    for (std::size_t t = 0; t < trials; ++t) {
      for (const auto& q : snapshot.queries) {
        const auto r = solve(c.solver, snapshot.catalog, q, c.spec);
        times.push_back(static_cast<double>(r.wall_time.count()) / 1000.0);
        calls += static_cast<double>(r.oracle_calls);
      }
    }
    BenchRow row;
    row.solver = c.solver;
    row.aux = c.spec.aux;
    row.alpha = c.spec.alpha;
    row.buyers = snapshot.queries.size();
    row.trials = trials;
    const auto samples = static_cast<double>(times.size());
    row.mean_wall_us = std::accumulate(times.begin(), times.end(), 0.0) / samples;
    std::sort(times.begin(), times.end());
    const auto mid = times.size() / 2;
    row.median_wall_us = times.size() % 2 ? times[mid] : 0.5 * (times[mid - 1] + times[mid]);
    row.mean_oracle_calls = calls / samples;
    out.push_back(row);
  }
  return out;
}

std::string bench_csv(std::span<const BenchRow> rows) {
  std::string out(kBenchCsvHeader);
  out += '\n';
  for (const auto& r : rows) {
    out += std::string(to_string(r.solver)) + "," + std::string(to_string(r.aux)) + "," +
           format_double(r.alpha) + "," + std::to_string(r.buyers) + "," + std::to_string(r.trials) +
           "," + format_double(r.mean_wall_us) + "," + format_double(r.median_wall_us) + "," +
           format_double(r.mean_oracle_calls) + "\n";
  }
  return out;
}

}  // namespace faircover
