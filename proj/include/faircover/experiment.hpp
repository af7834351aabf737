#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "faircover/objective.hpp"
#include "faircover/snapshot.hpp"
#include "faircover/solvers.hpp"

namespace faircover {

/// One solved buyer at one alpha.
struct SweepRow {
  double alpha = 0.0;
  SolverKind solver = SolverKind::Greedy;
  std::string buyer;
  std::vector<std::int64_t> deltas;
  double coverage = 0.0;  // F
  double aux = 0.0;       // G, after report-time scaling
  double combined = 0.0;  // F_alpha
  std::size_t n_chosen = 0;
  std::uint64_t oracle_calls = 0;
  std::int64_t wall_time_us = 0;
  std::uint64_t seed = 0;
  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// Means over the rows of one (alpha, solver) group.
struct SweepAggregate {
  double alpha = 0.0;
  SolverKind solver = SolverKind::Greedy;
  std::size_t buyers = 0;
  std::vector<double> mean_delta;  // per stakeholder
  double mean_delta_all = 0.0;     // over every (s, b) pair
  double fraction_nonnegative = 0.0;  // share of (s, b) pairs with delta >= 0
  double mean_coverage = 0.0;
  double mean_aux = 0.0;
  double mean_combined = 0.0;
  double mean_n_chosen = 0.0;
  double mean_oracle_calls = 0.0;
  double mean_wall_time_us = 0.0;
};

struct SweepReport {
  std::vector<std::string> stakeholders;
  std::uint64_t seed = 0;
  std::vector<SweepRow> rows;
  std::vector<SweepAggregate> aggregates;
};

inline constexpr std::string_view kSweepCsvHeader =
    "alpha,solver,buyer_id,stakeholder,delta,F,G,F_alpha,n_chosen,oracle_calls,wall_time_us,seed";

struct SweepOptions {
  double aux_scale = 1.0;  // applied to G in the rows only
  bool record_timing = true;
  std::size_t parallelism = 1;
};

SweepRow make_sweep_row(double alpha, const SolveReport& report, const SweepOptions& options);

/// Groups rows by (alpha, solver) in order of first appearance.
std::vector<SweepAggregate> aggregate_rows(std::size_t stakeholders, std::span<const SweepRow> rows);

struct SweepResult {
  SweepReport report;
  std::vector<std::string> errors;  // "buyer: message" for failed solves
};

/// Solves every query at every alpha. Incompatible solver/aux pairs throw
/// ConfigError before any solve starts.
SweepResult run_sweep(const Snapshot& snapshot, const ObjectiveSpec& spec,
                      std::span<const double> alphas, SolverKind solver,
                      const SweepOptions& options);

/// Detail rows (one per buyer and stakeholder) followed by one summary row
/// per aggregate, with buyer_id and stakeholder set to "*".
std::string sweep_report_csv(const SweepReport& report);
std::string sweep_report_json(const SweepReport& report);
void write_sweep_report(const SweepReport& report, const std::filesystem::path& path,
                        FileFormat format);

/// Reads detail rows back from the CSV form; summary rows are skipped.
/// Stakeholder names must be in `stakeholders`.
std::vector<SweepRow> read_sweep_rows(const std::filesystem::path& path,
                                      std::span<const std::string> stakeholders);

/// Uniform sample of `count` queries without replacement, original order kept.
std::vector<BuyerQuery> sample_queries(std::span<const BuyerQuery> queries, std::size_t count,
                                       std::uint64_t seed);

struct SubmodularityCheck {
  std::size_t triples = 0;
  std::size_t violations = 0;
  double worst_gap = 0.0;  // largest F(e|B) - F(e|A) seen; <= tolerance when clean
  std::string first_violation;
};

/// Samples (A ⊂ B ⊆ U_b, e ∉ B) uniformly over buyers with |B| < k and checks
/// F(A + e) - F(A) >= F(B + e) - F(B) - tolerance.
SubmodularityCheck check_submodularity(const Snapshot& snapshot, std::size_t k, std::size_t triples,
                                       std::uint64_t seed, double tolerance = 1e-12);

struct BenchRow {
  SolverKind solver = SolverKind::Greedy;
  AuxMode aux = AuxMode::NoAux;
  double alpha = 0.0;
  std::size_t buyers = 0;
  std::size_t trials = 0;
  double mean_wall_us = 0.0;    // per buyer
  double median_wall_us = 0.0;  // per buyer
  double mean_oracle_calls = 0.0;
};

inline constexpr std::string_view kBenchCsvHeader =
    "solver,aux,alpha,buyers,trials,mean_wall_us,median_wall_us,mean_oracle_calls";

struct BenchCase {
  SolverKind solver;
  ObjectiveSpec spec;
};

/// Runs `warmup` untimed passes then `trials` timed passes per case.
std::vector<BenchRow> run_bench(const Snapshot& snapshot, std::span<const BenchCase> cases,
                                std::size_t trials, std::size_t warmup);
std::string bench_csv(std::span<const BenchRow> rows);

}  // namespace faircover
