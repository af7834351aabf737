// faircover: generate synthetic marketplaces, solve fair-coverage re-ranking
// per buyer, sweep alpha, benchmark solvers and verify fairness claims.
//
// Exit codes: 0 success, 2 usage, 3 validation/configuration, 4 I/O,
// 5 verification failure.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "faircover/errors.hpp"
#include "faircover/experiment.hpp"
#include "faircover/generator.hpp"
#include "faircover/snapshot.hpp"
#include "faircover/solvers.hpp"

namespace fs = std::filesystem;
using namespace faircover;

namespace {

enum Exit : int { kOk = 0, kUsage = 2, kValidation = 3, kIo = 4, kVerifyFailed = 5 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void setup_logging() {
  auto logger = spdlog::stderr_color_mt("faircover");
  spdlog::set_default_logger(logger);
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("FAIRCOVER_LOG")) {
    auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only accept real names.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
  }
}

SolverKind parse_solver(const std::string& name) {
  if (name == "greedy") return SolverKind::Greedy;
  if (name == "lazy") return SolverKind::LazyGreedy;
  if (name == "distorted") return SolverKind::DistortedGreedy;
  if (name == "stochastic") return SolverKind::StochasticDistortedGreedy;
  if (name == "brute") return SolverKind::BruteForce;
  throw UsageError("unknown solver '" + name + "'");
}

FileFormat parse_format(const std::string& name) {
  if (name == "csv") return FileFormat::Csv;
  if (name == "json") return FileFormat::Json;
  throw UsageError("unknown format '" + name + "'");
}

std::vector<CompositeWeight> parse_betas(const std::string& text) {
  std::vector<CompositeWeight> out;
  std::stringstream ss(text);
  for (std::string part; std::getline(ss, part, ',');) {
    const auto eq = part.find('=');
    if (eq == std::string::npos) throw UsageError("--beta expects name=weight pairs, got '" + part + "'");
    try {
      out.push_back({part.substr(0, eq), std::stod(part.substr(eq + 1))});
    } catch (const std::logic_error&) {
      throw UsageError("--beta weight for '" + part.substr(0, eq) + "' is not a number");
    }
  }
  return out;
}

/// Shared objective flags.
const CLI::IsMember kSolverNames({"greedy", "lazy", "distorted", "stochastic", "brute"});
const CLI::IsMember kAuxNames({"utility-max", "cost-per-utility-min", "composite", "none"});
const CLI::IsMember kFormatNames({"csv", "json"});

struct ObjectiveFlags {
  std::string solver = "lazy";
  std::vector<double> alphas{1.0};
  std::size_t k = 20;
  std::string aux = "utility-max";
  std::string beta;
  double epsilon = 0.1;
  std::uint64_t seed = 0;
  std::size_t sample = 0;
  std::size_t parallelism = 1;
  std::string format = "csv";
  double aux_scale = 1.0;
  bool no_timing = false;

  void attach(CLI::App* app, bool with_alpha_list) {
    app->add_option("--solver", solver, "greedy, lazy, distorted, stochastic or brute")
        ->check(kSolverNames)
        ->capture_default_str();
    if (with_alpha_list)
      app->add_option("--alpha", alphas, "alpha grid, e.g. --alpha 0,0.5,1")->delimiter(',')->capture_default_str();
    else
      app->add_option("--alpha", alphas, "alpha")->expected(1)->capture_default_str();
    app->add_option("--k", k, "recommendations per buyer")->capture_default_str();
    app->add_option("--aux", aux, "utility-max, cost-per-utility-min, composite or none")
        ->check(kAuxNames)
        ->capture_default_str();
    app->add_option("--beta", beta, "composite weights, e.g. utility=1,cost=0");
    app->add_option("--epsilon", epsilon, "stochastic error parameter")->capture_default_str();
    app->add_option("--seed", seed, "seed for sampling and stochastic solvers")->capture_default_str();
    app->add_option("--sample", sample, "evaluate a uniform sample of N sessions (0 = all)");
    app->add_option("--parallelism", parallelism, "worker threads")->capture_default_str();
    app->add_option("--format", format, "csv or json")->check(kFormatNames)->capture_default_str();
    app->add_option("--aux-scale", aux_scale, "multiply reported G by this factor")->capture_default_str();
    app->add_flag("--no-timing", no_timing, "write 0 for wall times (byte-reproducible output)");
  }

  SolverKind kind() const { return parse_solver(solver); }

  ObjectiveSpec spec(const Snapshot& snapshot) const {
    ObjectiveSpec s;
    s.alpha = alphas.empty() ? 1.0 : alphas.front();
    s.k = k;
    s.epsilon = epsilon;
    s.seed = seed;
    if (aux == "utility-max") {
      s.aux = AuxMode::UtilityMax;
    } else if (aux == "cost-per-utility-min") {
      s.aux = AuxMode::CostPerUtilityMin;
    } else if (aux == "none") {
      s.aux = AuxMode::NoAux;
    } else if (aux == "composite") {
      s.composite_weights = parse_betas(beta);
      switch (kind()) {
        case SolverKind::Greedy:
        case SolverKind::LazyGreedy: s.aux = AuxMode::CompositeMax; break;
        case SolverKind::DistortedGreedy:
        case SolverKind::StochasticDistortedGreedy: s.aux = AuxMode::CompositeMin; break;
        case SolverKind::BruteForce:
          s.aux = snapshot.queries.empty()
                      ? AuxMode::CompositeMax
                      : composite_direction(s.composite_weights, snapshot.queries.front(), snapshot.catalog);
          break;
      }
    } else {
      throw UsageError("unknown aux mode '" + aux + "'");
    }
    if (!beta.empty() && aux != "composite") throw UsageError("--beta only applies to --aux composite");
    s.validate();
    check_compatibility(kind(), s.aux);
    return s;
  }

  SweepOptions options() const {
    if (parallelism == 0) throw UsageError("--parallelism must be at least 1");
    return {aux_scale, !no_timing, parallelism};
  }
};

Snapshot load_input(const std::string& input, std::size_t sample, std::uint64_t seed) {
  if (input.empty()) throw UsageError("--input is required");
  spdlog::info("loading snapshot {}", input);
  auto snap = load_snapshot(input);
  std::size_t negatives = 0;
  for (const auto& q : snap.queries)
    for (const auto& c : q.candidates) negatives += c.utility < 0.0;
  if (negatives > 0) spdlog::warn("{} candidate rows have negative utility", negatives);
  if (sample > 0) snap.queries = sample_queries(snap.queries, sample, seed);
  spdlog::info("{} items, {} stakeholders, {} buyers", snap.catalog.item_count(),
               snap.catalog.stakeholder_count(), snap.queries.size());
  return snap;
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("cannot write " + path.string());
}

// --- gen ---------------------------------------------------------------------

struct GenFlags {
  std::string output;
  std::string format = "csv";
  std::uint64_t seed = 42;
  std::size_t n_items = 2000;
  std::size_t m_buyers = 200;
  std::size_t t = 5;
  std::vector<double> probs;
  bool single_membership = false;
  std::vector<double> fraction{0.05, 0.15};
  std::string utility = "uniform:0.05:1";
  std::string cost = "lognormal:12.5:0.5";
};

std::vector<double> dist_params(const std::string& text, const std::string& kind, std::size_t count) {
  std::vector<double> out;
  std::stringstream ss(text.substr(kind.size()));
  std::string part;
  std::getline(ss, part, ':');  // leading empty field
  while (std::getline(ss, part, ':')) {
    try {
      out.push_back(std::stod(part));
    } catch (const std::logic_error&) {
      throw UsageError("bad distribution parameter '" + part + "' in '" + text + "'");
    }
  }
  if (out.size() != count) throw UsageError("distribution '" + text + "' needs " + std::to_string(count) + " parameters");
  return out;
}

int cmd_gen(const GenFlags& f) {
  if (f.output.empty()) throw UsageError("--output is required");
  GeneratorConfig cfg;
  cfg.seed = f.seed;
  cfg.n_items = f.n_items;
  cfg.m_buyers = f.m_buyers;
  cfg.t_stakeholders = f.t;
  cfg.membership_probabilities = f.probs.empty() ? default_membership_probabilities(f.t) : f.probs;
  cfg.multi_membership = !f.single_membership;
  if (f.fraction.size() != 2) throw UsageError("--candidate-fraction expects low,high");
  cfg.candidate_fraction = {f.fraction[0], f.fraction[1]};
  if (f.utility.rfind("uniform", 0) == 0) {
    const auto p = dist_params(f.utility, "uniform", 2);
    cfg.utility = UniformDistribution{p[0], p[1]};
  } else if (f.utility.rfind("exponential", 0) == 0) {
    cfg.utility = ExponentialDistribution{dist_params(f.utility, "exponential", 1)[0]};
  } else {
    throw UsageError("--utility-dist must be uniform:a:b or exponential:rate");
  }
  if (f.cost.rfind("lognormal", 0) == 0) {
    const auto p = dist_params(f.cost, "lognormal", 2);
    cfg.cost = LognormalDistribution{p[0], p[1]};
  } else if (f.cost.rfind("uniform", 0) == 0) {
    const auto p = dist_params(f.cost, "uniform", 2);
    cfg.cost = UniformDistribution{p[0], p[1]};
  } else {
    throw UsageError("--cost-dist must be lognormal:mu:sigma or uniform:a:b");
  }
  const auto snap = generate_instance(cfg);
  save_snapshot(snap, f.output, parse_format(f.format));
  spdlog::info("wrote {} items and {} buyers to {}", snap.catalog.item_count(), snap.queries.size(), f.output);
  return kOk;
}

// --- solve / sweep -----------------------------------------------------------

void print_aggregates(const SweepReport& report) {
  std::cout << "alpha,solver,buyers,fraction_nonnegative";
  for (const auto& s : report.stakeholders) std::cout << ",mean_delta_" << s;
  std::cout << ",mean_F,mean_G,mean_F_alpha\n";
  for (const auto& a : report.aggregates) {
    std::cout << format_double(a.alpha) << "," << to_string(a.solver) << "," << a.buyers << ","
              << format_double(a.fraction_nonnegative);
    for (double d : a.mean_delta) std::cout << "," << format_double(d);
    std::cout << "," << format_double(a.mean_coverage) << "," << format_double(a.mean_aux) << ","
              << format_double(a.mean_combined) << "\n";
  }
}

int report_errors(const std::vector<std::string>& errors) {
  for (const auto& e : errors) spdlog::error("{}", e);
  return errors.empty() ? kOk : kValidation;
}

int cmd_solve(const std::string& input, const std::string& output, const std::string& chosen_path,
              const ObjectiveFlags& f) {
  if (output.empty()) throw UsageError("--output is required");
  if (f.alphas.size() != 1) throw UsageError("solve takes a single --alpha");
  const auto snap = load_input(input, f.sample, f.seed);
  const auto spec = f.spec(snap);
  const auto options = f.options();

  const auto batch = solve_batch(snap.catalog, snap.queries, spec, f.kind(), options.parallelism);
  SweepReport report;
  report.stakeholders = snap.catalog.stakeholder_names();
  report.seed = spec.seed;
  std::vector<std::string> errors;
  std::string chosen = "buyer_id,rank,item_id\n";
  for (const auto& e : batch) {
    if (!e.ok()) {
      errors.push_back("buyer '" + e.buyer + "': " + e.error);
      continue;
    }
    report.rows.push_back(make_sweep_row(spec.alpha, *e.report, options));
    for (std::size_t r = 0; r < e.report->chosen.size(); ++r)
      chosen += e.buyer + "," + std::to_string(r) + "," + std::to_string(e.report->chosen[r].value) + "\n";
  }
  report.aggregates = aggregate_rows(report.stakeholders.size(), report.rows);
  write_sweep_report(report, output, parse_format(f.format));
  if (!chosen_path.empty()) write_text(chosen_path, chosen);
  print_aggregates(report);
  return report_errors(errors);
}

int cmd_sweep(const std::string& input, const std::string& output, const ObjectiveFlags& f) {
  if (output.empty()) throw UsageError("--output is required");
  if (f.alphas.empty()) throw UsageError("--alpha grid must not be empty");
  const auto snap = load_input(input, f.sample, f.seed);
  const auto spec = f.spec(snap);
  const auto result = run_sweep(snap, spec, f.alphas, f.kind(), f.options());
  write_sweep_report(result.report, output, parse_format(f.format));
  print_aggregates(result.report);
  return report_errors(result.errors);
}

// --- bench -------------------------------------------------------------------

struct BenchFlags {
  std::string input;
  std::string output;
  std::vector<std::string> solvers{"greedy", "lazy", "distorted", "stochastic"};
  double alpha = 0.5;
  std::size_t k = 20;
  std::string aux;
  double epsilon = 0.1;
  std::uint64_t seed = 0;
  std::size_t sample = 0;
  std::size_t trials = 3;
  std::size_t warmup = 1;
  bool no_timing = false;
};

int cmd_bench(const BenchFlags& f) {
  const auto snap = load_input(f.input, f.sample, f.seed);
  std::vector<BenchCase> cases;
  for (const auto& name : f.solvers) {
    ObjectiveFlags of;
    of.solver = name;
    of.alphas = {f.alpha};
    of.k = f.k;
    of.epsilon = f.epsilon;
    of.seed = f.seed;
    const auto kind = of.kind();
    if (!f.aux.empty())
      of.aux = f.aux;
    else if (kind == SolverKind::DistortedGreedy || kind == SolverKind::StochasticDistortedGreedy)
      of.aux = "cost-per-utility-min";
    else
      of.aux = "utility-max";
    cases.push_back({kind, of.spec(snap)});
  }
  auto rows = run_bench(snap, cases, f.trials, f.warmup);
  if (f.no_timing)
    for (auto& row : rows) row.mean_wall_us = row.median_wall_us = 0.0;
  const auto table = bench_csv(rows);
  if (f.output.empty())
    std::cout << table;
  else
    write_text(f.output, table);
  return kOk;
}

// --- verify ------------------------------------------------------------------

struct VerifyFlags {
  std::string input;
  std::string report;
  std::string chosen;
  std::string output;
  bool run = false;
  ObjectiveFlags objective;
  std::size_t submodularity = 0;
};

std::map<std::string, std::vector<ItemId>> read_chosen(const fs::path& path, const Snapshot& snap) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::map<std::string, const BuyerQuery*> buyers;
  for (const auto& q : snap.queries) buyers.emplace(q.buyer, &q);
  std::map<std::string, std::vector<ItemId>> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line_no == 1) {
      if (line != "buyer_id,rank,item_id") throw ParseError("chosen file: unexpected header", 1, 1);
      continue;
    }
    std::stringstream ss(line);
    std::string buyer, rank, item;
    if (!std::getline(ss, buyer, ',') || !std::getline(ss, rank, ',') || !std::getline(ss, item, ','))
      throw ParseError("chosen file: expected 3 fields", line_no, 1);
    auto it = buyers.find(buyer);
    if (it == buyers.end())
      throw IntegrityError("chosen file names buyer '" + buyer + "' which the snapshot does not have");
    ItemId id;
    try {
      id = ItemId{static_cast<std::uint32_t>(std::stoul(item))};
    } catch (const std::logic_error&) {
      throw ParseError("chosen file: bad item id '" + item + "'", line_no, 1);
    }
    const auto& cands = it->second->candidates;
    if (std::none_of(cands.begin(), cands.end(), [&](const Candidate& c) { return c.item == id; }))
      throw IntegrityError("item " + item + " is not a candidate of buyer '" + buyer + "'");
    out[buyer].push_back(id);
  }
  return out;
}

int cmd_verify(const VerifyFlags& f) {
  const auto& of = f.objective;
  auto snap = load_input(f.input, of.sample, of.seed);
  const std::size_t k = of.k;
  std::ostringstream summary;
  bool pass = true;
  bool any_check = false;

  std::optional<std::map<std::string, std::vector<ItemId>>> chosen;
  if (f.run) {
    const auto spec = of.spec(snap);
    chosen.emplace();
    for (const auto& e : solve_batch(snap.catalog, snap.queries, spec, of.kind(), of.options().parallelism)) {
      if (!e.ok()) throw ValidationError("buyer '" + e.buyer + "': " + e.error);
      (*chosen)[e.buyer] = e.report->chosen;
    }
  } else if (!f.chosen.empty()) {
    chosen = read_chosen(f.chosen, snap);
  }

  std::map<std::string, std::vector<std::int64_t>> recomputed;
  if (chosen) {
    any_check = true;
    std::vector<BuyerQuery> queries;
    std::vector<std::vector<ItemId>> sets;
    std::size_t fair = 0;
    std::size_t exact = 0;
    for (const auto& q : snap.queries) {
      auto it = chosen->find(q.buyer);
      if (it == chosen->end()) continue;
      const auto profile = compute_fairness_profile(snap.catalog, q);
      auto deltas = fairness_deltas(profile, it->second, snap.catalog, k);
      bool buyer_fair = true;
      for (std::size_t s = 0; s < deltas.size(); ++s) {
        if (deltas[s] < 0) {
          buyer_fair = false;
          if (f.report.empty())
            summary << "unfair: buyer " << q.buyer << " stakeholder " << snap.catalog.stakeholder_names()[s]
                    << " delta " << deltas[s] << "\n";
        }
      }
      fair += buyer_fair;
      exact += satisfies_fair_coverage(profile, it->second, snap.catalog, k);
      if (f.report.empty()) pass &= buyer_fair;
      recomputed.emplace(q.buyer, std::move(deltas));
      queries.push_back(q);
      sets.push_back(it->second);
    }
    summary << "fair buyers: " << fair << "/" << queries.size() << "\n";
    summary << "buyers meeting every share exactly: " << exact << "/" << queries.size() << "\n";
    const auto provider = provider_constraint_check(snap.catalog, queries, sets, k);
    summary << "stakeholder,achieved,required,satisfied\n";
    for (std::size_t s = 0; s < provider.size(); ++s) {
      summary << snap.catalog.stakeholder_names()[s] << "," << format_double(provider[s].achieved) << ","
              << format_double(provider[s].required) << "," << (provider[s].satisfied ? "yes" : "no") << "\n";
      pass &= provider[s].satisfied;
    }
  }

  if (!f.report.empty()) {
    any_check = true;
    const auto rows = read_sweep_rows(f.report, snap.catalog.stakeholder_names());
    std::map<std::string, bool> known;
    for (const auto& q : snap.queries) known[q.buyer] = true;
    for (const auto& row : rows) {
      if (!known.count(row.buyer))
        throw IntegrityError("report names buyer '" + row.buyer + "' which the snapshot does not have");
      for (std::size_t s = 0; s < row.deltas.size(); ++s) {
        if (row.deltas[s] < 0) {
          pass = false;
          summary << "unfair: buyer " << row.buyer << " stakeholder " << snap.catalog.stakeholder_names()[s]
                  << " delta " << row.deltas[s] << " (alpha " << format_double(row.alpha) << ")\n";
        }
      }
      if (chosen) {
        auto it = recomputed.find(row.buyer);
        if (it == recomputed.end())
          throw IntegrityError("report buyer '" + row.buyer + "' has no chosen set");
        if (it->second != row.deltas) {
          pass = false;
          summary << "mismatch: buyer " << row.buyer << " report deltas disagree with the chosen set\n";
        }
      }
    }
    summary << "report rows checked: " << rows.size() << "\n";
  }

  if (f.submodularity > 0) {
    any_check = true;
    const auto check = check_submodularity(snap, k, f.submodularity, of.seed);
    summary << "submodularity: " << check.violations << " violations in " << check.triples << " triples\n";
    if (check.violations > 0) {
      pass = false;
      summary << "first violation: " << check.first_violation << "\n";
    }
  }

  if (!any_check) throw UsageError("verify needs --report, --chosen, --run or --submodularity");
  summary << (pass ? "PASS" : "FAIL") << "\n";
  std::cout << summary.str();
  if (!f.output.empty()) write_text(f.output, summary.str());
  return pass ? kOk : kVerifyFailed;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Fair multistakeholder coverage for top-k re-ranking"};
  app.require_subcommand(1);

  GenFlags gen;
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic snapshot");
  gen_cmd->add_option("--output", gen.output, "output directory (csv) or file (json)");
  gen_cmd->add_option("--format", gen.format, "csv or json")->check(kFormatNames)->capture_default_str();
  gen_cmd->add_option("--seed", gen.seed)->capture_default_str();
  gen_cmd->add_option("--n-items", gen.n_items)->capture_default_str();
  gen_cmd->add_option("--m-buyers", gen.m_buyers)->capture_default_str();
  gen_cmd->add_option("--t", gen.t, "stakeholder count")->capture_default_str();
  gen_cmd->add_option("--membership-probs", gen.probs, "one probability per stakeholder")->delimiter(',');
  gen_cmd->add_flag("--single-membership", gen.single_membership, "at most one stakeholder per item");
  gen_cmd->add_option("--candidate-fraction", gen.fraction, "low,high")->delimiter(',')->expected(2);
  gen_cmd->add_option("--utility-dist", gen.utility, "uniform:a:b or exponential:rate")->capture_default_str();
  gen_cmd->add_option("--cost-dist", gen.cost, "lognormal:mu:sigma or uniform:a:b")->capture_default_str();

  std::string input, output, chosen_out;
  ObjectiveFlags solve_flags;
  auto* solve_cmd = app.add_subcommand("solve", "solve every buyer at one alpha");
  solve_cmd->add_option("--input", input, "snapshot directory or JSON file");
  solve_cmd->add_option("--output", output, "report path");
  solve_cmd->add_option("--chosen", chosen_out, "also write chosen items (buyer_id,rank,item_id)");
  solve_flags.attach(solve_cmd, false);

  ObjectiveFlags sweep_flags;
  sweep_flags.alphas = {0.0, 0.25, 0.5, 0.75, 1.0};
  auto* sweep_cmd = app.add_subcommand("sweep", "solve every buyer over an alpha grid");
  sweep_cmd->add_option("--input", input, "snapshot directory or JSON file");
  sweep_cmd->add_option("--output", output, "report path");
  sweep_flags.attach(sweep_cmd, true);

  BenchFlags bench;
  auto* bench_cmd = app.add_subcommand("bench", "compare solver runtimes and oracle calls");
  bench_cmd->add_option("--input", bench.input, "snapshot directory or JSON file");
  bench_cmd->add_option("--output", bench.output, "table path (default stdout)");
  bench_cmd->add_option("--solver", bench.solvers, "solvers to run")->delimiter(',')->check(kSolverNames);
  bench_cmd->add_option("--alpha", bench.alpha)->capture_default_str();
  bench_cmd->add_option("--k", bench.k)->capture_default_str();
  bench_cmd->add_option("--aux", bench.aux, "override the per-solver default aux mode")->check(kAuxNames);
  bench_cmd->add_option("--epsilon", bench.epsilon)->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed)->capture_default_str();
  bench_cmd->add_option("--sample", bench.sample);
  bench_cmd->add_option("--trials", bench.trials)->capture_default_str();
  bench_cmd->add_option("--warmup", bench.warmup)->capture_default_str();
  bench_cmd->add_flag("--no-timing", bench.no_timing, "write 0 for wall times (byte-reproducible output)");

  VerifyFlags verify;
  auto* verify_cmd = app.add_subcommand("verify", "check fairness, the provider constraint and submodularity");
  verify_cmd->add_option("--input", verify.input, "snapshot directory or JSON file");
  verify_cmd->add_option("--report", verify.report, "sweep/solve CSV report to check");
  verify_cmd->add_option("--chosen", verify.chosen, "chosen-items CSV from solve");
  verify_cmd->add_option("--output", verify.output, "also write the summary here");
  verify_cmd->add_flag("--run", verify.run, "solve now with the objective flags, then verify");
  verify_cmd->add_option("--submodularity", verify.submodularity, "spot-check N sampled triples");
  verify.objective.attach(verify_cmd, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(gen);
    if (*solve_cmd) return cmd_solve(input, output, chosen_out, solve_flags);
    if (*sweep_cmd) return cmd_sweep(input, output, sweep_flags);
    if (*bench_cmd) return cmd_bench(bench);
    if (*verify_cmd) return cmd_verify(verify);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const IoError& e) {
    spdlog::error("{}", e.what());
    return kIo;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return kValidation;
  }
  return kUsage;
}
