#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "edgesim/oracle.hpp"
#include "edgesim/simulation.hpp"

namespace {

using namespace edgesim;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitIo = 2;

struct CommonOpts {
  std::string scenario_path;
  std::string out_dir = "out";
  std::string algo;
  std::string format = "both";
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool adjust = false;
  double slot_seconds = 0.0;
  bool parallel = false;
  bool timeseries = false;
};

Scenario load_with_overrides(const CommonOpts& opts) {
  Scenario s = load_scenario_file(opts.scenario_path);
  if (!opts.algo.empty()) {
    const auto a = algorithm_from_string(opts.algo);
    if (!a) throw std::invalid_argument("unknown --algo " + opts.algo);
    s.algorithm = *a;
  }
  if (opts.seed_set) s.seed = opts.seed;
  if (opts.adjust) s.adjust_auction_time = true;
  if (opts.slot_seconds > 0) s.clock.slot_seconds = opts.slot_seconds;
  if (opts.parallel) s.parallel_auctions = true;
  if (opts.timeseries) s.emit_timeseries = true;
  return s;
}

ReportFormat parse_format(const std::string& f) {
  if (f == "csv") return ReportFormat::Csv;
  if (f == "json") return ReportFormat::Json;
  return ReportFormat::Both;
}

void add_common(CLI::App* cmd, CommonOpts& opts, bool needs_scenario = true) {
  auto* sc = cmd->add_option("--scenario", opts.scenario_path,
                             "scenario JSON file");
  if (needs_scenario) sc->required();
  cmd->add_option("--out", opts.out_dir, "output directory");
  cmd->add_option("--algo", opts.algo,
                  "kg-preempt | kg-retain | dk-preempt | dk-retain");
  cmd->add_option("--format", opts.format, "csv | json | both");
  cmd->add_option("--seed", opts.seed, "run seed")
      ->each([&](const std::string&) { opts.seed_set = true; });
  cmd->add_flag("--adjust-auction-time", opts.adjust,
                "shorten deadlines by the configured auction durations");
  cmd->add_option("--slot-seconds", opts.slot_seconds,
                  "override the scenario slot duration");
  cmd->add_flag("--parallel", opts.parallel,
                "run per-server auctions concurrently");
  cmd->add_flag("--timeseries", opts.timeseries,
                "emit per-epoch counters");
}

std::vector<std::uint64_t> parse_seeds(const std::string& spec) {
  std::vector<std::uint64_t> seeds;
  std::stringstream ss(spec);
  std::string part;
  while (std::getline(ss, part, ',')) {
    const auto colon = part.find(':');
    if (colon == std::string::npos) {
      seeds.push_back(std::stoull(part));
    } else {
      const auto lo = std::stoull(part.substr(0, colon));
      const auto hi = std::stoull(part.substr(colon + 1));
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    }
  }
  return seeds;
}

int cmd_gen(const CommonOpts& opts) {
  const Scenario s = load_with_overrides(opts);
  const auto jobs = gen_jobs(s.workload, s.clock.horizon, s.seed);
  std::filesystem::create_directories(opts.out_dir);
  nlohmann::json arr = nlohmann::json::array();
  for (const auto& j : jobs) arr.push_back(job_to_json(j));
  std::ofstream(std::filesystem::path(opts.out_dir) / "jobs.json")
      << arr.dump(2) << "\n";
  std::cout << "wrote " << jobs.size() << " jobs to " << opts.out_dir
            << "/jobs.json\n";
  return kExitOk;
}

int cmd_run(const CommonOpts& opts) {
  const Scenario s = load_with_overrides(opts);
  const SimulationResult result = run_simulation(s);
  write_reports(result, s, opts.out_dir, parse_format(opts.format));
  const Metrics& m = result.metrics;
  std::cout << to_string(s.algorithm) << " seed=" << s.seed
            << " completed=" << m.completed.count << "/" << m.generated.count
            << " utility=" << m.completed.utility
            << " preemptions=" << m.preemption_events << "\n";
  return kExitOk;
}

struct CompareRow {
  std::string algo;
  std::uint64_t seed;
  Metrics raw;
  bool has_adjusted = false;
  Metrics adjusted;
};

int cmd_compare(const CommonOpts& opts, const std::string& algos_spec,
                const std::string& seeds_spec, bool with_adjusted) {
  const Scenario base = load_with_overrides(opts);
  std::vector<Algorithm> algos;
  {
    std::stringstream ss(algos_spec);
    std::string part;
    while (std::getline(ss, part, ',')) {
      const auto a = algorithm_from_string(part);
      if (!a) throw std::invalid_argument("unknown algorithm " + part);
      algos.push_back(*a);
    }
  }
  const auto seeds = parse_seeds(seeds_spec);
  if (algos.empty() || seeds.empty())
    throw std::invalid_argument("compare needs algorithms and seeds");

  std::vector<CompareRow> rows;
  for (const auto algo : algos) {
    for (const auto seed : seeds) {
      Scenario s = base;
      s.algorithm = algo;
      s.seed = seed;
      CompareRow row;
      row.algo = to_string(algo);
      row.seed = seed;
      {
        Scenario raw = s;
        raw.adjust_auction_time = false;
        row.raw = run_simulation(raw).metrics;
      }
      if (with_adjusted) {
        Scenario adj = s;
        adj.adjust_auction_time = true;
        row.adjusted = run_simulation(adj).metrics;
        row.has_adjusted = true;
      }
      rows.push_back(std::move(row));
    }
  }

  std::filesystem::create_directories(opts.out_dir);
  std::ofstream csv(std::filesystem::path(opts.out_dir) / "compare.csv");
  csv << "algo,seed,completed_utility,completed_count,rejected_count,"
         "preempted_lost_count,preemption_events,admissions";
  if (with_adjusted)
    csv << ",adjusted_completed_utility,adjusted_completed_count,"
           "adjusted_preemption_events";
  csv << "\n";
  for (const auto& r : rows) {
    csv << r.algo << "," << r.seed << "," << r.raw.completed.utility << ","
        << r.raw.completed.count << "," << r.raw.rejected.count << ","
        << r.raw.preempted_lost.count << "," << r.raw.preemption_events << ","
        << r.raw.admissions;
    if (with_adjusted)
      csv << "," << r.adjusted.completed.utility << ","
          << r.adjusted.completed.count << ","
          << r.adjusted.preemption_events;
    csv << "\n";
  }

  // per-algorithm mean / stddev summary over seeds
  std::ofstream summary(std::filesystem::path(opts.out_dir) /
                        "compare_summary.csv");
  summary << "algo,runs,mean_completed_utility,stddev_completed_utility";
  if (with_adjusted) summary << ",mean_adjusted_utility";
  summary << "\n";
  for (const auto algo : algos) {
    const std::string name = to_string(algo);
    double sum = 0, sum2 = 0, sum_adj = 0;
    long n = 0;
    for (const auto& r : rows) {
      if (r.algo != name) continue;
      sum += r.raw.completed.utility;
      sum2 += r.raw.completed.utility * r.raw.completed.utility;
      if (r.has_adjusted) sum_adj += r.adjusted.completed.utility;
      ++n;
    }
    const double mean = sum / static_cast<double>(n);
    const double var =
        std::max(0.0, sum2 / static_cast<double>(n) - mean * mean);
    summary << name << "," << n << "," << mean << "," << std::sqrt(var);
    if (with_adjusted) summary << "," << sum_adj / static_cast<double>(n);
    summary << "\n";
    std::cout << name << ": mean utility " << mean;
    if (with_adjusted)
      std::cout << " (adjusted " << sum_adj / static_cast<double>(n) << ")";
    std::cout << "\n";
  }
  return kExitOk;
}

int cmd_export(const CommonOpts& opts) {
  const Scenario s = load_with_overrides(opts);
  std::filesystem::create_directories(opts.out_dir);
  const std::string model = export_model(s);
  std::ofstream(std::filesystem::path(opts.out_dir) / "model.txt") << model;
  std::cout << "wrote " << opts.out_dir << "/model.txt\n";
  return kExitOk;
}

int cmd_validate(const std::string& model_path,
                 const std::string& solution_path) {
  std::ifstream mf(model_path);
  if (!mf) throw std::runtime_error("cannot open model: " + model_path);
  std::stringstream model;
  model << mf.rdbuf();

  std::ifstream sf(solution_path);
  if (!sf) throw std::runtime_error("cannot open solution: " + solution_path);
  const nlohmann::json sol = nlohmann::json::parse(sf);

  const ValidationReport report = validate_solution(model.str(), sol);
  std::cout << "objective: " << report.objective << "\n";
  if (!report.defaulted.empty())
    std::cout << report.defaulted.size() << " variables defaulted\n";
  for (const auto& v : report.violations)
    std::cerr << "VIOLATION " << v.constraint << ": " << v.detail << "\n";
  std::cout << (report.ok ? "solution is feasible" : "solution is infeasible")
            << "\n";
  return report.ok ? kExitOk : kExitValidation;
}

int cmd_bound(const CommonOpts& opts) {
  const Scenario s = load_with_overrides(opts);
  const BoundWitness bound = brute_force_bound(s);
  std::filesystem::create_directories(opts.out_dir);
  nlohmann::json out;
  out["utility_bound"] = bound.utility;
  nlohmann::json assign = nlohmann::json::object();
  for (const auto& [job, server] : bound.assignment)
    assign[std::to_string(job)] = server;
  out["assignment"] = assign;
  std::ofstream(std::filesystem::path(opts.out_dir) / "bound.json")
      << out.dump(2) << "\n";
  std::cout << "bound: " << bound.utility << " (" << bound.assignment.size()
            << " jobs placed)\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"edge-cloud auction scheduling simulator"};
  app.require_subcommand(1);

  CommonOpts gen_opts, run_opts, cmp_opts, exp_opts, bound_opts;
  std::string algos_spec =
      "kg-preempt,kg-retain,dk-preempt,dk-retain";
  std::string seeds_spec = "1:20";
  bool cmp_adjusted = false;
  std::string model_path, solution_path;

  add_common(app.add_subcommand("gen", "generate a workload's jobs file"),
             gen_opts);
  add_common(app.add_subcommand("run", "run one scenario"), run_opts);
  auto* cmp = app.add_subcommand("compare",
                                 "run an algorithm x seed grid and summarize");
  add_common(cmp, cmp_opts);
  cmp->add_option("--algos", algos_spec, "comma-separated algorithm list");
  cmp->add_option("--seeds", seeds_spec, "seed list: 1,2,3 or 1:20");
  cmp->add_flag("--adjust-auction-time", cmp_adjusted,
                "add auction-duration-adjusted columns");

  add_common(app.add_subcommand("export-model",
                                "write the solver-facing model file"),
             exp_opts);
  auto* val = app.add_subcommand("validate",
                                 "check a solution against a model file");
  val->add_option("--model", model_path, "model.txt")->required();
  val->add_option("--solution", solution_path, "solution JSON")->required();
  add_common(app.add_subcommand("bound", "brute-force utility bound"),
             bound_opts);

  CLI11_PARSE(app, argc, argv);

  try {
    if (app.got_subcommand("gen")) return cmd_gen(gen_opts);
    if (app.got_subcommand("run")) return cmd_run(run_opts);
    if (app.got_subcommand("compare"))
      return cmd_compare(cmp_opts, algos_spec, seeds_spec, cmp_adjusted);
    if (app.got_subcommand("export-model")) return cmd_export(exp_opts);
    if (app.got_subcommand("validate"))
      return cmd_validate(model_path, solution_path);
    if (app.got_subcommand("bound")) return cmd_bound(bound_opts);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  }
  return kExitOk;
}
