// Command-line front end: single episodes, benchmark matrices, scenario
// suites, reports and rule compilation.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <iostream>

#include "mergeplan/bench/episode.hpp"
#include "mergeplan/bench/report.hpp"
#include "mergeplan/bench/scenario.hpp"
#include "mergeplan/ltlf/dfa.hpp"
#include "mergeplan/ltlf/rule_file.hpp"
#include "mergeplan/util/keyvalue.hpp"

namespace fs = std::filesystem;
using namespace mergeplan;

namespace {

struct CommonOptions {
  std::string planner_file;
  std::string behavior_file;
  std::string rules_file;
};

void add_common(CLI::App* app, CommonOptions& o) {
  app->add_option("--planner", o.planner_file, "Planner configuration file")->check(CLI::ExistingFile);
  app->add_option("--behavior", o.behavior_file, "Other-agent behavior file")->check(CLI::ExistingFile);
  app->add_option("--rules", o.rules_file, "Rule file (default: zipper and safe_distance)")->check(CLI::ExistingFile);
}

std::vector<ltlf::RuleSpec> rule_specs(const CommonOptions& o) {
  if (o.rules_file.empty()) return {ltlf::zipper_rule(), ltlf::safe_distance_rule()};
  return ltlf::load_rules(o.rules_file);
}

bench::EpisodeConfig episode_config(const CommonOptions& o) {
  bench::EpisodeConfig c;
  if (!o.planner_file.empty()) c.planner = mcts::load_planner_config(o.planner_file);
  if (!o.behavior_file.empty()) c.behavior = behavior::load_behavior_params(o.behavior_file);
  for (const auto& spec : rule_specs(o)) c.rules.push_back(ltlf::compile_rule(spec));
  return c;
}

mcts::Variant variant_arg(const std::string& name) {
  const auto v = mcts::parse_variant(name);
  if (!v) throw std::invalid_argument("unknown variant '" + name + "'");
  return *v;
}

std::vector<bench::Scenario> load_scenarios(const std::string& dir, std::uint64_t suite_seed) {
  if (dir.empty()) return bench::generate_suite(suite_seed);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".ini") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw std::invalid_argument("no .ini scenarios in '" + dir + "'");
  std::vector<bench::Scenario> out;
  for (const auto& f : files) {
    try {
      out.push_back(bench::load_scenario(f.string()));
    } catch (const util::DocumentError& e) {
      throw std::invalid_argument(f.string() + ": " + e.what());
    }
  }
  return out;
}

void write_file(const fs::path& p, const std::string& text) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  util::write_file(p.string(), text);
}

std::string summary_line(const bench::EpisodeResult& r) {
  std::string out = r.scenario + " " + std::string(mcts::to_string(r.variant)) + " budget " + std::to_string(r.budget) +
                    " seed " + std::to_string(r.seed) + ": " + std::string(bench::to_string(r.outcome)) + " after " +
                    std::to_string(r.steps) + " steps";
  for (const auto& c : r.rules) out += ", " + c.rule + " " + std::to_string(c.violations);
  return out;
}

int run_command(const CommonOptions& common, const std::string& scenario_file, std::uint64_t suite_seed,
                std::size_t index, const std::string& variant, std::optional<std::size_t> iterations,
                std::optional<std::uint64_t> seed, const std::string& out) {
  bench::EpisodeConfig cfg = episode_config(common);
  if (!variant.empty()) cfg.planner.variant = variant_arg(variant);
  if (iterations) cfg.planner.iterations = *iterations;
  if (seed) cfg.planner.seed = *seed;
  bench::Scenario sc;
  if (!scenario_file.empty()) {
    sc = bench::load_scenario(scenario_file);
  } else {
    const auto suite = bench::generate_suite(suite_seed);
    if (index >= suite.size()) throw std::invalid_argument("scenario index out of range");
    sc = suite[index];
  }
  try {
    const bench::EpisodeResult r = bench::run_episode(sc, cfg);
    std::cout << summary_line(r) << "\n";
    if (!out.empty()) {
      write_file(fs::path(out) / "trace.csv", bench::format_trace(r));
      write_file(fs::path(out) / "episode.csv", bench::format_episodes({r}));
    }
  } catch (const bench::EpisodeError& e) {
    std::cerr << "episode error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

struct BenchOptions {
  std::vector<std::string> variants;
  std::vector<std::size_t> budgets{200, 500, 1000};
  std::vector<std::uint64_t> seeds{1, 2, 3};
  std::uint64_t suite_seed = 1;
  std::string scenarios_dir;
  int threads = 0;
  bool serial = false;
  bool traces = false;
  std::string out = "bench_out";
};

int bench_command(const CommonOptions& common, const BenchOptions& o) {
  const bench::EpisodeConfig base = episode_config(common);
  std::vector<mcts::Variant> variants;
  for (const auto& name : o.variants) variants.push_back(variant_arg(name));
  if (variants.empty()) variants.assign(mcts::kBenchmarkVariants.begin(), mcts::kBenchmarkVariants.end());
  const auto scenarios = load_scenarios(o.scenarios_dir, o.suite_seed);
  const auto jobs = bench::make_jobs(scenarios.size(), variants, o.budgets, o.seeds);
  std::cerr << "running " << jobs.size() << " episodes" << (o.serial ? " serially" : "") << "\n";

  bench::EpisodeConfig cfg = base;
  cfg.record_trace = o.traces;
  const auto t0 = std::chrono::steady_clock::now();
  const auto results = o.serial ? bench::run_matrix_serial(scenarios, jobs, cfg)
                                : bench::run_matrix_parallel(scenarios, jobs, cfg, o.threads);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::size_t errors = 0;
  for (const auto& r : results) {
    if (r.error.empty()) continue;
    ++errors;
    std::cerr << "episode error: " << r.error << "\n";
  }
  const fs::path out(o.out);
  write_file(out / "episodes.csv", bench::format_episodes(results));
  write_file(out / "timing.csv", bench::format_timing(results));
  if (o.traces) {
    for (const auto& r : results) {
      if (!r.error.empty()) continue;
      const std::string name = r.scenario + "_" + std::string(mcts::to_string(r.variant)) + "_" +
                               std::to_string(r.budget) + "_" + std::to_string(r.seed) + ".csv";
      write_file(out / "traces" / name, bench::format_trace(r));
    }
  }
  if (errors < results.size()) {
    const auto report = bench::aggregate(results);
    bench::emit_report(report, out.string());
    std::cout << bench::format_csv(report);
  }
  std::cerr << "done in " << util::format_double(std::round(seconds * 10) / 10) << " s, " << errors << " errors\n";
  return errors == 0 ? 0 : 1;
}

int gen_command(std::uint64_t seed, std::size_t count, const std::string& out) {
  bench::SuiteParams p;
  p.count = count;
  for (const auto& sc : bench::generate_suite(seed, p)) write_file(fs::path(out) / (sc.name + ".ini"), bench::print_scenario(sc));
  std::cout << "wrote " << count << " scenarios to " << out << "\n";
  return 0;
}

int report_command(const std::string& input, const std::string& out) {
  const auto report = bench::parse_summary_json(util::read_file(input));
  bench::emit_report(report, out);
  std::cout << bench::format_csv(report);
  return 0;
}

int compile_command(const CommonOptions& common) {
  for (const auto& spec : rule_specs(common)) {
    const auto rule = ltlf::compile_rule(spec);
    std::cout << "rule " << spec.name << ": " << spec.formula << "\n" << rule->dfa->describe() << "\n";
  }
  return 0;
}

int defaults_command(const std::string& out) {
  write_file(fs::path(out) / "planner.ini", mcts::print_planner_config({}));
  write_file(fs::path(out) / "behavior.ini", behavior::print_behavior_params({}));
  write_file(fs::path(out) / "rules.ini", ltlf::print_rules({ltlf::zipper_rule(), ltlf::safe_distance_rule()}));
  std::cout << "wrote planner.ini, behavior.ini and rules.ini to " << out << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Rule-aware MCTS merge planner"};
  app.require_subcommand(1);
  CommonOptions common;

  auto* run = app.add_subcommand("run", "Run one episode");
  add_common(run, common);
  std::string scenario_file, variant, run_out;
  std::uint64_t suite_seed = 1;
  std::size_t index = 0;
  std::optional<std::size_t> iterations;
  std::optional<std::uint64_t> seed;
  run->add_option("--scenario", scenario_file, "Scenario file")->check(CLI::ExistingFile);
  run->add_option("--suite-seed", suite_seed, "Generated suite to pick from when no file is given");
  run->add_option("--index", index, "Scenario index in the generated suite");
  run->add_option("--variant", variant, "SA, SA-Lex, SA-Lex-Zip, SA-Lex-SD, SA-Lex-Zip-SD, SA-Lex-SD-Zip, SA-Lex-Rules");
  run->add_option("--iterations", iterations, "Search iterations per step");
  run->add_option("--seed", seed, "Search seed");
  run->add_option("--out", run_out, "Directory for trace.csv and episode.csv");

  auto* benchmark = app.add_subcommand("bench", "Run the variant x budget x scenario x seed matrix");
  add_common(benchmark, common);
  BenchOptions bo;
  benchmark->add_option("--variant", bo.variants, "Variants (default: the six benchmark variants)")->delimiter(',');
  benchmark->add_option("--budgets", bo.budgets, "Iteration budgets")->delimiter(',');
  benchmark->add_option("--seeds", bo.seeds, "Search seeds")->delimiter(',');
  benchmark->add_option("--suite-seed", bo.suite_seed, "Seed of the generated suite");
  benchmark->add_option("--scenarios", bo.scenarios_dir, "Directory of scenario files instead of a generated suite")
      ->check(CLI::ExistingDirectory);
  benchmark->add_option("--threads", bo.threads, "Worker threads (0: OpenMP default)");
  benchmark->add_flag("--serial", bo.serial, "Run episodes one after another");
  benchmark->add_flag("--traces", bo.traces, "Write every episode trace");
  benchmark->add_option("--out", bo.out, "Output directory");

  auto* gen = app.add_subcommand("gen", "Write a generated scenario suite");
  std::uint64_t gen_seed = 1;
  std::size_t gen_count = 20;
  std::string gen_out = "scenarios";
  gen->add_option("--seed", gen_seed, "Suite seed");
  gen->add_option("--count", gen_count, "Number of scenarios")->check(CLI::PositiveNumber);
  gen->add_option("--out", gen_out, "Output directory");

  auto* report = app.add_subcommand("report", "Rebuild tables and charts from summary.json");
  std::string report_in, report_out = "report";
  report->add_option("--input", report_in, "summary.json")->required()->check(CLI::ExistingFile);
  report->add_option("--out", report_out, "Output directory");

  auto* compile = app.add_subcommand("compile", "Compile rules and print their automata");
  add_common(compile, common);

  auto* defaults = app.add_subcommand("defaults", "Write the default configuration files");
  std::string defaults_out = "config";
  defaults->add_option("--out", defaults_out, "Output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) return run_command(common, scenario_file, suite_seed, index, variant, iterations, seed, run_out);
    if (*benchmark) return bench_command(common, bo);
    if (*gen) return gen_command(gen_seed, gen_count, gen_out);
    if (*report) return report_command(report_in, report_out);
    if (*compile) return compile_command(common);
    if (*defaults) return defaults_command(defaults_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
