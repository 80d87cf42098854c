// Serial versus OpenMP episode runner on the same job list. Prints wall time
// for both and whether the aggregated reports are identical.
//
//   bench_runners [budget] [scenarios] [threads]

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>

#include "mergeplan/bench/episode.hpp"
#include "mergeplan/bench/report.hpp"
#include "mergeplan/ltlf/rule_file.hpp"

using namespace mergeplan;

namespace {

template <class F>
double seconds(F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  f();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t budget = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 200;
  const std::size_t count = argc > 2 ? std::strtoul(argv[2], nullptr, 10) : 6;
  const int threads = argc > 3 ? std::atoi(argv[3]) : omp_get_max_threads();

  bench::SuiteParams p;
  p.count = count;
  const auto scenarios = bench::generate_suite(1, p);
  bench::EpisodeConfig cfg;
  cfg.rules = {ltlf::compile_rule(ltlf::zipper_rule()), ltlf::compile_rule(ltlf::safe_distance_rule())};
  cfg.record_trace = false;
  const std::vector<mcts::Variant> variants(mcts::kBenchmarkVariants.begin(), mcts::kBenchmarkVariants.end());
  const auto jobs = bench::make_jobs(scenarios.size(), variants, {budget}, {1});

  std::vector<bench::EpisodeResult> serial, parallel;
  const double ts = seconds([&] { serial = bench::run_matrix_serial(scenarios, jobs, cfg); });
  const double tp = seconds([&] { parallel = bench::run_matrix_parallel(scenarios, jobs, cfg, threads); });
  const bool same = bench::format_episodes(serial) == bench::format_episodes(parallel);

  std::printf("episodes %zu, budget %zu, threads %d\n", jobs.size(), budget, threads);
  std::printf("serial   %8.3f s\n", ts);
  std::printf("parallel %8.3f s  speedup %.2f\n", tp, ts / tp);
  std::printf("identical results: %s\n", same ? "yes" : "no");
  return same ? 0 : 1;
}
