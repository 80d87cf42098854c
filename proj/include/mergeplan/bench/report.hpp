#pragma once

// Aggregated benchmark metrics and report files.

#include <array>
#include <string>
#include <vector>

#include "mergeplan/bench/episode.hpp"

namespace mergeplan::bench {

struct ReportRow {
  std::string variant;
  std::size_t budget = 0;
  std::size_t episodes = 0;
  std::size_t collisions = 0;
  std::size_t successes = 0;
  std::size_t timeouts = 0;
  std::size_t zipper_episodes = 0;
  std::size_t safe_distance_episodes = 0;

  double collision_rate() const;
  double success_rate() const;
  double zipper_rate() const;
  double safe_distance_rate() const;
};

struct BenchmarkReport {
  std::vector<ReportRow> rows;

  const ReportRow* find(std::string_view variant, std::size_t budget) const;
};

// One row per (variant, budget), ordered by variant as listed for the
// benchmark and then by budget. Failed episodes are not counted. Throws
// std::invalid_argument on an empty input.
BenchmarkReport aggregate(const std::vector<EpisodeResult>& results);

std::string format_csv(const BenchmarkReport& r);
std::string format_summary_json(const BenchmarkReport& r);
BenchmarkReport parse_summary_json(const std::string& text);
// Grouped bar chart of one metric: groups are variants, bars are budgets,
// the value axis spans exactly 0 to 100 %.
std::string format_bar_chart(const BenchmarkReport& r, std::string_view metric);

inline constexpr std::array<std::string_view, 4> kMetrics{"collision", "success", "zipper", "safe_distance"};

// Writes metrics.csv, summary.json and <metric>.svg into `dir` (created when
// missing). Throws std::runtime_error on filesystem errors.
void emit_report(const BenchmarkReport& r, const std::string& dir);

// One line per episode in input order; failed episodes carry their message.
std::string format_episodes(const std::vector<EpisodeResult>& results);

// Wall-clock figures, kept apart from the deterministic report.
std::string format_timing(const std::vector<EpisodeResult>& results);

}  // namespace mergeplan::bench
