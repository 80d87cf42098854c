#include "mergeplan/bench/report.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <map>
#include <json.hpp>
#include <stdexcept>

#include "mergeplan/util/keyvalue.hpp"

namespace mergeplan::bench {

using util::format_double;

namespace {

double rate(std::size_t count, std::size_t total) {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(count) / static_cast<double>(total);
}

int variant_rank(const std::string& name) {
  const auto v = mcts::parse_variant(name);
  return v ? static_cast<int>(*v) : 1000;
}

double metric_value(const ReportRow& row, std::string_view metric) {
  if (metric == "collision") return row.collision_rate();
  if (metric == "success") return row.success_rate();
  if (metric == "zipper") return row.zipper_rate();
  if (metric == "safe_distance") return row.safe_distance_rate();
  throw std::invalid_argument("unknown metric '" + std::string(metric) + "'");
}

}  // namespace

double ReportRow::collision_rate() const { return rate(collisions, episodes); }
double ReportRow::success_rate() const { return rate(successes, episodes); }
double ReportRow::zipper_rate() const { return rate(zipper_episodes, episodes); }
double ReportRow::safe_distance_rate() const { return rate(safe_distance_episodes, episodes); }

const ReportRow* BenchmarkReport::find(std::string_view variant, std::size_t budget) const {
  for (const auto& r : rows) {
    if (r.variant == variant && r.budget == budget) return &r;
  }
  return nullptr;
}

BenchmarkReport aggregate(const std::vector<EpisodeResult>& results) {
  if (results.empty()) throw std::invalid_argument("nothing to aggregate");
  std::map<std::pair<std::string, std::size_t>, ReportRow> rows;
  for (const auto& e : results) {
    const std::string variant(mcts::to_string(e.variant));
    ReportRow& row = rows[{variant, e.budget}];
    row.variant = variant;
    row.budget = e.budget;
    if (!e.error.empty()) continue;
    ++row.episodes;
    row.collisions += e.outcome == Outcome::kCollision;
    row.successes += e.outcome == Outcome::kSuccess;
    row.timeouts += e.outcome == Outcome::kTimeout;
    row.zipper_episodes += e.violations(mcts::kZipperRule) > 0;
    row.safe_distance_episodes += e.violations(mcts::kSafeDistanceRule) > 0;
  }
  BenchmarkReport report;
  for (auto& [key, row] : rows) report.rows.push_back(row);
  std::stable_sort(report.rows.begin(), report.rows.end(), [](const ReportRow& a, const ReportRow& b) {
    const int ra = variant_rank(a.variant);
    const int rb = variant_rank(b.variant);
    if (ra != rb) return ra < rb;
    if (a.variant != b.variant) return a.variant < b.variant;
    return a.budget < b.budget;
  });
  return report;
}

std::string format_csv(const BenchmarkReport& r) {
  std::string out =
      "variant,budget,episodes,collisions,successes,timeouts,zipper_episodes,safe_distance_episodes,"
      "collision_pct,success_pct,zipper_pct,safe_distance_pct\n";
  for (const auto& row : r.rows) {
    out += row.variant + "," + std::to_string(row.budget) + "," + std::to_string(row.episodes) + "," +
           std::to_string(row.collisions) + "," + std::to_string(row.successes) + "," + std::to_string(row.timeouts) +
           "," + std::to_string(row.zipper_episodes) + "," + std::to_string(row.safe_distance_episodes) + "," +
           format_double(row.collision_rate()) + "," + format_double(row.success_rate()) + "," +
           format_double(row.zipper_rate()) + "," + format_double(row.safe_distance_rate()) + "\n";
  }
  return out;
}

std::string format_summary_json(const BenchmarkReport& r) {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"variant", row.variant},
                    {"budget", row.budget},
                    {"episodes", row.episodes},
                    {"collisions", row.collisions},
                    {"successes", row.successes},
                    {"timeouts", row.timeouts},
                    {"zipper_episodes", row.zipper_episodes},
                    {"safe_distance_episodes", row.safe_distance_episodes},
                    {"collision_pct", row.collision_rate()},
                    {"success_pct", row.success_rate()},
                    {"zipper_pct", row.zipper_rate()},
                    {"safe_distance_pct", row.safe_distance_rate()}});
  }
  nlohmann::ordered_json doc{{"rows", rows}};
  return doc.dump(2) + "\n";
}

BenchmarkReport parse_summary_json(const std::string& text) {
  const auto doc = nlohmann::json::parse(text);
  BenchmarkReport r;
  for (const auto& j : doc.at("rows")) {
    ReportRow row;
    row.variant = j.at("variant").get<std::string>();
    row.budget = j.at("budget").get<std::size_t>();
    row.episodes = j.at("episodes").get<std::size_t>();
    row.collisions = j.at("collisions").get<std::size_t>();
    row.successes = j.at("successes").get<std::size_t>();
    row.timeouts = j.at("timeouts").get<std::size_t>();
    row.zipper_episodes = j.at("zipper_episodes").get<std::size_t>();
    row.safe_distance_episodes = j.at("safe_distance_episodes").get<std::size_t>();
    r.rows.push_back(row);
  }
  return r;
}

std::string format_bar_chart(const BenchmarkReport& r, std::string_view metric) {
  std::vector<std::string> variants;
  std::vector<std::size_t> budgets;
  for (const auto& row : r.rows) {
    if (std::find(variants.begin(), variants.end(), row.variant) == variants.end()) variants.push_back(row.variant);
    if (std::find(budgets.begin(), budgets.end(), row.budget) == budgets.end()) budgets.push_back(row.budget);
  }
  std::sort(budgets.begin(), budgets.end());
  static constexpr std::array<const char*, 6> kColors{"#4c72b0", "#dd8452", "#55a868", "#c44e52", "#8172b3",
                                                      "#937860"};

  const double left = 60, top = 40, plot_h = 260, group_w = 110, bar_gap = 4;
  const double plot_w = group_w * std::max<std::size_t>(variants.size(), 1);
  const double width = left + plot_w + 150;
  const double height = top + plot_h + 60;
  const double bar_w = (group_w - 20) / std::max<std::size_t>(budgets.size(), 1) - bar_gap;
  auto y_of = [&](double pct) { return top + plot_h * (1.0 - pct / 100.0); };
  auto num = [](double x) { return format_double(std::round(x * 100.0) / 100.0); };

  std::string out = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(width) + "\" height=\"" + num(height) +
                    "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  out += "<text x=\"" + num(left) + "\" y=\"20\" font-size=\"14\">" + std::string(metric) + " rate (%)</text>\n";
  for (int tick = 0; tick <= 100; tick += 20) {
    const double y = y_of(tick);
    out += "<line x1=\"" + num(left) + "\" y1=\"" + num(y) + "\" x2=\"" + num(left + plot_w) + "\" y2=\"" + num(y) +
           "\" stroke=\"#dddddd\"/>\n";
    out += "<text x=\"" + num(left - 8) + "\" y=\"" + num(y + 4) + "\" text-anchor=\"end\">" + std::to_string(tick) +
           "</text>\n";
  }
  out += "<line x1=\"" + num(left) + "\" y1=\"" + num(y_of(0)) + "\" x2=\"" + num(left) + "\" y2=\"" + num(y_of(100)) +
         "\" stroke=\"black\"/>\n";
  for (std::size_t g = 0; g < variants.size(); ++g) {
    const double gx = left + group_w * g + 10;
    for (std::size_t b = 0; b < budgets.size(); ++b) {
      const ReportRow* row = r.find(variants[g], budgets[b]);
      if (row == nullptr) continue;
      const double v = metric_value(*row, metric);
      const double x = gx + b * (bar_w + bar_gap);
      out += "<rect x=\"" + num(x) + "\" y=\"" + num(y_of(v)) + "\" width=\"" + num(bar_w) + "\" height=\"" +
             num(y_of(0) - y_of(v)) + "\" fill=\"" + kColors[b % kColors.size()] + "\"><title>" + variants[g] + " " +
             std::to_string(budgets[b]) + ": " + format_double(v) + "</title></rect>\n";
    }
    out += "<text x=\"" + num(gx + (group_w - 20) / 2) + "\" y=\"" + num(y_of(0) + 18) +
           "\" text-anchor=\"middle\">" + variants[g] + "</text>\n";
  }
  for (std::size_t b = 0; b < budgets.size(); ++b) {
    const double y = top + 16.0 * b;
    out += "<rect x=\"" + num(left + plot_w + 20) + "\" y=\"" + num(y) + "\" width=\"10\" height=\"10\" fill=\"" +
           kColors[b % kColors.size()] + "\"/>\n";
    out += "<text x=\"" + num(left + plot_w + 36) + "\" y=\"" + num(y + 9) + "\">" + std::to_string(budgets[b]) +
           " iterations</text>\n";
  }
  out += "</svg>\n";
  return out;
}

void emit_report(const BenchmarkReport& r, const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create '" + dir + "': " + ec.message());
  const std::filesystem::path base(dir);
  util::write_file((base / "metrics.csv").string(), format_csv(r));
  util::write_file((base / "summary.json").string(), format_summary_json(r));
  for (std::string_view m : kMetrics) util::write_file((base / (std::string(m) + ".svg")).string(), format_bar_chart(r, m));
}

std::string format_episodes(const std::vector<EpisodeResult>& results) {
  std::string out = "scenario,variant,budget,seed,outcome,steps,zipper,safe_distance,invalid_actions,error\n";
  for (const auto& e : results) {
    std::string error = e.error;
    std::replace(error.begin(), error.end(), ',', ';');
    std::replace(error.begin(), error.end(), '\n', ' ');
    out += e.scenario + "," + std::string(mcts::to_string(e.variant)) + "," + std::to_string(e.budget) + "," +
           std::to_string(e.seed) + "," + (e.error.empty() ? std::string(to_string(e.outcome)) : "error") + "," +
           std::to_string(e.steps) + "," + std::to_string(e.violations(mcts::kZipperRule)) + "," +
           std::to_string(e.violations(mcts::kSafeDistanceRule)) + "," + std::to_string(e.invalid_actions) + "," +
           error + "\n";
  }
  return out;
}

std::string format_timing(const std::vector<EpisodeResult>& results) {
  std::string out = "scenario,variant,budget,seed,steps,wall_seconds\n";
  for (const auto& e : results) {
    out += e.scenario + "," + std::string(mcts::to_string(e.variant)) + "," + std::to_string(e.budget) + "," +
           std::to_string(e.seed) + "," + std::to_string(e.steps) + "," + format_double(e.wall_seconds) + "\n";
  }
  return out;
}

}  // namespace mergeplan::bench
