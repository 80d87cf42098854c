#include "mergeplan/ltlf/rule_file.hpp"

#include <set>

#include "mergeplan/util/keyvalue.hpp"

namespace mergeplan::ltlf {

std::vector<RuleSpec> parse_rules(std::string_view text) {
  const auto doc = util::Document::parse(text);
  std::vector<RuleSpec> rules;
  std::set<std::string> names;
  for (const auto& section : doc.sections()) {
    if (section.name() != "rule") {
      throw util::DocumentError(section.name(), section.line(), "unknown section, expected [rule]");
    }
    section.reject_unknown({"name", "formula", "weight", "priority", "per_agent"});
    RuleSpec r;
    r.name = section.get_string("name");
    r.formula = section.get_string("formula");
    r.weight = section.opt_double("weight").value_or(1.0);
    r.priority = static_cast<int>(section.opt_int("priority").value_or(0));
    r.per_agent = section.opt_bool("per_agent").value_or(false);
    if (r.weight < 0.0) throw util::DocumentError("weight", section.require("weight").line, "must be non-negative");
    if (r.priority < 0) throw util::DocumentError("priority", section.require("priority").line, "must be >= 0");
    if (!names.insert(r.name).second) {
      throw util::DocumentError("name", section.require("name").line, "duplicate rule name '" + r.name + "'");
    }
    rules.push_back(std::move(r));
  }
  return rules;
}

std::vector<RuleSpec> load_rules(const std::string& path) { return parse_rules(util::read_file(path)); }

std::string print_rules(const std::vector<RuleSpec>& rules) {
  std::string out;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    const auto& r = rules[i];
    if (i > 0) out += "\n";
    out += "[rule]\n";
    out += "name = " + r.name + "\n";
    out += "formula = " + r.formula + "\n";
    out += "weight = " + util::format_double(r.weight) + "\n";
    out += "priority = " + std::to_string(r.priority) + "\n";
    out += std::string("per_agent = ") + (r.per_agent ? "true" : "false") + "\n";
  }
  return out;
}

RuleSpec safe_distance_rule() { return {"safe_distance", "G sd_front", 1.0, 2, false}; }

RuleSpec zipper_rule() { return {"zipper", "G ((idf#j & !m#j) -> X !ahead#j)", 1.0, 1, true}; }

}  // namespace mergeplan::ltlf
