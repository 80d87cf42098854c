#pragma once

// Rule definition files. One [rule] block per rule; lines starting with ';'
// are comments:
//
//   [rule]
//   name = zipper
//   formula = G ((idf#j & !m#j) -> X !ahead#j)
//   weight = 1
//   priority = 1
//   per_agent = true
//
// name and formula are required; weight defaults to 1, priority to 0 and
// per_agent to false. print_rules() always writes every field, so
// parse_rules(print_rules(r)) == r.

#include <string>
#include <string_view>
#include <vector>

#include "mergeplan/ltlf/monitor.hpp"

namespace mergeplan::ltlf {

std::vector<RuleSpec> parse_rules(std::string_view text);
std::vector<RuleSpec> load_rules(const std::string& path);
std::string print_rules(const std::vector<RuleSpec>& rules);

// The two shipped rules.
RuleSpec safe_distance_rule();
RuleSpec zipper_rule();

}  // namespace mergeplan::ltlf
