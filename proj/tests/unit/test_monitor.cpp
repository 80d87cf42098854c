#include <doctest.h>

#include <random>

#include "mergeplan/ltlf/monitor.hpp"
#include "mergeplan/ltlf/parser.hpp"
#include "mergeplan/ltlf/rule_file.hpp"
#include "oracle/ltlf_oracle.hpp"

using namespace mergeplan::ltlf;

namespace {

std::shared_ptr<const RuleTemplate> rule(const std::string& formula, double weight = 1.0) {
  return compile_rule({"r", formula, weight, 0, formula.find('#') != std::string::npos});
}

LabelSet labels_of(const std::vector<std::string>& props, std::uint32_t sym, bool alive) {
  LabelSet l;
  for (std::size_t i = 0; i < props.size(); ++i) {
    if ((sym >> i) & 1U) l.insert(props[i]);
  }
  if (alive) l.insert(std::string(kAlive));
  return l;
}

}  // namespace

TEST_CASE("safe-distance monitor examples") {
  auto m = instantiate_rule(rule("G sd_front", 2.5));
  CHECK(m.step(LabelSet{"sd_front", "alive"}) == 0.0);
  CHECK(m.state() == m.dfa().initial());
  CHECK(m.step(LabelSet{"alive"}) == -2.5);
  CHECK(m.state() == m.dfa().initial());
  CHECK(m.violations() == 1);
}

TEST_CASE("G p on p, !p, p, !p charges twice") {
  auto m = instantiate_rule(rule("G p"));
  double total = 0;
  total += m.step(LabelSet{"p", "alive"});
  total += m.step(LabelSet{"alive"});
  total += m.step(LabelSet{"p", "alive"});
  total += m.step(LabelSet{});
  CHECK(total == -2.0);
  CHECK(m.finished());
  CHECK(m.step(LabelSet{}) == 0.0);
}

TEST_CASE("violation on the final step is charged once") {
  auto m = instantiate_rule(rule("G p"));
  CHECK(m.step(LabelSet{}) == -1.0);
  CHECK(m.violations() == 1);
}

TEST_CASE("fresh safety monitor is parked in an accepting state when the trace ends") {
  auto m = instantiate_rule(rule("G (a -> X b)"));
  CHECK(m.step(LabelSet{"a"}) == 0.0);
  CHECK(m.dfa().accepting(m.state()));
}

TEST_CASE("guarantee monitors charge only when alive drops") {
  auto m = instantiate_rule(rule("F p"));
  CHECK(m.step(LabelSet{"alive"}) == 0.0);
  CHECK(m.step(LabelSet{"alive"}) == 0.0);
  CHECK(m.step(LabelSet{}) == -1.0);

  auto ok = instantiate_rule(rule("F p"));
  CHECK(ok.step(LabelSet{"alive"}) == 0.0);
  CHECK(ok.step(LabelSet{"p", "alive"}) == 0.0);
  CHECK(ok.step(LabelSet{}) == 0.0);
}

TEST_CASE("transition is pure and resets safety rules on traps") {
  const auto r = rule("G p");
  const Dfa& dfa = *r->dfa;
  for (StateId q = 0; q < dfa.state_count(); ++q) {
    for (Symbol s = 0; s < dfa.symbol_count(); ++s) {
      for (bool alive : {true, false}) {
        const Transition a = transition(dfa, RuleKind::kSafety, q, s, alive);
        const Transition b = transition(dfa, RuleKind::kSafety, q, s, alive);
        CHECK(a.next == b.next);
        CHECK(a.charged == b.charged);
        if (a.charged) CHECK(a.next == dfa.initial());
      }
    }
  }
}

TEST_CASE("slot binding") {
  const auto zip = compile_rule(zipper_rule());
  auto m3 = instantiate_rule(zip, 3);
  auto m2 = instantiate_rule(zip, 2);
  CHECK(&m3.dfa() == &m2.dfa());
  CHECK(std::find(m3.grounded_props().begin(), m3.grounded_props().end(), "idf#3") != m3.grounded_props().end());
  CHECK(std::find(m3.grounded_props().begin(), m3.grounded_props().end(), "ahead#3") != m3.grounded_props().end());
  CHECK_THROWS_AS(instantiate_rule(zip), BindingError);

  // Agent 3 passes an unmerged direct-front vehicle: m3 is charged, m2 is not.
  CHECK(m3.step(LabelSet{"idf#3", "alive"}) == 0.0);
  CHECK(m2.step(LabelSet{"idf#3", "alive"}) == 0.0);
  CHECK(m3.step(LabelSet{"ahead#3", "alive"}) == -1.0);
  CHECK(m2.step(LabelSet{"ahead#3", "alive"}) == 0.0);
  CHECK(m3.state() == m3.dfa().initial());
}

TEST_CASE("rule compile errors") {
  CHECK_THROWS_AS(compile_rule({"x", "G (a#j & b#k)", 1, 0, true}), BindingError);
  CHECK_THROWS_AS(compile_rule({"x", "G a#j", 1, 0, false}), BindingError);
  CHECK_THROWS_AS(compile_rule({"x", "G a", 1, 0, true}), BindingError);
  CHECK_THROWS_AS(compile_rule({"x", "G alive", 1, 0, false}), BindingError);
  CHECK_THROWS_AS(compile_rule({"x", "a U b", 1, 0, false}), FragmentError);
  CHECK_NOTHROW(compile_rule({"x", "G a#4", 1, 0, false}));
}

TEST_CASE("despawn equals truncating the trace") {
  // Truncated trace evaluated offline vs. monitor receiving alive-absent at despawn.
  std::mt19937_64 rng(5);
  const std::vector<std::string> props{"idf#4", "m#4", "ahead#4"};
  const auto zip = compile_rule(zipper_rule());
  const Formula body = parse_syntax("(idf#4 & !m#4) -> X !ahead#4");
  oracle::SafetySplitter oracle(body, props);
  for (int n = 0; n < 300; ++n) {
    std::uniform_int_distribution<int> len(1, 10);
    std::uniform_int_distribution<std::uint32_t> sym(0, 7);
    oracle::Trace t(len(rng));
    for (auto& s : t) s = sym(rng);
    const std::size_t despawn = std::uniform_int_distribution<std::size_t>(1, t.size())(rng);
    auto m = instantiate_rule(zip, 4);
    int charged = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      charged += m.step(labels_of(props, t[k], k + 1 < despawn)) < 0;
    }
    REQUIRE(charged == oracle.count(oracle::Trace(t.begin(), t.begin() + static_cast<long>(despawn))));
  }
}

TEST_CASE("monitor penalties match the splitting and evaluation oracles") {
  std::mt19937_64 rng(17);
  const std::vector<std::string> props{"a", "b", "c"};
  for (int n = 0; n < 300; ++n) {
    const Formula body = oracle::random_body(rng, props, 3);
    const bool safety = n % 2 == 0;
    const Formula f = safety ? Formula::globally(body) : Formula::finally(body);
    const auto r = compile_rule({"r", f.to_string(), 1.0, 0, false});
    oracle::Trace t(std::uniform_int_distribution<int>(1, 12)(rng));
    for (auto& s : t) s = std::uniform_int_distribution<std::uint32_t>(0, 7)(rng);

    auto m = instantiate_rule(r);
    int charged = 0;
    for (std::size_t k = 0; k < t.size(); ++k) {
      const double pen = m.step(labels_of(props, t[k], k + 1 < t.size()));
      charged += pen < 0;
      if (safety && pen < 0) REQUIRE(m.state() == m.dfa().initial());
    }
    const int expected = safety ? oracle::SafetySplitter(body, props).count(t) : !oracle::satisfies(f, t, props);
    REQUIRE_MESSAGE(charged == expected, f.to_string());
  }
}

TEST_CASE("rule files round-trip") {
  const std::vector<RuleSpec> rules{safe_distance_rule(), zipper_rule(), {"late", "F at_goal", 0.25, 3, false}};
  const std::string text = print_rules(rules);
  CHECK(parse_rules(text) == rules);
  CHECK(print_rules(parse_rules(text)) == text);

  const auto parsed = parse_rules("; shipped\n[rule]\nname = sd\nformula = G sd_front\n");
  REQUIRE(parsed.size() == 1);
  CHECK(parsed[0].weight == 1.0);
  CHECK(parsed[0].priority == 0);
  CHECK_FALSE(parsed[0].per_agent);

  CHECK_THROWS(parse_rules("[rule]\nname = a\n"));
  CHECK_THROWS(parse_rules("[rule]\nname = a\nformula = G a\nweight = -1\n"));
  CHECK_THROWS(parse_rules("[rule]\nname = a\nformula = G a\n[rule]\nname = a\nformula = G b\n"));
  CHECK_THROWS(parse_rules("[rules]\nname = a\n"));
}
