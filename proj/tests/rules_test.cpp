#include <random>

#include "doctest.h"
#include "mvck/rules.hpp"

using namespace mvck;

namespace {

Snapshot snap(std::initializer_list<std::pair<const char*, PropertyValue>> values) {
  Snapshot s;
  for (const auto& [name, value] : values) s.define(name, value);
  return s;
}

}  // namespace

TEST_CASE("required fails on absent only") {
  const std::vector<Rule> rules = {Rule::required("age")};
  CHECK(evaluate(snap({{"age", PropertyValue::absent()}}), rules).violations.size() == 1);
  CHECK(evaluate(snap({{"age", PropertyValue::integer(0)}}), rules).clean());
  CHECK(evaluate(snap({{"age", PropertyValue::text("")}}), rules).clean());
}

TEST_CASE("cross field compares and reports the pair") {
  const std::vector<Rule> rules = {
      Rule::cross_field("start", CrossRelation::LessEqual, "end")};
  auto report = evaluate(
      snap({{"start", PropertyValue::integer(5)}, {"end", PropertyValue::integer(3)}}), rules);
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].property == "start,end");
  CHECK(evaluate(snap({{"start", PropertyValue::integer(3)}, {"end", PropertyValue::integer(3)}}),
                 rules)
            .clean());
  // Absent on either side is skipped: incomplete data is not double-penalized.
  CHECK(evaluate(snap({{"start", PropertyValue::absent()}, {"end", PropertyValue::integer(3)}}),
                 rules)
            .clean());
}

TEST_CASE("cross field handles mixed numerics and flags incomparability") {
  CHECK(evaluate(snap({{"a", PropertyValue::decimal(25, 1)},  // 2.5
                       {"b", PropertyValue::integer(3)}}),
                 {Rule::cross_field("a", CrossRelation::Less, "b")})
            .clean());
  auto report = evaluate(snap({{"a", PropertyValue::text("x")}, {"b", PropertyValue::integer(3)}}),
                         {Rule::cross_field("a", CrossRelation::Less, "b")});
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].message == "incomparable kinds");
}

TEST_CASE("formula well-formedness matches the spreadsheet behavior") {
  CHECK_FALSE(formula_well_formed("=()"));
  CHECK(formula_well_formed("=(1)"));
  CHECK(formula_well_formed("x"));  // not a formula, passes vacuously
  CHECK_FALSE(formula_well_formed("=(("));
  CHECK_FALSE(formula_well_formed("=)("));
  CHECK(formula_well_formed("=SUM(1,2)"));

  auto report = evaluate(snap({{"A1", PropertyValue::text("=()")}}), {Rule::formula("A1")});
  REQUIRE(report.violations.size() == 1);
  CHECK(report.violations[0].message == "invalid formula");
}

TEST_CASE("int range checks integers, decimals and numeric text") {
  const std::vector<Rule> rules = {Rule::int_range("age", 0, 150)};
  CHECK(evaluate(snap({{"age", PropertyValue::integer(150)}}), rules).clean());
  CHECK_FALSE(evaluate(snap({{"age", PropertyValue::integer(-5)}}), rules).clean());
  CHECK(evaluate(snap({{"age", PropertyValue::decimal(1495, 1)}}), rules).clean());  // 149.5
  CHECK_FALSE(evaluate(snap({{"age", PropertyValue::decimal(1505, 1)}}), rules).clean());
  CHECK(evaluate(snap({{"age", PropertyValue::text("33")}}), rules).clean());
  CHECK_FALSE(evaluate(snap({{"age", PropertyValue::text("abc")}}), rules).clean());
  CHECK_FALSE(evaluate(snap({{"age", PropertyValue::flag(true)}}), rules).clean());
  CHECK(evaluate(snap({{"age", PropertyValue::absent()}}), rules).clean());
}

TEST_CASE("text pattern skips absent and rejects non-text") {
  const std::vector<Rule> rules = {Rule::text_pattern("code", "AA-##")};
  CHECK(evaluate(snap({{"code", PropertyValue::text("ab-12")}}), rules).clean());
  CHECK_FALSE(evaluate(snap({{"code", PropertyValue::text("ab-1")}}), rules).clean());
  CHECK(evaluate(snap({{"code", PropertyValue::absent()}}), rules).clean());
  CHECK_FALSE(evaluate(snap({{"code", PropertyValue::integer(5)}}), rules).clean());
}

TEST_CASE("violations come out in ruleset declaration order") {
  const std::vector<Rule> rules = {Rule::int_range("b", 0, 1), Rule::required("a")};
  auto report = evaluate(
      snap({{"a", PropertyValue::absent()}, {"b", PropertyValue::integer(9)}}), rules);
  REQUIRE(report.violations.size() == 2);
  CHECK(report.violations[0].rule_index == 0);
  CHECK(report.violations[1].rule_index == 1);
}

TEST_CASE("evaluate is pure") {
  std::mt19937_64 rng(42);
  const std::vector<Rule> rules = {Rule::required("a"), Rule::int_range("b", -10, 10),
                                   Rule::cross_field("b", CrossRelation::NotEqual, "c")};
  for (int i = 0; i < 200; ++i) {
    Snapshot s;
    auto random_value = [&]() -> PropertyValue {
      switch (rng() % 4) {
        case 0: return PropertyValue::absent();
        case 1: return PropertyValue::integer(static_cast<std::int64_t>(rng() % 40) - 20);
        case 2: return PropertyValue::text(std::to_string(rng() % 10));
        default: return PropertyValue::decimal(static_cast<std::int64_t>(rng() % 100), 1);
      }
    };
    s.define("a", random_value());
    s.define("b", random_value());
    s.define("c", random_value());
    auto first = evaluate(s, rules);
    auto second = evaluate(s, rules);
    REQUIRE(to_canonical(first) == to_canonical(second));
    CHECK(first.evaluated_revision == s.revision());
  }
}

TEST_CASE("rule text grammar round-trips") {
  for (const char* text : {"required name", "int_range age 0 150", "text_pattern code AA-##",
                           "cross_field start <= end", "formula A1"}) {
    auto rule = parse_rule(text);
    REQUIRE(rule.has_value());
    CHECK(rule_text(*rule) == text);
  }
  std::string err;
  CHECK_FALSE(parse_rule("int_range age 5 1", &err).has_value());
  CHECK_FALSE(parse_rule("bogus x", &err).has_value());
}
