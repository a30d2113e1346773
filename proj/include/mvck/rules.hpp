#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mvck/value.hpp"

namespace mvck {

enum class CrossRelation { Less, LessEqual, Equal, NotEqual };

std::string_view relation_text(CrossRelation rel);
std::optional<CrossRelation> parse_relation(std::string_view text);

// Declarative rule set shared by the eager (closed) and deferred (open)
// validation flows.
struct Rule {
  struct Required {
    std::string property;
  };
  struct IntRange {
    std::string property;
    std::int64_t min;
    std::int64_t max;  // inclusive
  };
  struct TextPattern {
    std::string property;
    std::string mask;
  };
  struct CrossField {
    std::string left;
    CrossRelation relation;
    std::string right;
  };
  struct FormulaWellFormed {
    std::string property;
  };

  std::variant<Required, IntRange, TextPattern, CrossField, FormulaWellFormed> v;

  static Rule required(std::string property) { return {Required{std::move(property)}}; }
  static Rule int_range(std::string property, std::int64_t min, std::int64_t max);
  static Rule text_pattern(std::string property, std::string mask);
  static Rule cross_field(std::string left, CrossRelation rel, std::string right);
  static Rule formula(std::string property) { return {FormulaWellFormed{std::move(property)}}; }

  std::vector<std::string> referenced_properties() const;
};

// Text grammar used by scenario files:
//   required <prop> | int_range <prop> <min> <max> | text_pattern <prop> <mask>
//   cross_field <left> {< | <= | = | !=} <right> | formula <prop>
std::optional<Rule> parse_rule(std::string_view line, std::string* error = nullptr);
std::string rule_text(const Rule& rule);

struct Violation {
  int rule_index = 0;
  std::string property;  // "left,right" for cross-field pairs
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;  // ruleset declaration order
  std::int64_t evaluated_revision = 0;

  bool clean() const { return violations.empty(); }
  std::string summary() const;  // "prop: message; ..." or "clean"
};

// Pure: same (snapshot, ruleset) always yields the same report. Absent values
// fail Required but are skipped by every other rule, so incomplete data is
// not double-penalized.
ValidationReport evaluate(const Snapshot& snapshot, const std::vector<Rule>& ruleset);

// Well-formedness used by FormulaWellFormed: text starting with '=' must have
// balanced parentheses and no empty "()" pair; anything else passes vacuously.
bool formula_well_formed(std::string_view text);

std::string to_canonical(const ValidationReport& report);

}  // namespace mvck
