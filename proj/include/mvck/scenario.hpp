#pragma once

#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "mvck/messages.hpp"
#include "mvck/rules.hpp"
#include "mvck/value.hpp"

namespace mvck {

struct ParseError : std::runtime_error {
  int line = 0;
  ParseError(int line_no, const std::string& msg)
      : std::runtime_error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
};

struct ExpectationFailed : std::runtime_error {
  Tick tick = 0;
  Seq seq = 0;
  ExpectationFailed(Tick t, Seq s, const std::string& msg)
      : std::runtime_error("at tick " + std::to_string(t) + " seq " + std::to_string(s) + ": " +
                           msg),
        tick(t),
        seq(s) {}
};

// One line of a .scn file: a JSON object with an `at` tick and exactly one of
//   gesture       "key 3" | "edit A1 =()" | "focus field" | "command open"
//   tick          whole number of ticks to advance
//   expect        "<render kind> [payload substring]"
//   rule          rule grammar from the validation module
//   dataset_row   {"entity": ..., "version": ..., "values": {name: scalar}}
// '#' starts a comment line. `at` values must be non-decreasing.
struct ScenarioRecord {
  struct TickAdvance {
    Tick n;
  };
  struct Expect {
    std::string command_kind;
    std::string needle;  // substring of the canonical payload; may be empty
  };
  struct DatasetRow {
    std::string entity;
    Snapshot row;
    std::int64_t version;
  };

  int line_no = 0;
  Tick at = 0;
  std::variant<Gesture, TickAdvance, Expect, Rule, DatasetRow> v;

  bool is_setup() const {
    return std::holds_alternative<Rule>(v) || std::holds_alternative<DatasetRow>(v);
  }
};

std::vector<ScenarioRecord> parse_scenario(const std::string& text);  // throws ParseError

}  // namespace mvck
