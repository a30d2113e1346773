#include "mvck/scenario.hpp"

#include <sstream>

#include "json_detail.hpp"

namespace mvck {

namespace {

PropertyValue value_from_json(const nlohmann::json& j, int line_no) {
  if (j.is_null()) return PropertyValue::absent();
  if (j.is_string()) return PropertyValue::text(j.get<std::string>());
  if (j.is_boolean()) return PropertyValue::flag(j.get<bool>());
  if (j.is_number_integer()) return PropertyValue::integer(j.get<std::int64_t>());
  if (j.is_object() && j.contains("decimal")) {
    auto d = parse_decimal(j["decimal"].get<std::string>());
    if (!d) throw ParseError(line_no, "bad decimal literal");
    return PropertyValue::decimal(*d);
  }
  throw ParseError(line_no, "unsupported scalar value");
}

}  // namespace

std::vector<ScenarioRecord> parse_scenario(const std::string& text) {
  std::vector<ScenarioRecord> records;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  Tick last_at = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::string_view sv = line;
    while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
    if (sv.empty() || sv.front() == '#') continue;

    nlohmann::json j;
    try {
      j = nlohmann::json::parse(sv);
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(line_no, std::string("not a record: ") + e.what());
    }
    if (!j.is_object() || !j.contains("at") || !j["at"].is_number_integer()) {
      throw ParseError(line_no, "record needs an integer `at` field");
    }

    ScenarioRecord rec;
    rec.line_no = line_no;
    rec.at = j["at"].get<Tick>();
    if (rec.at < last_at) throw ParseError(line_no, "`at` went backwards");
    last_at = rec.at;

    int bodies = 0;
    for (const char* key : {"gesture", "tick", "expect", "rule", "dataset_row"}) {
      if (j.contains(key)) ++bodies;
    }
    if (bodies != 1) {
      throw ParseError(line_no,
                       "record needs exactly one of gesture/tick/expect/rule/dataset_row");
    }

    if (j.contains("gesture")) {
      std::string err;
      auto g = parse_gesture(j["gesture"].get<std::string>(), &err);
      if (!g) throw ParseError(line_no, err);
      rec.v = *g;
    } else if (j.contains("tick")) {
      if (!j["tick"].is_number_integer() || j["tick"].get<Tick>() < 1) {
        throw ParseError(line_no, "tick advance must be >= 1");
      }
      rec.v = ScenarioRecord::TickAdvance{j["tick"].get<Tick>()};
    } else if (j.contains("expect")) {
      const std::string spec = j["expect"].get<std::string>();
      const std::size_t space = spec.find(' ');
      ScenarioRecord::Expect e;
      e.command_kind = spec.substr(0, space);
      if (space != std::string::npos) e.needle = spec.substr(space + 1);
      if (e.command_kind.empty()) throw ParseError(line_no, "expect needs a render kind");
      rec.v = e;
    } else if (j.contains("rule")) {
      std::string err;
      auto r = parse_rule(j["rule"].get<std::string>(), &err);
      if (!r) throw ParseError(line_no, err);
      rec.v = *r;
    } else {
      const nlohmann::json& row = j["dataset_row"];
      if (!row.is_object() || !row.contains("entity") || !row.contains("values")) {
        throw ParseError(line_no, "dataset_row needs entity and values");
      }
      ScenarioRecord::DatasetRow d;
      d.version = 1;
      d.entity = row["entity"].get<std::string>();
      if (row.contains("version")) d.version = row["version"].get<std::int64_t>();
      for (const auto& [name, value] : row["values"].items()) {
        d.row.define(name, value_from_json(value, line_no));
      }
      rec.v = std::move(d);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace mvck
