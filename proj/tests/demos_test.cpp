#include <fstream>
#include <sstream>

#include "doctest.h"
#include "mvck/demos.hpp"

using namespace mvck;

namespace {

std::string scenario_path(const std::string& name) {
  return std::string(MVCK_SCENARIO_DIR) + "/" + name;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE_MESSAGE(in.good(), "missing file: ", path);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::string run_default_script(const std::string& demo) {
  DemoSession session(demo, {});
  session.run_script(slurp(scenario_path(session.descriptor().default_script)));
  return session.transcript().text();
}

}  // namespace

TEST_CASE("list_demos is stable, complete and names the patterns") {
  auto lines = list_demos();
  REQUIRE(lines.size() == 5);
  CHECK(lines[0].rfind("masked", 0) == 0);
  CHECK(lines[1].rfind("form", 0) == 0);
  CHECK(lines[2].rfind("sheet", 0) == 0);
  CHECK(lines[3].rfind("pager", 0) == 0);
  CHECK(lines[4].rfind("refdata", 0) == 0);
  CHECK(lines[0].find("passive_view") != std::string::npos);
  CHECK(lines[3].find("disconnected_model") != std::string::npos);
  CHECK(lines[4].find("model_as_services_facade") != std::string::npos);
  CHECK(lines[4].find("active_view") != std::string::npos);
  CHECK(list_demos() == lines);
}

TEST_CASE("scenario records parse with line-accurate errors") {
  CHECK(parse_scenario("# empty\n\n").empty());
  auto records = parse_scenario(
      "{\"at\":0,\"gesture\":\"command open\"}\n"
      "{\"at\":1,\"tick\":2}\n"
      "{\"at\":3,\"expect\":\"set_text Ada\"}\n"
      "{\"at\":3,\"rule\":\"required name\"}\n"
      "{\"at\":3,\"dataset_row\":{\"entity\":\"employee\",\"values\":{\"id\":99,"
      "\"name\":\"Zed\",\"rate\":{\"decimal\":\"1.50\"},\"active\":true}}}\n");
  REQUIRE(records.size() == 5);
  CHECK(std::get<Gesture>(records[0].v).is_command(CommandName::Open));
  CHECK(std::get<ScenarioRecord::TickAdvance>(records[1].v).n == 2);
  CHECK(std::get<ScenarioRecord::Expect>(records[2].v).command_kind == "set_text");
  CHECK(std::get<ScenarioRecord::Expect>(records[2].v).needle == "Ada");
  const auto& row = std::get<ScenarioRecord::DatasetRow>(records[4].v);
  CHECK(row.row.get("rate") == PropertyValue::decimal(150, 2));
  CHECK(row.row.get("active") == PropertyValue::flag(true));

  auto line_of = [](const std::string& text) {
    try {
      parse_scenario(text);
      return -1;
    } catch (const ParseError& e) {
      return e.line;
    }
  };
  CHECK(line_of("{\"at\":0,\"gesture\":\"command open\"}\nnot json\n") == 2);
  CHECK(line_of("{\"at\":5,\"tick\":1}\n{\"at\":4,\"tick\":1}\n") == 2);  // at went backwards
  CHECK(line_of("{\"at\":0}\n") == 1);
  CHECK(line_of("{\"at\":0,\"tick\":1,\"gesture\":\"key 1\"}\n") == 1);
  CHECK(line_of("{\"at\":0,\"gesture\":\"command explode\"}\n") == 1);
  CHECK(line_of("{\"at\":0,\"tick\":0}\n") == 1);
}

TEST_CASE("setup records are rejected once the run has started") {
  DemoSession session("form", {});
  session.run_script("{\"at\":0,\"rule\":\"required code\"}\n");
  CHECK_THROWS_AS(session.run_script("{\"at\":0,\"gesture\":\"command open\"}\n"
                                     "{\"at\":0,\"rule\":\"required name\"}\n"),
                  ParseError);
}

TEST_CASE("scenario rules join the demo ruleset") {
  DemoSession session("form", {});
  session.run_script(
      "{\"at\":0,\"rule\":\"required code\"}\n"
      "{\"at\":0,\"gesture\":\"command open\"}\n"
      "{\"at\":0,\"gesture\":\"edit name Ada\"}\n"
      "{\"at\":0,\"gesture\":\"edit age 30\"}\n"
      "{\"at\":0,\"gesture\":\"command commit\"}\n"
      "{\"at\":0,\"expect\":\"show_error code\"}\n");
  // without the extra rule this commit would have succeeded
}

TEST_CASE("a rule referencing an unknown property is a wiring error") {
  DemoSession session("form", {});
  CHECK_THROWS_AS(session.run_script("{\"at\":0,\"rule\":\"required ghost\"}\n"
                                     "{\"at\":0,\"gesture\":\"command open\"}\n"),
                  WiringError);
  try {
    DemoSession again("form", {});
    again.run_script("{\"at\":0,\"rule\":\"required ghost\"}\n"
                     "{\"at\":0,\"gesture\":\"command open\"}\n");
  } catch (...) {
    CHECK(exit_code_for_current_exception() == 4);
  }
}

TEST_CASE("dataset rows extend the service tables") {
  DemoSession session("pager", DemoOptions{std::nullopt, 1, 0.0});
  session.run_script(
      "{\"at\":0,\"dataset_row\":{\"entity\":\"employee\",\"values\":{\"id\":99,"
      "\"name\":\"Zed Extra\",\"role\":\"guest\",\"grade\":1}}}\n"
      "{\"at\":0,\"gesture\":\"command open\"}\n"
      "{\"at\":0,\"tick\":1}\n"
      "{\"at\":1,\"expect\":\"show_page \\\"page_index\\\":0\"}\n");
  // the appended row raised the dataset total from 45 to 46
  CHECK(session.transcript().text().find("\"total\":46") != std::string::npos);
}

TEST_CASE("expectation failures carry the exact position and exit code 3") {
  DemoSession session("masked", {});
  try {
    session.run_script(
        "{\"at\":0,\"gesture\":\"command open\"}\n"
        "{\"at\":0,\"expect\":\"show_page\"}\n");
    FAIL("expected ExpectationFailed");
  } catch (const ExpectationFailed& e) {
    CHECK(e.tick == 0);
    CHECK(e.seq == session.runtime().bus().next_seq());
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    CHECK(exit_code_for_current_exception() == 3);
  }
}

TEST_CASE("parse failures exit 2") {
  DemoSession session("masked", {});
  try {
    session.run_script("nope\n");
    FAIL("expected ParseError");
  } catch (const ParseError&) {
    CHECK(exit_code_for_current_exception() == 2);
  }
}

TEST_CASE("interactive lines and scripted records produce identical transcripts") {
  DemoSession scripted("sheet", {});
  scripted.run_script(
      "{\"at\":0,\"gesture\":\"command open\"}\n"
      "{\"at\":0,\"gesture\":\"edit A1 =()\"}\n"
      "{\"at\":0,\"gesture\":\"command new_window\"}\n"
      "{\"at\":0,\"tick\":2}\n"
      "{\"at\":2,\"gesture\":\"command commit\"}\n");

  DemoSession interactive("sheet", {});
  for (const char* line : {"command open", "edit A1 =()", "command new_window", "tick 2",
                           "command commit", "# a comment", ""}) {
    interactive.feed_line(line);
  }
  CHECK(scripted.transcript().text() == interactive.transcript().text());
}

TEST_CASE("every demo's default script runs clean and conforms to its patterns") {
  for (const DemoDescriptor& d : demo_registry()) {
    CAPTURE(d.name);
    DemoSession session(d.name, {});
    session.run_script(slurp(scenario_path(d.default_script)));
    auto violations = session.conformance();
    for (const std::string& v : violations) MESSAGE(v);
    CHECK(violations.empty());
  }
}

TEST_CASE("default scripts replay byte-identically") {
  for (const DemoDescriptor& d : demo_registry()) {
    CAPTURE(d.name);
    CHECK(run_default_script(d.name) == run_default_script(d.name));
  }
}

TEST_CASE("golden transcripts match bit-exactly") {
  for (const DemoDescriptor& d : demo_registry()) {
    CAPTURE(d.name);
    const std::string golden = slurp(scenario_path("golden/" + d.name + ".golden"));
    CHECK(run_default_script(d.name) == golden);
  }
}

TEST_CASE("the pager transcript pairs every fault with exactly one prompt") {
  DemoSession session("pager", {});
  session.run_script(slurp(scenario_path("pager_retry.scn")));
  int faults = 0;
  int prompts = 0;
  for (const std::string& line : session.transcript().lines) {
    if (line.find(" service_event ") != std::string::npos &&
        line.find("\"fault\"") != std::string::npos) {
      ++faults;
    }
    if (line.find("abort_retry_ignore") != std::string::npos &&
        line.find("\"kind\":\"prompt\"") != std::string::npos) {
      ++prompts;
    }
  }
  CHECK(faults == 1);
  CHECK(prompts == faults);
}

TEST_CASE("drain_renders only reports new deliveries") {
  DemoSession session("masked", {});
  session.feed_line("command open");
  auto first = session.drain_renders();
  CHECK(first.size() == 1);
  CHECK(session.drain_renders().empty());
  session.feed_line("key 5");
  auto second = session.drain_renders();
  REQUIRE(second.size() == 2);  // '(' literal plus the keyed digit
  CHECK(second[0].find("set_char_at") != std::string::npos);
}

TEST_CASE("unknown demo names are refused") {
  CHECK_THROWS_AS(DemoSession("tetris", {}), std::invalid_argument);
  CHECK(find_demo("tetris") == nullptr);
  CHECK(find_demo("sheet") != nullptr);
}
