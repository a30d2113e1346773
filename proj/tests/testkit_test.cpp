#include <algorithm>

#include "doctest.h"
#include "mvck/testkit.hpp"
#include "mvck/triad.hpp"

using namespace mvck;

namespace {

TriadSpec masked_spec() {
  TriadSpec spec;
  spec.pattern = Pattern::PassiveView;
  spec.schema = {{"field", PropertyKind::Text}};
  spec.view_kind = "masked_field";
  spec.options["mask"] = "##-##";
  return spec;
}

// Hand-built log entry for conformance fixtures; bypasses the bus gate on
// purpose so violating flows can be constructed at all.
EventEnvelope edge(Seq seq, ComponentId src, ComponentId dst, std::string verb, bool mutating,
                   Payload payload = std::monostate{}) {
  EventEnvelope e;
  e.tick = 0;
  e.seq = seq;
  e.source = std::move(src);
  e.target = std::move(dst);
  e.verb = std::move(verb);
  e.mutating = mutating;
  e.payload = std::move(payload);
  return e;
}

ReportNote report_note(int violations) {
  ReportNote note;
  for (int i = 0; i < violations; ++i) note.report.violations.push_back({i, "p", "bad"});
  return note;
}

}  // namespace

TEST_CASE("view doubles: scripts must be tick-ordered") {
  CHECK_THROWS_AS(
      make_view_double(ViewDouble::Mode::Scripted,
                       {{2, Gesture::key('1')}, {1, Gesture::key('2')}}),
      BadScript);
  CHECK_NOTHROW(make_view_double(ViewDouble::Mode::Scripted,
                                 {{1, Gesture::key('1')}, {1, Gesture::key('2')}}));
}

TEST_CASE("recording double captures what the masked triad renders") {
  Runtime rt;
  const TriadHandle handle = rt.assemble(masked_spec());
  ViewDouble recorder = make_view_double(ViewDouble::Mode::Recording);
  attach_double(rt, handle.id, recorder);
  rt.dispatch(handle.id, Gesture::command(CommandName::Open));
  rt.dispatch(handle.id, Gesture::key('1'));

  auto captured = captured_commands(rt, recorder);
  REQUIRE(captured.size() == 2);  // initial blank render, then the keyed char
  CHECK(captured[1].find("\"kind\":\"set_char_at\"") != std::string::npos);
  CHECK(captured[1].find("\"char\":\"1\"") != std::string::npos);
  CHECK(captured[1].find("\"position\":0") != std::string::npos);
}

TEST_CASE("scripted double feeds gestures at its scheduled ticks") {
  Runtime rt;
  const TriadHandle handle = rt.assemble(masked_spec());
  rt.dispatch(handle.id, Gesture::command(CommandName::Open));
  ViewDouble scripted = make_view_double(
      ViewDouble::Mode::Scripted, {{0, Gesture::key('1')}, {2, Gesture::key('2')}});
  attach_double(rt, handle.id, scripted);
  run_double(rt, handle.id, scripted);
  CHECK(rt.now() == 2);
  auto captured = captured_commands(rt, scripted);
  CHECK(captured.size() == 3);
}

TEST_CASE("hostile double attempting a mutator in passive view is flagged") {
  Runtime rt;
  const TriadHandle handle = rt.assemble(masked_spec());
  rt.dispatch(handle.id, Gesture::command(CommandName::Open));
  ViewDouble hostile =
      make_view_double(ViewDouble::Mode::Hostile, {{0, Gesture::edit("field", "hax")}});
  attach_double(rt, handle.id, hostile);
  run_double(rt, handle.id, hostile);

  FlowReport report = audit(rt);
  REQUIRE(report.forbidden.size() == 1);
  CHECK(report.forbidden[0].source_kind == ComponentKind::View);
  CHECK(report.forbidden[0].target_kind == ComponentKind::Model);
  CHECK(report.edge_count(ComponentKind::View, ComponentKind::Model) == 0);
  CHECK(check_conformance(report, Pattern::PassiveView).empty());
}

TEST_CASE("audit is a pure aggregation and covers the whole log") {
  Runtime rt;
  const TriadHandle handle = rt.assemble(masked_spec());
  rt.dispatch(handle.id, Gesture::command(CommandName::Open));
  for (char c : std::string("12a34")) rt.dispatch(handle.id, Gesture::key(c));

  FlowReport first = audit(rt);
  FlowReport second = audit(rt);
  CHECK(first.records.size() == second.records.size());
  CHECK(first.edges.size() == second.edges.size());

  // Totality: every envelope maps to exactly one record, and the aggregated
  // counts re-add to the delivered log length.
  CHECK(first.records.size() == rt.bus().log().size());
  int delivered = 0;
  for (const EventEnvelope& e : rt.bus().log()) {
    if (!e.denied) ++delivered;
  }
  CHECK(first.delivered_total() == delivered);

  // Brute-force recount per edge key.
  for (const FlowReport::Edge& e : first.edges) {
    int count = 0;
    for (const FlowReport::Record& r : first.records) {
      if (!r.denied && r.source_kind == e.source_kind && r.target_kind == e.target_kind &&
          r.verb == e.verb && r.mutating == e.mutating) {
        ++count;
      }
    }
    CHECK(count == e.count);
  }
}

TEST_CASE("audit of an empty run is empty") {
  FlowReport report = audit(std::vector<EventEnvelope>{});
  CHECK(report.records.empty());
  CHECK(report.edges.empty());
  CHECK(report.prompts.empty());
}

TEST_CASE("conformance fixtures: passive view, both polarities") {
  std::vector<EventEnvelope> good;
  good.push_back(edge(0, view_id("v"), controller_id("c"), "gesture", false));
  good.push_back(edge(1, controller_id("c"), view_id("v"), "render", false,
                      RenderCommand::set_char_at("f", 0, '1')));
  good.push_back(edge(2, controller_id("c"), model_id("m"), "mutate", true));
  CHECK(check_conformance(audit(good), Pattern::PassiveView).empty());

  std::vector<EventEnvelope> bad = good;
  bad.push_back(edge(3, view_id("v"), model_id("m"), "read", false));
  auto violations = check_conformance(audit(bad), Pattern::PassiveView);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("view->model") != std::string::npos);

  std::vector<EventEnvelope> bad2 = good;
  bad2.push_back(edge(3, model_id("m"), view_id("v"), "render", false,
                      RenderCommand::set_text("f", "x")));
  CHECK(check_conformance(audit(bad2), Pattern::PassiveView).size() == 1);
}

TEST_CASE("conformance fixtures: closed model, both polarities") {
  std::vector<EventEnvelope> good;
  good.push_back(edge(0, controller_id("c"), model_id("m"), "mutate_batch", true));
  good.push_back(edge(1, model_id("m"), controller_id("c"), "mutation_rejected", false,
                      report_note(1)));
  good.push_back(edge(2, controller_id("c"), view_id("v"), "render", false,
                      RenderCommand::show_error("bad")));
  CHECK(check_conformance(audit(good), Pattern::ClosedModel).empty());

  std::vector<EventEnvelope> bad = good;
  bad.push_back(edge(3, model_id("m"), service_id("s"), "submit", false));
  CHECK_FALSE(check_conformance(audit(bad), Pattern::ClosedModel).empty());

  std::vector<EventEnvelope> bad2 = good;
  bad2.push_back(edge(3, service_id("s"), model_id("m"), "service_event", false));
  CHECK_FALSE(check_conformance(audit(bad2), Pattern::ClosedModel).empty());
}

TEST_CASE("conformance fixtures: open model, both polarities") {
  std::vector<EventEnvelope> good;
  good.push_back(edge(0, controller_id("c"), model_id("m"), "validate", false));
  good.push_back(edge(1, model_id("m"), controller_id("c"), "validation_report", false,
                      report_note(0)));
  good.push_back(edge(2, controller_id("c"), model_id("m"), "commit", true));
  CHECK(check_conformance(audit(good), Pattern::OpenModel).empty());

  std::vector<EventEnvelope> no_validate;
  no_validate.push_back(edge(0, controller_id("c"), model_id("m"), "commit", true));
  auto violations = check_conformance(audit(no_validate), Pattern::OpenModel);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("without a preceding clean validate") != std::string::npos);

  std::vector<EventEnvelope> dirty_validate;
  dirty_validate.push_back(edge(0, controller_id("c"), model_id("m"), "validate", false));
  dirty_validate.push_back(edge(1, model_id("m"), controller_id("c"), "validation_report",
                                false, report_note(2)));
  dirty_validate.push_back(edge(2, controller_id("c"), model_id("m"), "commit", true));
  CHECK_FALSE(check_conformance(audit(dirty_validate), Pattern::OpenModel).empty());

  std::vector<EventEnvelope> rejecting;
  rejecting.push_back(edge(0, model_id("m"), controller_id("c"), "mutation_rejected", false,
                           report_note(1)));
  CHECK_FALSE(check_conformance(audit(rejecting), Pattern::OpenModel).empty());
}

TEST_CASE("conformance fixtures: disconnected model, both polarities") {
  std::vector<EventEnvelope> good;
  good.push_back(edge(0, controller_id("c"), service_id("s"), "submit", false));
  good.push_back(edge(1, service_id("s"), controller_id("c"), "service_event", false));
  good.push_back(edge(2, controller_id("c"), model_id("m"), "load_rows", true));
  good.push_back(edge(3, controller_id("c"), view_id("v"), "render", false,
                      RenderCommand::show_page({}, 0, 1)));
  CHECK(check_conformance(audit(good), Pattern::DisconnectedModel).empty());

  for (const auto& [src, dst] :
       std::vector<std::pair<ComponentId, ComponentId>>{{model_id("m"), service_id("s")},
                                                        {service_id("s"), model_id("m")},
                                                        {view_id("v"), service_id("s")},
                                                        {service_id("s"), view_id("v")}}) {
    std::vector<EventEnvelope> bad = good;
    bad.push_back(edge(4, src, dst, "submit", false));
    CHECK(check_conformance(audit(bad), Pattern::DisconnectedModel).size() == 1);
  }
}

TEST_CASE("conformance fixtures: services facade, both polarities") {
  ServiceEvent fault_event;
  fault_event.request_id = 1;
  fault_event.outcome = Fault{FaultKind::ConnectionError, "down"};

  std::vector<EventEnvelope> good;
  good.push_back(edge(0, model_id("m"), service_id("s"), "submit", false));
  good.push_back(edge(1, service_id("s"), model_id("m"), "service_event", false, fault_event));
  good.push_back(edge(2, model_id("m"), controller_id("c"), "service_fault", false, fault_event));
  CHECK(check_conformance(audit(good), Pattern::ModelAsServicesFacade).empty());

  std::vector<EventEnvelope> direct;
  direct.push_back(edge(0, controller_id("c"), service_id("s"), "submit", false));
  CHECK_FALSE(check_conformance(audit(direct), Pattern::ModelAsServicesFacade).empty());

  std::vector<EventEnvelope> swallowed;
  swallowed.push_back(edge(0, model_id("m"), service_id("s"), "submit", false));
  swallowed.push_back(
      edge(1, service_id("s"), model_id("m"), "service_event", false, fault_event));
  auto violations = check_conformance(audit(swallowed), Pattern::ModelAsServicesFacade);
  REQUIRE(violations.size() == 1);
  CHECK(violations[0].find("not surfaced") != std::string::npos);
}

TEST_CASE("conformance fixtures: active view, both polarities") {
  std::vector<EventEnvelope> good;
  good.push_back(edge(0, view_id("v"), controller_id("c"), "gesture", false));
  good.push_back(edge(1, controller_id("c"), model_id("m"), "mutate", true));
  good.push_back(edge(2, model_id("m"), view_id("v"), "render", false,
                      RenderCommand::set_text("f", "x")));
  CHECK(check_conformance(audit(good), Pattern::ActiveView).empty());

  std::vector<EventEnvelope> mutating_view;
  mutating_view.push_back(edge(0, view_id("v"), model_id("m"), "mutate", true));
  mutating_view.push_back(edge(1, model_id("m"), view_id("v"), "render", false,
                               RenderCommand::set_text("f", "x")));
  CHECK_FALSE(check_conformance(audit(mutating_view), Pattern::ActiveView).empty());

  std::vector<EventEnvelope> mediated = good;
  mediated.push_back(edge(3, controller_id("c"), view_id("v"), "render", false,
                          RenderCommand::set_text("f", "x")));
  CHECK_FALSE(check_conformance(audit(mediated), Pattern::ActiveView).empty());

  std::vector<EventEnvelope> no_read_path;
  no_read_path.push_back(edge(0, controller_id("c"), model_id("m"), "mutate", true));
  CHECK_FALSE(check_conformance(audit(no_read_path), Pattern::ActiveView).empty());
}

TEST_CASE("prompt provenance is checked in every pattern") {
  std::vector<EventEnvelope> bad;
  bad.push_back(edge(0, model_id("m"), view_id("v"), "render", false,
                     RenderCommand::prompt(PromptKind::SaveChanges)));
  for (Pattern p : {Pattern::OpenModel, Pattern::ActiveView}) {
    auto violations = check_conformance(audit(bad), p);
    bool prompt_flagged = false;
    for (const std::string& v : violations) {
      if (v.find("non-controller source") != std::string::npos) prompt_flagged = true;
    }
    CHECK(prompt_flagged);
  }
}

TEST_CASE("conformance by name rejects unknown patterns") {
  FlowReport empty = audit(std::vector<EventEnvelope>{});
  CHECK(check_conformance(empty, "passive_view").empty());
  CHECK_THROWS_AS(check_conformance(empty, "hexagonal"), UnknownPattern);
}

TEST_CASE("transcripts replay byte-identically for the same seed and script") {
  auto run = []() {
    Runtime rt(17);
    ServicePlan plan;
    plan.latency_fetch = 2;
    FaultRule rule;
    rule.rate = 0.4;
    plan.schedule.push_back(rule);
    plan.dataset.push_back(make_employee_table(30));
    rt.add_service("directory", plan);
    TriadSpec spec;
    spec.pattern = Pattern::DisconnectedModel;
    spec.schema = {{"id", PropertyKind::Integer}, {"name", PropertyKind::Text}};
    spec.service_binding = "directory";
    spec.options["page_size"] = "10";
    const TriadHandle handle = rt.assemble(spec);
    rt.dispatch(handle.id, Gesture::command(CommandName::Open));
    rt.tick(2);
    rt.dispatch(handle.id, Gesture::command(CommandName::Retry));
    rt.dispatch(handle.id, Gesture::command(CommandName::NextPage));
    rt.tick(4);
    return transcript_of(rt);
  };
  Transcript a = run();
  Transcript b = run();
  CHECK(a.text() == b.text());
  CHECK(a.digest() == b.digest());
  CHECK_FALSE(a.lines.empty());
}
