#include "mvck/testkit.hpp"

#include <algorithm>
#include <sstream>

namespace mvck {

namespace {

std::string effective_verb(const EventEnvelope& e) {
  if (const auto* cmd = std::get_if<RenderCommand>(&e.payload)) {
    return "render:" + std::string(cmd->kind());
  }
  return e.verb;
}

}  // namespace

int FlowReport::edge_count(ComponentKind source, ComponentKind target) const {
  int n = 0;
  for (const Edge& e : edges) {
    if (e.source_kind == source && e.target_kind == target) n += e.count;
  }
  return n;
}

int FlowReport::edge_count(ComponentKind source, ComponentKind target,
                           std::string_view verb) const {
  int n = 0;
  for (const Edge& e : edges) {
    if (e.source_kind == source && e.target_kind == target && e.verb == verb) n += e.count;
  }
  return n;
}

int FlowReport::delivered_total() const {
  int n = 0;
  for (const Edge& e : edges) n += e.count;
  return n;
}

FlowReport audit(const std::vector<EventEnvelope>& log) {
  FlowReport report;
  for (const EventEnvelope& e : log) {
    FlowReport::Record rec;
    rec.tick = e.tick;
    rec.seq = e.seq;
    rec.source_kind = e.source.kind;
    rec.target_kind = e.target.kind;
    rec.source = e.source.name;
    rec.target = e.target.name;
    rec.verb = effective_verb(e);
    rec.mutating = e.mutating;
    rec.denied = e.denied;
    if (const auto* ev = std::get_if<ServiceEvent>(&e.payload)) rec.fault = ev->is_fault();
    if (const auto* note = std::get_if<ReportNote>(&e.payload)) {
      rec.violation_count = static_cast<int>(note->report.violations.size());
    }
    report.records.push_back(rec);
    if (e.denied) {
      report.forbidden.push_back(rec);
      continue;
    }

    bool merged = false;
    for (FlowReport::Edge& edge : report.edges) {
      if (edge.source_kind == rec.source_kind && edge.target_kind == rec.target_kind &&
          edge.verb == rec.verb && edge.mutating == rec.mutating) {
        ++edge.count;
        merged = true;
        break;
      }
    }
    if (!merged) {
      report.edges.push_back({rec.source_kind, rec.target_kind, rec.verb, rec.mutating, 1});
    }

    if (const auto* cmd = std::get_if<RenderCommand>(&e.payload)) {
      if (e.target.kind == ComponentKind::View) {
        report.view_transcripts[e.target.name].push_back(to_canonical(*cmd));
      }
      if (const auto* prompt = std::get_if<RenderCommand::Prompt>(&cmd->v)) {
        report.prompts.push_back({e.source.kind, e.source.name, prompt->kind, e.tick, e.seq});
      }
    }
  }
  return report;
}

std::vector<std::string> check_conformance(const FlowReport& report, Pattern pattern) {
  std::vector<std::string> violations;
  auto forbid = [&](ComponentKind src, ComponentKind dst, const char* label) {
    for (const FlowReport::Edge& e : report.edges) {
      if (e.source_kind == src && e.target_kind == dst) {
        violations.push_back(std::string(label) + ": forbidden edge " +
                             std::string(component_kind_text(src)) + "->" +
                             std::string(component_kind_text(dst)) + " (" + e.verb + ")");
      }
    }
  };

  switch (pattern) {
    case Pattern::PassiveView:
      forbid(ComponentKind::View, ComponentKind::Model, "passive_view");
      forbid(ComponentKind::Model, ComponentKind::View, "passive_view");
      break;
    case Pattern::ClosedModel:
      forbid(ComponentKind::Model, ComponentKind::Service, "closed_model");
      forbid(ComponentKind::Service, ComponentKind::Model, "closed_model");
      break;
    case Pattern::OpenModel: {
      // Mutators never return errors; commits only after a clean validate.
      for (const FlowReport::Record& r : report.records) {
        if (r.denied) continue;
        if (r.verb == "mutation_rejected" && r.source_kind == ComponentKind::Model) {
          violations.push_back("open_model: mutator returned a validation error at seq " +
                               std::to_string(r.seq));
        }
      }
      for (const FlowReport::Record& r : report.records) {
        if (r.denied || r.verb != "commit") continue;
        bool clean_validate_before = false;
        for (const FlowReport::Record& earlier : report.records) {
          if (earlier.seq >= r.seq) break;
          if (!earlier.denied && earlier.verb == "validation_report" &&
              earlier.violation_count == 0) {
            clean_validate_before = true;
          }
        }
        if (!clean_validate_before) {
          violations.push_back("open_model: commit at seq " + std::to_string(r.seq) +
                               " without a preceding clean validate");
        }
      }
      break;
    }
    case Pattern::DisconnectedModel:
      forbid(ComponentKind::Model, ComponentKind::Service, "disconnected_model");
      forbid(ComponentKind::Service, ComponentKind::Model, "disconnected_model");
      forbid(ComponentKind::View, ComponentKind::Service, "disconnected_model");
      forbid(ComponentKind::Service, ComponentKind::View, "disconnected_model");
      break;
    case Pattern::ModelAsServicesFacade: {
      forbid(ComponentKind::Controller, ComponentKind::Service, "model_as_services_facade");
      forbid(ComponentKind::Service, ComponentKind::Controller, "model_as_services_facade");
      // Faults travel service -> model -> controller.
      int model_faults = 0;
      int surfaced = 0;
      for (const FlowReport::Record& r : report.records) {
        if (r.denied) continue;
        if (r.verb == "service_event" && r.fault && r.target_kind == ComponentKind::Model) {
          ++model_faults;
        }
        if (r.verb == "service_fault" && r.source_kind == ComponentKind::Model &&
            r.target_kind == ComponentKind::Controller) {
          ++surfaced;
        }
      }
      if (surfaced < model_faults) {
        violations.push_back("model_as_services_facade: " +
                             std::to_string(model_faults - surfaced) +
                             " fault(s) not surfaced to the controller");
      }
      break;
    }
    case Pattern::ActiveView: {
      for (const FlowReport::Edge& e : report.edges) {
        if (e.source_kind == ComponentKind::View && e.target_kind == ComponentKind::Model &&
            e.mutating) {
          violations.push_back("active_view: forbidden mutating edge view->model (" + e.verb +
                               ")");
        }
        // Data reaches views straight from the model, never via the controller.
        if (e.source_kind == ComponentKind::Controller && e.target_kind == ComponentKind::View &&
            (e.verb == "render:set_text" || e.verb == "render:set_char_at" ||
             e.verb == "render:show_page")) {
          violations.push_back("active_view: controller mediated view data (" + e.verb + ")");
        }
      }
      bool any_mutation = false;
      for (const FlowReport::Edge& e : report.edges) {
        if (e.target_kind == ComponentKind::Model && e.mutating) any_mutation = true;
      }
      if (any_mutation && report.edge_count(ComponentKind::Model, ComponentKind::View) == 0) {
        violations.push_back("active_view: required model->view read path missing");
      }
      break;
    }
  }

  // Prompt provenance holds in every pattern.
  for (const FlowReport::PromptRecord& p : report.prompts) {
    if (p.source_kind != ComponentKind::Controller) {
      violations.push_back(std::string(pattern_name(pattern)) + ": prompt at seq " +
                           std::to_string(p.seq) + " from a non-controller source " + p.source);
    }
  }
  return violations;
}

std::vector<std::string> check_conformance(const FlowReport& report,
                                           std::string_view pattern_text) {
  auto p = parse_pattern(pattern_text);
  if (!p) throw UnknownPattern("unknown pattern: " + std::string(pattern_text));
  return check_conformance(report, *p);
}

ViewDouble make_view_double(ViewDouble::Mode mode,
                            std::vector<std::pair<Tick, Gesture>> script) {
  for (std::size_t i = 1; i < script.size(); ++i) {
    if (script[i].first < script[i - 1].first) {
      throw BadScript("script ticks must be non-decreasing");
    }
  }
  ViewDouble dbl;
  dbl.mode = mode;
  dbl.script = std::move(script);
  return dbl;
}

void attach_double(Runtime& rt, const std::string& triad_id, ViewDouble& dbl, bool attach_new) {
  if (attach_new) {
    dbl.attached_view = rt.attach_view(triad_id, "double");
  } else {
    dbl.attached_view = rt.handle(triad_id).views.front();
  }
}

void run_double(Runtime& rt, const std::string& triad_id, const ViewDouble& dbl) {
  if (dbl.mode == ViewDouble::Mode::Recording) return;
  const TriadHandle& handle = rt.handle(triad_id);
  for (const auto& [tick, gesture] : dbl.script) {
    if (tick > rt.now()) rt.tick(tick - rt.now());
    if (dbl.mode == ViewDouble::Mode::Scripted) {
      rt.dispatch(triad_id, gesture, dbl.attached_view);
      continue;
    }
    // Hostile: the scripted gesture names the forbidden call to attempt as a
    // direct model access, bypassing the controller.
    if (const auto* e = std::get_if<Gesture::Edit>(&gesture.v)) {
      rt.attempt(view_id(dbl.attached_view), model_id(handle.model_id), "mutate", true,
                 Mutation{e->property, PropertyValue::text(e->raw)});
    } else {
      rt.attempt(view_id(dbl.attached_view), model_id(handle.model_id), "read", false);
    }
  }
}

std::vector<std::string> captured_commands(const Runtime& rt, const ViewDouble& dbl) {
  std::vector<std::string> out;
  for (const EventEnvelope& e : rt.bus().log()) {
    if (e.denied || e.target.name != dbl.attached_view) continue;
    if (const auto* cmd = std::get_if<RenderCommand>(&e.payload)) {
      out.push_back(to_canonical(*cmd));
    }
  }
  return out;
}

std::string Transcript::text() const {
  std::ostringstream out;
  for (const std::string& line : lines) out << line << '\n';
  return out.str();
}

Transcript transcript_of(const Runtime& rt) {
  Transcript t;
  for (const EventEnvelope& e : rt.bus().log()) t.lines.push_back(transcript_line(e));
  return t;
}

}  // namespace mvck
