#pragma once

#include <map>
#include <string>
#include <vector>

#include "mvck/bus.hpp"
#include "mvck/triad.hpp"

namespace mvck {

struct BadScript : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Audited record of every cross-component message in a run, used to prove a
// pattern's responsibility allocation.
struct FlowReport {
  struct Record {
    Tick tick = 0;
    Seq seq = 0;
    ComponentKind source_kind = ComponentKind::Controller;
    ComponentKind target_kind = ComponentKind::Controller;
    std::string source;
    std::string target;
    std::string verb;  // "render:<command kind>" for render deliveries
    bool mutating = false;
    bool denied = false;
    bool fault = false;          // service_event carrying a Fault
    int violation_count = -1;    // validation_report payloads
  };

  struct Edge {
    ComponentKind source_kind = ComponentKind::Controller;
    ComponentKind target_kind = ComponentKind::Controller;
    std::string verb;
    bool mutating = false;
    int count = 0;
  };

  struct PromptRecord {
    ComponentKind source_kind = ComponentKind::Controller;
    std::string source;
    PromptKind kind = PromptKind::SaveChanges;
    Tick tick = 0;
    Seq seq = 0;
  };

  std::vector<Record> records;         // delivered and denied, in bus order
  std::vector<Edge> edges;             // delivered only, aggregated
  std::vector<Record> forbidden;       // denied attempts
  std::map<std::string, std::vector<std::string>> view_transcripts;  // view -> payload lines
  std::vector<PromptRecord> prompts;

  int edge_count(ComponentKind source, ComponentKind target) const;
  int edge_count(ComponentKind source, ComponentKind target, std::string_view verb) const;
  int delivered_total() const;
};

// Pure aggregation of a bus log; auditing twice yields an identical report.
FlowReport audit(const std::vector<EventEnvelope>& log);
inline FlowReport audit(const Bus& bus) { return audit(bus.log()); }
inline FlowReport audit(const Runtime& rt) { return audit(rt.bus()); }

// Empty result iff the report satisfies the pattern's forbidden/required edge
// table and the prompt-provenance rule.
std::vector<std::string> check_conformance(const FlowReport& report, Pattern pattern);
std::vector<std::string> check_conformance(const FlowReport& report,
                                           std::string_view pattern_name);  // throws UnknownPattern

// Mock view: scripted feeds gestures at scheduled ticks, recording only
// captures, hostile attempts exactly the forbidden calls in its script.
struct ViewDouble {
  enum class Mode { Scripted, Recording, Hostile };

  Mode mode = Mode::Recording;
  std::vector<std::pair<Tick, Gesture>> script;
  std::string attached_view;  // filled by attach_double
};

ViewDouble make_view_double(ViewDouble::Mode mode,
                            std::vector<std::pair<Tick, Gesture>> script = {});  // throws BadScript

// Binds the double to a triad view slot (the primary view by default; a
// fresh window on multi-view patterns when attach_new is set).
void attach_double(Runtime& rt, const std::string& triad_id, ViewDouble& dbl,
                   bool attach_new = false);

// Plays a scripted or hostile double to the end of its script, advancing the
// virtual clock as scheduled. Recording doubles never initiate messages.
void run_double(Runtime& rt, const std::string& triad_id, const ViewDouble& dbl);

// Render command payloads delivered to the double's view slot, in bus order.
std::vector<std::string> captured_commands(const Runtime& rt, const ViewDouble& dbl);

struct Transcript {
  std::vector<std::string> lines;

  std::string text() const;
  std::uint64_t digest() const { return fnv1a64(text()); }
};

Transcript transcript_of(const Runtime& rt);

}  // namespace mvck
