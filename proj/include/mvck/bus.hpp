#pragma once

#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "mvck/messages.hpp"
#include "mvck/rules.hpp"
#include "mvck/services.hpp"
#include "mvck/value.hpp"

namespace mvck {

enum class ComponentKind { Controller, View, Model, Service };

std::string_view component_kind_text(ComponentKind kind);

struct ComponentId {
  ComponentKind kind = ComponentKind::Controller;
  std::string name;

  friend bool operator==(const ComponentId& a, const ComponentId& b) {
    return a.kind == b.kind && a.name == b.name;
  }
};

inline ComponentId controller_id(std::string name) {
  return {ComponentKind::Controller, std::move(name)};
}
inline ComponentId view_id(std::string name) { return {ComponentKind::View, std::move(name)}; }
inline ComponentId model_id(std::string name) { return {ComponentKind::Model, std::move(name)}; }
inline ComponentId service_id(std::string name) {
  return {ComponentKind::Service, std::move(name)};
}

// Change notification broadcast by open-style mutators.
struct ChangeNote {
  std::string property;
  PropertyValue old_value;
  PropertyValue new_value;
  std::int64_t revision = 0;
};

struct Mutation {
  std::string property;
  PropertyValue value;
};

struct MutationBatch {
  std::vector<Mutation> items;
};

struct ReportNote {
  ValidationReport report;
};

using Payload = std::variant<std::monostate, Gesture, RenderCommand, ServiceEvent, Request,
                             ChangeNote, Mutation, MutationBatch, ReportNote, PageResult>;

std::string to_canonical(const Payload& payload);

// Every cross-component message. (tick, seq) pairs are unique and totally
// ordered; seq is assigned at enqueue time and never reused. Denied entries
// record attempts the bus refused to deliver.
struct EventEnvelope {
  Tick tick = 0;
  Seq seq = 0;
  ComponentId source;
  ComponentId target;
  std::string verb;
  bool mutating = false;
  Payload payload;
  bool denied = false;
  std::string deny_reason;
};

// "tick seq source->target verb payload" with the payload in canonical JSON.
std::string transcript_line(const EventEnvelope& e);

struct DiagnosticRecord {
  Tick tick = 0;
  std::string code;
  std::string detail;
};

// Side channel for controller-level problems; never rendered to views.
class DiagnosticsLog {
 public:
  void add(Tick tick, std::string code, std::string detail) {
    records_.push_back({tick, std::move(code), std::move(detail)});
  }
  const std::vector<DiagnosticRecord>& records() const { return records_; }
  int count(std::string_view code) const;

 private:
  std::vector<DiagnosticRecord> records_;
};

class Bus {
 public:
  // Returns a deny reason, or nullopt to deliver.
  using Gate = std::function<std::optional<std::string>(const EventEnvelope&)>;

  void set_gate(Gate gate) { gate_ = std::move(gate); }

  // Records the message, assigning the next seq. Returns the stored envelope;
  // check `denied` to learn whether it was delivered.
  const EventEnvelope& record(Tick tick, ComponentId source, ComponentId target, std::string verb,
                              bool mutating, Payload payload = std::monostate{});

  const std::vector<EventEnvelope>& log() const { return log_; }
  Seq next_seq() const { return next_seq_; }

 private:
  std::vector<EventEnvelope> log_;
  Seq next_seq_ = 0;
  Gate gate_;
};

}  // namespace mvck
