#include "mvck/bus.hpp"

#include <sstream>

#include "json_detail.hpp"

namespace mvck {

std::string_view component_kind_text(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::Controller: return "controller";
    case ComponentKind::View: return "view";
    case ComponentKind::Model: return "model";
    default: return "service";
  }
}

std::string to_canonical(const Payload& payload) {
  if (std::holds_alternative<std::monostate>(payload)) return "{}";
  if (const auto* g = std::get_if<Gesture>(&payload)) return to_canonical(*g);
  if (const auto* r = std::get_if<RenderCommand>(&payload)) return to_canonical(*r);
  if (const auto* e = std::get_if<ServiceEvent>(&payload)) return to_canonical(*e);
  if (const auto* q = std::get_if<Request>(&payload)) return to_canonical(*q);
  if (const auto* c = std::get_if<ChangeNote>(&payload)) {
    return nlohmann::json{{"new", detail::value_json(c->new_value)},
                          {"old", detail::value_json(c->old_value)},
                          {"property", c->property},
                          {"revision", c->revision}}
        .dump();
  }
  if (const auto* m = std::get_if<Mutation>(&payload)) {
    return nlohmann::json{{"property", m->property}, {"value", detail::value_json(m->value)}}
        .dump();
  }
  if (const auto* b = std::get_if<MutationBatch>(&payload)) {
    nlohmann::json items = nlohmann::json::array();
    for (const auto& m : b->items) {
      items.push_back(
          nlohmann::json{{"property", m.property}, {"value", detail::value_json(m.value)}});
    }
    return nlohmann::json{{"items", items}}.dump();
  }
  if (const auto* rn = std::get_if<ReportNote>(&payload)) return to_canonical(rn->report);
  const auto& page = std::get<PageResult>(payload);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : page.rows) rows.push_back(detail::snapshot_json(row));
  return nlohmann::json{{"page_index", page.page_index}, {"rows", rows}, {"total", page.total}}
      .dump();
}

std::string transcript_line(const EventEnvelope& e) {
  std::ostringstream out;
  out << e.tick << ' ' << e.seq << ' ' << component_kind_text(e.source.kind) << ':'
      << e.source.name << "->" << component_kind_text(e.target.kind) << ':' << e.target.name
      << ' ' << (e.denied ? "denied:" : "") << e.verb << ' ' << to_canonical(e.payload);
  return out.str();
}

int DiagnosticsLog::count(std::string_view code) const {
  int n = 0;
  for (const auto& r : records_) {
    if (r.code == code) ++n;
  }
  return n;
}

const EventEnvelope& Bus::record(Tick tick, ComponentId source, ComponentId target,
                                 std::string verb, bool mutating, Payload payload) {
  EventEnvelope e;
  e.tick = tick;
  e.seq = next_seq_++;
  e.source = std::move(source);
  e.target = std::move(target);
  e.verb = std::move(verb);
  e.mutating = mutating;
  e.payload = std::move(payload);
  if (gate_) {
    if (auto reason = gate_(e)) {
      e.denied = true;
      e.deny_reason = *reason;
    }
  }
  log_.push_back(std::move(e));
  return log_.back();
}

}  // namespace mvck
