#include "mvck/services.hpp"

#include <algorithm>

#include "json_detail.hpp"

namespace mvck {

namespace {

constexpr const char* kRequestKinds[] = {"fetch_page", "load_entity", "save_entity"};
constexpr const char* kFaultKinds[] = {"connection_error", "timeout", "concurrency_conflict"};

// Uniform [0,1) from the raw engine output; portable across standard
// libraries, unlike std::uniform_real_distribution.
double unit_draw(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

bool row_matches_filter(const Snapshot& row, const std::string& filter) {
  if (filter.empty()) return true;
  for (const auto& [name, value] : row.entries()) {
    if (value.is_text() && value.as_text().find(filter) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

std::string_view request_kind_text(RequestKind kind) {
  return kRequestKinds[static_cast<int>(kind)];
}

std::string_view fault_kind_text(FaultKind kind) { return kFaultKinds[static_cast<int>(kind)]; }

Request Request::fetch_page(std::string entity, std::string filter, int page_index,
                            int page_size) {
  return {FetchPage{std::move(entity), std::move(filter), page_index, page_size}};
}

Request Request::load_entity(std::string entity, std::int64_t id) {
  return {LoadEntity{std::move(entity), id}};
}

Request Request::save_entity(std::string entity, Snapshot record, std::int64_t version) {
  return {SaveEntity{std::move(entity), std::move(record), version}};
}

const std::string& Request::entity() const {
  if (const auto* f = std::get_if<FetchPage>(&v)) return f->entity;
  if (const auto* l = std::get_if<LoadEntity>(&v)) return l->entity;
  return std::get<SaveEntity>(v).entity;
}

std::string to_canonical(const Request& r) {
  nlohmann::json j;
  j["kind"] = kRequestKinds[r.v.index()];
  if (const auto* f = std::get_if<Request::FetchPage>(&r.v)) {
    j["entity"] = f->entity;
    j["filter"] = f->filter;
    j["page_index"] = f->page_index;
    j["page_size"] = f->page_size;
  } else if (const auto* l = std::get_if<Request::LoadEntity>(&r.v)) {
    j["entity"] = l->entity;
    j["id"] = l->id;
  } else {
    const auto& s = std::get<Request::SaveEntity>(r.v);
    j["entity"] = s.entity;
    j["record"] = detail::snapshot_json(s.record);
    j["version"] = s.version;
  }
  return j.dump();
}

std::string to_canonical(const ServiceEvent& e) {
  nlohmann::json j;
  j["request_id"] = e.request_id;
  if (const auto* p = std::get_if<PageResult>(&e.outcome)) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : p->rows) rows.push_back(detail::snapshot_json(row));
    j["completion"] = {{"page_index", p->page_index}, {"rows", rows}, {"total", p->total}};
  } else if (const auto* er = std::get_if<EntityResult>(&e.outcome)) {
    j["completion"] = {{"record", detail::snapshot_json(er->record)}, {"version", er->version}};
  } else if (const auto* a = std::get_if<SaveAck>(&e.outcome)) {
    j["completion"] = {{"new_version", a->new_version}};
  } else {
    const auto& f = std::get<Fault>(e.outcome);
    j["fault"] = {{"kind", std::string(fault_kind_text(f.kind))}, {"message", f.message}};
  }
  return j.dump();
}

ServiceSim::ServiceSim(std::string name, ServicePlan plan)
    : name_(std::move(name)), plan_(std::move(plan)),
      rng_(plan_.seed ^ fnv1a64(name_)) {}

void ServiceSim::plan_faults(std::vector<FaultRule> schedule) {
  plan_.schedule = std::move(schedule);
}

void ServiceSim::submit(std::int64_t request_id, const Request& request, Tick now) {
  Tick latency = plan_.latency_fetch;
  if (request.kind() == RequestKind::LoadEntity) latency = plan_.latency_load;
  if (request.kind() == RequestKind::SaveEntity) latency = plan_.latency_save;
  queue_.push_back({now + latency, request_id, resolve(request_id, request)});
}

std::optional<FaultKind> ServiceSim::match_fault(const Request& request) {
  // Logical request key for attempt counting.
  std::string key = std::string(request_kind_text(request.kind())) + ":" + request.entity();
  if (const auto* f = std::get_if<Request::FetchPage>(&request.v)) {
    key += ":page" + std::to_string(f->page_index);
  } else if (const auto* l = std::get_if<Request::LoadEntity>(&request.v)) {
    key += ":id" + std::to_string(l->id);
  } else {
    key += ":id" + std::to_string(
        std::get<Request::SaveEntity>(request.v).record.get("id").is_integer()
            ? std::get<Request::SaveEntity>(request.v).record.get("id").as_integer()
            : 0);
  }
  const int attempt = ++attempts_[key];

  for (const FaultRule& rule : plan_.schedule) {
    if (rule.kind && *rule.kind != request.kind()) continue;
    if (rule.entity && *rule.entity != request.entity()) continue;
    if (rule.page_index) {
      const auto* f = std::get_if<Request::FetchPage>(&request.v);
      if (f == nullptr || f->page_index != *rule.page_index) continue;
    }
    if (rule.entity_id) {
      const auto* l = std::get_if<Request::LoadEntity>(&request.v);
      if (l == nullptr || l->id != *rule.entity_id) continue;
    }
    if (rule.first_attempts > 0) {
      if (attempt <= rule.first_attempts) return rule.fault;
      continue;
    }
    if (rule.rate > 0.0 && unit_draw(rng_) < rule.rate) return rule.fault;
  }
  return std::nullopt;
}

ServiceEvent ServiceSim::resolve(std::int64_t request_id, const Request& request) {
  if (auto fault = match_fault(request)) {
    return {request_id, Fault{*fault, std::string(fault_kind_text(*fault)) + " on " +
                                          std::string(request_kind_text(request.kind()))}};
  }

  if (const auto* f = std::get_if<Request::FetchPage>(&request.v)) {
    const EntityTable* table = find_table(f->entity);
    if (table == nullptr) {
      return {request_id, Fault{FaultKind::ConnectionError, "unknown entity " + f->entity}};
    }
    std::vector<const Snapshot*> filtered;
    for (const auto& row : table->rows) {
      if (row_matches_filter(row, f->filter)) filtered.push_back(&row);
    }
    PageResult page;
    page.page_index = f->page_index;
    page.total = static_cast<int>(filtered.size());
    const std::size_t begin =
        static_cast<std::size_t>(f->page_index) * static_cast<std::size_t>(f->page_size);
    for (std::size_t i = begin;
         i < filtered.size() && i < begin + static_cast<std::size_t>(f->page_size); ++i) {
      page.rows.push_back(*filtered[i]);
    }
    return {request_id, std::move(page)};
  }

  if (const auto* l = std::get_if<Request::LoadEntity>(&request.v)) {
    const EntityTable* table = find_table(l->entity);
    if (table != nullptr) {
      for (std::size_t i = 0; i < table->rows.size(); ++i) {
        const PropertyValue& id = table->rows[i].get("id");
        if (id.is_integer() && id.as_integer() == l->id) {
          return {request_id, EntityResult{table->rows[i], table->versions[i]}};
        }
      }
    }
    return {request_id,
            Fault{FaultKind::ConnectionError, "no such entity " + l->entity + "/" +
                                                  std::to_string(l->id)}};
  }

  const auto& s = std::get<Request::SaveEntity>(request.v);
  EntityTable* table = find_table(s.entity);
  const PropertyValue& id = s.record.get("id");
  if (table == nullptr || !id.is_integer()) {
    return {request_id, Fault{FaultKind::ConnectionError, "unknown entity " + s.entity}};
  }
  for (std::size_t i = 0; i < table->rows.size(); ++i) {
    const PropertyValue& row_id = table->rows[i].get("id");
    if (row_id.is_integer() && row_id.as_integer() == id.as_integer()) {
      if (table->versions[i] != s.version) {
        return {request_id,
                Fault{FaultKind::ConcurrencyConflict,
                      "stored version " + std::to_string(table->versions[i]) +
                          ", supplied " + std::to_string(s.version)}};
      }
      table->rows[i] = s.record;
      table->versions[i] = s.version + 1;
      return {request_id, SaveAck{table->versions[i]}};
    }
  }
  return {request_id, Fault{FaultKind::ConnectionError,
                            "no such entity " + s.entity + "/" + std::to_string(id.as_integer())}};
}

std::vector<ServiceSim::Pending> ServiceSim::inspect_pending() const {
  std::vector<Pending> out;
  for (const auto& s : queue_) out.push_back({s.request_id, s.due});
  std::sort(out.begin(), out.end(), [](const Pending& a, const Pending& b) {
    return a.due != b.due ? a.due < b.due : a.request_id < b.request_id;
  });
  return out;
}

std::vector<ServiceSim::Delivery> ServiceSim::collect_due(Tick upto) {
  std::vector<Delivery> out;
  auto it = queue_.begin();
  while (it != queue_.end()) {
    if (it->due <= upto) {
      out.push_back({it->due, std::move(it->event)});
      it = queue_.erase(it);
    } else {
      ++it;
    }
  }
  std::sort(out.begin(), out.end(), [](const Delivery& a, const Delivery& b) {
    return a.due != b.due ? a.due < b.due : a.event.request_id < b.event.request_id;
  });
  return out;
}

std::optional<std::int64_t> ServiceSim::stored_version(const std::string& entity,
                                                       std::int64_t id) const {
  const EntityTable* table = find_table(entity);
  if (table == nullptr) return std::nullopt;
  for (std::size_t i = 0; i < table->rows.size(); ++i) {
    const PropertyValue& row_id = table->rows[i].get("id");
    if (row_id.is_integer() && row_id.as_integer() == id) return table->versions[i];
  }
  return std::nullopt;
}

EntityTable* ServiceSim::find_table(const std::string& entity) {
  for (auto& t : plan_.dataset) {
    if (t.name == entity) return &t;
  }
  return nullptr;
}

const EntityTable* ServiceSim::find_table(const std::string& entity) const {
  for (const auto& t : plan_.dataset) {
    if (t.name == entity) return &t;
  }
  return nullptr;
}

EntityTable make_employee_table(int count) {
  constexpr const char* kRoles[] = {"engineer", "analyst", "manager", "designer", "tester"};
  EntityTable table;
  table.name = "employee";
  for (int i = 1; i <= count; ++i) {
    Snapshot row;
    char name[32];
    std::snprintf(name, sizeof(name), "Employee %03d", i);
    row.define("id", PropertyValue::integer(i));
    row.define("name", PropertyValue::text(name));
    row.define("role", PropertyValue::text(kRoles[i % 5]));
    row.define("grade", PropertyValue::integer(1 + i % 9));
    table.rows.push_back(std::move(row));
    table.versions.push_back(1);
  }
  return table;
}

EntityTable make_discount_type_table() {
  EntityTable table;
  table.name = "discount_type";
  struct Row {
    std::int64_t id;
    const char* label;
    std::int64_t rate_mantissa;  // scale 2
  };
  for (const Row& r : {Row{7, "Seasonal", 1250}, Row{8, "Loyalty", 500}, Row{9, "Bulk", 2000}}) {
    Snapshot row;
    row.define("id", PropertyValue::integer(r.id));
    row.define("label", PropertyValue::text(r.label));
    row.define("rate", PropertyValue::decimal(r.rate_mantissa, 2));
    table.rows.push_back(std::move(row));
    table.versions.push_back(1);
  }
  return table;
}

EntityTable make_customer_type_table() {
  EntityTable table;
  table.name = "customer_type";
  struct Row {
    std::int64_t id;
    const char* label;
    const char* code;
  };
  for (const Row& r :
       {Row{7, "Retail", "RT"}, Row{8, "Wholesale", "WS"}, Row{9, "Government", "GV"}}) {
    Snapshot row;
    row.define("id", PropertyValue::integer(r.id));
    row.define("label", PropertyValue::text(r.label));
    row.define("code", PropertyValue::text(r.code));
    table.rows.push_back(std::move(row));
    table.versions.push_back(1);
  }
  return table;
}

}  // namespace mvck
