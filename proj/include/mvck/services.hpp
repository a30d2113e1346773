#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "mvck/value.hpp"

namespace mvck {

// Deterministic in-memory stand-in for a remote services layer: latency and
// fault injection on a virtual clock, paged queries, entity load/save with
// optimistic versioning. This module knows nothing about models, views or
// controllers.

enum class RequestKind { FetchPage, LoadEntity, SaveEntity };
std::string_view request_kind_text(RequestKind kind);

struct Request {
  struct FetchPage {
    std::string entity;
    std::string filter;
    int page_index;
    int page_size;  // >= 1
  };
  struct LoadEntity {
    std::string entity;
    std::int64_t id;
  };
  struct SaveEntity {
    std::string entity;
    Snapshot record;
    std::int64_t version;  // >= 0
  };

  std::variant<FetchPage, LoadEntity, SaveEntity> v;

  static Request fetch_page(std::string entity, std::string filter, int page_index, int page_size);
  static Request load_entity(std::string entity, std::int64_t id);
  static Request save_entity(std::string entity, Snapshot record, std::int64_t version);

  RequestKind kind() const { return static_cast<RequestKind>(v.index()); }
  const std::string& entity() const;
};

std::string to_canonical(const Request& r);

enum class FaultKind { ConnectionError, Timeout, ConcurrencyConflict };
std::string_view fault_kind_text(FaultKind kind);

struct PageResult {
  std::vector<Snapshot> rows;
  int page_index = 0;
  int total = 0;
};

struct EntityResult {
  Snapshot record;
  std::int64_t version = 0;
};

struct SaveAck {
  std::int64_t new_version = 0;
};

struct Fault {
  FaultKind kind = FaultKind::ConnectionError;
  std::string message;
};

// Exactly one terminal event per request id.
struct ServiceEvent {
  std::int64_t request_id = 0;
  std::variant<PageResult, EntityResult, SaveAck, Fault> outcome;

  bool is_fault() const { return std::holds_alternative<Fault>(outcome); }
};

std::string to_canonical(const ServiceEvent& e);

// Attempt matcher: which submissions of a logical request fault, and how.
// first_attempts > 0 faults attempts 1..N of the matched key; otherwise a
// seeded Bernoulli draw with probability `rate` decides per submission.
struct FaultRule {
  std::optional<RequestKind> kind;
  std::optional<std::string> entity;
  std::optional<int> page_index;
  std::optional<std::int64_t> entity_id;
  int first_attempts = 0;
  double rate = 0.0;
  FaultKind fault = FaultKind::ConnectionError;
};

struct EntityTable {
  std::string name;
  std::vector<Snapshot> rows;       // each row carries an "id" property
  std::vector<std::int64_t> versions;  // parallel to rows
};

struct ServicePlan {
  std::uint64_t seed = 0;
  Tick latency_fetch = 1;
  Tick latency_load = 1;
  Tick latency_save = 1;
  std::vector<FaultRule> schedule;
  std::vector<EntityTable> dataset;
};

class ServiceSim {
 public:
  ServiceSim(std::string name, ServicePlan plan);

  const std::string& name() const { return name_; }

  // Queues the terminal event for `now + latency`. The outcome (completion
  // or fault) is fixed at submit time, so a run is a pure function of the
  // plan and the submit sequence. Request ids are assigned by the caller and
  // must be strictly increasing.
  void submit(std::int64_t request_id, const Request& request, Tick now);

  void plan_faults(std::vector<FaultRule> schedule);

  struct Pending {
    std::int64_t request_id = 0;
    Tick due = 0;
  };
  std::vector<Pending> inspect_pending() const;

  // Pops every event due in (previous collection, upto], ordered by
  // (due tick, request id).
  struct Delivery {
    Tick due = 0;
    ServiceEvent event;
  };
  std::vector<Delivery> collect_due(Tick upto);

  const std::vector<EntityTable>& dataset() const { return plan_.dataset; }
  std::optional<std::int64_t> stored_version(const std::string& entity, std::int64_t id) const;

 private:
  struct Scheduled {
    Tick due = 0;
    std::int64_t request_id = 0;
    ServiceEvent event;
  };

  ServiceEvent resolve(std::int64_t request_id, const Request& request);
  std::optional<FaultKind> match_fault(const Request& request);
  EntityTable* find_table(const std::string& entity);
  const EntityTable* find_table(const std::string& entity) const;

  std::string name_;
  ServicePlan plan_;
  std::vector<Scheduled> queue_;
  std::map<std::string, int> attempts_;  // logical request key -> count
  std::mt19937_64 rng_;
};

// Deterministic demo datasets.
EntityTable make_employee_table(int count);
EntityTable make_discount_type_table();
EntityTable make_customer_type_table();

}  // namespace mvck
