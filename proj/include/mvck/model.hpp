#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mvck/bus.hpp"
#include "mvck/rules.hpp"
#include "mvck/services.hpp"
#include "mvck/value.hpp"

namespace mvck {

struct MutationOutcome {
  bool accepted = false;
  std::int64_t revision = 0;    // snapshot revision after the call
  ValidationReport report;      // populated on rejection
};

// The data-holding member of a triad. Validation timing differs by pattern:
// closed mutators evaluate the candidate before storing (strong guarantee),
// open mutators store unconditionally and never raise validation errors.
class Model {
 public:
  Model(const std::vector<std::pair<std::string, PropertyKind>>& schema,
        std::vector<Rule> ruleset);

  const Snapshot& snapshot() const { return snap_; }
  const std::vector<Rule>& ruleset() const { return ruleset_; }
  std::optional<PropertyKind> kind_of(std::string_view property) const;

  // Candidate = current snapshot with the property replaced; stored only if
  // the whole candidate evaluates clean, otherwise the model is bit-identical
  // to before the call.
  MutationOutcome mutate_closed(const std::string& property, const PropertyValue& value);
  // Whole batch evaluated as one candidate; all-or-nothing, one revision bump.
  MutationOutcome mutate_closed_batch(const std::vector<Snapshot::Entry>& items);

  // Stores unconditionally, marks the property dirty, bumps revision.
  ChangeNote mutate_open(const std::string& property, const PropertyValue& value);

  ValidationReport validate() const;
  bool dirty() const { return !snap_.dirty().empty(); }
  void clear_dirty() { snap_.clear_dirty(); }

  // Paged rows fed by a disconnected controller.
  void load_rows(const PageResult& page);
  const std::vector<Snapshot>& rows() const { return rows_; }

  // Entity binding for the services-facade pattern.
  void bind_entity(const Snapshot& record, std::int64_t version);
  bool bound() const { return bound_; }
  std::int64_t entity_version() const { return entity_version_; }
  void set_entity_version(std::int64_t v) { entity_version_ = v; }

 private:
  Snapshot snap_;
  std::vector<std::pair<std::string, PropertyKind>> schema_;
  std::vector<Rule> ruleset_;
  std::vector<Snapshot> rows_;
  std::int64_t entity_version_ = -1;
  bool bound_ = false;
};

}  // namespace mvck
