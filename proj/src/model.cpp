#include "mvck/model.hpp"

namespace mvck {

Model::Model(const std::vector<std::pair<std::string, PropertyKind>>& schema,
             std::vector<Rule> ruleset)
    : schema_(schema), ruleset_(std::move(ruleset)) {
  for (const auto& [name, kind] : schema_) snap_.define(name);
}

std::optional<PropertyKind> Model::kind_of(std::string_view property) const {
  for (const auto& [name, kind] : schema_) {
    if (name == property) return kind;
  }
  return std::nullopt;
}

MutationOutcome Model::mutate_closed(const std::string& property, const PropertyValue& value) {
  Snapshot candidate = snap_;
  candidate.apply(property, value);
  ValidationReport report = evaluate(candidate, ruleset_);
  if (!report.clean()) {
    report.evaluated_revision = snap_.revision();
    return {false, snap_.revision(), std::move(report)};
  }
  snap_ = std::move(candidate);
  return {true, snap_.revision(), {}};
}

MutationOutcome Model::mutate_closed_batch(const std::vector<Snapshot::Entry>& items) {
  Snapshot candidate = snap_;
  candidate.apply_batch(items);
  ValidationReport report = evaluate(candidate, ruleset_);
  if (!report.clean()) {
    report.evaluated_revision = snap_.revision();
    return {false, snap_.revision(), std::move(report)};
  }
  snap_ = std::move(candidate);
  return {true, snap_.revision(), {}};
}

ChangeNote Model::mutate_open(const std::string& property, const PropertyValue& value) {
  ChangeNote note;
  note.property = property;
  note.old_value = snap_.get(property);
  snap_.apply(property, value);
  snap_.mark_dirty(property);
  note.new_value = value;
  note.revision = snap_.revision();
  return note;
}

ValidationReport Model::validate() const { return evaluate(snap_, ruleset_); }

void Model::load_rows(const PageResult& page) { rows_ = page.rows; }

void Model::bind_entity(const Snapshot& record, std::int64_t version) {
  for (const auto& [name, value] : record.entries()) {
    if (snap_.has(name)) snap_.apply(name, value);
  }
  snap_.clear_dirty();
  entity_version_ = version;
  bound_ = true;
}

}  // namespace mvck
