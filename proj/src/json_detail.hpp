#pragma once

// Internal JSON helpers shared by the serialization-heavy translation units.
// Not installed; the public headers stay free of the vendored json dependency.

#include "json.hpp"
#include "mvck/value.hpp"

namespace mvck::detail {

nlohmann::json value_json(const PropertyValue& v);
nlohmann::json snapshot_json(const Snapshot& s);

}  // namespace mvck::detail
