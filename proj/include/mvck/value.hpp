#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace mvck {

using Tick = std::int64_t;
using Seq = std::int64_t;

enum class PropertyKind { Text, Integer, Decimal, Flag };

std::string_view kind_name(PropertyKind k);
std::optional<PropertyKind> parse_kind(std::string_view name);

// Fixed-point value: mantissa scaled by 10^-scale, scale in [0, 6].
struct Decimal {
  std::int64_t mantissa = 0;
  int scale = 0;

  Decimal() = default;
  Decimal(std::int64_t m, int s);

  // Equality after rescaling both sides to the larger scale.
  friend bool operator==(const Decimal& a, const Decimal& b);
  friend bool operator!=(const Decimal& a, const Decimal& b) { return !(a == b); }
};

// Renders with explicit scale: (1250, 2) -> "12.50", (-5, 1) -> "-0.5".
std::string decimal_text(const Decimal& d);
std::optional<Decimal> parse_decimal(std::string_view text);

// One scalar property slot. Absent is a real state, distinct from Text("").
class PropertyValue {
 public:
  PropertyValue() = default;  // Absent

  static PropertyValue absent() { return PropertyValue(); }
  static PropertyValue text(std::string t);
  static PropertyValue integer(std::int64_t i);
  static PropertyValue decimal(Decimal d);
  static PropertyValue decimal(std::int64_t mantissa, int scale);
  static PropertyValue flag(bool b);

  bool is_absent() const { return v_.index() == 0; }
  bool is_text() const { return v_.index() == 1; }
  bool is_integer() const { return v_.index() == 2; }
  bool is_decimal() const { return v_.index() == 3; }
  bool is_flag() const { return v_.index() == 4; }

  const std::string& as_text() const { return std::get<1>(v_); }
  std::int64_t as_integer() const { return std::get<2>(v_); }
  const Decimal& as_decimal() const { return std::get<3>(v_); }
  bool as_flag() const { return std::get<4>(v_); }

  // Display form used by render commands and transcripts; Absent -> "".
  std::string display() const;

  friend bool operator==(const PropertyValue& a, const PropertyValue& b);
  friend bool operator!=(const PropertyValue& a, const PropertyValue& b) { return !(a == b); }

 private:
  std::variant<std::monostate, std::string, std::int64_t, Decimal, bool> v_;
};

// Strict text -> typed value conversion. Empty raw text maps to Absent for
// every kind; unparseable text yields nullopt.
std::optional<PropertyValue> coerce(PropertyKind kind, std::string_view raw);

// Ordered property bag. Entry iteration order is insertion order; transcripts
// depend on it. Revision bumps on every accepted mutation.
class Snapshot {
 public:
  using Entry = std::pair<std::string, PropertyValue>;

  // Returns false if the name is already defined.
  bool define(std::string name, PropertyValue initial = PropertyValue::absent());

  bool has(std::string_view name) const;
  const PropertyValue& get(std::string_view name) const;  // Absent if missing

  // Single accepted mutation: stores and bumps revision once.
  void apply(std::string_view name, PropertyValue value);
  // Batch accepted as one mutation: one revision bump for the whole set.
  void apply_batch(const std::vector<Entry>& items);

  void mark_dirty(std::string name);
  void clear_dirty() { dirty_.clear(); }
  const std::set<std::string>& dirty() const { return dirty_; }

  const std::vector<Entry>& entries() const { return entries_; }
  std::int64_t revision() const { return revision_; }

  friend bool operator==(const Snapshot& a, const Snapshot& b);

 private:
  std::vector<Entry> entries_;
  std::set<std::string> dirty_;
  std::int64_t revision_ = 0;
};

std::uint64_t fnv1a64(std::string_view bytes);

// Canonical JSON forms (object keys sorted; decimals tagged with explicit
// scale text; snapshot entries kept in insertion order as pairs).
std::string to_canonical(const PropertyValue& v);
std::string to_canonical(const Snapshot& s);

inline std::uint64_t digest(const Snapshot& s) { return fnv1a64(to_canonical(s)); }
std::string digest_hex(const Snapshot& s);

}  // namespace mvck
