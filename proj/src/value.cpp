#include "mvck/value.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <stdexcept>

#include "json.hpp"

namespace mvck {

namespace {

constexpr std::array<std::string_view, 4> kKindNames = {"text", "integer", "decimal", "flag"};

std::int64_t pow10(int n) {
  std::int64_t r = 1;
  while (n-- > 0) r *= 10;
  return r;
}

}  // namespace

std::string_view kind_name(PropertyKind k) { return kKindNames[static_cast<int>(k)]; }

std::optional<PropertyKind> parse_kind(std::string_view name) {
  for (std::size_t i = 0; i < kKindNames.size(); ++i) {
    if (kKindNames[i] == name) return static_cast<PropertyKind>(i);
  }
  return std::nullopt;
}

Decimal::Decimal(std::int64_t m, int s) : mantissa(m), scale(s) {
  if (s < 0 || s > 6) throw std::invalid_argument("decimal scale out of [0,6]");
}

bool operator==(const Decimal& a, const Decimal& b) {
  // Rescale to the larger scale; mantissas stay well inside int64 for the
  // magnitudes this kit carries, widen anyway.
  const int s = a.scale > b.scale ? a.scale : b.scale;
  const __int128 ma = static_cast<__int128>(a.mantissa) * pow10(s - a.scale);
  const __int128 mb = static_cast<__int128>(b.mantissa) * pow10(s - b.scale);
  return ma == mb;
}

std::string decimal_text(const Decimal& d) {
  std::int64_t m = d.mantissa;
  std::string sign;
  if (m < 0) {
    sign = "-";
    m = -m;
  }
  std::string digits = std::to_string(m);
  if (d.scale == 0) return sign + digits;
  if (static_cast<int>(digits.size()) <= d.scale) {
    digits.insert(0, static_cast<std::size_t>(d.scale) - digits.size() + 1, '0');
  }
  digits.insert(digits.size() - static_cast<std::size_t>(d.scale), ".");
  return sign + digits;
}

std::optional<Decimal> parse_decimal(std::string_view text) {
  if (text.empty()) return std::nullopt;
  bool neg = false;
  std::size_t i = 0;
  if (text[0] == '-' || text[0] == '+') {
    neg = text[0] == '-';
    i = 1;
  }
  std::string digits;
  int scale = 0;
  bool seen_dot = false;
  bool seen_digit = false;
  for (; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '.') {
      if (seen_dot) return std::nullopt;
      seen_dot = true;
      continue;
    }
    if (!std::isdigit(static_cast<unsigned char>(c))) return std::nullopt;
    seen_digit = true;
    digits.push_back(c);
    if (seen_dot) ++scale;
  }
  if (!seen_digit || scale > 6) return std::nullopt;
  std::int64_t m = 0;
  for (char c : digits) {
    if (m > (INT64_MAX - 9) / 10) return std::nullopt;
    m = m * 10 + (c - '0');
  }
  return Decimal(neg ? -m : m, scale);
}

PropertyValue PropertyValue::text(std::string t) {
  PropertyValue v;
  v.v_ = std::move(t);
  return v;
}

PropertyValue PropertyValue::integer(std::int64_t i) {
  PropertyValue v;
  v.v_ = i;
  return v;
}

PropertyValue PropertyValue::decimal(Decimal d) {
  PropertyValue v;
  v.v_ = d;
  return v;
}

PropertyValue PropertyValue::decimal(std::int64_t mantissa, int scale) {
  return decimal(Decimal(mantissa, scale));
}

PropertyValue PropertyValue::flag(bool b) {
  PropertyValue v;
  v.v_ = b;
  return v;
}

std::string PropertyValue::display() const {
  switch (v_.index()) {
    case 0: return "";
    case 1: return as_text();
    case 2: return std::to_string(as_integer());
    case 3: return decimal_text(as_decimal());
    default: return as_flag() ? "true" : "false";
  }
}

bool operator==(const PropertyValue& a, const PropertyValue& b) {
  if (a.v_.index() != b.v_.index()) return false;
  if (a.is_decimal()) return a.as_decimal() == b.as_decimal();
  return a.v_ == b.v_;
}

std::optional<PropertyValue> coerce(PropertyKind kind, std::string_view raw) {
  if (raw.empty()) return PropertyValue::absent();
  switch (kind) {
    case PropertyKind::Text:
      return PropertyValue::text(std::string(raw));
    case PropertyKind::Integer: {
      std::int64_t out = 0;
      const char* first = raw.data();
      const char* last = raw.data() + raw.size();
      auto [ptr, ec] = std::from_chars(first, last, out);
      if (ec != std::errc() || ptr != last) return std::nullopt;
      return PropertyValue::integer(out);
    }
    case PropertyKind::Decimal: {
      auto d = parse_decimal(raw);
      if (!d) return std::nullopt;
      return PropertyValue::decimal(*d);
    }
    case PropertyKind::Flag:
      if (raw == "true") return PropertyValue::flag(true);
      if (raw == "false") return PropertyValue::flag(false);
      return std::nullopt;
  }
  return std::nullopt;
}

bool Snapshot::define(std::string name, PropertyValue initial) {
  if (has(name)) return false;
  entries_.emplace_back(std::move(name), std::move(initial));
  return true;
}

bool Snapshot::has(std::string_view name) const {
  for (const auto& [k, v] : entries_) {
    if (k == name) return true;
  }
  return false;
}

const PropertyValue& Snapshot::get(std::string_view name) const {
  static const PropertyValue kAbsent;
  for (const auto& [k, v] : entries_) {
    if (k == name) return v;
  }
  return kAbsent;
}

void Snapshot::apply(std::string_view name, PropertyValue value) {
  for (auto& [k, v] : entries_) {
    if (k == name) {
      v = std::move(value);
      ++revision_;
      return;
    }
  }
  entries_.emplace_back(std::string(name), std::move(value));
  ++revision_;
}

void Snapshot::apply_batch(const std::vector<Entry>& items) {
  for (const auto& [name, value] : items) {
    for (auto& [k, v] : entries_) {
      if (k == name) {
        v = value;
        break;
      }
    }
  }
  ++revision_;
}

void Snapshot::mark_dirty(std::string name) { dirty_.insert(std::move(name)); }

bool operator==(const Snapshot& a, const Snapshot& b) {
  return a.entries_ == b.entries_ && a.dirty_ == b.dirty_ && a.revision_ == b.revision_;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

namespace detail {

nlohmann::json value_json(const PropertyValue& v) {
  if (v.is_absent()) return nullptr;
  if (v.is_text()) return v.as_text();
  if (v.is_integer()) return v.as_integer();
  if (v.is_flag()) return v.as_flag();
  return nlohmann::json{{"decimal", decimal_text(v.as_decimal())}};
}

nlohmann::json snapshot_json(const Snapshot& s) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto& [name, value] : s.entries()) {
    entries.push_back(nlohmann::json::array({name, value_json(value)}));
  }
  nlohmann::json dirty = nlohmann::json::array();
  for (const auto& name : s.dirty()) dirty.push_back(name);
  return nlohmann::json{{"dirty", dirty}, {"entries", entries}, {"revision", s.revision()}};
}

}  // namespace detail

std::string to_canonical(const PropertyValue& v) { return detail::value_json(v).dump(); }

std::string to_canonical(const Snapshot& s) { return detail::snapshot_json(s).dump(); }

std::string digest_hex(const Snapshot& s) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(digest(s)));
  return std::string(buf);
}

}  // namespace mvck
