#include "mvck/rules.hpp"

#include <charconv>
#include <sstream>

#include "json_detail.hpp"
#include "mvck/mask.hpp"

namespace mvck {

namespace {

std::string_view next_token(std::string_view& rest) {
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  std::size_t end = rest.find(' ');
  std::string_view tok = rest.substr(0, end);
  rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
  return tok;
}

std::optional<std::int64_t> to_int(std::string_view tok) {
  std::int64_t out = 0;
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  if (ec != std::errc() || ptr != tok.data() + tok.size()) return std::nullopt;
  return out;
}

// Numeric comparison across Integer and Decimal operands.
std::optional<int> numeric_order(const PropertyValue& a, const PropertyValue& b) {
  auto widen = [](const PropertyValue& v, int scale) -> std::optional<__int128> {
    __int128 factor = 1;
    for (int i = 0; i < scale; ++i) factor *= 10;
    if (v.is_integer()) return static_cast<__int128>(v.as_integer()) * factor;
    if (v.is_decimal()) {
      const Decimal& d = v.as_decimal();
      __int128 f = 1;
      for (int i = 0; i < scale - d.scale; ++i) f *= 10;
      return static_cast<__int128>(d.mantissa) * f;
    }
    return std::nullopt;
  };
  int scale = 0;
  if (a.is_decimal()) scale = a.as_decimal().scale;
  if (b.is_decimal() && b.as_decimal().scale > scale) scale = b.as_decimal().scale;
  auto wa = widen(a, scale);
  auto wb = widen(b, scale);
  if (!wa || !wb) return std::nullopt;
  if (*wa < *wb) return -1;
  if (*wa > *wb) return 1;
  return 0;
}

std::optional<int> value_order(const PropertyValue& a, const PropertyValue& b) {
  const bool a_num = a.is_integer() || a.is_decimal();
  const bool b_num = b.is_integer() || b.is_decimal();
  if (a_num && b_num) return numeric_order(a, b);
  if (a.is_text() && b.is_text()) {
    const int c = a.as_text().compare(b.as_text());
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  if (a.is_flag() && b.is_flag()) {
    return static_cast<int>(a.as_flag()) - static_cast<int>(b.as_flag());
  }
  return std::nullopt;  // incomparable kinds
}

}  // namespace

std::string_view relation_text(CrossRelation rel) {
  switch (rel) {
    case CrossRelation::Less: return "<";
    case CrossRelation::LessEqual: return "<=";
    case CrossRelation::Equal: return "=";
    default: return "!=";
  }
}

std::optional<CrossRelation> parse_relation(std::string_view text) {
  if (text == "<") return CrossRelation::Less;
  if (text == "<=") return CrossRelation::LessEqual;
  if (text == "=") return CrossRelation::Equal;
  if (text == "!=") return CrossRelation::NotEqual;
  return std::nullopt;
}

Rule Rule::int_range(std::string property, std::int64_t min, std::int64_t max) {
  return {IntRange{std::move(property), min, max}};
}

Rule Rule::text_pattern(std::string property, std::string mask) {
  return {TextPattern{std::move(property), std::move(mask)}};
}

Rule Rule::cross_field(std::string left, CrossRelation rel, std::string right) {
  return {CrossField{std::move(left), rel, std::move(right)}};
}

std::vector<std::string> Rule::referenced_properties() const {
  if (const auto* r = std::get_if<Required>(&v)) return {r->property};
  if (const auto* r = std::get_if<IntRange>(&v)) return {r->property};
  if (const auto* r = std::get_if<TextPattern>(&v)) return {r->property};
  if (const auto* r = std::get_if<CrossField>(&v)) return {r->left, r->right};
  return {std::get<FormulaWellFormed>(v).property};
}

std::optional<Rule> parse_rule(std::string_view line, std::string* error) {
  std::string_view rest = line;
  const std::string_view head = next_token(rest);
  auto fail = [&](std::string msg) -> std::optional<Rule> {
    if (error != nullptr) *error = std::move(msg);
    return std::nullopt;
  };
  if (head == "required") {
    const std::string_view prop = next_token(rest);
    if (prop.empty()) return fail("required expects a property");
    return Rule::required(std::string(prop));
  }
  if (head == "int_range") {
    const std::string_view prop = next_token(rest);
    auto min = to_int(next_token(rest));
    auto max = to_int(next_token(rest));
    if (prop.empty() || !min || !max) return fail("int_range expects <prop> <min> <max>");
    if (*min > *max) return fail("int_range requires min <= max");
    return Rule::int_range(std::string(prop), *min, *max);
  }
  if (head == "text_pattern") {
    const std::string_view prop = next_token(rest);
    const std::string_view mask = next_token(rest);
    if (prop.empty() || mask.empty()) return fail("text_pattern expects <prop> <mask>");
    return Rule::text_pattern(std::string(prop), std::string(mask));
  }
  if (head == "cross_field") {
    const std::string_view left = next_token(rest);
    auto rel = parse_relation(next_token(rest));
    const std::string_view right = next_token(rest);
    if (left.empty() || !rel || right.empty()) {
      return fail("cross_field expects <left> <relation> <right>");
    }
    return Rule::cross_field(std::string(left), *rel, std::string(right));
  }
  if (head == "formula") {
    const std::string_view prop = next_token(rest);
    if (prop.empty()) return fail("formula expects a property");
    return Rule::formula(std::string(prop));
  }
  return fail("unknown rule kind: " + std::string(head));
}

std::string rule_text(const Rule& rule) {
  std::ostringstream out;
  if (const auto* r = std::get_if<Rule::Required>(&rule.v)) {
    out << "required " << r->property;
  } else if (const auto* r2 = std::get_if<Rule::IntRange>(&rule.v)) {
    out << "int_range " << r2->property << ' ' << r2->min << ' ' << r2->max;
  } else if (const auto* r3 = std::get_if<Rule::TextPattern>(&rule.v)) {
    out << "text_pattern " << r3->property << ' ' << r3->mask;
  } else if (const auto* r4 = std::get_if<Rule::CrossField>(&rule.v)) {
    out << "cross_field " << r4->left << ' ' << relation_text(r4->relation) << ' ' << r4->right;
  } else {
    out << "formula " << std::get<Rule::FormulaWellFormed>(rule.v).property;
  }
  return out.str();
}

std::string ValidationReport::summary() const {
  if (violations.empty()) return "clean";
  std::ostringstream out;
  for (std::size_t i = 0; i < violations.size(); ++i) {
    if (i != 0) out << "; ";
    out << violations[i].property << ": " << violations[i].message;
  }
  return out.str();
}

bool formula_well_formed(std::string_view text) {
  if (text.empty() || text.front() != '=') return true;  // not a formula
  int depth = 0;
  char prev = 0;
  for (char c : text.substr(1)) {
    if (c == '(') {
      ++depth;
    } else if (c == ')') {
      if (depth == 0) return false;
      if (prev == '(') return false;  // empty argument list
      --depth;
    }
    prev = c;
  }
  return depth == 0;
}

ValidationReport evaluate(const Snapshot& snapshot, const std::vector<Rule>& ruleset) {
  ValidationReport report;
  report.evaluated_revision = snapshot.revision();
  for (std::size_t i = 0; i < ruleset.size(); ++i) {
    const Rule& rule = ruleset[i];
    const int idx = static_cast<int>(i);
    if (const auto* r = std::get_if<Rule::Required>(&rule.v)) {
      if (snapshot.get(r->property).is_absent()) {
        report.violations.push_back({idx, r->property, "value is required"});
      }
    } else if (const auto* r2 = std::get_if<Rule::IntRange>(&rule.v)) {
      const PropertyValue& v = snapshot.get(r2->property);
      if (v.is_absent()) continue;
      auto in_range = [&](const PropertyValue& x) {
        auto lo = value_order(x, PropertyValue::integer(r2->min));
        auto hi = value_order(x, PropertyValue::integer(r2->max));
        return lo && hi && *lo >= 0 && *hi <= 0;
      };
      if (v.is_integer() || v.is_decimal()) {
        if (!in_range(v)) {
          report.violations.push_back(
              {idx, r2->property,
               "out of range [" + std::to_string(r2->min) + ", " + std::to_string(r2->max) + "]"});
        }
      } else if (v.is_text()) {
        auto parsed = coerce(PropertyKind::Integer, v.as_text());
        if (!parsed || parsed->is_absent() || !in_range(*parsed)) {
          report.violations.push_back({idx, r2->property, "not a number in range"});
        }
      } else {
        report.violations.push_back({idx, r2->property, "expected a number"});
      }
    } else if (const auto* r3 = std::get_if<Rule::TextPattern>(&rule.v)) {
      const PropertyValue& v = snapshot.get(r3->property);
      if (v.is_absent()) continue;
      if (!v.is_text() || !mask_full_match(r3->mask, v.as_text())) {
        report.violations.push_back({idx, r3->property, "does not match mask " + r3->mask});
      }
    } else if (const auto* r4 = std::get_if<Rule::CrossField>(&rule.v)) {
      const PropertyValue& lhs = snapshot.get(r4->left);
      const PropertyValue& rhs = snapshot.get(r4->right);
      if (lhs.is_absent() || rhs.is_absent()) continue;
      const std::string pair = r4->left + "," + r4->right;
      auto ord = value_order(lhs, rhs);
      if (!ord) {
        report.violations.push_back({idx, pair, "incomparable kinds"});
        continue;
      }
      bool ok = false;
      switch (r4->relation) {
        case CrossRelation::Less: ok = *ord < 0; break;
        case CrossRelation::LessEqual: ok = *ord <= 0; break;
        case CrossRelation::Equal: ok = *ord == 0; break;
        case CrossRelation::NotEqual: ok = *ord != 0; break;
      }
      if (!ok) {
        report.violations.push_back(
            {idx, pair,
             "expected " + r4->left + " " + std::string(relation_text(r4->relation)) + " " +
                 r4->right});
      }
    } else {
      const auto& r5 = std::get<Rule::FormulaWellFormed>(rule.v);
      const PropertyValue& v = snapshot.get(r5.property);
      if (v.is_absent()) continue;
      if (v.is_text() && !formula_well_formed(v.as_text())) {
        report.violations.push_back({idx, r5.property, "invalid formula"});
      }
    }
  }
  return report;
}

std::string to_canonical(const ValidationReport& report) {
  nlohmann::json violations = nlohmann::json::array();
  for (const auto& v : report.violations) {
    violations.push_back(nlohmann::json{
        {"message", v.message}, {"property", v.property}, {"rule", v.rule_index}});
  }
  return nlohmann::json{{"revision", report.evaluated_revision}, {"violations", violations}}
      .dump();
}

}  // namespace mvck
