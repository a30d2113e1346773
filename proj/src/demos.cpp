#include "mvck/demos.hpp"


namespace mvck {

namespace {

std::vector<DemoDescriptor> build_registry() {
  return {
      {"masked", "masked edit box; keystrokes interpreted against an input mask",
       {Pattern::PassiveView}, 7, 3, 0.0, "masked_phone.scn"},
      {"form", "validating form with commit, cancel and a save-changes prompt",
       {Pattern::ClosedModel}, 7, 3, 0.0, "form_save_prompt.scn"},
      {"sheet", "two-window spreadsheet cells with deferred validation",
       {Pattern::OpenModel}, 7, 3, 0.0, "sheet_invalid_formula.scn"},
      {"pager", "paged employee browser over a slow, flaky service",
       {Pattern::DisconnectedModel}, 7, 3, 0.3, "pager_retry.scn"},
      {"refdata", "reference-data editors for two entity types sharing one generic controller",
       {Pattern::ModelAsServicesFacade, Pattern::ActiveView}, 7, 2, 0.0, "refdata_both.scn"},
  };
}

}  // namespace

const std::vector<DemoDescriptor>& demo_registry() {
  static const std::vector<DemoDescriptor> registry = build_registry();
  return registry;
}

const DemoDescriptor* find_demo(std::string_view name) {
  for (const DemoDescriptor& d : demo_registry()) {
    if (d.name == name) return &d;
  }
  return nullptr;
}

std::vector<std::string> list_demos() {
  std::vector<std::string> lines;
  for (const DemoDescriptor& d : demo_registry()) {
    std::string patterns;
    for (const Pattern p : d.patterns) {
      if (!patterns.empty()) patterns += "+";
      patterns += std::string(pattern_name(p));
    }
    lines.push_back(d.name + " [" + patterns + "] " + d.summary);
  }
  return lines;
}

DemoSession::DemoSession(const std::string& demo, const DemoOptions& options) {
  const DemoDescriptor* d = find_demo(demo);
  if (d == nullptr) throw std::invalid_argument("unknown demo: " + demo);
  descriptor_ = *d;
  seed_ = options.seed.value_or(d->default_seed);
  latency_ = options.latency.value_or(d->default_latency);
  fault_rate_ = options.fault_rate.value_or(d->default_fault_rate);
  if (fault_rate_ < 0.0 || fault_rate_ > 1.0) {
    throw std::invalid_argument("fault rate must be inside [0, 1]");
  }
}

DemoSession::~DemoSession() = default;

void DemoSession::ensure_started() {
  if (rt_) return;
  rt_ = std::make_unique<Runtime>(seed_);

  auto plan_common = [&](ServicePlan plan) {
    plan.latency_fetch = latency_;
    plan.latency_load = latency_;
    plan.latency_save = latency_;
    if (fault_rate_ > 0.0) {
      FaultRule rule;
      rule.rate = fault_rate_;
      rule.fault = FaultKind::ConnectionError;
      plan.schedule.push_back(rule);
    }
    for (const auto& extra : extra_rows_) {
      bool placed = false;
      for (EntityTable& table : plan.dataset) {
        if (table.name == extra.entity) {
          table.rows.push_back(extra.row);
          table.versions.push_back(extra.version);
          placed = true;
        }
      }
      if (!placed) {
        EntityTable table;
        table.name = extra.entity;
        table.rows.push_back(extra.row);
        table.versions.push_back(extra.version);
        plan.dataset.push_back(std::move(table));
      }
    }
    return plan;
  };

  if (descriptor_.name == "masked") {
    TriadSpec spec;
    spec.pattern = Pattern::PassiveView;
    spec.schema = {{"field", PropertyKind::Text}};
    spec.view_kind = "masked_field";
    spec.options["mask"] = "(###) ###-####";
    spec.ruleset = extra_rules_;
    triads_.push_back(rt_->assemble(spec).id);
  } else if (descriptor_.name == "form") {
    TriadSpec spec;
    spec.pattern = Pattern::ClosedModel;
    spec.schema = {{"name", PropertyKind::Text},
                   {"age", PropertyKind::Integer},
                   {"start", PropertyKind::Integer},
                   {"end", PropertyKind::Integer},
                   {"code", PropertyKind::Text}};
    spec.view_kind = "form";
    spec.ruleset = {Rule::required("name"),
                    Rule::int_range("age", 0, 150),
                    Rule::int_range("start", 0, 100),
                    Rule::cross_field("start", CrossRelation::LessEqual, "end"),
                    Rule::text_pattern("code", "AA-##"),
                    Rule::required("age")};
    for (const Rule& r : extra_rules_) spec.ruleset.push_back(r);
    triads_.push_back(rt_->assemble(spec).id);
  } else if (descriptor_.name == "sheet") {
    TriadSpec spec;
    spec.pattern = Pattern::OpenModel;
    spec.schema = {{"A1", PropertyKind::Text},
                   {"A2", PropertyKind::Text},
                   {"B1", PropertyKind::Text},
                   {"B2", PropertyKind::Text}};
    spec.view_kind = "sheet_window";
    spec.ruleset = {Rule::formula("A1"), Rule::formula("A2"), Rule::formula("B1"),
                    Rule::formula("B2")};
    for (const Rule& r : extra_rules_) spec.ruleset.push_back(r);
    triads_.push_back(rt_->assemble(spec).id);
  } else if (descriptor_.name == "pager") {
    ServicePlan plan;
    plan.dataset.push_back(make_employee_table(45));
    rt_->add_service("directory", plan_common(std::move(plan)));

    TriadSpec spec;
    spec.pattern = Pattern::DisconnectedModel;
    spec.schema = {{"id", PropertyKind::Integer},
                   {"name", PropertyKind::Text},
                   {"role", PropertyKind::Text},
                   {"grade", PropertyKind::Integer}};
    spec.view_kind = "grid";
    spec.service_binding = "directory";
    spec.options["entity"] = "employee";
    spec.options["page_size"] = "20";
    spec.ruleset = extra_rules_;
    triads_.push_back(rt_->assemble(spec).id);
  } else {  // refdata
    ServicePlan plan;
    plan.dataset.push_back(make_discount_type_table());
    plan.dataset.push_back(make_customer_type_table());
    rt_->add_service("refdata", plan_common(std::move(plan)));

    TriadSpec discount;
    discount.pattern = Pattern::ModelAsServicesFacade;
    discount.schema = {{"id", PropertyKind::Integer},
                       {"label", PropertyKind::Text},
                       {"rate", PropertyKind::Decimal}};
    discount.view_kind = "entity_editor";
    discount.controller_kind = ControllerKind::Generic;
    discount.service_binding = "refdata";
    discount.options["entity"] = "discount_type";
    discount.options["entity_id"] = "7";
    discount.ruleset = {Rule::required("label")};
    for (const Rule& r : extra_rules_) discount.ruleset.push_back(r);
    triads_.push_back(rt_->assemble(discount).id);

    TriadSpec customer;
    customer.pattern = Pattern::ModelAsServicesFacade;
    customer.schema = {{"id", PropertyKind::Integer},
                       {"label", PropertyKind::Text},
                       {"code", PropertyKind::Text}};
    customer.view_kind = "entity_editor";
    customer.controller_kind = ControllerKind::Generic;
    customer.service_binding = "refdata";
    customer.options["entity"] = "customer_type";
    customer.options["entity_id"] = "7";
    customer.ruleset = {Rule::required("label")};
    triads_.push_back(rt_->assemble(customer).id);
  }
}

const std::string& DemoSession::active_triad() const {
  std::size_t i = active_;
  // Route past closed triads (the refdata demo runs its editors in sequence).
  return triads_[i < triads_.size() ? i : triads_.size() - 1];
}

DispatchResult DemoSession::feed_gesture(const Gesture& gesture) {
  ensure_started();
  DispatchResult result = rt_->dispatch(active_triad(), gesture);
  // A close moves input focus to the next bundled triad.
  while (active_ + 1 < triads_.size() && rt_->triad_closed(triads_[active_])) ++active_;
  return result;
}

void DemoSession::advance(Tick n) {
  ensure_started();
  rt_->tick(n);
}

void DemoSession::apply(const ScenarioRecord& record) {
  if (record.is_setup()) {
    if (rt_) {
      throw ParseError(record.line_no, "setup records must precede gestures and ticks");
    }
    if (const auto* rule = std::get_if<Rule>(&record.v)) {
      extra_rules_.push_back(*rule);
    } else {
      extra_rows_.push_back(std::get<ScenarioRecord::DatasetRow>(record.v));
    }
    return;
  }

  ensure_started();
  if (record.at > rt_->now()) rt_->tick(record.at - rt_->now());

  if (const auto* gesture = std::get_if<Gesture>(&record.v)) {
    feed_gesture(*gesture);
  } else if (const auto* tick = std::get_if<ScenarioRecord::TickAdvance>(&record.v)) {
    rt_->tick(tick->n);
  } else {
    apply_expect(std::get<ScenarioRecord::Expect>(record.v), record.line_no);
  }
}

void DemoSession::apply_expect(const ScenarioRecord::Expect& expect, int line_no) {
  const auto& log = rt_->bus().log();
  for (std::size_t i = static_cast<std::size_t>(expect_cursor_); i < log.size(); ++i) {
    const EventEnvelope& e = log[i];
    if (e.denied || e.target.kind != ComponentKind::View) continue;
    const auto* cmd = std::get_if<RenderCommand>(&e.payload);
    if (cmd == nullptr) continue;
    if (cmd->kind() == expect.command_kind &&
        (expect.needle.empty() ||
         to_canonical(*cmd).find(expect.needle) != std::string::npos)) {
      expect_cursor_ = e.seq + 1;
      return;
    }
  }
  const Tick t = rt_->now();
  const Seq s = rt_->bus().next_seq();
  throw ExpectationFailed(t, s,
                          "line " + std::to_string(line_no) + ": no render matching `" +
                              expect.command_kind +
                              (expect.needle.empty() ? "" : " " + expect.needle) + "`");
}

void DemoSession::run_script(const std::string& text) {
  for (const ScenarioRecord& record : parse_scenario(text)) apply(record);
}

DispatchResult DemoSession::feed_line(const std::string& line) {
  std::string_view sv = line;
  while (!sv.empty() && (sv.front() == ' ' || sv.front() == '\t')) sv.remove_prefix(1);
  if (sv.empty() || sv.front() == '#') return {};
  if (sv.rfind("tick", 0) == 0) {
    const std::string rest(sv.substr(4));
    Tick n = 0;
    try {
      n = std::stoll(rest);
    } catch (const std::exception&) {
      throw ParseError(0, "tick expects a number");
    }
    if (n < 1) throw ParseError(0, "tick advance must be >= 1");
    advance(n);
    return {};
  }
  std::string err;
  auto gesture = parse_gesture(sv, &err);
  if (!gesture) throw ParseError(0, err);
  return feed_gesture(*gesture);
}

std::vector<std::string> DemoSession::drain_renders() {
  std::vector<std::string> out;
  if (!rt_) return out;
  const auto& log = rt_->bus().log();
  for (std::size_t i = static_cast<std::size_t>(drain_cursor_); i < log.size(); ++i) {
    const EventEnvelope& e = log[i];
    if (e.denied || e.target.kind != ComponentKind::View) continue;
    if (const auto* cmd = std::get_if<RenderCommand>(&e.payload)) {
      out.push_back("-> " + e.target.name + " " + to_canonical(*cmd));
    }
  }
  drain_cursor_ = rt_->bus().next_seq();
  return out;
}

Transcript DemoSession::transcript() const {
  if (!rt_) return {};
  return transcript_of(*rt_);
}

std::vector<std::string> DemoSession::conformance() const {
  std::vector<std::string> out;
  if (!rt_) return out;
  const FlowReport report = audit(*rt_);
  for (const Pattern p : descriptor_.patterns) {
    for (const std::string& v : check_conformance(report, p)) out.push_back(v);
  }
  if (descriptor_.name == "refdata") {
    // Both entity flows must run on the same reusable controller type.
    if (triads_.size() != 2) {
      out.push_back("refdata: expected two bundled triads");
    }
    for (const std::string& id : triads_) {
      if (rt_->spec_of(id).controller_kind != ControllerKind::Generic) {
        out.push_back("refdata: triad " + id + " does not use the generic controller");
      }
    }
  }
  return out;
}

Runtime& DemoSession::runtime() {
  ensure_started();
  return *rt_;
}

const Runtime& DemoSession::runtime() const {
  if (!rt_) throw std::logic_error("session not started");
  return *rt_;
}

int exit_code_for_current_exception() {
  try {
    throw;
  } catch (const ParseError&) {
    return 2;
  } catch (const ExpectationFailed&) {
    return 3;
  } catch (const WiringError&) {
    return 4;
  } catch (const SchemaError&) {
    return 4;
  } catch (const std::exception&) {
    return 1;
  }
}

}  // namespace mvck
