#include "mvck/triad.hpp"

#include <algorithm>

namespace mvck {

namespace {

constexpr const char* kPatternNames[] = {
    "passive_view",       "closed_model", "open_model",
    "disconnected_model", "model_as_services_facade", "active_view",
};

// Static verb vocabulary per pattern, used by the escalation registry.
std::set<std::string> pattern_verbs(Pattern p) {
  switch (p) {
    case Pattern::PassiveView:
      return {"key", "focus", "command:open", "command:close"};
    case Pattern::ClosedModel:
      return {"edit",           "focus",          "command:open", "command:commit",
              "command:cancel", "command:close",  "command:yes",  "command:no"};
    case Pattern::OpenModel:
    case Pattern::ActiveView:
      return {"edit",           "focus",         "command:open", "command:commit",
              "command:new_window", "command:close"};
    case Pattern::DisconnectedModel:
      return {"command:open",  "command:next_page", "command:prev_page", "command:close",
              "command:retry", "command:abort",     "command:ignore"};
    default:  // ModelAsServicesFacade
      return {"edit",          "command:open",  "command:save",   "command:close",
              "command:yes",   "command:no",    "command:cancel", "command:retry",
              "command:abort", "command:ignore"};
  }
}

bool closed_style_mutators(Pattern p) {
  return p == Pattern::PassiveView || p == Pattern::ClosedModel ||
         p == Pattern::DisconnectedModel;
}

struct PromptSlot {
  std::optional<PromptKind> kind;
  bool close_after = false;  // SaveChanges answered yes on a service-backed save
  bool awaiting() const { return kind.has_value(); }
};

struct PageCursor {
  int page_index = -1;  // last page actually shown
  int page_size = 20;
  int page_count = -1;  // unknown until the first completion
  std::map<int, PageResult> cache;
};

struct ViewRec {
  std::string id;
  std::string kind;
  std::map<std::string, std::string> cache;  // pending raw edits (closed model)
  bool cache_dirty = false;
};

}  // namespace

std::string_view pattern_name(Pattern p) { return kPatternNames[static_cast<int>(p)]; }

std::optional<Pattern> parse_pattern(std::string_view name) {
  for (int i = 0; i < 6; ++i) {
    if (kPatternNames[i] == name) return static_cast<Pattern>(i);
  }
  return std::nullopt;
}

struct TriadRec {
  TriadHandle handle;
  TriadSpec spec;
  Model model;
  std::vector<ViewRec> views;
  bool opened = false;
  bool closed = false;

  // passive view
  std::string mask;
  std::string buffer;

  PromptSlot prompt;

  // service-backed state
  PageCursor pager;
  std::int64_t outstanding = -1;
  int pending_page = -1;
  bool busy = false;
  bool views_bound = false;
  std::optional<Request> last_request;

  TriadRec(TriadHandle h, TriadSpec s)
      : handle(std::move(h)), spec(std::move(s)), model(spec.schema, spec.ruleset) {}

  const std::string& field(std::size_t i = 0) const { return spec.schema[i].first; }
};

struct Runtime::State {
  std::uint64_t seed = 0;
  Tick clock = 0;
  Bus bus;
  DiagnosticsLog diag;
  std::map<std::string, ServiceSim> services;
  std::map<std::string, std::unique_ptr<TriadRec>> triads;
  std::map<std::string, std::string> comp_triad;  // component name -> triad id

  struct CtlRec {
    std::set<std::string> verbs;
    std::optional<std::string> parent;
  };
  std::map<std::string, CtlRec> controllers;

  struct ReqOrigin {
    std::string triad;
    ComponentId component;
  };
  std::map<std::int64_t, ReqOrigin> request_origin;
  std::int64_t next_request = 1;
  int next_triad = 0;
  int next_ctl = 0;

  TriadRec& triad(const std::string& id) {
    auto it = triads.find(id);
    if (it == triads.end()) throw std::out_of_range("no such triad: " + id);
    return *it->second;
  }

  Pattern pattern_of_component(const std::string& name, bool* found) const {
    auto it = comp_triad.find(name);
    if (it == comp_triad.end()) {
      *found = false;
      return Pattern::PassiveView;
    }
    *found = true;
    return triads.at(it->second)->spec.pattern;
  }

  const EventEnvelope& emit(ComponentId src, ComponentId dst, std::string verb, bool mutating,
                            Payload payload = std::monostate{}) {
    const EventEnvelope& e =
        bus.record(clock, std::move(src), std::move(dst), std::move(verb), mutating,
                   std::move(payload));
    if (e.denied) diag.add(clock, "forbidden_edge", e.verb + ": " + e.deny_reason);
    return e;
  }

  // --- component ids -------------------------------------------------------

  static ComponentId ctl(const TriadRec& t) { return controller_id(t.handle.controller_id); }
  static ComponentId mdl(const TriadRec& t) { return model_id(t.handle.model_id); }

  void render_ctl(const TriadRec& t, const std::string& view, RenderCommand cmd) {
    emit(ctl(t), view_id(view), "render", false, std::move(cmd));
  }
  void render_model(const TriadRec& t, const std::string& view, RenderCommand cmd) {
    emit(mdl(t), view_id(view), "render", false, std::move(cmd));
  }

  // --- model access through the bus ---------------------------------------

  MutationOutcome ctl_mutate(TriadRec& t, const std::string& prop, const PropertyValue& value) {
    emit(ctl(t), mdl(t), "mutate", true, Mutation{prop, value});
    MutationOutcome out = t.model.mutate_closed(prop, value);
    if (!out.accepted) {
      emit(mdl(t), ctl(t), "mutation_rejected", false, ReportNote{out.report});
    }
    return out;
  }

  ChangeNote ctl_mutate_open(TriadRec& t, const std::string& prop, const PropertyValue& value) {
    emit(ctl(t), mdl(t), "mutate", true, Mutation{prop, value});
    ChangeNote note = t.model.mutate_open(prop, value);
    for (const ViewRec& v : t.views) {
      render_model(t, v.id, RenderCommand::set_text(prop, note.new_value.display()));
    }
    return note;
  }

  ValidationReport ctl_validate(TriadRec& t) {
    emit(ctl(t), mdl(t), "validate", false);
    ValidationReport report = t.model.validate();
    report.evaluated_revision = t.model.snapshot().revision();
    emit(mdl(t), ctl(t), "validation_report", false, ReportNote{report});
    return report;
  }

  // Controller-mediated re-render (passive view and closed model).
  void rerender_closed(TriadRec& t) {
    emit(ctl(t), mdl(t), "read", false);
    for (const auto& [name, kind] : t.spec.schema) {
      render_ctl(t, t.views[0].id, RenderCommand::set_text(name, t.model.snapshot().get(name).display()));
    }
  }

  // Model-driven full render (open model, active view, services facade).
  void publish_from_model(TriadRec& t, const std::string& view) {
    for (const auto& [name, kind] : t.spec.schema) {
      render_model(t, view, RenderCommand::set_text(name, t.model.snapshot().get(name).display()));
    }
  }

  void do_close(TriadRec& t) {
    for (const ViewRec& v : t.views) {
      render_ctl(t, t.handle.chrome_view, RenderCommand::detach(v.id));
    }
    t.closed = true;
  }

  // --- services ------------------------------------------------------------

  void submit_request(TriadRec& t, const ComponentId& source, const Request& r) {
    const std::string& binding = *t.spec.service_binding;
    emit(source, service_id(binding), "submit", r.kind() == RequestKind::SaveEntity, r);
    const std::int64_t rid = next_request++;
    services.at(binding).submit(rid, r, clock);
    request_origin[rid] = {t.handle.id, source};
    t.outstanding = rid;
    t.last_request = r;
  }

  void request_page(TriadRec& t, int page) {
    t.pending_page = page;
    t.busy = true;
    render_ctl(t, t.handle.chrome_view, RenderCommand::show_busy(true));
    submit_request(t, ctl(t),
                   Request::fetch_page(t.spec.options.at("entity"), "", page, t.pager.page_size));
  }

  void masf_load(TriadRec& t) {
    emit(ctl(t), mdl(t), "load", false);
    const std::string& entity = t.spec.options.at("entity");
    const std::int64_t id = std::stoll(t.spec.options.at("entity_id"));
    submit_request(t, mdl(t), Request::load_entity(entity, id));
  }

  enum class SaveOutcome { Submitted, Refused };

  SaveOutcome masf_save(TriadRec& t, bool close_after) {
    ValidationReport report = ctl_validate(t);
    if (!report.clean()) {
      render_ctl(t, t.handle.chrome_view, RenderCommand::show_error(report.summary()));
      return SaveOutcome::Refused;
    }
    emit(ctl(t), mdl(t), "save", false);
    render_ctl(t, t.handle.chrome_view, RenderCommand::show_busy(true));
    submit_request(t, mdl(t),
                   Request::save_entity(t.spec.options.at("entity"), t.model.snapshot(),
                                        t.model.entity_version()));
    t.prompt.close_after = close_after;
    return SaveOutcome::Submitted;
  }

  // --- closed model commit ---------------------------------------------------

  CommitStatus cm_commit(TriadRec& t) {
    emit(ctl(t), view_id(t.views[0].id), "pull_cache", false);
    ViewRec& v = t.views[0];
    if (v.cache.empty()) {
      v.cache_dirty = false;
      return CommitStatus::Committed;
    }
    std::vector<Snapshot::Entry> items;
    for (const auto& [name, kind] : t.spec.schema) {
      auto it = v.cache.find(name);
      if (it == v.cache.end()) continue;
      auto value = coerce(kind, it->second);
      if (!value) {
        render_ctl(t, t.handle.chrome_view,
                   RenderCommand::show_error(name + ": not a valid " + std::string(kind_name(kind))));
        return CommitStatus::Rejected;
      }
      items.emplace_back(name, *value);
    }
    MutationBatch batch;
    for (const auto& [name, value] : items) batch.items.push_back({name, value});
    emit(ctl(t), mdl(t), "mutate_batch", true, std::move(batch));
    MutationOutcome out = t.model.mutate_closed_batch(items);
    if (!out.accepted) {
      emit(mdl(t), ctl(t), "mutation_rejected", false, ReportNote{out.report});
      render_ctl(t, t.handle.chrome_view, RenderCommand::show_error(out.report.summary()));
      return CommitStatus::Rejected;
    }
    v.cache.clear();
    v.cache_dirty = false;
    rerender_closed(t);
    return CommitStatus::Committed;
  }

  // --- prompt answers --------------------------------------------------------

  DispatchStatus answer_prompt(TriadRec& t, CommandName cmd) {
    const PromptKind kind = *t.prompt.kind;
    t.prompt.kind.reset();
    if (kind == PromptKind::SaveChanges) {
      if (cmd == CommandName::Yes) {
        if (t.spec.pattern == Pattern::ClosedModel) {
          if (cm_commit(t) == CommitStatus::Committed) do_close(t);
        } else {
          if (masf_save(t, /*close_after=*/true) == SaveOutcome::Refused) {
            // validation refused; stay open for corrections
          }
        }
      } else if (cmd == CommandName::No) {
        if (t.spec.pattern == Pattern::ClosedModel) {
          t.views[0].cache.clear();
          t.views[0].cache_dirty = false;
          rerender_closed(t);
        }
        do_close(t);
      }
      // cancel: keep editing
      return DispatchStatus::Ok;
    }

    // AbortRetryIgnore
    if (cmd == CommandName::Retry) {
      const Request r = *t.last_request;  // byte-identical resubmission
      if (t.spec.pattern == Pattern::DisconnectedModel) {
        t.busy = true;
        render_ctl(t, t.handle.chrome_view, RenderCommand::show_busy(true));
        submit_request(t, ctl(t), r);
      } else {
        render_ctl(t, t.handle.chrome_view, RenderCommand::show_busy(true));
        emit(ctl(t), mdl(t), r.kind() == RequestKind::SaveEntity ? "save" : "load", false);
        submit_request(t, mdl(t), r);
      }
    } else if (cmd == CommandName::Ignore) {
      if (t.spec.pattern == Pattern::DisconnectedModel) {
        t.pager.page_index = t.pending_page;
        render_ctl(t, t.views[0].id,
                   RenderCommand::show_page({}, t.pending_page,
                                            t.pager.page_count < 0 ? 0 : t.pager.page_count));
      }
    } else if (cmd == CommandName::Abort) {
      // Back to the page last shown; placeholder pages have no cached rows.
      if (t.spec.pattern == Pattern::DisconnectedModel) {
        auto cached = t.pager.cache.find(t.pager.page_index);
        if (cached != t.pager.cache.end()) {
          render_ctl(t, t.views[0].id,
                     RenderCommand::show_page(cached->second.rows, cached->second.page_index,
                                              t.pager.page_count));
        }
      }
    }
    return DispatchStatus::Ok;
  }

  // --- per-pattern gesture handlers -----------------------------------------

  bool pv_gesture(TriadRec& t, const Gesture& g, const std::string& origin) {
    if (g.is_command(CommandName::Open)) {
      if (t.opened) return false;
      t.opened = true;
      render_ctl(t, t.views[0].id, RenderCommand::set_text(t.field(), ""));
      return true;
    }
    if (!t.opened) return false;
    if (const auto* k = std::get_if<Gesture::Key>(&g.v)) {
      MaskStep step = mask_step(t.mask, t.buffer, k->ch);
      if (step.accepted) {
        for (RenderCommand cmd : step.emitted) {
          std::get<RenderCommand::SetCharAt>(cmd.v).property = t.field();
          render_ctl(t, t.views[0].id, std::move(cmd));
        }
        t.buffer = step.buffer;
        ctl_mutate(t, t.field(), PropertyValue::text(t.buffer));
      }
      return true;  // a rejected key is swallowed, state unchanged
    }
    if (const auto* f = std::get_if<Gesture::Focus>(&g.v)) {
      if (f->property != t.field()) return false;
      const int len = static_cast<int>(t.buffer.size());
      render_ctl(t, t.views[0].id, RenderCommand::select_range(t.field(), len, len));
      return true;
    }
    if (g.is_command(CommandName::Close)) {
      do_close(t);
      return true;
    }
    return false;
  }

  bool cm_gesture(TriadRec& t, const Gesture& g, const std::string& origin) {
    if (g.is_command(CommandName::Open)) {
      if (t.opened) return false;
      t.opened = true;
      rerender_closed(t);
      return true;
    }
    if (!t.opened) return false;
    if (const auto* e = std::get_if<Gesture::Edit>(&g.v)) {
      if (!t.model.kind_of(e->property)) return false;
      t.views[0].cache[e->property] = e->raw;
      t.views[0].cache_dirty = true;
      render_ctl(t, t.views[0].id, RenderCommand::set_text(e->property, e->raw));
      return true;
    }
    if (const auto* f = std::get_if<Gesture::Focus>(&g.v)) {
      if (!t.model.kind_of(f->property)) return false;
      render_ctl(t, t.views[0].id, RenderCommand::select_range(f->property, 0, 0));
      return true;
    }
    if (g.is_command(CommandName::Commit)) {
      cm_commit(t);
      return true;
    }
    if (g.is_command(CommandName::Cancel)) {
      t.views[0].cache.clear();
      t.views[0].cache_dirty = false;
      rerender_closed(t);
      return true;
    }
    if (g.is_command(CommandName::Close)) {
      if (t.views[0].cache_dirty) {
        t.prompt.kind = PromptKind::SaveChanges;
        render_ctl(t, t.handle.chrome_view, RenderCommand::prompt(PromptKind::SaveChanges));
      } else {
        do_close(t);
      }
      return true;
    }
    return false;
  }

  bool om_gesture(TriadRec& t, const Gesture& g, const std::string& origin) {
    if (g.is_command(CommandName::Open)) {
      if (t.opened) return false;
      t.opened = true;
      for (const ViewRec& v : t.views) publish_from_model(t, v.id);
      return true;
    }
    if (!t.opened) return false;
    if (const auto* e = std::get_if<Gesture::Edit>(&g.v)) {
      auto kind = t.model.kind_of(e->property);
      if (!kind) return false;
      auto value = coerce(*kind, e->raw);
      // open mutators store whatever arrived, raw text included
      ctl_mutate_open(t, e->property, value ? *value : PropertyValue::text(e->raw));
      return true;
    }
    if (const auto* f = std::get_if<Gesture::Focus>(&g.v)) {
      if (!t.model.kind_of(f->property)) return false;
      render_ctl(t, origin, RenderCommand::select_range(f->property, 0, 0));
      return true;
    }
    if (g.is_command(CommandName::NewWindow)) {
      attach(t, t.spec.view_kind);
      return true;
    }
    if (g.is_command(CommandName::Commit)) {
      ValidationReport report = ctl_validate(t);
      if (report.clean()) {
        emit(ctl(t), mdl(t), "commit", true);
        t.model.clear_dirty();
      } else {
        render_ctl(t, t.handle.chrome_view, RenderCommand::show_error(report.summary()));
        // Select the offending text so the user can correct it in place.
        std::string prop = report.violations[0].property;
        prop = prop.substr(0, prop.find(','));
        const int len = static_cast<int>(t.model.snapshot().get(prop).display().size());
        render_ctl(t, origin, RenderCommand::select_range(prop, 0, len));
      }
      return true;
    }
    if (g.is_command(CommandName::Close)) {
      do_close(t);
      return true;
    }
    return false;
  }

  bool dm_gesture(TriadRec& t, const Gesture& g, const std::string& origin) {
    if (g.is_command(CommandName::Open)) {
      if (t.opened) return false;
      t.opened = true;
      request_page(t, 0);
      return true;
    }
    if (!t.opened) return false;
    if (g.is_command(CommandName::NextPage) || g.is_command(CommandName::PrevPage)) {
      const int base = t.busy ? t.pending_page : t.pager.page_index;
      const int target = base + (g.is_command(CommandName::NextPage) ? 1 : -1);
      if (target < 0) return false;
      if (t.pager.page_count >= 0 && target >= t.pager.page_count) return false;
      auto cached = t.pager.cache.find(target);
      if (cached != t.pager.cache.end()) {
        // Served locally; anything still in flight is superseded.
        t.outstanding = -1;
        if (t.busy) {
          t.busy = false;
          render_ctl(t, t.handle.chrome_view, RenderCommand::show_busy(false));
        }
        t.pager.page_index = target;
        emit(ctl(t), mdl(t), "load_rows", true, cached->second);
        t.model.load_rows(cached->second);
        render_ctl(t, t.views[0].id,
                   RenderCommand::show_page(cached->second.rows, target, t.pager.page_count));
      } else {
        request_page(t, target);
      }
      return true;
    }
    if (g.is_command(CommandName::Close)) {
      do_close(t);
      return true;
    }
    return false;
  }

  bool masf_gesture(TriadRec& t, const Gesture& g, const std::string& origin) {
    if (g.is_command(CommandName::Open)) {
      if (t.opened) return false;
      t.opened = true;
      render_ctl(t, t.handle.chrome_view, RenderCommand::show_busy(true));
      masf_load(t);
      return true;
    }
    if (!t.opened) return false;
    if (const auto* e = std::get_if<Gesture::Edit>(&g.v)) {
      if (!t.views_bound) return false;
      auto kind = t.model.kind_of(e->property);
      if (!kind) return false;
      auto value = coerce(*kind, e->raw);
      ctl_mutate_open(t, e->property, value ? *value : PropertyValue::text(e->raw));
      return true;
    }
    if (g.is_command(CommandName::Save)) {
      if (!t.views_bound) return false;
      masf_save(t, /*close_after=*/false);
      return true;
    }
    if (g.is_command(CommandName::Close)) {
      emit(ctl(t), mdl(t), "is_dirty", false);
      if (t.views_bound && t.model.dirty()) {
        t.prompt.kind = PromptKind::SaveChanges;
        render_ctl(t, t.handle.chrome_view, RenderCommand::prompt(PromptKind::SaveChanges));
      } else {
        do_close(t);
      }
      return true;
    }
    return false;
  }

  bool pattern_gesture(TriadRec& t, const Gesture& g, const std::string& origin) {
    switch (t.spec.pattern) {
      case Pattern::PassiveView: return pv_gesture(t, g, origin);
      case Pattern::ClosedModel: return cm_gesture(t, g, origin);
      case Pattern::OpenModel:
      case Pattern::ActiveView: return om_gesture(t, g, origin);
      case Pattern::DisconnectedModel: return dm_gesture(t, g, origin);
      default: return masf_gesture(t, g, origin);
    }
  }

  // --- service event handlers -----------------------------------------------

  void dm_event(TriadRec& t, const ServiceEvent& ev) {
    if (ev.request_id != t.outstanding) {
      diag.add(clock, "stale_completion",
               "request " + std::to_string(ev.request_id) + " superseded");
      return;
    }
    t.outstanding = -1;
    if (const auto* page = std::get_if<PageResult>(&ev.outcome)) {
      t.busy = false;
      t.pager.page_count =
          page->total == 0 ? 0 : (page->total + t.pager.page_size - 1) / t.pager.page_size;
      t.pager.cache[page->page_index] = *page;
      t.pager.page_index = page->page_index;
      emit(ctl(t), mdl(t), "load_rows", true, *page);
      t.model.load_rows(*page);
      render_ctl(t, t.handle.chrome_view, RenderCommand::show_busy(false));
      render_ctl(t, t.views[0].id,
                 RenderCommand::show_page(page->rows, page->page_index, t.pager.page_count));
    } else if (ev.is_fault()) {
      t.busy = false;
      render_ctl(t, t.handle.chrome_view, RenderCommand::show_busy(false));
      t.prompt.kind = PromptKind::AbortRetryIgnore;
      render_ctl(t, t.handle.chrome_view, RenderCommand::prompt(PromptKind::AbortRetryIgnore));
    }
  }

  void masf_event(TriadRec& t, const ServiceEvent& ev) {
    if (ev.request_id != t.outstanding) {
      diag.add(clock, "stale_completion",
               "request " + std::to_string(ev.request_id) + " superseded");
      if (ev.is_fault()) {
        // Faults still travel model -> controller; the controller just has
        // nothing left to ask the user about.
        emit(mdl(t), ctl(t), "service_fault", false, ev);
      }
      return;
    }
    t.outstanding = -1;
    if (const auto* entity = std::get_if<EntityResult>(&ev.outcome)) {
      t.model.bind_entity(entity->record, entity->version);
      emit(mdl(t), ctl(t), "load_complete", false);
      t.views_bound = true;
      render_ctl(t, t.handle.chrome_view, RenderCommand::show_busy(false));
      emit(ctl(t), mdl(t), "publish", false);
      for (const ViewRec& v : t.views) publish_from_model(t, v.id);
    } else if (const auto* ack = std::get_if<SaveAck>(&ev.outcome)) {
      t.model.set_entity_version(ack->new_version);
      t.model.clear_dirty();
      emit(mdl(t), ctl(t), "save_complete", false);
      render_ctl(t, t.handle.chrome_view, RenderCommand::show_busy(false));
      if (t.prompt.close_after) do_close(t);
    } else {
      // Faults surface to the controller through the model, never to views.
      emit(mdl(t), ctl(t), "service_fault", false, ev);
      render_ctl(t, t.handle.chrome_view, RenderCommand::show_busy(false));
      t.prompt.kind = PromptKind::AbortRetryIgnore;
      render_ctl(t, t.handle.chrome_view, RenderCommand::prompt(PromptKind::AbortRetryIgnore));
    }
  }

  // --- escalation -------------------------------------------------------------

  bool chain_handle(const std::string& name, const std::string& verb, const Payload& payload) {
    const CtlRec& c = controllers.at(name);
    if (c.verbs.count(verb) != 0) return true;
    if (c.parent) {
      emit(controller_id(name), controller_id(*c.parent), "forward:" + verb, false, payload);
      return chain_handle(*c.parent, verb, payload);
    }
    diag.add(clock, "unhandled_event", verb + " reached root controller " + name);
    return false;
  }

  std::string attach(TriadRec& t, const std::string& view_kind) {
    ViewRec v;
    v.id = t.handle.id + ".v" + std::to_string(t.views.size());
    v.kind = view_kind;
    t.views.push_back(v);
    t.handle.views.push_back(v.id);
    comp_triad[v.id] = t.handle.id;
    publish_from_model(t, v.id);
    return v.id;
  }

  DispatchStatus dispatch_inner(TriadRec& t, const Gesture& g, const std::string& origin_view) {
    if (t.closed) {
      diag.add(clock, "unknown_gesture", g.verb() + ": triad is closed");
      return DispatchStatus::UnknownGesture;
    }
    const std::string origin = origin_view.empty() ? t.views[0].id : origin_view;
    emit(view_id(origin), ctl(t), "gesture", false, g);

    if (t.prompt.awaiting()) {
      if (const auto* c = std::get_if<Gesture::Command>(&g.v)) {
        const auto options = prompt_options(*t.prompt.kind);
        if (std::find(options.begin(), options.end(), c->name) != options.end()) {
          return answer_prompt(t, c->name);
        }
      }
      diag.add(clock, "prompt_refused", g.verb() + " while a prompt is pending");
      return DispatchStatus::UnknownGesture;
    }

    if (pattern_gesture(t, g, origin)) return DispatchStatus::Ok;

    if (t.handle.parent_controller) {
      const std::string verb = g.verb();
      emit(ctl(t), controller_id(*t.handle.parent_controller), "forward:" + verb, false, g);
      if (chain_handle(*t.handle.parent_controller, verb, Payload{g})) {
        return DispatchStatus::Ok;
      }
      return DispatchStatus::UnknownGesture;
    }
    diag.add(clock, "unknown_gesture", g.verb());
    return DispatchStatus::UnknownGesture;
  }
};

Runtime::Runtime(std::uint64_t seed) : state_(std::make_unique<State>()) {
  state_->seed = seed;
  State* st = state_.get();
  state_->bus.set_gate([st](const EventEnvelope& e) -> std::optional<std::string> {
    const bool view_model = (e.source.kind == ComponentKind::View &&
                             e.target.kind == ComponentKind::Model) ||
                            (e.source.kind == ComponentKind::Model &&
                             e.target.kind == ComponentKind::View);
    if (e.source.kind == ComponentKind::View && e.target.kind == ComponentKind::Model &&
        e.mutating) {
      return "mutating call from a view source";
    }
    if ((e.source.kind == ComponentKind::View && e.target.kind == ComponentKind::Service) ||
        (e.source.kind == ComponentKind::Service && e.target.kind == ComponentKind::View)) {
      return "views never talk to the services layer";
    }
    if (view_model) {
      const std::string& model_name = e.source.kind == ComponentKind::Model ? e.source.name
                                                                            : e.target.name;
      bool found = false;
      const Pattern p = st->pattern_of_component(model_name, &found);
      if (found && p == Pattern::PassiveView) {
        return "passive view isolates views from the model";
      }
    }
    return std::nullopt;
  });
}

Runtime::~Runtime() = default;

Tick Runtime::now() const { return state_->clock; }
std::uint64_t Runtime::seed() const { return state_->seed; }
const Bus& Runtime::bus() const { return state_->bus; }
DiagnosticsLog& Runtime::diagnostics() { return state_->diag; }
const DiagnosticsLog& Runtime::diagnostics() const { return state_->diag; }

void Runtime::add_service(const std::string& name, ServicePlan plan) {
  plan.seed ^= state_->seed;
  state_->services.emplace(name, ServiceSim(name, std::move(plan)));
}

bool Runtime::has_service(const std::string& name) const {
  return state_->services.count(name) != 0;
}

ServiceSim& Runtime::service(const std::string& name) { return state_->services.at(name); }

TriadHandle Runtime::assemble(const TriadSpec& spec) {
  if (spec.schema.empty()) throw SchemaError("schema declares no properties");
  std::set<std::string> names;
  for (const auto& [name, kind] : spec.schema) {
    if (!names.insert(name).second) throw SchemaError("duplicate property: " + name);
  }
  for (const Rule& rule : spec.ruleset) {
    if (const auto* r = std::get_if<Rule::IntRange>(&rule.v)) {
      if (r->min > r->max) throw WiringError("int_range requires min <= max");
    }
    for (const std::string& prop : rule.referenced_properties()) {
      if (names.count(prop) == 0) {
        throw WiringError("rule references unknown property: " + prop);
      }
    }
  }
  const bool needs_service = spec.pattern == Pattern::DisconnectedModel ||
                             spec.pattern == Pattern::ModelAsServicesFacade;
  if (needs_service && !spec.service_binding) {
    throw WiringError(std::string(pattern_name(spec.pattern)) + " requires a service_binding");
  }
  if (!needs_service && spec.service_binding) {
    throw WiringError(std::string(pattern_name(spec.pattern)) + " forbids a service_binding");
  }
  if (needs_service && !has_service(*spec.service_binding)) {
    throw WiringError("unknown service: " + *spec.service_binding);
  }
  if (spec.pattern == Pattern::PassiveView && spec.view_kind == "masked_field" &&
      spec.options.count("mask") == 0) {
    throw WiringError("masked_field passive view requires a mask option");
  }
  if (spec.parent_controller &&
      state_->controllers.count(*spec.parent_controller) == 0) {
    throw WiringError("unknown parent controller: " + *spec.parent_controller);
  }

  TriadSpec stored = spec;
  if (needs_service && stored.options.count("entity") == 0) {
    const auto& tables = state_->services.at(*stored.service_binding).dataset();
    if (tables.empty()) throw WiringError("service has no entity tables");
    stored.options["entity"] = tables[0].name;
  }
  if (spec.pattern == Pattern::ModelAsServicesFacade && stored.options.count("entity_id") == 0) {
    throw WiringError("model_as_services_facade requires an entity_id option");
  }

  const std::string id = "t" + std::to_string(++state_->next_triad);
  TriadHandle handle;
  handle.id = id;
  handle.pattern = spec.pattern;
  handle.model_id = id;
  handle.controller_id = id;
  handle.has_view_read_port = spec.pattern != Pattern::PassiveView;
  handle.chrome_view = id + ".chrome";
  handle.parent_controller = spec.parent_controller;

  auto rec = std::make_unique<TriadRec>(handle, std::move(stored));
  if (spec.pattern == Pattern::PassiveView) {
    auto it = rec->spec.options.find("mask");
    rec->mask = it == rec->spec.options.end() ? "" : it->second;
  }
  if (spec.pattern == Pattern::DisconnectedModel) {
    int page_size = 20;
    auto it = rec->spec.options.find("page_size");
    if (it != rec->spec.options.end()) {
      try {
        page_size = std::stoi(it->second);
      } catch (const std::exception&) {
        throw WiringError("page_size is not a number");
      }
      if (page_size < 1) throw WiringError("page_size must be >= 1");
    }
    rec->pager.page_size = page_size;
  }

  ViewRec v0;
  v0.id = id + ".v0";
  v0.kind = rec->spec.view_kind;
  rec->views.push_back(v0);
  rec->handle.views.push_back(v0.id);

  state_->comp_triad[id] = id;
  state_->comp_triad[v0.id] = id;
  state_->comp_triad[rec->handle.chrome_view] = id;
  state_->controllers[id] = {pattern_verbs(spec.pattern), spec.parent_controller};

  TriadHandle out = rec->handle;
  state_->triads[id] = std::move(rec);
  return out;
}

const TriadHandle& Runtime::handle(const std::string& triad_id) const {
  return state_->triad(triad_id).handle;
}

const TriadSpec& Runtime::spec_of(const std::string& triad_id) const {
  return state_->triad(triad_id).spec;
}

bool Runtime::triad_closed(const std::string& triad_id) const {
  return state_->triad(triad_id).closed;
}

DispatchResult Runtime::dispatch(const std::string& triad_id, const Gesture& gesture,
                                 const std::string& origin_view) {
  TriadRec& t = state_->triad(triad_id);
  const Seq start = state_->bus.next_seq();
  DispatchResult result;
  result.status = state_->dispatch_inner(t, gesture, origin_view);
  const auto& log = state_->bus.log();
  for (std::size_t i = static_cast<std::size_t>(start); i < log.size(); ++i) {
    const EventEnvelope& e = log[i];
    if (e.denied || e.target.kind != ComponentKind::View) continue;
    auto it = state_->comp_triad.find(e.target.name);
    if (it == state_->comp_triad.end() || it->second != triad_id) continue;
    if (const auto* cmd = std::get_if<RenderCommand>(&e.payload)) {
      result.renders.emplace_back(e.target.name, *cmd);
    }
  }
  return result;
}

EventEnvelope Runtime::av_forward_edit(const std::string& triad_id, const std::string& view,
                                       const Gesture& edit) {
  const Seq start = state_->bus.next_seq();
  dispatch(triad_id, edit, view);
  const auto& log = state_->bus.log();
  if (static_cast<std::size_t>(start) >= log.size()) {
    throw std::logic_error("dispatch recorded no envelope");
  }
  return log[static_cast<std::size_t>(start)];
}

std::string Runtime::attach_view(const std::string& triad_id, const std::string& view_kind) {
  TriadRec& t = state_->triad(triad_id);
  if (t.spec.pattern != Pattern::OpenModel && t.spec.pattern != Pattern::ActiveView) {
    throw PatternForbidsMultiView(std::string(pattern_name(t.spec.pattern)) +
                                  " supports exactly one view");
  }
  return state_->attach(t, view_kind);
}

std::vector<ServiceEvent> Runtime::tick(Tick n) {
  std::vector<ServiceEvent> delivered;
  for (Tick step = 0; step < n; ++step) {
    ++state_->clock;
    struct DueItem {
      Tick due;
      std::string service;
      ServiceEvent event;
    };
    std::vector<DueItem> due;
    for (auto& [name, sim] : state_->services) {
      for (auto& d : sim.collect_due(state_->clock)) {
        due.push_back({d.due, name, std::move(d.event)});
      }
    }
    std::sort(due.begin(), due.end(), [](const DueItem& a, const DueItem& b) {
      return a.due != b.due ? a.due < b.due : a.event.request_id < b.event.request_id;
    });
    for (DueItem& item : due) {
      auto origin = state_->request_origin.find(item.event.request_id);
      if (origin == state_->request_origin.end()) continue;
      auto triad_it = state_->triads.find(origin->second.triad);
      if (triad_it == state_->triads.end() || triad_it->second->closed) {
        // The requesting triad is gone; the event dies at the service edge.
        state_->diag.add(state_->clock, "stale_completion", "owning triad is gone");
        delivered.push_back(std::move(item.event));
        continue;
      }
      state_->emit(service_id(item.service), origin->second.component, "service_event", false,
                   item.event);
      if (triad_it->second->spec.pattern == Pattern::DisconnectedModel) {
        state_->dm_event(*triad_it->second, item.event);
      } else {
        state_->masf_event(*triad_it->second, item.event);
      }
      delivered.push_back(std::move(item.event));
    }
  }
  return delivered;
}

ControllerPort Runtime::controller_port(const std::string& triad_id) {
  state_->triad(triad_id);
  return ControllerPort(this, triad_id);
}

std::optional<ViewReadPort> Runtime::view_read_port(const std::string& triad_id,
                                                    const std::string& view) {
  TriadRec& t = state_->triad(triad_id);
  if (!t.handle.has_view_read_port) return std::nullopt;
  return ViewReadPort(this, triad_id, view.empty() ? t.views[0].id : view);
}

std::string Runtime::make_controller(const std::set<std::string>& handled_verbs,
                                     const std::optional<std::string>& parent) {
  if (parent && state_->controllers.count(*parent) == 0) {
    throw WiringError("unknown parent controller: " + *parent);
  }
  const std::string name = "c" + std::to_string(++state_->next_ctl);
  state_->controllers[name] = {handled_verbs, parent};
  return name;
}

Disposition Runtime::escalate(const std::string& controller_name, const EventEnvelope& event) {
  auto it = state_->controllers.find(controller_name);
  if (it == state_->controllers.end()) {
    throw std::out_of_range("no such controller: " + controller_name);
  }
  std::string verb = event.verb;
  if (verb.rfind("forward:", 0) == 0) verb = verb.substr(8);
  if (verb == "gesture") {
    if (const auto* g = std::get_if<Gesture>(&event.payload)) verb = g->verb();
  }
  if (it->second.verbs.count(verb) != 0) return Disposition::Handled;
  if (it->second.parent) {
    state_->emit(controller_id(controller_name), controller_id(*it->second.parent),
                 "forward:" + verb, false, event.payload);
    return state_->chain_handle(*it->second.parent, verb, event.payload)
               ? Disposition::Forwarded
               : Disposition::Unhandled;
  }
  state_->diag.add(state_->clock, "unhandled_event",
                   verb + " reached root controller " + controller_name);
  return Disposition::Unhandled;
}

const EventEnvelope& Runtime::attempt(const ComponentId& source, const ComponentId& target,
                                      const std::string& verb, bool mutating, Payload payload) {
  return state_->emit(source, target, verb, mutating, std::move(payload));
}

// --- ports ---------------------------------------------------------------

MutationOutcome ControllerPort::mutate(const std::string& property, const PropertyValue& value) {
  TriadRec& t = rt_->state_->triad(triad_);
  if (closed_style_mutators(t.spec.pattern)) {
    return rt_->state_->ctl_mutate(t, property, value);
  }
  ChangeNote note = rt_->state_->ctl_mutate_open(t, property, value);
  return {true, note.revision, {}};
}

MutationOutcome ControllerPort::mutate_batch(const std::vector<Snapshot::Entry>& items) {
  TriadRec& t = rt_->state_->triad(triad_);
  MutationBatch batch;
  for (const auto& [name, value] : items) batch.items.push_back({name, value});
  rt_->state_->emit(Runtime::State::ctl(t), Runtime::State::mdl(t), "mutate_batch", true,
                    std::move(batch));
  MutationOutcome out = t.model.mutate_closed_batch(items);
  if (!out.accepted) {
    rt_->state_->emit(Runtime::State::mdl(t), Runtime::State::ctl(t), "mutation_rejected", false,
                      ReportNote{out.report});
  }
  return out;
}

ValidationReport ControllerPort::validate() { return rt_->state_->ctl_validate(rt_->state_->triad(triad_)); }

Snapshot ControllerPort::read() const {
  TriadRec& t = rt_->state_->triad(triad_);
  rt_->state_->emit(Runtime::State::ctl(t), Runtime::State::mdl(t), "read", false);
  return t.model.snapshot();
}

bool ControllerPort::is_dirty() {
  TriadRec& t = rt_->state_->triad(triad_);
  rt_->state_->emit(Runtime::State::ctl(t), Runtime::State::mdl(t), "is_dirty", false);
  return t.model.dirty();
}

const std::vector<std::string>& ControllerPort::verbs() {
  static const std::vector<std::string> kVerbs = {
      "mutate", "mutate_batch", "validate", "read", "is_dirty", "load", "save", "commit"};
  return kVerbs;
}

PropertyValue ViewReadPort::get(const std::string& property) const {
  TriadRec& t = rt_->state_->triad(triad_);
  rt_->state_->emit(view_id(view_), Runtime::State::mdl(t), "read", false);
  if (t.spec.pattern == Pattern::ModelAsServicesFacade && !t.views_bound) {
    rt_->state_->diag.add(rt_->state_->clock, "read_refused",
                          "binding guard: entity not loaded yet");
    return PropertyValue::absent();
  }
  return t.model.snapshot().get(property);
}

Snapshot ViewReadPort::read() const {
  TriadRec& t = rt_->state_->triad(triad_);
  rt_->state_->emit(view_id(view_), Runtime::State::mdl(t), "read", false);
  if (t.spec.pattern == Pattern::ModelAsServicesFacade && !t.views_bound) {
    rt_->state_->diag.add(rt_->state_->clock, "read_refused",
                          "binding guard: entity not loaded yet");
    return Snapshot{};
  }
  return t.model.snapshot();
}

std::vector<Snapshot> ViewReadPort::rows() const {
  TriadRec& t = rt_->state_->triad(triad_);
  rt_->state_->emit(view_id(view_), Runtime::State::mdl(t), "read", false);
  return t.model.rows();
}

const std::vector<std::string>& ViewReadPort::verbs() {
  static const std::vector<std::string> kVerbs = {"read"};
  return kVerbs;
}

}  // namespace mvck
