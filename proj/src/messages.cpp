#include "mvck/messages.hpp"

#include <array>

#include "json_detail.hpp"

namespace mvck {

namespace {

constexpr std::array<std::string_view, 13> kCommandNames = {
    "open",     "commit",    "cancel", "close", "next_page", "prev_page", "new_window",
    "yes",      "no",        "retry",  "abort", "ignore",    "save",
};

std::string_view token(std::string_view& rest) {
  while (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
  std::size_t end = rest.find(' ');
  std::string_view tok = rest.substr(0, end);
  rest.remove_prefix(end == std::string_view::npos ? rest.size() : end);
  return tok;
}

}  // namespace

std::string_view command_text(CommandName name) { return kCommandNames[static_cast<int>(name)]; }

std::optional<CommandName> parse_command(std::string_view text) {
  for (std::size_t i = 0; i < kCommandNames.size(); ++i) {
    if (kCommandNames[i] == text) return static_cast<CommandName>(i);
  }
  return std::nullopt;
}

Gesture Gesture::edit(std::string property, std::string raw) {
  return {Edit{std::move(property), std::move(raw)}};
}

bool Gesture::is_command(CommandName name) const {
  const auto* c = std::get_if<Command>(&v);
  return c != nullptr && c->name == name;
}

std::string Gesture::verb() const {
  switch (v.index()) {
    case 0: return "key";
    case 1: return "edit";
    case 2: return "focus";
    default: return "command:" + std::string(command_text(std::get<Command>(v).name));
  }
}

std::optional<Gesture> parse_gesture(std::string_view line, std::string* error) {
  std::string_view rest = line;
  const std::string_view head = token(rest);
  auto fail = [&](std::string msg) -> std::optional<Gesture> {
    if (error != nullptr) *error = std::move(msg);
    return std::nullopt;
  };
  if (head == "key") {
    const std::string_view ch = token(rest);
    if (ch.size() != 1) return fail("key expects one character");
    return Gesture::key(ch[0]);
  }
  if (head == "edit") {
    const std::string_view prop = token(rest);
    if (prop.empty()) return fail("edit expects a property name");
    if (!rest.empty() && rest.front() == ' ') rest.remove_prefix(1);
    return Gesture::edit(std::string(prop), std::string(rest));
  }
  if (head == "focus") {
    const std::string_view prop = token(rest);
    if (prop.empty()) return fail("focus expects a property name");
    return Gesture::focus(std::string(prop));
  }
  if (head == "command") {
    const std::string_view name = token(rest);
    auto cmd = parse_command(name);
    if (!cmd) return fail("unknown command name: " + std::string(name));
    return Gesture::command(*cmd);
  }
  return fail("unknown gesture kind: " + std::string(head));
}

std::string_view prompt_kind_text(PromptKind kind) {
  return kind == PromptKind::SaveChanges ? "save_changes" : "abort_retry_ignore";
}

std::vector<CommandName> prompt_options(PromptKind kind) {
  if (kind == PromptKind::SaveChanges) {
    return {CommandName::Yes, CommandName::No, CommandName::Cancel};
  }
  return {CommandName::Abort, CommandName::Retry, CommandName::Ignore};
}

RenderCommand RenderCommand::set_text(std::string property, std::string text) {
  return {SetText{std::move(property), std::move(text)}};
}

RenderCommand RenderCommand::set_char_at(std::string property, int position, char ch) {
  return {SetCharAt{std::move(property), position, ch}};
}

RenderCommand RenderCommand::show_error(std::string message) {
  return {ShowError{std::move(message)}};
}

RenderCommand RenderCommand::show_page(std::vector<Snapshot> rows, int page_index, int page_count) {
  return {ShowPage{std::move(rows), page_index, page_count}};
}

RenderCommand RenderCommand::prompt(PromptKind kind) {
  return {Prompt{kind, prompt_options(kind)}};
}

RenderCommand RenderCommand::select_range(std::string property, int start, int end) {
  return {SelectRange{std::move(property), start, end}};
}

std::string_view RenderCommand::kind() const {
  constexpr std::array<std::string_view, 8> kKinds = {
      "set_text", "set_char_at", "show_error", "show_busy",
      "show_page", "prompt",     "select_range", "detach",
  };
  return kKinds[v.index()];
}

bool valid_render_command(const RenderCommand& cmd) {
  if (const auto* c = std::get_if<RenderCommand::SetCharAt>(&cmd.v)) return c->position >= 0;
  if (const auto* s = std::get_if<RenderCommand::SelectRange>(&cmd.v)) return s->start <= s->end;
  if (const auto* p = std::get_if<RenderCommand::Prompt>(&cmd.v)) {
    return p->options == prompt_options(p->kind);
  }
  return true;
}

std::string to_canonical(const Gesture& g) {
  nlohmann::json j;
  switch (g.v.index()) {
    case 0:
      j = {{"kind", "key"}, {"char", std::string(1, std::get<Gesture::Key>(g.v).ch)}};
      break;
    case 1: {
      const auto& e = std::get<Gesture::Edit>(g.v);
      j = {{"kind", "edit"}, {"property", e.property}, {"raw", e.raw}};
      break;
    }
    case 2:
      j = {{"kind", "focus"}, {"property", std::get<Gesture::Focus>(g.v).property}};
      break;
    default:
      j = {{"kind", "command"},
           {"name", std::string(command_text(std::get<Gesture::Command>(g.v).name))}};
      break;
  }
  return j.dump();
}

std::string to_canonical(const RenderCommand& cmd) {
  nlohmann::json j;
  j["kind"] = std::string(cmd.kind());
  if (const auto* c = std::get_if<RenderCommand::SetText>(&cmd.v)) {
    j["property"] = c->property;
    j["text"] = c->text;
  } else if (const auto* c2 = std::get_if<RenderCommand::SetCharAt>(&cmd.v)) {
    j["property"] = c2->property;
    j["position"] = c2->position;
    j["char"] = std::string(1, c2->ch);
  } else if (const auto* e = std::get_if<RenderCommand::ShowError>(&cmd.v)) {
    j["message"] = e->message;
  } else if (const auto* b = std::get_if<RenderCommand::ShowBusy>(&cmd.v)) {
    j["busy"] = b->busy;
  } else if (const auto* p = std::get_if<RenderCommand::ShowPage>(&cmd.v)) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& row : p->rows) rows.push_back(detail::snapshot_json(row));
    j["rows"] = rows;
    j["page_index"] = p->page_index;
    j["page_count"] = p->page_count;
  } else if (const auto* pr = std::get_if<RenderCommand::Prompt>(&cmd.v)) {
    j["prompt"] = std::string(prompt_kind_text(pr->kind));
    nlohmann::json opts = nlohmann::json::array();
    for (CommandName o : pr->options) opts.push_back(std::string(command_text(o)));
    j["options"] = opts;
  } else if (const auto* r = std::get_if<RenderCommand::SelectRange>(&cmd.v)) {
    j["property"] = r->property;
    j["start"] = r->start;
    j["end"] = r->end;
  } else if (const auto* d = std::get_if<RenderCommand::Detach>(&cmd.v)) {
    j["view"] = d->view_id;
  }
  return j.dump();
}

}  // namespace mvck
