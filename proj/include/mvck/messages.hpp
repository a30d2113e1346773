#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mvck/value.hpp"

namespace mvck {

// Closed command vocabulary. Unknown names are rejected at parse time; demos
// cannot invent new verbs.
enum class CommandName {
  Open,
  Commit,
  Cancel,
  Close,
  NextPage,
  PrevPage,
  NewWindow,
  Yes,
  No,
  Retry,
  Abort,
  Ignore,
  Save,
};

std::string_view command_text(CommandName name);
std::optional<CommandName> parse_command(std::string_view text);

// User input into a triad.
struct Gesture {
  struct Key {
    char ch;
  };
  struct Edit {
    std::string property;
    std::string raw;
  };
  struct Focus {
    std::string property;
  };
  struct Command {
    CommandName name;
  };

  std::variant<Key, Edit, Focus, Command> v;

  static Gesture key(char ch) { return {Key{ch}}; }
  static Gesture edit(std::string property, std::string raw);
  static Gesture focus(std::string property) { return {Focus{std::move(property)}}; }
  static Gesture command(CommandName name) { return {Command{name}}; }

  bool is_command(CommandName name) const;
  // Routing verb: "key", "edit", "focus", or "command:<name>".
  std::string verb() const;
};

// Line grammar used both interactively and inside scenario records:
//   key <char> | edit <property> [raw text...] | focus <property> | command <name>
std::optional<Gesture> parse_gesture(std::string_view line, std::string* error = nullptr);

enum class PromptKind { SaveChanges, AbortRetryIgnore };

std::string_view prompt_kind_text(PromptKind kind);
// The only legal option lists: SaveChanges -> yes/no/cancel,
// AbortRetryIgnore -> abort/retry/ignore.
std::vector<CommandName> prompt_options(PromptKind kind);

// Output to a view surface.
struct RenderCommand {
  struct SetText {
    std::string property;
    std::string text;
  };
  struct SetCharAt {
    std::string property;
    int position;
    char ch;
  };
  struct ShowError {
    std::string message;
  };
  struct ShowBusy {
    bool busy;
  };
  struct ShowPage {
    std::vector<Snapshot> rows;
    int page_index;
    int page_count;
  };
  struct Prompt {
    PromptKind kind;
    std::vector<CommandName> options;
  };
  struct SelectRange {
    std::string property;
    int start;
    int end;
  };
  struct Detach {
    std::string view_id;
  };

  std::variant<SetText, SetCharAt, ShowError, ShowBusy, ShowPage, Prompt, SelectRange, Detach> v;

  static RenderCommand set_text(std::string property, std::string text);
  static RenderCommand set_char_at(std::string property, int position, char ch);
  static RenderCommand show_error(std::string message);
  static RenderCommand show_busy(bool busy) { return {ShowBusy{busy}}; }
  static RenderCommand show_page(std::vector<Snapshot> rows, int page_index, int page_count);
  static RenderCommand prompt(PromptKind kind);  // options fixed by kind
  static RenderCommand select_range(std::string property, int start, int end);
  static RenderCommand detach(std::string view_id) { return {Detach{std::move(view_id)}}; }

  // "set_text", "set_char_at", "show_error", "show_busy", "show_page",
  // "prompt", "select_range", "detach".
  std::string_view kind() const;
};

bool valid_render_command(const RenderCommand& cmd);

std::string to_canonical(const Gesture& g);
std::string to_canonical(const RenderCommand& cmd);

}  // namespace mvck
