#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "mvck/bus.hpp"
#include "mvck/mask.hpp"
#include "mvck/messages.hpp"
#include "mvck/model.hpp"
#include "mvck/rules.hpp"
#include "mvck/services.hpp"
#include "mvck/value.hpp"

namespace mvck {

enum class Pattern {
  PassiveView,
  ClosedModel,
  OpenModel,
  DisconnectedModel,
  ModelAsServicesFacade,
  ActiveView,
};

std::string_view pattern_name(Pattern p);
std::optional<Pattern> parse_pattern(std::string_view name);

struct WiringError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SchemaError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct PatternForbidsMultiView : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnknownPattern : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ControllerKind { Generic, Specific };

// Declarative wiring of one pattern instance.
struct TriadSpec {
  Pattern pattern = Pattern::PassiveView;
  std::vector<std::pair<std::string, PropertyKind>> schema;
  std::vector<Rule> ruleset;
  std::string view_kind = "plain";
  ControllerKind controller_kind = ControllerKind::Specific;
  std::optional<std::string> service_binding;  // required for DM and MaSF
  std::map<std::string, std::string> options;  // mask, page_size, entity, entity_id
  std::optional<std::string> parent_controller;
};

struct TriadHandle {
  std::string id;
  Pattern pattern = Pattern::PassiveView;
  std::string model_id;
  std::string controller_id;
  bool has_view_read_port = false;  // absent for passive view
  std::vector<std::string> views;   // attached content views, in attachment order
  std::string chrome_view;          // window chrome: busy cursors, prompts, errors
  std::optional<std::string> parent_controller;
};

enum class DispatchStatus { Ok, UnknownGesture };

struct DispatchResult {
  DispatchStatus status = DispatchStatus::Ok;
  // (target view id, command) for every render emitted by this dispatch,
  // in bus order; includes chrome renders.
  std::vector<std::pair<std::string, RenderCommand>> renders;
};

enum class Disposition { Handled, Forwarded, Unhandled };

enum class CommitStatus { Committed, Cancelled, PromptIssued, Rejected };

class Runtime;

// Mutators, validation triggers and load/save — the model surface reserved
// for controllers. Calls travel the bus like any other message.
class ControllerPort {
 public:
  MutationOutcome mutate(const std::string& property, const PropertyValue& value);
  MutationOutcome mutate_batch(const std::vector<Snapshot::Entry>& items);
  ValidationReport validate();
  Snapshot read() const;
  bool is_dirty();
  static const std::vector<std::string>& verbs();

 private:
  friend class Runtime;
  ControllerPort(Runtime* rt, std::string triad) : rt_(rt), triad_(std::move(triad)) {}
  Runtime* rt_;
  std::string triad_;
};

// Accessors only; never raises anything that needs a user decision.
class ViewReadPort {
 public:
  PropertyValue get(const std::string& property) const;
  Snapshot read() const;
  std::vector<Snapshot> rows() const;
  static const std::vector<std::string>& verbs();

 private:
  friend class Runtime;
  ViewReadPort(Runtime* rt, std::string triad, std::string view)
      : rt_(rt), triad_(std::move(triad)), view_(std::move(view)) {}
  Runtime* rt_;
  std::string triad_;
  std::string view_;
};

// Owns the virtual clock, the instrumented bus, the diagnostics channel, the
// service simulators and every assembled triad. Single logical execution
// context; tick() is the only way time advances.
class Runtime {
 public:
  explicit Runtime(std::uint64_t seed = 0);
  ~Runtime();
  Runtime(const Runtime&) = delete;
  Runtime& operator=(const Runtime&) = delete;

  Tick now() const;
  std::uint64_t seed() const;
  const Bus& bus() const;
  DiagnosticsLog& diagnostics();
  const DiagnosticsLog& diagnostics() const;

  void add_service(const std::string& name, ServicePlan plan);
  bool has_service(const std::string& name) const;
  ServiceSim& service(const std::string& name);

  TriadHandle assemble(const TriadSpec& spec);
  const TriadHandle& handle(const std::string& triad_id) const;
  const TriadSpec& spec_of(const std::string& triad_id) const;
  bool triad_closed(const std::string& triad_id) const;

  // Runs the blueprint's controller logic to quiescence at the current tick.
  // Service completions are never processed here; they arrive via tick().
  DispatchResult dispatch(const std::string& triad_id, const Gesture& gesture,
                          const std::string& origin_view = {});

  // Observer-path entry for active views: the edit enters as an event to the
  // controller; the resulting change notification flows model -> views.
  EventEnvelope av_forward_edit(const std::string& triad_id, const std::string& view,
                                const Gesture& edit);

  std::string attach_view(const std::string& triad_id, const std::string& view_kind);

  // Advances the virtual clock n ticks, delivering every service event due in
  // (now, now+n] into the owning triads in (tick, seq) order.
  std::vector<ServiceEvent> tick(Tick n);

  ControllerPort controller_port(const std::string& triad_id);
  std::optional<ViewReadPort> view_read_port(const std::string& triad_id,
                                             const std::string& view = {});

  // Minimal controller hierarchy: standalone controllers own a verb set and
  // escalate unhandled events to their parent.
  std::string make_controller(const std::set<std::string>& handled_verbs,
                              const std::optional<std::string>& parent = {});
  Disposition escalate(const std::string& controller_name, const EventEnvelope& event);

  // Raw delivery attempt, for hostile test doubles; the gate decides.
  const EventEnvelope& attempt(const ComponentId& source, const ComponentId& target,
                               const std::string& verb, bool mutating,
                               Payload payload = std::monostate{});

  struct State;

 private:
  friend class ControllerPort;
  friend class ViewReadPort;
  std::unique_ptr<State> state_;
};

}  // namespace mvck
