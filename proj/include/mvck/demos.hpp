#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mvck/scenario.hpp"
#include "mvck/testkit.hpp"
#include "mvck/triad.hpp"

namespace mvck {

// The bundled terminal demos, one per interaction scenario family.
struct DemoDescriptor {
  std::string name;
  std::string summary;
  std::vector<Pattern> patterns;
  std::uint64_t default_seed = 7;
  Tick default_latency = 3;
  double default_fault_rate = 0.0;
  std::string default_script;  // file name under scenarios/
};

const std::vector<DemoDescriptor>& demo_registry();
const DemoDescriptor* find_demo(std::string_view name);
// Stable order, one formatted line per demo.
std::vector<std::string> list_demos();

struct DemoOptions {
  std::optional<std::uint64_t> seed;
  std::optional<Tick> latency;
  std::optional<double> fault_rate;
};

// A live demo: the runtime, its services, and the demo's triads. Scripted and
// interactive runs share this path, so both produce identical transcripts for
// identical gesture sequences. Setup records (rule, dataset_row) are only
// legal before the first gesture, tick or expect record.
class DemoSession {
 public:
  DemoSession(const std::string& demo, const DemoOptions& options);
  ~DemoSession();

  const DemoDescriptor& descriptor() const { return descriptor_; }

  void apply(const ScenarioRecord& record);
  void run_script(const std::string& text);  // throws ParseError / ExpectationFailed

  // Interactive line: a gesture, "tick <n>", a comment or blank.
  DispatchResult feed_line(const std::string& line);

  DispatchResult feed_gesture(const Gesture& gesture);
  void advance(Tick n);

  // Render deliveries since the previous drain, one line each.
  std::vector<std::string> drain_renders();

  Transcript transcript() const;
  // check_conformance against every declared pattern, plus the demo's own
  // embedded structural checks.
  std::vector<std::string> conformance() const;

  Runtime& runtime();
  const Runtime& runtime() const;
  const std::vector<std::string>& triad_ids() const { return triads_; }
  // The triad gestures currently route to (advances as triads close).
  const std::string& active_triad() const;

 private:
  void ensure_started();
  void apply_expect(const ScenarioRecord::Expect& expect, int line_no);

  DemoDescriptor descriptor_;
  std::uint64_t seed_;
  Tick latency_;
  double fault_rate_;

  std::vector<Rule> extra_rules_;
  std::vector<ScenarioRecord::DatasetRow> extra_rows_;

  std::unique_ptr<Runtime> rt_;
  std::vector<std::string> triads_;
  std::size_t active_ = 0;
  Seq drain_cursor_ = 0;
  Seq expect_cursor_ = 0;
};

// Exit code mapping shared by the CLI and the C API: 0 clean, 2 parse error,
// 3 expectation failed, 4 wiring/schema error, 1 anything else.
int exit_code_for_current_exception();

}  // namespace mvck
