// Terminal front end for the bundled demos. Line oriented: every render
// command is echoed as one line, gestures are read as lines. Talks to the
// kit exclusively through the C API.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "mvck.h"

namespace {

void print_drained(mvck_session* session) {
  char* text = nullptr;
  if (mvck_session_drain_renders(session, &text) == MVCK_OK && text != nullptr) {
    if (text[0] != '\0') std::fputs(text, stdout);
    mvck_free(text);
  }
}

int finish(mvck_session* session, const std::string& out_path, int exit_code) {
  if (!out_path.empty()) {
    char* transcript = nullptr;
    if (mvck_session_transcript(session, &transcript) == MVCK_OK && transcript != nullptr) {
      std::ofstream out(out_path, std::ios::binary);
      if (!out) {
        std::cerr << "cannot write " << out_path << "\n";
        exit_code = exit_code == 0 ? 1 : exit_code;
      } else {
        out << transcript;
      }
      mvck_free(transcript);
    }
  }
  mvck_session_close(session);
  return exit_code;
}

int exit_code_for(mvck_status status) {
  switch (status) {
    case MVCK_OK: return 0;
    case MVCK_PARSE_ERROR: return 2;
    case MVCK_EXPECTATION_FAILED: return 3;
    case MVCK_WIRING_ERROR: return 4;
    default: return 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MVC pattern demos (headless, deterministic)"};

  std::string demo;
  std::string script_path;
  std::string out_path;
  std::uint64_t seed = 0;
  std::int64_t latency_ms = 0;
  double fault_rate = 0.0;
  bool list = false;

  app.add_option("--demo", demo, "demo name (see --list)");
  app.add_option("--script", script_path, "scenario file; omit for interactive mode");
  app.add_option("--out", out_path, "write the run transcript to this file");
  auto* seed_opt = app.add_option("--seed", seed, "random seed for the service plan");
  auto* latency_opt =
      app.add_option("--latency-ms", latency_ms, "service latency (1 ms = 1 virtual tick)");
  auto* fault_opt =
      app.add_option("--fault-rate", fault_rate, "seeded fault probability in [0,1]");
  app.add_flag("--list", list, "list the demos and exit");

  CLI11_PARSE(app, argc, argv);

  if (list) {
    const int32_t n = mvck_demo_count();
    for (int32_t i = 0; i < n; ++i) {
      const char* name = nullptr;
      const char* summary = nullptr;
      if (mvck_demo_info(i, &name, &summary) == MVCK_OK) {
        std::printf("%-8s %s\n", name, summary);
      }
    }
    return 0;
  }

  if (demo.empty()) {
    std::cerr << "pick a demo with --demo (or use --list)\n";
    return 1;
  }

  mvck_config config{};
  config.demo = demo.c_str();
  if (!seed_opt->empty()) {
    config.seed = seed;
    config.has_seed = 1;
  }
  if (!latency_opt->empty()) {
    config.latency_ticks = latency_ms;
    config.has_latency = 1;
  }
  if (!fault_opt->empty()) {
    config.fault_rate = fault_rate;
    config.has_fault_rate = 1;
  }

  mvck_session* session = nullptr;
  mvck_status status = mvck_session_open(&config, &session);
  if (status != MVCK_OK) {
    std::cerr << "cannot open demo: " << demo << "\n";
    return exit_code_for(status);
  }

  if (!script_path.empty()) {
    std::ifstream in(script_path, std::ios::binary);
    if (!in) {
      std::cerr << "cannot read " << script_path << "\n";
      return finish(session, out_path, 2);
    }
    std::ostringstream text;
    text << in.rdbuf();
    status = mvck_session_run_script(session, text.str().c_str());
    if (status != MVCK_OK) {
      std::cerr << "script failed: " << mvck_session_last_error(session) << "\n";
      return finish(session, out_path, exit_code_for(status));
    }
    print_drained(session);
    char* findings = nullptr;
    if (mvck_session_conformance(session, &findings) == MVCK_OK && findings != nullptr) {
      if (findings[0] != '\0') {
        std::cerr << "conformance findings:\n" << findings;
        mvck_free(findings);
        return finish(session, out_path, 1);
      }
      mvck_free(findings);
    }
    return finish(session, out_path, 0);
  }

  // Interactive: read gesture lines until EOF; "tick n" advances the clock.
  std::string line;
  while (std::getline(std::cin, line)) {
    status = mvck_session_feed(session, line.c_str());
    if (status == MVCK_PARSE_ERROR) {
      std::cerr << "? " << mvck_session_last_error(session) << "\n";
    } else if (status == MVCK_UNKNOWN_GESTURE) {
      std::cerr << "? gesture refused\n";
    }
    print_drained(session);
  }
  return finish(session, out_path, 0);
}
