#include "mvck.h"

#include <cstring>
#include <memory>
#include <sstream>
#include <string>

#include "mvck/demos.hpp"

struct mvck_session {
  std::unique_ptr<mvck::DemoSession> inner;
  std::string last_error;
};

namespace {

char* copy_out(const std::string& text) {
  char* buf = static_cast<char*>(std::malloc(text.size() + 1));
  if (buf != nullptr) std::memcpy(buf, text.c_str(), text.size() + 1);
  return buf;
}

mvck_status status_for_current_exception(mvck_session* session) {
  try {
    throw;
  } catch (const mvck::ParseError& e) {
    if (session != nullptr) session->last_error = e.what();
    return MVCK_PARSE_ERROR;
  } catch (const mvck::ExpectationFailed& e) {
    if (session != nullptr) session->last_error = e.what();
    return MVCK_EXPECTATION_FAILED;
  } catch (const mvck::WiringError& e) {
    if (session != nullptr) session->last_error = e.what();
    return MVCK_WIRING_ERROR;
  } catch (const mvck::SchemaError& e) {
    if (session != nullptr) session->last_error = e.what();
    return MVCK_WIRING_ERROR;
  } catch (const std::invalid_argument& e) {
    if (session != nullptr) session->last_error = e.what();
    return MVCK_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    if (session != nullptr) session->last_error = e.what();
    return MVCK_ERROR;
  }
}

}  // namespace

const char* mvck_version(void) { return "1.0.0"; }

int32_t mvck_demo_count(void) {
  return static_cast<int32_t>(mvck::demo_registry().size());
}

mvck_status mvck_demo_info(int32_t index, const char** name, const char** summary) {
  const auto& registry = mvck::demo_registry();
  if (index < 0 || static_cast<std::size_t>(index) >= registry.size()) {
    return MVCK_INVALID_ARGUMENT;
  }
  if (name != nullptr) *name = registry[static_cast<std::size_t>(index)].name.c_str();
  if (summary != nullptr) *summary = registry[static_cast<std::size_t>(index)].summary.c_str();
  return MVCK_OK;
}

mvck_status mvck_session_open(const mvck_config* config, mvck_session** out_session) {
  if (config == nullptr || config->demo == nullptr || out_session == nullptr) {
    return MVCK_INVALID_ARGUMENT;
  }
  auto session = std::make_unique<mvck_session>();
  try {
    mvck::DemoOptions options;
    if (config->has_seed != 0) options.seed = config->seed;
    if (config->has_latency != 0) options.latency = config->latency_ticks;
    if (config->has_fault_rate != 0) options.fault_rate = config->fault_rate;
    session->inner = std::make_unique<mvck::DemoSession>(config->demo, options);
  } catch (...) {
    return status_for_current_exception(session.get());
  }
  *out_session = session.release();
  return MVCK_OK;
}

void mvck_session_close(mvck_session* session) { delete session; }

mvck_status mvck_session_feed(mvck_session* session, const char* line) {
  if (session == nullptr || line == nullptr) return MVCK_INVALID_ARGUMENT;
  try {
    const mvck::DispatchResult result = session->inner->feed_line(line);
    if (result.status == mvck::DispatchStatus::UnknownGesture) {
      session->last_error = "gesture refused; state unchanged";
      return MVCK_UNKNOWN_GESTURE;
    }
    return MVCK_OK;
  } catch (...) {
    return status_for_current_exception(session);
  }
}

mvck_status mvck_session_run_script(mvck_session* session, const char* text) {
  if (session == nullptr || text == nullptr) return MVCK_INVALID_ARGUMENT;
  try {
    session->inner->run_script(text);
    return MVCK_OK;
  } catch (...) {
    return status_for_current_exception(session);
  }
}

mvck_status mvck_session_drain_renders(mvck_session* session, char** out_text) {
  if (session == nullptr || out_text == nullptr) return MVCK_INVALID_ARGUMENT;
  std::ostringstream out;
  for (const std::string& line : session->inner->drain_renders()) out << line << '\n';
  *out_text = copy_out(out.str());
  return *out_text != nullptr ? MVCK_OK : MVCK_ERROR;
}

mvck_status mvck_session_transcript(mvck_session* session, char** out_text) {
  if (session == nullptr || out_text == nullptr) return MVCK_INVALID_ARGUMENT;
  *out_text = copy_out(session->inner->transcript().text());
  return *out_text != nullptr ? MVCK_OK : MVCK_ERROR;
}

mvck_status mvck_session_conformance(mvck_session* session, char** out_text) {
  if (session == nullptr || out_text == nullptr) return MVCK_INVALID_ARGUMENT;
  std::ostringstream out;
  for (const std::string& line : session->inner->conformance()) out << line << '\n';
  *out_text = copy_out(out.str());
  return *out_text != nullptr ? MVCK_OK : MVCK_ERROR;
}

const char* mvck_session_last_error(const mvck_session* session) {
  return session == nullptr ? "" : session->last_error.c_str();
}

void mvck_free(char* buffer) { std::free(buffer); }
