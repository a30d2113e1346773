/* C interface to the MVC pattern kit. The core is C++; this header is the
 * stable boundary for tools and foreign-language callers. Sessions are opaque
 * handles; every call reports a status code and keeps a per-session error
 * string for details. */

#ifndef MVCK_H
#define MVCK_H

#include <stdint.h>

#if defined(_WIN32)
#  if defined(MVCK_BUILD)
#    define MVCK_API __declspec(dllexport)
#  else
#    define MVCK_API __declspec(dllimport)
#  endif
#else
#  define MVCK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum mvck_status {
  MVCK_OK = 0,
  MVCK_ERROR = 1,              /* unspecified failure; see last_error */
  MVCK_PARSE_ERROR = 2,        /* scenario or gesture line did not parse */
  MVCK_EXPECTATION_FAILED = 3, /* scripted expectation did not match */
  MVCK_WIRING_ERROR = 4,       /* triad spec violates a pattern rule */
  MVCK_INVALID_ARGUMENT = 5,
  MVCK_UNKNOWN_GESTURE = 6 /* gesture refused; state unchanged */
} mvck_status;

typedef struct mvck_session mvck_session;

typedef struct mvck_config {
  const char* demo;      /* masked | form | sheet | pager | refdata */
  uint64_t seed;         /* used when has_seed != 0 */
  int has_seed;
  int64_t latency_ticks; /* used when has_latency != 0 */
  int has_latency;
  double fault_rate;     /* used when has_fault_rate != 0; in [0, 1] */
  int has_fault_rate;
} mvck_config;

MVCK_API const char* mvck_version(void);

MVCK_API int32_t mvck_demo_count(void);
/* Borrowed pointers into static storage; valid for the process lifetime. */
MVCK_API mvck_status mvck_demo_info(int32_t index, const char** name, const char** summary);

MVCK_API mvck_status mvck_session_open(const mvck_config* config, mvck_session** out_session);
MVCK_API void mvck_session_close(mvck_session* session);

/* One interactive line: a gesture ("key 3", "edit A1 =()", "command open",
 * "focus field"), "tick <n>", a comment or a blank line. */
MVCK_API mvck_status mvck_session_feed(mvck_session* session, const char* line);

/* Full scenario file contents (JSON-lines records). */
MVCK_API mvck_status mvck_session_run_script(mvck_session* session, const char* text);

/* Render deliveries since the previous drain, newline-separated. The returned
 * buffer is owned by the caller; release with mvck_free. */
MVCK_API mvck_status mvck_session_drain_renders(mvck_session* session, char** out_text);

/* Full bus transcript: "tick seq source->target verb payload" per line. */
MVCK_API mvck_status mvck_session_transcript(mvck_session* session, char** out_text);

/* Pattern-conformance findings for the session's demo; empty text means the
 * run conforms. */
MVCK_API mvck_status mvck_session_conformance(mvck_session* session, char** out_text);

/* Borrowed; valid until the next call on the same session. */
MVCK_API const char* mvck_session_last_error(const mvck_session* session);

MVCK_API void mvck_free(char* buffer);

#ifdef __cplusplus
}
#endif

#endif /* MVCK_H */
