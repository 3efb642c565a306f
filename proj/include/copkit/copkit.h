#ifndef COPKIT_COPKIT_H
#define COPKIT_COPKIT_H

/* C interface to the copositivity toolkit. Handles are opaque; every call
 * returns a status code and leaves a message for copkit_last_error() on
 * failure. Reports are JSON objects owned by their result handle. */

#include <stddef.h>
#include <stdint.h>

#if defined(__GNUC__)
#define COPKIT_API __attribute__((visibility("default")))
#else
#define COPKIT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum {
  COPKIT_OK = 0,
  COPKIT_E_ARGUMENT = 1, /* bad name, option or input text */
  COPKIT_E_IO = 2,
  COPKIT_E_CAP = 3,      /* an order or size cap was exceeded */
  COPKIT_E_SOLVER = 4,
  COPKIT_E_INTERNAL = 5
} copkit_status;

typedef enum {
  COPKIT_YES = 0,
  COPKIT_NO = 1,
  COPKIT_INCONCLUSIVE = 2,
  COPKIT_NONE = -1
} copkit_decision;

typedef struct copkit_input copkit_input;   /* matrix or polynomial */
typedef struct copkit_graph copkit_graph;
typedef struct copkit_result copkit_result;

typedef struct {
  double decision_tol;   /* inconclusive band around a zero margin */
  double sdp_tol;        /* solver gap and feasibility tolerance */
  double verify_tol;     /* float certificate acceptance */
  uint64_t seed;         /* solver start jitter; 0 is deterministic */
  int try_rounding;      /* nonzero: attempt exact rational certificates */
} copkit_options;

/* Thread-local message of the last failed call on this thread. */
COPKIT_API const char* copkit_last_error(void);
COPKIT_API const char* copkit_version(void);

COPKIT_API void copkit_options_default(copkit_options* opt);

/* A file path, or "catalog:NAME". */
COPKIT_API copkit_status copkit_input_load(const char* source, copkit_input** out);
/* Matrix text: "n" then n rows. */
COPKIT_API copkit_status copkit_input_parse(const char* text, copkit_input** out);
COPKIT_API void copkit_input_free(copkit_input* in);
/* 0 for a polynomial. */
COPKIT_API size_t copkit_input_order(const copkit_input* in);
COPKIT_API int copkit_input_is_polynomial(const copkit_input* in);

/* A file path, or "cycle:N", "complete:N", "path:N", "petersen". */
COPKIT_API copkit_status copkit_graph_load(const char* source, copkit_graph** out);
COPKIT_API void copkit_graph_free(copkit_graph* g);

/* cone: "c", "spn", "k1", "k", "q", "las", "sos". */
COPKIT_API copkit_status copkit_check(const copkit_input* in, const char* cone, unsigned r, const copkit_options* opt,
                           copkit_result** out);
/* hierarchy: "zeta", "theta", "lovasz" (r ignored). */
COPKIT_API copkit_status copkit_bound(const copkit_graph* g, const char* hierarchy, unsigned r, const copkit_options* opt,
                           copkit_result** out);
COPKIT_API copkit_status copkit_graph_report(const copkit_graph* g, copkit_result** out);
/* Checks the certificate in its declared mode; in may be NULL for sos
 * certificates. The decision is YES on pass, NO on failure. */
COPKIT_API copkit_status copkit_verify(const char* certificate_json, const copkit_input* in, copkit_result** out);

COPKIT_API copkit_decision copkit_result_decision(const copkit_result* r);
COPKIT_API const char* copkit_result_json(const copkit_result* r);
/* Certificate JSON for a YES from copkit_check, else NULL. */
COPKIT_API const char* copkit_result_certificate(const copkit_result* r);
COPKIT_API void copkit_result_free(copkit_result* r);

#ifdef __cplusplus
}
#endif

#endif
