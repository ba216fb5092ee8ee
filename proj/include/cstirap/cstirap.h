#ifndef CSTIRAP_H
#define CSTIRAP_H

/* C interface to the cstirap simulator. Every function returning
 * cstirap_status sets a thread-local message readable with
 * cstirap_last_error() when it fails. Objects are opaque and owned by the
 * caller once created; release them with the matching destroy function. */

#include <stddef.h>

#if defined(_WIN32)
#if defined(CSTIRAP_BUILDING)
#define CSTIRAP_API __declspec(dllexport)
#else
#define CSTIRAP_API __declspec(dllimport)
#endif
#else
#define CSTIRAP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cstirap_status {
  CSTIRAP_OK = 0,
  CSTIRAP_E_INVALID_ARGUMENT = 1,
  CSTIRAP_E_PARSE = 2,
  CSTIRAP_E_NO_CROSSING = 3,
  CSTIRAP_E_INTEGRATION = 4,
  CSTIRAP_E_DEGENERATE = 5,
  CSTIRAP_E_UNBRACKETED = 6,
  CSTIRAP_E_IO = 7,
  CSTIRAP_E_INTERNAL = 8
} cstirap_status;

typedef struct cstirap_config cstirap_config;
typedef struct cstirap_result cstirap_result;

CSTIRAP_API const char* cstirap_version(void);
CSTIRAP_API const char* cstirap_status_name(cstirap_status s);
/* Message of the last failure on this thread; empty if none. */
CSTIRAP_API const char* cstirap_last_error(void);

/* Configuration with every key at its default. */
CSTIRAP_API cstirap_status cstirap_config_create(cstirap_config** out);
CSTIRAP_API cstirap_status cstirap_config_parse(const char* text, cstirap_config** out);
CSTIRAP_API cstirap_status cstirap_config_load(const char* path, cstirap_config** out);
CSTIRAP_API void cstirap_config_destroy(cstirap_config* cfg);

/* key is "section.name", e.g. "protocol.kappa". */
CSTIRAP_API cstirap_status cstirap_config_set(cstirap_config* cfg, const char* key, const char* value);
/* Writes the value into buf (NUL terminated) and the required size,
 * including the terminator, into *needed. buf may be NULL when size is 0. */
CSTIRAP_API cstirap_status cstirap_config_get(const cstirap_config* cfg, const char* key, char* buf, size_t size,
                                              size_t* needed);
/* INI text that parses back to an equal configuration. Free with cstirap_string_free. */
CSTIRAP_API cstirap_status cstirap_config_dump(const cstirap_config* cfg, char** text);
CSTIRAP_API cstirap_status cstirap_config_validate(const cstirap_config* cfg);
/* "dual" applies the always-on-pump transform, "flip" negates the ideal detunings. */
CSTIRAP_API cstirap_status cstirap_config_transform(cstirap_config* cfg, const char* which);
CSTIRAP_API int cstirap_config_equal(const cstirap_config* a, const cstirap_config* b);

CSTIRAP_API void cstirap_string_free(char* s);

/* Runs simulate | spectrum | sweep | noise | linewidth | crossing. On
 * CSTIRAP_OK and on CSTIRAP_E_UNBRACKETED *out holds a result; otherwise
 * *out is NULL. */
CSTIRAP_API cstirap_status cstirap_run(const cstirap_config* cfg, const char* command, cstirap_result** out);
CSTIRAP_API void cstirap_result_destroy(cstirap_result* r);

CSTIRAP_API size_t cstirap_result_rows(const cstirap_result* r);
CSTIRAP_API size_t cstirap_result_columns(const cstirap_result* r);
/* NULL when j is out of range. */
CSTIRAP_API const char* cstirap_result_column_name(const cstirap_result* r, size_t j);
/* NaN when out of range. */
CSTIRAP_API double cstirap_result_value(const cstirap_result* r, size_t row, size_t column);
/* CSV text owned by the result. */
CSTIRAP_API const char* cstirap_result_csv(const cstirap_result* r);
/* Diagnostic for inconclusive or partially failed runs; empty otherwise. */
CSTIRAP_API const char* cstirap_result_note(const cstirap_result* r);

CSTIRAP_API cstirap_status cstirap_p2_figure_of_merit(double kappa, double kappa_delta, double* out);
CSTIRAP_API cstirap_status cstirap_find_crossings(const cstirap_config* cfg, double* t_minus, double* t_plus);

#ifdef __cplusplus
}
#endif

#endif
