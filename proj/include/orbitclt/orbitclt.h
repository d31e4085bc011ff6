#ifndef ORBITCLT_H
#define ORBITCLT_H

#include <stddef.h>
#include <stdint.h>

#if defined(ORBITCLT_BUILDING)
#define ORBITCLT_API __attribute__((visibility("default")))
#else
#define ORBITCLT_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum orbitclt_status {
    ORBITCLT_OK = 0,
    ORBITCLT_VALIDATION_FAILED = 1,
    ORBITCLT_PARSE_ERROR = 2,
    ORBITCLT_BUDGET_EXCEEDED = 3,
    ORBITCLT_INVALID_ARGUMENT = 4,
    ORBITCLT_INTERNAL_ERROR = 5
} orbitclt_status;

typedef struct orbitclt_system orbitclt_system;
typedef struct orbitclt_result orbitclt_result;

typedef struct orbitclt_run_options {
    int has_seed;
    uint64_t seed;
    unsigned workers;     /* 0: hardware concurrency */
    int emit_plot_data;
    const char* base_dir; /* relative system paths resolve here; NULL for "." */
} orbitclt_run_options;

ORBITCLT_API const char* orbitclt_version(void);

/* Message of the last failed call on this thread ("" if none). */
ORBITCLT_API const char* orbitclt_last_error(void);

ORBITCLT_API orbitclt_status orbitclt_system_from_json(const char* json, orbitclt_system** out);
ORBITCLT_API orbitclt_status orbitclt_system_golden_mean(orbitclt_system** out);
ORBITCLT_API orbitclt_status orbitclt_system_full_shift(unsigned symbols, orbitclt_system** out);
ORBITCLT_API void orbitclt_system_free(orbitclt_system* system);
ORBITCLT_API size_t orbitclt_system_symbols(const orbitclt_system* system);

/* |P_n| as a decimal string; release with orbitclt_string_free. */
ORBITCLT_API orbitclt_status orbitclt_periodic_count(const orbitclt_system* system, size_t n, char** out);
ORBITCLT_API void orbitclt_string_free(char* text);

/* Runs one configuration (see docs/config.md). On ORBITCLT_OK or
 * ORBITCLT_VALIDATION_FAILED a result handle is returned. */
ORBITCLT_API orbitclt_status orbitclt_run(const char* config_json, const orbitclt_run_options* options,
                                          orbitclt_result** out);
ORBITCLT_API const char* orbitclt_result_summary(const orbitclt_result* result);
ORBITCLT_API int orbitclt_result_passed(const orbitclt_result* result);
ORBITCLT_API size_t orbitclt_result_file_count(const orbitclt_result* result);
ORBITCLT_API const char* orbitclt_result_file_name(const orbitclt_result* result, size_t index);
ORBITCLT_API const char* orbitclt_result_file_content(const orbitclt_result* result, size_t index);
ORBITCLT_API void orbitclt_result_free(orbitclt_result* result);

#ifdef __cplusplus
}
#endif

#endif
