/* C interface to the singsurf library. All handles are opaque; every call
 * that can fail returns a singsurf_status and leaves a message retrievable
 * with singsurf_last_error() on the calling thread. */
#ifndef SINGSURF_H
#define SINGSURF_H

#include <stddef.h>

#if defined(_WIN32)
#define SINGSURF_API __declspec(dllexport)
#else
#define SINGSURF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum singsurf_status {
  SINGSURF_OK = 0,
  SINGSURF_ERR_USAGE = 1,     /* bad arguments to a call */
  SINGSURF_ERR_CONFIG = 2,    /* invalid configuration or parameter domain */
  SINGSURF_ERR_NUMERICAL = 3, /* solver failure, breakdown, quadrature budget */
  SINGSURF_ERR_IO = 4,        /* file system */
  SINGSURF_ERR_INTERNAL = 5
} singsurf_status;

typedef struct singsurf_config singsurf_config;
typedef struct singsurf_result singsurf_result;

SINGSURF_API const char* singsurf_version(void);
/* Message of the last failed call on this thread; "" when none. */
SINGSURF_API const char* singsurf_last_error(void);

/* Flat key = value configuration. Later assignments win. */
SINGSURF_API singsurf_status singsurf_config_create(singsurf_config** out);
SINGSURF_API void singsurf_config_destroy(singsurf_config* cfg);
SINGSURF_API singsurf_status singsurf_config_set(singsurf_config* cfg, const char* key, const char* value);
/* Merges a config file into cfg; values from the file replace existing ones. */
SINGSURF_API singsurf_status singsurf_config_load(singsurf_config* cfg, const char* path);
/* Copies the value into buf (NUL-terminated). *needed receives the length
 * without the terminator; SINGSURF_ERR_USAGE when the key is absent or buf
 * is too small. */
SINGSURF_API singsurf_status singsurf_config_get(const singsurf_config* cfg, const char* key, char* buf,
                                                 size_t size, size_t* needed);

/* Runs the experiment named by the "experiment" key, writing into out_dir.
 * *out is set whenever files were produced, also on failure, and must be
 * released with singsurf_result_destroy. */
SINGSURF_API singsurf_status singsurf_run(const singsurf_config* cfg, const char* out_dir, singsurf_result** out);

/* Difference of two profile CSVs over a region (all, range:LO:HI,
 * behind:FRONT:CELLS, ahead:FRONT:CELLS). column may be NULL for the
 * second column. The one-line report is the result summary. */
SINGSURF_API singsurf_status singsurf_compare(const char* file_a, const char* file_b, const char* region,
                                              const char* column, singsurf_result** out);

SINGSURF_API const char* singsurf_result_summary(const singsurf_result* r);
SINGSURF_API const char* singsurf_result_manifest(const singsurf_result* r); /* "" when none */
SINGSURF_API size_t singsurf_result_file_count(const singsurf_result* r);
SINGSURF_API const char* singsurf_result_file(const singsurf_result* r, size_t index);
/* Comparison figures; zero for runs. */
SINGSURF_API double singsurf_result_max_abs(const singsurf_result* r);
SINGSURF_API double singsurf_result_mean_abs(const singsurf_result* r);
SINGSURF_API void singsurf_result_destroy(singsurf_result* r);

/* Critical values of the acceleration-wave problem. */
SINGSURF_API singsurf_status singsurf_lwe_critical(double gamma, double epsilon, double* alpha_bullet,
                                                   double* epsilon_bullet);

#ifdef __cplusplus
}
#endif

#endif /* SINGSURF_H */
