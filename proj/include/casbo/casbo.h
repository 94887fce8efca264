/* C interface to the casbo sequential black-box optimization library.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Every fallible call returns a casbo_status; on failure a human-readable
 * message for the calling thread is available from casbo_last_error().
 * Step indices are 0-based. Vectors and matrices are passed as flat double
 * arrays: trajectories are K blocks of d values (x_1 first), matrices are
 * row-major.
 */
#ifndef CASBO_CASBO_H
#define CASBO_CASBO_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(CASBO_BUILDING_LIBRARY)
#    define CASBO_API __declspec(dllexport)
#  else
#    define CASBO_API __declspec(dllimport)
#  endif
#else
#  define CASBO_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum casbo_status {
    CASBO_OK = 0,
    CASBO_ERR_INVALID_ARGUMENT = 1,
    CASBO_ERR_NUMERIC = 2,
    CASBO_ERR_SINGULAR = 3,
    CASBO_ERR_STEP_SIZE = 4,
    CASBO_ERR_CONFIG = 5,
    CASBO_ERR_INVALID_SCORE = 6,
    CASBO_ERR_IO = 7,
    CASBO_ERR_INTERNAL = 99
} casbo_status;

typedef enum casbo_mode {
    CASBO_MODE_BDTG = 0,
    CASBO_MODE_CASBO = 1,
    CASBO_MODE_ES = 2
} casbo_mode;

typedef struct casbo_problem casbo_problem;
typedef struct casbo_optimizer casbo_optimizer;

typedef struct casbo_optimizer_config {
    casbo_mode mode;
    double alpha; /* BDTG step size; CASBO base alpha */
    double beta;  /* CASBO base beta; ES step size */
    double nu;    /* CASBO only */
    double sigma; /* ES only */
    double tau;   /* initial covariance scale; <= 0 selects the mode default */
    int N;
    int T;
    int record_wallclock; /* 0 writes zero timings, for byte-reproducible traces */
} casbo_optimizer_config;

typedef struct casbo_trace_record {
    int iter;
    double mean_cum_obj;
    double best_sampled_cum_obj;
    double min_eig_sigma;
    double max_eig_sigma;
    uint64_t queries;
    double wallclock_ms;
} casbo_trace_record;

typedef struct casbo_experiment_config {
    const char* problem;
    int K;
    int d;
    casbo_optimizer_config optimizer;
    int runs;
    uint64_t seed;
    int jobs;
    const char* out_dir;
    int checkpoint_every;
    int plot;
} casbo_experiment_config;

CASBO_API const char* casbo_version(void);
CASBO_API const char* casbo_status_string(casbo_status status);
/* Message of the last failed call on this thread; empty if none. */
CASBO_API const char* casbo_last_error(void);

/* Problems: "rastrigin10", "l1ellipsoid", "levy", "toy-diffusion". */
CASBO_API casbo_status casbo_problem_create(const char* name, int K, int d, uint64_t seed, casbo_problem** out);
CASBO_API casbo_status casbo_problem_dims(const casbo_problem* problem, int* K, int* d);
/* Scores one trajectory (K*d values) into scores (K values). */
CASBO_API casbo_status casbo_problem_rollout(const casbo_problem* problem, const double* trajectory,
                                             size_t trajectory_len, double* scores, size_t scores_len);
CASBO_API void casbo_problem_destroy(casbo_problem* problem);

CASBO_API void casbo_optimizer_config_default(casbo_optimizer_config* config);
/* The optimizer keeps its own reference to the problem. */
CASBO_API casbo_status casbo_optimizer_create(const casbo_problem* problem, const casbo_optimizer_config* config,
                                              uint64_t seed, casbo_optimizer** out);
CASBO_API casbo_status casbo_optimizer_initial_record(const casbo_optimizer* opt, casbo_trace_record* out);
CASBO_API casbo_status casbo_optimizer_step(casbo_optimizer* opt, casbo_trace_record* out);
CASBO_API casbo_status casbo_optimizer_mean(const casbo_optimizer* opt, double* out, size_t len);
CASBO_API casbo_status casbo_optimizer_covariance(const casbo_optimizer* opt, int k, double* out, size_t len);
CASBO_API casbo_status casbo_optimizer_save_snapshot(const casbo_optimizer* opt, const char* path);
CASBO_API casbo_status casbo_optimizer_load_snapshot(casbo_optimizer* opt, const char* path);
CASBO_API void casbo_optimizer_destroy(casbo_optimizer* opt);

CASBO_API void casbo_experiment_config_default(casbo_experiment_config* config);
/* Runs the experiment and writes its files into config->out_dir. */
CASBO_API casbo_status casbo_experiment_run(const casbo_experiment_config* config);

#ifdef __cplusplus
}
#endif

#endif /* CASBO_CASBO_H */
