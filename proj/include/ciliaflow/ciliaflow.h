/* ciliaflow C API: magnetic artificial cilium simulation and field-angle
 * optimal control.
 *
 * All functions are safe to call from multiple threads on distinct handles.
 * On failure a function returns a non-zero cf_status and cf_last_error()
 * describes the failure for the calling thread. Arrays are flattened bead
 * coordinates (y1, z1, y2, z2, ...) in metres; angles are in radians.
 */
#ifndef CILIAFLOW_H
#define CILIAFLOW_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define CF_API __declspec(dllexport)
#else
#define CF_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum cf_status {
  CF_OK = 0,
  CF_ERR_VALIDATION = 1, /* bad parameter value */
  CF_ERR_PARSE = 2,      /* malformed config text */
  CF_ERR_IO = 3,
  CF_ERR_NUMERICAL = 4, /* blow-up, coincident beads, line search failure, ... */
  CF_ERR_ARGUMENT = 5,  /* null pointer, index out of range, small buffer */
  CF_ERR_INTERNAL = 6
} cf_status;

/* Process exit codes returned by the cf_cmd_* functions. */
#define CF_EXIT_SUCCESS 0
#define CF_EXIT_VALIDATION 1
#define CF_EXIT_NUMERICAL 2

typedef struct cf_config cf_config;
typedef struct cf_trajectory cf_trajectory;
typedef struct cf_report cf_report;

CF_API const char* cf_version(void);

/* Message for the last failed call on this thread ("" when none). */
CF_API const char* cf_last_error(void);

/* ---- configuration ---------------------------------------------------- */

/* Defaults: reference physical constants, N_t = 2000, N_u = 64. */
CF_API cf_status cf_config_new(cf_config** out);
CF_API cf_status cf_config_load(const char* path, cf_config** out);
CF_API cf_status cf_config_parse(const char* text, cf_config** out);
CF_API void cf_config_free(cf_config* config);

/* Sets one dotted key (e.g. "grid.N_t", "physics.B_field"). The value is
 * not cross-validated until cf_config_validate or a command runs. */
CF_API cf_status cf_config_set(cf_config* config, const char* key, const char* value);
CF_API cf_status cf_config_validate(const cf_config* config);

/* Canonical text form. Writes at most capacity bytes including the
 * terminator; *required receives the full size including the terminator.
 * Passing buffer = NULL and capacity = 0 queries the size. */
CF_API cf_status cf_config_save(const cf_config* config, char* buffer, size_t capacity, size_t* required);

/* Reads a numeric setting such as "physics.eta" or "grid.N_t". */
CF_API cf_status cf_config_get_number(const cf_config* config, const char* key, double* value);

/* ---- commands (write into output.dir, print to stdout/stderr) --------- */

CF_API int cf_cmd_simulate(const cf_config* config);
CF_API int cf_cmd_optimize(const cf_config* config);
CF_API int cf_cmd_gradcheck(const cf_config* config);
CF_API int cf_cmd_sweep(const cf_config* config);

/* ---- model evaluation ------------------------------------------------- */

/* Total energy (J) and total force (N, 2n entries) of a chain of
 * config's n beads at field angle phi. */
CF_API cf_status cf_total_energy(const cf_config* config, const double* coords, double phi, double* energy);
CF_API cf_status cf_total_force(const cf_config* config, const double* coords, double phi, double* force);

/* Forward solve of the config's initial control from the rest chain. */
CF_API cf_status cf_simulate(const cf_config* config, cf_trajectory** out);
CF_API void cf_trajectory_free(cf_trajectory* trajectory);
CF_API size_t cf_trajectory_nodes(const cf_trajectory* trajectory);
CF_API size_t cf_trajectory_beads(const cf_trajectory* trajectory);
CF_API cf_status cf_trajectory_time(const cf_trajectory* trajectory, size_t node, double* t);
/* Copies 2n coordinates of the given node into coords. */
CF_API cf_status cf_trajectory_state(const cf_trajectory* trajectory, size_t node, double* coords);
CF_API cf_status cf_trajectory_energy(const cf_trajectory* trajectory, size_t node, double* energy);
/* Pumping in N m (raw) and m^3/s (flow = raw / eta). Either may be NULL. */
CF_API cf_status cf_trajectory_pumping(const cf_trajectory* trajectory, double* raw, double* flow);

/* Objective J = -pumping_flow for explicit knots spread uniformly over the
 * config's horizon, and optionally its adjoint gradient (count entries). */
CF_API cf_status cf_objective(const cf_config* config, const double* knots, size_t count, double* objective,
                              double* gradient);

/* Runs the optimizer from the config's initial control. */
CF_API cf_status cf_optimize(const cf_config* config, cf_report** out);
CF_API void cf_report_free(cf_report* report);
CF_API size_t cf_report_iterations(const cf_report* report);
/* Termination reason: "gradient_tolerance", "max_iterations",
 * "line_search_failure" or "numerical_failure". */
CF_API const char* cf_report_termination(const cf_report* report);
CF_API cf_status cf_report_iteration(const cf_report* report, size_t k, double* objective, double* pumping_raw,
                                     double* grad_norm);
/* Knots of iterate k; count receives the number of knots when knots is NULL. */
CF_API cf_status cf_report_control(const cf_report* report, size_t k, double* knots, size_t* count);

#ifdef __cplusplus
}
#endif

#endif /* CILIAFLOW_H */
