/*
 * dispersive: solver and stability toolkit for a time-delayed fourth-order
 * dispersive equation
 *
 *     u_t - nu u_xx + mu u_xxxx + u(x, t - tau) u_x + a(x) u = 0
 *
 * on (0, ell) with clamped ends, initial history u(x, s) = v(x, s) on
 * [-tau, 0].
 *
 * C API over the C++ core: opaque handles, integer status codes, and a
 * thread-local error message. All returned buffers are owned by the library
 * and released with the matching *_free call.
 */
#ifndef DISPERSIVE_H
#define DISPERSIVE_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum disp_status {
    DISP_OK = 0,
    DISP_ERR_CONFIG = 3,     /* invalid parameters, presets, config files */
    DISP_ERR_IO = 4,         /* unreadable/unwritable paths */
    DISP_ERR_RANGE = 5,      /* argument outside its admissible interval */
    DISP_ERR_SEQUENCE = 6,   /* non-contiguous history push */
    DISP_ERR_HYPOTHESIS = 7, /* closed form requested outside its hypotheses */
    DISP_ERR_NUMERIC = 8,    /* linear-algebra breakdown */
    DISP_ERR_INTERNAL = 9
} disp_status;

typedef enum disp_run_state {
    DISP_RUN_HEALTHY = 0,
    DISP_RUN_DIVERGED = 1,
    DISP_RUN_STEADY = 2
} disp_run_state;

typedef struct disp_config disp_config;
typedef struct disp_result disp_result;

const char* disp_version(void);

/* Message for the last failing call on this thread; never NULL. */
const char* disp_last_error(void);

/* ---- configuration ---- */

/* Figure presets fig1a..fig1d, fig2, fig3a..fig3d, fig4, fig5a..fig5d,
 * fig6, fig7a..fig7d, fig8, fig9..fig12. */
disp_status disp_config_preset(const char* name, disp_config** out);

/* Flat key=value file with [params]/[profile]/[history]/[run] sections. */
disp_status disp_config_load(const char* path, disp_config** out);

/* Dotted keys: params.nu, params.mu, params.tau, params.ell, profile,
 * history.phi, history.amplitude, n, dt, T_end, bdf_order, snapshot_every. */
disp_status disp_config_set(disp_config* cfg, const char* key, const char* value);

void disp_config_free(disp_config* cfg);

/* Newline-separated preset list; free with disp_buffer_free. */
disp_status disp_preset_names(char** out);

/* Comma-separated default sweep values for fig9..fig12, "" otherwise. */
disp_status disp_preset_sweep_defaults(const char* name, char** out);

/* ---- simulation ---- */

/* Runs to T_end. Divergence is reported through the result state, not as a
 * status code. */
disp_status disp_simulate(const disp_config* cfg, disp_result** out);

disp_run_state disp_result_state(const disp_result* res);

/* Number of recorded norm rows (steps + 1 for a full run). */
size_t disp_result_len(const disp_result* res);

/* Borrowed pointers into the result; valid until disp_result_free. Any
 * argument may be NULL. */
disp_status disp_result_norms(const disp_result* res, const double** t, const double** l2_u,
                              const double** h1_u, const double** h2_u, const double** weighted);

/* Writes norms.csv, snapshots.csv, meta.json into out_dir. */
disp_status disp_result_emit(const disp_result* res, const char* out_dir);

/* Full metadata as JSON text; free with disp_buffer_free. */
disp_status disp_result_meta(const disp_result* res, char** json_out);

void disp_result_free(disp_result* res);
void disp_buffer_free(char* buf);

/* ---- sweeps ---- */

/* axis: "tau" | "nu" | "mu" | "profile". values are parsed per axis
 * (profile takes tokens such as "1+x"). Every member is validated before
 * any run starts; results are emitted into out_dir/<axis>_<value>/.
 * worst_state (optional) receives the worst member state. */
disp_status disp_sweep(const disp_config* base, const char* axis, const char* const* values,
                       size_t n_values, const char* out_dir, int* worst_state);

/* ---- reporting and verification ---- */

/* Recomputes the stability report and decay fit from an emitted directory.
 * Returns JSON text; free with disp_buffer_free. */
disp_status disp_report(const char* dir, char** json_out);

/* Numerical verification battery (manufactured solutions, dense
 * cross-checks, eigenvalue references). Returns the pass/fail table as text
 * and the number of failing lines. */
disp_status disp_verify(int quick, char** table_out, int* n_failed);

#ifdef __cplusplus
}
#endif

#endif /* DISPERSIVE_H */
