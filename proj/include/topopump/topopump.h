#ifndef TOPOPUMP_TOPOPUMP_H
#define TOPOPUMP_TOPOPUMP_H

/* C interface to the topological photon pumping library.
 *
 * Every function returns a tp_status. On failure, tp_last_error() returns a message
 * for the calling thread that stays valid until that thread's next call into the library.
 * Handles are opaque and owned by the caller; release them with the matching *_free. */

#include <stddef.h>

#if defined(_WIN32)
#  if defined(TOPOPUMP_BUILDING)
#    define TP_API __declspec(dllexport)
#  else
#    define TP_API __declspec(dllimport)
#  endif
#else
#  define TP_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum tp_status {
  TP_OK = 0,
  TP_ERR_INVALID_ARGUMENT = 1,
  TP_ERR_CONFIG = 2,
  TP_ERR_NUMERICAL = 3,
  TP_ERR_DOMAIN = 4,
  TP_ERR_INTERNAL = 5
} tp_status;

TP_API const char* tp_last_error(void);
TP_API const char* tp_version(void);

/* ---- configuration ---------------------------------------------------- */

typedef struct tp_config tp_config;

/* Parses config text; resolution against the schema happens on use. */
TP_API tp_status tp_config_parse(const char* text, tp_config** out);
TP_API tp_status tp_config_load(const char* path, tp_config** out);
/* Applies "section.key=value". */
TP_API tp_status tp_config_set(tp_config* cfg, const char* assignment);
/* Writes the fully resolved config text. *needed receives the size including the
 * terminating zero; buf may be NULL to query it. */
TP_API tp_status tp_config_resolved(const tp_config* cfg, char* buf, size_t capacity, size_t* needed);
TP_API void tp_config_free(tp_config* cfg);

/* ---- pump cycles ------------------------------------------------------ */

typedef struct tp_cycle tp_cycle;

/* Cycle of a resolved config, or one of the presets "rydberg", "free_space", "waveguide". */
TP_API tp_status tp_cycle_from_config(const tp_config* cfg, tp_cycle** out);
TP_API tp_status tp_cycle_preset(const char* platform, tp_cycle** out);
TP_API void tp_cycle_free(tp_cycle* cycle);

TP_API tp_status tp_cycle_period(const tp_cycle* cycle, double* period);
TP_API tp_status tp_cycle_cell_length(const tp_cycle* cycle, double* a);

/* Infinite-chain rates at time t for p = 1..n_terms. Each array holds n_terms values. */
TP_API tp_status tp_cycle_hoppings(const tp_cycle* cycle, double t, int n_terms, double* j_prime_odd,
                                   double* j_odd, double* j_even);
TP_API tp_status tp_cycle_extended_rates(const tp_cycle* cycle, double t, int n_terms, double* jbar_prime,
                                         double* jbar);

/* Coherent and dissipative matrices of an open chain at time t, row-major n_sites x n_sites.
 * Either output may be NULL. */
TP_API tp_status tp_cycle_couplings(const tp_cycle* cycle, double t, int n_sites, double* v, double* gamma);

typedef struct tp_berry_summary {
  int chern;
  double chern_raw;
  double max_plaquette;
  double min_gap;
  double dx_uniform; /* displacement per cycle for a filled band, in units of a */
} tp_berry_summary;

/* Berry analysis of the lower band on a fixed m_t x m_k grid. w_k (m_k values, cell centers)
 * may be NULL. */
TP_API tp_status tp_cycle_berry(const tp_cycle* cycle, int m_t, int m_k, int n_terms, tp_berry_summary* out,
                                double* w_k);

/* Displacement per cycle predicted for a Gaussian packet, in units of a. */
TP_API tp_status tp_cycle_predicted_displacement(const tp_cycle* cycle, int m_t, int m_k, int n_terms, double k0,
                                                 double w_k, double* dx);

/* ---- states and dynamics ---------------------------------------------- */

typedef struct tp_state tp_state;

/* Lower-band Gaussian packet on an open chain of n_sites emitters. */
TP_API tp_status tp_state_wavepacket(const tp_cycle* cycle, int n_sites, double k0, double w_k, tp_state** out);
TP_API tp_status tp_state_copy(const tp_state* state, tp_state** out);
TP_API void tp_state_free(tp_state* state);

TP_API tp_status tp_state_size(const tp_state* state, int* n_sites);
TP_API tp_status tp_state_time(const tp_state* state, double* t);
TP_API tp_status tp_state_amplitudes(const tp_state* state, double* re, double* im);
TP_API tp_status tp_state_norm(const tp_state* state, double* norm);
TP_API tp_status tp_state_center_of_mass(const tp_state* state, double* x);

/* Propagates the state in place over n_cycles periods. dissipative != 0 adds the
 * collective decay term. */
TP_API tp_status tp_state_evolve(tp_state* state, int n_cycles, int steps_per_cycle, int dissipative);

/* Fidelity of the state against its initial packet translated by shift. */
TP_API tp_status tp_state_fidelity(const tp_state* state, double shift, double* fidelity);

/* ---- experiment runner ------------------------------------------------ */

typedef struct tp_run_options {
  const char* subcommand;        /* couplings, bands, berry, pump, decay, disorder, figure, selfcheck */
  const char* config_path;       /* may be NULL */
  const char* const* overrides;  /* "section.key=value" entries */
  int n_overrides;
  const char* out_dir;           /* may be NULL */
  int figure_id;
} tp_run_options;

typedef struct tp_run_report tp_run_report;

/* Runs one experiment. A report is produced whenever the options are well formed; its exit
 * code is 0 on success, 2 for configuration or domain errors and 3 for numerical failures. */
TP_API tp_status tp_run(const tp_run_options* options, tp_run_report** out);
TP_API int tp_run_report_exit_code(const tp_run_report* report);
TP_API const char* tp_run_report_message(const tp_run_report* report);
TP_API const char* tp_run_report_summary(const tp_run_report* report);
TP_API int tp_run_report_file_count(const tp_run_report* report);
TP_API const char* tp_run_report_file(const tp_run_report* report, int index);
TP_API void tp_run_report_free(tp_run_report* report);

#ifdef __cplusplus
}
#endif

#endif
