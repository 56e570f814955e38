/* Obstacle-problem solver and duality certifier: C interface.
 *
 * All entry points return od_status; OD_OK means the call succeeded and any
 * output pointers were filled. On failure, od_last_error() returns a
 * thread-local message describing what went wrong. Handles are opaque and
 * freed with the matching *_free call; freeing NULL is a no-op.
 */
#ifndef OBSDUAL_H
#define OBSDUAL_H

#ifdef __cplusplus
extern "C" {
#endif

typedef enum od_status {
  OD_OK = 0,
  OD_EINVAL = 1,      /* bad argument */
  OD_ENONCONVEX = 2,  /* profile failed convexity validation */
  OD_EDOMAIN = 3,     /* conjugate evaluated outside its finite domain */
  OD_EMINORANT = 4,   /* ladder requested without a superlinear minorant */
  OD_EHORIZON = 5,    /* bracketing search exceeded its horizon */
  OD_EJOIN = 6,       /* ladder pieces failed to join continuously */
  OD_EQUAD = 7,       /* mollification quadrature failed its spot checks */
  OD_EMONOTONE = 8,   /* ladder ordering violated */
  OD_EMAXITER = 9,    /* iteration limit hit */
  OD_EINFEASIBLE = 10,/* instance has empty feasible set */
  OD_ESMINUS = 11,    /* dual candidate failed the sign test on weights */
  OD_ETRIAL = 12,     /* infeasible trial direction */
  OD_EHEIGHT = 13,    /* membrane obstacle height out of (0,1) */
  OD_ETMAX = 14,      /* oracle grid too short for the conjugate argmax */
  OD_ECONFIG = 15,    /* configuration parse or semantic error */
  OD_EIO = 16,        /* file I/O failure */
  OD_EINTERNAL = 17   /* unexpected internal failure */
} od_status;

const char* od_version(void);
const char* od_status_name(od_status status);

/* Message for the most recent failing call on this thread ("" if none). */
const char* od_last_error(void);

/* ---- run configuration ------------------------------------------------- */

typedef struct od_config od_config;

od_status od_config_load(const char* path, od_config** out);
od_status od_config_parse(const char* text, const char* name, od_config** out);

/* Override one entry, e.g. od_config_set(cfg, "output.dir", "run1"). */
od_status od_config_set(od_config* cfg, const char* dotted_key, const char* value);
void od_config_free(od_config* cfg);

/* ---- convex profiles ---------------------------------------------------- */

typedef struct od_lagrangian od_lagrangian;

/* profile: "power:{alpha}", "cosh", "xlogx_shifted", "custom:{csv path}".
 * minorant: "default", "none", or "power:{alpha}[:{coef}]". */
od_status od_lagrangian_create(const char* profile, const char* minorant,
                               od_lagrangian** out);
od_status od_lagrangian_value(const od_lagrangian* L, double t, double* out);
od_status od_lagrangian_slope(const od_lagrangian* L, double t, double* out);

/* Fenchel conjugate of the radial profile; +inf is a valid result for
 * Lipschitz profiles queried beyond their slope cap. */
od_status od_lagrangian_conjugate(const od_lagrangian* L, double s, double* out);

/* F(xi) + F*(z) - <xi, z> for dim-vectors xi, z (dim 1 or 2); >= 0 always,
 * 0 exactly when z is the dual of xi. */
od_status od_lagrangian_fenchel_gap(const od_lagrangian* L, const double* xi,
                                    const double* z, int dim, double* out);
void od_lagrangian_free(od_lagrangian* L);

/* ---- runs ---------------------------------------------------------------- */

/* A run executes one subcommand against a configuration and captures the
 * process-style exit code (0 success, 1 verification failure, 2 config error,
 * 3 solver failure), a one-line summary, and the full JSON report. Output
 * files land in the configured output directory. The call itself returns
 * OD_OK whenever the run could be carried out at all, even if the run's own
 * exit code is nonzero. */
typedef struct od_run od_run;

od_status od_run_solve(const od_config* cfg, od_run** out);
od_status od_run_verify(const od_config* cfg, od_run** out);
od_status od_run_conjugate(const od_config* cfg, od_run** out);
od_status od_run_ladder(const od_config* cfg, od_run** out);
od_status od_run_sweep(const od_config* cfg, od_run** out);

int od_run_exit_code(const od_run* run);
const char* od_run_summary(const od_run* run);
const char* od_run_report_json(const od_run* run);
void od_run_free(od_run* run);

#ifdef __cplusplus
}
#endif

#endif /* OBSDUAL_H */
