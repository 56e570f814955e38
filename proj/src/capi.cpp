#include "obsdual.h"

#include <new>
#include <string>

#include "obsdual/config.hpp"
#include "obsdual/conjugate.hpp"
#include "obsdual/errors.hpp"
#include "obsdual/lagrangian.hpp"
#include "obsdual/runner.hpp"
#include "obsdual/version.hpp"

using namespace obsdual;

struct od_config {
  RunConfig cfg;
};

struct od_lagrangian {
  RadialLagrangian L;
  ConjugateTable C;
};

struct od_run {
  RunOutcome outcome;
};

namespace {

thread_local std::string g_last_error;

od_status map_code(errc c) {
  switch (c) {
    case errc::invalid_argument: return OD_EINVAL;
    case errc::non_convex_profile: return OD_ENONCONVEX;
    case errc::domain_exceeded: return OD_EDOMAIN;
    case errc::missing_minorant: return OD_EMINORANT;
    case errc::search_horizon_exceeded: return OD_EHORIZON;
    case errc::discontinuity_at_join: return OD_EJOIN;
    case errc::quadrature_failure: return OD_EQUAD;
    case errc::monotonicity_violation: return OD_EMONOTONE;
    case errc::max_iter_exceeded: return OD_EMAXITER;
    case errc::infeasible_instance: return OD_EINFEASIBLE;
    case errc::s_minus_violation: return OD_ESMINUS;
    case errc::infeasible_trial: return OD_ETRIAL;
    case errc::height_out_of_range: return OD_EHEIGHT;
    case errc::t_max_too_small: return OD_ETMAX;
    case errc::config_error: return OD_ECONFIG;
    case errc::io_error: return OD_EIO;
    case errc::internal: return OD_EINTERNAL;
  }
  return OD_EINTERNAL;
}

template <typename Fn>
od_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return OD_OK;
  } catch (const Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return OD_EINTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return OD_EINTERNAL;
  }
}

od_status einval(const char* msg) {
  g_last_error = msg;
  return OD_EINVAL;
}

} // namespace

extern "C" {

const char* od_version(void) { return OBSDUAL_VERSION; }

const char* od_status_name(od_status status) {
  switch (status) {
    case OD_OK: return "Ok";
    case OD_EINVAL: return "InvalidArgument";
    case OD_ENONCONVEX: return "NonConvexProfile";
    case OD_EDOMAIN: return "DomainExceeded";
    case OD_EMINORANT: return "MissingMinorant";
    case OD_EHORIZON: return "SearchHorizonExceeded";
    case OD_EJOIN: return "DiscontinuityAtJoin";
    case OD_EQUAD: return "QuadratureFailure";
    case OD_EMONOTONE: return "MonotonicityViolation";
    case OD_EMAXITER: return "MaxIterExceeded";
    case OD_EINFEASIBLE: return "InfeasibleInstance";
    case OD_ESMINUS: return "SMinusViolation";
    case OD_ETRIAL: return "InfeasibleTrial";
    case OD_EHEIGHT: return "HeightOutOfRange";
    case OD_ETMAX: return "TMaxTooSmall";
    case OD_ECONFIG: return "ConfigError";
    case OD_EIO: return "IoError";
    case OD_EINTERNAL: return "Internal";
  }
  return "Unknown";
}

const char* od_last_error(void) { return g_last_error.c_str(); }

od_status od_config_load(const char* path, od_config** out) {
  if (!path || !out) return einval("od_config_load: null argument");
  *out = nullptr;
  return guarded([&] {
    auto* h = new od_config{parse_config_file(path)};
    *out = h;
  });
}

od_status od_config_parse(const char* text, const char* name, od_config** out) {
  if (!text || !out) return einval("od_config_parse: null argument");
  *out = nullptr;
  return guarded([&] {
    auto* h = new od_config{parse_config_text(text, name ? name : "")};
    *out = h;
  });
}

od_status od_config_set(od_config* cfg, const char* dotted_key, const char* value) {
  if (!cfg || !dotted_key || !value) return einval("od_config_set: null argument");
  return guarded([&] { apply_override(cfg->cfg, dotted_key, value); });
}

void od_config_free(od_config* cfg) { delete cfg; }

od_status od_lagrangian_create(const char* profile, const char* minorant,
                               od_lagrangian** out) {
  if (!profile || !out) return einval("od_lagrangian_create: null argument");
  *out = nullptr;
  return guarded([&] {
    RadialLagrangian L = parse_lagrangian(profile, minorant ? minorant : "default");
    auto* h = new od_lagrangian{L, ConjugateTable{L}};
    *out = h;
  });
}

od_status od_lagrangian_value(const od_lagrangian* L, double t, double* out) {
  if (!L || !out) return einval("od_lagrangian_value: null argument");
  return guarded([&] { *out = L->L.value(t); });
}

od_status od_lagrangian_slope(const od_lagrangian* L, double t, double* out) {
  if (!L || !out) return einval("od_lagrangian_slope: null argument");
  return guarded([&] { *out = L->L.slope(t); });
}

od_status od_lagrangian_conjugate(const od_lagrangian* L, double s, double* out) {
  if (!L || !out) return einval("od_lagrangian_conjugate: null argument");
  return guarded([&] { *out = L->C.eval(s); });
}

od_status od_lagrangian_fenchel_gap(const od_lagrangian* L, const double* xi,
                                    const double* z, int dim, double* out) {
  if (!L || !xi || !z || !out) return einval("od_lagrangian_fenchel_gap: null argument");
  if (dim != 1 && dim != 2) return einval("od_lagrangian_fenchel_gap: dim must be 1 or 2");
  return guarded([&] {
    *out = fenchel_gap(L->L, L->C, std::span<const double>(xi, dim),
                       std::span<const double>(z, dim));
  });
}

void od_lagrangian_free(od_lagrangian* L) { delete L; }

od_status od_run_solve(const od_config* cfg, od_run** out) {
  if (!cfg || !out) return einval("od_run_solve: null argument");
  *out = nullptr;
  return guarded([&] { *out = new od_run{run_solve(cfg->cfg)}; });
}

od_status od_run_verify(const od_config* cfg, od_run** out) {
  if (!cfg || !out) return einval("od_run_verify: null argument");
  *out = nullptr;
  return guarded([&] { *out = new od_run{run_verify(cfg->cfg)}; });
}

od_status od_run_conjugate(const od_config* cfg, od_run** out) {
  if (!cfg || !out) return einval("od_run_conjugate: null argument");
  *out = nullptr;
  return guarded([&] { *out = new od_run{run_conjugate(cfg->cfg)}; });
}

od_status od_run_ladder(const od_config* cfg, od_run** out) {
  if (!cfg || !out) return einval("od_run_ladder: null argument");
  *out = nullptr;
  return guarded([&] { *out = new od_run{run_ladder(cfg->cfg)}; });
}

od_status od_run_sweep(const od_config* cfg, od_run** out) {
  if (!cfg || !out) return einval("od_run_sweep: null argument");
  *out = nullptr;
  return guarded([&] { *out = new od_run{run_sweep(cfg->cfg)}; });
}

int od_run_exit_code(const od_run* run) { return run ? run->outcome.exit_code : 2; }

const char* od_run_summary(const od_run* run) {
  return run ? run->outcome.summary.c_str() : "";
}

const char* od_run_report_json(const od_run* run) {
  return run ? run->outcome.report_json.c_str() : "";
}

void od_run_free(od_run* run) { delete run; }

} // extern "C"
