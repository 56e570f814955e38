#include "obsdual/errors.hpp"

namespace obsdual {

const char* errc_name(errc code) {
  switch (code) {
    case errc::invalid_argument: return "InvalidArgument";
    case errc::non_convex_profile: return "NonConvexProfile";
    case errc::domain_exceeded: return "DomainExceeded";
    case errc::missing_minorant: return "MissingMinorant";
    case errc::search_horizon_exceeded: return "SearchHorizonExceeded";
    case errc::discontinuity_at_join: return "DiscontinuityAtJoin";
    case errc::quadrature_failure: return "QuadratureFailure";
    case errc::monotonicity_violation: return "MonotonicityViolation";
    case errc::max_iter_exceeded: return "MaxIterExceeded";
    case errc::infeasible_instance: return "InfeasibleInstance";
    case errc::s_minus_violation: return "SMinusViolation";
    case errc::infeasible_trial: return "InfeasibleTrial";
    case errc::height_out_of_range: return "HeightOutOfRange";
    case errc::t_max_too_small: return "TMaxTooSmall";
    case errc::config_error: return "ConfigError";
    case errc::io_error: return "IoError";
    case errc::internal: return "InternalError";
  }
  return "UnknownError";
}

} // namespace obsdual
