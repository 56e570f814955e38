#pragma once

#include <stdexcept>
#include <string>

namespace obsdual {

/// Failure categories surfaced across the library and mapped onto the C API.
enum class errc {
  invalid_argument,
  non_convex_profile,      ///< sampled slope of a profile decreases
  domain_exceeded,         ///< slope beyond a Lipschitz profile's cap
  missing_minorant,        ///< operation needs theta but the Lagrangian has none
  search_horizon_exceeded, ///< bracketing walked past the maximum radius
  discontinuity_at_join,   ///< truncation pieces fail to meet at r_k
  quadrature_failure,      ///< mollified values escape the Lipschitz sandwich
  monotonicity_violation,  ///< ladder levels out of order at some sample
  max_iter_exceeded,
  infeasible_instance,     ///< obstacle above the boundary datum: empty feasible set
  s_minus_violation,       ///< dual field has a negative interior weight
  infeasible_trial,        ///< variational-inequality trial leaves the feasible set
  height_out_of_range,     ///< membrane reference needs 0 < height < 1
  t_max_too_small,         ///< dense-grid conjugate argmax hit the grid edge
  config_error,
  io_error,
  internal,
};

const char* errc_name(errc code);

class Error : public std::runtime_error {
public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const { return code_; }

private:
  errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& what) { throw Error(code, what); }

} // namespace obsdual
