#pragma once

#include <string>

#include "obsdual/config.hpp"

namespace obsdual {

/// Exit-code contract: 0 success, 1 verification failure, 2 configuration or
/// input error, 3 solver failure. Reports are written even on failure paths
/// whenever the output directory is usable.
struct RunOutcome {
  int exit_code = 0;
  std::string summary;
  std::string report_json;
};

RunOutcome run_solve(const RunConfig& cfg);
RunOutcome run_verify(const RunConfig& cfg);
RunOutcome run_conjugate(const RunConfig& cfg);
RunOutcome run_ladder(const RunConfig& cfg);
RunOutcome run_sweep(const RunConfig& cfg);

} // namespace obsdual
