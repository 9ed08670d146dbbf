#pragma once
#include "riskmarket/types.hpp"

namespace riskmarket {

/// Result of a numeric sup-oracle. When `converged` is false the search hit
/// its iteration cap before passing the stationarity test; `value` still
/// holds the best point found.
struct OracleResult {
    double value = 0.0;
    Vector argmax;
    bool converged = false;
};

} // namespace riskmarket
