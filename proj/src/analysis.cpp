#include "volterra/analysis.hpp"

#include <cmath>

namespace volterra {

int auto_grr_p(double alpha, double kappa, double zeta) {
    if (!(kappa < alpha)) throw ParameterError("kappa must lie below alpha");
    double threshold = 1.0 / (alpha - kappa);
    if (zeta > 0.0) threshold = std::max(threshold, 1.0 / zeta);
    // 1/(alpha - kappa) lands a few ulps above an integer for decimal inputs;
    // snap before the ceiling so the +1 is not applied twice.
    const double snapped = std::round(threshold);
    if (std::abs(threshold - snapped) < 1e-9 * std::max(1.0, snapped)) threshold = snapped;
    return static_cast<int>(std::ceil(threshold)) + 1;
}

}  // namespace volterra
