#include "volterra/regularity.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace volterra {

RegularityParams validate_params(double alpha, double gamma, double eta, double zeta,
                                 bool require_strong) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw ParameterError("alpha must lie in (0, 1)");
    if (!(gamma >= 0.0 && gamma < 1.0))
        throw ParameterError("gamma must lie in [0, 1)");
    if (!(eta >= 0.0 && eta <= 1.0))
        throw ParameterError("eta must lie in [0, 1]");
    if (!(zeta >= 0.0 && zeta <= 1.0))
        throw ParameterError("zeta must lie in [0, 1]");
    const double rho = alpha - gamma;
    if (!(rho > 0.0))
        throw ParameterError("rho = alpha - gamma must be positive");
    if (zeta > std::min(rho, eta))
        throw ParameterError("zeta must not exceed min(rho, eta)");
    const bool strong = eta > 1.0 - alpha;
    if (require_strong && !strong)
        throw ParameterError("strong regime requires eta > 1 - alpha");
    return RegularityParams{alpha, gamma, eta, zeta, strong};
}

RegularityParams validate_params(const RegularityParams& p) {
    return validate_params(p.alpha, p.gamma, p.eta, p.zeta, false);
}

double psi1(double alpha, double gamma, double tau, double t, double s) {
    if (!(s <= t && t <= tau))
        throw OrderingError("psi1 requires s <= t <= tau");
    const double ts = t - s;
    if (ts == 0.0)
        return 0.0;
    const double rho_branch = std::pow(ts, alpha - gamma);
    const double tt = tau - t;
    if (tt == 0.0 || gamma == 0.0)
        return rho_branch;
    const double gamma_branch = std::pow(tt, -gamma) * std::pow(ts, alpha);
    return std::min(gamma_branch, rho_branch);
}

double psi12(const RegularityParams& p, double tau, double tau_prime, double t, double s) {
    if (!(s <= t && t <= tau_prime && tau_prime <= tau))
        throw OrderingError("psi12 requires s <= t <= tau' <= tau");
    const double ts = t - s;
    if (ts == 0.0)
        return 0.0;
    const double dtau = tau - tau_prime;
    const double dpt = tau_prime - t;
    const double ez = p.eta - p.zeta;
    if (dpt == 0.0 && ez > 0.0)
        throw SingularEvaluationError("psi12 is singular at tau' = t when eta > zeta");
    double w = dtau == 0.0 ? (p.eta == 0.0 ? 1.0 : 0.0) : std::pow(dtau, p.eta);
    if (ez > 0.0)
        w *= std::pow(dpt, -ez);
    return w * psi1(p.alpha, p.gamma + p.zeta, tau_prime, t, s);
}

double psi12(double alpha, double gamma, double eta, double zeta, double tau,
             double tau_prime, double t, double s) {
    return psi12(RegularityParams{alpha, gamma, eta, zeta, false}, tau, tau_prime, t, s);
}

FamilyAN make_family(double alpha, double gamma,
                     const std::vector<std::pair<double, double>>& pairs,
                     bool require_strong) {
    if (pairs.empty())
        throw ParameterError("family needs at least one (eta, zeta) pair");
    FamilyAN fam;
    fam.alpha = alpha;
    fam.gamma = gamma;
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        try {
            validate_params(alpha, gamma, pairs[k].first, pairs[k].second, require_strong);
        } catch (const ParameterError& e) {
            throw ParameterError("family pair " + std::to_string(k) + ": " + e.what());
        }
        fam.pairs.push_back(pairs[k]);
    }
    return fam;
}

}  // namespace volterra
