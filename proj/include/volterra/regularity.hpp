#pragma once

#include <utility>
#include <vector>

#include "volterra/errors.hpp"

namespace volterra {

// Exponent bundle for the singular-weight scales. Constraints (enforced by
// validate_params): alpha in (0,1), gamma in [0,1), eta in [0,1], zeta in [0,1],
// rho = alpha - gamma > 0, zeta <= min(rho, eta). `strong` records eta > 1 - alpha,
// the regime in which convolution refinement converges.
struct RegularityParams {
    double alpha = 0.0;
    double gamma = 0.0;
    double eta = 0.0;
    double zeta = 0.0;
    bool strong = false;

    double rho() const { return alpha - gamma; }
};

RegularityParams validate_params(double alpha, double gamma, double eta, double zeta,
                                 bool require_strong = false);
RegularityParams validate_params(const RegularityParams& p);

// psi1_{(alpha,gamma)}(tau,t,s) = min(|tau-t|^{-gamma} |t-s|^alpha, |t-s|^{alpha-gamma}).
// Requires s <= t <= tau. The gamma branch is skipped at tau == t (it is the
// max there anyway for gamma > 0), so no IEEE infinities are formed.
double psi1(double alpha, double gamma, double tau, double t, double s);

// psi12 via the factored identity
//   psi12 = |tau-tau'|^eta |tau'-t|^{-(eta-zeta)} psi1_{(alpha, gamma+zeta)}(tau', t, s).
// Requires s <= t <= tau' <= tau. tau' == t with eta > zeta is a singular
// evaluation and throws; callers scanning grids must exclude that diagonal.
double psi12(const RegularityParams& p, double tau, double tau_prime, double t, double s);
double psi12(double alpha, double gamma, double eta, double zeta, double tau,
             double tau_prime, double t, double s);

// A finite family {(eta_k, zeta_k)} sharing ambient (alpha, gamma); every pair
// is validated on construction.
struct FamilyAN {
    double alpha = 0.0;
    double gamma = 0.0;
    std::vector<std::pair<double, double>> pairs;
};

FamilyAN make_family(double alpha, double gamma,
                     const std::vector<std::pair<double, double>>& pairs,
                     bool require_strong = false);

}  // namespace volterra
