#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "volterra/gaussian.hpp"
#include "volterra/grid.hpp"

namespace volterra {

enum class MomentTarget { z1_var, z1_12_var, z2_var, z2_12_var, z1_cov };

std::string to_string(MomentTarget target);
MomentTarget moment_target_from_string(const std::string& name);

// Slots are (s, t, tau) with tau_prime for the primed targets; z1_cov reads
// them as (s, u, v, tau): the covariance E[z^{1,tau}_{us} z^{1,tau}_{vs}].
// Upper variables are kernel parameters and need not be grid points; s and t
// must be.
struct MomentTuple {
    double s = 0.0;
    double t = 0.0;
    double tau = 0.0;
    double tau_prime = std::numeric_limits<double>::quiet_NaN();
};

struct McOptions {
    double horizon = 1.0;
    int cells = 128;
    int blocks = 100;       // jackknife blocks
    int component_i = 0;    // driver component of the inner integral
    int component_j = 1;    // outer component for z2 targets
    double eta = 0.0;       // psi12 exponents of the bound for primed targets
    double zeta = 0.0;
    int cells_per_lag = 64;  // grid resolution per lag in diagonal scaling mode
};

struct MomentReport {
    MomentTarget target{};
    MomentTuple tuple{};
    double estimate = 0.0;
    double std_err = 0.0;
    std::optional<double> oracle;
    double bound = 0.0;
    double ratio = 0.0;
    long samples = 0;
};

MomentReport estimate_moment(const DriverSpec& spec, double gamma, MomentTarget target,
                             const MomentTuple& tuple, long samples,
                             const McOptions& opts = {});

enum class ScalingMode { diagonal, fixed_tau };

std::string to_string(ScalingMode mode);
ScalingMode scaling_mode_from_string(const std::string& name);

struct ScalingReport {
    MomentTarget target{};
    ScalingMode mode{};
    double exponent_est = 0.0;
    double exponent_expected = 0.0;
    double r_squared = 0.0;
    std::vector<double> lags;
    std::vector<double> variances;
};

// Regression of log variance against log lag. Diagonal mode (tau = t) runs
// each lag on its own grid of cells_per_lag cells so that every lag sees the
// same relative discretization; fixed_tau evaluates all lags against
// tau = horizon on the master grid.
ScalingReport scaling_exponent(const DriverSpec& spec, double gamma, MomentTarget target,
                               ScalingMode mode, const std::vector<double>& lags, long samples,
                               const McOptions& opts = {});

struct BoundRatioEntry {
    std::string stratum;
    MomentTuple tuple{};
    double estimate = 0.0;
    double bound = 0.0;
    double ratio = 0.0;
};

struct BoundRatioSurface {
    MomentTarget target{};
    std::vector<BoundRatioEntry> entries;
    double max_near = 0.0;
    double max_far = 0.0;
};

// Moment/psi^2 ratios over a stratified tuple set: "near" places tau one grid
// cell past t (the singular branch of psi), "far" places tau at t + T/2.
BoundRatioSurface bound_ratio_surface(const DriverSpec& spec, double gamma, MomentTarget target,
                                      long samples, const McOptions& opts = {});

// psi^2 at the tuple with the exponent pair of the target: alpha = H_eff for
// level 1 and 2 H_eff - gamma for level 2.
double moment_bound(const DriverSpec& spec, double gamma, MomentTarget target,
                    const MomentTuple& tuple, double eta, double zeta);

// (1-2gamma)^{-1} int_s^t k(tau,r)^2 (r-s)^{1-2gamma} dr with k the kernel
// (primed: the difference of the tau and tau' kernels).
double bm_z2_isometry_oracle(double gamma, const MomentTuple& tuple, bool primed);

}  // namespace volterra
