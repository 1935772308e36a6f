#pragma once

#include <functional>
#include <vector>

#include "volterra/grid.hpp"
#include "volterra/level1.hpp"
#include "volterra/regularity.hpp"

namespace volterra {

// One partition level of the convolution product: mesh = cell width used,
// value = the m_lower x m_upper matrix of the Riemann sum at that mesh.
struct ConvolutionLevel {
    double mesh = 0.0;
    std::vector<double> value;
};

struct ConvolutionResult {
    int rows = 0;  // lower-factor components (index i of z^{2,i,j})
    int cols = 0;  // upper-factor components (index j)
    std::vector<double> value;
    std::vector<ConvolutionLevel> levels;
    bool converged = true;
    double est_order = 0.0;  // log2 ratio of successive level differences

    double at(int i, int j) const { return value[static_cast<std::size_t>(i) * cols + j]; }
    double max_abs() const;
};

struct ConvolveMode {
    bool refine = false;
    double tol = 0.0;

    static ConvolveMode same_grid() { return {}; }
    static ConvolveMode refine_to(double tol) { return {true, tol}; }
};

// Upper(ch, u_idx, v_idx) = z^{tau}_{t_v t_u} with tau baked into the callable;
// Lower(ch, r_idx) = y^{t_r}_{us} with the time increment (u, s) baked in. The
// result entry (i, j) pairs lower component i with upper component j.
using UpperIncrement = std::function<double(int, int, int)>;
using LowerValue = std::function<double(int, int)>;

ConvolutionResult convolve_partitioned(const Grid& grid, int u_idx, int t_idx, int upper_channels,
                                       const UpperIncrement& upper, int lower_channels,
                                       const LowerValue& lower, const ConvolveMode& mode);

// z^{tau}_{tu} * y^{.}_{us} for two level-1 fields on a shared grid.
ConvolutionResult convolve(const Level1Field& upper, const Level1Field& lower, int s_idx,
                           int u_idx, int t_idx, int tau_idx,
                           const ConvolveMode& mode = ConvolveMode::same_grid());

// Empirical constants of the convolution bounds: |z * y| over the product of
// the factor norms and the psi weight at exponent 2*rho + gamma. A zero value
// with a degenerate (zero) denominator returns 0; a nonzero value over a zero
// denominator signals an excluded tuple.
double convolution_bound_ratio1(double conv_abs, double z_norm1, double y_norm12,
                                const RegularityParams& params, double tau, double t, double s);
double convolution_bound_ratio12(double conv_abs, double z_norm12, double y_norm12,
                                 const RegularityParams& params, double tau, double tau_prime,
                                 double t, double s);

}  // namespace volterra
