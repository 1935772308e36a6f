#include "volterra/convolution.hpp"

#include <cmath>
#include <cstdlib>

#include "volterra/errors.hpp"

namespace volterra {

double ConvolutionResult::max_abs() const {
    double m = 0.0;
    for (double v : value) m = std::max(m, std::abs(v));
    return m;
}

namespace {

std::vector<double> level_sum(int u_idx, int t_idx, int stride, int rows, int cols,
                              const UpperIncrement& upper, const LowerValue& lower) {
    std::vector<double> out(static_cast<std::size_t>(rows) * cols, 0.0);
    for (int left = u_idx; left < t_idx; left += stride) {
        const int right = std::min(left + stride, t_idx);
        for (int i = 0; i < rows; ++i) {
            const double y = lower(i, left);
            if (y == 0.0) continue;
            for (int j = 0; j < cols; ++j) out[static_cast<std::size_t>(i) * cols + j] += upper(j, left, right) * y;
        }
    }
    return out;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) m = std::max(m, std::abs(a[k] - b[k]));
    return m;
}

}  // namespace

ConvolutionResult convolve_partitioned(const Grid& grid, int u_idx, int t_idx, int upper_channels,
                                       const UpperIncrement& upper, int lower_channels,
                                       const LowerValue& lower, const ConvolveMode& mode) {
    if (!(0 <= u_idx && u_idx <= t_idx && t_idx <= grid.cells))
        throw OrderingError("convolution requires 0 <= u <= t within the grid");
    ConvolutionResult res;
    res.rows = lower_channels;
    res.cols = upper_channels;

    const int span = t_idx - u_idx;
    if (span == 0) {
        res.value.assign(static_cast<std::size_t>(res.rows) * res.cols, 0.0);
        res.levels.push_back({0.0, res.value});
        return res;
    }

    // Partitions are sub-grids of the master grid: coarse-to-fine strides from
    // halving the span while even, finishing on the master grid itself.
    std::vector<int> strides;
    if (mode.refine) {
        int s = span;
        strides.push_back(s);
        while (s % 2 == 0 && s > 1) strides.push_back(s /= 2);
        if (strides.back() != 1) strides.push_back(1);
    } else {
        strides.push_back(1);
    }

    double prev_diff = 0.0;
    for (std::size_t lvl = 0; lvl < strides.size(); ++lvl) {
        auto value = level_sum(u_idx, t_idx, strides[lvl], res.rows, res.cols, upper, lower);
        res.levels.push_back({strides[lvl] * grid.step(), value});
        if (lvl > 0) {
            const double diff = max_abs_diff(value, res.levels[lvl - 1].value);
            if (lvl > 1 && diff > 0.0) res.est_order = std::log2(prev_diff / diff);
            prev_diff = diff;
            if (mode.refine && diff <= mode.tol) {
                res.value = std::move(value);
                res.converged = true;
                return res;
            }
        }
        res.value = value;
    }
    res.converged = !mode.refine || strides.size() < 2 || prev_diff <= mode.tol;
    return res;
}

ConvolutionResult convolve(const Level1Field& upper, const Level1Field& lower, int s_idx,
                           int u_idx, int t_idx, int tau_idx, const ConvolveMode& mode) {
    if (upper.grid().cells != lower.grid().cells ||
        upper.grid().horizon != lower.grid().horizon)
        throw ParameterError("convolution factors must share one grid");
    if (!(0 <= s_idx && s_idx <= u_idx && u_idx <= t_idx && t_idx <= tau_idx &&
          tau_idx <= upper.grid().cells))
        throw OrderingError("convolution requires 0 <= s <= u <= t <= tau within the grid");
    auto up = [&](int j, int a, int b) { return upper.increment(j, a, b, tau_idx); };
    auto lo = [&](int i, int r) { return lower.increment(i, s_idx, u_idx, r); };
    return convolve_partitioned(upper.grid(), u_idx, t_idx, upper.dim(), up, lower.dim(), lo,
                                mode);
}

namespace {

double finish_ratio(double conv_abs, double denom) {
    if (conv_abs == 0.0) return 0.0;
    if (denom == 0.0)
        throw SingularEvaluationError("degenerate tuple excluded from convolution bound");
    return conv_abs / denom;
}

}  // namespace

double convolution_bound_ratio1(double conv_abs, double z_norm1, double y_norm12,
                                const RegularityParams& params, double tau, double t, double s) {
    const double psi = psi1(2.0 * params.rho() + params.gamma, params.gamma, tau, t, s);
    return finish_ratio(conv_abs, z_norm1 * y_norm12 * psi);
}

double convolution_bound_ratio12(double conv_abs, double z_norm12, double y_norm12,
                                 const RegularityParams& params, double tau, double tau_prime,
                                 double t, double s) {
    const double psi = psi12(2.0 * params.rho() + params.gamma, params.gamma, params.eta,
                             params.zeta, tau, tau_prime, t, s);
    return finish_ratio(conv_abs, z_norm12 * y_norm12 * psi);
}

}  // namespace volterra
