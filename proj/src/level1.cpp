#include "volterra/level1.hpp"

#include <cmath>

#include "volterra/errors.hpp"

namespace volterra {

KernelWeights::KernelWeights(const Grid& grid, double gamma, KernelScheme scheme)
    : scheme_(scheme) {
    const int n = grid.cells;
    data_.resize(static_cast<std::size_t>(n + 1) * n / 2 + 1);
    const double h = grid.step();
    for (int tau = 1; tau <= n; ++tau) {
        double* row = data_.data() + static_cast<std::size_t>(tau) * (tau - 1) / 2;
        for (int k = 0; k < tau; ++k) {
            if (scheme == KernelScheme::left_point) {
                row[k] = std::pow(grid.dt(k, tau), -gamma);
            } else {
                // Exact cell mean of (tau - r)^{-gamma}; the k = tau-1 cell
                // absorbs the integrable singularity at r = tau.
                const double e = 1.0 - gamma;
                row[k] = (std::pow(grid.dt(k, tau), e) - std::pow(grid.dt(k + 1, tau), e)) /
                         (e * h);
            }
        }
    }
}

namespace {

void check_level1_gamma(const PathSample& path, double gamma) {
    if (!(gamma >= 0.0)) throw ParameterError("gamma must be nonnegative");
    if (!path.driver) {
        if (!(gamma < 1.0)) throw ParameterError("gamma must lie in [0, 1)");
        return;
    }
    if (path.driver->kind == DriverKind::bm) {
        if (!(gamma < 0.5)) throw ParameterError("bm driver requires gamma < 1/2");
    } else {
        if (!(gamma < path.driver->hurst))
            throw ParameterError("fbm driver requires gamma < hurst");
    }
}

}  // namespace

Level1Field::Level1Field(const PathSample& path, double gamma, KernelScheme scheme)
    : grid_(path.grid),
      gamma_(gamma),
      dim_(path.dim),
      weights_(path.grid, gamma, scheme),
      base_(path.grid.cells, path.dim) {
    check_level1_gamma(path, gamma);
    const int n = grid_.cells;
    for (int c = 0; c < dim_; ++c) {
        for (int tau = 1; tau <= n; ++tau) {
            double acc = 0.0;
            for (int k = 0; k < tau; ++k) {
                acc += weights_.at(tau, k) * path.increment(c, k);
                base_.at(c, k + 1, tau) = acc;
            }
        }
    }
}

double Level1Field::increment(int component, int s_idx, int t_idx, int tau_idx) const {
    if (!(0 <= s_idx && s_idx <= t_idx && t_idx <= tau_idx && tau_idx <= grid_.cells))
        throw OrderingError("level1 increment requires 0 <= s <= t <= tau within the grid");
    return base_.at(component, t_idx, tau_idx) - base_.at(component, s_idx, tau_idx);
}

Level1Field build_level1(const PathSample& path, double gamma, KernelScheme scheme) {
    return Level1Field(path, gamma, scheme);
}

std::vector<double> level1_increment(const Level1Field& field, int s_idx, int t_idx,
                                     int tau_idx) {
    std::vector<double> out(static_cast<std::size_t>(field.dim()));
    for (int c = 0; c < field.dim(); ++c) out[c] = field.increment(c, s_idx, t_idx, tau_idx);
    return out;
}

}  // namespace volterra
