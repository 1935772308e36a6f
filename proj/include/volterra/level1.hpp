#pragma once

#include <span>
#include <vector>

#include "volterra/gaussian.hpp"
#include "volterra/grid.hpp"

namespace volterra {

// Kernel weight per grid cell. left_point evaluates (tau - r)^{-gamma} at the
// cell's left endpoint (the adapted choice that makes discrete Chen exact);
// cell_average uses the exact cell mean of the kernel, i.e. the mollified
// increment weight.
enum class KernelScheme { left_point, cell_average };

// Precomputed w(tau_idx, k), k < tau_idx, for one (grid, gamma, scheme).
class KernelWeights {
  public:
    KernelWeights() = default;
    KernelWeights(const Grid& grid, double gamma, KernelScheme scheme);

    double at(int tau_idx, int k) const {
        return data_[static_cast<std::size_t>(tau_idx) * (tau_idx - 1) / 2 + k];
    }
    KernelScheme scheme() const { return scheme_; }

  private:
    KernelScheme scheme_ = KernelScheme::left_point;
    std::vector<double> data_;
};

// Level-1 lift z^{1,tau}_{t,0} = sum_{cells [r,r+h) in [0,t)} w(tau, r) dx_r,
// stored on the (t, tau) triangle, one channel per driver component.
// delta of any increment of this field vanishes identically: increments are
// differences of anchored values within a fixed tau row.
class Level1Field {
  public:
    Level1Field(const PathSample& path, double gamma, KernelScheme scheme);

    const Grid& grid() const { return grid_; }
    double gamma() const { return gamma_; }
    KernelScheme scheme() const { return weights_.scheme(); }
    int dim() const { return dim_; }
    const KernelWeights& weights() const { return weights_; }

    double base(int component, int t_idx, int tau_idx) const {
        return base_.at(component, t_idx, tau_idx);
    }
    // z^{1,tau}_{ts} for s <= t <= tau.
    double increment(int component, int s_idx, int t_idx, int tau_idx) const;

    double max_abs() const { return base_.max_abs(); }

  private:
    Grid grid_;
    double gamma_ = 0.0;
    int dim_ = 0;
    KernelWeights weights_;
    TwoParamField base_;
};

Level1Field build_level1(const PathSample& path, double gamma,
                         KernelScheme scheme = KernelScheme::left_point);

// All components of z^{1,tau}_{ts}.
std::vector<double> level1_increment(const Level1Field& field, int s_idx, int t_idx, int tau_idx);

}  // namespace volterra
