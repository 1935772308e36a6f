#pragma once

#include <cstddef>
#include <vector>

#include "volterra/errors.hpp"

namespace volterra {

// Uniform grid on [0, horizon] with `cells` cells. points[k] = k*horizon/cells,
// points.back() == horizon exactly. Time differences used in kernels and psi
// weights are always formed as dt(i, j) = (j-i)*step() so that nested dyadic
// grids see bit-identical spacings.
struct Grid {
    double horizon = 0.0;
    int cells = 0;
    std::vector<double> points;

    int size() const { return cells + 1; }
    double step() const { return horizon / cells; }
    double time(int k) const { return points[static_cast<std::size_t>(k)]; }
    double dt(int i, int j) const { return (j - i) * step(); }

    // Nearest grid index of a time; throws ParameterError if t is not a grid
    // point within rtol*horizon.
    int index_of(double t, double rtol = 1e-9) const;
};

Grid make_uniform_grid(double horizon, int cells);

// Sub-grid keeping every factor-th point; factor must divide cells.
Grid coarsen_dyadic(const Grid& g, int factor);

// Row-offset layout for the triangle {0 <= t <= tau <= n}. Row tau holds
// tau+1 entries, offset tau*(tau+1)/2.
struct TriangleLayout {
    int n = 0;

    std::size_t index(int t_idx, int tau_idx) const {
        return static_cast<std::size_t>(tau_idx) * (tau_idx + 1) / 2 + t_idx;
    }
    std::size_t count() const {
        return static_cast<std::size_t>(n + 1) * (n + 2) / 2;
    }
};

// Dense multi-channel storage over the (t, tau) triangle.
class TwoParamField {
  public:
    TwoParamField() = default;
    TwoParamField(int n, int channels);

    int n() const { return layout_.n; }
    int channels() const { return channels_; }

    double at(int ch, int t_idx, int tau_idx) const {
        return data_[static_cast<std::size_t>(ch) * layout_.count() + layout_.index(t_idx, tau_idx)];
    }
    double& at(int ch, int t_idx, int tau_idx) {
        return data_[static_cast<std::size_t>(ch) * layout_.count() + layout_.index(t_idx, tau_idx)];
    }

    double max_abs() const;

  private:
    TriangleLayout layout_;
    int channels_ = 0;
    std::vector<double> data_;
};

// delta_u g_{ts} = g_{ts} - g_{tu} - g_{us} for an increment accessor
// g(lower_idx, upper_idx). Requires s <= u <= t.
template <typename F>
auto delta_increment(F&& g, int s_idx, int u_idx, int t_idx) {
    if (!(s_idx <= u_idx && u_idx <= t_idx))
        throw OrderingError("delta_increment requires s <= u <= t");
    return g(s_idx, t_idx) - g(u_idx, t_idx) - g(s_idx, u_idx);
}

}  // namespace volterra
