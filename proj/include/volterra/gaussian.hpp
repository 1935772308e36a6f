#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "volterra/grid.hpp"

namespace volterra {

enum class DriverKind { fbm, bm };

// Gaussian driver description. fbm requires hurst in (1/2, 1); bm pins
// hurst = 1/2. `dim` independent components, one RNG stream per
// (seed, sample index, component).
struct DriverSpec {
    DriverKind kind = DriverKind::bm;
    double hurst = 0.5;
    int dim = 1;
    std::uint64_t seed = 0;

    static DriverSpec fbm(double hurst, int dim, std::uint64_t seed);
    static DriverSpec bm(int dim, std::uint64_t seed);

    double effective_hurst() const { return kind == DriverKind::bm ? 0.5 : hurst; }
};

// E[B_s B_t]; fBm: (|s|^{2H} + |t|^{2H} - |t-s|^{2H}) / 2, BM: min(s, t).
double covariance(const DriverSpec& spec, double s, double t);

// <f, g>_H for cell-step functions (one value per grid cell). fBm uses the
// a_H |u-v|^{2H-2} kernel with every cell pair integrated in closed form;
// BM reduces to the L2 product.
double inner_product_H(const DriverSpec& spec, const Grid& grid,
                       std::span<const double> f, std::span<const double> g);

// One path per component on a grid; values[c][0] == 0. `driver` is empty for
// deterministic drivers supplied via from_function.
struct PathSample {
    Grid grid;
    int dim = 0;
    std::optional<DriverSpec> driver;
    std::vector<std::vector<double>> values;

    static PathSample from_function(const Grid& grid, int dim,
                                    const std::function<double(int, double)>& f);

    double increment(int component, int k) const {
        return values[static_cast<std::size_t>(component)][static_cast<std::size_t>(k) + 1] -
               values[static_cast<std::size_t>(component)][static_cast<std::size_t>(k)];
    }

    // Same path on the sub-grid with every factor-th point (exact nesting).
    PathSample restrict_dyadic(int factor) const;
};

// Cholesky factor of the grid-point covariance (t=0 excluded), shared across
// samples and components. If the factorization fails, a jitter of
// {1e-12, 1e-10} * trace/n is added before giving up with a NumericalError
// that reports the smallest eigenvalue estimate.
class GaussianSampler {
  public:
    GaussianSampler(const DriverSpec& spec, const Grid& grid);

    const Grid& grid() const { return grid_; }
    const DriverSpec& spec() const { return spec_; }
    double jitter_used() const { return jitter_; }

    // Levels B_{t_0..t_n} (out size n+1, out[0] = 0).
    void fill_levels(std::uint64_t sample_index, int component, std::span<double> out) const;
    // Cell increments (out size n).
    void fill_increments(std::uint64_t sample_index, int component, std::span<double> out) const;

    PathSample sample(std::uint64_t sample_index) const;

  private:
    DriverSpec spec_;
    Grid grid_;
    double jitter_ = 0.0;
    std::vector<double> chol_;  // lower triangle, row-major n x n
};

std::vector<PathSample> sample_paths(const DriverSpec& spec, const Grid& grid, int count);

// A level-1 increment z^{1,tau}_{t,s}: integrate k(tau, r) over [s, t] against
// the driver. tau is a kernel parameter >= t and need not be a grid point.
struct IncrementSpec {
    double s = 0.0;
    double t = 0.0;
    double tau = 0.0;
};

struct QuadratureOptions {
    int cells_2d = 1024;  // per-axis cell count of the fBm double quadrature
};

// E[z^{1,tau_a}_{t_a,s_a} z^{1,tau_b}_{t_b,s_b}] for independent-component-free
// scalar drivers. BM: closed form on the overlap when tau_a == tau_b or
// gamma == 0, tanh-sinh quadrature otherwise. fBm: gamma == 0 reduces to the
// plain increment covariance; otherwise a double quadrature with the
// |r-l|^{2H-2} factor integrated exactly per inner cell (antiderivative),
// midpoint kernels elsewhere, and kernel-exact handling of cells adjacent to
// r = tau_a or l = tau_b.
double level1_exact_covariance(const DriverSpec& spec, double gamma, const IncrementSpec& a,
                               const IncrementSpec& b, const QuadratureOptions& opts = {});

}  // namespace volterra
