#include "volterra/gaussian.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <string>

#include "volterra/rng.hpp"

namespace volterra {

namespace {

// Antiderivative pair for |x|^{2H-2}: d/dx phi1 = |x|^{2H-2} (odd extension).
double phi1(double x, double two_h_m1) {
    return (x >= 0 ? 1.0 : -1.0) * std::pow(std::fabs(x), two_h_m1) / two_h_m1;
}

// phi2'' = |x|^{2H-2}; used for exact cell-pair integrals of the fBm kernel.
double phi2(double x, double two_h) {
    return std::pow(std::fabs(x), two_h) / (two_h * (two_h - 1.0));
}

}  // namespace

DriverSpec DriverSpec::fbm(double hurst, int dim, std::uint64_t seed) {
    if (!(hurst > 0.5 && hurst < 1.0))
        throw ParameterError("fbm hurst must lie in (1/2, 1)");
    if (dim < 1)
        throw ParameterError("driver dim must be >= 1");
    return DriverSpec{DriverKind::fbm, hurst, dim, seed};
}

DriverSpec DriverSpec::bm(int dim, std::uint64_t seed) {
    if (dim < 1)
        throw ParameterError("driver dim must be >= 1");
    return DriverSpec{DriverKind::bm, 0.5, dim, seed};
}

double covariance(const DriverSpec& spec, double s, double t) {
    if (s < 0.0 || t < 0.0)
        throw OrderingError("covariance requires s, t >= 0");
    if (spec.kind == DriverKind::bm)
        return std::min(s, t);
    const double two_h = 2.0 * spec.hurst;
    return 0.5 * (std::pow(s, two_h) + std::pow(t, two_h) - std::pow(std::fabs(t - s), two_h));
}

double inner_product_H(const DriverSpec& spec, const Grid& grid,
                       std::span<const double> f, std::span<const double> g) {
    const int n = grid.cells;
    if (static_cast<int>(f.size()) != n || static_cast<int>(g.size()) != n)
        throw ParameterError("inner_product_H expects one value per grid cell");
    const double h = grid.step();
    if (spec.kind == DriverKind::bm) {
        double acc = 0.0;
        for (int i = 0; i < n; ++i)
            acc += f[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(i)];
        return acc * h;
    }
    const double two_h = 2.0 * spec.hurst;
    const double a_h = spec.hurst * (two_h - 1.0);
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        const double fi = f[static_cast<std::size_t>(i)];
        if (fi == 0.0)
            continue;
        double row = 0.0;
        for (int j = 0; j < n; ++j) {
            const double gj = g[static_cast<std::size_t>(j)];
            if (gj == 0.0)
                continue;
            const double cell = -phi2(grid.dt(j + 1, i + 1), two_h) + phi2(grid.dt(j, i + 1), two_h) +
                                phi2(grid.dt(j + 1, i), two_h) - phi2(grid.dt(j, i), two_h);
            row += gj * cell;
        }
        acc += fi * row;
    }
    return a_h * acc;
}

PathSample PathSample::from_function(const Grid& grid, int dim,
                                     const std::function<double(int, double)>& f) {
    if (dim < 1)
        throw ParameterError("path dim must be >= 1");
    PathSample p;
    p.grid = grid;
    p.dim = dim;
    p.values.assign(static_cast<std::size_t>(dim), std::vector<double>(grid.points.size()));
    for (int c = 0; c < dim; ++c) {
        const double base = f(c, 0.0);
        for (int k = 0; k <= grid.cells; ++k)
            p.values[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)] =
                f(c, grid.time(k)) - base;
    }
    return p;
}

PathSample PathSample::restrict_dyadic(int factor) const {
    PathSample p;
    p.grid = coarsen_dyadic(grid, factor);
    p.dim = dim;
    p.driver = driver;
    p.values.assign(static_cast<std::size_t>(dim), std::vector<double>(p.grid.points.size()));
    for (int c = 0; c < dim; ++c)
        for (int k = 0; k <= p.grid.cells; ++k)
            p.values[static_cast<std::size_t>(c)][static_cast<std::size_t>(k)] =
                values[static_cast<std::size_t>(c)][static_cast<std::size_t>(k) * factor];
    return p;
}

GaussianSampler::GaussianSampler(const DriverSpec& spec, const Grid& grid)
    : spec_(spec), grid_(grid) {
    const int n = grid.cells;
    Eigen::MatrixXd cov(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) {
            const double v = covariance(spec, grid.time(i + 1), grid.time(j + 1));
            cov(i, j) = v;
            cov(j, i) = v;
        }
    const double scale = cov.trace() / n;
    const double ladder[] = {0.0, 1e-12 * scale, 1e-10 * scale};
    Eigen::LLT<Eigen::MatrixXd> llt;
    bool ok = false;
    for (double jitter : ladder) {
        Eigen::MatrixXd shifted = cov;
        shifted.diagonal().array() += jitter;
        llt.compute(shifted);
        if (llt.info() == Eigen::Success) {
            jitter_ = jitter;
            ok = true;
            break;
        }
    }
    if (!ok) {
        const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(cov)
                                   .eigenvalues()
                                   .minCoeff();
        throw NumericalError("covariance Cholesky failed after jitter ladder; smallest eigenvalue ~ " +
                             std::to_string(min_eig));
    }
    const Eigen::MatrixXd lower = llt.matrixL();
    chol_.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j)
            chol_[static_cast<std::size_t>(i) * n + j] = lower(i, j);
}

void GaussianSampler::fill_levels(std::uint64_t sample_index, int component,
                                  std::span<double> out) const {
    const int n = grid_.cells;
    if (static_cast<int>(out.size()) != n + 1)
        throw ParameterError("fill_levels expects n+1 slots");
    if (component < 0 || component >= spec_.dim)
        throw ParameterError("component out of range");
    NormalStream normals(stream_seed(spec_.seed, sample_index, static_cast<std::uint64_t>(component)));
    std::vector<double> xi(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j)
        xi[static_cast<std::size_t>(j)] = normals.next();
    out[0] = 0.0;
    for (int i = 0; i < n; ++i) {
        double acc = 0.0;
        const double* row = chol_.data() + static_cast<std::size_t>(i) * n;
        for (int j = 0; j <= i; ++j)
            acc += row[j] * xi[static_cast<std::size_t>(j)];
        out[static_cast<std::size_t>(i) + 1] = acc;
    }
}

void GaussianSampler::fill_increments(std::uint64_t sample_index, int component,
                                      std::span<double> out) const {
    const int n = grid_.cells;
    if (static_cast<int>(out.size()) != n)
        throw ParameterError("fill_increments expects n slots");
    static thread_local std::vector<double> levels;
    levels.resize(static_cast<std::size_t>(n) + 1);
    fill_levels(sample_index, component, levels);
    for (int k = 0; k < n; ++k)
        out[static_cast<std::size_t>(k)] = levels[static_cast<std::size_t>(k) + 1] -
                                           levels[static_cast<std::size_t>(k)];
}

PathSample GaussianSampler::sample(std::uint64_t sample_index) const {
    PathSample p;
    p.grid = grid_;
    p.dim = spec_.dim;
    p.driver = spec_;
    p.values.assign(static_cast<std::size_t>(spec_.dim),
                    std::vector<double>(grid_.points.size()));
    for (int c = 0; c < spec_.dim; ++c)
        fill_levels(sample_index, c, p.values[static_cast<std::size_t>(c)]);
    return p;
}

std::vector<PathSample> sample_paths(const DriverSpec& spec, const Grid& grid, int count) {
    if (count < 1)
        throw ParameterError("sample count must be >= 1");
    GaussianSampler sampler(spec, grid);
    std::vector<PathSample> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int q = 0; q < count; ++q)
        out.push_back(sampler.sample(static_cast<std::uint64_t>(q)));
    return out;
}

namespace {

void check_increment_spec(const IncrementSpec& a) {
    if (!(a.s < a.t && a.t <= a.tau))
        throw OrderingError("increment spec requires s < t <= tau");
    if (a.s < 0.0)
        throw OrderingError("increment spec requires s >= 0");
}

double bm_level1_cov(double gamma, const IncrementSpec& a, const IncrementSpec& b) {
    const double lo = std::max(a.s, b.s);
    const double hi = std::min(a.t, b.t);
    if (hi <= lo)
        return 0.0;
    if (gamma == 0.0)
        return hi - lo;
    if (a.tau == b.tau) {
        const double e = 1.0 - 2.0 * gamma;
        return (std::pow(a.tau - lo, e) - std::pow(a.tau - hi, e)) / e;
    }
    boost::math::quadrature::tanh_sinh<double> integ;
    return integ.integrate(
        [&](double r) { return std::pow(a.tau - r, -gamma) * std::pow(b.tau - r, -gamma); }, lo, hi);
}

// a_H int_{a.s}^{a.t} int_{b.s}^{b.t} (tau_a-r)^{-g} (tau_b-l)^{-g} |r-l|^{2H-2} dl dr.
// Inner |r-l| factor integrated exactly per cell; kernels at midpoints except
// in the cell touching its own singular endpoint, where the kernel is
// integrated exactly instead (unless that cell also contains the outer
// midpoint, in which case the |r-l| singularity dominates and stays exact).
double fbm_level1_cov(double hurst, double gamma, const IncrementSpec& a, const IncrementSpec& b,
                      int cells) {
    const double two_h = 2.0 * hurst;
    const double a_h = hurst * (two_h - 1.0);
    const int q = std::max(cells, 8);
    const double hr = (a.t - a.s) / q;
    const double hl = (b.t - b.s) / q;
    const bool outer_singular = a.tau == a.t && gamma > 0.0;
    const bool inner_singular = b.tau == b.t && gamma > 0.0;

    std::vector<double> l_edge(static_cast<std::size_t>(q) + 1), l_mid(static_cast<std::size_t>(q)),
        kl(static_cast<std::size_t>(q));
    for (int j = 0; j <= q; ++j)
        l_edge[static_cast<std::size_t>(j)] = b.s + j * hl;
    l_edge.back() = b.t;
    for (int j = 0; j < q; ++j) {
        l_mid[static_cast<std::size_t>(j)] = b.s + (j + 0.5) * hl;
        kl[static_cast<std::size_t>(j)] = std::pow(b.tau - l_mid[static_cast<std::size_t>(j)], -gamma);
    }
    const double kernel_int_last =
        inner_singular ? std::pow(b.tau - l_edge[static_cast<std::size_t>(q) - 1], 1.0 - gamma) /
                             (1.0 - gamma)
                       : 0.0;

    double acc = 0.0;
    for (int i = 0; i < q; ++i) {
        const double rc = a.s + (i + 0.5) * hr;
        double wr = std::pow(a.tau - rc, -gamma) * hr;
        if (outer_singular && i == q - 1)
            wr = std::pow(a.tau - (a.s + (q - 1) * hr), 1.0 - gamma) / (1.0 - gamma);
        double row = 0.0;
        for (int j = 0; j < q; ++j) {
            const bool exact_kernel_cell =
                inner_singular && j == q - 1 &&
                !(l_edge[static_cast<std::size_t>(j)] <= rc && rc <= l_edge[static_cast<std::size_t>(j) + 1]);
            if (exact_kernel_cell) {
                row += kernel_int_last *
                       std::pow(std::fabs(rc - l_mid[static_cast<std::size_t>(j)]), two_h - 2.0);
            } else {
                const double cell = phi1(rc - l_edge[static_cast<std::size_t>(j)], two_h - 1.0) -
                                    phi1(rc - l_edge[static_cast<std::size_t>(j) + 1], two_h - 1.0);
                row += kl[static_cast<std::size_t>(j)] * cell;
            }
        }
        acc += wr * row;
    }
    return a_h * acc;
}

}  // namespace

double level1_exact_covariance(const DriverSpec& spec, double gamma, const IncrementSpec& a,
                               const IncrementSpec& b, const QuadratureOptions& opts) {
    check_increment_spec(a);
    check_increment_spec(b);
    if (gamma < 0.0)
        throw ParameterError("gamma must be >= 0");
    if (gamma >= spec.effective_hurst())
        throw ParameterError(spec.kind == DriverKind::bm
                                 ? "bm level-1 covariance requires gamma < 1/2"
                                 : "fbm level-1 covariance requires gamma < hurst");
    if (spec.kind == DriverKind::bm)
        return bm_level1_cov(gamma, a, b);
    if (gamma == 0.0) {
        // Plain increment covariance R(t_a,t_b) - R(t_a,s_b) - R(s_a,t_b) + R(s_a,s_b).
        return covariance(spec, a.t, b.t) - covariance(spec, a.t, b.s) -
               covariance(spec, a.s, b.t) + covariance(spec, a.s, b.s);
    }
    return fbm_level1_cov(spec.hurst, gamma, a, b, opts.cells_2d);
}

}  // namespace volterra
