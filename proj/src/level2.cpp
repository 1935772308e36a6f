#include "volterra/level2.hpp"

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>

#include "volterra/errors.hpp"

namespace volterra {

namespace {

void check_compatible(const Level1Field& z1, const Grid& grid, int dim) {
    if (z1.grid().cells != grid.cells || z1.grid().horizon != grid.horizon)
        throw ParameterError("level1 field and level2 data must share one grid");
    if (z1.dim() != dim) throw ParameterError("level1 field and level2 data must share dim");
    if (z1.scheme() != KernelScheme::left_point)
        throw ParameterError("level2 requires a left-point level1 field");
}

}  // namespace

Level2Field::Level2Field(const Level1Field& z1, const PathSample& path, Level2Scheme scheme)
    : grid_(path.grid), gamma_(z1.gamma()), dim_(path.dim), scheme_(scheme) {
    check_compatible(z1, grid_, dim_);
    if (path.driver) {
        const bool is_bm = path.driver->kind == DriverKind::bm;
        if (scheme == Level2Scheme::bm_ito && !is_bm)
            throw ParameterError("bm_ito scheme requires a bm driver");
        if (scheme == Level2Scheme::fbm_stratonovich && is_bm)
            throw ParameterError("fbm_stratonovich scheme requires an fbm driver");
        if (scheme == Level2Scheme::fbm_stratonovich &&
            !(gamma_ < 2.0 * path.driver->hurst - 1.0))
            throw ParameterError("stratonovich regime requires gamma < 2H - 1");
        if (scheme == Level2Scheme::bm_ito && !(gamma_ < 0.5))
            throw ParameterError("ito regime requires gamma < 1/2");
    }

    left_ = KernelWeights(grid_, gamma_, KernelScheme::left_point);
    if (scheme == Level2Scheme::fbm_stratonovich)
        avg_ = KernelWeights(grid_, gamma_, KernelScheme::cell_average);

    const int n = grid_.cells;
    db_.resize(static_cast<std::size_t>(dim_));
    for (int c = 0; c < dim_; ++c) {
        db_[c].resize(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) db_[c][k] = path.increment(c, k);
    }

    // Diagonal self-cell weight of the mollified Stratonovich sum: the double
    // integral of the cell's own kernel against itself contributes
    // dB_k * h^{-gamma} / ((1-gamma)(2-gamma)) on top of the left-point z1.
    const double h = grid_.step();
    const double cself =
        std::pow(h, -gamma_) / ((1.0 - gamma_) * (2.0 - gamma_));

    data_.reserve(static_cast<std::size_t>(dim_) * dim_);
    for (int i = 0; i < dim_; ++i) {
        for (int j = 0; j < dim_; ++j) {
            const bool moll = mollified_pair(i, j);
            const KernelWeights& w = upper_weights(i, j);
            TwoParamField f(n, 1);
            for (int tau = 1; tau <= n; ++tau) {
                double acc = 0.0;
                for (int k = 0; k < tau; ++k) {
                    double g = z1.base(i, k, k);
                    if (moll) g += cself * db_[i][k];
                    acc += w.at(tau, k) * g * db_[j][k];
                    f.at(0, k + 1, tau) = acc;
                }
            }
            data_.push_back(std::move(f));
        }
    }
}

double Level2Field::max_abs() const {
    double m = 0.0;
    for (const auto& f : data_) m = std::max(m, f.max_abs());
    return m;
}

Level2Field build_level2(const Level1Field& z1, const PathSample& path, Level2Scheme scheme) {
    return Level2Field(z1, path, scheme);
}

std::vector<double> level2_increment(const Level2Field& f2, const Level1Field& f1, int s_idx,
                                     int t_idx, int tau_idx) {
    if (!(0 <= s_idx && s_idx <= t_idx && t_idx <= tau_idx && tau_idx <= f2.grid().cells))
        throw OrderingError("level2 increment requires 0 <= s <= t <= tau within the grid");
    check_compatible(f1, f2.grid(), f2.dim());
    if (f1.gamma() != f2.gamma())
        throw ParameterError("level1 and level2 fields must share gamma");

    const int m = f2.dim();
    std::vector<double> out(static_cast<std::size_t>(m) * m);
    for (int i = 0; i < m; ++i) {
        for (int j = 0; j < m; ++j) {
            const KernelWeights& w = f2.upper_weights(i, j);
            double conv = 0.0;
            for (int k = s_idx; k < t_idx; ++k)
                conv += w.at(tau_idx, k) * f1.base(i, s_idx, k) * f2.db(j, k);
            out[static_cast<std::size_t>(i) * m + j] =
                f2.base(i, j, t_idx, tau_idx) - f2.base(i, j, s_idx, tau_idx) - conv;
        }
    }
    return out;
}

double chen_max_residual(const Level2Field& f2, const Level1Field& f1, int stride) {
    if (stride < 1) throw ParameterError("stride must be positive");
    const int n = f2.grid().cells;
    const int m = f2.dim();
    double worst = 0.0;
    for (int tau = 0; tau <= n; tau += stride) {
        for (int t = 0; t <= tau; t += stride) {
            for (int u = 0; u <= t; u += stride) {
                for (int s = 0; s <= u; s += stride) {
                    const auto zts = level2_increment(f2, f1, s, t, tau);
                    const auto ztu = level2_increment(f2, f1, u, t, tau);
                    const auto zus = level2_increment(f2, f1, s, u, tau);
                    for (int i = 0; i < m; ++i) {
                        for (int j = 0; j < m; ++j) {
                            const KernelWeights& w = f2.upper_weights(i, j);
                            double conv = 0.0;
                            for (int k = u; k < t; ++k)
                                conv += w.at(tau, k) * f1.increment(i, s, u, k) * f2.db(j, k);
                            const std::size_t ij = static_cast<std::size_t>(i) * m + j;
                            worst = std::max(
                                std::abs(zts[ij] - ztu[ij] - zus[ij] - conv), worst);
                        }
                    }
                }
            }
        }
    }
    return worst;
}

double strat_correction(double gamma, double hurst, double s, double t, double tau) {
    if (!(hurst > 0.5 && hurst < 1.0)) throw ParameterError("hurst must lie in (1/2, 1)");
    if (!(gamma >= 0.0 && gamma < 2.0 * hurst - 1.0))
        throw ParameterError("divergent correction: gamma must satisfy gamma < 2H - 1");
    if (!(0.0 <= s && s <= t && t <= tau))
        throw OrderingError("strat correction requires 0 <= s <= t <= tau");
    if (s == t) return 0.0;

    const double pref = hurst * (2.0 * hurst - 1.0) / (2.0 * hurst - 1.0 - gamma);
    boost::math::quadrature::tanh_sinh<double> quad;
    const double e = 2.0 * hurst - 1.0 - gamma;
    const double integral = quad.integrate(
        [&](double r) { return std::pow(tau - r, -gamma) * std::pow(r - s, e); }, s, t);
    return pref * integral;
}

std::vector<std::pair<double, double>> ito_strat_divergence_probe(
    double gamma, double s, double t, double tau, const std::vector<double>& mesh_levels) {
    if (!(gamma >= 0.0 && gamma < 0.5))
        throw ParameterError("divergence probe requires 0 <= gamma < 1/2");
    if (!(0.0 <= s && s < t && t <= tau))
        throw OrderingError("divergence probe requires 0 <= s < t <= tau");

    const double cg = 1.0 / (1.0 - gamma);
    std::vector<std::pair<double, double>> out;
    out.reserve(mesh_levels.size());
    for (double h : mesh_levels) {
        if (!(h > 0.0)) throw ParameterError("mesh must be positive");
        const long n = std::max<long>(1, std::lround((t - s) / h));
        const double hh = (t - s) / static_cast<double>(n);
        double acc = 0.0;
        for (long k = 0; k < n; ++k)
            acc += std::pow(tau - (s + static_cast<double>(k) * hh), -gamma);
        out.emplace_back(hh, cg * std::pow(hh, 1.0 - gamma) * acc);
    }
    return out;
}

}  // namespace volterra
