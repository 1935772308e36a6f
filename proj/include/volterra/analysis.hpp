#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "volterra/errors.hpp"
#include "volterra/grid.hpp"
#include "volterra/regularity.hpp"

namespace volterra {

// Grid indices of the tuple attaining a discrete sup; unused slots stay -1.
// Ties go to the first tuple in lexicographic (tau, tau', t, u, s) loop order.
struct ArgTuple {
    int s = -1, u = -1, t = -1, tau_prime = -1, tau = -1;
};

struct NormResult {
    double value = 0.0;
    ArgTuple arg;
};

namespace detail {

// (d*h)^e over integer grid differences; slot 0 unused for negative e.
inline std::vector<double> pow_table(int n, double h, double e) {
    std::vector<double> tab(static_cast<std::size_t>(n) + 1, 0.0);
    for (int d = 1; d <= n; ++d) tab[d] = std::pow(d * h, e);
    return tab;
}

inline std::vector<double> log_table(int n, double h) {
    std::vector<double> tab(static_cast<std::size_t>(n) + 1, 0.0);
    for (int d = 1; d <= n; ++d) tab[d] = std::log(d * h);
    return tab;
}

// psi1_(alpha, g) over integer differences, g = gamma (+ zeta where needed).
struct Psi1Table {
    std::vector<double> rho_, alpha_, sing_;
    bool singular_ = false;

    Psi1Table(int n, double h, double alpha, double g)
        : rho_(pow_table(n, h, alpha - g)), singular_(g > 0.0) {
        if (singular_) {
            alpha_ = pow_table(n, h, alpha);
            sing_ = pow_table(n, h, -g);
        }
    }
    double at(int dtt, int dts) const {
        const double r = rho_[dts];
        if (!singular_ || dtt == 0) return r;
        return std::min(r, sing_[dtt] * alpha_[dts]);
    }
};

struct LogSumExp {
    double peak = -std::numeric_limits<double>::infinity();
    double sum = 0.0;

    void add(double l) {
        if (l == -std::numeric_limits<double>::infinity()) return;
        if (l > peak) {
            sum = sum * std::exp(peak - l) + 1.0;
            peak = l;
        } else {
            sum += std::exp(l - peak);
        }
    }
    // log of the accumulated sum; -inf when empty.
    double log_value() const {
        if (sum == 0.0) return -std::numeric_limits<double>::infinity();
        return peak + std::log(sum);
    }
};

inline void check_grid(const Grid& grid) {
    if (grid.cells < 1) throw ParameterError("empty grid");
}

}  // namespace detail

// Discrete sup over grid Delta_3 (s < t <= tau) of |z^tau_{ts}| / psi1.
template <class Z3>
NormResult volterra_norm1(const Grid& grid, const RegularityParams& params, Z3&& z) {
    validate_params(params);
    detail::check_grid(grid);
    const int n = grid.cells;
    const detail::Psi1Table psi(n, grid.step(), params.alpha, params.gamma);
    NormResult best;
    for (int tau = 1; tau <= n; ++tau)
        for (int t = 1; t <= tau; ++t)
            for (int s = 0; s < t; ++s) {
                const double r = std::abs(z(s, t, tau)) / psi.at(tau - t, t - s);
                if (r > best.value) best = {r, {s, -1, t, -1, tau}};
            }
    return best;
}

// Discrete sup over grid Delta_4 (s < t <= tau' < tau) of |z^{tau tau'}_{ts}| / psi12.
// The t = tau' diagonal is skipped when eta > zeta (psi12 blows up there).
template <class Z4>
NormResult volterra_norm12(const Grid& grid, const RegularityParams& params, Z4&& z,
                           int stride = 1) {
    validate_params(params);
    detail::check_grid(grid);
    const int n = grid.cells;
    const double h = grid.step();
    const detail::Psi1Table psi(n, h, params.alpha, params.gamma + params.zeta);
    const auto upper = detail::pow_table(n, h, params.eta);
    const bool sing = params.eta > params.zeta;
    const auto diag =
        sing ? detail::pow_table(n, h, -(params.eta - params.zeta)) : std::vector<double>{};
    NormResult best;
    for (int tau = stride; tau <= n; tau += stride)
        for (int taup = stride; taup < tau; taup += stride)
            for (int t = stride; t <= taup; t += stride) {
                if (sing && t == taup) continue;
                double w = upper[tau - taup];
                if (sing) w *= diag[taup - t];
                for (int s = 0; s < t; s += stride) {
                    const double r =
                        std::abs(z(s, t, taup, tau)) / (w * psi.at(taup - t, t - s));
                    if (r > best.value) best = {r, {s, -1, t, taup, tau}};
                }
            }
    return best;
}

// Discrete sup over grid Delta_4 (s < u < t <= tau) of |delta_u z^tau_{ts}| / psi1.
template <class D4>
NormResult delta_norm1(const Grid& grid, const RegularityParams& params, D4&& d,
                       int stride = 1) {
    validate_params(params);
    detail::check_grid(grid);
    const int n = grid.cells;
    const detail::Psi1Table psi(n, grid.step(), params.alpha, params.gamma);
    NormResult best;
    for (int tau = stride; tau <= n; tau += stride)
        for (int t = stride; t <= tau; t += stride)
            for (int u = stride; u < t; u += stride) {
                for (int s = 0; s < u; s += stride) {
                    const double r = std::abs(d(s, u, t, tau)) / psi.at(tau - t, t - s);
                    if (r > best.value) best = {r, {s, u, t, -1, tau}};
                }
            }
    return best;
}

// Discrete sup over grid Delta_5 (s < u < t <= tau' < tau) of |delta_u z^{tau tau'}_{ts}| / psi12.
template <class D5>
NormResult delta_norm12(const Grid& grid, const RegularityParams& params, D5&& d,
                        int stride = 1) {
    validate_params(params);
    detail::check_grid(grid);
    const int n = grid.cells;
    const double h = grid.step();
    const detail::Psi1Table psi(n, h, params.alpha, params.gamma + params.zeta);
    const auto upper = detail::pow_table(n, h, params.eta);
    const bool sing = params.eta > params.zeta;
    const auto diag =
        sing ? detail::pow_table(n, h, -(params.eta - params.zeta)) : std::vector<double>{};
    NormResult best;
    for (int tau = stride; tau <= n; tau += stride)
        for (int taup = stride; taup < tau; taup += stride)
            for (int t = stride; t <= taup; t += stride) {
                if (sing && t == taup) continue;
                double w = upper[tau - taup];
                if (sing) w *= diag[taup - t];
                for (int u = stride; u < t; u += stride)
                    for (int s = 0; s < u; s += stride) {
                        const double r =
                            std::abs(d(s, u, t, taup, tau)) / (w * psi.at(taup - t, t - s));
                        if (r > best.value) best = {r, {s, u, t, taup, tau}};
                    }
            }
    return best;
}

// U^tau_{(alpha,gamma),p,1}(z; eta, zeta): left-corner Riemann sum over grid
// cells of the open simplex {0 <= v < w < tau}, accumulated as a log-sum-exp
// since |z/psi|^{2p} spans hundreds of orders of magnitude at p ~ 20.
template <class Z3>
double grr_u1(const Grid& grid, const RegularityParams& params, int p, int tau_idx, Z3&& z) {
    validate_params(params);
    detail::check_grid(grid);
    if (p < 1) throw ParameterError("p must be at least 1");
    if (!(1 <= tau_idx && tau_idx <= grid.cells))
        throw ParameterError("tau must be an interior grid index");
    const int n = grid.cells;
    const double h = grid.step();
    const double gz = params.gamma + params.zeta;
    const auto lg = detail::log_table(n, h);
    const double rho = params.alpha - gz;
    const double ez = params.eta - params.zeta;

    detail::LogSumExp acc;
    for (int w = 1; w < tau_idx; ++w) {
        for (int v = 0; v < w; ++v) {
            const double zv = std::abs(z(v, w, tau_idx));
            if (zv == 0.0) continue;
            double lpsi = rho * lg[w - v];
            if (gz > 0.0)
                lpsi = std::min(lpsi, -gz * lg[tau_idx - w] + params.alpha * lg[w - v]);
            const double l =
                2.0 * p * (std::log(zv) + ez * lg[tau_idx - w] - lpsi) - 2.0 * lg[w - v];
            acc.add(l);
        }
    }
    const double ls = acc.log_value();
    if (ls == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp((ls + 2.0 * std::log(h)) / (2.0 * p));
}

namespace detail {

// Largest stride keeping at least min_tuples ordered 4-tuples; full resolution
// below 64 points.
inline int u12_stride(int tau_idx, long min_tuples) {
    if (tau_idx <= 64) return 1;
    int stride = 1;
    for (int cand = 2; cand <= tau_idx; ++cand) {
        const long m = tau_idx / cand;
        const long count = m * (m - 1) * (m - 2) * (m - 3) / 24;
        if (count < min_tuples) break;
        stride = cand;
    }
    return stride;
}

}  // namespace detail

// U^tau_{(alpha,gamma,eta,zeta),p,1,2}(z): quadruple Riemann sum over the open
// simplex {v < w < r' < r <= tau}, strided so that at least min_tuples tuples
// are visited on large grids (the estimate is then a lower-bound quadrature).
template <class Z4>
double grr_u12(const Grid& grid, const RegularityParams& params, int p, int tau_idx, Z4&& z,
               long min_tuples = 1000000) {
    validate_params(params);
    detail::check_grid(grid);
    if (p < 1) throw ParameterError("p must be at least 1");
    if (!(1 <= tau_idx && tau_idx <= grid.cells))
        throw ParameterError("tau must be an interior grid index");
    const int n = grid.cells;
    const double h = grid.step();
    const double gz = params.gamma + params.zeta;
    const auto lg = detail::log_table(n, h);
    const double rho = params.alpha - gz;
    const bool sing = params.eta > params.zeta;

    const int stride = detail::u12_stride(tau_idx, min_tuples);
    const int m = tau_idx / stride;

    detail::LogSumExp acc;
    for (int a = 0; a <= m - 3; ++a)
        for (int b = a + 1; b <= m - 2; ++b) {
            const int v = a * stride, w = b * stride;
            for (int c = b + 1; c <= m - 1; ++c) {
                const int rp = c * stride;
                double lpsi_base = rho * lg[w - v];
                if (gz > 0.0)
                    lpsi_base = std::min(lpsi_base, -gz * lg[rp - w] + params.alpha * lg[w - v]);
                if (sing) lpsi_base -= (params.eta - params.zeta) * lg[rp - w];
                for (int d = c + 1; d <= m; ++d) {
                    const int r = d * stride;
                    const double zv = std::abs(z(v, w, rp, r));
                    if (zv == 0.0) continue;
                    const double lpsi = params.eta * lg[r - rp] + lpsi_base;
                    const double l = 2.0 * p * (std::log(zv) - lpsi) - 2.0 * lg[w - v] -
                                     2.0 * lg[r - rp];
                    acc.add(l);
                }
            }
        }
    const double ls = acc.log_value();
    if (ls == -std::numeric_limits<double>::infinity()) return 0.0;
    return std::exp((ls + 4.0 * std::log(stride * h)) / (2.0 * p));
}

// Smallest integer p strictly above max(1/(alpha - kappa), 1/zeta).
int auto_grr_p(double alpha, double kappa, double zeta);

struct HolderReport {
    RegularityParams params{};
    double kappa = 0.0;
    int p = 0;
    double norm1 = 0.0, norm12 = 0.0;
    double delta_norm1 = 0.0, delta_norm12 = 0.0;
    double u1 = 0.0, u12 = 0.0;
    double grr_ratio1 = 0.0, grr_ratio12 = 0.0;
    ArgTuple norm1_arg{}, norm12_arg{};
};

namespace detail {

inline double grr_ratio(double num, double den) {
    if (num == 0.0) return 0.0;
    if (den == 0.0)
        throw VerificationError("GRR denominator vanished with nonzero norm");
    return num / den;
}

}  // namespace detail

// Empirical constants of the two GRR bounds at target exponent kappa < alpha.
// dn1/dn12 are the delta-norms of the field: dn1 at (kappa, gamma) and dn12 at
// (kappa, gamma, eta + 1/p, zeta + 1/p), both identically zero for level-1
// lifts. p = 0 selects auto_grr_p.
template <class Z3, class Z4>
HolderReport grr_check(const Grid& grid, const RegularityParams& params, double kappa, int p,
                       Z3&& z3, Z4&& z4, double dn1 = 0.0, double dn12 = 0.0) {
    validate_params(params);
    if (!(kappa > params.gamma && kappa < params.alpha))
        throw ParameterError("kappa must lie in (gamma, alpha)");
    if (p == 0) p = auto_grr_p(params.alpha, kappa, params.zeta);
    if (!(p > 1.0 / (params.alpha - kappa)) ||
        (params.zeta > 0.0 && !(p > 1.0 / params.zeta)))
        throw ParameterError("p must exceed max(1/(alpha - kappa), 1/zeta)");

    const RegularityParams pk{kappa, params.gamma, params.eta, params.zeta, params.strong};
    const RegularityParams pk0{kappa, params.gamma, 0.0, 0.0, false};

    HolderReport rep;
    rep.params = params;
    rep.kappa = kappa;
    rep.p = p;
    rep.delta_norm1 = dn1;
    rep.delta_norm12 = dn12;

    const NormResult n1 = volterra_norm1(grid, pk, z3);
    rep.norm1 = n1.value;
    rep.norm1_arg = n1.arg;
    rep.u1 = grr_u1(grid, pk0, p, grid.cells, z3);
    rep.grr_ratio1 = detail::grr_ratio(rep.norm1, rep.u1 + dn1);

    const NormResult n12 = volterra_norm12(grid, pk, z4);
    rep.norm12 = n12.value;
    rep.norm12_arg = n12.arg;
    rep.u12 = grr_u12(grid, pk, p, grid.cells, z4);
    const double tfac =
        std::pow(grid.horizon, 2.0 + params.alpha - kappa - 1.0 / p);
    rep.grr_ratio12 = detail::grr_ratio(rep.norm12, rep.u12 + dn12 * tfac);
    return rep;
}

}  // namespace volterra
