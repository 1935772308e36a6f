#include "volterra/montecarlo.hpp"

#include <algorithm>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <limits>
#include <map>

#include "volterra/errors.hpp"
#include "volterra/parallel.hpp"
#include "volterra/regularity.hpp"

namespace volterra {

std::string to_string(MomentTarget target) {
    switch (target) {
        case MomentTarget::z1_var: return "z1_var";
        case MomentTarget::z1_12_var: return "z1_12_var";
        case MomentTarget::z2_var: return "z2_var";
        case MomentTarget::z2_12_var: return "z2_12_var";
        case MomentTarget::z1_cov: return "z1_cov";
    }
    return "?";
}

MomentTarget moment_target_from_string(const std::string& name) {
    if (name == "z1_var") return MomentTarget::z1_var;
    if (name == "z1_12_var") return MomentTarget::z1_12_var;
    if (name == "z2_var") return MomentTarget::z2_var;
    if (name == "z2_12_var") return MomentTarget::z2_12_var;
    if (name == "z1_cov") return MomentTarget::z1_cov;
    throw ParameterError("unknown moment target: " + name);
}

std::string to_string(ScalingMode mode) {
    return mode == ScalingMode::diagonal ? "diagonal" : "fixed_tau";
}

ScalingMode scaling_mode_from_string(const std::string& name) {
    if (name == "diagonal") return ScalingMode::diagonal;
    if (name == "fixed_tau") return ScalingMode::fixed_tau;
    throw ParameterError("unknown scaling mode: " + name);
}

namespace {

bool is_z2(MomentTarget t) {
    return t == MomentTarget::z2_var || t == MomentTarget::z2_12_var;
}
bool is_primed(MomentTarget t) {
    return t == MomentTarget::z1_12_var || t == MomentTarget::z2_12_var;
}

void check_regime(const DriverSpec& spec, double gamma, MomentTarget target) {
    if (!(gamma >= 0.0)) throw ParameterError("gamma must be nonnegative");
    if (spec.kind == DriverKind::bm) {
        if (!(gamma < 0.5)) throw ParameterError("bm regime requires gamma < 1/2");
    } else if (is_z2(target)) {
        if (!(gamma < 2.0 * spec.hurst - 1.0))
            throw ParameterError("stratonovich regime requires gamma < 2H - 1");
    } else if (!(gamma < spec.hurst)) {
        throw ParameterError("fbm driver requires gamma < hurst");
    }
}

double kernel_left(double tau, double tk, double gamma) { return std::pow(tau - tk, -gamma); }

double kernel_avg(double tau, double tk, double h, double gamma) {
    const double e = 1.0 - gamma;
    return (std::pow(tau - tk, e) - std::pow(tau - (tk + h), e)) / (e * h);
}

// Precomputed per-tuple evaluation: outer weights over the increment window.
struct TuplePlan {
    int si = 0, ti = 0;
    std::vector<double> w;   // weight per cell k in [si, ti)
    int vi = 0;              // z1_cov second window end
    std::vector<double> w2;  // z1_cov weights over [si, vi)
};

TuplePlan build_plan(const Grid& grid, double gamma, MomentTarget target,
                     const MomentTuple& tu, bool mollified) {
    TuplePlan plan;
    const double h = grid.step();
    if (target == MomentTarget::z1_cov) {
        if (!(tu.s <= tu.t && tu.t <= tu.tau && tu.tau <= tu.tau_prime))
            throw OrderingError("z1_cov tuple requires s <= u <= v <= tau");
        plan.si = grid.index_of(tu.s);
        plan.ti = grid.index_of(tu.t);
        plan.vi = grid.index_of(tu.tau);
        const double tau = tu.tau_prime;
        plan.w.resize(plan.ti - plan.si);
        for (int k = plan.si; k < plan.ti; ++k)
            plan.w[k - plan.si] = kernel_left(tau, grid.time(k), gamma);
        plan.w2.resize(plan.vi - plan.si);
        for (int k = plan.si; k < plan.vi; ++k)
            plan.w2[k - plan.si] = kernel_left(tau, grid.time(k), gamma);
        return plan;
    }

    if (!(tu.s <= tu.t && tu.t <= tu.tau))
        throw OrderingError("moment tuple requires s <= t <= tau");
    const bool primed = is_primed(target);
    if (primed && !(tu.t <= tu.tau_prime && tu.tau_prime <= tu.tau))
        throw OrderingError("primed tuple requires t <= tau' <= tau");
    plan.si = grid.index_of(tu.s);
    plan.ti = grid.index_of(tu.t);
    plan.w.resize(plan.ti - plan.si);
    for (int k = plan.si; k < plan.ti; ++k) {
        const double tk = grid.time(k);
        double w;
        if (is_z2(target)) {
            w = mollified ? kernel_avg(tu.tau, tk, h, gamma) : kernel_left(tu.tau, tk, gamma);
            if (primed)
                w -= mollified ? kernel_avg(tu.tau_prime, tk, h, gamma)
                               : kernel_left(tu.tau_prime, tk, gamma);
        } else {
            w = kernel_left(tu.tau, tk, gamma);
            if (primed) w -= kernel_left(tu.tau_prime, tk, gamma);
        }
        plan.w[k - plan.si] = w;
    }
    return plan;
}

// values[tuple][sample], filled in parallel with one stream per (sample,
// component); the reduction over samples happens sequentially downstream, so
// results do not depend on the worker count.
std::vector<std::vector<double>> evaluate_tuples(const DriverSpec& spec, double gamma,
                                                 MomentTarget target, const Grid& grid,
                                                 const std::vector<TuplePlan>& plans,
                                                 long samples, const McOptions& opts,
                                                 bool mollified) {
    const int n = grid.cells;
    const bool z2 = is_z2(target);
    const int ci = opts.component_i;
    const int cj = z2 ? opts.component_j : opts.component_i;
    if (ci < 0 || ci >= spec.dim || cj < 0 || cj >= spec.dim)
        throw ParameterError("component index out of range");
    if (samples > std::numeric_limits<int>::max())
        throw ParameterError("sample count too large");
    const int ns = static_cast<int>(samples);

    GaussianSampler sampler(spec, grid);
    const double h = grid.step();
    const double cself = std::pow(h, -gamma) / ((1.0 - gamma) * (2.0 - gamma));

    // inner kernel triangles per distinct anchor s
    struct Inner {
        int si = 0, ti_max = 0;
        std::vector<double> kin;  // (t_k - t_l)^{-gamma}, l in [si, k)
        std::vector<int> plan_ids;
    };
    std::vector<Inner> inners;
    if (z2) {
        std::map<int, std::size_t> by_anchor;
        for (std::size_t p = 0; p < plans.size(); ++p) {
            auto [it, added] = by_anchor.try_emplace(plans[p].si, inners.size());
            if (added) inners.push_back({plans[p].si, plans[p].ti, {}, {}});
            Inner& in = inners[it->second];
            in.ti_max = std::max(in.ti_max, plans[p].ti);
            in.plan_ids.push_back(static_cast<int>(p));
        }
        for (Inner& in : inners) {
            const int len = in.ti_max - in.si;
            in.kin.resize(static_cast<std::size_t>(len) * (len - 1) / 2 + 1);
            for (int k = in.si + 1; k < in.ti_max; ++k) {
                const int dk = k - in.si;
                double* row = in.kin.data() + static_cast<std::size_t>(dk) * (dk - 1) / 2;
                for (int l = in.si; l < k; ++l)
                    row[l - in.si] = kernel_left(grid.time(k), grid.time(l), gamma);
            }
        }
    }

    std::vector<std::vector<double>> values(plans.size(),
                                            std::vector<double>(static_cast<std::size_t>(samples)));
    parallel_for(0, ns, [&](int m) {
        thread_local std::vector<double> inc_i, inc_j, z1d;
        inc_i.resize(static_cast<std::size_t>(n));
        sampler.fill_increments(static_cast<std::uint64_t>(m), ci, inc_i);
        const std::vector<double>* outer = &inc_i;
        if (z2 && cj != ci) {
            inc_j.resize(static_cast<std::size_t>(n));
            sampler.fill_increments(static_cast<std::uint64_t>(m), cj, inc_j);
            outer = &inc_j;
        }
        if (!z2) {
            for (std::size_t p = 0; p < plans.size(); ++p) {
                const TuplePlan& pl = plans[p];
                double acc = 0.0;
                for (int k = pl.si; k < pl.ti; ++k) acc += pl.w[k - pl.si] * inc_i[k];
                if (target == MomentTarget::z1_cov) {
                    double acc2 = 0.0;
                    for (int k = pl.si; k < pl.vi; ++k) acc2 += pl.w2[k - pl.si] * inc_i[k];
                    values[p][m] = acc * acc2;
                } else {
                    values[p][m] = acc * acc;
                }
            }
            return;
        }
        for (const Inner& in : inners) {
            const int len = in.ti_max - in.si;
            z1d.assign(static_cast<std::size_t>(std::max(len, 1)), 0.0);
            for (int k = in.si + 1; k < in.ti_max; ++k) {
                const int dk = k - in.si;
                const double* row = in.kin.data() + static_cast<std::size_t>(dk) * (dk - 1) / 2;
                double acc = 0.0;
                for (int l = in.si; l < k; ++l) acc += row[l - in.si] * inc_i[l];
                z1d[dk] = acc;
            }
            for (int pid : in.plan_ids) {
                const TuplePlan& pl = plans[pid];
                double acc = 0.0;
                for (int k = pl.si; k < pl.ti; ++k) {
                    double g = z1d[k - in.si];
                    if (mollified) g += cself * inc_i[k];
                    acc += pl.w[k - pl.si] * g * (*outer)[k];
                }
                values[pid][m] = acc * acc;
            }
        }
    });
    return values;
}

struct MeanSe {
    double mean = 0.0, se = 0.0;
};

MeanSe jackknife(const std::vector<double>& x, int blocks) {
    const long n = static_cast<long>(x.size());
    if (n == 0) return {};
    double total = 0.0;
    for (double v : x) total += v;
    const double mean = total / static_cast<double>(n);
    const long b = std::min<long>(blocks, n);
    if (b < 2) return {mean, 0.0};

    std::vector<double> theta(static_cast<std::size_t>(b));
    double tbar = 0.0;
    for (long j = 0; j < b; ++j) {
        const long lo = n * j / b, hi = n * (j + 1) / b;
        double s = 0.0;
        for (long k = lo; k < hi; ++k) s += x[k];
        theta[j] = (total - s) / static_cast<double>(n - (hi - lo));
        tbar += theta[j];
    }
    tbar /= static_cast<double>(b);
    double ss = 0.0;
    for (double t : theta) ss += (t - tbar) * (t - tbar);
    return {mean, std::sqrt(ss * static_cast<double>(b - 1) / static_cast<double>(b))};
}

bool mollified_target(const DriverSpec& spec, MomentTarget target, const McOptions& opts) {
    return is_z2(target) && spec.kind == DriverKind::fbm &&
           opts.component_i == opts.component_j;
}

std::optional<double> moment_oracle(const DriverSpec& spec, double gamma, MomentTarget target,
                                    const MomentTuple& tu) {
    switch (target) {
        case MomentTarget::z1_var: {
            if (tu.s == tu.t) return 0.0;
            const IncrementSpec a{tu.s, tu.t, tu.tau};
            return level1_exact_covariance(spec, gamma, a, a);
        }
        case MomentTarget::z1_12_var: {
            if (tu.s == tu.t) return 0.0;
            const IncrementSpec a{tu.s, tu.t, tu.tau};
            const IncrementSpec b{tu.s, tu.t, tu.tau_prime};
            return level1_exact_covariance(spec, gamma, a, a) -
                   2.0 * level1_exact_covariance(spec, gamma, a, b) +
                   level1_exact_covariance(spec, gamma, b, b);
        }
        case MomentTarget::z1_cov: {
            if (tu.s == tu.t || tu.s == tu.tau) return 0.0;
            const IncrementSpec a{tu.s, tu.t, tu.tau_prime};
            const IncrementSpec b{tu.s, tu.tau, tu.tau_prime};
            return level1_exact_covariance(spec, gamma, a, b);
        }
        case MomentTarget::z2_var:
            if (spec.kind == DriverKind::bm)
                return bm_z2_isometry_oracle(gamma, tu, false);
            return std::nullopt;
        case MomentTarget::z2_12_var:
            if (spec.kind == DriverKind::bm)
                return bm_z2_isometry_oracle(gamma, tu, true);
            return std::nullopt;
    }
    return std::nullopt;
}

struct LinFit {
    double slope = 0.0, intercept = 0.0, r_squared = 1.0;
};

LinFit fit_log_log(const std::vector<double>& lags, const std::vector<double>& vars) {
    const std::size_t n = lags.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::vector<double> xs(n), ys(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!(vars[k] > 0.0))
            throw NumericalError("nonpositive variance in scaling regression");
        xs[k] = std::log(lags[k]);
        ys[k] = std::log(vars[k]);
        sx += xs[k];
        sy += ys[k];
        sxx += xs[k] * xs[k];
        sxy += xs[k] * ys[k];
    }
    const double d = n * sxx - sx * sx;
    if (d == 0.0) throw NumericalError("degenerate lag set in scaling regression");
    LinFit fit;
    fit.slope = (n * sxy - sx * sy) / d;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    const double ybar = sy / n;
    for (std::size_t k = 0; k < n; ++k) {
        const double e = ys[k] - (fit.intercept + fit.slope * xs[k]);
        ss_res += e * e;
        ss_tot += (ys[k] - ybar) * (ys[k] - ybar);
    }
    fit.r_squared = ss_tot == 0.0 ? 1.0 : 1.0 - ss_res / ss_tot;
    return fit;
}

}  // namespace

MomentReport estimate_moment(const DriverSpec& spec, double gamma, MomentTarget target,
                             const MomentTuple& tuple, long samples, const McOptions& opts) {
    check_regime(spec, gamma, target);
    if (samples < 1) throw ParameterError("samples must be positive");
    const Grid grid = make_uniform_grid(opts.horizon, opts.cells);
    const bool moll = mollified_target(spec, target, opts);
    const std::vector<TuplePlan> plans{build_plan(grid, gamma, target, tuple, moll)};
    const auto values = evaluate_tuples(spec, gamma, target, grid, plans, samples, opts, moll);
    const MeanSe ms = jackknife(values[0], opts.blocks);

    MomentReport rep;
    rep.target = target;
    rep.tuple = tuple;
    rep.estimate = ms.mean;
    rep.std_err = ms.se;
    rep.samples = samples;
    rep.oracle = moment_oracle(spec, gamma, target, tuple);
    rep.bound = moment_bound(spec, gamma, target, tuple, opts.eta, opts.zeta);
    rep.ratio = rep.bound > 0.0 ? rep.estimate / rep.bound : 0.0;
    return rep;
}

double moment_bound(const DriverSpec& spec, double gamma, MomentTarget target,
                    const MomentTuple& tuple, double eta, double zeta) {
    const double heff = spec.effective_hurst();
    double psi;
    if (target == MomentTarget::z1_cov) {
        psi = psi1(heff, gamma, tuple.tau_prime, tuple.tau, tuple.s);
    } else {
        const double a = is_z2(target) ? 2.0 * heff - gamma : heff;
        psi = is_primed(target)
                  ? psi12(a, gamma, eta, zeta, tuple.tau, tuple.tau_prime, tuple.t, tuple.s)
                  : psi1(a, gamma, tuple.tau, tuple.t, tuple.s);
    }
    return psi * psi;
}

double bm_z2_isometry_oracle(double gamma, const MomentTuple& tuple, bool primed) {
    if (!(gamma >= 0.0 && gamma < 0.5))
        throw ParameterError("bm regime requires gamma < 1/2");
    if (tuple.s == tuple.t) return 0.0;
    boost::math::quadrature::tanh_sinh<double> quad;
    const double e = 1.0 - 2.0 * gamma;
    const double integral = quad.integrate(
        [&](double r) {
            double k;
            if (primed) {
                const double d = std::pow(tuple.tau - r, -gamma) -
                                 std::pow(tuple.tau_prime - r, -gamma);
                k = d * d;
            } else {
                k = std::pow(tuple.tau - r, -2.0 * gamma);
            }
            return k * std::pow(r - tuple.s, e);
        },
        tuple.s, tuple.t);
    return integral / e;
}

ScalingReport scaling_exponent(const DriverSpec& spec, double gamma, MomentTarget target,
                               ScalingMode mode, const std::vector<double>& lags, long samples,
                               const McOptions& opts) {
    if (target != MomentTarget::z1_var && target != MomentTarget::z2_var)
        throw ParameterError("scaling supports the z1_var and z2_var targets");
    check_regime(spec, gamma, target);
    if (lags.size() < 5) throw ParameterError("scaling regression requires at least 5 lags");
    for (double lag : lags)
        if (!(lag > 0.0 && lag <= opts.horizon))
            throw ParameterError("lags must lie in (0, horizon]");

    const bool moll = mollified_target(spec, target, opts);
    std::vector<double> vars(lags.size());
    if (mode == ScalingMode::diagonal) {
        for (std::size_t k = 0; k < lags.size(); ++k) {
            const Grid g = make_uniform_grid(lags[k], opts.cells_per_lag);
            const MomentTuple tu{0.0, lags[k], lags[k]};
            const std::vector<TuplePlan> plans{build_plan(g, gamma, target, tu, moll)};
            const auto values = evaluate_tuples(spec, gamma, target, g, plans, samples, opts, moll);
            vars[k] = jackknife(values[0], opts.blocks).mean;
        }
    } else {
        const Grid g = make_uniform_grid(opts.horizon, opts.cells);
        std::vector<TuplePlan> plans;
        plans.reserve(lags.size());
        for (double lag : lags)
            plans.push_back(build_plan(g, gamma, target, MomentTuple{0.0, lag, opts.horizon}, moll));
        const auto values = evaluate_tuples(spec, gamma, target, g, plans, samples, opts, moll);
        for (std::size_t k = 0; k < lags.size(); ++k)
            vars[k] = jackknife(values[k], opts.blocks).mean;
    }

    const LinFit fit = fit_log_log(lags, vars);
    ScalingReport rep;
    rep.target = target;
    rep.mode = mode;
    rep.exponent_est = fit.slope;
    const double heff = spec.effective_hurst();
    const int level = target == MomentTarget::z2_var ? 2 : 1;
    // Diagonal lags feel the kernel singularity (slope 2k(H-gamma)); at fixed
    // tau the kernel stays regular and only the Hoelder exponent survives.
    rep.exponent_expected = mode == ScalingMode::diagonal
                                ? 2.0 * level * (heff - gamma)
                                : 2.0 * (level * heff - (level - 1) * gamma);
    rep.r_squared = fit.r_squared;
    rep.lags = lags;
    rep.variances = vars;
    return rep;
}

BoundRatioSurface bound_ratio_surface(const DriverSpec& spec, double gamma, MomentTarget target,
                                      long samples, const McOptions& opts) {
    if (target == MomentTarget::z1_cov)
        throw ParameterError("bound ratio surface supports variance targets");
    check_regime(spec, gamma, target);
    const Grid grid = make_uniform_grid(opts.horizon, opts.cells);
    const double T = opts.horizon;
    const double h = grid.step();
    const bool moll = mollified_target(spec, target, opts);
    const bool primed = is_primed(target);

    std::vector<TuplePlan> plans;
    std::vector<BoundRatioEntry> entries;
    for (int stratum = 0; stratum < 2; ++stratum) {
        for (double tf : {0.25, 0.5, 0.75}) {
            for (double sf : {0.0, 0.5}) {
                const double t = T * tf;
                MomentTuple tu;
                tu.s = t * sf;
                tu.t = t;
                tu.tau = stratum == 0 ? t + h : t + T / 2.0;
                if (primed) tu.tau_prime = 0.5 * (t + tu.tau);
                plans.push_back(build_plan(grid, gamma, target, tu, moll));
                BoundRatioEntry e;
                e.stratum = stratum == 0 ? "near" : "far";
                e.tuple = tu;
                entries.push_back(std::move(e));
            }
        }
    }

    const auto values = evaluate_tuples(spec, gamma, target, grid, plans, samples, opts, moll);
    BoundRatioSurface surf;
    surf.target = target;
    for (std::size_t k = 0; k < entries.size(); ++k) {
        BoundRatioEntry& e = entries[k];
        e.estimate = jackknife(values[k], opts.blocks).mean;
        e.bound = moment_bound(spec, gamma, target, e.tuple, opts.eta, opts.zeta);
        e.ratio = e.bound > 0.0 ? e.estimate / e.bound : 0.0;
        double& peak = e.stratum == "near" ? surf.max_near : surf.max_far;
        peak = std::max(peak, e.ratio);
        surf.entries.push_back(e);
    }
    return surf;
}

}  // namespace volterra
