#include "doctest.h"

#include "volterra/errors.hpp"
#include "volterra/gaussian.hpp"
#include "volterra/montecarlo.hpp"
#include "volterra/parallel.hpp"

#include <cmath>
#include <string>
#include <vector>

using namespace volterra;

TEST_CASE("moment target and scaling mode names round-trip") {
    for (MomentTarget t : {MomentTarget::z1_var, MomentTarget::z1_12_var, MomentTarget::z2_var,
                           MomentTarget::z2_12_var, MomentTarget::z1_cov})
        CHECK(moment_target_from_string(to_string(t)) == t);
    CHECK_THROWS_AS(moment_target_from_string("z3_var"), ParameterError);
    for (ScalingMode m : {ScalingMode::diagonal, ScalingMode::fixed_tau})
        CHECK(scaling_mode_from_string(to_string(m)) == m);
    CHECK_THROWS_AS(scaling_mode_from_string("bogus"), ParameterError);
}

TEST_CASE("bm level-1 variance matches the kernel integral") {
    DriverSpec spec = DriverSpec::bm(1, 2024);
    McOptions opts;
    opts.cells = 32;
    MomentTuple tuple{0.0, 0.5, 1.0};
    MomentReport rep = estimate_moment(spec, 0.25, MomentTarget::z1_var, tuple, 20000, opts);
    REQUIRE(rep.oracle.has_value());
    CHECK(*rep.oracle == doctest::Approx(2.0 - std::sqrt(2.0)).epsilon(1e-12));
    CHECK(rep.std_err > 0.0);
    CHECK(std::abs(rep.estimate - *rep.oracle) <= 4.0 * rep.std_err);
    CHECK(rep.bound > 0.0);
    CHECK(rep.ratio == rep.estimate / rep.bound);
    CHECK(rep.samples == 20000);
}

TEST_CASE("fbm gamma zero level-1 variance is the plain increment law") {
    DriverSpec spec = DriverSpec::fbm(0.75, 1, 77);
    McOptions opts;
    opts.cells = 16;
    MomentTuple tuple{0.0, 0.5, 1.0};
    MomentReport rep = estimate_moment(spec, 0.0, MomentTarget::z1_var, tuple, 20000, opts);
    REQUIRE(rep.oracle.has_value());
    CHECK(*rep.oracle == doctest::Approx(std::pow(0.5, 1.5)).epsilon(1e-12));
    CHECK(std::abs(rep.estimate - *rep.oracle) <= 4.0 * rep.std_err);
}

TEST_CASE("degenerate tuples produce zero estimates with zero spread") {
    DriverSpec spec = DriverSpec::bm(1, 5);
    McOptions opts;
    opts.cells = 16;
    MomentTuple tuple{0.5, 0.5, 1.0};
    MomentReport rep = estimate_moment(spec, 0.25, MomentTarget::z1_var, tuple, 500, opts);
    CHECK(rep.estimate == 0.0);
    CHECK(rep.std_err == 0.0);
    CHECK(rep.ratio == 0.0);
    REQUIRE(rep.oracle.has_value());
    CHECK(*rep.oracle == 0.0);
}

TEST_CASE("primed level-1 target matches the quadrature oracle") {
    DriverSpec spec = DriverSpec::bm(1, 303);
    McOptions opts;
    opts.cells = 16;
    MomentTuple tuple{0.0, 0.5, 1.0, 0.75};
    MomentReport rep = estimate_moment(spec, 0.25, MomentTarget::z1_12_var, tuple, 20000, opts);
    REQUIRE(rep.oracle.has_value());
    IncrementSpec a{0.0, 0.5, 1.0}, b{0.0, 0.5, 0.75};
    double want = level1_exact_covariance(spec, 0.25, a, a) -
                  2.0 * level1_exact_covariance(spec, 0.25, a, b) +
                  level1_exact_covariance(spec, 0.25, b, b);
    CHECK(*rep.oracle == doctest::Approx(want).epsilon(1e-10));
    // The sampler is adapted, so the discrete variance is exact: the continuum
    // oracle differs by the left-point quadrature bias, which dominates the
    // Monte Carlo error at this resolution.
    double h = 1.0 / 16.0;
    double vdisc = 0.0;
    for (int k = 0; k < 8; ++k) {
        double r = k * h;
        double diff = std::pow(1.0 - r, -0.25) - std::pow(0.75 - r, -0.25);
        vdisc += diff * diff * h;
    }
    CHECK(std::abs(rep.estimate - vdisc) <= 4.0 * rep.std_err);
    CHECK(rep.bound > 0.0);

    MomentTuple bad{0.0, 0.5, 1.0, 0.25};
    CHECK_THROWS_AS(estimate_moment(spec, 0.25, MomentTarget::z1_12_var, bad, 100, opts),
                    OrderingError);
}

TEST_CASE("level-1 cross covariance matches the exact kernel value") {
    DriverSpec spec = DriverSpec::bm(1, 404);
    McOptions opts;
    opts.cells = 16;
    MomentTuple tuple{0.0, 0.25, 0.5, 1.0};  // (s, u, v, tau)
    MomentReport rep = estimate_moment(spec, 0.2, MomentTarget::z1_cov, tuple, 20000, opts);
    REQUIRE(rep.oracle.has_value());
    IncrementSpec a{0.0, 0.25, 1.0}, b{0.0, 0.5, 1.0};
    CHECK(*rep.oracle == level1_exact_covariance(spec, 0.2, a, b));
    CHECK(std::abs(rep.estimate - *rep.oracle) <= 4.0 * rep.std_err);

    MomentTuple bad{0.25, 0.0, 0.5, 1.0};
    CHECK_THROWS_AS(estimate_moment(spec, 0.2, MomentTarget::z1_cov, bad, 100, opts),
                    OrderingError);
}

TEST_CASE("bm level-2 estimates match the discrete isometry exactly") {
    DriverSpec spec = DriverSpec::bm(2, 909);
    McOptions opts;
    opts.cells = 16;
    const double gamma = 0.2, h = 1.0 / 16.0;
    MomentTuple tuple{0.0, 0.5, 1.0};

    // Exact variance of the discrete field: no discretization gap to argue away.
    double exact = 0.0;
    for (int k = 0; k < 8; ++k) {
        double inner = 0.0;
        for (int l = 0; l < k; ++l) inner += std::pow((k - l) * h, -2.0 * gamma) * h;
        double w = std::pow(1.0 - k * h, -gamma);
        exact += w * w * inner * h;
    }
    MomentReport rep = estimate_moment(spec, gamma, MomentTarget::z2_var, tuple, 20000, opts);
    CHECK(std::abs(rep.estimate - exact) <= 4.0 * rep.std_err);
    REQUIRE(rep.oracle.has_value());  // continuum oracle rides along
    CHECK(*rep.oracle == doctest::Approx(bm_z2_isometry_oracle(gamma, tuple, false)));

    // Primed variant against the kernel-difference weights.
    MomentTuple primed{0.0, 0.5, 1.0, 0.75};
    double exact12 = 0.0;
    for (int k = 0; k < 8; ++k) {
        double inner = 0.0;
        for (int l = 0; l < k; ++l) inner += std::pow((k - l) * h, -2.0 * gamma) * h;
        double w = std::pow(1.0 - k * h, -gamma) - std::pow(0.75 - k * h, -gamma);
        exact12 += w * w * inner * h;
    }
    McOptions popts = opts;
    popts.eta = 0.6;
    popts.zeta = 0.1;
    MomentReport rep12 =
        estimate_moment(spec, gamma, MomentTarget::z2_12_var, primed, 20000, popts);
    CHECK(std::abs(rep12.estimate - exact12) <= 4.0 * rep12.std_err);
    CHECK(rep12.bound > 0.0);
}

TEST_CASE("fbm level-2 reports carry a bound but no closed oracle") {
    DriverSpec spec = DriverSpec::fbm(0.75, 2, 11);
    McOptions opts;
    opts.cells = 16;
    MomentTuple tuple{0.0, 0.5, 1.0};
    MomentReport rep = estimate_moment(spec, 0.2, MomentTarget::z2_var, tuple, 2000, opts);
    CHECK(!rep.oracle.has_value());
    CHECK(rep.estimate > 0.0);
    CHECK(rep.bound > 0.0);
    CHECK(rep.ratio == rep.estimate / rep.bound);
}

TEST_CASE("jackknife spread shrinks like the square root of the sample count") {
    DriverSpec spec = DriverSpec::bm(1, 6001);
    McOptions opts;
    opts.cells = 16;
    MomentTuple tuple{0.0, 0.5, 1.0};
    MomentReport small = estimate_moment(spec, 0.25, MomentTarget::z1_var, tuple, 2000, opts);
    MomentReport large = estimate_moment(spec, 0.25, MomentTarget::z1_var, tuple, 8000, opts);
    double shrink = small.std_err / large.std_err;
    CHECK(shrink >= 2.0 / 1.2);
    CHECK(shrink <= 2.0 * 1.2);
}

TEST_CASE("estimates are bitwise reproducible across worker counts") {
    DriverSpec spec = DriverSpec::fbm(0.75, 2, 515);
    McOptions opts;
    opts.cells = 32;
    MomentTuple tuple{0.0, 0.5, 1.0};
    set_worker_override(1);
    MomentReport a = estimate_moment(spec, 0.2, MomentTarget::z2_var, tuple, 4000, opts);
    set_worker_override(4);
    MomentReport b = estimate_moment(spec, 0.2, MomentTarget::z2_var, tuple, 4000, opts);
    set_worker_override(0);
    CHECK(a.estimate == b.estimate);
    CHECK(a.std_err == b.std_err);
}

TEST_CASE("regime violations carry the constraint name") {
    McOptions opts;
    opts.cells = 16;
    MomentTuple tuple{0.0, 0.5, 1.0};
    CHECK_THROWS_WITH_AS(
        estimate_moment(DriverSpec::bm(1, 1), 0.5, MomentTarget::z1_var, tuple, 10, opts),
        "bm regime requires gamma < 1/2", ParameterError);
    CHECK_THROWS_WITH_AS(
        estimate_moment(DriverSpec::fbm(0.75, 2, 1), 0.55, MomentTarget::z2_var, tuple, 10, opts),
        "stratonovich regime requires gamma < 2H - 1", ParameterError);
    CHECK_THROWS_WITH_AS(
        estimate_moment(DriverSpec::fbm(0.75, 1, 1), 0.8, MomentTarget::z1_var, tuple, 10, opts),
        "fbm driver requires gamma < hurst", ParameterError);
    CHECK_THROWS_AS(
        estimate_moment(DriverSpec::bm(1, 1), 0.25, MomentTarget::z1_var, tuple, 0, opts),
        ParameterError);
    MomentTuple off{0.3, 0.5, 1.0};
    CHECK_THROWS_AS(
        estimate_moment(DriverSpec::bm(1, 1), 0.25, MomentTarget::z1_var, off, 10, opts),
        ParameterError);
}

TEST_CASE("diagonal scaling recovers the exact self-similar slopes") {
    std::vector<double> lags;
    for (int m = 1; m <= 6; ++m) lags.push_back(std::pow(2.0, -m));

    McOptions opts;
    opts.cells_per_lag = 64;
    {
        DriverSpec spec = DriverSpec::fbm(0.75, 1, 99);
        ScalingReport rep = scaling_exponent(spec, 0.2, MomentTarget::z1_var,
                                             ScalingMode::diagonal, lags, 400, opts);
        CHECK(rep.exponent_expected == doctest::Approx(1.1).epsilon(1e-14));
        CHECK(std::abs(rep.exponent_est - 1.1) <= 1e-6);
        CHECK(rep.r_squared >= 0.999999);
        REQUIRE(rep.lags.size() == 6);
        REQUIRE(rep.variances.size() == 6);
    }
    {
        DriverSpec spec = DriverSpec::bm(2, 98);
        ScalingReport rep = scaling_exponent(spec, 0.25, MomentTarget::z2_var,
                                             ScalingMode::diagonal, lags, 400, opts);
        CHECK(rep.exponent_expected == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(std::abs(rep.exponent_est - 1.0) <= 1e-6);
        CHECK(rep.r_squared >= 0.999999);
    }
}

TEST_CASE("fixed-tau scaling sees the undamped Hoelder exponent") {
    std::vector<double> lags;
    for (int m = 2; m <= 7; ++m) lags.push_back(std::pow(2.0, -m));
    DriverSpec spec = DriverSpec::fbm(0.75, 1, 97);
    McOptions opts;
    opts.cells = 128;
    ScalingReport rep = scaling_exponent(spec, 0.0, MomentTarget::z1_var, ScalingMode::fixed_tau,
                                         lags, 2000, opts);
    CHECK(rep.exponent_expected == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(std::abs(rep.exponent_est - 1.5) <= 0.1);
    CHECK(rep.r_squared >= 0.99);
}

TEST_CASE("scaling rejects unsupported configurations") {
    DriverSpec spec = DriverSpec::bm(1, 1);
    McOptions opts;
    std::vector<double> lags{0.5, 0.25, 0.125, 0.0625};
    CHECK_THROWS_AS(scaling_exponent(spec, 0.2, MomentTarget::z1_var, ScalingMode::diagonal, lags,
                                     10, opts),
                    ParameterError);
    std::vector<double> lags5{0.5, 0.25, 0.125, 0.0625, 0.03125};
    CHECK_THROWS_AS(scaling_exponent(spec, 0.2, MomentTarget::z1_cov, ScalingMode::diagonal,
                                     lags5, 10, opts),
                    ParameterError);
    std::vector<double> big{2.0, 0.5, 0.25, 0.125, 0.0625};
    CHECK_THROWS_AS(scaling_exponent(spec, 0.2, MomentTarget::z1_var, ScalingMode::fixed_tau, big,
                                     10, opts),
                    ParameterError);
}

TEST_CASE("bound ratio surfaces are finite and classical at gamma zero") {
    McOptions opts;
    opts.cells = 64;
    {
        DriverSpec spec = DriverSpec::bm(2, 2121);
        BoundRatioSurface surf =
            bound_ratio_surface(spec, 0.25, MomentTarget::z1_var, 4000, opts);
        REQUIRE(!surf.entries.empty());
        double mn = 0.0, mf = 0.0;
        for (const auto& e : surf.entries) {
            CHECK(std::isfinite(e.ratio));
            CHECK(e.ratio > 0.0);
            CHECK(e.bound > 0.0);
            if (e.stratum == "near")
                mn = std::max(mn, e.ratio);
            else
                mf = std::max(mf, e.ratio);
        }
        CHECK(surf.max_near == mn);
        CHECK(surf.max_far == mf);
    }
    {
        DriverSpec spec = DriverSpec::fbm(0.75, 1, 2222);
        BoundRatioSurface surf = bound_ratio_surface(spec, 0.0, MomentTarget::z1_var, 4000, opts);
        for (const auto& e : surf.entries)
            CHECK(std::abs(e.ratio - 1.0) <= 0.12);  // psi^2 is the exact law here
    }
    {
        DriverSpec spec = DriverSpec::fbm(0.75, 2, 2323);
        McOptions popts = opts;
        popts.eta = 0.6;
        popts.zeta = 0.1;
        BoundRatioSurface surf =
            bound_ratio_surface(spec, 0.2, MomentTarget::z2_12_var, 1000, popts);
        for (const auto& e : surf.entries) {
            CHECK(std::isfinite(e.ratio));
            CHECK(e.ratio >= 0.0);
        }
    }
    CHECK_THROWS_AS(
        bound_ratio_surface(DriverSpec::bm(1, 1), 0.2, MomentTarget::z1_cov, 100, opts),
        ParameterError);
}

TEST_CASE("isometry oracle closed forms and guards") {
    MomentTuple tuple{0.0, 1.0, 2.0};
    CHECK(bm_z2_isometry_oracle(0.0, tuple, false) == doctest::Approx(0.5).epsilon(1e-12));
    MomentTuple flat{0.5, 0.5, 1.0};
    CHECK(bm_z2_isometry_oracle(0.25, flat, false) == 0.0);
    MomentTuple primed{0.0, 0.5, 1.0, 0.75};
    CHECK(bm_z2_isometry_oracle(0.2, primed, true) > 0.0);
    CHECK_THROWS_AS(bm_z2_isometry_oracle(0.5, tuple, false), ParameterError);
}
