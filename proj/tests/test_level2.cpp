#include "doctest.h"

#include "volterra/errors.hpp"
#include "volterra/gaussian.hpp"
#include "volterra/grid.hpp"
#include "volterra/level1.hpp"
#include "volterra/level2.hpp"

#include <cmath>
#include <vector>

using namespace volterra;

namespace {

PathSample linear_path(double horizon, int cells) {
    Grid g = make_uniform_grid(horizon, cells);
    return PathSample::from_function(g, 1, [](int, double t) { return t; });
}

double lsq_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(x.size());
    my /= static_cast<double>(x.size());
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        num += (x[i] - mx) * (y[i] - my);
        den += (x[i] - mx) * (x[i] - mx);
    }
    return num / den;
}

}  // namespace

TEST_CASE("deterministic linear driver at gamma zero") {
    PathSample p = linear_path(1.0, 32);
    Level1Field z1 = build_level1(p, 0.0);
    const double h = p.grid.step();

    // Mollified build integrates r dr exactly: t^2/2 for every tau.
    Level2Field strat = build_level2(z1, p, Level2Scheme::fbm_stratonovich);
    for (int tau = 1; tau <= 32; ++tau)
        for (int t = 0; t <= tau; ++t) {
            double tt = p.grid.time(t);
            CHECK(strat.base(0, 0, t, tau) == doctest::Approx(tt * tt / 2.0).epsilon(1e-13));
        }

    // Left-point build gives the lower Riemann sum t(t-h)/2.
    Level2Field ito = build_level2(z1, p, Level2Scheme::bm_ito);
    for (int t = 0; t <= 32; ++t) {
        double tt = p.grid.time(t);
        CHECK(ito.base(0, 0, t, 32) == doctest::Approx(tt * (tt - h) / 2.0).epsilon(1e-13));
    }
}

TEST_CASE("fbm diagonal at gamma zero is the squared path") {
    Grid g = make_uniform_grid(1.0, 32);
    GaussianSampler smp(DriverSpec::fbm(0.75, 1, 21), g);
    PathSample p = smp.sample(0);
    Level1Field z1 = build_level1(p, 0.0);
    Level2Field f2 = build_level2(z1, p, Level2Scheme::fbm_stratonovich);
    double scale = std::max(1.0, f2.max_abs());
    for (int tau = 1; tau <= 32; ++tau)
        for (int t = 0; t <= tau; ++t) {
            double b = p.values[0][static_cast<std::size_t>(t)];
            CHECK(std::abs(f2.base(0, 0, t, tau) - b * b / 2.0) <= 1e-12 * scale);
        }
}

TEST_CASE("chen residual vanishes for every stored base") {
    SUBCASE("bm ito") {
        Grid g = make_uniform_grid(1.0, 32);
        GaussianSampler smp(DriverSpec::bm(2, 31), g);
        PathSample p = smp.sample(0);
        Level1Field z1 = build_level1(p, 0.25);
        Level2Field f2 = build_level2(z1, p, Level2Scheme::bm_ito);
        CHECK(chen_max_residual(f2, z1) <= 1e-12 * f2.max_abs());
    }
    SUBCASE("fbm stratonovich with mollified diagonal") {
        Grid g = make_uniform_grid(1.0, 32);
        GaussianSampler smp(DriverSpec::fbm(0.75, 2, 32), g);
        PathSample p = smp.sample(0);
        Level1Field z1 = build_level1(p, 0.2);
        Level2Field f2 = build_level2(z1, p, Level2Scheme::fbm_stratonovich);
        CHECK(chen_max_residual(f2, z1) <= 1e-12 * f2.max_abs());
    }
}

TEST_CASE("increment reconstruction anchors and degenerates correctly") {
    Grid g = make_uniform_grid(1.0, 16);
    GaussianSampler smp(DriverSpec::bm(2, 41), g);
    PathSample p = smp.sample(0);
    Level1Field z1 = build_level1(p, 0.2);
    Level2Field f2 = build_level2(z1, p, Level2Scheme::bm_ito);

    for (int tau = 1; tau <= 16; ++tau) {
        std::vector<double> inc = level2_increment(f2, z1, 0, tau, tau);
        for (int i = 0; i < 2; ++i)
            for (int j = 0; j < 2; ++j)
                CHECK(inc[static_cast<std::size_t>(i) * 2 + j] == f2.base(i, j, tau, tau));
        std::vector<double> zero = level2_increment(f2, z1, tau, tau, tau);
        for (double v : zero) CHECK(v == 0.0);
    }
    CHECK_THROWS_AS(level2_increment(f2, z1, 5, 3, 16), OrderingError);
    CHECK_THROWS_AS(level2_increment(f2, z1, 0, 8, 17), OrderingError);

    Level1Field other_gamma = build_level1(p, 0.1);
    CHECK_THROWS_AS(level2_increment(f2, other_gamma, 0, 8, 16), ParameterError);
}

TEST_CASE("gamma zero delta factorizes into level-1 products") {
    Grid g = make_uniform_grid(1.0, 24);
    GaussianSampler smp(DriverSpec::bm(2, 55), g);
    PathSample p = smp.sample(0);
    Level1Field z1 = build_level1(p, 0.0);
    Level2Field f2 = build_level2(z1, p, Level2Scheme::bm_ito);
    double scale = std::max(1.0, f2.max_abs());
    for (int tau = 4; tau <= 24; tau += 4)
        for (int t = 2; t <= tau; t += 2)
            for (int u = 1; u < t; u += 2)
                for (int s = 0; s < u; s += 3) {
                    std::vector<double> a = level2_increment(f2, z1, s, t, tau);
                    std::vector<double> b = level2_increment(f2, z1, u, t, tau);
                    std::vector<double> c = level2_increment(f2, z1, s, u, tau);
                    for (int i = 0; i < 2; ++i)
                        for (int j = 0; j < 2; ++j) {
                            std::size_t k = static_cast<std::size_t>(i) * 2 + j;
                            double delta = a[k] - b[k] - c[k];
                            double want = z1.increment(i, s, u, tau) * z1.increment(j, u, t, tau);
                            CHECK(std::abs(delta - want) <= 1e-12 * scale);
                        }
                }
}

TEST_CASE("scheme and regime constraints are enforced") {
    Grid g = make_uniform_grid(1.0, 8);
    GaussianSampler bm(DriverSpec::bm(1, 1), g);
    GaussianSampler fbm(DriverSpec::fbm(0.75, 1, 1), g);
    PathSample pb = bm.sample(0), pf = fbm.sample(0);
    Level1Field zb = build_level1(pb, 0.2);
    Level1Field zf = build_level1(pf, 0.2);

    CHECK_THROWS_WITH_AS(build_level2(zb, pb, Level2Scheme::fbm_stratonovich),
                         "fbm_stratonovich scheme requires an fbm driver", ParameterError);
    CHECK_THROWS_WITH_AS(build_level2(zf, pf, Level2Scheme::bm_ito),
                         "bm_ito scheme requires a bm driver", ParameterError);

    Level1Field zf_high = build_level1(pf, 0.55);
    CHECK_THROWS_WITH_AS(build_level2(zf_high, pf, Level2Scheme::fbm_stratonovich),
                         "stratonovich regime requires gamma < 2H - 1", ParameterError);

    Level1Field avg(pb, 0.2, KernelScheme::cell_average);
    CHECK_THROWS_WITH_AS(build_level2(avg, pb, Level2Scheme::bm_ito),
                         "level2 requires a left-point level1 field", ParameterError);

    // Deterministic paths may use either scheme.
    PathSample det = linear_path(1.0, 8);
    Level1Field zd = build_level1(det, 0.2);
    CHECK_NOTHROW(build_level2(zd, det, Level2Scheme::fbm_stratonovich));
    CHECK_NOTHROW(build_level2(zd, det, Level2Scheme::bm_ito));
}

TEST_CASE("stratonovich correction closed forms") {
    // gamma = 0: (t-s)^{2H} / 2 regardless of tau.
    CHECK(strat_correction(0.0, 0.75, 0.0, 1.0, 1.0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(strat_correction(0.0, 0.75, 0.0, 1.0, 2.0) == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(strat_correction(0.0, 0.6, 0.25, 0.75, 1.0) ==
          doctest::Approx(std::pow(0.5, 1.2) / 2.0).epsilon(1e-10));
    CHECK(strat_correction(0.2, 0.75, 1.0, 1.0, 1.5) == 0.0);

    // Diagonal tau = t: Beta closed form.
    const double H = 0.75, gamma = 0.2;
    double pref = H * (2.0 * H - 1.0) / (2.0 * H - 1.0 - gamma);
    double want = pref * std::beta(1.0 - gamma, 2.0 * H - gamma);
    CHECK(strat_correction(gamma, H, 0.0, 1.0, 1.0) == doctest::Approx(want).epsilon(1e-8));
    double want_half = want * std::pow(0.5, 2.0 * H - 2.0 * gamma);
    CHECK(strat_correction(gamma, H, 0.0, 0.5, 0.5) ==
          doctest::Approx(want_half).epsilon(1e-8));

    CHECK_THROWS_AS(strat_correction(0.2, 0.5, 0.0, 1.0, 1.0), ParameterError);
    CHECK_THROWS_AS(strat_correction(0.5, 0.75, 0.0, 1.0, 1.0), ParameterError);
    CHECK_THROWS_AS(strat_correction(0.2, 0.75, 1.0, 0.5, 1.0), OrderingError);
}

TEST_CASE("divergence probe is flat at gamma zero and diverges like h^{-gamma}") {
    std::vector<double> meshes;
    for (int m = 4; m <= 10; ++m) meshes.push_back(std::pow(2.0, -m));

    auto flat = ito_strat_divergence_probe(0.0, 0.0, 0.5, 1.0, meshes);
    for (const auto& [mesh, value] : flat) {
        CHECK(mesh > 0.0);
        CHECK(std::abs(value - 0.5) <= 1e-12);
    }

    auto probe = ito_strat_divergence_probe(0.25, 0.0, 1.0, 1.0, meshes);
    std::vector<double> lx, ly;
    double prev = 0.0;
    for (const auto& [mesh, value] : probe) {
        CHECK(value > prev);
        prev = value;
        lx.push_back(std::log(mesh));
        ly.push_back(std::log(value));
    }
    double slope = lsq_slope(lx, ly);
    CHECK(std::abs(slope - (-0.25)) <= 0.03);

    CHECK_THROWS_AS(ito_strat_divergence_probe(0.5, 0.0, 0.5, 1.0, meshes), ParameterError);
    CHECK_THROWS_AS(ito_strat_divergence_probe(0.25, 0.5, 0.5, 1.0, meshes), OrderingError);
    CHECK_THROWS_AS(ito_strat_divergence_probe(0.25, 0.0, 0.5, 1.0, {0.0}), ParameterError);
}
