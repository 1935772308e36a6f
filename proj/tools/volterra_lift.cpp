#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "volterra/analysis.hpp"
#include "volterra/errors.hpp"
#include "volterra/gaussian.hpp"
#include "volterra/grid.hpp"
#include "volterra/level1.hpp"
#include "volterra/level2.hpp"
#include "volterra/montecarlo.hpp"
#include "volterra/parallel.hpp"
#include "volterra/report.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

using namespace volterra;

json read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParameterError("cannot open config file: " + path);
    json cfg;
    try {
        cfg = json::parse(in);
    } catch (const json::exception& e) {
        throw ParameterError(std::string("config parse error: ") + e.what());
    }
    if (!cfg.is_object()) throw ParameterError("config root must be an object");
    return cfg;
}

struct Resolved {
    DriverSpec spec;
    double gamma = 0.0;
    Grid grid;
    RegularityParams reg;  // ambient (alpha, gamma) + (eta, zeta)
    double kappa = 0.0;
    int p = 0;  // 0 = auto
    FamilyAN family;
    long samples = 0;
    int blocks = 100;
    std::uint64_t seed = 1;
    json echo;  // the config embedded into artifacts
};

Resolved resolve(const json& cfg, const std::optional<std::uint64_t>& seed_flag) {
    Resolved r;
    r.seed = seed_flag ? *seed_flag : cfg.value("seed", std::uint64_t{1});

    const json d = cfg.value("driver", json::object());
    const std::string kind = d.value("kind", "bm");
    const int dim = d.value("dim", 1);
    if (kind == "fbm")
        r.spec = DriverSpec::fbm(d.value("hurst", 0.75), dim, r.seed);
    else if (kind == "bm")
        r.spec = DriverSpec::bm(dim, r.seed);
    else
        throw ParameterError("driver kind must be fbm or bm");

    r.gamma = cfg.value("gamma", 0.0);
    const json g = cfg.value("grid", json::object());
    r.grid = make_uniform_grid(g.value("horizon", 1.0), g.value("cells", 128));

    const json reg = cfg.value("regularity", json::object());
    const double alpha = reg.value("alpha", r.spec.effective_hurst());
    const double eta = reg.value("eta", 0.0);
    const double zeta = reg.value("zeta", 0.0);
    r.reg = validate_params(alpha, r.gamma, eta, zeta);
    r.kappa = reg.value("kappa", 0.5 * (r.gamma + alpha));
    std::vector<std::pair<double, double>> pairs;
    if (reg.contains("family_an")) {
        for (const json& pr : reg.at("family_an")) {
            if (!pr.is_array() || pr.size() != 2)
                throw ParameterError("family_an entries must be [eta, zeta] pairs");
            pairs.emplace_back(pr[0].get<double>(), pr[1].get<double>());
        }
    } else {
        pairs.emplace_back(eta, zeta);
    }
    r.family = make_family(alpha, r.gamma, pairs);

    if (cfg.contains("p") && cfg.at("p").is_number_integer()) r.p = cfg.at("p").get<int>();
    r.samples = cfg.value("samples", 20000L);
    r.blocks = cfg.value("blocks", 100);
    if (r.samples < 1) throw ParameterError("samples must be positive");
    if (r.blocks < 1) throw ParameterError("blocks must be positive");

    r.echo = json{{"driver", {{"kind", kind}, {"hurst", r.spec.hurst}, {"dim", dim}}},
                  {"gamma", r.gamma},
                  {"grid", {{"horizon", r.grid.horizon}, {"cells", r.grid.cells}}},
                  {"regularity",
                   {{"alpha", alpha},
                    {"kappa", r.kappa},
                    {"eta", eta},
                    {"zeta", zeta},
                    {"family_an", pairs}}},
                  {"p", r.p == 0 ? json("auto") : json(r.p)},
                  {"samples", r.samples},
                  {"blocks", r.blocks},
                  {"seed", r.seed}};
    return r;
}

Level2Scheme resolve_scheme(const json& cfg, const DriverSpec& spec) {
    const std::string name = cfg.value(
        "scheme", spec.kind == DriverKind::bm ? std::string("bm_ito") : std::string("fbm_stratonovich"));
    if (name == "bm_ito") return Level2Scheme::bm_ito;
    if (name == "fbm_stratonovich") return Level2Scheme::fbm_stratonovich;
    throw ParameterError("scheme must be bm_ito or fbm_stratonovich");
}

McOptions make_mc_options(const json& cfg, const Resolved& r) {
    McOptions opts;
    opts.horizon = r.grid.horizon;
    opts.cells = r.grid.cells;
    opts.blocks = r.blocks;
    opts.component_i = cfg.value("component_i", 0);
    opts.component_j = cfg.value("component_j", r.spec.dim > 1 ? 1 : 0);
    opts.eta = r.reg.eta;
    opts.zeta = r.reg.zeta;
    opts.cells_per_lag = cfg.value("cells_per_lag", 64);
    return opts;
}

std::vector<MomentTuple> parse_tuples(const json& cfg) {
    if (!cfg.contains("tuples")) throw ParameterError("moments requires a tuples list");
    std::vector<MomentTuple> tuples;
    for (const json& row : cfg.at("tuples")) {
        if (!row.is_array() || row.size() < 3 || row.size() > 4)
            throw ParameterError("tuples entries must be [s, t, tau] or [s, t, tau, tau_prime]");
        MomentTuple tu;
        tu.s = row[0].get<double>();
        tu.t = row[1].get<double>();
        tu.tau = row[2].get<double>();
        if (row.size() == 4) tu.tau_prime = row[3].get<double>();
        tuples.push_back(tu);
    }
    return tuples;
}

std::string artifact_path(const std::string& out_dir, const std::string& name) {
    fs::create_directories(out_dir);
    return (fs::path(out_dir) / name).string();
}

void emit_json(const std::string& path, json body, const json& echo) {
    body["version"] = version_string();
    body["config"] = echo;
    write_text_file(path, body.dump(2) + "\n");
    std::cout << "wrote " << path << "\n";
}

void emit_csv(const std::string& path, const std::string& content) {
    write_text_file(path, content);
    std::cout << "wrote " << path << "\n";
}

int cmd_sample(const json& cfg, Resolved& r, const std::string& out_dir) {
    const int paths = cfg.value("paths", 4);
    if (paths < 1) throw ParameterError("paths must be positive");
    r.echo["paths"] = paths;
    const GaussianSampler sampler(r.spec, r.grid);
    std::vector<double> levels(static_cast<std::size_t>(r.grid.size()));

    std::ostringstream out;
    out << "# volterra-lift " << version_string() << "\n";
    out << "# config " << r.echo.dump() << "\n";
    out << "sample,component,t,value\n";
    for (int m = 0; m < paths; ++m)
        for (int c = 0; c < r.spec.dim; ++c) {
            sampler.fill_levels(static_cast<std::uint64_t>(m), c, levels);
            for (int k = 0; k < r.grid.size(); ++k)
                out << m << ',' << c << ',' << fmt17(r.grid.time(k)) << ',' << fmt17(levels[k])
                    << "\n";
        }
    emit_csv(artifact_path(out_dir, "paths.csv"), out.str());
    return 0;
}

int cmd_lift(const json& cfg, Resolved& r, const std::string& out_dir) {
    const int levels = cfg.value("levels", 2);
    if (levels != 1 && levels != 2) throw ParameterError("levels must be 1 or 2");
    r.echo["levels"] = levels;
    const GaussianSampler sampler(r.spec, r.grid);
    const PathSample path = sampler.sample(0);
    const Level1Field z1 = build_level1(path, r.gamma);

    json body{{"grid", {{"horizon", r.grid.horizon}, {"cells", r.grid.cells}}},
              {"level1", {{"max_abs", z1.max_abs()}, {"dim", z1.dim()}}}};
    if (levels == 2) {
        const Level2Scheme scheme = resolve_scheme(cfg, r.spec);
        r.echo["scheme"] = scheme == Level2Scheme::bm_ito ? "bm_ito" : "fbm_stratonovich";
        const Level2Field z2 = build_level2(z1, path, scheme);
        const int stride = std::max(1, r.grid.cells / 32);
        body["level2"] = {{"max_abs", z2.max_abs()},
                          {"chen_residual", chen_max_residual(z2, z1, stride)},
                          {"chen_stride", stride}};
    }
    emit_json(artifact_path(out_dir, "lift.json"), std::move(body), r.echo);
    return 0;
}

int cmd_verify_chen(const json& cfg, Resolved& r, const std::string& out_dir) {
    const GaussianSampler sampler(r.spec, r.grid);
    const PathSample path = sampler.sample(0);
    const Level1Field z1 = build_level1(path, r.gamma);
    const Level2Scheme scheme = resolve_scheme(cfg, r.spec);
    r.echo["scheme"] = scheme == Level2Scheme::bm_ito ? "bm_ito" : "fbm_stratonovich";
    const Level2Field z2 = build_level2(z1, path, scheme);

    const int stride = std::max(1, r.grid.cells / 64);
    const double residual = chen_max_residual(z2, z1, stride);
    const double scale = std::max(z2.max_abs(), 1.0);
    const double threshold = 1e-12 * scale;
    const bool pass = residual <= threshold;

    json body{{"chen_residual", residual},
              {"field_scale", z2.max_abs()},
              {"threshold", threshold},
              {"stride", stride},
              {"pass", pass}};
    emit_json(artifact_path(out_dir, "chen.json"), std::move(body), r.echo);
    std::cout << "chen residual " << fmt17(residual) << " threshold " << fmt17(threshold)
              << (pass ? " ok" : " FAIL") << "\n";
    if (!pass) throw VerificationError("Chen residual exceeds 1e-12 * field scale");
    return 0;
}

int cmd_moments(const json& cfg, Resolved& r, const std::string& out_dir) {
    if (!cfg.contains("target")) throw ParameterError("moments requires a target");
    const MomentTarget target = moment_target_from_string(cfg.at("target").get<std::string>());
    const std::vector<MomentTuple> tuples = parse_tuples(cfg);
    const McOptions opts = make_mc_options(cfg, r);
    r.echo["target"] = to_string(target);
    r.echo["tuples"] = cfg.at("tuples");

    std::vector<MomentReport> reports;
    reports.reserve(tuples.size());
    for (const MomentTuple& tu : tuples)
        reports.push_back(estimate_moment(r.spec, r.gamma, target, tu, r.samples, opts));
    emit_csv(artifact_path(out_dir, "moments.csv"),
             moments_csv({version_string(), r.echo.dump()}, reports));
    return 0;
}

int cmd_scaling(const json& cfg, Resolved& r, const std::string& out_dir) {
    if (!cfg.contains("target")) throw ParameterError("scaling requires a target");
    if (!cfg.contains("lags")) throw ParameterError("scaling requires a lags list");
    const MomentTarget target = moment_target_from_string(cfg.at("target").get<std::string>());
    const ScalingMode mode = scaling_mode_from_string(cfg.value("mode", "diagonal"));
    const std::vector<double> lags = cfg.at("lags").get<std::vector<double>>();
    const McOptions opts = make_mc_options(cfg, r);
    r.echo["target"] = to_string(target);
    r.echo["mode"] = to_string(mode);
    r.echo["lags"] = lags;
    r.echo["cells_per_lag"] = opts.cells_per_lag;

    const ScalingReport rep = scaling_exponent(r.spec, r.gamma, target, mode, lags, r.samples, opts);
    std::string csv = scaling_csv({version_string(), r.echo.dump()}, {rep});
    for (std::size_t k = 0; k < rep.lags.size(); ++k)
        csv += "# lag " + fmt17(rep.lags[k]) + " variance " + fmt17(rep.variances[k]) + "\n";
    emit_csv(artifact_path(out_dir, "scaling.csv"), csv);
    std::cout << "slope " << fmt17(rep.exponent_est) << " expected "
              << fmt17(rep.exponent_expected) << " r2 " << fmt17(rep.r_squared) << "\n";
    return 0;
}

int cmd_grr(const json& /*cfg*/, Resolved& r, const std::string& out_dir) {
    const GaussianSampler sampler(r.spec, r.grid);
    const PathSample path = sampler.sample(0);
    const Level1Field z1 = build_level1(path, r.gamma);
    const auto z3 = [&](int s, int t, int tau) { return z1.increment(0, s, t, tau); };
    const auto z4 = [&](int s, int t, int taup, int tau) {
        return z1.increment(0, s, t, tau) - z1.increment(0, s, t, taup);
    };
    const HolderReport rep = grr_check(r.grid, r.reg, r.kappa, r.p, z3, z4);

    json body{{"kappa", rep.kappa},
              {"p", rep.p},
              {"norm1", rep.norm1},
              {"norm12", rep.norm12},
              {"delta_norm1", rep.delta_norm1},
              {"delta_norm12", rep.delta_norm12},
              {"u1", rep.u1},
              {"u12", rep.u12},
              {"grr_ratio1", rep.grr_ratio1},
              {"grr_ratio12", rep.grr_ratio12},
              {"norm1_arg", {rep.norm1_arg.s, rep.norm1_arg.t, rep.norm1_arg.tau}},
              {"norm12_arg",
               {rep.norm12_arg.s, rep.norm12_arg.t, rep.norm12_arg.tau_prime, rep.norm12_arg.tau}}};
    emit_json(artifact_path(out_dir, "grr.json"), std::move(body), r.echo);
    std::cout << "grr ratio1 " << fmt17(rep.grr_ratio1) << " ratio12 " << fmt17(rep.grr_ratio12)
              << " p " << rep.p << "\n";
    return 0;
}

int cmd_diverge(const json& cfg, Resolved& r, const std::string& out_dir) {
    const json probe = cfg.value("probe", json::object());
    const double s = probe.value("s", 0.0);
    const double t = probe.value("t", 0.5);
    const double tau = probe.value("tau", 1.0);
    std::vector<double> mesh_levels;
    if (cfg.contains("mesh_levels")) {
        mesh_levels = cfg.at("mesh_levels").get<std::vector<double>>();
    } else {
        for (int k = 8; k <= 14; ++k) mesh_levels.push_back(std::ldexp(1.0, -k));
    }
    r.echo["probe"] = {{"s", s}, {"t", t}, {"tau", tau}};
    r.echo["mesh_levels"] = mesh_levels;

    const auto probe_values = ito_strat_divergence_probe(r.gamma, s, t, tau, mesh_levels);
    emit_csv(artifact_path(out_dir, "diverge.csv"),
             diverge_csv({version_string(), r.echo.dump()}, probe_values));
    return 0;
}

int dispatch(const std::string& command, const json& cfg, Resolved& r,
             const std::string& out_dir) {
    r.echo["command"] = command;
    r.echo["output_dir"] = out_dir;
    if (command == "sample") return cmd_sample(cfg, r, out_dir);
    if (command == "lift") return cmd_lift(cfg, r, out_dir);
    if (command == "verify-chen") return cmd_verify_chen(cfg, r, out_dir);
    if (command == "moments") return cmd_moments(cfg, r, out_dir);
    if (command == "scaling") return cmd_scaling(cfg, r, out_dir);
    if (command == "grr") return cmd_grr(cfg, r, out_dir);
    if (command == "diverge") return cmd_diverge(cfg, r, out_dir);
    throw ParameterError("unknown command: " + command);
}

void emit_error(const std::string& kind, const std::string& message) {
    std::cerr << json{{"error", kind}, {"message", message}}.dump() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Volterra rough path lifts: sampling, level-1/2 construction, verification"};
    app.require_subcommand(0);

    std::string command, config_path, out_flag;
    std::optional<std::uint64_t> seed_flag;
    int threads = 0;
    app.add_option("command", command,
                   "one of: sample lift verify-chen moments scaling grr diverge")
        ->required();
    app.add_option("--config", config_path, "config file (JSON)")->required();
    app.add_option("--seed", seed_flag, "override the config seed");
    app.add_option("--out", out_flag, "output directory (default: config output_dir or .)");
    app.add_option("--threads", threads, "worker count override (0 = VOLTERRA_THREADS/hardware)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        emit_error("ParameterError", e.what());
        return 1;
    }

    try {
        volterra::set_worker_override(threads);
        const json cfg = read_config(config_path);
        Resolved r = resolve(cfg, seed_flag);
        const std::string out_dir =
            !out_flag.empty() ? out_flag : cfg.value("output_dir", std::string("."));
        return dispatch(command, cfg, r, out_dir);
    } catch (const volterra::ParameterError& e) {
        emit_error("ParameterError", e.what());
        return 1;
    } catch (const volterra::OrderingError& e) {
        emit_error("OrderingError", e.what());
        return 1;
    } catch (const volterra::SingularEvaluationError& e) {
        emit_error("SingularEvaluationError", e.what());
        return 1;
    } catch (const volterra::VerificationError& e) {
        emit_error("VerificationError", e.what());
        return 2;
    } catch (const volterra::NumericalError& e) {
        emit_error("NumericalError", e.what());
        return 3;
    } catch (const std::exception& e) {
        emit_error("NumericalError", e.what());
        return 3;
    }
}
