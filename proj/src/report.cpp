#include "volterra/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "volterra/errors.hpp"

namespace volterra {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string version_string() {
#ifdef VOLTERRA_VERSION
    return VOLTERRA_VERSION;
#else
    return "0.0.0-untagged";
#endif
}

namespace {

void put_header(std::ostringstream& out, const ArtifactHeader& header) {
    out << "# volterra-lift " << header.version << "\n";
    out << "# config " << header.config_json << "\n";
}

}  // namespace

std::string moments_csv(const ArtifactHeader& header, const std::vector<MomentReport>& reports) {
    std::ostringstream out;
    put_header(out, header);
    out << "target,s,t,tau,tau_prime,estimate,stderr,oracle,bound,ratio,samples\n";
    for (const MomentReport& r : reports) {
        out << to_string(r.target) << ',' << fmt17(r.tuple.s) << ',' << fmt17(r.tuple.t) << ','
            << fmt17(r.tuple.tau) << ',';
        if (!std::isnan(r.tuple.tau_prime)) out << fmt17(r.tuple.tau_prime);
        out << ',' << fmt17(r.estimate) << ',' << fmt17(r.std_err) << ',';
        if (r.oracle) out << fmt17(*r.oracle);
        out << ',' << fmt17(r.bound) << ',' << fmt17(r.ratio) << ',' << r.samples << "\n";
    }
    return out.str();
}

std::string scaling_csv(const ArtifactHeader& header, const std::vector<ScalingReport>& reports) {
    std::ostringstream out;
    put_header(out, header);
    out << "target,mode,exponent_est,exponent_expected,r_squared\n";
    for (const ScalingReport& r : reports) {
        out << to_string(r.target) << ',' << to_string(r.mode) << ',' << fmt17(r.exponent_est)
            << ',' << fmt17(r.exponent_expected) << ',' << fmt17(r.r_squared) << "\n";
    }
    return out.str();
}

std::string diverge_csv(const ArtifactHeader& header,
                        const std::vector<std::pair<double, double>>& probe) {
    std::ostringstream out;
    put_header(out, header);
    out << "h,value\n";
    for (const auto& [h, value] : probe) out << fmt17(h) << ',' << fmt17(value) << "\n";
    return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParameterError("cannot open output file: " + path);
    out << content;
    if (!out) throw NumericalError("write failed: " + path);
}

}  // namespace volterra
