#pragma once

#include <string>
#include <utility>
#include <vector>

#include "volterra/montecarlo.hpp"

namespace volterra {

// %.17g: round-trip exact and pinned, so artifacts are byte-stable.
std::string fmt17(double v);

std::string version_string();

// `# volterra-lift <version>` and `# config <minified json>` comment lines
// embedded at the top of every CSV artifact.
struct ArtifactHeader {
    std::string version;
    std::string config_json;
};

// Fixed schemas; optional fields (oracle, tau_prime) are left empty.
std::string moments_csv(const ArtifactHeader& header, const std::vector<MomentReport>& reports);
std::string scaling_csv(const ArtifactHeader& header, const std::vector<ScalingReport>& reports);
std::string diverge_csv(const ArtifactHeader& header,
                        const std::vector<std::pair<double, double>>& probe);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace volterra
