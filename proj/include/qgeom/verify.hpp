#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace qgeom {

struct PropertyResult {
    std::string suite;
    std::string name;
    bool passed = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
    /// Reported but not counted towards the exit status.
    bool diagnostic = false;
};

struct VerifyConfig {
    std::string fixtures_dir;
    std::string suite = "all";
    std::uint64_t seed = 20240607;
    double tol = 1e-10;
};

const std::vector<std::string>& verify_suites();

/// Runs the invariant suite(s) against the fixture files in
/// config.fixtures_dir. A property whose fixture fails to load or whose
/// computation throws is reported as failed with the error message.
std::vector<PropertyResult> run_verify(const VerifyConfig& config);

}  // namespace qgeom
