#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "subdyn/ergodic.hpp"

namespace subdyn {

/// One named invariant and whether it held.
struct CheckResult {
    std::string module;
    std::string name;
    bool pass = false;
    double value = 0.0;
    double threshold = 0.0;
    std::string detail;
};

struct VerifyConfig {
    SymbolicSystem system;
    int depth = 5;
    std::int64_t window = 100'000;
    double alpha = kGoldenConjugate;
    std::uint64_t seed = kDefaultSeed;
    /// Keys: freq, seed, product, offset. Missing keys take the defaults.
    std::map<std::string, double> tolerances;
};

/// Runs every module's invariant checks that apply to the system.
/// Never throws for failed checks; an unexpected error becomes a failed check.
std::vector<CheckResult> verify_all(const VerifyConfig& cfg);

}  // namespace subdyn
