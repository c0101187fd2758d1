#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "subdyn/hierarchy.hpp"
#include "subdyn/substitution.hpp"
#include "subdyn/tiling.hpp"
#include "subdyn/word.hpp"

namespace subdyn {

inline constexpr std::uint64_t kDefaultSeed = 42;

/// value, the window it came from (symbols or time) and half the spread of the
/// four quarter-window values.
struct MeasureEstimate {
    double value = 0.0;
    double window = 0.0;
    double stderr_proxy = 0.0;
};

/// A family plus the substitution behind it (none for DJR).
struct SymbolicSystem {
    std::string name;
    Family family = Family::THETA;
    std::optional<Substitution> sub;
};

/// theta, eta, theta-tilde, eta-tilde, s, djr. Throws InvalidInput otherwise.
SymbolicSystem system_by_name(const std::string& name);
SymbolicSystem system_from_substitution(const Substitution& sub, const std::string& name);

/// `size` symbols of the system with index 0 placed at a seeded random spot inside
/// the deepest materialized block. lo = -(size / 2).
SequenceWindow random_window(const SymbolicSystem& sys, std::int64_t size, std::uint64_t seed);

/// `size` symbols with index 0 at the middle of the level-n block (A or B) that lies
/// closest to the middle of a seeded random window of the system.
SequenceWindow block_centred_window(const SymbolicSystem& sys, int level, BlockKind kind, std::int64_t size,
                                    std::uint64_t seed);

/// Occurrence start indices of u inside the window, ascending.
std::vector<std::int64_t> occurrence_positions(const SequenceWindow& w, WordView u);

/// Frequency of u over the window's first n positions that leave room for u.
/// Throws Inconclusive below 1000 positions.
MeasureEstimate birkhoff(const SequenceWindow& w, WordView u);
MeasureEstimate birkhoff(const SequenceWindow& w, WordView u, std::int64_t n);

/// Time intervals [a, b) within [0, horizon) when the origin sits in [u] x I,
/// relative to the start point. Computed tile by tile, no discretization.
std::vector<std::pair<long double, long double>> flow_visit_intervals(const TilingPoint& start,
                                                                     const TileLengths& len,
                                                                     const FlowCylinder& c,
                                                                     long double horizon);

/// Time fraction of [0, horizon) spent in the cylinder. Throws Inconclusive below 1000 time units
/// or when the window does not cover the trajectory.
MeasureEstimate flow_birkhoff(const TilingPoint& start, const TileLengths& len, const FlowCylinder& c,
                              long double horizon);

/// Empirical mu([u] cap T^-k [u]) for each k, all over the same n positions.
/// Throws Inconclusive when a shift runs off the window.
std::vector<MeasureEstimate> correlation_sequence(const SequenceWindow& w, WordView u,
                                                  const std::vector<std::int64_t>& shifts,
                                                  std::int64_t n);

struct SpectralScan {
    std::vector<double> lambdas;
    std::vector<double> moduli;
    double window = 0.0;
};

/// p/q in [0, 1) with q <= max_q, ascending, each once. 0 included.
std::vector<double> rational_grid(int max_q);
/// rational_grid(16), 64 uniform points in (0, 1) and, for flows, 1/alpha and 1/(1 + alpha).
std::vector<double> default_lambda_grid(std::optional<double> flow_alpha = std::nullopt);

/// |(1/n) sum_{j<n} e^{-2 pi i lambda j} 1_[u](T^j x)|. lambda = 0 gives the birkhoff value.
SpectralScan spectral_scan(const SequenceWindow& w, WordView u, const std::vector<double>& lambdas,
                           std::int64_t n);
/// |(1/T) int_0^T e^{-2 pi i lambda t} 1_C(T_t S) dt|, integrated in closed form per visit.
SpectralScan spectral_scan_flow(const TilingPoint& start, const TileLengths& len, const FlowCylinder& c,
                                const std::vector<double>& lambdas, long double horizon);

/// Letter 1 where {x0 + j alpha} < beta, 0 elsewhere, j = 0..n-1.
SequenceWindow rotation_window(double alpha, double beta, double x0, std::int64_t n);

struct RigidityResult {
    MeasureEstimate measure;   // mu(A)
    std::vector<double> times;
    std::vector<double> ratios;  // mu(A cap T_t A) / mu(A)
};

/// A = [u]. Throws Inconclusive if mu(A) < 10 stderr_proxy or a time runs off the window.
RigidityResult rigidity_test(const SequenceWindow& w, WordView u, const std::vector<std::int64_t>& times,
                             std::int64_t n);
/// A = [u] x I for the flow over [0, horizon).
RigidityResult rigidity_test_flow(const TilingPoint& start, const TileLengths& len, const FlowCylinder& c,
                                  const std::vector<long double>& times, long double horizon);

struct DjrLevelReport {
    int n = 0;
    MeasureEstimate nu_e, nu_f;
    long double patch_time = 0.0L;  // 2^n t_n
    std::int64_t occurrences_e = 0, occurrences_f = 0;
    /// (p, q) from the first B_n^{2^n} run of B_{n+1} to the second, minus (2^n alpha_n, 2^n beta_n).
    std::int64_t spacer_dp = 0, spacer_dq = 0;
    /// (p, q) from the last B_n^{2^n} run of B_{n+1} to the start of the next B_{n+1}, same offset.
    std::int64_t pure_dp = 0, pure_dq = 0;
    bool spacer_is_one_tile = false;  // (0, 1)
    bool pure_shift_ok = false;       // (0, 0)
};

struct DjrWeakMixingReport {
    double alpha = 0.0;
    int depth = 0;
    double c = 0.0;
    double d = 0.0;
    double ratio_limit = 0.0;
    std::int64_t window = 0;
    std::uint64_t seed = kDefaultSeed;
    std::vector<DjrLevelReport> levels;
};

/// nu(E_n) and nu(F_n) for n = 3..depth over a seeded DJR window, plus the exact
/// return-word displacements. Throws Inconclusive for depth < 3, InvalidInput past 5.
DjrWeakMixingReport djr_weak_mixing_experiment(double alpha, int depth, std::uint64_t seed = kDefaultSeed,
                                               std::int64_t window = 0);

enum class JoiningClass { OFF_DIAGONAL, PRODUCT_CONSISTENT, INCONCLUSIVE };
std::string joining_class_name(JoiningClass c);

struct JoiningEstimate {
    std::map<std::pair<std::string, std::string>, double> pair_frequencies;
    std::map<std::string, double> x_marginal, y_marginal;      // from the pair table
    std::map<std::string, double> x_frequency, y_frequency;    // birkhoff over the same range
    JoiningClass classification = JoiningClass::INCONCLUSIVE;
    std::optional<std::int64_t> k;
    double max_deviation = 0.0;
    double max_marginal_error = 0.0;
    double tolerance = 0.0;
    std::int64_t window = 0;
};

/// max(0.02, 10 / sqrt(window))
double product_tolerance(std::int64_t window);

/// Pair frequencies of [P] x [Q] along the diagonal over n positions. Classification
/// checks same_orbit (|k| <= horizon) first. Products use the exact mu(P) mu(Q)
/// when `sub` is given, the birkhoff values otherwise.
JoiningEstimate joining_estimate(const SequenceWindow& x, const SequenceWindow& y,
                                 const std::vector<Word>& p_words, const std::vector<Word>& q_words,
                                 std::int64_t n, const std::optional<Substitution>& sub,
                                 std::optional<double> tolerance = std::nullopt,
                                 std::int64_t horizon = 64);

/// Frequency of T_alpha^k(S) in the cylinder over k < iterates.
MeasureEstimate t_alpha_orbit_frequency(const TilingPoint& start, const TileLengths& len,
                                        const FlowCylinder& c, double alpha, std::int64_t iterates);

struct TAlphaProbe {
    MeasureEstimate first, second;
    double predicted = 0.0;  // cylinder_measure-style value from exact frequencies
    bool consistent = false; // |e1 - e2| <= 3 (s1 + s2)
};

/// Two DJR tiling points from seeds and seed + 1. Throws InvalidInput for iterates < 10^4.
TAlphaProbe t_alpha_ergodicity_probe(double alpha, const FlowCylinder& c, std::int64_t iterates,
                                     std::uint64_t seed = kDefaultSeed);

/// DJR letter frequencies (alpha_n, beta_n) / h_n at depth 30.
std::vector<double> djr_letter_frequencies();

}  // namespace subdyn
