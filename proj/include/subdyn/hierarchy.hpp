#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "subdyn/substitution.hpp"
#include "subdyn/word.hpp"

namespace subdyn {

using BigInt = boost::multiprecision::cpp_int;

enum class Family { THETA, ETA, GENERAL_S, DJR };

std::string family_name(Family f);
/// "theta", "eta", "general-s" (alias "s"), "djr". Throws InvalidInput otherwise.
Family family_from_name(const std::string& name);

/// Words are kept up to this many symbols; longer levels carry lengths only.
inline constexpr std::size_t kMaterializationCap = 10'000'000;

/// One level of a block hierarchy.
///
/// THETA/ETA/GENERAL_S: a = zeta^n(00) (zeta^n(a) for GENERAL_S), b = zeta^n(1),
/// c is the common tail where it exists. DJR: only b = B_n.
/// `length` is l_n (h_n for DJR); `zeros`/`ones` count the letters of B_n.
struct BlockLevel {
    int n = 0;
    std::optional<Word> a, b, c;
    BigInt length;
    BigInt length_a, length_b;
    BigInt zeros, ones;
    bool materialized = false;
};

class BlockHierarchy {
public:
    Family family() const { return family_; }
    int depth() const { return static_cast<int>(levels_.size()); }
    /// 1-based.
    const BlockLevel& level(int n) const;
    const std::vector<BlockLevel>& levels() const { return levels_; }
    /// True when some requested level exceeded the materialization cap.
    bool truncated() const { return truncated_; }
    /// The generating substitution (absent for DJR).
    const std::optional<Substitution>& substitution() const { return sub_; }

private:
    friend BlockHierarchy build_hierarchy(Family, int, std::optional<Substitution>);
    Family family_ = Family::THETA;
    std::vector<BlockLevel> levels_;
    bool truncated_ = false;
    std::optional<Substitution> sub_;
};

/// Builds levels 1..depth. GENERAL_S needs the substitution (two letters);
/// THETA/ETA ignore it. DJR depth is capped at 30.
BlockHierarchy build_hierarchy(Family family, int depth,
                               std::optional<Substitution> sub = std::nullopt);

/// l_n for theta (4, 20, 84, ...) and eta (6, 22, 86, ...), straight from the recurrences.
BigInt theta_length(int n);
BigInt eta_length(int n);

/// DJR recurrences h_n, alpha_n (zeros), beta_n (ones).
struct DjrCounts {
    BigInt h, alpha, beta;
};
DjrCounts djr_counts(int n);

struct DjrRatioReport {
    std::vector<double> ratios;           // beta_n / alpha_n, n = 1..depth
    bool monotone = false;                // strictly increasing
    bool bounded = false;                 // every ratio <= 1
    std::vector<double> tile_ratios;      // t_n / h_n
    std::vector<double> tile_differences; // |t_{n+1}/h_{n+1} - t_n/h_n|
    bool differences_shrinking = false;
    double limit = 0.0;                   // beta/alpha at depth
};

/// Tile lengths |J_0|, |J_1| enter t_n = alpha_n |J_0| + beta_n |J_1|.
DjrRatioReport djr_ratio_limit(int depth, double j0 = 1.0, double j1 = 0.6180339887498949);

/// lim beta_n / alpha_n, summed until the terms vanish in long double.
long double djr_ratio_infinity();

/// Symbol i (0-based) of B_n without materializing it. n <= 10.
Letter djr_symbol_at(int n, std::uint64_t i);

/// Exact number of occurrences of B_n in B_N (N >= n), from the junction structure.
BigInt djr_occurrences(int n, int big_n);

/// A finite piece of a bi-infinite sequence. Index i lives at symbols[i - lo].
struct SequenceWindow {
    Word symbols;
    std::int64_t lo = 0;
    struct Provenance {
        std::string family;
        int level = 0;
        std::string note;
    } provenance;

    std::int64_t hi() const { return lo + static_cast<std::int64_t>(symbols.size()) - 1; }
    bool contains(std::int64_t i) const { return i >= lo && i <= hi(); }
    Letter at(std::int64_t i) const { return symbols[static_cast<std::size_t>(i - lo)]; }
    std::size_t size() const { return symbols.size(); }
};

enum class BlockKind { A, B };

/// Window of width 2*half_width + 1 cut from the level block (A or B; DJR uses B),
/// with index 0 sitting `center_offset` symbols into the block.
/// Throws InvalidInput if the window leaves the block or the level is not materialized.
SequenceWindow window_from_hierarchy(const BlockHierarchy& h, int level, std::int64_t center_offset,
                                     std::int64_t half_width, BlockKind kind = BlockKind::A);

/// DJR window read through djr_symbol_at, so levels past the cap work (n <= 10).
SequenceWindow djr_window(int level, std::uint64_t center_offset, std::int64_t half_width);

}  // namespace subdyn
