#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "subdyn/hierarchy.hpp"
#include "subdyn/substitution.hpp"
#include "subdyn/word.hpp"

namespace subdyn {

/// The two level-one blocks a family desubstitutes into, each written v C.
/// theta: 001001 = 00|1001 and 11001 = 1|1001; eta: 001001 = 00|1001 and
/// 11100 = 1|1100; general s: s(a) = a|A and s(b) = b|A.
struct ParseBlock {
    Word block;
    Word v;
    Word c;
};

struct ParseScheme {
    Family family = Family::THETA;
    Substitution sub;
    std::vector<ParseBlock> blocks;
    Word anchor;
};

/// THETA and ETA take no substitution; GENERAL_S needs a substitution of the
/// shape s(a) = aA, s(b) = bA (PreconditionError otherwise).
ParseScheme parse_scheme(Family family, std::optional<Substitution> sub = std::nullopt);

struct ParseItem {
    Word v;
    Word c;
    bool operator==(const ParseItem&) const = default;
};

struct Parse {
    Word k1;
    std::vector<ParseItem> items;
    Word k2;
    bool operator==(const Parse&) const = default;
};

struct ParseResult {
    Word k1;
    std::vector<ParseItem> items;
    Word k2;
    bool unique = false;
    std::size_t count = 0;
    /// Every decomposition, only filled when unique is false.
    std::vector<Parse> all_parses;
};

/// Every decomposition K1 (v_i C_i)* K2 with K1 a proper suffix and K2 a
/// proper prefix of a block. Ordered by |K1|. No admissibility check.
std::vector<Parse> all_parses(const ParseScheme& scheme, WordView w);

/// Throws InvalidInput for inadmissible W.
ParseResult parse(const ParseScheme& scheme, WordView w);
ParseResult parse(Family family, WordView w);

/// Least m such that every admissible word of length m contains the anchor
/// (11001 for theta, 11100 for eta, s(bba) or s(aab) for general s),
/// by enumerating admissible words by increasing length.
std::size_t parse_threshold(const ParseScheme& scheme);
std::size_t parse_threshold(Family family);

/// Preimages w with zeta(w) = W read off those parses whose ends are whole letter images.
std::vector<Word> desubstitute(const ParseScheme& scheme, WordView w);

/// Level-n blocks of a window. `start` is a window index, `kind` A (zeta^n(00) or
/// s^n(a)) or B (zeta^n(1) or s^n(b)). Only blocks lying fully inside the window.
struct PlacedBlock {
    std::int64_t start = 0;
    BlockKind kind = BlockKind::A;
    std::int64_t length = 0;
};

/// Iterated desubstitution. Throws Inconclusive if some level cannot be parsed uniquely.
std::vector<PlacedBlock> block_decomposition(const ParseScheme& scheme, const SequenceWindow& x,
                                             int level);

/// Shift k with y_j = x_{j+k} on the whole common support, |k| <= horizon.
/// Ties go to smaller |k|, then to the negative one.
/// Throws Inconclusive if some |k| <= horizon leaves fewer than 2*horizon common indices.
std::optional<std::int64_t> same_orbit(const SequenceWindow& x, const SequenceWindow& y,
                                       std::int64_t horizon);

enum class WitnessCase { THETA_00_vs_1, ETA_I, ETA_II, ETA_III };
std::string witness_case_name(WitnessCase c);

struct IntegerInterval {
    std::int64_t lo = 0;  // closed
    std::int64_t hi = 0;  // open
    std::int64_t length() const { return hi - lo; }
    bool contains(const IntegerInterval& o) const { return o.lo >= lo && o.hi <= hi; }
};

/// Positions are window indices: pattern_x occurs at m1 in x, pattern_y at m2 in y.
/// k_align puts a y block start onto the x block start: x index p sits over y index p - k_align.
struct StructureWitness {
    Family family = Family::THETA;
    int n = 0;
    std::int64_t m1 = 0, m2 = 0;
    WitnessCase witness_case = WitnessCase::THETA_00_vs_1;
    std::string sub_case;  // which branch of the search produced the positions
    std::int64_t k_align = 0;
    std::int64_t s_index = 0;
    Word pattern_x, pattern_y;
    bool x_has_a_side = false;  // the side carrying 00 (theta) or the A blocks (eta)
    std::int64_t m = 0;         // parse threshold used in the bounds
    BigInt block_length;        // l_n
    IntegerInterval L, M;
    std::int64_t t_shift = 0;
    double gamma = 0.0;
    bool position_bound_ok = false;
    bool difference_bound_ok = false;
    bool intervals_ok = false;
    bool bounds_ok = false;
};

/// Searches for the structure witness starting from level n (theta) or from the
/// level n + 1 block decomposition (eta).
/// Throws PreconditionError when the windows are the same orbit, Inconclusive when
/// they are too short, VerificationFailure when the emitted witness breaks a bound.
StructureWitness find_structure_witness(Family family, const SequenceWindow& x,
                                        const SequenceWindow& y, int n);

struct WitnessIntervals {
    IntegerInterval L, M;
    std::int64_t t_shift = 0;
    double gamma = 0.0;
    double gamma_lower_bound = 0.0;  // 1 / (4(m+4)) for theta, 0 for eta
};

WitnessIntervals witness_intervals(const StructureWitness& w, Family family);

/// For every i in M: x_i = x_{i+t+ex} and y_i = y_{i+t+ey}, where the A side adds one.
bool witness_shift_consistent(const StructureWitness& w, const SequenceWindow& x,
                              const SequenceWindow& y);

}  // namespace subdyn
