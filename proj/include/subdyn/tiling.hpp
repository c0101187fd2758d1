#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "subdyn/hierarchy.hpp"
#include "subdyn/substitution.hpp"
#include "subdyn/word.hpp"

namespace subdyn {

/// (sqrt 5 - 1) / 2
inline constexpr double kGoldenConjugate = 0.61803398874989484820;

/// "golden", "sqrt2m1" or a positive decimal. Throws InvalidInput otherwise.
double alpha_from_spec(const std::string& spec);

/// Tile length per letter. The irrationality flag is the caller's word for it.
struct TileLengths {
    std::vector<double> lengths;
    bool ratio_irrational = true;

    /// |J_0| = 1, |J_1| = alpha.
    static TileLengths unit_and(double alpha);
    double of(Letter a) const { return lengths.at(a); }
    void validate() const;
};

/// A point of the tiling space: the base sequence, the tile holding the origin
/// and the origin's offset inside it. (p, q) counts the 0 and 1 tiles between the
/// left end of tile 0 and the left end of the current tile (negative to the left),
/// so the current tile starts at p |J_0| + q |J_1|.
struct TilingPoint {
    SequenceWindow base;
    std::int64_t index = 0;
    long double offset = 0.0L;
    std::int64_t p = 0, q = 0;

    Letter letter() const { return base.at(index); }
};

TilingPoint make_tiling_point(SequenceWindow base, std::int64_t index = 0, long double offset = 0.0L);

/// p |J_0| + q |J_1| for two-letter alphabets.
long double boundary_position(const TileLengths& len, std::int64_t p, std::int64_t q);

/// f(x): the length of the tile holding the origin.
double roof(const TilingPoint& pt, const TileLengths& len);

/// T_t: the origin moves t to the right. Tile choice is made against exact (p, q)
/// boundaries. Throws Inconclusive if the origin leaves the window.
TilingPoint flow(const TilingPoint& pt, long double t, const TileLengths& len);

/// [u] x I: the tiles from the origin's tile on read u and the offset lies in [lo, hi).
struct FlowCylinder {
    Word u;
    double lo = 0.0;
    double hi = 0.0;
};

void validate_cylinder(const FlowCylinder& c, const TileLengths& len);

/// mu([u]) |I| / sum_a mu([a]) |J_a|, with mu([u]) the exact frequency of u.
/// Throws InvalidInput for inadmissible u.
double cylinder_measure(const Substitution& sub, const TileLengths& len, const FlowCylinder& c);

/// Sum_a mu([a]) |J_a| for the substitution's letter frequencies.
double mean_tile_length(const std::vector<double>& letter_freq, const TileLengths& len);

/// Throws Inconclusive if the window does not reach |u| tiles ahead.
bool hits_cylinder(const TilingPoint& pt, const FlowCylinder& c);

/// Result of writing 00 as a and 1 as b.
struct RecodedPoint {
    TilingPoint point;
    TileLengths lengths;  // |J_a| = 2 |J_0|, |J_b| = |J_1|
    /// Original tile index of the first tile of each recoded tile.
    std::vector<std::int64_t> first_tile;
};

/// Runs of 0 must split into pairs; an odd run away from the window ends is an
/// InvalidInput. Partial pairs at the ends are dropped.
RecodedPoint doubling_recode(const TilingPoint& pt, const TileLengths& len);

/// Same tile index, same (p, q), offsets within tol.
bool same_point(const TilingPoint& a, const TilingPoint& b, long double tol = 1e-12L);

}  // namespace subdyn
