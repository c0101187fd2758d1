#include "subdyn/tiling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "subdyn/errors.hpp"

namespace subdyn {

double alpha_from_spec(const std::string& spec) {
    if (spec == "golden") return kGoldenConjugate;
    if (spec == "sqrt2m1") return std::sqrt(2.0) - 1.0;
    char* end = nullptr;
    const double v = std::strtod(spec.c_str(), &end);
    if (spec.empty() || end != spec.c_str() + spec.size() || !(v > 0.0) || !std::isfinite(v))
        throw InvalidInput("alpha must be golden, sqrt2m1 or a positive decimal: " + spec);
    return v;
}

TileLengths TileLengths::unit_and(double alpha) {
    TileLengths t{{1.0, alpha}, true};
    t.validate();
    return t;
}

void TileLengths::validate() const {
    if (lengths.empty()) throw InvalidInput("no tile lengths");
    for (double l : lengths)
        if (!(l > 0.0) || !std::isfinite(l)) throw InvalidInput("tile lengths must be positive");
}

long double boundary_position(const TileLengths& len, std::int64_t p, std::int64_t q) {
    return static_cast<long double>(p) * static_cast<long double>(len.of(0)) +
           static_cast<long double>(q) * static_cast<long double>(len.of(1));
}

TilingPoint make_tiling_point(SequenceWindow base, std::int64_t index, long double offset) {
    if (!base.contains(index)) throw InvalidInput("tile index outside the window");
    if (!base.contains(0)) throw InvalidInput("window must contain index 0");
    TilingPoint pt;
    pt.base = std::move(base);
    pt.index = index;
    pt.offset = offset;
    const std::int64_t from = std::min<std::int64_t>(0, index), to = std::max<std::int64_t>(0, index);
    std::int64_t zeros = 0, ones = 0;
    for (std::int64_t i = from; i < to; ++i) (pt.base.at(i) == 0 ? zeros : ones) += 1;
    const std::int64_t sign = index >= 0 ? 1 : -1;
    pt.p = sign * zeros;
    pt.q = sign * ones;
    return pt;
}

double roof(const TilingPoint& pt, const TileLengths& len) { return len.of(pt.letter()); }

TilingPoint flow(const TilingPoint& pt, long double t, const TileLengths& len) {
    TilingPoint out = pt;
    const long double target = boundary_position(len, pt.p, pt.q) + pt.offset + t;
    auto step_right = [&] {
        if (out.base.at(out.index) == 0) ++out.p; else ++out.q;
        ++out.index;
    };
    auto step_left = [&] {
        --out.index;
        if (out.base.at(out.index) == 0) --out.p; else --out.q;
    };
    while (true) {
        if (!out.base.contains(out.index)) throw Inconclusive("flow left the window support");
        const long double left = boundary_position(len, out.p, out.q);
        const std::int64_t np = out.p + (out.base.at(out.index) == 0 ? 1 : 0);
        const std::int64_t nq = out.q + (out.base.at(out.index) == 0 ? 0 : 1);
        const long double right = boundary_position(len, np, nq);
        if (target < left) {
            if (out.index - 1 < out.base.lo) throw Inconclusive("flow left the window support");
            step_left();
        } else if (target >= right) {
            if (out.index + 1 > out.base.hi()) throw Inconclusive("flow left the window support");
            step_right();
        } else {
            out.offset = target - left;
            return out;
        }
    }
}

void validate_cylinder(const FlowCylinder& c, const TileLengths& len) {
    if (c.u.empty()) throw InvalidInput("cylinder word must be nonempty");
    if (c.u[0] >= len.lengths.size()) throw InvalidInput("cylinder word uses an unknown letter");
    if (!(c.lo >= 0.0) || !(c.hi > c.lo) || c.hi > len.of(c.u[0]) + 1e-15)
        throw InvalidInput("cylinder interval must be a nonempty part of the first tile");
}

double mean_tile_length(const std::vector<double>& letter_freq, const TileLengths& len) {
    double s = 0.0;
    for (std::size_t a = 0; a < letter_freq.size(); ++a) s += letter_freq[a] * len.of(static_cast<Letter>(a));
    return s;
}

double cylinder_measure(const Substitution& sub, const TileLengths& len, const FlowCylinder& c) {
    validate_cylinder(c, len);
    if (!is_admissible(sub, c.u)) throw InvalidInput("cylinder word is not admissible");
    const auto letters = pf_frequencies(sub);
    return word_frequency(sub, c.u) * (c.hi - c.lo) / mean_tile_length(letters.frequency, len);
}

bool hits_cylinder(const TilingPoint& pt, const FlowCylinder& c) {
    const std::int64_t last = pt.index + static_cast<std::int64_t>(c.u.size()) - 1;
    if (!pt.base.contains(pt.index) || !pt.base.contains(last))
        throw Inconclusive("window does not cover the cylinder word");
    for (std::size_t j = 0; j < c.u.size(); ++j)
        if (pt.base.at(pt.index + static_cast<std::int64_t>(j)) != c.u[j]) return false;
    return pt.offset >= c.lo && pt.offset < c.hi;
}

RecodedPoint doubling_recode(const TilingPoint& pt, const TileLengths& len) {
    const SequenceWindow& b = pt.base;
    RecodedPoint r;
    r.lengths = TileLengths{{2.0 * len.of(0), len.of(1)}, len.ratio_irrational};
    SequenceWindow nb;
    nb.provenance = b.provenance;
    nb.provenance.note += ", recoded 00 -> a, 1 -> b";
    std::optional<std::int64_t> new_index;
    long double new_offset = 0.0L;
    std::int64_t i = b.lo;
    // Skip a leading odd run of 0s: its first symbol is the tail of a pair cut by the window.
    {
        std::int64_t j = i;
        while (j <= b.hi() && b.at(j) == 0) ++j;
        if ((j - i) % 2 == 1) {
            if (j > b.hi()) throw InvalidInput("window holds a single run of 0s");
            ++i;
        }
    }
    while (i <= b.hi()) {
        if (b.at(i) == 1) {
            if (i == pt.index) {
                new_index = static_cast<std::int64_t>(nb.symbols.size());
                new_offset = pt.offset;
            }
            r.first_tile.push_back(i);
            nb.symbols.push_back(1);
            ++i;
            continue;
        }
        if (i + 1 > b.hi()) break;  // trailing half pair
        if (b.at(i + 1) != 0) throw InvalidInput("isolated 0 in the base sequence");
        if (i == pt.index || i + 1 == pt.index) {
            new_index = static_cast<std::int64_t>(nb.symbols.size());
            new_offset = pt.offset + (i + 1 == pt.index ? static_cast<long double>(len.of(0)) : 0.0L);
        }
        r.first_tile.push_back(i);
        nb.symbols.push_back(0);
        i += 2;
    }
    if (!new_index) throw InvalidInput("the origin tile is not covered by complete pairs");
    // Anchor the recoded window at the recoded tile that holds original tile 0.
    std::optional<std::int64_t> zero;
    for (std::size_t k = 0; k < r.first_tile.size(); ++k) {
        const std::int64_t f = r.first_tile[k];
        const std::int64_t span = nb.symbols[k] == 0 ? 2 : 1;
        if (f <= 0 && 0 < f + span) zero = static_cast<std::int64_t>(k);
    }
    if (!zero) throw InvalidInput("original tile 0 is not covered by complete pairs");
    nb.lo = -*zero;
    r.point = make_tiling_point(std::move(nb), *new_index - *zero, new_offset);
    return r;
}

bool same_point(const TilingPoint& a, const TilingPoint& b, long double tol) {
    return a.index == b.index && a.p == b.p && a.q == b.q && std::abs(a.offset - b.offset) <= tol;
}

}  // namespace subdyn
