#include "subdyn/hierarchy.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "subdyn/errors.hpp"

namespace subdyn {

std::string family_name(Family f) {
    switch (f) {
        case Family::THETA: return "theta";
        case Family::ETA: return "eta";
        case Family::GENERAL_S: return "general-s";
        case Family::DJR: return "djr";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    if (name == "theta") return Family::THETA;
    if (name == "eta") return Family::ETA;
    if (name == "general-s" || name == "s") return Family::GENERAL_S;
    if (name == "djr") return Family::DJR;
    throw InvalidInput("unknown family: " + name);
}

const BlockLevel& BlockHierarchy::level(int n) const {
    if (n < 1 || n > depth()) throw InvalidInput("level out of range: " + std::to_string(n));
    return levels_[static_cast<std::size_t>(n - 1)];
}

BigInt theta_length(int n) {
    BigInt l = 4;
    for (int i = 1; i < n; ++i) l = 4 * l + 4;
    return l;
}

BigInt eta_length(int n) {
    BigInt l = 6;
    for (int i = 1; i < n; ++i) l = 4 * l - 2;
    return l;
}

DjrCounts djr_counts(int n) {
    if (n < 1) throw InvalidInput("DJR levels start at 1");
    DjrCounts c{3, 2, 1};
    for (int k = 1; k < n; ++k) {
        const BigInt p = BigInt(1) << (k + 1);
        c.h = p * c.h + 1;
        c.alpha = p * c.alpha;
        c.beta = 1 + p * c.beta;
    }
    return c;
}

namespace {

std::size_t count_letter(const Word& w, Letter a) {
    return static_cast<std::size_t>(std::count(w.begin(), w.end(), a));
}

struct BuiltLevels {
    std::vector<BlockLevel> levels;
    bool truncated = false;
};

BuiltLevels build_substitutive(Family family, int depth, const Substitution& sub,
                               const Word& seed_a, const Word& seed_b, std::size_t head_b) {
    BuiltLevels h;
    // Lengths by the letter-count recurrence, so levels past the cap still get exact values.
    const auto m = substitution_matrix(sub);
    std::array<BigInt, 2> ca{count_letter(seed_a, 0), count_letter(seed_a, 1)};
    std::array<BigInt, 2> cb{count_letter(seed_b, 0), count_letter(seed_b, 1)};
    auto step = [&](const std::array<BigInt, 2>& v) {
        return std::array<BigInt, 2>{m.at(0, 0) * v[0] + m.at(0, 1) * v[1],
                                     m.at(1, 0) * v[0] + m.at(1, 1) * v[1]};
    };
    Word a = seed_a, b = seed_b;
    bool words = true;
    auto tail = common_tail_of(sub);
    std::vector<BlockLevel> out;
    for (int n = 1; n <= depth; ++n) {
        ca = step(ca);
        cb = step(cb);
        BlockLevel lv;
        lv.n = n;
        lv.length_a = ca[0] + ca[1];
        lv.length_b = cb[0] + cb[1];
        lv.zeros = cb[0];
        lv.ones = cb[1];
        if (words && lv.length_a <= kMaterializationCap && lv.length_b <= kMaterializationCap) {
            a = expand(sub, a, 1);
            b = expand(sub, b, 1);
            lv.a = a;
            lv.b = b;
            lv.materialized = true;
        } else {
            words = false;
            h.truncated = true;
        }
        const bool has_tail = family == Family::THETA || tail.has_value();
        if (has_tail) {
            lv.length = lv.length_b - head_b;
            if (lv.materialized) lv.c = Word(b.begin() + static_cast<std::ptrdiff_t>(head_b), b.end());
        } else {
            lv.length = lv.length_a;  // eta: l_n = l(A_n) = l(B_n) + 1
        }
        out.push_back(std::move(lv));
    }
    h.levels = std::move(out);
    return h;
}

}  // namespace

BlockHierarchy build_hierarchy(Family family, int depth, std::optional<Substitution> sub) {
    if (depth < 1) throw InvalidInput("depth must be at least 1");
    BlockHierarchy h;
    switch (family) {
        case Family::THETA: {
            auto built = build_substitutive(family, depth, theta(), word_from_string("00"),
                                   word_from_string("1"), 1);
            h.levels_ = std::move(built.levels);
            h.truncated_ = built.truncated;
            h.sub_ = theta();
            break;
        }
        case Family::ETA: {
            auto built = build_substitutive(family, depth, eta(), word_from_string("00"),
                                   word_from_string("1"), 1);
            h.levels_ = std::move(built.levels);
            h.truncated_ = built.truncated;
            h.sub_ = eta();
            break;
        }
        case Family::GENERAL_S: {
            if (!sub || sub->alphabet_size() != 2)
                throw InvalidInput("general-s hierarchy needs a two-letter substitution");
            auto built = build_substitutive(family, depth, *sub, Word{0}, Word{1}, 1);
            h.levels_ = std::move(built.levels);
            h.truncated_ = built.truncated;
            h.sub_ = sub;
            break;
        }
        case Family::DJR: {
            if (depth > 30) throw InvalidInput("DJR depth is capped at 30");
            Word b = word_from_string("010");
            bool words = true;
            for (int n = 1; n <= depth; ++n) {
                BlockLevel lv;
                lv.n = n;
                auto c = djr_counts(n);
                lv.length = lv.length_b = c.h;
                lv.zeros = c.alpha;
                lv.ones = c.beta;
                if (n > 1 && words) {
                    if (c.h <= kMaterializationCap) {
                        const std::size_t reps = std::size_t{1} << (n - 1);
                        Word half = repeat(b, reps);
                        Word next;
                        next.reserve(static_cast<std::size_t>(c.h));
                        next.insert(next.end(), half.begin(), half.end());
                        next.push_back(1);
                        next.insert(next.end(), half.begin(), half.end());
                        b.swap(next);
                    } else {
                        words = false;
                        h.truncated_ = true;
                    }
                }
                if (words) {
                    lv.b = b;
                    lv.materialized = true;
                }
                h.levels_.push_back(std::move(lv));
            }
            break;
        }
    }
    h.family_ = family;
    return h;
}

DjrRatioReport djr_ratio_limit(int depth, double j0, double j1) {
    if (depth < 2) throw PreconditionError("djr_ratio_limit needs depth >= 2");
    DjrRatioReport r;
    for (int n = 1; n <= depth; ++n) {
        auto c = djr_counts(n);
        const long double alpha = c.alpha.convert_to<long double>();
        const long double beta = c.beta.convert_to<long double>();
        const long double h = c.h.convert_to<long double>();
        r.ratios.push_back(static_cast<double>(beta / alpha));
        r.tile_ratios.push_back(static_cast<double>((alpha * j0 + beta * j1) / h));
    }
    r.monotone = true;
    r.bounded = true;
    for (std::size_t i = 0; i < r.ratios.size(); ++i) {
        if (r.ratios[i] > 1.0) r.bounded = false;
        if (i > 0 && !(r.ratios[i] > r.ratios[i - 1])) {
            // Past double resolution consecutive ratios coincide; compare exactly instead.
            auto a = djr_counts(static_cast<int>(i)), b = djr_counts(static_cast<int>(i + 1));
            if (!(b.beta * a.alpha > a.beta * b.alpha)) r.monotone = false;
        }
    }
    for (std::size_t i = 1; i < r.tile_ratios.size(); ++i)
        r.tile_differences.push_back(std::abs(r.tile_ratios[i] - r.tile_ratios[i - 1]));
    r.differences_shrinking = true;
    for (std::size_t i = 1; i < r.tile_differences.size(); ++i)
        if (r.tile_differences[i] > r.tile_differences[i - 1]) r.differences_shrinking = false;
    r.limit = r.ratios.back();
    return r;
}

long double djr_ratio_infinity() {
    // beta_{n+1}/alpha_{n+1} = beta_n/alpha_n + 1/(2^{n+1} alpha_n), alpha_n = 2^{n(n+1)/2}.
    long double r = 0.5L;
    for (int n = 1; n < 40; ++n) {
        const long double term = std::ldexp(1.0L, -(n + 1) - n * (n + 1) / 2);
        if (r + term == r) break;
        r += term;
    }
    return r;
}

namespace {

std::uint64_t djr_h64(int n) {
    std::uint64_t h = 3;
    for (int k = 1; k < n; ++k) h = (std::uint64_t{1} << (k + 1)) * h + 1;
    return h;
}

}  // namespace

Letter djr_symbol_at(int n, std::uint64_t i) {
    if (n < 1 || n > 10) throw InvalidInput("djr_symbol_at supports levels 1..10");
    if (i >= djr_h64(n)) throw InvalidInput("index beyond B_n");
    while (n > 1) {
        const std::uint64_t h = djr_h64(n - 1);
        const std::uint64_t half = (std::uint64_t{1} << (n - 1)) * h;
        if (i == half) return 1;
        if (i > half) i -= half + 1;
        i %= h;
        --n;
    }
    static constexpr Letter base[3] = {0, 1, 0};
    return base[i];
}

BigInt djr_occurrences(int n, int big_n) {
    if (n < 1 || big_n < n) throw InvalidInput("djr_occurrences needs 1 <= n <= N");
    if (big_n == n) return 1;
    auto lv = build_hierarchy(Family::DJR, n);
    if (!lv.level(n).materialized) throw InvalidInput("B_n too long for junction counting");
    const Word& bn = *lv.level(n).b;
    const std::size_t h = bn.size();
    // B_{N-1} starts and ends with B_n, so only h - 1 symbols on each side of a seam matter.
    Word suffix(bn.end() - static_cast<std::ptrdiff_t>(h - 1), bn.end());
    Word prefix(bn.begin(), bn.begin() + static_cast<std::ptrdiff_t>(h - 1));
    const BigInt seam = count_occurrences(concat({suffix, prefix}), bn);
    Word one{1};
    const BigInt spacer = count_occurrences(concat({suffix, one, prefix}), bn);
    BigInt count = 1;
    for (int k = n + 1; k <= big_n; ++k) {
        const BigInt half = BigInt(1) << (k - 1);
        count = 2 * half * count + 2 * (half - 1) * seam + spacer;
    }
    return count;
}

SequenceWindow window_from_hierarchy(const BlockHierarchy& h, int level, std::int64_t center_offset,
                                     std::int64_t half_width, BlockKind kind) {
    const BlockLevel& lv = h.level(level);
    if (!lv.materialized) throw InvalidInput("level is not materialized");
    const Word& block = (h.family() == Family::DJR || kind == BlockKind::B) ? *lv.b : *lv.a;
    if (half_width < 0) throw InvalidInput("half_width must be nonnegative");
    const std::int64_t len = static_cast<std::int64_t>(block.size());
    if (center_offset - half_width < 0 || center_offset + half_width >= len)
        throw InvalidInput("window leaves the level block");
    SequenceWindow w;
    w.symbols.assign(block.begin() + (center_offset - half_width),
                     block.begin() + (center_offset + half_width + 1));
    w.lo = -half_width;
    w.provenance = {family_name(h.family()), level,
                    std::string(kind == BlockKind::A && h.family() != Family::DJR ? "A" : "B") +
                        " block, offset " + std::to_string(center_offset)};
    return w;
}

SequenceWindow djr_window(int level, std::uint64_t center_offset, std::int64_t half_width) {
    if (half_width < 0) throw InvalidInput("half_width must be nonnegative");
    const std::uint64_t len = djr_h64(level);
    const auto hw = static_cast<std::uint64_t>(half_width);
    if (center_offset < hw || center_offset + hw >= len)
        throw InvalidInput("window leaves the level block");
    SequenceWindow w;
    w.symbols.resize(2 * hw + 1);
    // Walk runs of whole lower-level blocks instead of resolving every index separately.
    std::uint64_t i = center_offset - hw;
    std::size_t j = 0;
    auto b6 = build_hierarchy(Family::DJR, std::min(level, 6));
    const Word& base = *b6.level(std::min(level, 6)).b;
    const std::uint64_t hb = base.size();
    while (j < w.symbols.size()) {
        if (level <= 6) {
            w.symbols[j++] = base[i++];
            continue;
        }
        // Find where i sits relative to a copy of B_6: descend until level 6.
        std::uint64_t k = i;
        int n = level;
        bool spacer = false;
        while (n > 6) {
            const std::uint64_t h = djr_h64(n - 1);
            const std::uint64_t half = (std::uint64_t{1} << (n - 1)) * h;
            if (k == half) {
                spacer = true;
                break;
            }
            if (k > half) k -= half + 1;
            k %= h;
            --n;
        }
        if (spacer) {
            w.symbols[j++] = 1;
            ++i;
            continue;
        }
        const std::uint64_t run = std::min<std::uint64_t>(hb - k, w.symbols.size() - j);
        std::copy(base.begin() + static_cast<std::ptrdiff_t>(k),
                  base.begin() + static_cast<std::ptrdiff_t>(k + run), w.symbols.begin() + static_cast<std::ptrdiff_t>(j));
        j += run;
        i += run;
    }
    w.lo = -half_width;
    w.provenance = {"djr", level, "B block, offset " + std::to_string(center_offset)};
    return w;
}

}  // namespace subdyn
