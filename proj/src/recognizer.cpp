#include "subdyn/recognizer.hpp"

#include <algorithm>
#include <cstring>
#include <map>
#include <mutex>
#include <set>

#include "subdyn/errors.hpp"

namespace subdyn {

namespace {

bool ends_with(const Word& w, WordView tail) {
    return tail.size() <= w.size() && std::equal(tail.begin(), tail.end(), w.end() - static_cast<std::ptrdiff_t>(tail.size()));
}

bool starts_with(const Word& w, WordView head) {
    return head.size() <= w.size() && std::equal(head.begin(), head.end(), w.begin());
}

Word sub_word(WordView w, std::size_t from, std::size_t to) { return Word(w.begin() + static_cast<std::ptrdiff_t>(from), w.begin() + static_cast<std::ptrdiff_t>(to)); }

}  // namespace

ParseScheme parse_scheme(Family family, std::optional<Substitution> sub) {
    switch (family) {
        case Family::THETA: {
            auto d = LetterNames::digits();
            return ParseScheme{family, theta(),
                               {{d.parse("001001", 2), d.parse("00", 2), d.parse("1001", 2)},
                                {d.parse("11001", 2), d.parse("1", 2), d.parse("1001", 2)}},
                               d.parse("11001", 2)};
        }
        case Family::ETA: {
            auto d = LetterNames::digits();
            return ParseScheme{family, eta(),
                               {{d.parse("001001", 2), d.parse("00", 2), d.parse("1001", 2)},
                                {d.parse("11100", 2), d.parse("1", 2), d.parse("1100", 2)}},
                               d.parse("11100", 2)};
        }
        case Family::GENERAL_S: {
            if (!sub) throw PreconditionError("general-s parsing needs the substitution");
            auto tail = common_tail_of(*sub);
            if (!tail) throw PreconditionError("substitution is not of the form s(a) = aA, s(b) = bA");
            // bb admissible gives the anchor s(bba), otherwise aa is and s(aab) is used.
            const bool bb = is_admissible(*sub, Word{1, 1});
            Word anchor = bb ? expand(*sub, Word{1, 1, 0}, 1) : expand(*sub, Word{0, 0, 1}, 1);
            return ParseScheme{family, *sub,
                               {{sub->image(0), Word{0}, *tail}, {sub->image(1), Word{1}, *tail}},
                               anchor};
        }
        case Family::DJR: break;
    }
    throw PreconditionError("no desubstitution for the DJR block system");
}

std::vector<Parse> all_parses(const ParseScheme& scheme, WordView w) {
    std::vector<Parse> out;
    std::size_t longest = 0;
    for (const auto& b : scheme.blocks) longest = std::max(longest, b.block.size());
    const std::size_t max_k1 = std::min(longest - 1, w.size());
    for (std::size_t k1 = 0; k1 <= max_k1; ++k1) {
        WordView head = w.subspan(0, k1);
        if (k1 > 0) {
            bool suffix = false;
            for (const auto& b : scheme.blocks)
                if (b.block.size() > k1 && ends_with(b.block, head)) suffix = true;
            if (!suffix) continue;
        }
        Parse p;
        p.k1 = Word(head.begin(), head.end());
        std::size_t pos = k1;
        bool ok = true;
        while (pos < w.size()) {
            const ParseBlock* hit = nullptr;
            for (const auto& b : scheme.blocks)
                if (b.block.front() == w[pos]) hit = &b;
            if (!hit) {
                ok = false;
                break;
            }
            const std::size_t rest = w.size() - pos;
            if (rest >= hit->block.size()) {
                if (!occurs_at(w, pos, hit->block)) {
                    ok = false;
                    break;
                }
                p.items.push_back({hit->v, hit->c});
                pos += hit->block.size();
            } else {
                if (!starts_with(hit->block, w.subspan(pos))) ok = false;
                else p.k2 = sub_word(w, pos, w.size());
                break;
            }
        }
        if (ok) out.push_back(std::move(p));
    }
    return out;
}

ParseResult parse(const ParseScheme& scheme, WordView w) {
    if (!is_admissible(scheme.sub, w)) throw InvalidInput("word is not admissible");
    auto parses = all_parses(scheme, w);
    ParseResult r;
    r.count = parses.size();
    r.unique = parses.size() == 1;
    if (!parses.empty()) {
        r.k1 = parses.front().k1;
        r.items = parses.front().items;
        r.k2 = parses.front().k2;
    }
    if (!r.unique) r.all_parses = std::move(parses);
    return r;
}

ParseResult parse(Family family, WordView w) { return parse(parse_scheme(family), w); }

std::size_t parse_threshold(const ParseScheme& scheme) {
    static std::mutex mu;
    static std::map<std::pair<std::vector<Word>, Word>, std::size_t> cache;
    const auto key = std::make_pair(scheme.sub.images(), scheme.anchor);
    {
        std::lock_guard lock(mu);
        if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    std::size_t len = scheme.anchor.size();
    for (;; ++len) {
        if (len > 4096) throw Inconclusive("parse threshold search did not terminate");
        auto words = admissible_words(scheme.sub, len);
        const bool all = std::all_of(words.begin(), words.end(), [&](const Word& u) {
            return std::search(u.begin(), u.end(), scheme.anchor.begin(), scheme.anchor.end()) != u.end();
        });
        if (all) break;
    }
    std::lock_guard lock(mu);
    cache[key] = len;
    return len;
}

std::size_t parse_threshold(Family family) { return parse_threshold(parse_scheme(family)); }

std::vector<Word> desubstitute(const ParseScheme& scheme, WordView w) {
    auto letter_of = [&](const Word& piece) -> std::optional<std::optional<Letter>> {
        if (piece.empty()) return std::optional<Letter>{};
        for (std::size_t a = 0; a < scheme.sub.alphabet_size(); ++a)
            if (scheme.sub.image(static_cast<Letter>(a)) == piece)
                return std::optional<Letter>{static_cast<Letter>(a)};
        return std::nullopt;
    };
    std::set<Word> found;
    for (const auto& p : all_parses(scheme, w)) {
        auto head = letter_of(p.k1), tail = letter_of(p.k2);
        if (!head || !tail) continue;
        Word pre;
        if (*head) pre.push_back(**head);
        for (const auto& it : p.items) pre.insert(pre.end(), it.v.begin(), it.v.end());
        if (*tail) pre.push_back(**tail);
        if (expand(scheme.sub, pre, 1) == Word(w.begin(), w.end())) found.insert(pre);
    }
    return {found.begin(), found.end()};
}

std::vector<PlacedBlock> block_decomposition(const ParseScheme& scheme, const SequenceWindow& x,
                                             int level) {
    if (level < 1) throw InvalidInput("block level must be at least 1");
    const std::size_t m = parse_threshold(scheme);
    Word word = x.symbols;
    std::vector<std::int64_t> pos(word.size());
    for (std::size_t j = 0; j < pos.size(); ++j) pos[j] = x.lo + static_cast<std::int64_t>(j);
    std::vector<std::uint64_t> letter_len{scheme.sub.image(0).size(), scheme.sub.image(1).size()};
    std::vector<PlacedBlock> out;
    for (int lvl = 1; lvl <= level; ++lvl) {
        if (word.size() < m)
            throw Inconclusive("window too short to desubstitute to level " + std::to_string(level));
        auto parses = all_parses(scheme, word);
        if (parses.size() != 1)
            throw Inconclusive("level " + std::to_string(lvl) + " parse is not unique");
        const Parse& p = parses.front();
        const auto lens = image_lengths(scheme.sub, static_cast<unsigned>(lvl));
        Word next;
        std::vector<std::int64_t> next_pos;
        std::size_t at = p.k1.size();
        for (const auto& it : p.items) {
            if (lvl == level) {
                std::int64_t len = 0;
                for (Letter c : it.v) len += static_cast<std::int64_t>(lens[c]);
                out.push_back({pos[at], it.v == scheme.blocks[0].v ? BlockKind::A : BlockKind::B, len});
            }
            std::size_t off = 0;
            for (Letter c : it.v) {
                next.push_back(c);
                next_pos.push_back(pos[at + off]);
                off += letter_len[c];
            }
            at += scheme.blocks[it.v == scheme.blocks[0].v ? 0 : 1].block.size();
        }
        word.swap(next);
        pos.swap(next_pos);
    }
    return out;
}

std::optional<std::int64_t> same_orbit(const SequenceWindow& x, const SequenceWindow& y,
                                       std::int64_t horizon) {
    if (horizon < 0) throw InvalidInput("horizon must be nonnegative");
    auto overlap = [&](std::int64_t k) {
        const std::int64_t lo = std::max(y.lo, x.lo - k);
        const std::int64_t hi = std::min(y.hi(), x.hi() - k);
        return std::make_pair(lo, hi);
    };
    for (std::int64_t k = -horizon; k <= horizon; ++k) {
        auto [lo, hi] = overlap(k);
        if (hi - lo + 1 < 2 * horizon || hi < lo)
            throw Inconclusive("windows overlap by fewer than 2*horizon symbols");
    }
    for (std::int64_t r = 0; r <= horizon; ++r) {
        for (std::int64_t k : {-r, r}) {
            if (r == 0 && k != 0) continue;
            auto [lo, hi] = overlap(k);
            const auto n = static_cast<std::size_t>(hi - lo + 1);
            if (std::memcmp(&y.symbols[static_cast<std::size_t>(lo - y.lo)],
                            &x.symbols[static_cast<std::size_t>(lo + k - x.lo)], n) == 0)
                return k;
            if (r == 0) break;
        }
    }
    return std::nullopt;
}

std::string witness_case_name(WitnessCase c) {
    switch (c) {
        case WitnessCase::THETA_00_vs_1: return "THETA_00_vs_1";
        case WitnessCase::ETA_I: return "ETA_I";
        case WitnessCase::ETA_II: return "ETA_II";
        case WitnessCase::ETA_III: return "ETA_III";
    }
    return "?";
}

namespace {

std::int64_t as_i64(const BigInt& v) { return v.convert_to<std::int64_t>(); }

struct Aligned {
    std::vector<PlacedBlock> dx, dy;
    std::size_t ix = 0, iy = 0;  // indices of D_s, E_s
    std::int64_t k_tilde = 0;
    std::int64_t s = 0;
};

/// Decomposes both windows at `level`, aligns the block holding x_0, and looks for the
/// mismatch of least |s| with |s| <= m. Empty when every block pair up to m agrees.
std::optional<Aligned> align_and_compare(const ParseScheme& scheme, const SequenceWindow& x,
                                         const SequenceWindow& y, int level, std::int64_t m) {
    Aligned a;
    a.dx = block_decomposition(scheme, x, level);
    a.dy = block_decomposition(scheme, y, level);
    std::optional<std::size_t> i0;
    for (std::size_t i = 0; i < a.dx.size(); ++i)
        if (a.dx[i].start <= 0 && 0 < a.dx[i].start + a.dx[i].length) i0 = i;
    if (!i0) throw Inconclusive("no complete block covers index 0 of x");
    const std::int64_t d0 = a.dx[*i0].start;
    std::optional<std::size_t> j0;
    std::int64_t best = 0;
    for (std::size_t j = 0; j < a.dy.size(); ++j) {
        const std::int64_t k = d0 - a.dy[j].start;
        const bool better = !j0 || std::abs(k) < std::abs(best) ||
                            (std::abs(k) == std::abs(best) && k < best);
        if (better) {
            j0 = j;
            best = k;
        }
    }
    if (!j0) throw Inconclusive("no complete block in y");
    a.k_tilde = best;
    {
        // Pairs that coincide after block alignment are one orbit as far as the windows show.
        const std::int64_t lo = std::max(x.lo, y.lo + best), hi = std::min(x.hi(), y.hi() + best);
        bool agree = hi - lo > 2 * m;
        for (std::int64_t p = lo; agree && p <= hi; ++p) agree = x.at(p) == y.at(p - best);
        if (agree) throw PreconditionError("windows agree up to a shift of " + std::to_string(best));
    }
    for (std::int64_t r = 0; r <= m; ++r) {
        for (std::int64_t s : {r, -r}) {
            if (r == 0 && s != 0) continue;
            const std::int64_t ix = static_cast<std::int64_t>(*i0) + s;
            const std::int64_t iy = static_cast<std::int64_t>(*j0) + s;
            if (ix < 0 || iy < 0 || ix >= static_cast<std::int64_t>(a.dx.size()) ||
                iy >= static_cast<std::int64_t>(a.dy.size()))
                throw Inconclusive("windows hold too few blocks around the origin");
            if (a.dx[static_cast<std::size_t>(ix)].kind != a.dy[static_cast<std::size_t>(iy)].kind) {
                a.ix = static_cast<std::size_t>(ix);
                a.iy = static_cast<std::size_t>(iy);
                a.s = s;
                return a;
            }
            if (r == 0) break;
        }
    }
    return std::nullopt;
}

Word window_slice(const SequenceWindow& w, std::int64_t at, std::size_t len) {
    if (at < w.lo || at + static_cast<std::int64_t>(len) - 1 > w.hi())
        throw Inconclusive("witness pattern runs past the window");
    const auto from = static_cast<std::size_t>(at - w.lo);
    return Word(w.symbols.begin() + static_cast<std::ptrdiff_t>(from),
                w.symbols.begin() + static_cast<std::ptrdiff_t>(from + len));
}

void check_bounds(StructureWitness& w) {
    const BigInt m = w.m;
    const BigInt l = w.block_length;
    const BigInt m1 = abs(BigInt(w.m1)), m2 = abs(BigInt(w.m2)), d = abs(BigInt(w.m1 - w.m2));
    if (w.family == Family::THETA) {
        w.position_bound_ok = m1 <= (m + 3) * (l + 2) && m2 <= (m + 3) * (l + 2);
        w.difference_bound_ok = 2 * d <= l + 3;
    } else {
        const BigInt l_next = eta_length(w.n + 1);
        w.position_bound_ok = m1 <= (m + 3) * l_next && m2 <= (m + 3) * l_next;
        w.difference_bound_ok = 2 * d <= l + 4;
    }
    auto iv = witness_intervals(w, w.family);
    w.L = iv.L;
    w.M = iv.M;
    w.t_shift = iv.t_shift;
    w.gamma = iv.gamma;
    const IntegerInterval shifted{w.M.lo + w.t_shift, w.M.hi + w.t_shift};
    w.intervals_ok = w.M.length() > 0 && w.L.contains(w.M) && w.L.contains(shifted) && w.gamma > 0;
    w.bounds_ok = w.position_bound_ok && w.difference_bound_ok && w.intervals_ok;
}

StructureWitness theta_witness(const ParseScheme& scheme, const SequenceWindow& x,
                               const SequenceWindow& y, int n0, std::int64_t m) {
    const int top = 20;
    for (int level = n0; level <= top; ++level) {
        auto hit = align_and_compare(scheme, x, y, level, m);
        if (!hit) continue;
        const PlacedBlock& d = hit->dx[hit->ix];
        const PlacedBlock& e = hit->dy[hit->iy];
        auto h = build_hierarchy(Family::THETA, level);
        const BlockLevel& lv = h.level(level);
        if (!lv.materialized) throw Inconclusive("level block beyond the materialization cap");
        const Word& c = *lv.c;
        const std::int64_t l = as_i64(lv.length);
        auto pattern = [&](BlockKind k) {
            return k == BlockKind::A ? concat({c, Word{0, 0}, c}) : concat({c, Word{1}, c});
        };
        StructureWitness w;
        w.family = Family::THETA;
        w.n = level;
        w.m = m;
        w.block_length = lv.length;
        w.witness_case = WitnessCase::THETA_00_vs_1;
        w.k_align = hit->k_tilde;
        w.s_index = hit->s;
        w.m1 = d.start - l;
        w.m2 = e.start - l;
        const std::int64_t adjust = (e.start + hit->k_tilde) - d.start;
        w.sub_case = std::string(hit->s >= 0 ? "s>=0" : "s<0") + ", y block start offset " +
                     std::to_string(adjust);
        w.pattern_x = pattern(d.kind);
        w.pattern_y = pattern(e.kind);
        w.x_has_a_side = d.kind == BlockKind::A;
        if (window_slice(x, w.m1, w.pattern_x.size()) != w.pattern_x ||
            window_slice(y, w.m2, w.pattern_y.size()) != w.pattern_y)
            throw VerificationFailure("witness patterns do not occur at m1/m2");
        check_bounds(w);
        return w;
    }
    throw Inconclusive("no mismatch within the parse threshold up to level " + std::to_string(top));
}

StructureWitness eta_witness(const ParseScheme& scheme, const SequenceWindow& x,
                             const SequenceWindow& y, int n0, std::int64_t m) {
    const int top = 20;
    for (int upper = n0 + 1; upper <= top; ++upper) {
        auto hit = align_and_compare(scheme, x, y, upper, m);
        if (!hit) continue;
        const int n = upper - 1;
        auto h = build_hierarchy(Family::ETA, n);
        const BlockLevel& lv = h.level(n);
        if (!lv.materialized) throw Inconclusive("level block beyond the materialization cap");
        const Word& an = *lv.a;
        const Word& bn = *lv.b;
        const std::int64_t ln = static_cast<std::int64_t>(an.size());
        const std::int64_t l = as_i64(eta_length(upper));

        // P carries A_{n+1}, Q carries B_{n+1} at the same aligned place.
        const bool swapped = hit->dx[hit->ix].kind == BlockKind::B;
        const auto& dp = swapped ? hit->dy : hit->dx;
        const auto& dq = swapped ? hit->dx : hit->dy;
        const std::size_t ip = swapped ? hit->iy : hit->ix;
        const std::size_t iq = swapped ? hit->ix : hit->iy;
        if (ip == 0 || iq == 0) throw Inconclusive("no block before the mismatch");
        const std::int64_t i = dp[ip].start;
        const std::int64_t k = i - dq[iq].start;
        const bool prev_p_is_b = dp[ip - 1].kind == BlockKind::B;
        const bool prev_q_is_a = dq[iq - 1].kind == BlockKind::A;

        const Word aba = concat({an, bn, an}), bab = concat({bn, an, bn}), bbb = concat({bn, bn, bn});
        const Word aa = concat({an, an}), bb = concat({bn, bn});
        std::int64_t pp = 0, pq = 0;
        Word pat_p, pat_q;
        WitnessCase wc{};
        std::string branch;
        if (-l <= 8 * k && 8 * k < l) {
            branch = "(a)";
            pp = i; pq = i - k; pat_p = aba; pat_q = bbb; wc = WitnessCase::ETA_I;
        } else if (-3 * l <= 8 * k && 8 * k < -l) {
            branch = "(b)";
            pp = i + ln; pq = i - k; pat_p = bab; pat_q = bbb; wc = WitnessCase::ETA_II;
        } else if (8 * k < -3 * l) {
            if (prev_q_is_a) {
                branch = "(c) previous y-side block A";
                pp = i + ln; pq = i - k - ln + 1; pat_p = bab; pat_q = bbb; wc = WitnessCase::ETA_II;
            } else if (prev_p_is_b) {
                branch = "(c) previous blocks B, B";
                pp = i - ln; pq = i - k - 3 * ln + 2; pat_p = aa; pat_q = bb; wc = WitnessCase::ETA_III;
            } else {
                branch = "(c) previous blocks A, B";
                pp = i - 2 * ln + 1; pq = i - k - 4 * ln + 3; pat_p = aba; pat_q = bbb;
                wc = WitnessCase::ETA_I;
            }
        } else if (8 * k < 3 * l) {
            if (prev_p_is_b) {
                branch = "(d) previous block B";
                pp = i - ln; pq = i - k; pat_p = aa; pat_q = bb; wc = WitnessCase::ETA_III;
            } else {
                branch = "(d) previous block A";
                pp = i - ln + 1; pq = i - k; pat_p = bab; pat_q = bbb; wc = WitnessCase::ETA_II;
            }
        } else {
            if (prev_p_is_b) {
                branch = "(e) previous block B";
                pp = i - ln; pq = i - k + ln - 1; pat_p = aa; pat_q = bb; wc = WitnessCase::ETA_III;
            } else {
                branch = "(e) previous block A";
                pp = i - 2 * ln + 1; pq = i - k; pat_p = aba; pat_q = bbb; wc = WitnessCase::ETA_I;
            }
        }
        StructureWitness w;
        w.family = Family::ETA;
        w.n = n;
        w.m = m;
        w.block_length = lv.length;
        w.witness_case = wc;
        w.sub_case = branch + (swapped ? ", roles swapped" : "");
        w.k_align = swapped ? -k : k;
        w.s_index = hit->s;
        w.x_has_a_side = !swapped;
        w.m1 = swapped ? pq : pp;
        w.m2 = swapped ? pp : pq;
        w.pattern_x = swapped ? pat_q : pat_p;
        w.pattern_y = swapped ? pat_p : pat_q;
        if (window_slice(x, w.m1, w.pattern_x.size()) != w.pattern_x ||
            window_slice(y, w.m2, w.pattern_y.size()) != w.pattern_y)
            throw VerificationFailure("witness patterns do not occur at m1/m2 (" + branch + ")");
        check_bounds(w);
        return w;
    }
    throw Inconclusive("no mismatch within the parse threshold up to level " + std::to_string(top));
}

}  // namespace

StructureWitness find_structure_witness(Family family, const SequenceWindow& x,
                                        const SequenceWindow& y, int n) {
    if (family != Family::THETA && family != Family::ETA)
        throw PreconditionError("structure witnesses exist for theta and eta only");
    if (n < 1) throw InvalidInput("level must be at least 1");
    auto scheme = parse_scheme(family);
    const auto m = static_cast<std::int64_t>(parse_threshold(scheme));
    const std::int64_t horizon = std::min<std::int64_t>(
        64, static_cast<std::int64_t>(std::min(x.size(), y.size()) / 4));
    std::optional<std::int64_t> k;
    try {
        k = same_orbit(x, y, horizon);
    } catch (const Inconclusive&) {
    }
    if (k) throw PreconditionError("windows agree up to a shift of " + std::to_string(*k));
    StructureWitness w = family == Family::THETA ? theta_witness(scheme, x, y, n, m)
                                                 : eta_witness(scheme, x, y, n, m);
    if (!w.bounds_ok)
        throw VerificationFailure("structure witness at level " + std::to_string(w.n) +
                                  " violates its bounds: m1=" + std::to_string(w.m1) +
                                  " m2=" + std::to_string(w.m2) + " " + w.sub_case);
    return w;
}

WitnessIntervals witness_intervals(const StructureWitness& w, Family family) {
    WitnessIntervals iv;
    const std::int64_t m = w.m;
    std::int64_t len_x = 0, len_y = 0, radius = 0;
    double denominator = 0.0;
    if (family == Family::THETA) {
        const std::int64_t l = as_i64(w.block_length);
        len_x = len_y = l;  // the first C_n of each pattern
        radius = (m + 4) * (l + 2);
        iv.t_shift = l + 1;
        iv.gamma_lower_bound = 1.0 / (4.0 * static_cast<double>(m + 4));
    } else {
        const std::int64_t ln = as_i64(w.block_length);
        const std::int64_t l_next = as_i64(eta_length(w.n + 1));
        // First block of each pattern: A for ABA and AA, B otherwise.
        auto first_len = [&](bool a_side) {
            return a_side && w.witness_case != WitnessCase::ETA_II ? ln : ln - 1;
        };
        len_x = first_len(w.x_has_a_side);
        len_y = first_len(!w.x_has_a_side);
        radius = (m + 4) * l_next;
        iv.t_shift = w.witness_case == WitnessCase::ETA_III ? ln - 1 : 2 * ln - 2;
        iv.gamma_lower_bound = 0.0;
    }
    denominator = 2.0 * static_cast<double>(radius);
    iv.L = {-radius, radius + 1};
    iv.M = {std::max(w.m1, w.m2), std::min(w.m1 + len_x, w.m2 + len_y)};
    if (iv.M.hi < iv.M.lo) iv.M.hi = iv.M.lo;
    iv.gamma = static_cast<double>(iv.M.length()) / denominator;
    return iv;
}

bool witness_shift_consistent(const StructureWitness& w, const SequenceWindow& x,
                              const SequenceWindow& y) {
    const std::int64_t ex = w.x_has_a_side ? 1 : 0;
    const std::int64_t ey = w.x_has_a_side ? 0 : 1;
    for (std::int64_t i = w.M.lo; i < w.M.hi; ++i) {
        const std::int64_t jx = i + w.t_shift + ex, jy = i + w.t_shift + ey;
        if (!x.contains(i) || !x.contains(jx) || !y.contains(i) || !y.contains(jy)) return false;
        if (x.at(i) != x.at(jx) || y.at(i) != y.at(jy)) return false;
    }
    return true;
}

}  // namespace subdyn
