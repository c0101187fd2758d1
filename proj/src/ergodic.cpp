#include "subdyn/ergodic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <numbers>
#include <numeric>
#include <random>

#include "subdyn/errors.hpp"
#include "subdyn/recognizer.hpp"

namespace subdyn {

namespace {

constexpr long double kTwoPi = 2.0L * std::numbers::pi_v<long double>;

MeasureEstimate from_quarters(double total, double window, const std::array<double, 4>& q) {
    const auto [mn, mx] = std::minmax_element(q.begin(), q.end());
    return MeasureEstimate{total, window, (*mx - *mn) / 2.0};
}

std::size_t quarter_of(std::int64_t j, std::int64_t n) {
    return static_cast<std::size_t>(std::min<std::int64_t>(3, (4 * j) / n));
}

std::array<std::int64_t, 4> quarter_sizes(std::int64_t n) {
    std::array<std::int64_t, 4> s{};
    for (std::size_t k = 0; k < 4; ++k) {
        std::int64_t a = (static_cast<std::int64_t>(k) * n + 3) / 4;
        std::int64_t b = k == 3 ? n : (static_cast<std::int64_t>(k + 1) * n + 3) / 4;
        s[k] = b - a;
    }
    return s;
}

/// 1 at window offsets where u starts.
std::vector<std::uint8_t> occurrence_mask(const SequenceWindow& w, WordView u) {
    std::vector<std::uint8_t> mask(w.size(), 0);
    for (std::int64_t p : occurrence_positions(w, u)) mask[static_cast<std::size_t>(p - w.lo)] = 1;
    return mask;
}

long double overlap_length(const std::vector<std::pair<long double, long double>>& a,
                           const std::vector<std::pair<long double, long double>>& b, long double shift,
                           long double lo, long double hi) {
    // |A cap (B - shift) cap [lo, hi)| for sorted disjoint interval lists.
    long double total = 0.0L;
    std::size_t j = 0;
    for (const auto& [a0, a1] : a) {
        const long double s0 = std::max(a0, lo), s1 = std::min(a1, hi);
        if (s1 <= s0) continue;
        while (j < b.size() && b[j].second - shift <= s0) ++j;
        for (std::size_t k = j; k < b.size() && b[k].first - shift < s1; ++k) {
            const long double lo2 = std::max(s0, b[k].first - shift);
            const long double hi2 = std::min(s1, b[k].second - shift);
            if (hi2 > lo2) total += hi2 - lo2;
        }
    }
    return total;
}

struct HierarchyCache {
    std::mutex mu;
    std::map<std::string, BlockHierarchy> by_name;
};

HierarchyCache& hierarchy_cache() {
    static HierarchyCache c;
    return c;
}

const BlockHierarchy& cached_hierarchy(const SymbolicSystem& sys) {
    auto& cache = hierarchy_cache();
    std::lock_guard lock(cache.mu);
    const std::string key = family_name(sys.family) + ":" + sys.name;
    auto it = cache.by_name.find(key);
    if (it == cache.by_name.end())
        it = cache.by_name.emplace(key, build_hierarchy(sys.family, 20, sys.sub)).first;
    return it->second;
}

std::uint64_t djr_h(int n) { return djr_counts(n).h.convert_to<std::uint64_t>(); }

}  // namespace

SymbolicSystem system_by_name(const std::string& name) {
    if (name == "theta") return {name, Family::THETA, theta()};
    if (name == "eta") return {name, Family::ETA, eta()};
    if (name == "djr") return {name, Family::DJR, std::nullopt};
    if (auto sub = builtin_substitution(name)) return system_from_substitution(*sub, name);
    throw InvalidInput("unknown system: " + name);
}

SymbolicSystem system_from_substitution(const Substitution& sub, const std::string& name) {
    if (sub.alphabet_size() != 2) throw InvalidInput("only two-letter substitutions are supported");
    if (!is_primitive(sub).primitive) throw PreconditionError("substitution is not primitive");
    return {name, Family::GENERAL_S, sub};
}

SequenceWindow random_window(const SymbolicSystem& sys, std::int64_t size, std::uint64_t seed) {
    if (size < 1) throw InvalidInput("window size must be positive");
    const std::int64_t hw = size / 2;
    std::mt19937_64 rng(seed);
    if (sys.family == Family::DJR) {
        int level = 7;
        while (level <= 10 && djr_h(level) < static_cast<std::uint64_t>(2 * hw + 2)) ++level;
        if (level > 10) throw InvalidInput("window too large for the DJR levels available");
        const std::uint64_t len = djr_h(level);
        std::uniform_int_distribution<std::uint64_t> pick(static_cast<std::uint64_t>(hw),
                                                          len - static_cast<std::uint64_t>(hw) - 1);
        auto w = djr_window(level, pick(rng), hw);
        w.provenance.family = sys.name;
        w.provenance.note = "seed " + std::to_string(seed);
        return w;
    }
    const BlockHierarchy& h = cached_hierarchy(sys);
    for (int n = h.depth(); n >= 1; --n) {
        const BlockLevel& lv = h.level(n);
        if (!lv.materialized || !lv.a) continue;
        const auto len = static_cast<std::int64_t>(lv.a->size());
        if (len < 2 * hw + 2) break;
        std::uniform_int_distribution<std::int64_t> pick(hw, len - hw - 1);
        auto w = window_from_hierarchy(h, n, pick(rng), hw, BlockKind::A);
        w.provenance.family = sys.name;
        w.provenance.note = "seed " + std::to_string(seed);
        return w;
    }
    throw InvalidInput("window larger than the deepest materialized block");
}

SequenceWindow block_centred_window(const SymbolicSystem& sys, int level, BlockKind kind, std::int64_t size,
                                    std::uint64_t seed) {
    if (sys.family == Family::DJR) throw InvalidInput("djr has a single block kind; use random_window");
    const BlockHierarchy& h = cached_hierarchy(sys);
    if (level < 1 || level > h.depth() || !h.level(level).materialized)
        throw InvalidInput("level is not materialized");
    const Word& block = kind == BlockKind::A ? *h.level(level).a : *h.level(level).b;
    const auto len = static_cast<std::int64_t>(block.size());
    const std::int64_t half = size / 2;
    const auto deep = random_window(sys, 2 * size + 4 * len, seed);
    std::optional<std::int64_t> best;
    for (std::int64_t p : occurrence_positions(deep, block)) {
        const std::int64_t centre = p + len / 2;
        if (centre - half < deep.lo || centre + half > deep.hi()) continue;
        if (!best || std::abs(centre) < std::abs(*best)) best = centre;
    }
    if (!best) throw Inconclusive("no usable block copy in the sampling window");
    SequenceWindow w;
    w.symbols.assign(deep.symbols.begin() + (*best - half - deep.lo),
                     deep.symbols.begin() + (*best + half + 1 - deep.lo));
    w.lo = -half;
    w.provenance = deep.provenance;
    w.provenance.level = level;
    w.provenance.note += kind == BlockKind::A ? ", centred on A" : ", centred on B";
    return w;
}

std::vector<std::int64_t> occurrence_positions(const SequenceWindow& w, WordView u) {
    std::vector<std::int64_t> out;
    const std::size_t m = u.size();
    if (m == 0 || m > w.size()) return out;
    // Knuth-Morris-Pratt, so block-length patterns stay linear.
    std::vector<std::size_t> fail(m, 0);
    for (std::size_t i = 1, k = 0; i < m; ++i) {
        while (k > 0 && u[i] != u[k]) k = fail[k - 1];
        if (u[i] == u[k]) ++k;
        fail[i] = k;
    }
    const Word& s = w.symbols;
    for (std::size_t i = 0, k = 0; i < s.size(); ++i) {
        while (k > 0 && s[i] != u[k]) k = fail[k - 1];
        if (s[i] == u[k]) ++k;
        if (k == m) {
            out.push_back(w.lo + static_cast<std::int64_t>(i + 1 - m));
            k = fail[k - 1];
        }
    }
    return out;
}

MeasureEstimate birkhoff(const SequenceWindow& w, WordView u) {
    return birkhoff(w, u, static_cast<std::int64_t>(w.size()) - static_cast<std::int64_t>(u.size()) + 1);
}

MeasureEstimate birkhoff(const SequenceWindow& w, WordView u, std::int64_t n) {
    if (u.empty()) throw InvalidInput("empty word");
    if (n < 1000) throw Inconclusive("window shorter than 1000 positions");
    if (n + static_cast<std::int64_t>(u.size()) - 1 > static_cast<std::int64_t>(w.size()))
        throw Inconclusive("window does not cover the requested positions");
    std::array<std::int64_t, 4> counts{};
    std::int64_t total = 0;
    for (std::int64_t p : occurrence_positions(w, u)) {
        const std::int64_t j = p - w.lo;
        if (j >= n) break;
        ++counts[quarter_of(j, n)];
        ++total;
    }
    const auto sizes = quarter_sizes(n);
    std::array<double, 4> q{};
    for (std::size_t k = 0; k < 4; ++k) q[k] = static_cast<double>(counts[k]) / static_cast<double>(sizes[k]);
    return from_quarters(static_cast<double>(total) / static_cast<double>(n), static_cast<double>(n), q);
}

std::vector<std::pair<long double, long double>> flow_visit_intervals(const TilingPoint& start,
                                                                     const TileLengths& len,
                                                                     const FlowCylinder& c,
                                                                     long double horizon) {
    validate_cylinder(c, len);
    std::vector<std::pair<long double, long double>> out;
    const auto m = static_cast<std::int64_t>(c.u.size());
    const SequenceWindow& w = start.base;
    // Occurrences from the start tile onwards, walked alongside the tiles.
    const auto occ = occurrence_positions(w, c.u);
    auto it = std::lower_bound(occ.begin(), occ.end(), start.index);
    std::int64_t dp = 0, dq = 0;
    for (std::int64_t j = start.index;; ++j) {
        const long double left = boundary_position(len, dp, dq) - start.offset;
        if (left >= horizon) break;
        if (j + m - 1 > w.hi()) throw Inconclusive("trajectory runs past the window");
        while (it != occ.end() && *it < j) ++it;
        if (it != occ.end() && *it == j) {
            const long double a = std::max(0.0L, left + c.lo), b = std::min(horizon, left + c.hi);
            if (b > a) out.emplace_back(a, b);
        }
        if (w.at(j) == 0) ++dp; else ++dq;
    }
    return out;
}

MeasureEstimate flow_birkhoff(const TilingPoint& start, const TileLengths& len, const FlowCylinder& c,
                              long double horizon) {
    if (horizon < 1000.0L) throw Inconclusive("trajectory shorter than 1000 time units");
    const auto iv = flow_visit_intervals(start, len, c, horizon);
    std::array<double, 4> q{};
    const long double qlen = horizon / 4.0L;
    long double total = 0.0L;
    for (const auto& [a, b] : iv) total += b - a;
    for (std::size_t k = 0; k < 4; ++k) {
        const long double lo = qlen * static_cast<long double>(k), hi = k == 3 ? horizon : lo + qlen;
        long double s = 0.0L;
        for (const auto& [a, b] : iv) {
            const long double x = std::max(a, lo), y = std::min(b, hi);
            if (y > x) s += y - x;
        }
        q[k] = static_cast<double>(s / (hi - lo));
    }
    return from_quarters(static_cast<double>(total / horizon), static_cast<double>(horizon), q);
}

std::vector<MeasureEstimate> correlation_sequence(const SequenceWindow& w, WordView u,
                                                  const std::vector<std::int64_t>& shifts,
                                                  std::int64_t n) {
    if (n < 1) throw InvalidInput("need at least one position");
    const auto mask = occurrence_mask(w, u);
    const auto size = static_cast<std::int64_t>(w.size());
    const auto m = static_cast<std::int64_t>(u.size());
    const auto sizes = quarter_sizes(n);
    std::vector<MeasureEstimate> out;
    for (std::int64_t k : shifts) {
        if (k < 0) throw InvalidInput("shifts must be non-negative");
        if (n + k + m - 1 > size) throw Inconclusive("shift runs past the window");
        std::array<std::int64_t, 4> counts{};
        std::int64_t total = 0;
        for (std::int64_t j = 0; j < n; ++j) {
            if (mask[static_cast<std::size_t>(j)] & mask[static_cast<std::size_t>(j + k)]) {
                ++counts[quarter_of(j, n)];
                ++total;
            }
        }
        std::array<double, 4> q{};
        for (std::size_t t = 0; t < 4; ++t) q[t] = static_cast<double>(counts[t]) / static_cast<double>(sizes[t]);
        out.push_back(from_quarters(static_cast<double>(total) / static_cast<double>(n), static_cast<double>(n), q));
    }
    return out;
}

std::vector<double> rational_grid(int max_q) {
    if (max_q < 1) throw InvalidInput("max_q must be positive");
    std::vector<std::pair<int, int>> fr;
    for (int q = 1; q <= max_q; ++q)
        for (int p = 0; p < q; ++p)
            if (std::gcd(p, q) == 1) fr.emplace_back(p, q);
    std::sort(fr.begin(), fr.end(), [](auto a, auto b) { return a.first * b.second < b.first * a.second; });
    std::vector<double> out;
    for (auto [p, q] : fr) out.push_back(static_cast<double>(p) / q);
    return out;
}

std::vector<double> default_lambda_grid(std::optional<double> flow_alpha) {
    auto g = rational_grid(16);
    for (int i = 1; i <= 64; ++i) g.push_back(i / 65.0);
    if (flow_alpha) {
        g.push_back(1.0 / *flow_alpha);
        g.push_back(1.0 / (1.0 + *flow_alpha));
    }
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end(), [](double a, double b) { return std::abs(a - b) < 1e-15; }),
            g.end());
    return g;
}

SpectralScan spectral_scan(const SequenceWindow& w, WordView u, const std::vector<double>& lambdas,
                           std::int64_t n) {
    if (n < 1 || n + static_cast<std::int64_t>(u.size()) - 1 > static_cast<std::int64_t>(w.size()))
        throw InvalidInput("scan length does not fit the window");
    std::vector<std::int64_t> pos;
    for (std::int64_t p : occurrence_positions(w, u)) {
        if (p - w.lo >= n) break;
        pos.push_back(p - w.lo);
    }
    SpectralScan s;
    s.lambdas = lambdas;
    s.window = static_cast<double>(n);
    for (double lambda : lambdas) {
        if (lambda == 0.0) {
            s.moduli.push_back(static_cast<double>(pos.size()) / static_cast<double>(n));
            continue;
        }
        long double re = 0.0L, im = 0.0L;
        for (std::int64_t j : pos) {
            long double phase = static_cast<long double>(lambda) * static_cast<long double>(j);
            phase -= std::floor(phase);
            re += std::cos(kTwoPi * phase);
            im -= std::sin(kTwoPi * phase);
        }
        s.moduli.push_back(static_cast<double>(std::hypot(re, im) / static_cast<long double>(n)));
    }
    return s;
}

SpectralScan spectral_scan_flow(const TilingPoint& start, const TileLengths& len, const FlowCylinder& c,
                                const std::vector<double>& lambdas, long double horizon) {
    const auto iv = flow_visit_intervals(start, len, c, horizon);
    SpectralScan s;
    s.lambdas = lambdas;
    s.window = static_cast<double>(horizon);
    for (double lambda : lambdas) {
        if (lambda == 0.0) {
            long double total = 0.0L;
            for (const auto& [a, b] : iv) total += b - a;
            s.moduli.push_back(static_cast<double>(total / horizon));
            continue;
        }
        const long double l = lambda;
        std::complex<long double> acc{0.0L, 0.0L};
        for (const auto& [a, b] : iv) {
            // int_a^b e^{-2 pi i l t} dt = (e^{-2 pi i l a} - e^{-2 pi i l b}) / (2 pi i l)
            const long double pa = kTwoPi * l * a, pb = kTwoPi * l * b;
            acc += std::complex<long double>(std::cos(pa) - std::cos(pb), -std::sin(pa) + std::sin(pb));
        }
        acc /= std::complex<long double>(0.0L, kTwoPi * l);
        s.moduli.push_back(static_cast<double>(std::abs(acc) / horizon));
    }
    return s;
}

SequenceWindow rotation_window(double alpha, double beta, double x0, std::int64_t n) {
    if (n < 1) throw InvalidInput("rotation window must be nonempty");
    SequenceWindow w;
    w.symbols.resize(static_cast<std::size_t>(n));
    for (std::int64_t j = 0; j < n; ++j) {
        long double x = static_cast<long double>(x0) + static_cast<long double>(j) * alpha;
        x -= std::floor(x);
        w.symbols[static_cast<std::size_t>(j)] = x < beta ? 1 : 0;
    }
    w.provenance = {"rotation", 0, "alpha " + std::to_string(alpha) + ", beta " + std::to_string(beta)};
    return w;
}

RigidityResult rigidity_test(const SequenceWindow& w, WordView u, const std::vector<std::int64_t>& times,
                             std::int64_t n) {
    RigidityResult r;
    r.measure = birkhoff(w, u, n);
    if (r.measure.value <= 0.0 || r.measure.value < 10.0 * r.measure.stderr_proxy)
        throw Inconclusive("cylinder measure not resolved above its error");
    const auto mask = occurrence_mask(w, u);
    const auto m = static_cast<std::int64_t>(u.size());
    std::int64_t base = 0;
    for (std::int64_t j = 0; j < n; ++j) base += mask[static_cast<std::size_t>(j)];
    for (std::int64_t t : times) {
        if (t < 0 || n + t + m - 1 > static_cast<std::int64_t>(w.size()))
            throw Inconclusive("time runs past the window");
        std::int64_t hit = 0;
        for (std::int64_t j = 0; j < n; ++j)
            hit += mask[static_cast<std::size_t>(j)] & mask[static_cast<std::size_t>(j + t)];
        r.times.push_back(static_cast<double>(t));
        r.ratios.push_back(static_cast<double>(hit) / static_cast<double>(base));
    }
    return r;
}

RigidityResult rigidity_test_flow(const TilingPoint& start, const TileLengths& len, const FlowCylinder& c,
                                  const std::vector<long double>& times, long double horizon) {
    RigidityResult r;
    r.measure = flow_birkhoff(start, len, c, horizon);
    if (r.measure.value <= 0.0 || r.measure.value < 10.0 * r.measure.stderr_proxy)
        throw Inconclusive("cylinder measure not resolved above its error");
    long double tmax = 0.0L;
    for (long double t : times) {
        if (t < 0.0L) throw InvalidInput("rigidity times must be nonnegative");
        tmax = std::max(tmax, t);
    }
    const auto iv = flow_visit_intervals(start, len, c, horizon + tmax + len.of(c.u[0]));
    const long double base = overlap_length(iv, iv, 0.0L, 0.0L, horizon);
    for (long double t : times) {
        r.times.push_back(static_cast<double>(t));
        r.ratios.push_back(static_cast<double>(overlap_length(iv, iv, t, 0.0L, horizon) / base));
    }
    return r;
}

DjrWeakMixingReport djr_weak_mixing_experiment(double alpha, int depth, std::uint64_t seed,
                                               std::int64_t window) {
    if (depth < 3) throw Inconclusive("depth below 3 leaves no level to test");
    if (depth > 5) throw InvalidInput("depth above 5 needs B_7, past the materialization cap");
    if (!(alpha > 0.0)) throw InvalidInput("alpha must be positive");
    DjrWeakMixingReport rep;
    rep.alpha = alpha;
    rep.depth = depth;
    rep.seed = seed;
    const long double r = djr_ratio_infinity();
    rep.ratio_limit = static_cast<double>(r);
    const long double mu0 = 1.0L / (1.0L + r), mu1 = r / (1.0L + r);
    rep.c = static_cast<double>((1.0L + r * alpha) / (1.0L + r));
    rep.d = static_cast<double>(static_cast<long double>(rep.c) / (mu0 + mu1 * alpha));
    if (window <= 0)
        window = std::max<std::int64_t>(1'000'000, 16 * static_cast<std::int64_t>(djr_h(depth + 1)));
    rep.window = window;
    const SequenceWindow w = random_window(system_by_name("djr"), window, seed);
    const TileLengths len = TileLengths::unit_and(alpha);
    // Tile boundary positions from the window's left end.
    std::vector<std::int64_t> zeros(w.size() + 1, 0);
    for (std::size_t i = 0; i < w.size(); ++i) zeros[i + 1] = zeros[i] + (w.symbols[i] == 0 ? 1 : 0);
    auto position = [&](std::size_t i) {
        return boundary_position(len, zeros[i], static_cast<std::int64_t>(i) - zeros[i]);
    };
    const long double total = position(w.size());
    const auto hierarchy = build_hierarchy(Family::DJR, depth + 1);
    auto estimate = [&](const Word& pattern, long double span, std::int64_t& count) {
        std::vector<std::pair<long double, long double>> iv;
        for (std::int64_t p : occurrence_positions(w, pattern)) {
            const long double a = position(static_cast<std::size_t>(p - w.lo));
            iv.emplace_back(a, std::min(total, a + span));
        }
        count = static_cast<std::int64_t>(iv.size());
        std::array<double, 4> q{};
        long double sum = 0.0L;
        for (const auto& [a, b] : iv) sum += b - a;
        for (std::size_t k = 0; k < 4; ++k) {
            const long double lo = total * static_cast<long double>(k) / 4.0L;
            const long double hi = k == 3 ? total : total * static_cast<long double>(k + 1) / 4.0L;
            long double s = 0.0L;
            for (const auto& [a, b] : iv) {
                const long double x = std::max(a, lo), y = std::min(b, hi);
                if (y > x) s += y - x;
            }
            q[k] = static_cast<double>(s / (hi - lo));
        }
        return from_quarters(static_cast<double>(sum / total), static_cast<double>(total), q);
    };
    for (int n = 3; n <= depth; ++n) {
        DjrLevelReport lv;
        lv.n = n;
        const Word& bn = *hierarchy.level(n).b;
        const Word& bn1 = *hierarchy.level(n + 1).b;
        const std::size_t reps = std::size_t{1} << n;
        const auto c = djr_counts(n);
        const std::int64_t an = c.alpha.convert_to<std::int64_t>(), bq = c.beta.convert_to<std::int64_t>();
        const std::int64_t hn = c.h.convert_to<std::int64_t>();
        lv.patch_time = static_cast<long double>(reps) * boundary_position(len, an, bq);
        const Word run = repeat(bn, reps);
        const Word e_pattern = concat({run, Word{1}, run});
        const Word f_pattern = repeat(bn, 2 * reps);
        lv.nu_e = estimate(e_pattern, lv.patch_time, lv.occurrences_e);
        lv.nu_f = estimate(f_pattern, lv.patch_time, lv.occurrences_f);
        // Displacements read off the materialized B_{n+1}.
        const auto split = static_cast<std::size_t>(reps) * static_cast<std::size_t>(hn);
        auto count_pq = [&](std::size_t from, std::size_t to) {
            std::int64_t p = 0, q = 0;
            for (std::size_t i = from; i < to; ++i) (bn1[i] == 0 ? p : q) += 1;
            return std::pair{p, q};
        };
        const auto [sp, sq] = count_pq(0, split + 1);
        lv.spacer_dp = sp - static_cast<std::int64_t>(reps) * an;
        lv.spacer_dq = sq - static_cast<std::int64_t>(reps) * bq;
        const auto [pp, pq] = count_pq(split + 1, bn1.size());
        lv.pure_dp = pp - static_cast<std::int64_t>(reps) * an;
        lv.pure_dq = pq - static_cast<std::int64_t>(reps) * bq;
        lv.spacer_is_one_tile = lv.spacer_dp == 0 && lv.spacer_dq == 1 && bn1[split] == 1 &&
                                occurs_at(bn1, 0, run) && occurs_at(bn1, split + 1, run);
        lv.pure_shift_ok = lv.pure_dp == 0 && lv.pure_dq == 0;
        rep.levels.push_back(lv);
    }
    return rep;
}

std::string joining_class_name(JoiningClass c) {
    switch (c) {
        case JoiningClass::OFF_DIAGONAL: return "OFF_DIAGONAL";
        case JoiningClass::PRODUCT_CONSISTENT: return "PRODUCT_CONSISTENT";
        case JoiningClass::INCONCLUSIVE: return "INCONCLUSIVE";
    }
    return "?";
}

double product_tolerance(std::int64_t window) {
    return std::max(0.02, 10.0 / std::sqrt(static_cast<double>(window)));
}

JoiningEstimate joining_estimate(const SequenceWindow& x, const SequenceWindow& y,
                                 const std::vector<Word>& p_words, const std::vector<Word>& q_words,
                                 std::int64_t n, const std::optional<Substitution>& sub,
                                 std::optional<double> tolerance, std::int64_t horizon) {
    if (x.provenance.family != y.provenance.family)
        throw InvalidInput("joining needs two windows of the same system");
    if (p_words.empty() || q_words.empty()) throw InvalidInput("no cylinders given");
    JoiningEstimate je;
    je.window = n;
    je.tolerance = tolerance.value_or(product_tolerance(n));
    std::size_t longest = 0;
    for (const auto& v : p_words) longest = std::max(longest, v.size());
    for (const auto& v : q_words) longest = std::max(longest, v.size());
    const std::int64_t start = std::max(x.lo, y.lo);
    const std::int64_t end = start + n + static_cast<std::int64_t>(longest) - 1;
    if (end - 1 > std::min(x.hi(), y.hi())) throw Inconclusive("windows do not cover the requested range");
    const LetterNames names =
        sub ? sub->names() : LetterNames::digits();
    auto masks = [&](const SequenceWindow& w, const std::vector<Word>& words) {
        std::vector<std::vector<std::uint8_t>> out;
        for (const auto& v : words) {
            std::vector<std::uint8_t> m(static_cast<std::size_t>(n), 0);
            for (std::int64_t p : occurrence_positions(w, v)) {
                const std::int64_t j = p - start;
                if (j >= 0 && j < n) m[static_cast<std::size_t>(j)] = 1;
            }
            out.push_back(std::move(m));
        }
        return out;
    };
    const auto mx = masks(x, p_words), my = masks(y, q_words);
    const double dn = static_cast<double>(n);
    std::vector<double> fx, fy;
    for (std::size_t a = 0; a < p_words.size(); ++a) {
        const auto c = std::count(mx[a].begin(), mx[a].end(), 1);
        fx.push_back(static_cast<double>(c) / dn);
        je.x_frequency[names.format(p_words[a])] = fx.back();
    }
    for (std::size_t b = 0; b < q_words.size(); ++b) {
        const auto c = std::count(my[b].begin(), my[b].end(), 1);
        fy.push_back(static_cast<double>(c) / dn);
        je.y_frequency[names.format(q_words[b])] = fy.back();
    }
    for (std::size_t a = 0; a < p_words.size(); ++a) {
        const std::string pa = names.format(p_words[a]);
        for (std::size_t b = 0; b < q_words.size(); ++b) {
            const std::string qb = names.format(q_words[b]);
            std::int64_t c = 0;
            for (std::int64_t j = 0; j < n; ++j)
                c += mx[a][static_cast<std::size_t>(j)] & my[b][static_cast<std::size_t>(j)];
            const double f = static_cast<double>(c) / dn;
            je.pair_frequencies[{pa, qb}] = f;
            je.x_marginal[pa] += f;
            je.y_marginal[qb] += f;
            const double mp = sub ? word_frequency(*sub, p_words[a]) : fx[a];
            const double mq = sub ? word_frequency(*sub, q_words[b]) : fy[b];
            je.max_deviation = std::max(je.max_deviation, std::abs(f - mp * mq));
        }
    }
    for (const auto& [k, v] : je.x_marginal)
        je.max_marginal_error = std::max(je.max_marginal_error, std::abs(v - je.x_frequency[k]));
    for (const auto& [k, v] : je.y_marginal)
        je.max_marginal_error = std::max(je.max_marginal_error, std::abs(v - je.y_frequency[k]));
    je.k = same_orbit(x, y, horizon);
    if (je.k)
        je.classification = JoiningClass::OFF_DIAGONAL;
    else if (je.max_deviation <= je.tolerance)
        je.classification = JoiningClass::PRODUCT_CONSISTENT;
    else
        je.classification = JoiningClass::INCONCLUSIVE;
    return je;
}

MeasureEstimate t_alpha_orbit_frequency(const TilingPoint& start, const TileLengths& len,
                                        const FlowCylinder& c, double alpha, std::int64_t iterates) {
    validate_cylinder(c, len);
    if (iterates < 4) throw InvalidInput("too few iterates");
    const SequenceWindow& w = start.base;
    const auto m = static_cast<std::int64_t>(c.u.size());
    std::int64_t j = start.index, dp = 0, dq = 0;
    auto tile_end = [&] {
        return boundary_position(len, dp + (w.at(j) == 0 ? 1 : 0), dq + (w.at(j) == 0 ? 0 : 1));
    };
    std::array<std::int64_t, 4> counts{};
    std::int64_t total = 0;
    for (std::int64_t k = 0; k < iterates; ++k) {
        const long double x = start.offset + static_cast<long double>(k) * alpha;
        while (x >= tile_end()) {
            if (w.at(j) == 0) ++dp; else ++dq;
            ++j;
            if (j > w.hi()) throw Inconclusive("orbit runs past the window");
        }
        if (j + m - 1 > w.hi()) throw Inconclusive("orbit runs past the window");
        const long double off = x - boundary_position(len, dp, dq);
        bool hit = off >= c.lo && off < c.hi;
        for (std::int64_t t = 0; hit && t < m; ++t) hit = w.at(j + t) == c.u[static_cast<std::size_t>(t)];
        if (hit) {
            ++counts[quarter_of(k, iterates)];
            ++total;
        }
    }
    const auto sizes = quarter_sizes(iterates);
    std::array<double, 4> q{};
    for (std::size_t t = 0; t < 4; ++t) q[t] = static_cast<double>(counts[t]) / static_cast<double>(sizes[t]);
    return from_quarters(static_cast<double>(total) / static_cast<double>(iterates),
                         static_cast<double>(iterates), q);
}

std::vector<double> djr_letter_frequencies() {
    const auto c = djr_counts(30);
    const long double h = c.h.convert_to<long double>();
    return {static_cast<double>(c.alpha.convert_to<long double>() / h),
            static_cast<double>(c.beta.convert_to<long double>() / h)};
}

TAlphaProbe t_alpha_ergodicity_probe(double alpha, const FlowCylinder& c, std::int64_t iterates,
                                     std::uint64_t seed) {
    if (iterates < 10'000) throw InvalidInput("the probe needs at least 10^4 iterates");
    const TileLengths len = TileLengths::unit_and(alpha);
    validate_cylinder(c, len);
    const double shortest = std::min(1.0, alpha);
    const auto tiles = static_cast<std::int64_t>(static_cast<double>(iterates) * alpha / shortest) +
                       static_cast<std::int64_t>(c.u.size()) + 16;
    const auto sys = system_by_name("djr");
    TAlphaProbe probe;
    for (int side = 0; side < 2; ++side) {
        auto w = random_window(sys, 2 * tiles + 2, seed + static_cast<std::uint64_t>(side));
        const std::int64_t lo = w.lo;
        const auto pt = make_tiling_point(std::move(w), lo, 0.0L);
        (side == 0 ? probe.first : probe.second) = t_alpha_orbit_frequency(pt, len, c, alpha, iterates);
    }
    const auto letters = djr_letter_frequencies();
    double mu_u = 0.0;
    if (c.u.size() == 1) {
        mu_u = letters.at(c.u[0]);
    } else {
        const auto big = random_window(sys, 10'000'000, seed + 2);
        mu_u = birkhoff(big, c.u).value;
    }
    probe.predicted = mu_u * (c.hi - c.lo) / mean_tile_length(letters, len);
    probe.consistent = std::abs(probe.first.value - probe.second.value) <=
                       3.0 * (probe.first.stderr_proxy + probe.second.stderr_proxy);
    return probe;
}

}  // namespace subdyn
