#include "subdyn/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <sstream>

#include "subdyn/errors.hpp"
#include "subdyn/recognizer.hpp"

namespace subdyn {

namespace {

double tol(const VerifyConfig& cfg, const std::string& key, double fallback) {
    auto it = cfg.tolerances.find(key);
    return it == cfg.tolerances.end() ? fallback : it->second;
}

struct Runner {
    std::vector<CheckResult> out;

    /// body fills value/detail and returns pass.
    void run(const std::string& module, const std::string& name, double threshold,
             const std::function<bool(CheckResult&)>& body) {
        CheckResult r;
        r.module = module;
        r.name = name;
        r.threshold = threshold;
        try {
            r.pass = body(r);
        } catch (const std::exception& e) {
            r.pass = false;
            r.detail = std::string("error: ") + e.what();
        }
        out.push_back(std::move(r));
    }
};

std::string show(double v) {
    std::ostringstream s;
    s.precision(6);
    s << v;
    return s.str();
}

void substitution_checks(Runner& run, const VerifyConfig& cfg) {
    const Substitution& sub = *cfg.system.sub;
    run.run("substitution-core", "primitive", 0.0, [&](CheckResult& r) {
        const auto p = is_primitive(sub);
        r.value = p.exponent;
        return p.primitive;
    });
    run.run("substitution-core", "pf_eigenvector_residual", 1e-12, [&](CheckResult& r) {
        const auto f = pf_frequencies(sub);
        r.value = f.residual;
        double sum = 0.0;
        for (double x : f.frequency) sum += x;
        r.detail = "frequencies sum to " + show(sum);
        return f.residual <= 1e-12 && std::abs(sum - 1.0) <= 1e-12;
    });
    run.run("substitution-core", "expansion_lengths_match_matrix", 0.0, [&](CheckResult& r) {
        for (unsigned n = 1; n <= static_cast<unsigned>(std::min(cfg.depth, 6)); ++n) {
            const auto lens = image_lengths(sub, n);
            for (Letter a = 0; a < sub.alphabet_size(); ++a) {
                if (expand(sub, Word{a}, n).size() != lens[a]) {
                    r.detail = "mismatch at n = " + std::to_string(n);
                    return false;
                }
            }
        }
        return true;
    });
    run.run("substitution-core", "word_frequency_additive", 1e-12, [&](CheckResult& r) {
        // mu([u]) = sum_a mu([ua]) for every admissible u of length 1..3.
        double worst = 0.0;
        for (std::size_t l = 1; l <= 3; ++l) {
            for (const Word& u : admissible_words(sub, l)) {
                double sum = 0.0;
                for (Letter a = 0; a < sub.alphabet_size(); ++a) sum += word_frequency(sub, concat({u, Word{a}}));
                worst = std::max(worst, std::abs(sum - word_frequency(sub, u)));
            }
        }
        r.value = worst;
        return worst <= 1e-12;
    });
}

void hierarchy_checks(Runner& run, const VerifyConfig& cfg) {
    const auto& sys = cfg.system;
    if (sys.family == Family::DJR) {
        run.run("hierarchy", "djr_recurrences_match_words", 0.0, [&](CheckResult& r) {
            const auto h = build_hierarchy(Family::DJR, std::min(cfg.depth, 5));
            for (const auto& lv : h.levels()) {
                const auto c = djr_counts(lv.n);
                const Word& b = *lv.b;
                const auto zeros = static_cast<std::int64_t>(std::count(b.begin(), b.end(), 0));
                if (BigInt(b.size()) != c.h || BigInt(zeros) != c.alpha ||
                    BigInt(static_cast<std::int64_t>(b.size()) - zeros) != c.beta) {
                    r.detail = "level " + std::to_string(lv.n);
                    return false;
                }
            }
            return true;
        });
        run.run("hierarchy", "djr_ratio_monotone_bounded", 0.0, [&](CheckResult& r) {
            const auto rep = djr_ratio_limit(std::max(cfg.depth, 3), 1.0, cfg.alpha);
            r.value = rep.limit;
            return rep.monotone && rep.bounded && rep.differences_shrinking;
        });
        return;
    }
    run.run("hierarchy", "levels_equal_expansions", 0.0, [&](CheckResult& r) {
        const auto h = build_hierarchy(sys.family, cfg.depth, sys.sub);
        const Substitution& sub = *h.substitution();
        const Word seed_a = sys.family == Family::GENERAL_S ? Word{0} : word_from_string("00");
        const Word seed_b = Word{1};
        for (const auto& lv : h.levels()) {
            if (!lv.materialized) break;
            const auto n = static_cast<unsigned>(lv.n);
            if (*lv.a != expand(sub, seed_a, n) || *lv.b != expand(sub, seed_b, n)) {
                r.detail = "level " + std::to_string(lv.n);
                return false;
            }
        }
        return true;
    });
    if (sys.family == Family::THETA || sys.family == Family::ETA) {
        run.run("hierarchy", "length_recurrence", 0.0, [&](CheckResult& r) {
            const auto h = build_hierarchy(sys.family, cfg.depth);
            for (int n = 1; n < cfg.depth; ++n) {
                const BigInt l = h.level(n).length, next = h.level(n + 1).length;
                const BigInt want = sys.family == Family::THETA ? BigInt(4 * l + 4) : BigInt(4 * l - 2);
                if (next != want) {
                    r.detail = "level " + std::to_string(n + 1);
                    return false;
                }
            }
            return true;
        });
    }
    if (sys.family == Family::THETA) {
        run.run("hierarchy", "theta_common_tail", 0.0, [&](CheckResult& r) {
            const auto h = build_hierarchy(Family::THETA, cfg.depth);
            for (const auto& lv : h.levels()) {
                if (!lv.materialized) break;
                if (*lv.a != concat({word_from_string("00"), *lv.c}) || *lv.b != concat({Word{1}, *lv.c})) {
                    r.detail = "level " + std::to_string(lv.n);
                    return false;
                }
            }
            return true;
        });
    }
}

void recognizer_checks(Runner& run, const VerifyConfig& cfg) {
    const auto& sys = cfg.system;
    if (sys.family != Family::THETA && sys.family != Family::ETA) return;
    const auto scheme = parse_scheme(sys.family);
    run.run("recognizer", "unique_parse_above_threshold", 0.0, [&](CheckResult& r) {
        const std::size_t m = parse_threshold(scheme);
        r.value = static_cast<double>(m);
        const auto w = random_window(sys, 20'000, cfg.seed);
        std::mt19937_64 rng(cfg.seed);
        std::uniform_int_distribution<std::size_t> at(0, w.size() - 3 * m);
        for (int i = 0; i < 200; ++i) {
            const std::size_t p = at(rng), l = m + static_cast<std::size_t>(i % (2 * m));
            const WordView piece(w.symbols.data() + p, l);
            if (!parse(scheme, piece).unique) {
                r.detail = "non-unique parse of " + word_to_string(piece);
                return false;
            }
        }
        return true;
    });
    run.run("recognizer", "parse_of_expansion_recovers_preimage", 0.0, [&](CheckResult& r) {
        for (std::size_t l = 1; l <= 6; ++l) {
            for (const Word& u : admissible_words(*sys.sub, l)) {
                const Word img = expand(*sys.sub, u, 1);
                const auto pre = desubstitute(scheme, img);
                if (std::find(pre.begin(), pre.end(), u) == pre.end()) {
                    r.detail = "lost " + word_to_string(u);
                    return false;
                }
            }
        }
        return true;
    });
    run.run("recognizer", "structure_witness_bounds", 0.0, [&](CheckResult& r) {
        int ok = 0;
        for (std::uint64_t s = 0; s < 4; ++s) {
            const auto x = random_window(sys, 60'000, cfg.seed + 2 * s);
            const auto y = random_window(sys, 60'000, cfg.seed + 2 * s + 1);
            const auto w = find_structure_witness(sys.family, x, y, 3);
            const auto iv = witness_intervals(w, sys.family);
            if (!w.bounds_ok || !iv.L.contains(iv.M) || !witness_shift_consistent(w, x, y)) {
                r.detail = "pair " + std::to_string(s);
                return false;
            }
            ++ok;
        }
        r.value = ok;
        return true;
    });
}

void tiling_checks(Runner& run, const VerifyConfig& cfg) {
    const auto len = TileLengths::unit_and(cfg.alpha);
    const double off_tol = tol(cfg, "offset", 1e-12);
    const std::int64_t size = std::max<std::int64_t>(cfg.window, 20'000);
    const auto w = random_window(cfg.system, size, cfg.seed);
    run.run("tiling", "group_law", off_tol, [&](CheckResult& r) {
        const auto pt = make_tiling_point(w, 0, 0.0L);
        std::mt19937_64 rng(cfg.seed);
        std::uniform_real_distribution<double> t(-1000.0, 1000.0);
        double worst = 0.0;
        for (int i = 0; i < 1000; ++i) {
            const long double s = t(rng), u = t(rng);
            const auto a = flow(flow(pt, s, len), u, len);
            const auto b = flow(pt, s + u, len);
            if (a.index != b.index || a.p != b.p || a.q != b.q) {
                r.detail = "tile mismatch";
                return false;
            }
            worst = std::max(worst, static_cast<double>(std::abs(a.offset - b.offset)));
        }
        r.value = worst;
        return worst <= off_tol;
    });
    run.run("tiling", "first_return_is_shift", 0.0, [&](CheckResult& r) {
        auto pt = make_tiling_point(w, 0, 0.0L);
        std::int64_t p = 0, q = 0;
        for (int i = 0; i < 1000; ++i) {
            const Letter a = pt.letter();
            pt = flow(pt, len.of(a), len);
            (a == 0 ? p : q) += 1;
            if (pt.index != i + 1 || pt.p != p || pt.q != q || pt.offset > off_tol) {
                r.detail = "step " + std::to_string(i);
                return false;
            }
        }
        return true;
    });
    if (!cfg.system.sub) return;
    const Substitution& sub = *cfg.system.sub;
    run.run("tiling", "letter_cylinders_total_mass", 1e-12, [&](CheckResult& r) {
        double total = 0.0;
        for (Letter a = 0; a < sub.alphabet_size(); ++a)
            total += cylinder_measure(sub, len, FlowCylinder{Word{a}, 0.0, len.of(a)});
        r.value = std::abs(total - 1.0);
        return r.value <= 1e-12;
    });
    run.run("tiling", "flow_frequency_matches_formula", 3.0, [&](CheckResult& r) {
        const auto pt = make_tiling_point(w, w.lo, 0.0L);
        const long double horizon = 0.9L * static_cast<long double>(w.size()) * std::min(1.0, cfg.alpha);
        double worst = 0.0;
        for (Letter a = 0; a < sub.alphabet_size(); ++a) {
            const FlowCylinder c{Word{a}, 0.0, len.of(a) / 2};
            const auto est = flow_birkhoff(pt, len, c, horizon);
            const double predicted = cylinder_measure(sub, len, c);
            const double se = std::max(est.stderr_proxy, 1.0 / static_cast<double>(horizon));
            worst = std::max(worst, std::abs(est.value - predicted) / se);
        }
        r.value = worst;
        r.detail = "deviation in stderr units";
        return worst <= 3.0;
    });
}

void ergodic_checks(Runner& run, const VerifyConfig& cfg) {
    const auto& sys = cfg.system;
    const std::int64_t size = cfg.window;
    const auto w1 = random_window(sys, size, cfg.seed);
    const auto w2 = random_window(sys, size, cfg.seed + 1);
    const std::vector<double> letters =
        sys.sub ? pf_frequencies(*sys.sub).frequency : djr_letter_frequencies();
    const double freq_tol = tol(cfg, "freq", std::max(2e-3, 30.0 / static_cast<double>(size)));
    run.run("ergodic-lab", "letter_frequency_matches_pf", freq_tol, [&](CheckResult& r) {
        double worst = 0.0;
        for (Letter a = 0; a < letters.size(); ++a)
            worst = std::max(worst, std::abs(birkhoff(w1, Word{a}).value - letters[a]));
        r.value = worst;
        return worst <= freq_tol;
    });
    run.run("ergodic-lab", "indicator_algebra", 0.0, [&](CheckResult& r) {
        // freq(u) = sum_a freq(ua) over the same positions, up to one position.
        const std::int64_t n = size - 8;
        double worst = 0.0;
        for (const char* s : {"0", "1", "00", "01", "10", "11"}) {
            const Word u = word_from_string(s);
            double sum = 0.0;
            for (Letter a = 0; a < 2; ++a) sum += birkhoff(w1, concat({u, Word{a}}), n).value;
            worst = std::max(worst, std::abs(sum - birkhoff(w1, u, n).value));
        }
        r.value = worst;
        r.threshold = 1.0 / static_cast<double>(n);
        return worst <= r.threshold;
    });
    const double seed_k = tol(cfg, "seed", 3.0);
    run.run("ergodic-lab", "seed_independence", seed_k, [&](CheckResult& r) {
        double worst = 0.0;
        for (const char* s : {"0", "1", "00", "01", "10", "11", "010", "101"}) {
            const Word u = word_from_string(s);
            const auto a = birkhoff(w1, u), b = birkhoff(w2, u);
            const double spread = a.stderr_proxy + b.stderr_proxy + 2.0 / static_cast<double>(size);
            worst = std::max(worst, std::abs(a.value - b.value) / spread);
        }
        r.value = worst;
        r.detail = "difference in combined stderr units";
        return worst <= seed_k;
    });
    run.run("ergodic-lab", "spectral_zero_is_birkhoff", 0.0, [&](CheckResult& r) {
        const Word u{0};
        const std::int64_t n = size - 1;
        const auto scan = spectral_scan(w1, u, {0.0, 0.5}, n);
        const double b = birkhoff(w1, u, n).value;
        r.value = std::abs(scan.moduli[0] - b);
        return scan.moduli[0] == b;
    });
    run.run("ergodic-lab", "joining_marginals", 1e-3, [&](CheckResult& r) {
        std::vector<Word> words;
        for (const char* s : {"00", "01", "10", "11"}) words.push_back(word_from_string(s));
        const auto je = joining_estimate(w1, w2, words, words, size - 4, std::nullopt);
        r.value = je.max_marginal_error;
        r.detail = joining_class_name(je.classification);
        return je.max_marginal_error <= 1e-3;
    });
    if (sys.family == Family::DJR) {
        run.run("ergodic-lab", "djr_return_word_displacements", 0.0, [&](CheckResult& r) {
            const auto rep = djr_weak_mixing_experiment(cfg.alpha, 3, cfg.seed, 1'000'000);
            r.value = rep.d;
            for (const auto& lv : rep.levels)
                if (!lv.spacer_is_one_tile || !lv.pure_shift_ok) return false;
            return true;
        });
    }
}

}  // namespace

std::vector<CheckResult> verify_all(const VerifyConfig& cfg) {
    if (cfg.window < 1000) throw InvalidInput("window must be at least 1000");
    if (cfg.depth < 1 || cfg.depth > 30) throw InvalidInput("depth must lie in 1..30");
    if (!(cfg.alpha > 0.0)) throw InvalidInput("alpha must be positive");
    Runner run;
    if (cfg.system.sub) substitution_checks(run, cfg);
    hierarchy_checks(run, cfg);
    recognizer_checks(run, cfg);
    tiling_checks(run, cfg);
    ergodic_checks(run, cfg);
    return std::move(run.out);
}

}  // namespace subdyn
