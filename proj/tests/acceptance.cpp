// Acceptance run: one PASS/FAIL line per criterion. `--only N` runs a single one.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include "subdyn/ergodic.hpp"
#include "subdyn/errors.hpp"
#include "subdyn/hierarchy.hpp"
#include "subdyn/recognizer.hpp"
#include "subdyn/substitution.hpp"
#include "subdyn/tiling.hpp"

using namespace subdyn;

namespace {

// Pinned tolerances and limits.
constexpr double kRuntime1 = 1.0;
constexpr double kRuntime2 = 60.0;
constexpr double kRuntime3 = 300.0;
constexpr double kRuntime4 = 120.0;
constexpr double kRuntime5 = 30.0;
constexpr double kRuntime6 = 120.0;
constexpr double kRuntime7 = 300.0;
constexpr double kRuntime8 = 600.0;
constexpr double kRuntime9 = 300.0;
constexpr double kRuntime10 = 120.0;

constexpr int kPairsPerLevel = 100;
constexpr double kSigmas = 3.0;
constexpr double kMassTol = 1e-3;
constexpr double kLetterEmpiricalTol = 2e-3;
constexpr double kLetterExactTol = 1e-12;
constexpr double kBlockMeasureFloor = 0.9;
constexpr double kDjrShiftRigid = 0.9;
constexpr double kDjrFlowRigid = 0.85;
constexpr double kThetaRigidMargin = 0.1;
constexpr double kScanMax = 0.05;
constexpr double kRotationPeak = 0.2;
constexpr double kNuFactor = 0.45;
constexpr double kProductMax = 0.02;
constexpr double kMarginalTol = 1e-3;
constexpr double kCorrelationMargin = 0.05;
constexpr int kGenericShifts = 64;
constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
    bool pass = true;
    std::ostringstream note;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (!pass) note << "; ";
            else note.str("");
            pass = false;
            note << what;
        }
    }
};

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

Word w(const char* s) { return word_from_string(s); }

// ---- 1 ----

void hierarchy_exactness(Outcome& o) {
    for (Family f : {Family::THETA, Family::ETA}) {
        const Substitution& sub = f == Family::THETA ? theta() : eta();
        const auto h = build_hierarchy(f, 5);
        for (int n = 1; n <= 5; ++n) {
            const auto& lv = h.level(n);
            const auto tag = family_name(f) + " level " + std::to_string(n);
            o.require(*lv.a == expand(sub, w("00"), static_cast<unsigned>(n)), tag + ": A_n differs from expansion");
            o.require(*lv.b == expand(sub, w("1"), static_cast<unsigned>(n)), tag + ": B_n differs from expansion");
            if (f == Family::THETA) {
                o.require(*lv.a == concat({w("00"), *lv.c}), tag + ": A_n != 00 C_n");
                o.require(*lv.b == concat({w("1"), *lv.c}), tag + ": B_n != 1 C_n");
            }
            if (n < 5) {
                const BigInt l = h.level(n).length, next = h.level(n + 1).length;
                o.require(next == (f == Family::THETA ? BigInt(4 * l + 4) : BigInt(4 * l - 2)),
                          tag + ": length recurrence");
                const BigInt measured(h.level(n + 1).a->size() - (f == Family::THETA ? 2 : 0));
                o.require(measured == next, tag + ": length of the next block word");
            }
        }
    }
    o.note << "theta and eta levels 1-5 exact";
}

// ---- 2 ----

void parse_uniqueness(Outcome& o) {
    std::ostringstream det;
    for (Family f : {Family::THETA, Family::ETA}) {
        const auto scheme = parse_scheme(f);
        const std::size_t m = parse_threshold(scheme);
        std::size_t shorter_ambiguous = 0, checked = 0;
        for (std::size_t l = 1; l < m; ++l)
            for (const auto& u : admissible_words(scheme.sub, l))
                if (all_parses(scheme, u).size() >= 2) ++shorter_ambiguous;
        // A decomposition of a word induces one of each factor, so uniqueness at
        // length m carries upward; lengths m..2m are enumerated as well.
        for (std::size_t l = m; l <= 2 * m; ++l) {
            for (const auto& u : admissible_words(scheme.sub, l)) {
                ++checked;
                const auto n = all_parses(scheme, u).size();
                if (n != 1) o.require(false, family_name(f) + " word " + word_to_string(u) + " has " +
                                                 std::to_string(n) + " parses");
            }
        }
        o.require(shorter_ambiguous > 0, family_name(f) + ": no ambiguous word below threshold");
        std::size_t roundtrip = 0;
        for (std::size_t l = 1; l <= 14; ++l) {
            for (const auto& u : admissible_words(scheme.sub, l)) {
                const auto pre = desubstitute(scheme, expand(scheme.sub, u, 1));
                ++roundtrip;
                if (std::find(pre.begin(), pre.end(), u) == pre.end())
                    o.require(false, family_name(f) + ": lost preimage " + word_to_string(u));
            }
        }
        det << family_name(f) << " m=" << m << " unique " << checked << " words, " << shorter_ambiguous
            << " shorter ambiguous, " << roundtrip << " roundtrips; ";
    }
    if (o.pass) o.note << det.str();
}

// ---- 3 ----

void structure_soundness(Outcome& o) {
    std::int64_t total = 0, aligned = 0, gamma_low = 0;
    double gamma_min_ratio = INFINITY;  // gamma / (1 / (4(m+4))), theta
    for (Family f : {Family::THETA, Family::ETA}) {
        const auto sys = system_by_name(family_name(f));
        const double m = static_cast<double>(parse_threshold(f));
        for (int n = 3; n <= 7; ++n) {
            const BigInt next = f == Family::THETA ? theta_length(n + 1) : eta_length(n + 1);
            const std::int64_t size = 16 * next.convert_to<std::int64_t>() + 20'000;
            int found = 0;
            for (std::uint64_t i = 0; found < kPairsPerLevel && i < 4 * kPairsPerLevel; ++i) {
                const std::uint64_t s = kSeed + 10'000 * static_cast<std::uint64_t>(n) + 2 * i;
                const auto tag = family_name(f) + " level " + std::to_string(n) + " seed " + std::to_string(s);
                // The witness sits within m + 3 blocks of the origin; a window that holds
                // fewer is retried at 4 times the size, same seeds.
                for (std::int64_t grow = 1; grow <= 4; grow *= 4) {
                    const auto x = random_window(sys, size * grow, s), y = random_window(sys, size * grow, s + 1);
                    try {
                        const auto wit = find_structure_witness(f, x, y, n);
                        const auto iv = witness_intervals(wit, f);
                        std::string why;
                        if (!wit.bounds_ok) why += " bounds";
                        if (!occurs_at(x.symbols, static_cast<std::size_t>(wit.m1 - x.lo), wit.pattern_x) ||
                            !occurs_at(y.symbols, static_cast<std::size_t>(wit.m2 - y.lo), wit.pattern_y))
                            why += " patterns";
                        if (!iv.L.contains(iv.M)) why += " M-in-L";
                        if (!iv.L.contains({iv.M.lo + iv.t_shift, iv.M.hi + iv.t_shift})) why += " tM-in-L";
                        if (f == Family::THETA) {
                            const double l = wit.block_length.convert_to<double>();
                            const double literal = 1.0 / (4.0 * (m + 4.0));
                            const double finite = (l - 6.0) / (4.0 * (m + 4.0) * (l + 2.0));
                            gamma_min_ratio = std::min(gamma_min_ratio, iv.gamma / literal);
                            if (iv.gamma < finite) why += " gamma-finite-level";
                            if (iv.gamma < literal) ++gamma_low;
                        }
                        if (!why.empty()) o.require(false, tag + ":" + why);
                        ++total;
                        ++found;
                        break;
                    } catch (const PreconditionError&) {
                        ++aligned;  // same orbit inside the window: not part of the sample
                        break;
                    } catch (const Inconclusive& e) {
                        if (grow == 4) o.require(false, tag + ": " + e.what());
                    } catch (const std::exception& e) {
                        o.require(false, tag + ": " + e.what());
                        break;
                    }
                }
            }
            if (found < kPairsPerLevel)
                o.require(false, family_name(f) + " level " + std::to_string(n) + ": only " + std::to_string(found) +
                                     " witnesses");
        }
    }
    o.require(gamma_low == 0, std::to_string(gamma_low) + " theta witnesses have gamma below 1/(4(m+4)) (min " +
                                  fmt(gamma_min_ratio) + " of it)");
    std::ostringstream det;
    det << total << " witnesses, " << aligned << " aligned pairs skipped, theta gamma min " << fmt(gamma_min_ratio)
        << " x 1/(4(m+4))";
    if (o.pass) o.note << det.str();
    else o.note << " | " << det.str();
}

// ---- 4 ----

void measure_formula(Outcome& o) {
    const auto len = TileLengths::unit_and(kGoldenConjugate);
    const long double horizon = 1e6L;
    const std::int64_t tiles = static_cast<std::int64_t>(horizon / kGoldenConjugate) + 1000;
    const auto sys = system_by_name("theta");
    auto base = random_window(sys, 2 * tiles + 2, kSeed);
    const std::int64_t lo = 0;
    const auto pt = make_tiling_point(std::move(base), lo, 0.0L);

    std::vector<FlowCylinder> cyl;
    for (std::size_t l = 1; l <= 3 && cyl.size() < 20; ++l) {
        for (const auto& u : admissible_words(theta(), l)) {
            const double j = len.of(u[0]);
            cyl.push_back({u, 0.0, j});
            if (cyl.size() < 20) cyl.push_back({u, 0.25 * j, 0.75 * j});
            if (cyl.size() == 20) break;
        }
    }
    o.require(cyl.size() == 20, "not enough cylinders");
    double worst = 0.0;
    for (const auto& c : cyl) {
        const auto est = flow_birkhoff(pt, len, c, horizon);
        const double exact = cylinder_measure(theta(), len, c);
        const double z = est.stderr_proxy > 0 ? std::abs(est.value - exact) / est.stderr_proxy
                                              : (est.value == exact ? 0.0 : INFINITY);
        worst = std::max(worst, z);
        if (z > kSigmas)
            o.require(false, word_to_string(c.u) + " [" + fmt(c.lo) + "," + fmt(c.hi) + "): " + fmt(est.value) +
                                 " vs " + fmt(exact) + " (" + fmt(z) + " stderr)");
    }
    double mass = 0.0;
    for (Letter a = 0; a < 2; ++a) mass += flow_birkhoff(pt, len, {Word{a}, 0.0, len.of(a)}, horizon).value;
    o.require(std::abs(mass - 1.0) <= kMassTol, "total mass " + fmt(mass));
    if (o.pass) o.note << "20 cylinders, worst " << fmt(worst) << " stderr, mass " << fmt(mass);
}

// ---- 5 ----

void pf_frequencies_check(Outcome& o) {
    std::ostringstream det;
    for (const char* name : {"theta", "eta"}) {
        const auto sys = system_by_name(name);
        const auto pf = pf_frequencies(*sys.sub);
        for (Letter a = 0; a < 2; ++a)
            o.require(std::abs(pf.frequency[a] - 0.5) <= kLetterExactTol,
                      std::string(name) + " eigenvector entry " + fmt(pf.frequency[a]));
        const auto win = random_window(sys, 1'000'010, kSeed);
        for (Letter a = 0; a < 2; ++a) {
            const double e = birkhoff(win, Word{a}, 1'000'000).value;
            o.require(std::abs(e - 0.5) <= kLetterEmpiricalTol, std::string(name) + " empirical " + fmt(e));
            det << name << "[" << int(a) << "]=" << fmt(e) << " ";
        }
    }
    if (o.pass) o.note << det.str();
}

// ---- 6 ----

// Feeds B_7 = B_6^64 1 B_6^64 through a KMP automaton for each pattern.
std::vector<std::uint64_t> count_in_b7(const Word& b6, const std::vector<Word>& patterns) {
    std::vector<std::uint64_t> out;
    for (const Word& p : patterns) {
        std::vector<std::size_t> fail(p.size() + 1, 0);
        for (std::size_t i = 1, k = 0; i < p.size(); ++i) {
            while (k && p[i] != p[k]) k = fail[k];
            if (p[i] == p[k]) ++k;
            fail[i + 1] = k;
        }
        std::size_t state = 0;
        std::uint64_t hits = 0;
        auto feed = [&](Letter c) {
            while (state && (state == p.size() || p[state] != c)) state = fail[state];
            if (p[state] == c) ++state;
            if (state == p.size()) ++hits;
        };
        for (int half = 0; half < 2; ++half) {
            for (int r = 0; r < 64; ++r)
                for (Letter c : b6) feed(c);
            if (half == 0) feed(1);
        }
        out.push_back(hits);
    }
    return out;
}

void djr_arithmetic(Outcome& o) {
    const auto h = build_hierarchy(Family::DJR, 5);
    for (int n = 1; n <= 4; ++n) {
        const Word& b = *h.level(n).b;
        const auto c = djr_counts(n), d = djr_counts(n + 1);
        const auto zeros = static_cast<std::size_t>(std::count(b.begin(), b.end(), 0));
        o.require(BigInt(b.size()) == c.h && BigInt(zeros) == c.alpha && BigInt(b.size() - zeros) == c.beta,
                  "counts at level " + std::to_string(n));
        const Word run = repeat(b, std::size_t{1} << n);
        o.require(*h.level(n + 1).b == concat({run, w("1"), run}), "B_" + std::to_string(n + 1) + " shape");
        const BigInt p = BigInt(1) << n;
        o.require(d.h == 2 * p * c.h + 1 && d.alpha == 2 * p * c.alpha && d.beta == 2 * p * c.beta + 1,
                  "recurrences at level " + std::to_string(n));
    }

    // B_8 has about 1.1e11 symbols: the scan runs over B_7 and checks the exact
    // junction count there, which then gives the B_8 values.
    const auto h6 = build_hierarchy(Family::DJR, 6);
    std::vector<Word> blocks;
    for (int n = 1; n <= 5; ++n) blocks.push_back(*h6.level(n).b);
    const auto counts = count_in_b7(*h6.level(6).b, blocks);
    for (int n = 1; n <= 5; ++n)
        o.require(BigInt(counts[n - 1]) == djr_occurrences(n, 7), "scan count of B_" + std::to_string(n) + " in B_7");
    const BigInt h8 = djr_counts(8).h;
    std::vector<double> v;
    for (int n = 1; n <= 6; ++n) {
        const BigInt num = djr_counts(n).h * djr_occurrences(n, 8);
        v.push_back(boost::multiprecision::cpp_dec_float_50(num).convert_to<double>() /
                    boost::multiprecision::cpp_dec_float_50(h8).convert_to<double>());
    }
    // Gap 8 - n grows as n falls.
    for (int n = 1; n <= 6; ++n) {
        o.require(v[n - 1] >= kBlockMeasureFloor, "h_" + std::to_string(n) + " freq = " + fmt(v[n - 1]));
        if (n < 6) o.require(v[n - 1] > v[n], "not increasing in the gap at n = " + std::to_string(n));
    }

    const int depth = 20;
    for (int n = 1; n < depth; ++n) {
        const auto a = djr_counts(n), b = djr_counts(n + 1);
        o.require(b.beta * a.alpha > a.beta * b.alpha, "beta/alpha not increasing at " + std::to_string(n));
        o.require(b.beta <= b.alpha, "beta/alpha above 1 at " + std::to_string(n + 1));
    }
    // t_n / h_n = 1 - (1 - |J_1|) beta_n / h_n, so the differences shrink exactly when
    // those of beta_n / h_n do; compared as cross-multiplied integers.
    auto delta = [](int n) {  // numerator and denominator of |beta_{n+1}/h_{n+1} - beta_n/h_n|
        const auto a = djr_counts(n), b = djr_counts(n + 1);
        BigInt num = b.beta * a.h - a.beta * b.h;
        if (num < 0) num = -num;
        return std::pair<BigInt, BigInt>{num, a.h * b.h};
    };
    for (int n = 1; n + 1 < depth; ++n) {
        const auto [p0, q0] = delta(n);
        const auto [p1, q1] = delta(n + 1);
        o.require(p1 * q0 < p0 * q1, "t_n/h_n differences grow at " + std::to_string(n + 1));
    }
    const auto rep = djr_ratio_limit(8, 1.0, kGoldenConjugate);
    o.require(rep.monotone && rep.bounded && rep.differences_shrinking, "ratio report flags");
    if (o.pass)
        o.note << "h_n freq(B_n in B_8) = " << fmt(v[5]) << " (n=6) .. " << fmt(v[0]) << " (n=1), beta/alpha -> "
               << fmt(rep.limit);
}

// ---- 7 ----

void rigidity_dichotomy(Outcome& o) {
    const std::int64_t n_avg = 1'000'000;
    std::vector<std::int64_t> h_times;
    std::vector<long double> t_times;
    for (int n = 3; n <= 6; ++n) {
        const auto k = djr_counts(n);
        h_times.push_back(k.h.convert_to<std::int64_t>());
        t_times.push_back(k.alpha.convert_to<long double>() + k.beta.convert_to<long double>() * kGoldenConjugate);
    }
    const Word b2 = *build_hierarchy(Family::DJR, 2).level(2).b;
    const auto djr = system_by_name("djr");
    const auto win = random_window(djr, n_avg + h_times.back() + 64, kSeed);
    const auto shift = rigidity_test(win, b2, h_times, n_avg);
    o.require(shift.ratios.back() >= kDjrShiftRigid, "DJR shift ratio at h_6 = " + fmt(shift.ratios.back()));

    const auto len = TileLengths::unit_and(kGoldenConjugate);
    const long double horizon = 1e6L;
    const auto tiles = static_cast<std::int64_t>((horizon + t_times.back()) / kGoldenConjugate) + 64;
    auto fw = random_window(djr, tiles + 2, kSeed + 1);
    const std::int64_t lo = fw.lo;
    const auto flow_r =
        rigidity_test_flow(make_tiling_point(std::move(fw), lo, 0.0L), len, {b2, 0.0, len.of(b2[0])}, t_times, horizon);
    o.require(flow_r.ratios.back() >= kDjrFlowRigid, "DJR flow ratio at t_6 = " + fmt(flow_r.ratios.back()));

    // theta with A = [C_2] at the same times.
    const Word c2 = *build_hierarchy(Family::THETA, 2).level(2).c;
    const auto tw = random_window(system_by_name("theta"), n_avg + h_times.back() + 64, kSeed + 2);
    const auto th = rigidity_test(tw, c2, h_times, n_avg);
    const double mu = th.measure.value;
    for (std::size_t i = 0; i < th.ratios.size(); ++i)
        o.require(th.ratios[i] < mu + kThetaRigidMargin, "theta ratio at t = " + std::to_string(h_times[i]) + " is " +
                                                             fmt(th.ratios[i]) + " >= mu(A) + 0.1 = " +
                                                             fmt(mu + kThetaRigidMargin));
    std::ostringstream det;
    det << "DJR shift";
    for (double r : shift.ratios) det << " " << fmt(r);
    det << "; DJR flow";
    for (double r : flow_r.ratios) det << " " << fmt(r);
    det << "; theta (mu " << fmt(mu) << ")";
    for (double r : th.ratios) det << " " << fmt(r);
    if (o.pass) o.note << det.str();
    else o.note << " | " << det.str();
}

// ---- 8 ----

double scan_max(const std::string& name, std::int64_t n) {
    const auto win = random_window(system_by_name(name), n + 8, kSeed);
    auto grid = rational_grid(8);
    grid.erase(grid.begin());  // lambda = 0
    const auto s = spectral_scan(win, w("0"), grid, n);
    return *std::max_element(s.moduli.begin(), s.moduli.end());
}

void weak_mixing(Outcome& o) {
    std::ostringstream det;
    for (const char* name : {"theta", "eta"}) {
        const double a = scan_max(name, 1'000'000), b = scan_max(name, 4'000'000);
        o.require(a < kScanMax, std::string(name) + " max modulus " + fmt(a));
        o.require(b < a, std::string(name) + " max did not fall: " + fmt(a) + " -> " + fmt(b));
        det << name << " " << fmt(a) << " -> " << fmt(b) << "; ";
    }
    const auto rot = rotation_window(kGoldenConjugate, 0.5, 0.1, 1'000'000);
    const double peak = spectral_scan(rot, w("1"), {kGoldenConjugate}, 1'000'000).moduli[0];
    o.require(peak > kRotationPeak, "rotation peak " + fmt(peak));
    det << "rotation " << fmt(peak) << "; ";
    const auto rep = djr_weak_mixing_experiment(kGoldenConjugate, 5, kSeed);
    for (const auto& lv : rep.levels) {
        const auto tag = "n=" + std::to_string(lv.n);
        o.require(lv.nu_e.value >= kNuFactor * rep.d, tag + " nu(E) " + fmt(lv.nu_e.value));
        o.require(lv.nu_f.value >= kNuFactor * rep.d, tag + " nu(F) " + fmt(lv.nu_f.value));
        o.require(lv.spacer_dp == 0 && lv.spacer_dq == 1, tag + " spacer displacement");
        det << tag << " nu(E)=" << fmt(lv.nu_e.value) << " nu(F)=" << fmt(lv.nu_f.value) << " ";
    }
    o.require(rep.levels.size() == 3, "levels 3..5 not all reported");
    if (o.pass) o.note << det.str();
    else o.note << " | " << det.str();
}

// ---- 9 ----

void joining_classification(Outcome& o) {
    const auto sys = system_by_name("theta");
    const auto words = admissible_words(theta(), 2);
    const std::int64_t n = 1'000'000;
    for (std::int64_t k : {-50, -23, -7, -1, 0, 1, 3, 12, 31, 50}) {
        const auto x = random_window(sys, 200'000, kSeed + static_cast<std::uint64_t>(k + 100));
        SequenceWindow y = x;
        y.lo = x.lo - k;
        const auto j = joining_estimate(x, y, words, words, 100'000, theta());
        o.require(j.classification == JoiningClass::OFF_DIAGONAL && j.k && *j.k == k,
                  "shift " + std::to_string(k) + " classified " + joining_class_name(j.classification));
    }
    std::ostringstream det;
    det << "shifts -50..50 off-diagonal; product pairs:";
    for (std::uint64_t s = 0; s < 4; ++s) {
        const auto x = random_window(sys, n + 256, kSeed + 10 * s);
        const auto y = random_window(sys, n + 256, kSeed + 10 * s + 5);
        const auto j = joining_estimate(x, y, words, words, n, theta(), kProductMax);
        const auto tag = "pair " + std::to_string(s);
        o.require(j.pair_frequencies.size() == 16, tag + " has " + std::to_string(j.pair_frequencies.size()) + " cells");
        o.require(j.classification == JoiningClass::PRODUCT_CONSISTENT,
                  tag + " " + joining_class_name(j.classification));
        o.require(j.max_deviation < kProductMax, tag + " max_deviation " + fmt(j.max_deviation));
        o.require(j.max_marginal_error <= kMarginalTol, tag + " marginal error " + fmt(j.max_marginal_error));
        det << " " << fmt(j.max_deviation);
    }
    if (o.pass) o.note << det.str();
    else o.note << " | " << det.str();
}

// ---- 10 ----

void non_strong_mixing(Outcome& o) {
    const Word c2 = *build_hierarchy(Family::THETA, 2).level(2).c;
    const auto h = build_hierarchy(Family::THETA, 7);
    const std::int64_t n = 1'000'000;
    const auto win = random_window(system_by_name("theta"), n + 600'000, kSeed);
    const double mu = birkhoff(win, c2, n).value;
    const double mu2 = mu * mu;
    std::vector<std::int64_t> ks;
    for (int lvl = 3; lvl <= 7; ++lvl) ks.push_back(static_cast<std::int64_t>(h.level(lvl).a->size()));
    const auto at_blocks = correlation_sequence(win, c2, ks, n);
    std::ostringstream det;
    det << "mu^2 = " << fmt(mu2) << ", block lags";
    for (std::size_t i = 0; i < ks.size(); ++i) {
        o.require(at_blocks[i].value > mu2 + kCorrelationMargin * mu,
                  "k = " + std::to_string(ks[i]) + ": " + fmt(at_blocks[i].value));
        det << " " << fmt(at_blocks[i].value);
    }
    std::mt19937_64 rng(kSeed);
    std::uniform_int_distribution<std::int64_t> pick(1000, 500'000);
    std::vector<std::int64_t> generic;
    for (int i = 0; i < kGenericShifts; ++i) generic.push_back(pick(rng));
    const auto g = correlation_sequence(win, c2, generic, n);
    double mean = 0.0, sq = 0.0;
    for (const auto& e : g) mean += e.value;
    mean /= kGenericShifts;
    for (const auto& e : g) sq += (e.value - mean) * (e.value - mean);
    const double se = std::sqrt(sq / (kGenericShifts - 1) / kGenericShifts);
    o.require(std::abs(mean - mu2) <= kSigmas * se,
              "generic mean " + fmt(mean) + " vs mu^2 " + fmt(mu2) + " (se " + fmt(se) + ")");
    det << "; generic mean " << fmt(mean) << " +- " << fmt(se);
    if (o.pass) o.note << det.str();
    else o.note << " | " << det.str();
}

struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<void(Outcome&)> run;
};

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::string(argv[i]) == "--only") only = std::atoi(argv[i + 1]);

    const std::vector<Criterion> all{
        {1, "hierarchy exactness", kRuntime1, hierarchy_exactness},
        {2, "parse uniqueness", kRuntime2, parse_uniqueness},
        {3, "structure witnesses", kRuntime3, structure_soundness},
        {4, "invariant measure formula", kRuntime4, measure_formula},
        {5, "letter frequencies", kRuntime5, pf_frequencies_check},
        {6, "rank-one arithmetic", kRuntime6, djr_arithmetic},
        {7, "rigidity dichotomy", kRuntime7, rigidity_dichotomy},
        {8, "weak-mixing scans", kRuntime8, weak_mixing},
        {9, "joining classification", kRuntime9, joining_classification},
        {10, "non-strong-mixing signature", kRuntime10, non_strong_mixing},
    };
    bool all_pass = true;
    for (const auto& c : all) {
        if (only && c.id != only) continue;
        Outcome o;
        const auto t0 = std::chrono::steady_clock::now();
        try {
            c.run(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        o.require(secs < c.limit_s, "runtime " + fmt(secs) + " s over " + fmt(c.limit_s) + " s");
        std::printf("%s criterion %d (%s): %s [%.2f s]\n", o.pass ? "PASS" : "FAIL", c.id, c.name,
                    o.note.str().c_str(), secs);
        all_pass = all_pass && o.pass;
    }
    return all_pass ? 0 : 1;
}
