#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "subdyn/ergodic.hpp"
#include "subdyn/errors.hpp"

using namespace subdyn;

namespace {

Word w(const char* s) { return word_from_string(s); }

SequenceWindow periodic(const char* period, std::int64_t reps) {
    SequenceWindow win;
    win.symbols = repeat(w(period), static_cast<std::size_t>(reps));
    return win;
}

}  // namespace

TEST(Systems, ByName) {
    EXPECT_EQ(system_by_name("theta").family, Family::THETA);
    EXPECT_EQ(system_by_name("djr").family, Family::DJR);
    EXPECT_FALSE(system_by_name("djr").sub.has_value());
    EXPECT_EQ(system_by_name("theta-tilde").family, Family::GENERAL_S);
    EXPECT_THROW(system_by_name("nope"), InvalidInput);
}

TEST(Windows, DeterministicInSeed) {
    const auto sys = system_by_name("eta");
    const auto a = random_window(sys, 5000, 17), b = random_window(sys, 5000, 17);
    EXPECT_EQ(a.symbols, b.symbols);
    EXPECT_EQ(a.lo, -2500);
    EXPECT_NE(a.symbols, random_window(sys, 5000, 18).symbols);
    EXPECT_TRUE(is_admissible(eta(), WordView(a.symbols).subspan(0, 30)));
}

TEST(Windows, BlockCentred) {
    const auto sys = system_by_name("theta");
    const auto h = build_hierarchy(Family::THETA, 4);
    const auto x = block_centred_window(sys, 4, BlockKind::B, 2000, 3);
    const Word& b = *h.level(4).b;
    const std::int64_t start = -static_cast<std::int64_t>(b.size()) / 2;
    bool found = false;
    for (std::int64_t s = start - 2; s <= start + 2; ++s)
        found = found || occurs_at(x.symbols, static_cast<std::size_t>(s - x.lo), b);
    EXPECT_TRUE(found);
}

TEST(Birkhoff, PeriodicExact) {
    const auto win = periodic("0011", 1000);
    EXPECT_DOUBLE_EQ(birkhoff(win, w("0")).value, 0.5);
    EXPECT_DOUBLE_EQ(birkhoff(win, w("01"), 2000).value, 0.25);
    EXPECT_DOUBLE_EQ(birkhoff(win, w("11"), 2000).stderr_proxy, 0.0);
}

TEST(Birkhoff, ShortWindowInconclusive) { EXPECT_THROW(birkhoff(periodic("01", 100), w("0")), Inconclusive); }

TEST(Birkhoff, ThetaLettersNearHalf) {
    const auto win = random_window(system_by_name("theta"), 400'000, 42);
    const auto e = birkhoff(win, w("1"));
    EXPECT_NEAR(e.value, 0.5, 0.01);
}

TEST(Birkhoff, WordsMatchExactFrequency) {
    const auto win = random_window(system_by_name("eta"), 1'000'000, 42);
    for (const char* u : {"00", "111", "10010"}) {
        const auto e = birkhoff(win, w(u));
        EXPECT_NEAR(e.value, word_frequency(eta(), w(u)), std::max(3.0 * e.stderr_proxy, 5e-3)) << u;
    }
}

TEST(Correlation, ZeroShiftIsMeasure) {
    const auto win = random_window(system_by_name("theta"), 100'000, 1);
    const auto c = correlation_sequence(win, w("10"), {0, 1, 2}, 50'000);
    EXPECT_DOUBLE_EQ(c[0].value, birkhoff(win, w("10"), 50'000).value);
    EXPECT_DOUBLE_EQ(c[1].value, 0.0);  // 10 cannot overlap itself at shift 1
}

TEST(Correlation, PeriodicReturns) {
    const auto c = correlation_sequence(periodic("001", 2000), w("1"), {3, 4}, 3000);
    EXPECT_NEAR(c[0].value, 1.0 / 3.0, 1e-12);
    EXPECT_DOUBLE_EQ(c[1].value, 0.0);
}

TEST(Correlation, NegativeShiftRejected) {
    EXPECT_THROW(correlation_sequence(periodic("01", 1000), w("0"), {-1}, 1000), InvalidInput);
}

TEST(Spectral, ZeroFrequencyIsBirkhoff) {
    const auto win = random_window(system_by_name("theta"), 100'000, 2);
    const auto s = spectral_scan(win, w("0"), {0.0}, 100'000);
    EXPECT_DOUBLE_EQ(s.moduli[0], birkhoff(win, w("0"), 100'000).value);
}

TEST(Spectral, GridIsOrderedAndUnique) {
    const auto g = rational_grid(6);
    EXPECT_EQ(g.front(), 0.0);
    for (std::size_t i = 1; i < g.size(); ++i) EXPECT_LT(g[i - 1], g[i]);
    // 1 + sum_{q=2..6} phi(q) = 1 + 1 + 2 + 2 + 4 + 2
    EXPECT_EQ(g.size(), 12u);
    const auto d = default_lambda_grid(kGoldenConjugate);
    EXPECT_NE(std::find(d.begin(), d.end(), 1.0 / kGoldenConjugate), d.end());
}

TEST(Spectral, RotationEigenvalue) {
    // Coding of a rotation by alpha: at lambda = alpha the modulus tends to sin(pi beta) / pi.
    const double alpha = kGoldenConjugate;
    const auto win = rotation_window(alpha, 0.5, 0.1, 200'000);
    const auto s = spectral_scan(win, w("1"), {alpha, 0.25}, 200'000);
    EXPECT_NEAR(s.moduli[0], 1.0 / std::numbers::pi, 1e-3);
    EXPECT_LT(s.moduli[1], 1e-3);
}

TEST(Spectral, PeriodicPeak) {
    const auto s = spectral_scan(periodic("0001", 5000), w("1"), {0.25, 0.5, 0.3}, 20'000);
    EXPECT_NEAR(s.moduli[0], 0.25, 1e-12);
    EXPECT_NEAR(s.moduli[1], 0.25, 1e-12);
    EXPECT_LT(s.moduli[2], 1e-3);
}

TEST(Spectral, FlowZeroIsTimeFraction) {
    const auto len = TileLengths::unit_and(kGoldenConjugate);
    const auto pt = make_tiling_point(random_window(system_by_name("theta"), 100'000, 3));
    const FlowCylinder c{w("1"), 0.0, 0.3};
    const auto s = spectral_scan_flow(pt, len, c, {0.0}, 20'000.0L);
    EXPECT_NEAR(s.moduli[0], flow_birkhoff(pt, len, c, 20'000.0L).value, 1e-12);
}

TEST(Rigidity, TimeZeroIsOne) {
    const auto win = random_window(system_by_name("djr"), 200'000, 4);
    const auto r = rigidity_test(win, w("010"), {0}, 100'000);
    EXPECT_DOUBLE_EQ(r.ratios[0], 1.0);
}

TEST(Rigidity, PeriodicReturnTime) {
    const auto r = rigidity_test(periodic("00101", 1000), w("01"), {5, 4}, 4000);
    EXPECT_DOUBLE_EQ(r.ratios[0], 1.0);
    EXPECT_DOUBLE_EQ(r.ratios[1], 0.0);
}

TEST(Rigidity, FlowTimeZeroIsOne) {
    const auto len = TileLengths::unit_and(kGoldenConjugate);
    const auto pt = make_tiling_point(random_window(system_by_name("djr"), 100'000, 5));
    const auto r = rigidity_test_flow(pt, len, {w("0"), 0.0, 0.5}, {0.0L}, 10'000.0L);
    EXPECT_NEAR(r.ratios[0], 1.0, 1e-12);
}

TEST(Rigidity, DjrReturnsAtHeights) {
    const auto win = random_window(system_by_name("djr"), 4'000'000, 42);
    const Word b2 = w("0100101010010");
    const auto r = rigidity_test(win, b2, {105, 1681, 53793}, 3'000'000);
    for (double x : r.ratios) EXPECT_GT(x, 0.9);
}

TEST(Djr, WeakMixingDisplacements) {
    const auto rep = djr_weak_mixing_experiment(kGoldenConjugate, 4, 42);
    EXPECT_DOUBLE_EQ(rep.d, 1.0);
    ASSERT_EQ(rep.levels.size(), 2u);
    for (const auto& lv : rep.levels) {
        EXPECT_TRUE(lv.spacer_is_one_tile);
        EXPECT_TRUE(lv.pure_shift_ok);
        EXPECT_EQ(lv.spacer_dp, 0);
        EXPECT_EQ(lv.spacer_dq, 1);
        EXPECT_GT(lv.nu_e.value, 0.2);
        EXPECT_GT(lv.nu_f.value, 0.2);
    }
}

TEST(Djr, WeakMixingDepthLimits) {
    EXPECT_THROW(djr_weak_mixing_experiment(kGoldenConjugate, 2), Inconclusive);
    EXPECT_THROW(djr_weak_mixing_experiment(kGoldenConjugate, 6), InvalidInput);
}

TEST(Djr, LetterFrequencies) {
    const auto f = djr_letter_frequencies();
    EXPECT_NEAR(f[0] + f[1], 1.0, 1e-15);
    const auto win = random_window(system_by_name("djr"), 1'000'000, 42);
    EXPECT_NEAR(birkhoff(win, w("0")).value, f[0], 0.01);
}

TEST(Joining, ShiftedCopyIsOffDiagonal) {
    const auto sys = system_by_name("theta");
    const auto x = random_window(sys, 200'000, 42);
    SequenceWindow y = x;
    y.lo = x.lo - 3;
    const auto words = admissible_words(theta(), 2);
    const auto j = joining_estimate(x, y, words, words, 100'000, theta());
    EXPECT_EQ(j.classification, JoiningClass::OFF_DIAGONAL);
    ASSERT_TRUE(j.k.has_value());
    EXPECT_EQ(*j.k, 3);
    EXPECT_LE(j.max_marginal_error, 1e-3);
}

TEST(Joining, MismatchedFamiliesRejected) {
    const auto x = random_window(system_by_name("theta"), 20'000, 1);
    const auto y = random_window(system_by_name("eta"), 20'000, 1);
    const auto words = admissible_words(theta(), 1);
    EXPECT_THROW(joining_estimate(x, y, words, words, 10'000, std::nullopt), InvalidInput);
}

TEST(Joining, Tolerance) {
    EXPECT_DOUBLE_EQ(product_tolerance(100), 1.0);
    EXPECT_DOUBLE_EQ(product_tolerance(100'000'000), 0.02);
}

TEST(TAlpha, ProbeAgrees) {
    const auto p = t_alpha_ergodicity_probe(kGoldenConjugate, {w("0"), 0.0, 0.5}, 20'000, 42);
    EXPECT_NEAR(p.first.value, p.second.value, 0.05);
    EXPECT_GT(p.predicted, 0.0);
    EXPECT_THROW(t_alpha_ergodicity_probe(kGoldenConjugate, {w("0"), 0.0, 0.5}, 100), InvalidInput);
}

TEST(Consistency, FlowAgreesWithShiftForUnitTiles) {
    // With |J_0| = |J_1| = 1 the flow visits [u] x [0, 1) exactly when the shift visits [u].
    const TileLengths unit{{1.0, 1.0}, false};
    auto win = random_window(system_by_name("eta"), 100'000, 8);
    win.lo = 0;  // both averages start at index 0
    const auto pt = make_tiling_point(win);
    const auto f = flow_birkhoff(pt, unit, {w("110"), 0.0, 1.0}, 40'000.0L);
    EXPECT_NEAR(f.value, birkhoff(win, w("110"), 40'000).value, 1e-12);
}
