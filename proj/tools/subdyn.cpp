// subdyn: command-line front end for the substitution dynamics library.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "subdyn/ergodic.hpp"
#include "subdyn/errors.hpp"
#include "subdyn/experiments.hpp"
#include "subdyn/hierarchy.hpp"
#include "subdyn/recognizer.hpp"
#include "subdyn/substitution.hpp"
#include "subdyn/tiling.hpp"

using json = nlohmann::json;
using namespace subdyn;

namespace {

constexpr const char* kVersion = "0.1.0";

enum Exit { OK = 0, INVALID = 2, VERIFY = 3, INCONCLUSIVE = 4 };

struct Config {
    std::string family = "theta";
    std::string alpha = "golden";
    int depth = 5;
    std::int64_t window = 100'000;
    std::uint64_t seed = kDefaultSeed;
    std::string emit = "json";
    std::vector<std::string> tolerance;
};

struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

struct Outcome {
    json result = json::object();
    Table table;
    int code = OK;
};

std::string num(double v) {
    std::ostringstream s;
    s << std::setprecision(17) << v;
    return s.str();
}

std::map<std::string, double> tolerance_map(const Config& c) {
    std::map<std::string, double> out;
    for (const auto& kv : c.tolerance) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0) throw InvalidInput("tolerance must be K=V: " + kv);
        char* end = nullptr;
        const std::string v = kv.substr(eq + 1);
        const double d = std::strtod(v.c_str(), &end);
        if (v.empty() || end != v.c_str() + v.size() || !(d >= 0.0)) throw InvalidInput("bad tolerance value: " + kv);
        out[kv.substr(0, eq)] = d;
    }
    return out;
}

SymbolicSystem resolve_system(const Config& c) {
    if (c.family.rfind("file:", 0) == 0) {
        const std::string path = c.family.substr(5);
        return system_from_substitution(load_substitution(path), "file:" + path);
    }
    return system_by_name(c.family);
}

LetterNames names_of(const SymbolicSystem& sys) { return sys.sub ? sys.sub->names() : LetterNames::digits(); }

Word read_word(const SymbolicSystem& sys, const std::string& text) {
    const std::size_t k = sys.sub ? sys.sub->alphabet_size() : 2;
    return names_of(sys).parse(text, k);
}

void validate_config(const Config& c) {
    if (c.window < 1000) throw InvalidInput("window must be at least 1000");
    if (c.depth < 1 || c.depth > 30) throw InvalidInput("depth must lie in 1..30");
    alpha_from_spec(c.alpha);
    if (c.emit != "json" && c.emit != "csv" && c.emit != "gnuplot") throw InvalidInput("emit must be json, csv or gnuplot");
}

json config_json(const Config& c) {
    return json{{"family", c.family}, {"alpha", c.alpha}, {"alpha_value", alpha_from_spec(c.alpha)},
                {"depth", c.depth},   {"window", c.window}, {"seed", c.seed},
                {"emit", c.emit},     {"tolerance", tolerance_map(c)}, {"ratio_irrational_asserted", true}};
}

json estimate_json(const MeasureEstimate& e) {
    return json{{"value", e.value}, {"window", e.window}, {"stderr_proxy", e.stderr_proxy}};
}

std::string big(const BigInt& v) { return v.str(); }

std::vector<std::int64_t> parse_int_list(const std::string& s) {
    std::vector<std::int64_t> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoll(item, &used));
            if (used != item.size()) throw InvalidInput("bad integer: " + item);
        } catch (const std::logic_error&) {
            throw InvalidInput("bad integer: " + item);
        }
    }
    return out;
}

std::vector<double> parse_real_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream in(s);
    std::string item;
    while (std::getline(in, item, ',')) {
        char* end = nullptr;
        const double d = std::strtod(item.c_str(), &end);
        if (item.empty() || end != item.c_str() + item.size()) throw InvalidInput("bad number: " + item);
        out.push_back(d);
    }
    return out;
}

json witness_json(const StructureWitness& w, const WitnessIntervals& iv, const LetterNames& names) {
    return json{{"n", w.n},
                {"m1", w.m1},
                {"m2", w.m2},
                {"case", witness_case_name(w.witness_case)},
                {"sub_case", w.sub_case},
                {"k_align", w.k_align},
                {"s_index", w.s_index},
                {"pattern_x_length", w.pattern_x.size()},
                {"pattern_y_length", w.pattern_y.size()},
                {"pattern_x_head", names.format(WordView(w.pattern_x).first(std::min<std::size_t>(w.pattern_x.size(), 16)))},
                {"pattern_y_head", names.format(WordView(w.pattern_y).first(std::min<std::size_t>(w.pattern_y.size(), 16)))},
                {"x_has_a_side", w.x_has_a_side},
                {"m", w.m},
                {"block_length", big(w.block_length)},
                {"L", {iv.L.lo, iv.L.hi}},
                {"M", {iv.M.lo, iv.M.hi}},
                {"t", iv.t_shift},
                {"gamma", iv.gamma},
                {"gamma_lower_bound", iv.gamma_lower_bound},
                {"position_bound_ok", w.position_bound_ok},
                {"difference_bound_ok", w.difference_bound_ok},
                {"intervals_ok", w.intervals_ok},
                {"bounds_ok", w.bounds_ok}};
}

// ---- subcommands ----

Outcome cmd_expand(const Config& c, const std::string& word, unsigned power) {
    const auto sys = resolve_system(c);
    if (!sys.sub) throw InvalidInput("djr is a block system; use blocks");
    const Word w = read_word(sys, word);
    const Word img = expand(*sys.sub, w, power, 10'000'000);
    Outcome o;
    const std::string s = sys.sub->names().format(img);
    o.result = json{{"word", word}, {"power", power}, {"result", s}, {"length", img.size()}};
    o.table = {{"word", "power", "result"}, {{word, std::to_string(power), s}}};
    return o;
}

Outcome cmd_blocks(const Config& c, bool show_words) {
    const auto sys = resolve_system(c);
    const auto h = build_hierarchy(sys.family, c.depth, sys.sub);
    const auto names = names_of(sys);
    Outcome o;
    json levels = json::array();
    o.table.header = {"n", "l_n", "len_A", "len_B", "zeros_B", "ones_B", "materialized"};
    for (const auto& lv : h.levels()) {
        json j{{"n", lv.n},           {"l_n", big(lv.length)}, {"length_a", big(lv.length_a)},
               {"length_b", big(lv.length_b)}, {"zeros_b", big(lv.zeros)}, {"ones_b", big(lv.ones)},
               {"materialized", lv.materialized}};
        if (show_words && lv.materialized) {
            if (lv.a) j["A"] = names.format(*lv.a);
            if (lv.b) j["B"] = names.format(*lv.b);
            if (lv.c) j["C"] = names.format(*lv.c);
        }
        levels.push_back(j);
        o.table.rows.push_back({std::to_string(lv.n), big(lv.length), big(lv.length_a), big(lv.length_b),
                                big(lv.zeros), big(lv.ones), lv.materialized ? "1" : "0"});
    }
    o.result = json{{"family", family_name(sys.family)}, {"levels", levels}, {"truncated", h.truncated()}};
    if (sys.family == Family::DJR) {
        const auto r = djr_ratio_limit(c.depth, 1.0, alpha_from_spec(c.alpha));
        o.result["ratio_monotone"] = r.monotone;
        o.result["ratio_bounded"] = r.bounded;
        o.result["tile_differences_shrinking"] = r.differences_shrinking;
        o.result["ratio_limit"] = static_cast<double>(djr_ratio_infinity());
    }
    return o;
}

Outcome cmd_parse(const Config& c, const std::string& word) {
    const auto sys = resolve_system(c);
    if (sys.family == Family::DJR) throw PreconditionError("djr has no desubstitution scheme");
    const auto scheme = parse_scheme(sys.family, sys.sub);
    const Word w = read_word(sys, word);
    const auto r = parse(scheme, w);
    const auto names = names_of(sys);
    auto items = [&](const std::vector<ParseItem>& v) {
        json a = json::array();
        for (const auto& it : v) a.push_back(json{{"v", names.format(it.v)}, {"C", names.format(it.c)}});
        return a;
    };
    Outcome o;
    o.result = json{{"word", word},      {"unique", r.unique},       {"count", r.count},
                    {"K1", names.format(r.k1)}, {"items", items(r.items)}, {"K2", names.format(r.k2)},
                    {"threshold", parse_threshold(scheme)}};
    json all = json::array();
    for (const auto& p : r.all_parses)
        all.push_back(json{{"K1", names.format(p.k1)}, {"items", items(p.items)}, {"K2", names.format(p.k2)}});
    o.result["all_parses"] = all;
    o.table = {{"K1", "blocks", "K2", "unique"},
               {{names.format(r.k1), std::to_string(r.items.size()), names.format(r.k2), r.unique ? "1" : "0"}}};
    return o;
}

Outcome cmd_structure(const Config& c, int level) {
    const auto sys = resolve_system(c);
    if (sys.family != Family::THETA && sys.family != Family::ETA)
        throw PreconditionError("structure witnesses exist for theta and eta");
    const auto x = random_window(sys, c.window, c.seed);
    const auto y = random_window(sys, c.window, c.seed + 1);
    const auto w = find_structure_witness(sys.family, x, y, level);
    const auto iv = witness_intervals(w, sys.family);
    Outcome o;
    o.result = witness_json(w, iv, names_of(sys));
    o.result["shift_consistent"] = witness_shift_consistent(w, x, y);
    o.table = {{"n", "m1", "m2", "case", "bounds_ok"},
               {{std::to_string(w.n), std::to_string(w.m1), std::to_string(w.m2),
                 witness_case_name(w.witness_case), w.bounds_ok ? "1" : "0"}}};
    return o;
}

FlowCylinder read_cylinder(const SymbolicSystem& sys, const TileLengths& len, const std::string& word,
                           const std::string& interval) {
    FlowCylinder cyl;
    cyl.u = read_word(sys, word);
    if (cyl.u.empty()) throw InvalidInput("empty cylinder word");
    if (interval.empty()) {
        cyl.lo = 0.0;
        cyl.hi = len.of(cyl.u[0]);
    } else {
        const auto parts = parse_real_list([&] {
            std::string s = interval;
            std::replace(s.begin(), s.end(), ':', ',');
            return s;
        }());
        if (parts.size() != 2) throw InvalidInput("interval must be lo:hi");
        cyl.lo = parts[0];
        cyl.hi = parts[1];
    }
    validate_cylinder(cyl, len);
    return cyl;
}

Outcome cmd_tiling_measure(const Config& c, const std::string& word, const std::string& interval) {
    const auto sys = resolve_system(c);
    const double alpha = alpha_from_spec(c.alpha);
    const auto len = TileLengths::unit_and(alpha);
    const auto cyl = read_cylinder(sys, len, word, interval);
    Outcome o;
    double nu = 0.0, mu = 0.0;
    if (sys.sub) {
        nu = cylinder_measure(*sys.sub, len, cyl);
        mu = word_frequency(*sys.sub, cyl.u);
    } else {
        const auto letters = djr_letter_frequencies();
        const auto w = random_window(sys, std::max<std::int64_t>(c.window, 1'000'000), c.seed);
        mu = cyl.u.size() == 1 ? letters[cyl.u[0]] : birkhoff(w, cyl.u).value;
        nu = mu * (cyl.hi - cyl.lo) / mean_tile_length(letters, len);
    }
    o.result = json{{"word", word}, {"interval", {cyl.lo, cyl.hi}}, {"mu_word", mu}, {"nu", nu},
                    {"J0", len.of(0)}, {"J1", len.of(1)}};
    o.table = {{"word", "lo", "hi", "nu"}, {{word, num(cyl.lo), num(cyl.hi), num(nu)}}};
    return o;
}

Outcome cmd_orbit(const Config& c, double t_max, double dt) {
    if (!(t_max > 0.0) || !(dt > 0.0)) throw InvalidInput("t-max and dt must be positive");
    const auto sys = resolve_system(c);
    const auto len = TileLengths::unit_and(alpha_from_spec(c.alpha));
    const double shortest = std::min(len.of(0), len.of(1));
    const auto need = static_cast<std::int64_t>(t_max / shortest) + 16;
    auto w = random_window(sys, std::max(c.window, 2 * need + 2), c.seed);
    const auto names = names_of(sys);
    const auto start = make_tiling_point(std::move(w), 0, 0.0L);
    Outcome o;
    o.table.header = {"t", "letter", "offset", "p", "q"};
    json samples = json::array();
    const auto steps = static_cast<std::int64_t>(std::floor(t_max / dt));
    for (std::int64_t k = 0; k <= steps; ++k) {
        const long double t = static_cast<long double>(k) * dt;
        const auto pt = flow(start, t, len);
        const std::string letter = names.format(Word{pt.letter()});
        samples.push_back(json{{"t", static_cast<double>(t)}, {"letter", letter},
                               {"offset", static_cast<double>(pt.offset)}, {"p", pt.p}, {"q", pt.q}});
        o.table.rows.push_back({num(static_cast<double>(t)), letter, num(static_cast<double>(pt.offset)),
                                std::to_string(pt.p), std::to_string(pt.q)});
    }
    o.result = json{{"samples", samples}};
    return o;
}

std::vector<Word> words_or_letters(const SymbolicSystem& sys, const std::vector<std::string>& given) {
    std::vector<Word> out;
    for (const auto& s : given) out.push_back(read_word(sys, s));
    if (out.empty()) {
        const std::size_t k = sys.sub ? sys.sub->alphabet_size() : 2;
        for (std::size_t a = 0; a < k; ++a) out.push_back(Word{static_cast<Letter>(a)});
    }
    return out;
}

Outcome cmd_freq(const Config& c, const std::vector<std::string>& words) {
    const auto sys = resolve_system(c);
    const auto w = random_window(sys, c.window, c.seed);
    const auto names = names_of(sys);
    const auto letters = sys.sub ? pf_frequencies(*sys.sub).frequency : djr_letter_frequencies();
    Outcome o;
    o.table.header = {"word", "value", "stderr_proxy", "exact"};
    json arr = json::array();
    for (const Word& u : words_or_letters(sys, words)) {
        const auto e = birkhoff(w, u);
        std::optional<double> exact;
        if (sys.sub) exact = word_frequency(*sys.sub, u);
        else if (u.size() == 1) exact = letters[u[0]];
        json j = estimate_json(e);
        j["word"] = names.format(u);
        j["exact"] = exact ? json(*exact) : json(nullptr);
        arr.push_back(j);
        o.table.rows.push_back({names.format(u), num(e.value), num(e.stderr_proxy), exact ? num(*exact) : ""});
    }
    o.result = json{{"estimates", arr}};
    return o;
}

Outcome cmd_correlate(const Config& c, const std::string& word, const std::string& shifts) {
    const auto sys = resolve_system(c);
    const Word u = read_word(sys, word);
    const auto ks = parse_int_list(shifts);
    std::int64_t kmax = 0;
    for (auto k : ks) kmax = std::max(kmax, k);
    const auto w = random_window(sys, c.window + kmax + static_cast<std::int64_t>(u.size()), c.seed);
    const auto vals = correlation_sequence(w, u, ks, c.window);
    const double mu = birkhoff(w, u, c.window).value;
    Outcome o;
    o.table.header = {"k", "value", "stderr_proxy"};
    json arr = json::array();
    for (std::size_t i = 0; i < ks.size(); ++i) {
        json j = estimate_json(vals[i]);
        j["k"] = ks[i];
        arr.push_back(j);
        o.table.rows.push_back({std::to_string(ks[i]), num(vals[i].value), num(vals[i].stderr_proxy)});
    }
    o.result = json{{"word", word}, {"mu", mu}, {"mu_squared", mu * mu}, {"correlations", arr}};
    return o;
}

Outcome cmd_spectrum(const Config& c, const std::string& word, int max_q, bool flow_mode,
                     const std::string& interval) {
    const auto sys = resolve_system(c);
    const double alpha = alpha_from_spec(c.alpha);
    Outcome o;
    SpectralScan scan;
    if (flow_mode) {
        const auto len = TileLengths::unit_and(alpha);
        const auto cyl = read_cylinder(sys, len, word, interval);
        const auto grid = max_q > 0 ? rational_grid(max_q) : default_lambda_grid(alpha);
        const auto horizon = static_cast<long double>(c.window);
        const auto tiles = static_cast<std::int64_t>(horizon / std::min(1.0, alpha)) + 64;
        auto w = random_window(sys, 2 * tiles + 2, c.seed);
        const std::int64_t lo = w.lo;
        scan = spectral_scan_flow(make_tiling_point(std::move(w), lo, 0.0L), len, cyl, grid, horizon);
    } else {
        const Word u = read_word(sys, word);
        const auto grid = max_q > 0 ? rational_grid(max_q) : default_lambda_grid();
        const auto w = random_window(sys, c.window + static_cast<std::int64_t>(u.size()), c.seed);
        if (c.window < 100'000) throw InvalidInput("spectral scans need a window of at least 10^5");
        scan = spectral_scan(w, u, grid, c.window);
    }
    double peak = 0.0, at = 0.0;
    for (std::size_t i = 0; i < scan.lambdas.size(); ++i)
        if (scan.lambdas[i] != 0.0 && scan.moduli[i] > peak) peak = scan.moduli[i], at = scan.lambdas[i];
    o.result = json{{"lambdas", scan.lambdas}, {"moduli", scan.moduli}, {"window", scan.window},
                    {"max_nonzero_modulus", peak}, {"argmax", at}, {"flow", flow_mode}};
    o.table.header = {"lambda", "modulus"};
    for (std::size_t i = 0; i < scan.lambdas.size(); ++i)
        o.table.rows.push_back({num(scan.lambdas[i]), num(scan.moduli[i])});
    return o;
}

Outcome cmd_rigidity(const Config& c, const std::string& word, const std::string& times, bool flow_mode,
                     const std::string& interval) {
    const auto sys = resolve_system(c);
    const double alpha = alpha_from_spec(c.alpha);
    std::vector<double> ts;
    if (!times.empty()) {
        ts = parse_real_list(times);
    } else if (sys.family == Family::DJR) {
        for (int n = 3; n <= 6; ++n) {
            const auto k = djr_counts(n);
            ts.push_back(flow_mode ? k.alpha.convert_to<double>() + k.beta.convert_to<double>() * alpha
                                   : k.h.convert_to<double>());
        }
    } else {
        throw InvalidInput("--times is required outside djr");
    }
    double tmax = 0.0;
    for (double t : ts) tmax = std::max(tmax, t);
    Outcome o;
    RigidityResult r;
    if (flow_mode) {
        const auto len = TileLengths::unit_and(alpha);
        const auto cyl = read_cylinder(sys, len, word, interval);
        const long double horizon = static_cast<long double>(c.window);
        const auto tiles = static_cast<std::int64_t>((horizon + tmax) / std::min(1.0, alpha)) + 64;
        auto w = random_window(sys, tiles + 2, c.seed);
        const std::int64_t lo = w.lo;
        std::vector<long double> lt(ts.begin(), ts.end());
        r = rigidity_test_flow(make_tiling_point(std::move(w), lo, 0.0L), len, cyl, lt, horizon);
    } else {
        const Word u = read_word(sys, word);
        std::vector<std::int64_t> it;
        for (double t : ts) {
            if (t != std::floor(t)) throw InvalidInput("shift times must be integers");
            it.push_back(static_cast<std::int64_t>(t));
        }
        const auto w = random_window(sys, c.window + static_cast<std::int64_t>(tmax) +
                                              static_cast<std::int64_t>(u.size()) + 2, c.seed);
        r = rigidity_test(w, u, it, c.window);
    }
    o.result = json{{"measure", estimate_json(r.measure)}, {"times", r.times}, {"ratios", r.ratios},
                    {"flow", flow_mode}};
    o.table.header = {"t", "ratio"};
    for (std::size_t i = 0; i < r.times.size(); ++i) o.table.rows.push_back({num(r.times[i]), num(r.ratios[i])});
    return o;
}

Outcome cmd_joining(const Config& c, int word_length, std::optional<std::int64_t> shift, int level) {
    const auto sys = resolve_system(c);
    if (!sys.sub) throw InvalidInput("joining needs a substitution family");
    if (word_length < 1 || word_length > 3) throw InvalidInput("word length must lie in 1..3");
    const auto words = admissible_words(*sys.sub, static_cast<std::size_t>(word_length));
    SequenceWindow x, y;
    const std::int64_t pad = 256;
    if (shift) {
        x = random_window(sys, c.window + 2 * pad + 2 * std::abs(*shift), c.seed);
        y = x;
        y.lo = x.lo - *shift;  // y_j = x_{j + k}
    } else {
        x = block_centred_window(sys, level, BlockKind::A, c.window + 2 * pad, c.seed);
        y = block_centred_window(sys, level, BlockKind::B, c.window + 2 * pad, c.seed + 1);
    }
    const auto je = joining_estimate(x, y, words, words, c.window, sys.sub, std::nullopt);
    Outcome o;
    json pairs = json::array();
    o.table.header = {"P", "Q", "frequency"};
    for (const auto& [k, v] : je.pair_frequencies) {
        pairs.push_back(json{{"P", k.first}, {"Q", k.second}, {"frequency", v}});
        o.table.rows.push_back({k.first, k.second, num(v)});
    }
    o.result = json{{"classification", joining_class_name(je.classification)},
                    {"k", je.k ? json(*je.k) : json(nullptr)},
                    {"max_deviation", je.max_deviation},
                    {"tolerance", je.tolerance},
                    {"max_marginal_error", je.max_marginal_error},
                    {"pair_frequencies", pairs}};
    return o;
}

Outcome cmd_djr_wm(const Config& c) {
    const double alpha = alpha_from_spec(c.alpha);
    const auto rep = djr_weak_mixing_experiment(alpha, std::min(c.depth, 5), c.seed);
    Outcome o;
    json levels = json::array();
    o.table.header = {"n", "nu_E", "nu_F", "spacer_dq", "pure_dq"};
    bool ok = true;
    for (const auto& lv : rep.levels) {
        levels.push_back(json{{"n", lv.n},
                              {"nu_E", estimate_json(lv.nu_e)},
                              {"nu_F", estimate_json(lv.nu_f)},
                              {"patch_time", static_cast<double>(lv.patch_time)},
                              {"occurrences_E", lv.occurrences_e},
                              {"occurrences_F", lv.occurrences_f},
                              {"spacer_displacement", {lv.spacer_dp, lv.spacer_dq}},
                              {"pure_displacement", {lv.pure_dp, lv.pure_dq}},
                              {"spacer_is_one_tile", lv.spacer_is_one_tile},
                              {"pure_shift_ok", lv.pure_shift_ok}});
        ok = ok && lv.spacer_is_one_tile && lv.pure_shift_ok;
        o.table.rows.push_back({std::to_string(lv.n), num(lv.nu_e.value), num(lv.nu_f.value),
                                std::to_string(lv.spacer_dq), std::to_string(lv.pure_dq)});
    }
    o.result = json{{"alpha", rep.alpha}, {"c", rep.c},         {"d", rep.d},
                    {"ratio_limit", rep.ratio_limit}, {"window", rep.window}, {"levels", levels}};
    if (!ok) o.code = VERIFY;
    return o;
}

Outcome cmd_verify_all(const Config& c) {
    VerifyConfig vc;
    vc.system = resolve_system(c);
    vc.depth = c.depth;
    vc.window = c.window;
    vc.alpha = alpha_from_spec(c.alpha);
    vc.seed = c.seed;
    vc.tolerances = tolerance_map(c);
    const auto checks = verify_all(vc);
    Outcome o;
    json arr = json::array();
    bool all = true;
    o.table.header = {"module", "check", "pass", "value", "threshold"};
    for (const auto& ch : checks) {
        arr.push_back(json{{"module", ch.module}, {"name", ch.name}, {"pass", ch.pass},
                           {"value", ch.value}, {"threshold", ch.threshold}, {"detail", ch.detail}});
        all = all && ch.pass;
        o.table.rows.push_back({ch.module, ch.name, ch.pass ? "1" : "0", num(ch.value), num(ch.threshold)});
    }
    o.result = json{{"checks", arr}, {"all_pass", all}};
    if (!all) o.code = VERIFY;
    return o;
}

// ---- output ----

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char ch : s) q += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    return q + "\"";
}

void emit(const std::string& command, const Config& c, const Outcome& o, double seconds) {
    if (c.emit == "csv") {
        for (std::size_t i = 0; i < o.table.header.size(); ++i)
            std::cout << (i ? "," : "") << csv_cell(o.table.header[i]);
        std::cout << "\n";
        for (const auto& row : o.table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) std::cout << (i ? "," : "") << csv_cell(row[i]);
            std::cout << "\n";
        }
        return;
    }
    json report{{"command", command}, {"config", config_json(c)}, {"result", o.result},
                {"exit_code", o.code},  {"version", kVersion},     {"wall_time_s", seconds}};
    if (c.emit == "gnuplot") {
        // Names come from a hash of the config, so reruns overwrite the same files.
        const std::string key = command + config_json(c).dump();
        std::uint64_t h = 1469598103934665603ULL;
        for (unsigned char ch : key) h = (h ^ ch) * 1099511628211ULL;
        std::ostringstream stem;
        stem << "subdyn_" << command << "_" << std::hex << std::setw(16) << std::setfill('0') << h;
        const std::string data = stem.str() + ".dat", script = stem.str() + ".gp";
        std::ofstream d(data), s(script);
        d << "#";
        for (const auto& col : o.table.header) d << " " << col;
        d << "\n";
        for (const auto& row : o.table.rows) {
            for (std::size_t i = 0; i < row.size(); ++i) d << (i ? " " : "") << (row[i].empty() ? "?" : row[i]);
            d << "\n";
        }
        s << "set title '" << command << " (" << c.family << ")'\n";
        if (o.table.header.size() >= 2)
            s << "set xlabel '" << o.table.header[0] << "'\nset ylabel '" << o.table.header[1] << "'\n";
        s << "plot '" << data << "' using 1:2 with linespoints notitle\n";
        report["files"] = {data, script};
    }
    std::cout << report.dump(2) << "\n";
}

void add_common(CLI::App* sub, Config& c) {
    sub->add_option("--family", c.family, "theta | eta | theta-tilde | eta-tilde | djr | file:<path>");
    sub->add_option("--alpha", c.alpha, "golden | sqrt2m1 | <decimal>");
    sub->add_option("--depth", c.depth, "hierarchy depth");
    sub->add_option("--window", c.window, "window length (symbols or time units)");
    sub->add_option("--seed", c.seed, "PRNG seed");
    sub->add_option("--emit", c.emit, "json | csv | gnuplot");
    sub->add_option("--tolerance", c.tolerance, "K=V tolerance override")->allow_extra_args(false);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"substitution subshifts, tiling flows and ergodic experiments"};
    app.require_subcommand(1);
    Config cfg;
    std::string word, interval, shifts, times;
    std::vector<std::string> words;
    unsigned power = 1;
    int level = 3, max_q = 0, word_length = 2;
    double t_max = 100.0, dt = 1.0;
    bool show_words = false, flow_mode = false;
    std::optional<std::int64_t> shift;

    std::function<Outcome()> action;
    auto sub = [&](const char* name, const char* help, std::function<Outcome()> f) {
        auto* s = app.add_subcommand(name, help);
        add_common(s, cfg);
        s->callback([&action, f] { action = f; });
        return s;
    };
    auto* s_expand = sub("expand", "zeta^n of a word", [&] { return cmd_expand(cfg, word, power); });
    s_expand->add_option("--word", word)->required();
    s_expand->add_option("--power", power);
    auto* s_blocks = sub("blocks", "block hierarchy", [&] { return cmd_blocks(cfg, show_words); });
    s_blocks->add_flag("--words", show_words, "include the block words");
    auto* s_parse = sub("parse", "desubstitution of a word", [&] { return cmd_parse(cfg, word); });
    s_parse->add_option("--word", word)->required();
    auto* s_structure = sub("structure", "structure witness for two seeded windows",
                            [&] { return cmd_structure(cfg, level); });
    s_structure->add_option("--level", level);
    auto* s_tm = sub("tiling-measure", "nu([u] x I)", [&] { return cmd_tiling_measure(cfg, word, interval); });
    s_tm->add_option("--word", word)->required();
    s_tm->add_option("--interval", interval, "lo:hi");
    auto* s_orbit = sub("orbit", "flow samples", [&] { return cmd_orbit(cfg, t_max, dt); });
    s_orbit->add_option("--t-max", t_max);
    s_orbit->add_option("--dt", dt);
    auto* s_freq = sub("freq", "Birkhoff frequencies", [&] { return cmd_freq(cfg, words); });
    s_freq->add_option("--word", words);
    auto* s_corr = sub("correlate", "mu([u] cap T^-k [u])", [&] { return cmd_correlate(cfg, word, shifts); });
    s_corr->add_option("--word", word)->required();
    s_corr->add_option("--shifts", shifts, "comma separated")->required();
    auto* s_spec = sub("spectrum", "Weyl sum scan",
                       [&] { return cmd_spectrum(cfg, word, max_q, flow_mode, interval); });
    s_spec->add_option("--word", word)->required();
    s_spec->add_option("--max-q", max_q, "rational grid p/q, q <= max-q (default grid if 0)");
    s_spec->add_flag("--flow", flow_mode);
    s_spec->add_option("--interval", interval, "lo:hi");
    auto* s_rig = sub("rigidity", "mu(A cap T_t A) / mu(A)",
                      [&] { return cmd_rigidity(cfg, word, times, flow_mode, interval); });
    s_rig->add_option("--word", word)->required();
    s_rig->add_option("--times", times, "comma separated");
    s_rig->add_flag("--flow", flow_mode);
    s_rig->add_option("--interval", interval, "lo:hi");
    auto* s_join = sub("joining", "empirical two-fold joining",
                       [&] { return cmd_joining(cfg, word_length, shift, level); });
    s_join->add_option("--word-length", word_length);
    s_join->add_option("--shift", shift, "construct y = T^k x");
    s_join->add_option("--level", level, "A_n / B_n centred windows");
    sub("djr-wm", "weak-mixing experiment for the rank-one flow", [&] { return cmd_djr_wm(cfg); });
    sub("verify-all", "every module's invariant checks", [&] { return cmd_verify_all(cfg); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return INVALID;
    }
    const std::string command = app.get_subcommands().front()->get_name();
    const auto t0 = std::chrono::steady_clock::now();
    try {
        validate_config(cfg);
        const Outcome o = action();
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        emit(command, cfg, o, secs);
        return o.code;
    } catch (const InvalidInput& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return INVALID;
    } catch (const PreconditionError& e) {
        std::cerr << "precondition: " << e.what() << "\n";
        return INVALID;
    } catch (const VerificationFailure& e) {
        std::cerr << "verification failure: " << e.what() << "\n";
        return VERIFY;
    } catch (const Inconclusive& e) {
        std::cerr << "inconclusive: " << e.what() << "\n";
        return INCONCLUSIVE;
    } catch (const std::length_error& e) {
        std::cerr << "invalid input: " << e.what() << "\n";
        return INVALID;
    }
}
