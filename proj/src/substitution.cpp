#include "subdyn/substitution.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "subdyn/errors.hpp"

namespace subdyn {

Substitution::Substitution(std::size_t alphabet_size, std::vector<Word> images, std::string name,
                           LetterNames names)
    : images_(std::move(images)), name_(std::move(name)), names_(std::move(names)) {
    if (alphabet_size == 0 || images_.size() != alphabet_size)
        throw InvalidInput("substitution needs exactly one image per letter");
    for (const auto& img : images_) {
        if (img.empty()) throw InvalidInput("substitution images must be nonempty");
        for (Letter c : img)
            if (c >= alphabet_size) throw InvalidInput("image uses a letter outside the alphabet");
    }
}

std::size_t Substitution::max_image_length() const {
    std::size_t m = 0;
    for (const auto& img : images_) m = std::max(m, img.size());
    return m;
}

Substitution theta() {
    return Substitution(2, {word_from_string("001"), word_from_string("11001")}, "theta");
}

Substitution eta() {
    return Substitution(2, {word_from_string("001"), word_from_string("11100")}, "eta");
}

Substitution theta_tilde() {
    auto ab = LetterNames::ab();
    return Substitution(2, {ab.parse("abab", 2), ab.parse("bbab", 2)}, "theta-tilde", ab);
}

Substitution eta_tilde() {
    auto ab = LetterNames::ab();
    return Substitution(2, {ab.parse("abab", 2), ab.parse("bbba", 2)}, "eta-tilde", ab);
}

Substitution common_tail(const Word& tail, std::string name) {
    Word a{0}, b{1};
    a.insert(a.end(), tail.begin(), tail.end());
    b.insert(b.end(), tail.begin(), tail.end());
    return Substitution(2, {a, b}, std::move(name), LetterNames::ab());
}

std::optional<Substitution> builtin_substitution(std::string_view name) {
    if (name == "theta") return theta();
    if (name == "eta") return eta();
    if (name == "theta-tilde") return theta_tilde();
    if (name == "eta-tilde") return eta_tilde();
    return std::nullopt;
}

Substitution parse_substitution(std::string_view text, std::string name) {
    std::vector<std::pair<std::string, std::string>> rules;
    bool alpha = false;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line.erase(std::remove_if(line.begin(), line.end(),
                                  [](unsigned char c) { return std::isspace(c); }),
                   line.end());
        if (line.empty()) continue;
        auto arrow = line.find("->");
        if (arrow == std::string::npos) throw InvalidInput("expected 'i -> w' in: " + line);
        std::string lhs = line.substr(0, arrow), rhs = line.substr(arrow + 2);
        if (lhs.size() != 1) throw InvalidInput("left side must be a single letter: " + lhs);
        for (char c : lhs + rhs)
            if (std::isalpha(static_cast<unsigned char>(c))) alpha = true;
        rules.emplace_back(lhs, rhs);
    }
    if (rules.empty()) throw InvalidInput("no substitution rules found");
    LetterNames names = alpha ? LetterNames::ab() : LetterNames::digits();
    const std::size_t n = rules.size();
    std::vector<Word> images(n);
    std::vector<bool> seen(n, false);
    for (const auto& [lhs, rhs] : rules) {
        Letter a = names.parse(lhs, n).front();
        if (seen[a]) throw InvalidInput("letter defined twice: " + lhs);
        seen[a] = true;
        images[a] = names.parse(rhs, n);
    }
    return Substitution(n, std::move(images), std::move(name), names);
}

Substitution load_substitution(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InvalidInput("cannot open substitution file: " + path);
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_substitution(buf.str(), path);
}

SubstitutionMatrix SubstitutionMatrix::identity(std::size_t n) {
    SubstitutionMatrix m(n);
    for (std::size_t i = 0; i < n; ++i) m.at(i, i) = 1;
    return m;
}

std::int64_t SubstitutionMatrix::column_sum(std::size_t j) const {
    std::int64_t s = 0;
    for (std::size_t i = 0; i < n_; ++i) s += at(i, j);
    return s;
}

bool SubstitutionMatrix::positive() const {
    return std::all_of(entries_.begin(), entries_.end(), [](auto v) { return v > 0; });
}

SubstitutionMatrix SubstitutionMatrix::operator*(const SubstitutionMatrix& rhs) const {
    SubstitutionMatrix out(n_);
    for (std::size_t i = 0; i < n_; ++i)
        for (std::size_t k = 0; k < n_; ++k)
            for (std::size_t j = 0; j < n_; ++j) out.at(i, j) += at(i, k) * rhs.at(k, j);
    return out;
}

SubstitutionMatrix substitution_matrix(const Substitution& sub) {
    SubstitutionMatrix m(sub.alphabet_size());
    for (std::size_t j = 0; j < sub.alphabet_size(); ++j)
        for (Letter c : sub.image(static_cast<Letter>(j))) m.at(c, j) += 1;
    return m;
}

SubstitutionMatrix matrix_power(const SubstitutionMatrix& m, unsigned exponent) {
    SubstitutionMatrix result = SubstitutionMatrix::identity(m.size());
    for (unsigned i = 0; i < exponent; ++i) result = result * m;
    return result;
}

Primitivity is_primitive(const Substitution& sub) {
    const std::size_t n = sub.alphabet_size();
    const std::size_t bound = std::max(n * n, (n - 1) * (n - 1) + 1);
    // Boolean powers keep the search free of overflow.
    auto m = substitution_matrix(sub);
    std::vector<char> base(n * n), power(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) base[i * n + j] = power[i * n + j] = m.at(i, j) > 0;
    for (std::size_t e = 1; e <= bound; ++e) {
        if (std::all_of(power.begin(), power.end(), [](char c) { return c != 0; }))
            return {true, static_cast<unsigned>(e)};
        std::vector<char> next(n * n, 0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < n; ++k)
                if (power[i * n + k])
                    for (std::size_t j = 0; j < n; ++j)
                        if (base[k * n + j]) next[i * n + j] = 1;
        power.swap(next);
    }
    return {false, 0};
}

FrequencyVector pf_closed_form_2x2(const SubstitutionMatrix& m) {
    if (m.size() != 2) throw PreconditionError("closed form needs a 2x2 matrix");
    const double a = static_cast<double>(m.at(0, 0)), b = static_cast<double>(m.at(0, 1));
    const double c = static_cast<double>(m.at(1, 0)), d = static_cast<double>(m.at(1, 1));
    const double tr = a + d, det = a * d - b * c;
    const double lambda = 0.5 * (tr + std::sqrt(tr * tr - 4.0 * det));
    // (M - lambda I) v = 0 gives v proportional to (b, lambda - a), or (lambda - d, c).
    double v0 = b, v1 = lambda - a;
    if (std::abs(v0) + std::abs(v1) == 0.0) {
        v0 = lambda - d;
        v1 = c;
    }
    const double s = v0 + v1;
    FrequencyVector out;
    out.frequency = {v0 / s, v1 / s};
    out.pf_eigenvalue = lambda;
    const double r0 = a * out.frequency[0] + b * out.frequency[1] - lambda * out.frequency[0];
    const double r1 = c * out.frequency[0] + d * out.frequency[1] - lambda * out.frequency[1];
    out.residual = std::max(std::abs(r0), std::abs(r1));
    return out;
}

FrequencyVector pf_frequencies(const Substitution& sub) {
    if (!is_primitive(sub).primitive)
        throw PreconditionError("pf_frequencies requires a primitive substitution");
    const auto m = substitution_matrix(sub);
    const std::size_t n = m.size();
    std::vector<long double> v(n, 1.0L / static_cast<long double>(n)), w(n);
    auto apply = [&](const std::vector<long double>& x, std::vector<long double>& y) {
        for (std::size_t i = 0; i < n; ++i) {
            long double acc = 0;
            for (std::size_t j = 0; j < n; ++j) acc += static_cast<long double>(m.at(i, j)) * x[j];
            y[i] = acc;
        }
    };
    long double lambda = 0, previous = -1;
    int it = 0;
    for (; it < 100000; ++it) {
        apply(v, w);
        long double num = 0, den = 0, sum = 0;
        for (std::size_t i = 0; i < n; ++i) {
            num += v[i] * w[i];
            den += v[i] * v[i];
            sum += w[i];
        }
        lambda = num / den;
        long double moved = 0;
        for (std::size_t i = 0; i < n; ++i) {
            moved = std::max(moved, std::abs(w[i] / sum - v[i]));
            v[i] = w[i] / sum;
        }
        // The quotient settles long before the vector does when |lambda_2 / lambda_1| is large.
        if (std::abs(lambda - previous) <= 1e-14L * lambda && moved <= 1e-17L) break;
        previous = lambda;
    }
    FrequencyVector out;
    out.iterations = it + 1;
    long double sum = 0;
    for (auto x : v) sum += x;
    out.frequency.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.frequency[i] = static_cast<double>(v[i] / sum);
    apply(v, w);
    long double rq_num = 0, rq_den = 0;
    for (std::size_t i = 0; i < n; ++i) {
        rq_num += v[i] * w[i];
        rq_den += v[i] * v[i];
    }
    out.pf_eigenvalue = static_cast<double>(rq_num / rq_den);
    double residual = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double mv = 0;
        for (std::size_t j = 0; j < n; ++j) mv += static_cast<double>(m.at(i, j)) * out.frequency[j];
        residual = std::max(residual, std::abs(mv - out.pf_eigenvalue * out.frequency[i]));
    }
    out.residual = residual;
    if (n == 2) {
        auto closed = pf_closed_form_2x2(m);
        for (std::size_t i = 0; i < 2; ++i)
            if (std::abs(closed.frequency[i] - out.frequency[i]) > 1e-12)
                throw VerificationFailure("power iteration disagrees with the 2x2 closed form");
    }
    return out;
}

double word_frequency(const Substitution& sub, WordView u) {
    if (u.empty()) return 1.0;
    const auto letters = pf_frequencies(sub);
    if (u.size() == 1) return u[0] < sub.alphabet_size() ? letters.frequency[u[0]] : 0.0;
    if (!is_admissible(sub, u)) return 0.0;
    const auto words = admissible_words(sub, u.size());
    std::map<Word, std::size_t> index;
    for (std::size_t i = 0; i < words.size(); ++i) index[words[i]] = i;
    // Column w of the induced matrix counts the |u|-words starting inside zeta(w_0) in zeta(w).
    const std::size_t n = words.size();
    std::vector<std::vector<std::pair<std::size_t, long double>>> columns(n);
    for (std::size_t j = 0; j < n; ++j) {
        const Word img = expand(sub, words[j], 1);
        std::map<std::size_t, long double> col;
        for (std::size_t s = 0; s < sub.image(words[j][0]).size(); ++s) {
            Word piece(img.begin() + static_cast<std::ptrdiff_t>(s),
                       img.begin() + static_cast<std::ptrdiff_t>(s + u.size()));
            col[index.at(piece)] += 1.0L;
        }
        columns[j].assign(col.begin(), col.end());
    }
    std::vector<long double> v(n, 1.0L / static_cast<long double>(n)), w(n);
    for (int it = 0; it < 100000; ++it) {
        std::fill(w.begin(), w.end(), 0.0L);
        for (std::size_t j = 0; j < n; ++j)
            for (auto [i, c] : columns[j]) w[i] += c * v[j];
        long double sum = 0, change = 0;
        for (auto x : w) sum += x;
        for (std::size_t i = 0; i < n; ++i) {
            w[i] /= sum;
            change = std::max(change, std::abs(w[i] - v[i]));
        }
        v.swap(w);
        if (change < 1e-18L) break;
    }
    return static_cast<double>(v[index.at(Word(u.begin(), u.end()))]);
}

std::vector<std::uint64_t> image_lengths(const Substitution& sub, unsigned n) {
    const std::size_t k = sub.alphabet_size();
    std::vector<std::uint64_t> len(k, 1);
    for (unsigned step = 0; step < n; ++step) {
        std::vector<std::uint64_t> next(k, 0);
        for (std::size_t a = 0; a < k; ++a)
            for (Letter c : sub.image(static_cast<Letter>(a))) next[a] += len[c];
        len.swap(next);
    }
    return len;
}

Word expand(const Substitution& sub, WordView w, unsigned n, std::size_t max_length) {
    for (Letter c : w)
        if (c >= sub.alphabet_size()) throw InvalidInput("symbol out of alphabet in expand");
    // Predict the length first so oversized requests fail before allocating.
    const auto lens = image_lengths(sub, n);
    unsigned __int128 total = 0;
    for (Letter c : w) total += lens[c];
    if (total > max_length) throw std::length_error("expanded word exceeds the length cap");
    Word current(w.begin(), w.end());
    for (unsigned step = 0; step < n; ++step) {
        Word next;
        std::size_t size = 0;
        for (Letter c : current) size += sub.image(c).size();
        next.reserve(size);
        for (Letter c : current) {
            const auto& img = sub.image(c);
            next.insert(next.end(), img.begin(), img.end());
        }
        current.swap(next);
    }
    return current;
}

bool is_admissible(const Substitution& sub, WordView w, unsigned search_depth) {
    if (search_depth < 1) throw PreconditionError("search_depth must be at least 1");
    if (w.empty()) return true;
    for (Letter c : w)
        if (c >= sub.alphabet_size()) return false;
    std::boyer_moore_horspool_searcher searcher(w.begin(), w.end());
    for (std::size_t a = 0; a < sub.alphabet_size(); ++a) {
        Word current{static_cast<Letter>(a)};
        for (unsigned m = 0; m <= search_depth; ++m) {
            if (current.size() >= w.size() &&
                std::search(current.begin(), current.end(), searcher) != current.end())
                return true;
            if (m < search_depth) current = expand(sub, current, 1);
        }
    }
    return false;
}

unsigned two_letter_closure_depth(const Substitution& sub) {
    // Breadth-first over two-letter words: ab at depth k means ab occurs in
    // zeta^k(c); the two-letter factors of zeta(ab) then occur at depth k + 1.
    std::map<std::pair<Letter, Letter>, unsigned> depth;
    std::vector<std::pair<Letter, Letter>> frontier;
    auto visit = [&](WordView w, unsigned d) {
        for (std::size_t i = 0; i + 1 < w.size(); ++i) {
            auto key = std::make_pair(w[i], w[i + 1]);
            if (depth.emplace(key, d).second) frontier.push_back(key);
        }
    };
    for (const auto& img : sub.images()) visit(img, 1);
    unsigned deepest = 1;
    while (!frontier.empty()) {
        auto batch = std::move(frontier);
        frontier.clear();
        for (auto [a, b] : batch) {
            const unsigned d = depth[{a, b}];
            deepest = std::max(deepest, d);
            visit(expand(sub, Word{a, b}, 1), d + 1);
        }
    }
    return deepest;
}

unsigned admissibility_depth(const Substitution& sub, std::size_t length) {
    unsigned m = 0;
    while (true) {
        auto lens = image_lengths(sub, m);
        if (*std::min_element(lens.begin(), lens.end()) >= 4 * std::max<std::size_t>(length, 1))
            break;
        ++m;
        if (m > 64) throw PreconditionError("substitution does not grow; erasing or non-primitive");
    }
    return m + two_letter_closure_depth(sub);
}

bool is_admissible(const Substitution& sub, WordView w) {
    return is_admissible(sub, w, std::max(1u, admissibility_depth(sub, w.size())));
}

std::vector<Word> admissible_words(const Substitution& sub, std::size_t length) {
    if (length == 0) return {Word{}};
    const unsigned depth = admissibility_depth(sub, length);
    std::set<Word> found;
    for (std::size_t a = 0; a < sub.alphabet_size(); ++a) {
        Word current{static_cast<Letter>(a)};
        for (unsigned m = 0; m <= depth; ++m) {
            for (std::size_t i = 0; i + length <= current.size(); ++i)
                found.emplace(current.begin() + static_cast<std::ptrdiff_t>(i),
                              current.begin() + static_cast<std::ptrdiff_t>(i + length));
            if (m < depth) current = expand(sub, current, 1);
        }
    }
    return {found.begin(), found.end()};
}

std::optional<Word> common_tail_of(const Substitution& sub) {
    if (sub.alphabet_size() != 2) return std::nullopt;
    const auto& ia = sub.image(0);
    const auto& ib = sub.image(1);
    if (ia.size() != ib.size() || ia.size() < 2) return std::nullopt;
    if (ia.front() != 0 || ib.front() != 1) return std::nullopt;
    if (!std::equal(ia.begin() + 1, ia.end(), ib.begin() + 1)) return std::nullopt;
    return Word(ia.begin() + 1, ia.end());
}

bool is_aperiodic_class_check(const Substitution& sub, std::size_t max_period) {
    auto tail = common_tail_of(sub);
    if (!tail) throw PreconditionError("substitution is not of the form s(a) = aA, s(b) = bA");
    if (!is_primitive(sub).primitive) throw PreconditionError("substitution must be primitive");
    // Constant length L: |s^n(a)| = L^n.
    const std::size_t L = sub.image(0).size();
    Word level_a{0}, level_b{1};  // s^n(a), s^n(b)
    std::size_t next_len = L;     // |s^{n+1}(a)|
    Word next_a = expand(sub, level_a, 1), next_b = expand(sub, level_b, 1);
    for (std::size_t k = 1; k <= max_period; ++k) {
        while (k >= next_len) {
            level_a = std::move(next_a);
            level_b = std::move(next_b);
            next_a = expand(sub, level_a, 1);
            next_b = expand(sub, level_b, 1);
            next_len *= L;
        }
        // Both s^{n+1}(a) = aA_{n+1} and s^{n+1}(b) = bA_{n+1} occur in any point;
        // a k-periodic point needs next_a[k] = a and next_b[k] = b.
        const bool shared_tail = next_a[k] == next_b[k];
        const bool period_survives = next_a[k] == 0 && next_b[k] == 1;
        if (!shared_tail || period_survives) return false;
    }
    return true;
}

bool is_aperiodic_class_check(const Word& tail, std::size_t max_period) {
    if (tail.empty()) throw PreconditionError("common tail must be nonempty");
    for (Letter c : tail)
        if (c > 1) throw PreconditionError("common tail must be over {a, b}");
    return is_aperiodic_class_check(common_tail(tail), max_period);
}

}  // namespace subdyn
