#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "subdyn/word.hpp"

namespace subdyn {

/// A non-erasing substitution on the alphabet {0, ..., alphabet_size - 1}.
///
/// Letters are small integers internally; `names()` carries the characters
/// used at the text boundary (digits for theta/eta, 'a'/'b' for the doubled
/// recodings).
class Substitution {
public:
    /// Throws InvalidInput if an image is empty or uses a letter >= alphabet_size.
    Substitution(std::size_t alphabet_size, std::vector<Word> images, std::string name,
                 LetterNames names = LetterNames::digits());

    std::size_t alphabet_size() const { return images_.size(); }
    const std::vector<Word>& images() const { return images_; }
    const Word& image(Letter a) const { return images_.at(a); }
    const std::string& name() const { return name_; }
    const LetterNames& names() const { return names_; }

    /// Length of the longest image.
    std::size_t max_image_length() const;

private:
    std::vector<Word> images_;
    std::string name_;
    LetterNames names_;
};

/// theta: 0 -> 001, 1 -> 11001
Substitution theta();
/// eta: 0 -> 001, 1 -> 11100
Substitution eta();
/// a -> abab, b -> bbab (theta with 00 written as a and 1 as b)
Substitution theta_tilde();
/// a -> abab, b -> bbba
Substitution eta_tilde();
/// s(a) = aA, s(b) = bA for a common tail A over {a, b}.
Substitution common_tail(const Word& tail, std::string name = "s");

/// Built-in lookup by name; empty for unknown names (including "djr",
/// which is a block system rather than a substitution).
std::optional<Substitution> builtin_substitution(std::string_view name);

/// Reads the `i -> w` line format. Letters are digits, or lower-case letters
/// when any image uses them. Blank lines and `#` comments are skipped.
Substitution parse_substitution(std::string_view text, std::string name = "file");
Substitution load_substitution(const std::string& path);

/// Entry (i, j) counts letter i in the image of letter j.
class SubstitutionMatrix {
public:
    explicit SubstitutionMatrix(std::size_t n) : n_(n), entries_(n * n, 0) {}
    static SubstitutionMatrix identity(std::size_t n);

    std::size_t size() const { return n_; }
    std::int64_t at(std::size_t i, std::size_t j) const { return entries_[i * n_ + j]; }
    std::int64_t& at(std::size_t i, std::size_t j) { return entries_[i * n_ + j]; }
    std::int64_t column_sum(std::size_t j) const;
    bool positive() const;

    SubstitutionMatrix operator*(const SubstitutionMatrix& rhs) const;
    bool operator==(const SubstitutionMatrix&) const = default;

private:
    std::size_t n_;
    std::vector<std::int64_t> entries_;
};

SubstitutionMatrix substitution_matrix(const Substitution& sub);
SubstitutionMatrix matrix_power(const SubstitutionMatrix& m, unsigned exponent);

/// Normalized right Perron-Frobenius eigenvector.
struct FrequencyVector {
    std::vector<double> frequency;
    double pf_eigenvalue = 0.0;
    double residual = 0.0;  // max-norm of M v - lambda v
    int iterations = 0;
};

/// Power iteration with Rayleigh-quotient stopping at 1e-14. For 2x2
/// matrices the result is cross-checked against the closed form and a
/// VerificationFailure is raised on disagreement beyond 1e-12.
/// Throws PreconditionError for non-primitive substitutions.
FrequencyVector pf_frequencies(const Substitution& sub);

/// Exact frequency mu([u]) from the Perron-Frobenius vector of the substitution
/// induced on admissible words of length |u|. Zero for inadmissible u.
/// Throws PreconditionError for non-primitive substitutions.
double word_frequency(const Substitution& sub, WordView u);

/// Closed-form dominant eigenpair of a 2x2 non-negative matrix.
FrequencyVector pf_closed_form_2x2(const SubstitutionMatrix& m);

struct Primitivity {
    bool primitive = false;
    unsigned exponent = 0;  // least m with M^m > 0, when primitive
};

/// Searches powers up to max(n^2, (n-1)^2 + 1).
Primitivity is_primitive(const Substitution& sub);

/// zeta^n(w). Throws InvalidInput for out-of-alphabet symbols and
/// std::length_error if the result would exceed `max_length`.
Word expand(const Substitution& sub, WordView w, unsigned n,
            std::size_t max_length = std::size_t{1} << 31);

/// |zeta^n(a)| for every letter a, computed from the matrix.
std::vector<std::uint64_t> image_lengths(const Substitution& sub, unsigned n);

/// True iff w occurs in zeta^m(a) for some letter a and 0 <= m <= search_depth.
/// Requires search_depth >= 1 (PreconditionError otherwise).
bool is_admissible(const Substitution& sub, WordView w, unsigned search_depth);

/// Depth from which the set of admissible words of a given length is
/// complete: the first m with min_a |zeta^m(a)| >= 4 * length, plus the depth
/// at which every admissible two-letter word has appeared.
unsigned admissibility_depth(const Substitution& sub, std::size_t length);

/// Admissibility decided at `admissibility_depth(sub, |w|)`.
bool is_admissible(const Substitution& sub, WordView w);

/// Every admissible word of the given length, in lexicographic order.
std::vector<Word> admissible_words(const Substitution& sub, std::size_t length);

/// Least k such that every admissible two-letter word occurs in some zeta^j(c), j <= k.
unsigned two_letter_closure_depth(const Substitution& sub);

/// Constructive aperiodicity check for s(a) = aA, s(b) = bA.
///
/// For every candidate period 1 <= k <= max_period it finds n with
/// |s^n(a)| <= k < |s^{n+1}(a)| and confirms that s^{n+1}(a) and s^{n+1}(b)
/// carry the same letter at position k, so a k-periodic point would need
/// that letter to equal both a and b. Returns true if no period survives.
/// Throws PreconditionError if the substitution does not have that shape.
bool is_aperiodic_class_check(const Substitution& sub, std::size_t max_period);
bool is_aperiodic_class_check(const Word& tail, std::size_t max_period);

/// Returns the common tail A if sub has the shape s(a) = aA, s(b) = bA with
/// nonempty A; empty otherwise.
std::optional<Word> common_tail_of(const Substitution& sub);

}  // namespace subdyn
