#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace subdyn {

using Letter = std::uint8_t;
using Word = std::vector<Letter>;
using WordView = std::span<const Letter>;

/// Maps between internal letters 0..n-1 and the characters used to print them.
/// The default alphabet prints digits; the doubled recodings print 'a', 'b'.
class LetterNames {
public:
    LetterNames() = default;
    explicit LetterNames(std::string chars) : chars_(std::move(chars)) {}

    static LetterNames digits() { return LetterNames("0123456789"); }
    static LetterNames ab() { return LetterNames("abcdefghij"); }

    /// Throws InvalidInput for characters outside the alphabet of the given size.
    Word parse(std::string_view text, std::size_t alphabet_size) const;
    std::string format(WordView w) const;
    char name(Letter a) const { return chars_.at(a); }
    const std::string& chars() const { return chars_; }

private:
    std::string chars_ = "0123456789";
};

/// Parses "0110"-style text with digit letters.
Word word_from_string(std::string_view text);
std::string word_to_string(WordView w);

/// Number of (possibly overlapping) occurrences of `pattern` in `text`.
std::size_t count_occurrences(WordView text, WordView pattern);

inline bool occurs_at(WordView text, std::size_t pos, WordView pattern) {
    if (pos + pattern.size() > text.size()) return false;
    for (std::size_t j = 0; j < pattern.size(); ++j)
        if (text[pos + j] != pattern[j]) return false;
    return true;
}

Word concat(std::initializer_list<WordView> parts);
Word repeat(WordView w, std::size_t times);

}  // namespace subdyn
