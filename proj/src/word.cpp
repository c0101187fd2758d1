#include "subdyn/word.hpp"

#include <algorithm>
#include <functional>

#include "subdyn/errors.hpp"

namespace subdyn {

Word LetterNames::parse(std::string_view text, std::size_t alphabet_size) const {
    Word out;
    out.reserve(text.size());
    for (char c : text) {
        auto pos = chars_.find(c);
        if (pos == std::string::npos || pos >= alphabet_size)
            throw InvalidInput(std::string("symbol '") + c + "' is not in the alphabet");
        out.push_back(static_cast<Letter>(pos));
    }
    return out;
}

std::string LetterNames::format(WordView w) const {
    std::string s;
    s.reserve(w.size());
    for (Letter a : w) s.push_back(chars_.at(a));
    return s;
}

Word word_from_string(std::string_view text) { return LetterNames::digits().parse(text, 10); }

std::string word_to_string(WordView w) { return LetterNames::digits().format(w); }

std::size_t count_occurrences(WordView text, WordView pattern) {
    if (pattern.empty() || pattern.size() > text.size()) return 0;
    std::size_t count = 0;
    std::boyer_moore_horspool_searcher searcher(pattern.begin(), pattern.end());
    auto it = text.begin();
    while (true) {
        auto hit = std::search(it, text.end(), searcher);
        if (hit == text.end()) break;
        ++count;
        it = hit + 1;
    }
    return count;
}

Word concat(std::initializer_list<WordView> parts) {
    Word out;
    std::size_t total = 0;
    for (auto p : parts) total += p.size();
    out.reserve(total);
    for (auto p : parts) out.insert(out.end(), p.begin(), p.end());
    return out;
}

Word repeat(WordView w, std::size_t times) {
    Word out;
    out.reserve(w.size() * times);
    for (std::size_t i = 0; i < times; ++i) out.insert(out.end(), w.begin(), w.end());
    return out;
}

}  // namespace subdyn
