#pragma once

#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include "sansum/errors.hpp"
#include "sansum/utf8.hpp"

namespace sansum {

struct Sentence {
    int index = 0;                    // chronological position within the document
    std::string text;                 // normalized text, tokens joined by single spaces
    std::vector<std::string> tokens;  // whitespace-free, |tokens| >= 1
};

struct Document {
    std::string id;
    std::vector<Sentence> sentences;

    std::size_t size() const { return sentences.size(); }

    std::vector<std::string> all_tokens() const {
        std::vector<std::string> out;
        for (const auto& s : sentences) out.insert(out.end(), s.tokens.begin(), s.tokens.end());
        return out;
    }
};

// Sentence terminators: danda, double danda, and the ASCII pipe some corpora
// use in its place.
inline bool is_sentence_delimiter(char32_t cp) {
    return cp == U'।' || cp == U'॥' || cp == U'|';
}

inline bool is_ascii_space(char32_t cp) {
    return cp == U' ' || cp == U'\t' || cp == U'\n' || cp == U'\r' || cp == U'\f' || cp == U'\v';
}

// Reduces raw scraped text to Devanagari-only content. URLs go first, then
// every code point outside the Devanagari block (other than '|' and
// whitespace, which becomes a single space) is dropped. Idempotent.
inline std::string clean(const std::string& raw) {
    if (!utf8::is_valid(raw))
        throw DecodeError("input is not valid UTF-8");

    // URL removal happens on the raw text, before character filtering.
    // Both cut points land on code point boundaries: matches start at an
    // ASCII letter and stop only at ASCII whitespace. Spelled without \S or
    // icase so the global locale cannot change what matches.
    static const std::regex url_re(R"((?:[A-Za-z][A-Za-z0-9+.\-]*://|[Ww][Ww][Ww]\.)[^ \t\n\r\f\v]*)",
                                   std::regex::optimize);
    const std::string no_urls = std::regex_replace(raw, url_re, " ");

    const std::vector<char32_t> cps = utf8::decode(no_urls);
    std::vector<char32_t> kept;
    kept.reserve(cps.size());
    bool pending_space = false;
    for (char32_t cp : cps) {
        const bool devanagari = cp >= 0x0900 && cp <= 0x097F;
        if (devanagari || cp == U'|') {
            if (pending_space && !kept.empty()) kept.push_back(U' ');
            pending_space = false;
            kept.push_back(cp);
        } else if (is_ascii_space(cp)) {
            pending_space = true;
        }
        // anything else: removed
    }
    return utf8::encode(kept);
}

inline std::vector<std::string> split_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t start = 0;
    while (start < text.size()) {
        while (start < text.size() && text[start] == ' ') ++start;
        std::size_t end = start;
        while (end < text.size() && text[end] != ' ') ++end;
        if (end > start) tokens.emplace_back(text.substr(start, end - start));
        start = end;
    }
    return tokens;
}

// Splits cleaned text into ordered sentences on danda / double danda / '|'.
// Re-cleans its input first, so raw text is accepted too.
inline Document segment(const std::string& text, const std::string& id) {
    const std::string cleaned = clean(text);
    const std::vector<char32_t> cps = utf8::decode(cleaned);

    Document doc;
    doc.id = id;
    std::vector<char32_t> current;
    const auto flush = [&] {
        // trim the single spaces clean() may leave at segment edges
        std::size_t b = 0, e = current.size();
        while (b < e && current[b] == U' ') ++b;
        while (e > b && current[e - 1] == U' ') --e;
        if (e > b) {
            Sentence s;
            s.index = static_cast<int>(doc.sentences.size());
            s.text = utf8::encode({current.begin() + static_cast<std::ptrdiff_t>(b),
                                   current.begin() + static_cast<std::ptrdiff_t>(e)});
            s.tokens = split_tokens(s.text);
            doc.sentences.push_back(std::move(s));
        }
        current.clear();
    };
    for (char32_t cp : cps) {
        if (is_sentence_delimiter(cp))
            flush();
        else
            current.push_back(cp);
    }
    flush();

    if (doc.sentences.empty())
        throw EmptyDocumentError("document '" + id + "' has no sentences after cleaning");
    return doc;
}

// Multiset of contiguous n-token windows, each joined with a single space
// (tokens never contain whitespace, so joining is collision-free).
inline std::vector<std::string> ngrams(const std::vector<std::string>& tokens, std::size_t n) {
    if (n == 0) throw ArgumentError("ngram size must be >= 1");
    std::vector<std::string> out;
    if (tokens.size() < n) return out;
    out.reserve(tokens.size() - n + 1);
    for (std::size_t i = 0; i + n <= tokens.size(); ++i) {
        std::string gram = tokens[i];
        for (std::size_t j = 1; j < n; ++j) {
            gram += ' ';
            gram += tokens[i + j];
        }
        out.push_back(std::move(gram));
    }
    return out;
}

}  // namespace sansum
