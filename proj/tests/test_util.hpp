#pragma once

// Shared fixtures and independent oracles for the unit and acceptance suites.
// Oracles deliberately avoid the library's code paths: they enumerate,
// brute-force, or recompute from definitions.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <string>
#include <vector>

#include "sansum/matrix.hpp"
#include "sansum/rng.hpp"
#include "sansum/text_prep.hpp"

namespace testutil {

// ---- token and text generators ---------------------------------------------

inline std::vector<std::string> random_tokens(sansum::SplitMix64& rng, std::size_t max_len,
                                              std::size_t alphabet = 4) {
    static const std::array<std::string, 8> symbols = {"a", "b", "c", "d", "e", "f", "g", "h"};
    const std::size_t len = rng.next_below(max_len + 1);
    std::vector<std::string> tokens;
    tokens.reserve(len);
    for (std::size_t i = 0; i < len; ++i)
        tokens.push_back(symbols[rng.next_below(std::min(alphabet, symbols.size()))]);
    return tokens;
}

inline const std::vector<std::string>& devanagari_words() {
    static const std::vector<std::string> words = {
        "अग्निः", "वायुः",  "जलम्",   "पृथ्वी",  "आकाशः", "सूर्यः",  "चन्द्रः", "नक्षत्रम्",
        "वनम्",   "नदी",   "पर्वतः", "ग्रामः",  "नगरम्", "राजा",  "कविः",  "शिष्यः",
        "गच्छति", "पठति",  "वदति",  "पश्यति", "भवति",  "नमति",  "जयति",  "वसति"};
    return words;
}

// A deterministic document of `n` short Devanagari sentences ending in danda.
inline std::string devanagari_fixture(std::size_t n, std::uint64_t seed) {
    sansum::SplitMix64 rng(seed);
    const auto& words = devanagari_words();
    std::string text;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t len = 2 + rng.next_below(4);
        for (std::size_t j = 0; j < len; ++j) {
            if (j) text += ' ';
            text += words[rng.next_below(words.size())];
        }
        text += "। ";
    }
    return text;
}

// Mixed-script noise for clean() robustness: Devanagari, ASCII, URLs,
// delimiters, other Unicode, odd whitespace. Always valid UTF-8.
inline std::string mixed_script_string(std::uint64_t seed) {
    sansum::SplitMix64 rng(seed);
    const std::vector<std::string> pieces = {
        "रामः",       "गच्छति",     "देवदत्तः", "abc",   "XYZ",  "123",  "héllo", "мир",
        "http://a.b", "www.x.y/z", "।",      "॥",     "|",    "  ",   "\t",    "\n",
        "…",          "🙂",         "॰",      "ॐ",     "—",    ".",    ",",     "क्षत्रिय"};
    std::string out;
    const std::size_t n = 1 + rng.next_below(24);
    for (std::size_t i = 0; i < n; ++i) {
        out += pieces[rng.next_below(pieces.size())];
        if (rng.next_below(3) == 0) out += ' ';
    }
    return out;
}

// ---- ROUGE oracles ----------------------------------------------------------

// Clipped n-gram match count by direct window comparison, no hashing.
inline int rouge_match_oracle(const std::vector<std::string>& cand,
                              const std::vector<std::string>& ref, std::size_t n) {
    const auto windows = [n](const std::vector<std::string>& t) {
        std::vector<std::vector<std::string>> w;
        if (t.size() < n) return w;
        for (std::size_t i = 0; i + n <= t.size(); ++i)
            w.emplace_back(t.begin() + static_cast<std::ptrdiff_t>(i),
                           t.begin() + static_cast<std::ptrdiff_t>(i + n));
        return w;
    };
    const auto cw = windows(cand);
    const auto rw = windows(ref);
    std::vector<bool> used(cw.size(), false);
    int match = 0;
    // greedily pair each reference window with an unused equal candidate
    // window; equivalent to sum over grams of min(count_c, count_r)
    for (const auto& r : rw) {
        for (std::size_t i = 0; i < cw.size(); ++i) {
            if (!used[i] && cw[i] == r) {
                used[i] = true;
                ++match;
                break;
            }
        }
    }
    return match;
}

// LCS length by exhaustive subsequence enumeration over the candidate.
// Only feasible for |cand| <= ~16.
inline std::size_t lcs_oracle(const std::vector<std::string>& cand,
                              const std::vector<std::string>& ref) {
    const std::size_t m = cand.size();
    std::size_t best = 0;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        const auto bits = static_cast<std::size_t>(__builtin_popcount(mask));
        if (bits <= best) continue;
        // is the masked subsequence of cand a subsequence of ref?
        std::size_t r = 0;
        bool ok = true;
        for (std::size_t i = 0; i < m && ok; ++i) {
            if (!(mask & (1u << i))) continue;
            while (r < ref.size() && ref[r] != cand[i]) ++r;
            if (r == ref.size())
                ok = false;
            else
                ++r;
        }
        if (ok) best = bits;
    }
    return best;
}

// ---- k-means oracle ---------------------------------------------------------

// Minimum WCSS over every assignment of n points to k cluster ids.
inline double kmeans_wcss_oracle(const sansum::Matrix& x, std::size_t k) {
    const std::size_t n = x.rows();
    const std::size_t q = x.cols();
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::size_t> assign(n, 0);
    std::size_t total = 1;
    for (std::size_t i = 0; i < n; ++i) total *= k;
    for (std::size_t code = 0; code < total; ++code) {
        std::size_t c = code;
        for (std::size_t i = 0; i < n; ++i) {
            assign[i] = c % k;
            c /= k;
        }
        std::vector<std::vector<double>> sums(k, std::vector<double>(q, 0.0));
        std::vector<std::size_t> counts(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            ++counts[assign[i]];
            for (std::size_t j = 0; j < q; ++j) sums[assign[i]][j] += x(i, j);
        }
        double wcss = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const auto a = assign[i];
            for (std::size_t j = 0; j < q; ++j) {
                const double diff = x(i, j) - sums[a][j] / static_cast<double>(counts[a]);
                wcss += diff * diff;
            }
        }
        best = std::min(best, wcss);
    }
    return best;
}

// ---- synthetic cluster data -------------------------------------------------

// Standard normal via Box-Muller.
inline double gaussian(sansum::SplitMix64& rng) {
    const double u1 = 1.0 - rng.next_double();
    const double u2 = rng.next_double();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
}

// Three unit-sigma blobs of `per_blob` points with centers 20 sigma apart.
inline sansum::Matrix three_blobs(std::size_t per_blob, std::uint64_t seed) {
    sansum::SplitMix64 rng(seed);
    const double centers[3][2] = {{0.0, 0.0}, {20.0, 0.0}, {0.0, 20.0}};
    sansum::Matrix x(3 * per_blob, 2);
    for (std::size_t b = 0; b < 3; ++b)
        for (std::size_t i = 0; i < per_blob; ++i) {
            const std::size_t row = b * per_blob + i;
            x(row, 0) = centers[b][0] + gaussian(rng);
            x(row, 1) = centers[b][1] + gaussian(rng);
        }
    return x;
}

// ---- filesystem helpers -----------------------------------------------------

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static std::uint64_t counter = 0;
        dir_ = std::filesystem::temp_directory_path() /
               ("sansum_test_" + tag + "_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter++));
        std::filesystem::create_directories(dir_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(dir_, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return dir_; }

    std::filesystem::path write(const std::string& name, const std::string& content) const {
        const auto p = dir_ / name;
        std::ofstream out(p, std::ios::binary);
        out << content;
        return p;
    }

private:
    std::filesystem::path dir_;
};

struct CommandResult {
    int exit_code = -1;
    std::string output;  // stdout only
};

// Runs a shell command, capturing stdout. stderr passes through.
inline CommandResult run_command(const std::string& command) {
    CommandResult result;
    FILE* pipe = ::popen(command.c_str(), "r");
    if (!pipe) return result;
    char buf[4096];
    std::size_t got;
    while ((got = fread(buf, 1, sizeof buf, pipe)) > 0) result.output.append(buf, got);
    const int status = ::pclose(pipe);
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return result;
}

inline std::string shell_quote(const std::string& s) {
    std::string quoted = "'";
    for (char c : s) {
        if (c == '\'')
            quoted += "'\\''";
        else
            quoted += c;
    }
    quoted += "'";
    return quoted;
}

}  // namespace testutil
