#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "sansum/errors.hpp"

namespace sansum::utf8 {

// Decodes one code point starting at `pos`. Advances `pos` past it.
// Rejects overlong forms, surrogates and values above U+10FFFF.
inline char32_t decode_one(std::string_view bytes, std::size_t& pos) {
    const auto fail = [&](const char* why) -> char32_t {
        throw DecodeError("invalid UTF-8 at byte offset " + std::to_string(pos) + ": " + why);
    };
    const auto b0 = static_cast<unsigned char>(bytes[pos]);
    if (b0 < 0x80) {
        ++pos;
        return b0;
    }
    int len = 0;
    char32_t cp = 0;
    if ((b0 & 0xE0) == 0xC0) {
        len = 2;
        cp = b0 & 0x1F;
    } else if ((b0 & 0xF0) == 0xE0) {
        len = 3;
        cp = b0 & 0x0F;
    } else if ((b0 & 0xF8) == 0xF0) {
        len = 4;
        cp = b0 & 0x07;
    } else {
        return fail("bad leading byte");
    }
    if (pos + len > bytes.size()) return fail("truncated sequence");
    for (int i = 1; i < len; ++i) {
        const auto b = static_cast<unsigned char>(bytes[pos + i]);
        if ((b & 0xC0) != 0x80) return fail("bad continuation byte");
        cp = (cp << 6) | (b & 0x3F);
    }
    static constexpr char32_t kMinForLen[5] = {0, 0, 0x80, 0x800, 0x10000};
    if (cp < kMinForLen[len]) return fail("overlong encoding");
    if (cp >= 0xD800 && cp <= 0xDFFF) return fail("surrogate code point");
    if (cp > 0x10FFFF) return fail("code point out of range");
    pos += len;
    return cp;
}

inline std::vector<char32_t> decode(std::string_view bytes) {
    std::vector<char32_t> out;
    out.reserve(bytes.size());
    std::size_t pos = 0;
    while (pos < bytes.size()) out.push_back(decode_one(bytes, pos));
    return out;
}

inline void encode_one(char32_t cp, std::string& out) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

inline std::string encode(const std::vector<char32_t>& cps) {
    std::string out;
    out.reserve(cps.size() * 3);
    for (char32_t cp : cps) encode_one(cp, out);
    return out;
}

inline bool is_valid(std::string_view bytes) {
    std::size_t pos = 0;
    try {
        while (pos < bytes.size()) decode_one(bytes, pos);
    } catch (const DecodeError&) {
        return false;
    }
    return true;
}

}  // namespace sansum::utf8
