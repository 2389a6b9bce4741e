#pragma once

#include <cstdint>
#include <locale>
#include <string>
#include <string_view>
#include <vector>

namespace pdaudit::text {

inline std::u32string decode_utf8(std::string_view s) {
    std::u32string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        auto b0 = static_cast<unsigned char>(s[i]);
        char32_t cp = 0xFFFD;
        std::size_t len = 1;
        if (b0 < 0x80) {
            cp = b0;
        } else if ((b0 >> 5) == 0x6 && i + 1 < s.size()) {
            cp = ((b0 & 0x1Fu) << 6) | (static_cast<unsigned char>(s[i + 1]) & 0x3Fu);
            len = 2;
        } else if ((b0 >> 4) == 0xE && i + 2 < s.size()) {
            cp = ((b0 & 0x0Fu) << 12) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 6) |
                 (static_cast<unsigned char>(s[i + 2]) & 0x3Fu);
            len = 3;
        } else if ((b0 >> 3) == 0x1E && i + 3 < s.size()) {
            cp = ((b0 & 0x07u) << 18) | ((static_cast<unsigned char>(s[i + 1]) & 0x3Fu) << 12) |
                 ((static_cast<unsigned char>(s[i + 2]) & 0x3Fu) << 6) |
                 (static_cast<unsigned char>(s[i + 3]) & 0x3Fu);
            len = 4;
        }
        out.push_back(cp);
        i += len;
    }
    return out;
}

inline void append_utf8(std::string& out, char32_t cp) {
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

inline std::string encode_utf8(std::u32string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t cp : s) append_utf8(out, cp);
    return out;
}

inline std::size_t char_count(std::string_view s) { return decode_utf8(s).size(); }

namespace detail {

inline const std::ctype<wchar_t>* unicode_ctype() {
    static const std::locale loc = [] {
        for (const char* name : {"C.UTF-8", "C.utf8", "en_US.UTF-8"}) {
            try {
                return std::locale(name);
            } catch (const std::exception&) {
            }
        }
        return std::locale::classic();
    }();
    static const bool unicode = loc != std::locale::classic();
    return unicode ? &std::use_facet<std::ctype<wchar_t>>(loc) : nullptr;
}

} // namespace detail

inline char32_t fold_char(char32_t c) {
    if (c < 0x80) return (c >= 'A' && c <= 'Z') ? c + 32 : c;
    if (const auto* f = detail::unicode_ctype(); f && sizeof(wchar_t) == 4) {
        return static_cast<char32_t>(f->tolower(static_cast<wchar_t>(c)));
    }
    return c;
}

inline bool is_space(char32_t c) {
    return c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' || c == U'\v' ||
           c == 0xA0 || c == 0x2009 || c == 0x202F || c == 0x3000;
}

inline bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }

inline bool is_ascii_letter(char32_t c) { return (c >= U'a' && c <= U'z') || (c >= U'A' && c <= U'Z'); }

inline bool is_letter(char32_t c) {
    if (c < 0x80) return is_ascii_letter(c);
    if (const auto* f = detail::unicode_ctype(); f && sizeof(wchar_t) == 4) {
        return f->is(std::ctype_base::alpha, static_cast<wchar_t>(c));
    }
    return true;
}

inline bool is_upper(char32_t c) {
    if (c < 0x80) return c >= U'A' && c <= U'Z';
    if (const auto* f = detail::unicode_ctype(); f && sizeof(wchar_t) == 4) {
        return f->is(std::ctype_base::upper, static_cast<wchar_t>(c));
    }
    return false;
}

inline bool is_alnum(char32_t c) { return is_digit(c) || is_letter(c); }

inline bool is_punct(char32_t c) {
    if (c < 0x80) return (c >= 0x21 && c <= 0x2F) || (c >= 0x3A && c <= 0x40) || (c >= 0x5B && c <= 0x60) ||
                         (c >= 0x7B && c <= 0x7E);
    if (const auto* f = detail::unicode_ctype(); f && sizeof(wchar_t) == 4) {
        return f->is(std::ctype_base::punct, static_cast<wchar_t>(c));
    }
    return false;
}

inline std::string casefold(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char32_t c : decode_utf8(s)) append_utf8(out, fold_char(c));
    return out;
}

inline std::string trim(std::string_view s) {
    auto cps = decode_utf8(s);
    std::size_t b = 0, e = cps.size();
    while (b < e && is_space(cps[b])) ++b;
    while (e > b && is_space(cps[e - 1])) --e;
    return encode_utf8(std::u32string_view(cps).substr(b, e - b));
}

/// Removes leading/trailing punctuation and whitespace.
inline std::string strip_edges(std::string_view s) {
    auto cps = decode_utf8(s);
    std::size_t b = 0, e = cps.size();
    while (b < e && (is_space(cps[b]) || is_punct(cps[b]))) ++b;
    while (e > b && (is_space(cps[e - 1]) || is_punct(cps[e - 1]))) --e;
    return encode_utf8(std::u32string_view(cps).substr(b, e - b));
}

/// Grouping key for candidate values: casefold, trim, edge punctuation removed.
inline std::string normalize_value(std::string_view s) { return strip_edges(casefold(s)); }

/// Maximal runs of letters/digits, original case kept.
inline std::vector<std::string> words(std::string_view s) {
    std::vector<std::string> out;
    std::string cur;
    for (char32_t c : decode_utf8(s)) {
        if (is_alnum(c)) {
            append_utf8(cur, c);
        } else if (!cur.empty()) {
            out.push_back(std::move(cur));
            cur.clear();
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

inline bool iequals(std::string_view a, std::string_view b) { return casefold(a) == casefold(b); }

inline std::uint64_t fnv1a64(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::string replace_all(std::string s, std::string_view from, std::string_view to) {
    if (from.empty()) return s;
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
        s.replace(pos, from.size(), to);
        pos += to.size();
    }
    return s;
}

inline std::size_t count_occurrences(std::string_view s, std::string_view needle) {
    if (needle.empty()) return 0;
    std::size_t n = 0;
    for (std::size_t pos = s.find(needle); pos != std::string_view::npos; pos = s.find(needle, pos + needle.size())) ++n;
    return n;
}

} // namespace pdaudit::text
