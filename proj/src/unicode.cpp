#include "misinfo/unicode.hpp"

namespace misinfo::unicode {

namespace {

struct Decoded {
    char32_t cp;
    std::size_t len;
};

Decoded decode_one(std::string_view s, std::size_t i) {
    const auto b0 = static_cast<unsigned char>(s[i]);
    if (b0 < 0x80) return {b0, 1};
    std::size_t len = 0;
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
        return {0xFFFD, 1};
    }
    if (i + len > s.size()) return {0xFFFD, 1};
    for (std::size_t k = 1; k < len; ++k) {
        const auto b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
        cp = (cp << 6) | (b & 0x3F);
    }
    // Overlong forms and surrogates are invalid.
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        (cp >= 0xD800 && cp <= 0xDFFF) || cp > 0x10FFFF) {
        return {0xFFFD, 1};
    }
    return {cp, len};
}

bool in(char32_t c, char32_t lo, char32_t hi) { return c >= lo && c <= hi; }

}  // namespace

std::u32string decode(std::string_view utf8) {
    std::u32string out;
    out.reserve(utf8.size());
    for (std::size_t i = 0; i < utf8.size();) {
        const auto d = decode_one(utf8, i);
        out.push_back(d.cp);
        i += d.len;
    }
    return out;
}

std::string encode(std::u32string_view cps) {
    std::string out;
    out.reserve(cps.size());
    for (char32_t c : cps) {
        if (c < 0x80) {
            out.push_back(static_cast<char>(c));
        } else if (c < 0x800) {
            out.push_back(static_cast<char>(0xC0 | (c >> 6)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        } else if (c < 0x10000) {
            out.push_back(static_cast<char>(0xE0 | (c >> 12)));
            out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        } else {
            out.push_back(static_cast<char>(0xF0 | (c >> 18)));
            out.push_back(static_cast<char>(0x80 | ((c >> 12) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | ((c >> 6) & 0x3F)));
            out.push_back(static_cast<char>(0x80 | (c & 0x3F)));
        }
    }
    return out;
}

bool is_space(char32_t c) {
    return c == ' ' || in(c, 0x09, 0x0D) || c == 0x85 || c == 0xA0 || c == 0x1680 ||
           in(c, 0x2000, 0x200A) || c == 0x2028 || c == 0x2029 || c == 0x202F || c == 0x205F ||
           c == 0x3000;
}

bool is_alnum(char32_t c) {
    if (c < 0x80) return in(c, '0', '9') || in(c, 'a', 'z') || in(c, 'A', 'Z');
    if (c == 0xAA || c == 0xB5 || c == 0xBA) return true;
    if (in(c, 0xC0, 0x24F)) return c != 0xD7 && c != 0xF7;  // Latin-1 letters, Latin Ext A/B
    if (in(c, 0x250, 0x2AF)) return true;                     // IPA
    if (in(c, 0x370, 0x3FF)) return c != 0x37E && c != 0x387 && c != 0x375;  // Greek
    if (in(c, 0x400, 0x52F)) return !in(c, 0x482, 0x489);    // Cyrillic
    if (in(c, 0x531, 0x587)) return !in(c, 0x55A, 0x55F);    // Armenian
    if (in(c, 0x5D0, 0x5F2)) return true;                     // Hebrew letters
    if (in(c, 0x620, 0x6FF)) return !in(c, 0x6D4, 0x6D4) && !in(c, 0x66A, 0x66D);  // Arabic
    if (in(c, 0x900, 0xDFF)) return true;                     // Indic scripts
    if (in(c, 0xE00, 0xEFF)) return true;                     // Thai, Lao
    if (in(c, 0x10A0, 0x10FF)) return true;                   // Georgian
    if (in(c, 0x1100, 0x11FF)) return true;                   // Hangul Jamo
    if (in(c, 0x1E00, 0x1FFF)) return true;                   // Latin Ext Additional, Greek Ext
    if (in(c, 0x3040, 0x30FF)) return c != 0x30FB;            // Hiragana, Katakana
    if (in(c, 0x3400, 0x4DBF) || in(c, 0x4E00, 0x9FFF)) return true;  // CJK
    if (in(c, 0xAC00, 0xD7A3)) return true;                   // Hangul syllables
    if (in(c, 0xFF10, 0xFF19) || in(c, 0xFF21, 0xFF3A) || in(c, 0xFF41, 0xFF5A)) return true;
    if (in(c, 0x20000, 0x2FA1F)) return true;                 // CJK extensions
    return false;
}

char32_t to_lower(char32_t c) {
    if (in(c, 'A', 'Z')) return c + 32;
    if (c < 0x80) return c;
    if (in(c, 0xC0, 0xDE) && c != 0xD7) return c + 32;
    if (in(c, 0x100, 0x17F)) {
        // Latin Extended-A alternates upper/lower, with a shifted run 0x139..0x148 and 0x179..0x17E.
        if ((in(c, 0x139, 0x148) || in(c, 0x179, 0x17E))) return (c % 2 == 1) ? c + 1 : c;
        if (c == 0x178) return 0xFF;
        if (c == 0x130 || c == 0x131 || c == 0x138 || c == 0x149 || c == 0x17F) return c;
        return (c % 2 == 0) ? c + 1 : c;
    }
    if (in(c, 0x391, 0x3A9) && c != 0x3A2) return c + 32;  // Greek capitals
    if (in(c, 0x410, 0x42F)) return c + 32;                // Cyrillic basic
    if (in(c, 0x400, 0x40F)) return c + 80;
    return c;
}

std::vector<std::string_view> split_ws(std::string_view s) {
    std::vector<std::string_view> out;
    std::size_t start = std::string_view::npos;
    for (std::size_t i = 0; i < s.size();) {
        const auto d = decode_one(s, i);
        if (is_space(d.cp)) {
            if (start != std::string_view::npos) {
                out.push_back(s.substr(start, i - start));
                start = std::string_view::npos;
            }
        } else if (start == std::string_view::npos) {
            start = i;
        }
        i += d.len;
    }
    if (start != std::string_view::npos) out.push_back(s.substr(start));
    return out;
}

std::string_view trim(std::string_view s) {
    std::size_t first = s.size();
    std::size_t last = 0;
    for (std::size_t i = 0; i < s.size();) {
        const auto d = decode_one(s, i);
        if (!is_space(d.cp)) {
            if (first == s.size()) first = i;
            last = i + d.len;
        }
        i += d.len;
    }
    if (first == s.size()) return {};
    return s.substr(first, last - first);
}

std::string squeeze_ws(std::string_view s) {
    std::string out;
    for (const auto piece : split_ws(s)) {
        if (!out.empty()) out.push_back(' ');
        out.append(piece);
    }
    return out;
}

}  // namespace misinfo::unicode
