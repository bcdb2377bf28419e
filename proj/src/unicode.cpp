#include "ctxasr/unicode.hpp"

#include <unicode/ubrk.h>
#include <unicode/uchar.h>
#include <unicode/unorm2.h>
#include <unicode/ustring.h>
#include <unicode/utext.h>
#include <unicode/utf8.h>

#include "ctxasr/errors.hpp"

namespace ctxasr {

namespace {

struct GraphemeIter {
    UBreakIterator* it = nullptr;

    GraphemeIter() {
        UErrorCode ec = U_ZERO_ERROR;
        // UBRK_CHARACTER boundaries are extended grapheme clusters and are
        // locale-independent.
        it = ubrk_open(UBRK_CHARACTER, "", nullptr, 0, &ec);
        if (U_FAILURE(ec)) {
            it = nullptr;
        }
    }
    ~GraphemeIter() {
        if (it) ubrk_close(it);
    }
};

UBreakIterator* grapheme_iter() {
    thread_local GraphemeIter holder;
    return holder.it;
}

std::u16string to_utf16(std::string_view utf8) {
    if (utf8.empty()) return {};
    std::u16string out(utf8.size() + 1, u'\0');
    UErrorCode ec = U_ZERO_ERROR;
    std::int32_t len = 0;
    u_strFromUTF8Lenient(out.data(), static_cast<std::int32_t>(out.size()), &len,
                         utf8.data(), static_cast<std::int32_t>(utf8.size()), &ec);
    if (U_FAILURE(ec)) throw Error("UTF-16 conversion failed");
    out.resize(static_cast<std::size_t>(len));
    return out;
}

std::string to_utf8(const std::u16string& utf16) {
    if (utf16.empty()) return {};
    std::string out(utf16.size() * 4, '\0');
    UErrorCode ec = U_ZERO_ERROR;
    std::int32_t len = 0;
    u_strToUTF8(out.data(), static_cast<std::int32_t>(out.size()), &len,
                utf16.data(), static_cast<std::int32_t>(utf16.size()), &ec);
    if (U_FAILURE(ec)) throw Error("UTF-8 conversion failed");
    out.resize(static_cast<std::size_t>(len));
    return out;
}

template <typename Fn>
void for_each_codepoint(std::string_view utf8, Fn&& fn) {
    std::int32_t i = 0;
    const auto n = static_cast<std::int32_t>(utf8.size());
    const auto* s = reinterpret_cast<const std::uint8_t*>(utf8.data());
    while (i < n) {
        std::int32_t start = i;
        UChar32 cp;
        U8_NEXT(s, i, n, cp);
        if (cp < 0) cp = 0xFFFD; // keep going on invalid bytes
        fn(cp, utf8.substr(static_cast<std::size_t>(start),
                           static_cast<std::size_t>(i - start)));
    }
}

} // namespace

std::vector<std::string_view> graphemes(std::string_view utf8) {
    std::vector<std::string_view> out;
    if (utf8.empty()) return out;

    UBreakIterator* bi = grapheme_iter();
    if (!bi) throw Error("grapheme break iterator unavailable");

    UErrorCode ec = U_ZERO_ERROR;
    UText ut = UTEXT_INITIALIZER;
    utext_openUTF8(&ut, utf8.data(), static_cast<std::int64_t>(utf8.size()), &ec);
    if (U_FAILURE(ec)) throw Error("utext open failed");
    ubrk_setUText(bi, &ut, &ec);
    if (U_FAILURE(ec)) {
        utext_close(&ut);
        throw Error("break iterator reset failed");
    }

    // Boundaries are byte offsets into the UTF-8 buffer here.
    std::int32_t prev = ubrk_first(bi);
    for (std::int32_t b = ubrk_next(bi); b != UBRK_DONE; b = ubrk_next(bi)) {
        out.push_back(utf8.substr(static_cast<std::size_t>(prev),
                                  static_cast<std::size_t>(b - prev)));
        prev = b;
    }
    utext_close(&ut);
    return out;
}

std::size_t grapheme_count(std::string_view utf8) {
    return graphemes(utf8).size();
}

std::string nfc(std::string_view utf8) {
    UErrorCode ec = U_ZERO_ERROR;
    const UNormalizer2* norm = unorm2_getNFCInstance(&ec);
    if (U_FAILURE(ec)) throw Error("NFC normalizer unavailable");

    std::u16string in = to_utf16(utf8);
    std::u16string out(in.size() * 2 + 16, u'\0');
    std::int32_t len = unorm2_normalize(norm, in.data(), static_cast<std::int32_t>(in.size()),
                                        out.data(), static_cast<std::int32_t>(out.size()), &ec);
    if (ec == U_BUFFER_OVERFLOW_ERROR) {
        ec = U_ZERO_ERROR;
        out.assign(static_cast<std::size_t>(len), u'\0');
        len = unorm2_normalize(norm, in.data(), static_cast<std::int32_t>(in.size()),
                               out.data(), static_cast<std::int32_t>(out.size()), &ec);
    }
    if (U_FAILURE(ec)) throw Error("NFC normalization failed");
    out.resize(static_cast<std::size_t>(len));
    return to_utf8(out);
}

std::string to_lower(std::string_view utf8) {
    std::u16string in = to_utf16(utf8);
    std::u16string out(in.size() * 2 + 16, u'\0');
    UErrorCode ec = U_ZERO_ERROR;
    std::int32_t len = u_strToLower(out.data(), static_cast<std::int32_t>(out.size()),
                                    in.data(), static_cast<std::int32_t>(in.size()), "", &ec);
    if (ec == U_BUFFER_OVERFLOW_ERROR) {
        ec = U_ZERO_ERROR;
        out.assign(static_cast<std::size_t>(len), u'\0');
        len = u_strToLower(out.data(), static_cast<std::int32_t>(out.size()),
                           in.data(), static_cast<std::int32_t>(in.size()), "", &ec);
    }
    if (U_FAILURE(ec)) throw Error("lowercasing failed");
    out.resize(static_cast<std::size_t>(len));
    return to_utf8(out);
}

std::string strip_punctuation(std::string_view utf8) {
    std::string out;
    out.reserve(utf8.size());
    for_each_codepoint(utf8, [&](UChar32 cp, std::string_view raw) {
        if (!u_ispunct(cp)) out.append(raw);
    });
    return out;
}

std::string collapse_whitespace(std::string_view utf8) {
    std::string out;
    out.reserve(utf8.size());
    bool pending_space = false;
    for_each_codepoint(utf8, [&](UChar32 cp, std::string_view raw) {
        if (u_isUWhiteSpace(cp)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.append(raw);
        }
    });
    return out;
}

std::string remove_whitespace(std::string_view utf8) {
    std::string out;
    out.reserve(utf8.size());
    for_each_codepoint(utf8, [&](UChar32 cp, std::string_view raw) {
        if (!u_isUWhiteSpace(cp)) out.append(raw);
    });
    return out;
}

std::string_view trim(std::string_view utf8) {
    const auto* s = reinterpret_cast<const std::uint8_t*>(utf8.data());
    const auto n = static_cast<std::int32_t>(utf8.size());
    std::int32_t begin = 0;
    while (begin < n) {
        std::int32_t i = begin;
        UChar32 cp;
        U8_NEXT(s, i, n, cp);
        if (cp < 0 || !u_isUWhiteSpace(cp)) break;
        begin = i;
    }
    std::int32_t end = n;
    while (end > begin) {
        std::int32_t i = end;
        UChar32 cp;
        U8_PREV(s, begin, i, cp);
        if (cp < 0 || !u_isUWhiteSpace(cp)) break;
        end = i;
    }
    return utf8.substr(static_cast<std::size_t>(begin), static_cast<std::size_t>(end - begin));
}

std::vector<std::string> split_whitespace(std::string_view utf8) {
    std::vector<std::string> out;
    std::string cur;
    for_each_codepoint(utf8, [&](UChar32 cp, std::string_view raw) {
        if (u_isUWhiteSpace(cp)) {
            if (!cur.empty()) {
                out.push_back(std::move(cur));
                cur.clear();
            }
        } else {
            cur.append(raw);
        }
    });
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

} // namespace ctxasr
