#include "turnkit/textmetrics.hpp"

#include "turnkit/errors.hpp"

#include <unicode/locid.h>
#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>

#include <algorithm>

namespace turnkit {

namespace {

bool is_stripped_punct(UChar32 c) {
    if (c < 0x80) {
        return (c >= '!' && c <= '/') || (c >= ':' && c <= '@') || (c >= '[' && c <= '`') ||
               (c >= '{' && c <= '~');
    }
    switch (c) {
        case 0x3002: // ideographic full stop
        case 0x3001: // ideographic comma
        case 0xFF0C: // fullwidth comma
        case 0xFF1F: // fullwidth question mark
        case 0xFF01: // fullwidth exclamation mark
        case 0xFF1A: // fullwidth colon
        case 0xFF1B: // fullwidth semicolon
        case 0x201C: // left double quotation mark
        case 0x201D: // right double quotation mark
        case 0x2018: // left single quotation mark
        case 0x2019: // right single quotation mark
        case 0xFF08: // fullwidth left parenthesis
        case 0xFF09: // fullwidth right parenthesis
        case 0x300A: // left double angle bracket
        case 0x300B: // right double angle bracket
            return true;
        default:
            return false;
    }
}

bool is_cjk_ideograph(UChar32 c) {
    return (c >= 0x3400 && c <= 0x4DBF) || (c >= 0x4E00 && c <= 0x9FFF) ||
           (c >= 0xF900 && c <= 0xFAFF) || (c >= 0x20000 && c <= 0x2EBEF);
}

} // namespace

TokenSequence normalize_tokenize(std::string_view text) {
    UErrorCode ec = U_ZERO_ERROR;
    const icu::Normalizer2* nfkc = icu::Normalizer2::getNFKCInstance(ec);
    if (U_FAILURE(ec)) throw Error("ICU NFKC normalizer unavailable");

    icu::UnicodeString u = icu::UnicodeString::fromUTF8(
        icu::StringPiece(text.data(), static_cast<int>(text.size())));
    icu::UnicodeString normalized = nfkc->normalize(u, ec);
    if (U_FAILURE(ec)) throw Error("ICU NFKC normalization failed");
    normalized.toLower(icu::Locale::getRoot());

    TokenSequence tokens;
    std::string current;
    auto flush = [&] {
        if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    };

    for (std::int32_t i = 0; i < normalized.length();) {
        const UChar32 c = normalized.char32At(i);
        i += U16_LENGTH(c);
        if (is_stripped_punct(c) || u_isUWhiteSpace(c)) {
            flush();
            continue;
        }
        if (is_cjk_ideograph(c)) {
            flush();
            icu::UnicodeString one(c);
            std::string utf8;
            one.toUTF8String(utf8);
            tokens.push_back(std::move(utf8));
            continue;
        }
        icu::UnicodeString one(c);
        one.toUTF8String(current);
    }
    flush();
    return tokens;
}

int edit_distance(const TokenSequence& reference, const TokenSequence& hypothesis) {
    const std::size_t n = reference.size();
    const std::size_t m = hypothesis.size();
    std::vector<int> prev(m + 1), cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = static_cast<int>(j);
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = static_cast<int>(i);
        for (std::size_t j = 1; j <= m; ++j) {
            const int sub = prev[j - 1] + (reference[i - 1] == hypothesis[j - 1] ? 0 : 1);
            cur[j] = std::min({sub, prev[j] + 1, cur[j - 1] + 1});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

Rational wer(const TokenSequence& reference, const TokenSequence& hypothesis) {
    if (reference.empty()) return hypothesis.empty() ? Rational(0) : Rational(1);
    return Rational(edit_distance(reference, hypothesis),
                    static_cast<std::int64_t>(reference.size()));
}

} // namespace turnkit
