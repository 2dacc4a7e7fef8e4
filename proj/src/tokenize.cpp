#include "legalir/tokenize.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <iterator>

namespace legalir {

namespace {

constexpr char32_t kInvalid = 0xFFFFFFFF;

// Decodes one code point starting at text[i] and advances i. Returns
// kInvalid (consuming one byte) on malformed input.
char32_t decode(std::string_view text, std::size_t& i) {
    const auto lead = static_cast<unsigned char>(text[i]);
    if (lead < 0x80) {
        ++i;
        return lead;
    }
    std::size_t len = 0;
    char32_t cp = 0;
    if ((lead & 0xE0) == 0xC0) {
        len = 2;
        cp = lead & 0x1F;
    } else if ((lead & 0xF0) == 0xE0) {
        len = 3;
        cp = lead & 0x0F;
    } else if ((lead & 0xF8) == 0xF0) {
        len = 4;
        cp = lead & 0x07;
    } else {
        ++i;
        return kInvalid;
    }
    if (i + len > text.size()) {
        ++i;
        return kInvalid;
    }
    for (std::size_t k = 1; k < len; ++k) {
        const auto cont = static_cast<unsigned char>(text[i + k]);
        if ((cont & 0xC0) != 0x80) {
            ++i;
            return kInvalid;
        }
        cp = (cp << 6) | (cont & 0x3F);
    }
    static constexpr std::array<char32_t, 5> min_for_len{0, 0, 0x80, 0x800, 0x10000};
    if (cp < min_for_len[len] || cp > 0x10FFFF || (cp >= 0xD800 && cp <= 0xDFFF)) {
        ++i;
        return kInvalid;
    }
    i += len;
    return cp;
}

void encode(char32_t cp, std::string& out) {
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

bool in(char32_t cp, char32_t lo, char32_t hi) { return cp >= lo && cp <= hi; }

// Letters and digits. ASCII exactly; above ASCII, everything except the
// known punctuation, symbol and space blocks counts as a word character.
bool is_word_char(char32_t cp) {
    if (cp < 0x80) return in(cp, U'0', U'9') || in(cp, U'a', U'z') || in(cp, U'A', U'Z');
    if (cp == kInvalid) return false;
    if (in(cp, 0x80, 0xBF)) return cp == 0xAA || cp == 0xB5 || cp == 0xBA;  // ª µ º
    if (cp == 0xD7 || cp == 0xF7) return false;                             // × ÷
    if (in(cp, 0x2000, 0x2BFF)) return false;  // punctuation, symbols, arrows, math
    if (in(cp, 0x3000, 0x303F)) return false;  // CJK punctuation
    if (in(cp, 0xFE30, 0xFE4F) || in(cp, 0xFE50, 0xFE6F)) return false;
    if (in(cp, 0xFF00, 0xFF0F) || in(cp, 0xFF1A, 0xFF20) || in(cp, 0xFF3B, 0xFF40) || in(cp, 0xFF5B, 0xFF65))
        return false;
    if (cp == 0xFEFF || in(cp, 0xE000, 0xF8FF)) return false;  // BOM, private use
    if (in(cp, 0x1F000, 0x1FAFF)) return false;                // emoji and pictographs
    return true;
}

char32_t to_lower(char32_t cp) {
    if (in(cp, U'A', U'Z')) return cp + 32;
    if (cp < 0xC0) return cp;
    if (in(cp, 0xC0, 0xDE) && cp != 0xD7) return cp + 32;
    if (in(cp, 0x100, 0x137) || in(cp, 0x14A, 0x177)) return (cp % 2 == 0) ? cp + 1 : cp;
    if (in(cp, 0x139, 0x148) || in(cp, 0x179, 0x17E)) return (cp % 2 == 1) ? cp + 1 : cp;
    if (cp == 0x178) return 0xFF;
    if (in(cp, 0x391, 0x3A9) && cp != 0x3A2) return cp + 32;
    if (in(cp, 0x410, 0x42F)) return cp + 32;
    if (in(cp, 0x400, 0x40F)) return cp + 80;
    return cp;
}

constexpr std::string_view kPortugueseStopwords[] = {
    "a",      "à",      "ao",     "aos",    "aquela", "aquelas", "aquele", "aqueles", "aquilo", "as",
    "às",     "até",    "com",    "como",   "da",     "das",     "de",     "dela",    "delas",  "dele",
    "deles",  "depois", "do",     "dos",    "e",      "é",       "ela",    "elas",    "ele",    "eles",
    "em",     "entre",  "era",    "eram",   "essa",   "essas",   "esse",   "esses",   "esta",   "está",
    "estas",  "este",   "estes",  "eu",     "foi",    "foram",   "há",     "isso",    "isto",   "já",
    "lhe",    "lhes",   "mais",   "mas",    "me",     "mesmo",   "meu",    "meus",    "minha",  "minhas",
    "muito",  "na",     "nas",    "nem",    "no",     "nos",     "nós",    "nossa",   "nossas", "nosso",
    "nossos", "num",    "numa",   "o",      "os",     "ou",      "para",   "pela",    "pelas",  "pelo",
    "pelos",  "por",    "qual",   "quando", "que",    "quem",    "se",     "sem",     "ser",    "seu",
    "seus",   "só",     "sua",    "suas",   "também", "te",      "tem",    "têm",     "tu",     "tua",
    "tuas",   "um",     "uma",    "umas",   "uns",    "você",    "vocês",  "vos",     "estar",  "são",
    "sobre",  "estão",  "ter",    "tinha",  "ainda",  "assim",   "cada",   "desde",   "onde",   "pois",
    "porque", "quais",  "seja",   "sido",   "sendo",  "tendo",   "teve",   "todo",    "não",
};

}  // namespace

std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options) {
    std::vector<std::string> tokens;
    std::string current;
    auto flush = [&] {
        if (current.empty()) return;
        if (!options.portuguese_stopwords || !is_portuguese_stopword(current)) tokens.push_back(current);
        current.clear();
    };
    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = decode(text, i);
        if (is_word_char(cp)) {
            encode(to_lower(cp), current);
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

bool is_portuguese_stopword(std::string_view token) {
    return std::find(std::begin(kPortugueseStopwords), std::end(kPortugueseStopwords), token) !=
           std::end(kPortugueseStopwords);
}

}  // namespace legalir
