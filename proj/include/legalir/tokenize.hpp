#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace legalir {

struct TokenizerOptions {
    bool portuguese_stopwords = false;
};

/// Lowercased runs of Unicode letters and digits. Diacritics are kept,
/// nothing is stemmed; every other code point separates tokens.
///
/// Case folding covers Latin-1, Latin Extended-A, Greek and Cyrillic,
/// which is what Portuguese text needs. Invalid UTF-8 bytes act as
/// separators.
std::vector<std::string> tokenize(std::string_view text, const TokenizerOptions& options = {});

bool is_portuguese_stopword(std::string_view token);

}  // namespace legalir
