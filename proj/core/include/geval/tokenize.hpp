#pragma once

#include <string>
#include <vector>

namespace geval {

// Normalization ahead of word-level metrics. The conversational-QA
// convention: lowercase, drop punctuation, drop articles, split on
// whitespace. normalize() is idempotent.
struct TokenizationConfig {
  bool lowercase = true;
  bool strip_punct = true;
  bool drop_articles = true;  // a / an / the
};

std::string normalize(const std::string& text, const TokenizationConfig& cfg);
std::vector<std::string> tokenize(const std::string& text,
                                  const TokenizationConfig& cfg);

// UTF-8 decode to code points; invalid bytes pass through as single units.
std::vector<char32_t> utf8_codepoints(const std::string& text);

// Strips whitespace code points, for character n-gram metrics.
std::vector<char32_t> utf8_codepoints_no_ws(const std::string& text);

}  // namespace geval
