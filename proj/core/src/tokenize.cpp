#include "geval/tokenize.hpp"

#include <cctype>
#include <sstream>

namespace geval {

std::string normalize(const std::string& text, const TokenizationConfig& cfg) {
  std::string out;
  out.reserve(text.size());
  for (unsigned char c : text) {
    if (cfg.strip_punct && std::ispunct(c)) {
      out.push_back(' ');
    } else if (cfg.lowercase) {
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      out.push_back(static_cast<char>(c));
    }
  }
  // collapse whitespace, optionally drop articles
  std::istringstream in(out);
  std::string word;
  std::string result;
  while (in >> word) {
    if (cfg.drop_articles && (word == "a" || word == "an" || word == "the")) {
      continue;
    }
    if (!result.empty()) result.push_back(' ');
    result += word;
  }
  return result;
}

std::vector<std::string> tokenize(const std::string& text,
                                  const TokenizationConfig& cfg) {
  std::vector<std::string> tokens;
  std::istringstream in(normalize(text, cfg));
  std::string word;
  while (in >> word) tokens.push_back(word);
  return tokens;
}

std::vector<char32_t> utf8_codepoints(const std::string& text) {
  std::vector<char32_t> cps;
  cps.reserve(text.size());
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    unsigned char b = text[i];
    char32_t cp = b;
    std::size_t len = 1;
    if ((b & 0x80u) == 0) {
      len = 1;
    } else if ((b & 0xE0u) == 0xC0u) {
      len = 2;
      cp = b & 0x1Fu;
    } else if ((b & 0xF0u) == 0xE0u) {
      len = 3;
      cp = b & 0x0Fu;
    } else if ((b & 0xF8u) == 0xF0u) {
      len = 4;
      cp = b & 0x07u;
    }
    if (i + len > n) len = 1, cp = b;
    bool ok = true;
    for (std::size_t k = 1; k < len; ++k) {
      unsigned char cont = text[i + k];
      if ((cont & 0xC0u) != 0x80u) {
        ok = false;
        break;
      }
      cp = (cp << 6) | (cont & 0x3Fu);
    }
    if (!ok) {
      cp = b;
      len = 1;
    }
    cps.push_back(cp);
    i += len;
  }
  return cps;
}

std::vector<char32_t> utf8_codepoints_no_ws(const std::string& text) {
  std::vector<char32_t> cps = utf8_codepoints(text);
  std::vector<char32_t> out;
  out.reserve(cps.size());
  for (char32_t c : cps) {
    if (c == U' ' || c == U'\t' || c == U'\n' || c == U'\r' || c == U'\f' ||
        c == U'\v') {
      continue;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace geval
