#include "geval/ingest.hpp"

#include <algorithm>

namespace geval {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ull;
  }
  return h;
}

}  // namespace

Corpus sample_fewshot(const Corpus& corpus, const FewShotSpec& spec) {
  if (spec.k > corpus.dialogs.size()) {
    throw InsufficientDialogs(spec.k, corpus.dialogs.size());
  }

  // Counter-based shuffle over lexicographically sorted ids so the result
  // does not depend on the input file's dialog order.
  std::vector<std::string> ids;
  ids.reserve(corpus.dialogs.size());
  for (const auto& d : corpus.dialogs) ids.push_back(d.dialog_id);
  std::sort(ids.begin(), ids.end());

  std::vector<std::pair<std::uint64_t, const std::string*>> keyed;
  keyed.reserve(ids.size());
  for (const auto& id : ids) {
    keyed.emplace_back(splitmix64(spec.seed ^ fnv1a(id)), &id);
  }
  std::sort(keyed.begin(), keyed.end(),
            [](const auto& a, const auto& b) {
              return a.first != b.first ? a.first < b.first
                                        : *a.second < *b.second;
            });

  std::set<std::string> chosen;
  for (std::size_t i = 0; i < spec.k; ++i) chosen.insert(*keyed[i].second);

  Corpus out;
  out.source_tag = corpus.source_tag;
  for (const auto& d : corpus.dialogs) {
    if (chosen.count(d.dialog_id)) out.dialogs.push_back(d);
  }
  return out;
}

}  // namespace geval
