#pragma once

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "mind/error.hpp"
#include "mind/keyboard.hpp"

namespace mind {

inline std::string to_lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

// Word -> frequency. Words are stored lowercase; counts are positive.
class Dictionary {
 public:
  Dictionary() = default;
  Dictionary(std::initializer_list<std::pair<std::string, std::uint64_t>> entries) {
    for (const auto& [w, c] : entries) add(w, c);
  }

  // Adds `count` to the word's frequency.
  void add(std::string_view word, std::uint64_t count = 1) {
    if (word.empty()) throw InputError("dictionary word must be non-empty");
    if (count == 0) throw InputError("dictionary count must be positive");
    entries_[to_lower(word)] += count;
  }

  const std::map<std::string, std::uint64_t, std::less<>>& entries() const { return entries_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  friend bool operator==(const Dictionary&, const Dictionary&) = default;

 private:
  std::map<std::string, std::uint64_t, std::less<>> entries_;
};

// Up to k words starting with `prefix` (case-insensitive), by descending
// frequency, ties alphabetical.
inline std::vector<std::string> predict(std::string_view prefix, const Dictionary& dict,
                                        std::size_t k) {
  if (k == 0) throw InputError("k must be positive");
  const auto p = to_lower(prefix);
  std::vector<std::pair<std::uint64_t, std::string_view>> hits;
  // Entries are sorted, so the prefix range is contiguous.
  for (auto it = dict.entries().lower_bound(p); it != dict.entries().end(); ++it) {
    if (it->first.compare(0, p.size(), p) != 0) break;
    hits.emplace_back(it->second, it->first);
  }
  const auto n = std::min(k, hits.size());
  std::partial_sort(hits.begin(), hits.begin() + static_cast<std::ptrdiff_t>(n), hits.end(),
                    [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < n; ++i) out.emplace_back(hits[i].second);
  return out;
}

// Keys that complete the rank-th candidate for `prefix`, followed by SPACE.
// nullopt when no candidate sits at that rank (the slot is unbound).
inline std::optional<KeySequence> resolve_prediction(std::size_t rank, std::string_view prefix,
                                                     const Dictionary& dict) {
  if (rank >= kPredictionSlots) throw InputError("prediction rank out of range");
  auto words = predict(prefix, dict, kPredictionSlots);
  if (rank >= words.size()) return std::nullopt;
  KeySequence seq;
  seq.name = words[rank];
  for (std::size_t i = prefix.size(); i < words[rank].size(); ++i) {
    seq.keys.push_back(key_for_char(words[rank][i]));
  }
  seq.keys.push_back("SPACE");
  return seq;
}

// Dictionary file: `word<TAB>count` per line.
inline Dictionary read_dictionary(std::istream& is) {
  Dictionary d;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    std::uint64_t count = 0;
    const char* b = line.data() + (tab == std::string::npos ? 0 : tab + 1);
    const char* e = line.data() + line.size();
    auto r = std::from_chars(b, e, count);
    if (tab == std::string::npos || tab == 0 || r.ec != std::errc{} || r.ptr != e || count == 0) {
      throw ParseError("dictionary line " + std::to_string(lineno) + ": expected word<TAB>count");
    }
    d.add(std::string_view(line).substr(0, tab), count);
  }
  return d;
}

inline void write_dictionary(std::ostream& os, const Dictionary& d) {
  for (const auto& [w, c] : d.entries()) os << w << '\t' << c << '\n';
}

}  // namespace mind
