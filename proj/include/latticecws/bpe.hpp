#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace latticecws {

struct BpeMerge {
  std::string left;
  std::string right;
  friend bool operator==(const BpeMerge&, const BpeMerge&) = default;
};

// Ordered merge list plus the symbol inventory it produced.
//
// `vocab` maps single characters to their corpus count and every merged
// symbol to the number of merges that created it. A model read back from a
// file carries merges only.
class BpeModel {
 public:
  void add_merge(std::string left, std::string right);
  const std::vector<BpeMerge>& merges() const noexcept { return merges_; }
  std::size_t merge_count() const noexcept { return merges_.size(); }
  std::optional<std::size_t> rank(std::string_view left, std::string_view right) const;

  std::map<std::string, std::size_t> vocab;

 private:
  std::vector<BpeMerge> merges_;
  std::unordered_map<std::string, std::size_t> rank_;
};

// Greedy BPE over characters. Each step merges the globally most frequent
// adjacent pair (ties: smallest (left, right) strings), never across lines,
// and stops early once the best pair occurs fewer than two times.
BpeModel learn_bpe(std::span<const std::u32string> corpus, std::size_t max_merges);

// Replays the merges in order. Unknown characters stay single symbols.
std::vector<std::string> apply_bpe(const BpeModel& model, std::u32string_view sentence);

struct LexiconEntry {
  std::string symbol;
  std::size_t frequency = 0;
  friend bool operator==(const LexiconEntry&, const LexiconEntry&) = default;
};

// Multi-character symbols by descending frequency, then lexicographically.
std::vector<LexiconEntry> extract_lexicon(const BpeModel& model);

inline constexpr std::size_t kDefaultBpeMerges = 10000;

void save_bpe_model(const BpeModel& model, const std::filesystem::path& path);
BpeModel load_bpe_model(const std::filesystem::path& path);
void save_lexicon(std::span<const LexiconEntry> entries, const std::filesystem::path& path);

}  // namespace latticecws
