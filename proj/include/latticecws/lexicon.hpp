#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace latticecws {

// Character trie over multi-character lexicon symbols. Immutable once built.
class Trie {
 public:
  static constexpr std::uint32_t kRoot = 0;
  static constexpr std::uint32_t kNoEntry = 0xffffffffu;

  Trie();

  std::size_t node_count() const noexcept { return terminal_.size(); }
  std::size_t entry_count() const noexcept { return entries_.size(); }
  // Entry ids are dense: entry(i) is the i-th distinct symbol inserted.
  const std::u32string& entry(std::size_t id) const { return entries_.at(id); }
  const std::vector<std::u32string>& entries() const noexcept { return entries_; }
  // Number of length-1 symbols rejected during construction.
  std::size_t rejected() const noexcept { return rejected_; }

  std::optional<std::uint32_t> child(std::uint32_t node, char32_t c) const;
  // kNoEntry when `node` is not terminal.
  std::uint32_t entry_at(std::uint32_t node) const { return terminal_[node]; }
  std::optional<std::uint32_t> find(std::u32string_view symbol) const;

 private:
  friend Trie build_trie(std::span<const std::u32string> symbols);

  static std::uint64_t edge_key(std::uint32_t node, char32_t c) {
    return (static_cast<std::uint64_t>(node) << 32) | static_cast<std::uint32_t>(c);
  }

  std::unordered_map<std::uint64_t, std::uint32_t> edges_;
  std::vector<std::uint32_t> terminal_;
  std::vector<std::u32string> entries_;
  std::size_t rejected_ = 0;
};

// Symbols shorter than two characters are rejected and counted; duplicates collapse.
Trie build_trie(std::span<const std::u32string> symbols);

// One matched subsequence, 0-based inclusive [begin, end].
struct Match {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::uint32_t entry = 0;
  friend bool operator==(const Match&, const Match&) = default;
  friend auto operator<=>(const Match&, const Match&) = default;
};

struct LatticeMatchSet {
  std::vector<Match> matches;                    // ordered by (begin, end)
  std::vector<std::vector<std::size_t>> by_end;  // per position, indices into `matches`
  std::vector<std::vector<std::size_t>> by_begin;
};

// Every lexicon subsequence of length >= 2 (up to `max_length` characters
// when nonzero), found by walking the trie from each start position.
LatticeMatchSet match_sentence(const Trie& trie, std::u32string_view chars, std::size_t max_length = 0);

// Full symbol set plus the trie of its multi-character members.
struct Lexicon {
  std::vector<std::u32string> symbols;  // file order, deduplicated, all lengths
  std::unordered_set<std::u32string> symbol_set;
  Trie trie;

  bool contains(std::u32string_view s) const { return symbol_set.contains(std::u32string(s)); }
};

Lexicon make_lexicon(std::span<const std::u32string> symbols);
// One symbol per line; anything after a tab is ignored.
Lexicon read_lexicon_file(const std::filesystem::path& path);

}  // namespace latticecws
