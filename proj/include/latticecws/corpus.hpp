#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace latticecws {

enum class Tag : std::uint8_t { B = 0, M = 1, E = 2, S = 3 };
inline constexpr std::size_t kNumTags = 4;

char tag_char(Tag t);

struct LabeledSentence {
  std::u32string chars;
  std::vector<Tag> labels;
};

// Half-open character span [begin, end).
struct Span {
  std::size_t begin = 0;
  std::size_t end = 0;
  friend bool operator==(const Span&, const Span&) = default;
  friend auto operator<=>(const Span&, const Span&) = default;
};

// Words to BMES tags. `line` only feeds error messages.
LabeledSentence to_bmes(std::span<const std::u32string> words, std::size_t line = 0);

// Decodes tags into word spans. Total: a tag that cannot continue the open
// word closes it and starts a new one; M and E with no open word behave as
// B and S.
std::vector<Span> bmes_spans(std::span<const Tag> labels);
std::vector<std::u32string> from_bmes(std::u32string_view chars, std::span<const Tag> labels);

// One sentence per line, words separated by single spaces, blank lines skipped.
std::vector<LabeledSentence> read_segmented(std::istream& in);
std::vector<LabeledSentence> read_segmented_file(const std::filesystem::path& path);

// Raw text lines decoded to characters. Empty lines are kept.
std::vector<std::u32string> read_raw_lines(const std::filesystem::path& path);

std::vector<std::u32string> words_of(const LabeledSentence& s);
std::string join_words(std::span<const std::u32string> words);

}  // namespace latticecws
