#include "latticecws/corpus.hpp"

#include <fstream>
#include <istream>

#include "latticecws/errors.hpp"
#include "latticecws/utf8.hpp"

namespace latticecws {

char tag_char(Tag t) {
  static constexpr char kChars[] = {'B', 'M', 'E', 'S'};
  return kChars[static_cast<std::size_t>(t)];
}

LabeledSentence to_bmes(std::span<const std::u32string> words, std::size_t line) {
  LabeledSentence out;
  for (const auto& w : words) {
    if (w.empty()) throw DataError("empty word on line " + std::to_string(line));
    out.chars += w;
    if (w.size() == 1) {
      out.labels.push_back(Tag::S);
      continue;
    }
    out.labels.push_back(Tag::B);
    out.labels.insert(out.labels.end(), w.size() - 2, Tag::M);
    out.labels.push_back(Tag::E);
  }
  return out;
}

std::vector<Span> bmes_spans(std::span<const Tag> labels) {
  std::vector<Span> spans;
  bool open = false;
  std::size_t start = 0;
  auto close = [&](std::size_t end) {
    spans.push_back({start, end});
    open = false;
  };
  for (std::size_t i = 0; i < labels.size(); ++i) {
    switch (labels[i]) {
      case Tag::B:
        if (open) close(i);
        open = true;
        start = i;
        break;
      case Tag::M:
        if (!open) {
          open = true;
          start = i;
        }
        break;
      case Tag::E:
        if (!open) start = i;
        open = true;
        close(i + 1);
        break;
      case Tag::S:
        if (open) close(i);
        start = i;
        close(i + 1);
        break;
    }
  }
  if (open) close(labels.size());
  return spans;
}

std::vector<std::u32string> from_bmes(std::u32string_view chars, std::span<const Tag> labels) {
  if (chars.size() != labels.size()) {
    throw DimensionError("from_bmes: " + std::to_string(chars.size()) + " characters but " +
                         std::to_string(labels.size()) + " labels");
  }
  std::vector<std::u32string> words;
  for (const auto& s : bmes_spans(labels)) words.emplace_back(chars.substr(s.begin, s.end - s.begin));
  return words;
}

namespace {

std::string_view trim(std::string_view s) {
  constexpr std::string_view kSpace = " \t\r\n\f\v";
  const auto b = s.find_first_not_of(kSpace);
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(kSpace);
  return s.substr(b, e - b + 1);
}

std::ifstream open_or_throw(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  return in;
}

}  // namespace

std::vector<LabeledSentence> read_segmented(std::istream& in) {
  std::vector<LabeledSentence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(line);
    if (body.empty()) continue;
    std::vector<std::u32string> words;
    std::size_t pos = 0;
    while (true) {
      const auto next = body.find(' ', pos);
      const auto token = body.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos);
      try {
        words.push_back(utf8::decode(token));
      } catch (const DataError& e) {
        throw DataError(std::string(e.what()) + " on line " + std::to_string(line_no));
      }
      if (next == std::string_view::npos) break;
      pos = next + 1;
    }
    out.push_back(to_bmes(words, line_no));
  }
  return out;
}

std::vector<LabeledSentence> read_segmented_file(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  try {
    return read_segmented(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::vector<std::u32string> read_raw_lines(const std::filesystem::path& path) {
  auto in = open_or_throw(path);
  std::vector<std::u32string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      out.push_back(utf8::decode(trim(line)));
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what() + " on line " + std::to_string(line_no));
    }
  }
  return out;
}

std::vector<std::u32string> words_of(const LabeledSentence& s) { return from_bmes(s.chars, s.labels); }

std::string join_words(std::span<const std::u32string> words) {
  std::string out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) out.push_back(' ');
    out += utf8::encode(words[i]);
  }
  return out;
}

}  // namespace latticecws
