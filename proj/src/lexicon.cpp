#include "latticecws/lexicon.hpp"

#include <fstream>

#include "latticecws/errors.hpp"
#include "latticecws/utf8.hpp"

namespace latticecws {

Trie::Trie() : terminal_{kNoEntry} {}

std::optional<std::uint32_t> Trie::child(std::uint32_t node, char32_t c) const {
  auto it = edges_.find(edge_key(node, c));
  if (it == edges_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::uint32_t> Trie::find(std::u32string_view symbol) const {
  std::uint32_t node = kRoot;
  for (auto c : symbol) {
    auto next = child(node, c);
    if (!next) return std::nullopt;
    node = *next;
  }
  if (terminal_[node] == kNoEntry) return std::nullopt;
  return terminal_[node];
}

Trie build_trie(std::span<const std::u32string> symbols) {
  Trie trie;
  for (const auto& s : symbols) {
    if (s.size() < 2) {
      ++trie.rejected_;
      continue;
    }
    std::uint32_t node = Trie::kRoot;
    for (auto c : s) {
      auto [it, inserted] = trie.edges_.try_emplace(Trie::edge_key(node, c),
                                                    static_cast<std::uint32_t>(trie.terminal_.size()));
      if (inserted) trie.terminal_.push_back(Trie::kNoEntry);
      node = it->second;
    }
    if (trie.terminal_[node] == Trie::kNoEntry) {
      trie.terminal_[node] = static_cast<std::uint32_t>(trie.entries_.size());
      trie.entries_.push_back(s);
    }
  }
  return trie;
}

LatticeMatchSet match_sentence(const Trie& trie, std::u32string_view chars, std::size_t max_length) {
  LatticeMatchSet out;
  out.by_end.resize(chars.size());
  out.by_begin.resize(chars.size());
  for (std::size_t b = 0; b < chars.size(); ++b) {
    std::uint32_t node = Trie::kRoot;
    for (std::size_t e = b; e < chars.size(); ++e) {
      if (max_length && e - b + 1 > max_length) break;
      auto next = trie.child(node, chars[e]);
      if (!next) break;
      node = *next;
      const auto id = trie.entry_at(node);
      if (id == Trie::kNoEntry) continue;
      out.by_end[e].push_back(out.matches.size());
      out.by_begin[b].push_back(out.matches.size());
      out.matches.push_back({b, e, id});
    }
  }
  return out;
}

Lexicon make_lexicon(std::span<const std::u32string> symbols) {
  Lexicon lex;
  for (const auto& s : symbols) {
    if (s.empty()) continue;
    if (lex.symbol_set.insert(s).second) lex.symbols.push_back(s);
  }
  lex.trie = build_trie(lex.symbols);
  return lex;
}

Lexicon read_lexicon_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open lexicon '" + path.string() + "'");
  std::vector<std::u32string> symbols;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto tab = line.find('\t'); tab != std::string::npos) line.resize(tab);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    try {
      symbols.push_back(utf8::decode(line));
    } catch (const DataError& e) {
      throw DataError(path.string() + ": " + e.what() + " on line " + std::to_string(line_no));
    }
  }
  return make_lexicon(symbols);
}

}  // namespace latticecws
