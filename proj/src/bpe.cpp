#include "latticecws/bpe.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>

#include "latticecws/errors.hpp"
#include "latticecws/utf8.hpp"

namespace latticecws {

namespace {

std::string rank_key(std::string_view left, std::string_view right) {
  std::string key = std::to_string(left.size());
  key.push_back(':');
  key += left;
  key += right;
  return key;
}

// Symbol strings interned to dense ids.
class SymbolTable {
 public:
  std::uint32_t intern(const std::string& s) {
    auto [it, inserted] = ids_.try_emplace(s, static_cast<std::uint32_t>(strings_.size()));
    if (inserted) strings_.push_back(s);
    return it->second;
  }
  const std::string& str(std::uint32_t id) const { return strings_[id]; }

 private:
  std::vector<std::string> strings_;
  std::unordered_map<std::string, std::uint32_t> ids_;
};

using PairKey = std::uint64_t;

PairKey pair_key(std::uint32_t l, std::uint32_t r) { return (static_cast<PairKey>(l) << 32) | r; }
std::uint32_t left_of(PairKey k) { return static_cast<std::uint32_t>(k >> 32); }
std::uint32_t right_of(PairKey k) { return static_cast<std::uint32_t>(k & 0xffffffffu); }

struct Occurrence {
  std::uint32_t line;
  std::uint32_t pos;
  friend auto operator<=>(const Occurrence&, const Occurrence&) = default;
};

constexpr std::uint32_t kNone = 0xffffffffu;

struct Line {
  std::vector<std::uint32_t> sym;
  std::vector<std::uint32_t> prev;
  std::vector<std::uint32_t> next;
};

class PairIndex {
 public:
  explicit PairIndex(const SymbolTable& symbols)
      : symbols_(symbols), order_(Order{&symbols}) {}

  void add(PairKey k, std::int64_t delta) {
    auto& c = counts_[k];
    if (c > 0) order_.erase({c, k});
    c += delta;
    if (c > 0) order_.insert({c, k});
  }
  void record(PairKey k, Occurrence occ) { occurrences_[k].push_back(occ); }

  std::optional<std::pair<std::int64_t, PairKey>> best() const {
    if (order_.empty()) return std::nullopt;
    return *order_.begin();
  }

  std::vector<Occurrence> take_occurrences(PairKey k) {
    auto node = occurrences_.extract(k);
    if (node.empty()) return {};
    auto occ = std::move(node.mapped());
    std::sort(occ.begin(), occ.end());
    occ.erase(std::unique(occ.begin(), occ.end()), occ.end());
    return occ;
  }

 private:
  struct Order {
    const SymbolTable* symbols;
    bool operator()(const std::pair<std::int64_t, PairKey>& a, const std::pair<std::int64_t, PairKey>& b) const {
      if (a.first != b.first) return a.first > b.first;
      if (a.second == b.second) return false;
      const auto& al = symbols->str(left_of(a.second));
      const auto& bl = symbols->str(left_of(b.second));
      if (al != bl) return al < bl;
      return symbols->str(right_of(a.second)) < symbols->str(right_of(b.second));
    }
  };

  const SymbolTable& symbols_;
  std::unordered_map<PairKey, std::int64_t> counts_;
  std::unordered_map<PairKey, std::vector<Occurrence>> occurrences_;
  std::set<std::pair<std::int64_t, PairKey>, Order> order_;
};

}  // namespace

void BpeModel::add_merge(std::string left, std::string right) {
  rank_.try_emplace(rank_key(left, right), merges_.size());
  merges_.push_back({std::move(left), std::move(right)});
}

std::optional<std::size_t> BpeModel::rank(std::string_view left, std::string_view right) const {
  auto it = rank_.find(rank_key(left, right));
  if (it == rank_.end()) return std::nullopt;
  return it->second;
}

BpeModel learn_bpe(std::span<const std::u32string> corpus, std::size_t max_merges) {
  BpeModel model;
  SymbolTable symbols;
  PairIndex pairs(symbols);
  std::vector<Line> lines(corpus.size());

  for (std::size_t li = 0; li < corpus.size(); ++li) {
    const auto& text = corpus[li];
    auto& line = lines[li];
    const auto n = static_cast<std::uint32_t>(text.size());
    line.sym.resize(n);
    line.prev.resize(n);
    line.next.resize(n);
    for (std::uint32_t i = 0; i < n; ++i) {
      const auto s = utf8::encode(text[i]);
      line.sym[i] = symbols.intern(s);
      ++model.vocab[s];
      line.prev[i] = i == 0 ? kNone : i - 1;
      line.next[i] = i + 1 == n ? kNone : i + 1;
    }
    for (std::uint32_t i = 0; i + 1 < n; ++i) {
      const auto k = pair_key(line.sym[i], line.sym[i + 1]);
      pairs.add(k, 1);
      pairs.record(k, {static_cast<std::uint32_t>(li), i});
    }
  }

  while (model.merge_count() < max_merges) {
    const auto best = pairs.best();
    if (!best || best->first < 2) break;
    const auto key = best->second;
    const auto left = left_of(key);
    const auto right = right_of(key);
    const auto merged_str = symbols.str(left) + symbols.str(right);
    const auto merged = symbols.intern(merged_str);
    std::size_t performed = 0;

    for (const auto& occ : pairs.take_occurrences(key)) {
      auto& line = lines[occ.line];
      const auto p = occ.pos;
      // Stale entries: the position was absorbed or its neighbourhood changed.
      if (line.sym[p] != left) continue;
      const auto q = line.next[p];
      if (q == kNone || line.sym[q] != right) continue;
      if (line.prev[q] != p) continue;

      const auto before = line.prev[p];
      const auto after = line.next[q];
      pairs.add(key, -1);
      if (before != kNone) {
        pairs.add(pair_key(line.sym[before], left), -1);
        const auto k = pair_key(line.sym[before], merged);
        pairs.add(k, 1);
        pairs.record(k, {occ.line, before});
      }
      if (after != kNone) {
        pairs.add(pair_key(right, line.sym[after]), -1);
        const auto k = pair_key(merged, line.sym[after]);
        pairs.add(k, 1);
        pairs.record(k, {occ.line, p});
      }
      line.sym[p] = merged;
      line.next[p] = after;
      if (after != kNone) line.prev[after] = p;
      // q is unlinked; poison it so stale occurrences starting at q fail.
      line.sym[q] = kNone;
      line.prev[q] = kNone;
      line.next[q] = kNone;
      ++performed;
    }
    model.add_merge(symbols.str(left), symbols.str(right));
    model.vocab[merged_str] += performed;
  }
  return model;
}

std::vector<std::string> apply_bpe(const BpeModel& model, std::u32string_view sentence) {
  std::vector<std::string> seq;
  seq.reserve(sentence.size());
  for (auto c : sentence) seq.push_back(utf8::encode(c));

  // Executing the lowest-ranked present merge above the last executed rank
  // is the same as replaying every merge in order: merges whose pair is
  // absent at their turn are no-ops either way.
  std::optional<std::size_t> last;
  while (seq.size() > 1) {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i + 1 < seq.size(); ++i) {
      auto r = model.rank(seq[i], seq[i + 1]);
      if (!r || (last && *r <= *last)) continue;
      if (!best || *r < *best) best = r;
    }
    if (!best) break;
    const auto& m = model.merges()[*best];
    std::vector<std::string> next;
    next.reserve(seq.size());
    for (std::size_t i = 0; i < seq.size();) {
      if (i + 1 < seq.size() && seq[i] == m.left && seq[i + 1] == m.right) {
        next.push_back(m.left + m.right);
        i += 2;
      } else {
        next.push_back(std::move(seq[i]));
        ++i;
      }
    }
    seq = std::move(next);
    last = best;
  }
  return seq;
}

std::vector<LexiconEntry> extract_lexicon(const BpeModel& model) {
  std::vector<LexiconEntry> out;
  for (const auto& [symbol, freq] : model.vocab) {
    if (freq == 0 || utf8::decode(symbol).size() < 2) continue;
    out.push_back({symbol, freq});
  }
  std::sort(out.begin(), out.end(), [](const LexiconEntry& a, const LexiconEntry& b) {
    if (a.frequency != b.frequency) return a.frequency > b.frequency;
    return a.symbol < b.symbol;
  });
  return out;
}

void save_bpe_model(const BpeModel& model, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << "bpe-v1 " << model.merge_count() << '\n';
  for (const auto& m : model.merges()) out << m.left << '\t' << m.right << '\n';
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

BpeModel load_bpe_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open '" + path.string() + "'");
  std::string header;
  std::getline(in, header);
  std::istringstream hs(header);
  std::string magic;
  std::size_t count = 0;
  if (!(hs >> magic >> count) || magic != "bpe-v1") {
    throw DataError(path.string() + ": missing 'bpe-v1 <merge_count>' header");
  }
  BpeModel model;
  std::string line;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 == line.size()) {
      throw DataError(path.string() + ": malformed merge on line " + std::to_string(line_no));
    }
    model.add_merge(line.substr(0, tab), line.substr(tab + 1));
  }
  if (model.merge_count() != count) {
    throw DataError(path.string() + ": header announces " + std::to_string(count) + " merges, found " +
                    std::to_string(model.merge_count()));
  }
  return model;
}

void save_lexicon(std::span<const LexiconEntry> entries, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  for (const auto& e : entries) out << e.symbol << '\t' << e.frequency << '\n';
  if (!out) throw DataError("write failed for '" + path.string() + "'");
}

}  // namespace latticecws
