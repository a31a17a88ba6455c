#include "latticecws/checkpoint.hpp"

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "latticecws/errors.hpp"
#include "latticecws/utf8.hpp"

namespace latticecws {

namespace fs = std::filesystem;

namespace {

template <typename U>
U to_little(U v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    U out = 0;
    for (std::size_t i = 0; i < sizeof(U); ++i) out |= ((v >> (8 * i)) & 0xff) << (8 * (sizeof(U) - 1 - i));
    return out;
  }
}

std::string hex_real(Real v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%a", v);
  return buf;
}

std::string emissions_line(const Emissions& e) {
  std::string out;
  for (const auto& row : e) {
    for (auto v : row) {
      if (!out.empty()) out.push_back(' ');
      out += hex_real(v);
    }
  }
  return out;
}

void write_lines(const fs::path& path, const std::vector<std::string>& lines) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write '" + path.string() + "'");
  for (const auto& l : lines) out << l << '\n';
  if (!out) throw CheckpointError("write failed for '" + path.string() + "'");
}

std::vector<std::string> read_lines(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("missing checkpoint file '" + path.string() + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) lines.push_back(line);
  return lines;
}

std::string tensor_file_name(const std::string& tensor) { return "tensors/" + tensor + ".bin"; }

std::string shape_string(const std::vector<std::size_t>& shape) {
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s.push_back('x');
    s += std::to_string(shape[i]);
  }
  return s;
}

}  // namespace

void write_tensor_file(const fs::path& path, std::span<const Real> values) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CheckpointError("cannot write '" + path.string() + "'");
  const auto count = to_little(static_cast<std::uint64_t>(values.size()));
  out.write(reinterpret_cast<const char*>(&count), sizeof count);
  for (auto v : values) {
    const auto bits = to_little(std::bit_cast<std::uint32_t>(static_cast<float>(v)));
    out.write(reinterpret_cast<const char*>(&bits), sizeof bits);
  }
  if (!out) throw CheckpointError("write failed for '" + path.string() + "'");
}

std::vector<Real> read_tensor_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("missing tensor file '" + path.string() + "'");
  std::uint64_t count = 0;
  if (!in.read(reinterpret_cast<char*>(&count), sizeof count)) {
    throw CheckpointError("truncated tensor file '" + path.string() + "'");
  }
  count = to_little(count);
  std::vector<Real> values;
  values.reserve(count);
  for (std::uint64_t i = 0; i < count; ++i) {
    std::uint32_t bits = 0;
    if (!in.read(reinterpret_cast<char*>(&bits), sizeof bits)) {
      throw CheckpointError("truncated tensor file '" + path.string() + "'");
    }
    values.push_back(static_cast<Real>(std::bit_cast<float>(to_little(bits))));
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw CheckpointError("trailing bytes in tensor file '" + path.string() + "'");
  }
  return values;
}

void save_checkpoint(Model& model, const fs::path& dir, const WordSet& train_words, const std::u32string& probe) {
  if (probe.empty()) throw UsageError("checkpoint probe sentence must not be empty");
  auto params = model.parameters();
  for (auto* t : params) {
    for (auto& v : t->data()) v = static_cast<Real>(static_cast<float>(v));
  }
  fs::create_directories(dir / "tensors");
  const auto& cfg = model.config();
  std::ostringstream manifest;
  manifest << "format=" << kCheckpointFormat << '\n'
           << "mode=" << to_string(cfg.mode) << '\n'
           << "unigram_vocab=" << model.unigrams().vocab.size() << '\n'
           << "bigram_vocab=" << model.bigrams().vocab.size() << '\n'
           << "lexicon_vocab=" << (model.lexicon_embeddings() ? model.lexicon_embeddings()->vocab.size() : 0) << '\n'
           << "lexicon_symbols=" << (model.lexicon() ? model.lexicon()->symbols.size() : 0) << '\n'
           << "unigram_dim=" << cfg.unigram_dim << '\n'
           << "bigram_dim=" << cfg.bigram_dim << '\n'
           << "lexicon_dim=" << cfg.lexicon_dim << '\n'
           << "hidden=" << cfg.hidden << '\n'
           << "char_dropout=" << hex_real(cfg.char_dropout) << '\n'
           << "lattice_dropout=" << hex_real(cfg.lattice_dropout) << '\n'
           << "max_match_length=" << cfg.max_match_length << '\n';
  for (auto* t : params) {
    manifest << "tensor=" << t->name() << ' ' << tensor_file_name(t->name()) << ' ' << shape_string(t->shape())
             << '\n';
    write_tensor_file(dir / tensor_file_name(t->name()), t->data());
  }
  manifest << "probe_sentence=" << utf8::encode(probe) << '\n'
           << "probe_emissions=" << emissions_line(model.emissions(probe)) << '\n';

  write_lines(dir / "unigrams.vocab", model.unigrams().vocab.symbols());
  write_lines(dir / "bigrams.vocab", model.bigrams().vocab.symbols());
  if (model.lexicon_embeddings()) write_lines(dir / "lexicon.vocab", model.lexicon_embeddings()->vocab.symbols());
  if (model.lexicon()) {
    std::vector<std::string> symbols;
    for (const auto& s : model.lexicon()->symbols) symbols.push_back(utf8::encode(s));
    write_lines(dir / "lexicon.txt", symbols);
  }
  std::vector<std::string> words;
  for (const auto& w : train_words) words.push_back(utf8::encode(w));
  std::sort(words.begin(), words.end());
  write_lines(dir / "train_words.txt", words);

  std::ofstream out(dir / "manifest.txt", std::ios::binary);
  out << manifest.str();
  if (!out) throw CheckpointError("write failed for manifest in '" + dir.string() + "'");
}

LoadedCheckpoint load_checkpoint(const fs::path& dir) {
  std::map<std::string, std::string> kv;
  struct TensorEntry {
    std::string file;
    std::string shape;
  };
  std::map<std::string, TensorEntry> tensors;
  for (const auto& line : read_lines(dir / "manifest.txt")) {
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw CheckpointError("malformed manifest line '" + line + "'");
    const auto key = line.substr(0, eq);
    const auto value = line.substr(eq + 1);
    if (key == "tensor") {
      std::istringstream fields(value);
      std::string name, file, shape;
      if (!(fields >> name >> file >> shape)) throw CheckpointError("malformed tensor entry '" + value + "'");
      tensors[name] = {file, shape};
    } else {
      kv[key] = value;
    }
  }
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw CheckpointError("manifest lacks '" + key + "'");
    return it->second;
  };
  auto get_size = [&](const std::string& key) -> std::size_t {
    try {
      return std::stoull(get(key));
    } catch (const std::invalid_argument&) {
      throw CheckpointError("manifest value for '" + key + "' is not a number");
    }
  };
  if (get("format") != kCheckpointFormat) throw CheckpointError("unsupported checkpoint format '" + get("format") + "'");

  // The manifest tensor list must match the tensors directory exactly.
  std::set<std::string> listed;
  for (const auto& [name, entry] : tensors) listed.insert(fs::path(entry.file).lexically_normal().generic_string());
  std::set<std::string> present;
  if (fs::is_directory(dir / "tensors")) {
    for (const auto& f : fs::directory_iterator(dir / "tensors")) {
      present.insert(fs::relative(f.path(), dir).lexically_normal().generic_string());
    }
  }
  if (listed != present) throw CheckpointError("manifest tensor list does not match files in '" + dir.string() + "/tensors'");

  ModelConfig cfg;
  try {
    cfg.mode = parse_mode(get("mode"));
  } catch (const ConfigError& e) {
    throw CheckpointError(e.what());
  }
  cfg.unigram_dim = get_size("unigram_dim");
  cfg.bigram_dim = get_size("bigram_dim");
  cfg.lexicon_dim = get_size("lexicon_dim");
  cfg.hidden = get_size("hidden");
  cfg.char_dropout = std::strtod(get("char_dropout").c_str(), nullptr);
  cfg.lattice_dropout = std::strtod(get("lattice_dropout").c_str(), nullptr);
  cfg.max_match_length = get_size("max_match_length");

  auto load_vocab = [&](const char* file, const char* key) {
    const auto lines = read_lines(dir / file);
    Vocab v;
    try {
      v = Vocab::from_symbols(lines);
    } catch (const DataError& e) {
      throw CheckpointError(std::string(file) + ": " + e.what());
    }
    if (v.size() != get_size(key)) {
      throw CheckpointError(std::string(file) + " holds " + std::to_string(v.size()) + " symbols, manifest says " +
                            get(key));
    }
    return v;
  };

  Rng rng(0);
  auto unigrams = EmbeddingTable::random("emb.unigram", load_vocab("unigrams.vocab", "unigram_vocab"), cfg.unigram_dim, rng);
  auto bigrams = EmbeddingTable::random("emb.bigram", load_vocab("bigrams.vocab", "bigram_vocab"), cfg.bigram_dim, rng);
  std::optional<Lexicon> lexicon;
  std::optional<EmbeddingTable> lexicon_table;
  if (cfg.lattice()) {
    std::vector<std::u32string> symbols;
    for (const auto& s : read_lines(dir / "lexicon.txt")) symbols.push_back(utf8::decode(s));
    lexicon = make_lexicon(symbols);
    if (lexicon->symbols.size() != get_size("lexicon_symbols")) throw CheckpointError("lexicon.txt size differs from manifest");
    lexicon_table = EmbeddingTable::random("emb.lexicon", load_vocab("lexicon.vocab", "lexicon_vocab"), cfg.lexicon_dim, rng);
  }
  LoadedCheckpoint out;
  try {
    out.model = Model::create(cfg, std::move(unigrams), std::move(bigrams), std::move(lexicon), std::move(lexicon_table), rng);
  } catch (const Error& e) {
    throw CheckpointError(std::string("checkpoint does not describe a valid model: ") + e.what());
  }

  auto params = out.model.parameters();
  if (params.size() != tensors.size()) throw CheckpointError("manifest lists " + std::to_string(tensors.size()) + " tensors, model has " + std::to_string(params.size()));
  for (auto* t : params) {
    auto it = tensors.find(t->name());
    if (it == tensors.end()) throw CheckpointError("manifest lacks tensor '" + t->name() + "'");
    if (it->second.shape != shape_string(t->shape())) {
      throw CheckpointError("tensor '" + t->name() + "' has shape " + it->second.shape + ", expected " + shape_string(t->shape()));
    }
    const auto values = read_tensor_file(dir / it->second.file);
    if (values.size() != t->size()) throw CheckpointError("tensor file for '" + t->name() + "' has the wrong length");
    std::copy(values.begin(), values.end(), t->data().begin());
  }

  for (const auto& w : read_lines(dir / "train_words.txt")) out.train_words.insert(utf8::decode(w));

  const auto probe = utf8::decode(get("probe_sentence"));
  if (emissions_line(out.model.emissions(probe)) != get("probe_emissions")) {
    throw CheckpointError("probe sentence output differs from the manifest record");
  }
  return out;
}

}  // namespace latticecws
