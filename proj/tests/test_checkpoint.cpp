#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "latticecws/checkpoint.hpp"
#include "latticecws/errors.hpp"
#include "support/models.hpp"
#include "support/synthetic.hpp"

using namespace latticecws;
namespace fs = std::filesystem;
namespace lt = latticecws::testing;

namespace {

fs::path fresh_dir(const std::string& name) {
  auto d = fs::temp_directory_path() / "latticecws_test_checkpoint" / name;
  fs::remove_all(d);
  fs::create_directories(d.parent_path());
  return d;
}

lt::SyntheticCorpus corpus() {
  lt::SyntheticSpec spec;
  spec.sentences = 40;
  spec.vocabulary = 25;
  spec.char_pool = 15;
  return lt::make_synthetic_corpus(spec);
}

void replace_in_file(const fs::path& p, const std::string& from, const std::string& to) {
  std::ifstream in(p, std::ios::binary);
  std::string s((std::istreambuf_iterator<char>(in)), {});
  const auto pos = s.find(from);
  REQUIRE(pos != std::string::npos);
  s.replace(pos, from.size(), to);
  std::ofstream(p, std::ios::binary) << s;
}

}  // namespace

TEST_CASE("tensor files") {
  const auto d = fresh_dir("tensor");
  fs::create_directories(d);
  const std::vector<Real> v{1.5, -2.25, 0.0, 3.0e-5};
  write_tensor_file(d / "t.bin", v);
  CHECK(fs::file_size(d / "t.bin") == 8 + 4 * v.size());
  {
    std::ifstream in(d / "t.bin", std::ios::binary);
    unsigned char len[8];
    in.read(reinterpret_cast<char*>(len), 8);
    CHECK(len[0] == 4);
    for (int i = 1; i < 8; ++i) CHECK(len[i] == 0);
  }
  const auto back = read_tensor_file(d / "t.bin");
  REQUIRE(back.size() == v.size());
  for (std::size_t i = 0; i < v.size(); ++i) CHECK(back[i] == static_cast<Real>(static_cast<float>(v[i])));

  fs::resize_file(d / "t.bin", 8 + 4 * 3);
  CHECK_THROWS_AS(read_tensor_file(d / "t.bin"), CheckpointError);
  write_tensor_file(d / "t.bin", v);
  std::ofstream(d / "t.bin", std::ios::binary | std::ios::app) << 'x';
  CHECK_THROWS_AS(read_tensor_file(d / "t.bin"), CheckpointError);
}

TEST_CASE("save and load reproduce the forward pass bit for bit") {
  const auto c = corpus();
  for (auto mode : {ModelMode::baseline, ModelMode::lattice_word, ModelMode::lattice_subword}) {
    CAPTURE(to_string(mode));
    Rng rng(5);
    auto model = lt::make_model(lt::small_config(mode, 5, 4), c.train, c.vocabulary, rng);
    const auto d = fresh_dir(std::string(to_string(mode)));
    save_checkpoint(model, d, training_words(c.train), c.train[0].chars);
    CHECK(fs::exists(d / "manifest.txt"));
    auto loaded = load_checkpoint(d);
    CHECK(loaded.train_words == training_words(c.train));
    CHECK(loaded.model.config().mode == mode);
    for (const auto& s : c.dev) {
      CHECK(loaded.model.emissions(s.chars) == model.emissions(s.chars));
      CHECK(loaded.model.decode(s.chars).labels == model.decode(s.chars).labels);
    }
  }
}

TEST_CASE("same model saves to identical bytes") {
  const auto c = corpus();
  auto save = [&](const std::string& name) {
    Rng rng(5);
    auto model = lt::make_model(lt::small_config(ModelMode::lattice_word, 5, 4), c.train, c.vocabulary, rng);
    const auto d = fresh_dir(name);
    save_checkpoint(model, d, training_words(c.train), c.train[0].chars);
    return d;
  };
  const auto a = save("same_a");
  const auto b = save("same_b");
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), a);
    std::ifstream fa(entry.path(), std::ios::binary);
    std::ifstream fb(b / rel, std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(fa)), {});
    const std::string sb((std::istreambuf_iterator<char>(fb)), {});
    CHECK_MESSAGE(sa == sb, rel.string());
  }
}

TEST_CASE("corrupted checkpoints are rejected") {
  const auto c = corpus();
  Rng rng(5);
  auto model = lt::make_model(lt::small_config(ModelMode::lattice_word, 5, 4), c.train, c.vocabulary, rng);
  auto fresh = [&](const std::string& name) {
    const auto d = fresh_dir(name);
    save_checkpoint(model, d, training_words(c.train), c.train[0].chars);
    return d;
  };

  SUBCASE("missing tensor file") {
    const auto d = fresh("missing");
    fs::remove(d / "tensors" / "crf.transitions.bin");
    CHECK_THROWS_AS(load_checkpoint(d), CheckpointError);
  }
  SUBCASE("unlisted tensor file") {
    const auto d = fresh("extra");
    fs::copy_file(d / "tensors" / "crf.transitions.bin", d / "tensors" / "stray.bin");
    CHECK_THROWS_AS(load_checkpoint(d), CheckpointError);
  }
  SUBCASE("changed parameter value") {
    const auto d = fresh("value");
    auto v = read_tensor_file(d / "tensors" / "crf.emission_b.bin");
    v[0] += 0.5;
    write_tensor_file(d / "tensors" / "crf.emission_b.bin", v);
    CHECK_THROWS_AS(load_checkpoint(d), CheckpointError);
  }
  SUBCASE("wrong tensor length") {
    const auto d = fresh("length");
    write_tensor_file(d / "tensors" / "crf.emission_b.bin", std::vector<Real>{1, 2, 3});
    CHECK_THROWS_AS(load_checkpoint(d), CheckpointError);
  }
  SUBCASE("vocabulary mismatch") {
    const auto d = fresh("vocab");
    std::ofstream(d / "unigrams.vocab", std::ios::app) << "extra\n";
    CHECK_THROWS_AS(load_checkpoint(d), CheckpointError);
  }
  SUBCASE("unknown format") {
    const auto d = fresh("format");
    replace_in_file(d / "manifest.txt", "latticecws-checkpoint-v1", "latticecws-checkpoint-v0");
    CHECK_THROWS_AS(load_checkpoint(d), CheckpointError);
  }
  SUBCASE("not a checkpoint") {
    CHECK_THROWS_AS(load_checkpoint(fresh_dir("nothing")), CheckpointError);
  }
  try {
    load_checkpoint(fresh_dir("code"));
  } catch (const Error& e) {
    CHECK(e.code() == ExitCode::data);
  }
}
