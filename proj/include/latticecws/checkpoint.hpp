#pragma once

#include <filesystem>
#include <string>

#include "latticecws/metrics.hpp"
#include "latticecws/model.hpp"

namespace latticecws {

// On-disk model: a plain-text manifest, vocabulary and lexicon lists, and
// one raw file per parameter tensor (u64 little-endian value count followed
// by little-endian float32 values, row-major).
//
// Saving rounds every parameter to float32 in place, so the in-memory model
// and a reloaded one produce identical outputs. The manifest records the
// emission scores of a probe sentence; loading recomputes and compares them
// bit for bit.
inline constexpr std::string_view kCheckpointFormat = "latticecws-checkpoint-v1";

void save_checkpoint(Model& model, const std::filesystem::path& dir, const WordSet& train_words,
                     const std::u32string& probe);

struct LoadedCheckpoint {
  Model model;
  WordSet train_words;
};

// Throws CheckpointError on any manifest, file or probe mismatch.
LoadedCheckpoint load_checkpoint(const std::filesystem::path& dir);

// Writes one tensor file / reads it back as doubles.
void write_tensor_file(const std::filesystem::path& path, std::span<const Real> values);
std::vector<Real> read_tensor_file(const std::filesystem::path& path);

}  // namespace latticecws
