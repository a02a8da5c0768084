#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "chronokb/model.hpp"
#include "chronokb/training.hpp"

namespace chronokb {

// Checkpoint layout: one JSON header line
//   {"format":"chronokb","format_version":1,"content":"model","kind":...,
//    "rank":R,"tables":[{"name":"entities","rows":N},...], ...}
// followed by little-endian doubles for each listed table in order
// (entities, predicates, temporal_predicates?, timestamps?), rows stored as
// interleaved (re, im) pairs. The header fixes the payload size exactly, so
// truncated or padded files are rejected.
void save_model(const std::filesystem::path& path, const ModelParams& params);
ModelParams load_model(const std::filesystem::path& path);

// Everything besides the parameters needed to resume training bit-exactly.
struct TrainingState {
  AdagradState optimizer;
  std::string rng_state;
  std::size_t epochs_done = 0;
  std::uint64_t seed = 0;
};

// Same layout with "content":"adagrad"; tables hold the accumulators.
void save_training_state(const std::filesystem::path& path, ModelKind kind, const TrainingState& state);
TrainingState load_training_state(const std::filesystem::path& path, const ModelParams& params);

// Path of the optimizer file kept next to a model checkpoint.
std::filesystem::path training_state_path(const std::filesystem::path& checkpoint);

}  // namespace chronokb
