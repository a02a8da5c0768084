#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "chronokb/dates.hpp"
#include "chronokb/types.hpp"

namespace chronokb {

// Dense label <-> index map.
class LabelIndex {
 public:
  LabelIndex() = default;
  explicit LabelIndex(std::vector<std::string> labels);

  std::size_t size() const { return labels_.size(); }
  const std::string& label(Index i) const { return labels_.at(static_cast<std::size_t>(i)); }
  std::optional<Index> find(std::string_view label) const;
  const std::vector<std::string>& labels() const { return labels_; }

  friend bool operator==(const LabelIndex& a, const LabelIndex& b) { return a.labels_ == b.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, Index> index_;
};

// Entities and predicates are indexed in lexicographic label order;
// timestamps in chronological order, so adjacent indices are adjacent in time.
struct Vocabulary {
  LabelIndex entities;
  LabelIndex predicates;
  LabelIndex timestamps;

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;
};

enum class DatasetFormat { Quadruples, Intervals, Yago };
DatasetFormat parse_dataset_format(std::string_view name);
std::string to_string(DatasetFormat format);

enum class Split { Train, Valid, Test };

struct DatasetBundle {
  Vocabulary vocab;
  std::vector<IntervalFact> train;
  std::vector<IntervalFact> valid;
  std::vector<IntervalFact> test;
  // The train split carries reciprocal facts (o, p + base_predicates, s).
  bool augmented = false;
  // Predicates were split by occursSince/occursUntil tag: p -> 2p, 2p + 1.
  bool yago_unfolded = false;

  const std::vector<IntervalFact>& split(Split which) const;

  // Predicates of the (possibly unfolded) relation vocabulary, before reciprocals.
  std::size_t base_predicates() const;
  // Predicate rows a model needs: base predicates plus their reciprocals.
  std::size_t model_predicates() const { return 2 * base_predicates(); }
  std::size_t num_entities() const { return vocab.entities.size(); }
  std::size_t num_timestamps() const { return vocab.timestamps.size(); }
  // Span of known timestamps, used for unspecified interval bounds.
  DateRange date_range() const;

  // Label of a model predicate index, e.g. "p", "p@occursUntil", "p^-1".
  std::string predicate_label(Index p) const;
  std::optional<Index> find_predicate(std::string_view label) const;

  friend bool operator==(const DatasetBundle&, const DatasetBundle&) = default;
};

struct DatasetStats {
  std::size_t entities = 0;
  std::size_t predicates = 0;  // raw relation vocabulary
  std::size_t timestamps = 0;
  std::size_t train = 0;
  std::size_t valid = 0;
  std::size_t test = 0;
  double temporal_fraction = 0.0;  // share of train facts carrying any time annotation
};

DatasetStats dataset_stats(const DatasetBundle& bundle);
// "entities=... predicates=... timestamps=... train=... valid=... test=... temporal_fraction=..."
std::string format_stats(const DatasetStats& stats);

// Split files are looked up as <dir>/<split>, <dir>/<split>.txt or
// <dir>/<split>.tsv for split in train, valid, test. Only train is required.
//
// Quadruples: subject \t predicate \t object \t timestamp
DatasetBundle load_quadruples(const std::filesystem::path& dir, const Discretization& discretization);
// Intervals: subject \t predicate \t object \t begin \t end (empty = unspecified)
DatasetBundle load_intervals(const std::filesystem::path& dir, const Discretization& discretization);
// Yago: subject \t predicate \t object \t timestamp \t {occursSince|occursUntil|""}
DatasetBundle load_yago(const std::filesystem::path& dir, const Discretization& discretization);
DatasetBundle load_dataset(const std::filesystem::path& dir, DatasetFormat format,
                           const Discretization& discretization);

// Maps predicate p to 2p (occursSince or untimed) and 2p + 1 (occursUntil)
// in all splits. Rejects timed records without a tag, and bundles that are
// already unfolded or augmented.
DatasetBundle unfold_yago_modes(const DatasetBundle& bundle);
// Inverse of unfold_yago_modes.
DatasetBundle fold_yago_modes(const DatasetBundle& bundle);

// Appends (o, p + num_predicates, s, same interval) for every fact.
std::vector<IntervalFact> augment_reciprocal(std::span<const IntervalFact> facts, std::size_t num_predicates);
// Augments the train split. Throws ConfigError if already augmented.
DatasetBundle augment_reciprocal(const DatasetBundle& bundle);

// Versioned on-disk cache: bundle.json, vocabulary label files and
// little-endian int64 fact arrays.
void save_bundle_cache(const DatasetBundle& bundle, const std::filesystem::path& dir);
DatasetBundle load_bundle_cache(const std::filesystem::path& dir);
bool is_bundle_cache(const std::filesystem::path& dir);

}  // namespace chronokb
