#include "chronokb/data.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "binary_io.hpp"
#include "chronokb/errors.hpp"

namespace chronokb {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

constexpr std::string_view kSince = "occursSince";
constexpr std::string_view kUntil = "occursUntil";
constexpr std::string_view kReciprocalSuffix = "^-1";
constexpr int kCacheVersion = 1;
constexpr char kFactMagic[8] = {'C', 'K', 'B', 'F', 'A', 'C', 'T', '1'};
constexpr std::int64_t kFactColumns = 6;

struct RawRecord {
  std::string s, p, o;
  std::string a, b;  // timestamp / tag, or begin / end
  std::size_t line = 0;
};

std::vector<std::string> split_tabs(std::string_view line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t tab = line.find('\t', start);
    fields.emplace_back(line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start));
    if (tab == std::string_view::npos) break;
    start = tab + 1;
  }
  return fields;
}

std::optional<fs::path> find_split_file(const fs::path& dir, std::string_view name) {
  for (const char* ext : {"", ".txt", ".tsv"}) {
    fs::path candidate = dir / (std::string(name) + ext);
    if (fs::is_regular_file(candidate)) return candidate;
  }
  return std::nullopt;
}

// Reads records of `columns` tab-separated fields; the fourth and fifth
// columns may be empty when `columns` is 5.
std::vector<RawRecord> read_records(const fs::path& path, std::size_t columns) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<RawRecord> records;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_tabs(line);
    if (fields.size() != columns) {
      throw FormatError(path.string() + ":" + std::to_string(number) + ": expected " + std::to_string(columns) +
                        " tab-separated columns, found " + std::to_string(fields.size()));
    }
    for (std::size_t i = 0; i < 3; ++i) {
      if (fields[i].empty()) {
        throw FormatError(path.string() + ":" + std::to_string(number) + ": empty subject, predicate or object");
      }
    }
    RawRecord r;
    r.s = std::move(fields[0]);
    r.p = std::move(fields[1]);
    r.o = std::move(fields[2]);
    r.a = std::move(fields[3]);
    if (columns == 5) r.b = std::move(fields[4]);
    r.line = number;
    records.push_back(std::move(r));
  }
  return records;
}

struct RawSplits {
  std::vector<RawRecord> splits[3];
  fs::path paths[3];
};

RawSplits read_splits(const fs::path& dir, std::size_t columns) {
  if (!fs::is_directory(dir)) throw FormatError("dataset directory not found: " + dir.string());
  RawSplits raw;
  const char* names[3] = {"train", "valid", "test"};
  for (int i = 0; i < 3; ++i) {
    auto path = find_split_file(dir, names[i]);
    if (!path) {
      if (i == 0) throw FormatError("missing train file in " + dir.string());
      continue;
    }
    raw.paths[i] = *path;
    raw.splits[i] = read_records(*path, columns);
  }
  return raw;
}

std::string where(const fs::path& path, const RawRecord& r) { return path.string() + ":" + std::to_string(r.line); }

// Builds the sorted vocabulary. Timestamp fields are taken from the columns
// selected by `time_columns` (bit 0 = a, bit 1 = b) after discretization.
Vocabulary build_vocabulary(const RawSplits& raw, const Discretization& disc, int time_columns) {
  std::set<std::string> entities, predicates;
  std::map<std::pair<ChronoKey, std::string>, int> timestamps;
  for (int i = 0; i < 3; ++i) {
    for (const auto& r : raw.splits[i]) {
      entities.insert(r.s);
      entities.insert(r.o);
      predicates.insert(r.p);
      for (int c = 0; c < 2; ++c) {
        if (!(time_columns & (1 << c))) continue;
        const std::string& field = c == 0 ? r.a : r.b;
        if (field.empty()) continue;
        std::string label;
        try {
          label = disc.apply(field);
        } catch (const FormatError& e) {
          throw FormatError(where(raw.paths[i], r) + ": " + e.what());
        }
        auto key = parse_chrono_key(label);
        if (!key) throw FormatError(where(raw.paths[i], r) + ": timestamp '" + field + "' is not a date or year");
        timestamps.emplace(std::make_pair(*key, label), 0);
      }
    }
  }
  Vocabulary vocab;
  vocab.entities = LabelIndex({entities.begin(), entities.end()});
  vocab.predicates = LabelIndex({predicates.begin(), predicates.end()});
  std::vector<std::string> ts;
  for (const auto& [key, unused] : timestamps) ts.push_back(key.second);
  vocab.timestamps = LabelIndex(std::move(ts));
  return vocab;
}

Index timestamp_index(const Vocabulary& vocab, const Discretization& disc, const std::string& field) {
  return *vocab.timestamps.find(disc.apply(field));
}

IntervalFact base_fact(const Vocabulary& vocab, const RawRecord& r) {
  IntervalFact f;
  f.s = *vocab.entities.find(r.s);
  f.p = *vocab.predicates.find(r.p);
  f.o = *vocab.entities.find(r.o);
  return f;
}

void write_labels(const fs::path& path, const LabelIndex& index) {
  std::ofstream out(path, std::ios::binary);
  for (const auto& label : index.labels()) out << label << '\n';
  if (!out) throw FormatError("cannot write " + path.string());
}

LabelIndex read_labels(const fs::path& path, std::size_t expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  std::vector<std::string> labels;
  std::string line;
  while (std::getline(in, line)) labels.push_back(line);
  if (labels.size() != expected) {
    throw FormatError(path.string() + ": expected " + std::to_string(expected) + " labels, found " +
                      std::to_string(labels.size()));
  }
  return LabelIndex(std::move(labels));
}

void write_facts(const fs::path& path, const std::vector<IntervalFact>& facts) {
  std::ofstream out(path, std::ios::binary);
  out.write(kFactMagic, sizeof(kFactMagic));
  detail::write_i64(out, static_cast<std::int64_t>(facts.size()));
  detail::write_i64(out, kFactColumns);
  for (const auto& f : facts) {
    detail::write_i64(out, f.s);
    detail::write_i64(out, f.p);
    detail::write_i64(out, f.o);
    detail::write_i64(out, f.begin.value_or(-1));
    detail::write_i64(out, f.end.value_or(-1));
    detail::write_i64(out, static_cast<std::int64_t>(f.tag));
  }
  if (!out) throw FormatError("cannot write " + path.string());
}

std::vector<IntervalFact> read_facts(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  char magic[8];
  std::int64_t count = 0, columns = 0;
  if (!in.read(magic, 8) || !std::equal(magic, magic + 8, kFactMagic) || !detail::read_i64(in, count) ||
      !detail::read_i64(in, columns) || columns != kFactColumns || count < 0) {
    throw FormatError(path.string() + ": bad fact array header");
  }
  std::vector<IntervalFact> facts(static_cast<std::size_t>(count));
  for (auto& f : facts) {
    std::int64_t v[kFactColumns];
    for (auto& x : v) {
      if (!detail::read_i64(in, x)) throw FormatError(path.string() + ": truncated fact array");
    }
    f.s = v[0];
    f.p = v[1];
    f.o = v[2];
    if (v[3] >= 0) f.begin = v[3];
    if (v[4] >= 0) f.end = v[4];
    if (v[5] < 0 || v[5] > 2) throw FormatError(path.string() + ": bad time tag");
    f.tag = static_cast<TimeTag>(v[5]);
  }
  if (in.peek() != std::char_traits<char>::eof()) throw FormatError(path.string() + ": trailing bytes");
  return facts;
}

void check_facts(const DatasetBundle& b, const std::vector<IntervalFact>& facts, const char* name) {
  const auto ne = static_cast<Index>(b.num_entities());
  const auto np = static_cast<Index>(b.augmented && std::string_view(name) == "train" ? b.model_predicates()
                                                                                     : b.base_predicates());
  const auto nt = static_cast<Index>(b.num_timestamps());
  for (const auto& f : facts) {
    const bool ok = f.s >= 0 && f.s < ne && f.o >= 0 && f.o < ne && f.p >= 0 && f.p < np &&
                    (!f.begin || (*f.begin >= 0 && *f.begin < nt)) && (!f.end || (*f.end >= 0 && *f.end < nt));
    if (!ok) throw FormatError(std::string("bundle cache: ") + name + " fact index out of range");
  }
}

}  // namespace

LabelIndex::LabelIndex(std::vector<std::string> labels) : labels_(std::move(labels)) {
  index_.reserve(labels_.size());
  for (std::size_t i = 0; i < labels_.size(); ++i) {
    if (!index_.emplace(labels_[i], static_cast<Index>(i)).second) {
      throw FormatError("duplicate label '" + labels_[i] + "'");
    }
  }
}

std::optional<Index> LabelIndex::find(std::string_view label) const {
  auto it = index_.find(std::string(label));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

DatasetFormat parse_dataset_format(std::string_view name) {
  if (name == "quadruples" || name == "icews") return DatasetFormat::Quadruples;
  if (name == "intervals" || name == "wikidata") return DatasetFormat::Intervals;
  if (name == "yago") return DatasetFormat::Yago;
  throw ConfigError("unknown dataset format '" + std::string(name) + "' (expected quadruples, intervals, yago)");
}

std::string to_string(DatasetFormat format) {
  switch (format) {
    case DatasetFormat::Quadruples: return "quadruples";
    case DatasetFormat::Intervals: return "intervals";
    case DatasetFormat::Yago: return "yago";
  }
  return "quadruples";
}

const std::vector<IntervalFact>& DatasetBundle::split(Split which) const {
  switch (which) {
    case Split::Train: return train;
    case Split::Valid: return valid;
    case Split::Test: return test;
  }
  return train;
}

std::size_t DatasetBundle::base_predicates() const {
  return vocab.predicates.size() * (yago_unfolded ? 2 : 1);
}

DateRange DatasetBundle::date_range() const {
  return {0, static_cast<Index>(num_timestamps()) - 1};
}

std::string DatasetBundle::predicate_label(Index p) const {
  const auto base = static_cast<Index>(base_predicates());
  if (p < 0 || p >= 2 * base) throw IndexError("predicate index " + std::to_string(p) + " out of range");
  const bool reciprocal = p >= base;
  const Index b = reciprocal ? p - base : p;
  std::string label;
  if (yago_unfolded) {
    label = vocab.predicates.label(b / 2) + "@" + std::string(b % 2 ? kUntil : kSince);
  } else {
    label = vocab.predicates.label(b);
  }
  if (reciprocal) label += kReciprocalSuffix;
  return label;
}

std::optional<Index> DatasetBundle::find_predicate(std::string_view label) const {
  const auto base = static_cast<Index>(base_predicates());
  Index offset = 0;
  if (label.size() > kReciprocalSuffix.size() && label.ends_with(kReciprocalSuffix)) {
    label.remove_suffix(kReciprocalSuffix.size());
    offset = base;
  }
  if (!yago_unfolded) {
    auto p = vocab.predicates.find(label);
    if (!p) return std::nullopt;
    return *p + offset;
  }
  Index bit = 0;
  const auto at = label.rfind('@');
  if (at != std::string_view::npos) {
    const auto tag = label.substr(at + 1);
    if (tag == kUntil) {
      bit = 1;
    } else if (tag != kSince) {
      return std::nullopt;
    }
    label = label.substr(0, at);
  }
  auto p = vocab.predicates.find(label);
  if (!p) return std::nullopt;
  return 2 * *p + bit + offset;
}

DatasetStats dataset_stats(const DatasetBundle& bundle) {
  DatasetStats stats;
  stats.entities = bundle.vocab.entities.size();
  stats.predicates = bundle.vocab.predicates.size();
  stats.timestamps = bundle.vocab.timestamps.size();
  stats.train = bundle.train.size();
  stats.valid = bundle.valid.size();
  stats.test = bundle.test.size();
  if (!bundle.train.empty()) {
    const auto timed = std::count_if(bundle.train.begin(), bundle.train.end(),
                                     [](const IntervalFact& f) { return f.has_time(); });
    stats.temporal_fraction = static_cast<double>(timed) / static_cast<double>(bundle.train.size());
  }
  return stats;
}

std::string format_stats(const DatasetStats& s) {
  std::ostringstream out;
  out << "entities=" << s.entities << " predicates=" << s.predicates << " timestamps=" << s.timestamps
      << " train=" << s.train << " valid=" << s.valid << " test=" << s.test
      << " temporal_fraction=" << s.temporal_fraction;
  return out.str();
}

DatasetBundle load_quadruples(const fs::path& dir, const Discretization& disc) {
  const RawSplits raw = read_splits(dir, 4);
  for (int i = 0; i < 3; ++i) {
    for (const auto& r : raw.splits[i]) {
      if (r.a.empty()) throw FormatError(where(raw.paths[i], r) + ": empty timestamp");
    }
  }
  DatasetBundle bundle;
  bundle.vocab = build_vocabulary(raw, disc, 0b01);
  std::vector<IntervalFact>* out[3] = {&bundle.train, &bundle.valid, &bundle.test};
  for (int i = 0; i < 3; ++i) {
    out[i]->reserve(raw.splits[i].size());
    for (const auto& r : raw.splits[i]) {
      IntervalFact f = base_fact(bundle.vocab, r);
      f.begin = f.end = timestamp_index(bundle.vocab, disc, r.a);
      out[i]->push_back(f);
    }
  }
  return bundle;
}

DatasetBundle load_intervals(const fs::path& dir, const Discretization& disc) {
  const RawSplits raw = read_splits(dir, 5);
  DatasetBundle bundle;
  bundle.vocab = build_vocabulary(raw, disc, 0b11);
  std::vector<IntervalFact>* out[3] = {&bundle.train, &bundle.valid, &bundle.test};
  for (int i = 0; i < 3; ++i) {
    out[i]->reserve(raw.splits[i].size());
    for (const auto& r : raw.splits[i]) {
      IntervalFact f = base_fact(bundle.vocab, r);
      if (!r.a.empty()) f.begin = timestamp_index(bundle.vocab, disc, r.a);
      if (!r.b.empty()) f.end = timestamp_index(bundle.vocab, disc, r.b);
      if (f.begin && f.end && *f.begin > *f.end) {
        throw FormatError(where(raw.paths[i], r) + ": begin '" + r.a + "' is after end '" + r.b + "'");
      }
      out[i]->push_back(f);
    }
  }
  return bundle;
}

DatasetBundle load_yago(const fs::path& dir, const Discretization& disc) {
  const RawSplits raw = read_splits(dir, 5);
  for (int i = 0; i < 3; ++i) {
    for (const auto& r : raw.splits[i]) {
      if (!r.b.empty() && r.b != kSince && r.b != kUntil) {
        throw FormatError(where(raw.paths[i], r) + ": unknown time tag '" + r.b + "'");
      }
      if (!r.b.empty() && r.a.empty()) throw FormatError(where(raw.paths[i], r) + ": time tag without timestamp");
    }
  }
  DatasetBundle bundle;
  bundle.vocab = build_vocabulary(raw, disc, 0b01);
  std::vector<IntervalFact>* out[3] = {&bundle.train, &bundle.valid, &bundle.test};
  for (int i = 0; i < 3; ++i) {
    out[i]->reserve(raw.splits[i].size());
    for (const auto& r : raw.splits[i]) {
      IntervalFact f = base_fact(bundle.vocab, r);
      if (!r.a.empty()) f.begin = f.end = timestamp_index(bundle.vocab, disc, r.a);
      if (r.b == kSince) f.tag = TimeTag::Since;
      if (r.b == kUntil) f.tag = TimeTag::Until;
      out[i]->push_back(f);
    }
  }
  return bundle;
}

DatasetBundle load_dataset(const fs::path& dir, DatasetFormat format, const Discretization& disc) {
  switch (format) {
    case DatasetFormat::Quadruples: return load_quadruples(dir, disc);
    case DatasetFormat::Intervals: return load_intervals(dir, disc);
    case DatasetFormat::Yago: return load_yago(dir, disc);
  }
  throw ConfigError("unknown dataset format");
}

DatasetBundle unfold_yago_modes(const DatasetBundle& bundle) {
  if (bundle.yago_unfolded) throw ConfigError("bundle is already unfolded");
  if (bundle.augmented) throw ConfigError("unfold predicate modes before reciprocal augmentation");
  DatasetBundle out = bundle;
  for (auto* facts : {&out.train, &out.valid, &out.test}) {
    for (auto& f : *facts) {
      if (f.has_time() && f.tag == TimeTag::None) {
        throw FormatError("timed record (" + bundle.vocab.entities.label(f.s) + ", " +
                          bundle.vocab.predicates.label(f.p) + ", " + bundle.vocab.entities.label(f.o) +
                          ") has no occursSince/occursUntil tag");
      }
      f.p = 2 * f.p + (f.tag == TimeTag::Until ? 1 : 0);
    }
  }
  out.yago_unfolded = true;
  return out;
}

DatasetBundle fold_yago_modes(const DatasetBundle& bundle) {
  if (!bundle.yago_unfolded) throw ConfigError("bundle is not unfolded");
  if (bundle.augmented) throw ConfigError("cannot fold an augmented bundle");
  DatasetBundle out = bundle;
  for (auto* facts : {&out.train, &out.valid, &out.test}) {
    for (auto& f : *facts) f.p /= 2;
  }
  out.yago_unfolded = false;
  return out;
}

std::vector<IntervalFact> augment_reciprocal(std::span<const IntervalFact> facts, std::size_t num_predicates) {
  std::vector<IntervalFact> out(facts.begin(), facts.end());
  out.reserve(2 * facts.size());
  for (const auto& f : facts) {
    IntervalFact r = f;
    r.s = f.o;
    r.o = f.s;
    r.p = f.p + static_cast<Index>(num_predicates);
    out.push_back(r);
  }
  return out;
}

DatasetBundle augment_reciprocal(const DatasetBundle& bundle) {
  if (bundle.augmented) throw ConfigError("train split is already augmented with reciprocal facts");
  DatasetBundle out = bundle;
  out.train = augment_reciprocal(bundle.train, bundle.base_predicates());
  out.augmented = true;
  return out;
}

bool is_bundle_cache(const fs::path& dir) { return fs::is_regular_file(dir / "bundle.json"); }

void save_bundle_cache(const DatasetBundle& bundle, const fs::path& dir) {
  fs::create_directories(dir);
  json header = {
      {"format", "chronokb-bundle"},
      {"version", kCacheVersion},
      {"augmented", bundle.augmented},
      {"yago_unfolded", bundle.yago_unfolded},
      {"entities", bundle.vocab.entities.size()},
      {"predicates", bundle.vocab.predicates.size()},
      {"timestamps", bundle.vocab.timestamps.size()},
      {"splits", {{"train", bundle.train.size()}, {"valid", bundle.valid.size()}, {"test", bundle.test.size()}}},
      {"columns", {"s", "p", "o", "begin", "end", "tag"}},
  };
  {
    std::ofstream out(dir / "bundle.json", std::ios::binary);
    out << header.dump(2) << '\n';
  }
  write_labels(dir / "entities.txt", bundle.vocab.entities);
  write_labels(dir / "predicates.txt", bundle.vocab.predicates);
  write_labels(dir / "timestamps.txt", bundle.vocab.timestamps);
  write_facts(dir / "train.bin", bundle.train);
  write_facts(dir / "valid.bin", bundle.valid);
  write_facts(dir / "test.bin", bundle.test);
}

DatasetBundle load_bundle_cache(const fs::path& dir) {
  std::ifstream in(dir / "bundle.json");
  if (!in) throw FormatError("no bundle cache in " + dir.string());
  json header;
  try {
    header = json::parse(in);
  } catch (const json::exception& e) {
    throw FormatError("bundle.json: " + std::string(e.what()));
  }
  if (header.value("format", "") != "chronokb-bundle") throw FormatError("bundle.json: not a bundle cache");
  if (header.value("version", 0) != kCacheVersion) {
    throw FormatError("bundle.json: unsupported version " + header.value("version", json()).dump());
  }
  DatasetBundle bundle;
  bundle.augmented = header.at("augmented").get<bool>();
  bundle.yago_unfolded = header.at("yago_unfolded").get<bool>();
  bundle.vocab.entities = read_labels(dir / "entities.txt", header.at("entities").get<std::size_t>());
  bundle.vocab.predicates = read_labels(dir / "predicates.txt", header.at("predicates").get<std::size_t>());
  bundle.vocab.timestamps = read_labels(dir / "timestamps.txt", header.at("timestamps").get<std::size_t>());
  bundle.train = read_facts(dir / "train.bin");
  bundle.valid = read_facts(dir / "valid.bin");
  bundle.test = read_facts(dir / "test.bin");
  const auto& splits = header.at("splits");
  if (bundle.train.size() != splits.at("train").get<std::size_t>() ||
      bundle.valid.size() != splits.at("valid").get<std::size_t>() ||
      bundle.test.size() != splits.at("test").get<std::size_t>()) {
    throw FormatError("bundle cache: split sizes disagree with bundle.json");
  }
  check_facts(bundle, bundle.train, "train");
  check_facts(bundle, bundle.valid, "valid");
  check_facts(bundle, bundle.test, "test");
  return bundle;
}

}  // namespace chronokb
