#include "chronokb/checkpoint.hpp"

#include <fstream>
#include <vector>

#include <json.hpp>

#include "binary_io.hpp"
#include "chronokb/errors.hpp"

namespace chronokb {

namespace {

using json = nlohmann::json;

constexpr int kFormatVersion = 1;

struct NamedTable {
  const char* name;
  const ComplexTable* table;
};

std::vector<NamedTable> tables_of(const ComplexTable& e, const ComplexTable& p, const std::optional<ComplexTable>& pt,
                                  const std::optional<ComplexTable>& t) {
  std::vector<NamedTable> out{{"entities", &e}, {"predicates", &p}};
  if (pt) out.push_back({"temporal_predicates", &*pt});
  if (t) out.push_back({"timestamps", &*t});
  return out;
}

void write_file(const std::filesystem::path& path, json header, const std::vector<NamedTable>& tables) {
  json list = json::array();
  for (const auto& t : tables) list.push_back({{"name", t.name}, {"rows", t.table->rows()}});
  header["tables"] = list;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << header.dump() << '\n';
  for (const auto& t : tables) detail::write_doubles(out, t.table->values());
  if (!out) throw Error("failed writing " + path.string());
}

struct Loaded {
  json header;
  std::vector<std::pair<std::string, ComplexTable>> tables;
};

Loaded read_file(const std::filesystem::path& path, const std::string& content) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw FormatError(path.string() + ": missing header");
  Loaded loaded;
  try {
    loaded.header = json::parse(line);
    const json& h = loaded.header;
    if (h.at("format").get<std::string>() != "chronokb") throw FormatError(path.string() + ": not a checkpoint");
    if (h.at("format_version").get<int>() != kFormatVersion) {
      throw FormatError(path.string() + ": unsupported format_version " + h.at("format_version").dump());
    }
    if (h.at("content").get<std::string>() != content) {
      throw FormatError(path.string() + ": expected content \"" + content + "\", found " + h.at("content").dump());
    }
    const auto rank = h.at("rank").get<std::size_t>();
    std::uintmax_t expected = 0;
    for (const auto& t : h.at("tables")) {
      const auto rows = t.at("rows").get<std::size_t>();
      expected += static_cast<std::uintmax_t>(rows) * rank * 2 * sizeof(double);
      loaded.tables.emplace_back(t.at("name").get<std::string>(), ComplexTable(rows, rank));
    }
    const auto payload = std::filesystem::file_size(path) - static_cast<std::uintmax_t>(in.tellg());
    if (payload != expected) {
      throw FormatError(path.string() + ": payload is " + std::to_string(payload) + " bytes, header declares " +
                        std::to_string(expected));
    }
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": bad header: " + e.what());
  }
  for (auto& [name, table] : loaded.tables) {
    if (!detail::read_doubles(in, table.values())) throw FormatError(path.string() + ": truncated table " + name);
  }
  return loaded;
}

// Assigns loaded tables by name; unknown or duplicate names are errors.
void assign(Loaded& loaded, const std::filesystem::path& path, ComplexTable& e, ComplexTable& p,
            std::optional<ComplexTable>& pt, std::optional<ComplexTable>& t) {
  bool seen_e = false, seen_p = false;
  for (auto& [name, table] : loaded.tables) {
    if (name == "entities" && !seen_e) {
      e = std::move(table);
      seen_e = true;
    } else if (name == "predicates" && !seen_p) {
      p = std::move(table);
      seen_p = true;
    } else if (name == "temporal_predicates" && !pt) {
      pt = std::move(table);
    } else if (name == "timestamps" && !t) {
      t = std::move(table);
    } else {
      throw FormatError(path.string() + ": unexpected table \"" + name + "\"");
    }
  }
  if (!seen_e || !seen_p) throw FormatError(path.string() + ": missing entity or predicate table");
}

}  // namespace

void save_model(const std::filesystem::path& path, const ModelParams& params) {
  params.validate();
  json header = {{"format", "chronokb"},
                 {"format_version", kFormatVersion},
                 {"content", "model"},
                 {"kind", to_string(params.kind)},
                 {"rank", params.rank()}};
  write_file(path, header,
             tables_of(params.entities, params.predicates, params.temporal_predicates, params.timestamps));
}

ModelParams load_model(const std::filesystem::path& path) {
  Loaded loaded = read_file(path, "model");
  ModelParams params;
  try {
    params.kind = parse_model_kind(loaded.header.at("kind").get<std::string>());
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": bad header: " + e.what());
  } catch (const ConfigError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  assign(loaded, path, params.entities, params.predicates, params.temporal_predicates, params.timestamps);
  try {
    params.validate();
  } catch (const ConfigError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
  return params;
}

void save_training_state(const std::filesystem::path& path, ModelKind kind, const TrainingState& state) {
  const auto& opt = state.optimizer;
  json header = {{"format", "chronokb"},
                 {"format_version", kFormatVersion},
                 {"content", "adagrad"},
                 {"kind", to_string(kind)},
                 {"rank", opt.entities.rank()},
                 {"epochs_done", state.epochs_done},
                 {"seed", state.seed},
                 {"rng_state", state.rng_state}};
  write_file(path, header, tables_of(opt.entities, opt.predicates, opt.temporal_predicates, opt.timestamps));
}

TrainingState load_training_state(const std::filesystem::path& path, const ModelParams& params) {
  Loaded loaded = read_file(path, "adagrad");
  TrainingState state;
  try {
    const json& h = loaded.header;
    if (parse_model_kind(h.at("kind").get<std::string>()) != params.kind) {
      throw FormatError(path.string() + ": optimizer state is for " + h.at("kind").get<std::string>() +
                        ", checkpoint is " + to_string(params.kind));
    }
    state.epochs_done = h.at("epochs_done").get<std::size_t>();
    state.seed = h.at("seed").get<std::uint64_t>();
    state.rng_state = h.at("rng_state").get<std::string>();
  } catch (const json::exception& e) {
    throw FormatError(path.string() + ": bad header: " + e.what());
  }
  auto& opt = state.optimizer;
  assign(loaded, path, opt.entities, opt.predicates, opt.temporal_predicates, opt.timestamps);
  const AdagradState expected = AdagradState::like(params);
  auto same_shape = [](const ComplexTable& a, const ComplexTable& b) {
    return a.rows() == b.rows() && a.rank() == b.rank();
  };
  auto same_opt = [&](const std::optional<ComplexTable>& a, const std::optional<ComplexTable>& b) {
    return a.has_value() == b.has_value() && (!a || same_shape(*a, *b));
  };
  if (!same_shape(opt.entities, expected.entities) || !same_shape(opt.predicates, expected.predicates) ||
      !same_opt(opt.temporal_predicates, expected.temporal_predicates) ||
      !same_opt(opt.timestamps, expected.timestamps)) {
    throw FormatError(path.string() + ": optimizer tables do not match the model shape");
  }
  return state;
}

std::filesystem::path training_state_path(const std::filesystem::path& checkpoint) {
  auto p = checkpoint;
  p += ".adagrad";
  return p;
}

}  // namespace chronokb
