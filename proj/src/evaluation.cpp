#include "chronokb/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "chronokb/errors.hpp"
#include "chronokb/training.hpp"

namespace chronokb {

using json = nlohmann::json;

FilterIndex::FilterIndex(std::size_t model_predicates, bool time_aware)
    : predicates_(model_predicates), time_aware_(time_aware) {}

FilterIndex FilterIndex::build(const DatasetBundle& bundle, bool time_aware) {
  FilterIndex index(bundle.model_predicates(), time_aware);
  const std::size_t base = bundle.base_predicates();
  const DateRange range = bundle.date_range();
  for (const auto* facts : {&bundle.train, &bundle.valid, &bundle.test}) {
    for (const auto& f : *facts) {
      // Reciprocal train facts are re-derived from their originals.
      if (f.p >= static_cast<Index>(base)) continue;
      index.add(f, base, range);
    }
  }
  return index;
}

void FilterIndex::add(const IntervalFact& fact, std::size_t base_predicates, DateRange range) {
  const Index first = fact.begin.value_or(range.first);
  const Index last = fact.end.value_or(range.last);
  add_entry(fact.s, fact.p, fact.o, first, last);
  add_entry(fact.o, fact.p + static_cast<Index>(base_predicates), fact.s, first, last);
}

void FilterIndex::add_entry(Index s, Index p, Index o, Index first, Index last) {
  if (p < 0 || static_cast<std::size_t>(p) >= predicates_) {
    throw IndexError("filter: predicate index " + std::to_string(p) + " out of range");
  }
  entries_[key(s, p)].push_back({o, first, last});
}

bool FilterIndex::contains(Index s, Index p, Index o, Index t) const {
  auto it = entries_.find(key(s, p));
  if (it == entries_.end()) return false;
  return std::any_of(it->second.begin(), it->second.end(), [&](const Entry& e) {
    return e.o == o && (!time_aware_ || (e.first <= t && t <= e.last));
  });
}

void FilterIndex::objects(Index s, Index p, Index t, std::vector<Index>& out) const {
  out.clear();
  auto it = entries_.find(key(s, p));
  if (it == entries_.end()) return;
  for (const auto& e : it->second) {
    if (!time_aware_ || (e.first <= t && t <= e.last)) out.push_back(e.o);
  }
}

std::vector<RankQuery> build_queries(std::span<const IntervalFact> facts, std::size_t base_predicates,
                                     DateRange range, bool temporal_model, const EvalOptions& options) {
  Rng rng(options.seed);
  std::vector<RankQuery> queries;
  queries.reserve(facts.size() * (options.rhs_only ? 1 : 2));
  for (const auto& f : facts) {
    const Index t = temporal_model ? sample_timestamp(f, rng, range) : 0;
    queries.push_back({f.s, f.p, f.o, t, f.has_time()});
    if (!options.rhs_only) {
      queries.push_back({f.o, f.p + static_cast<Index>(base_predicates), f.s, t, f.has_time()});
    }
  }
  return queries;
}

Index filtered_rank_from_scores(std::span<const double> scores, Index gold, std::span<const Index> filtered) {
  const double g = scores[static_cast<std::size_t>(gold)];
  // `!(x < g)` ranks NaN scores (and a NaN gold) pessimistically.
  auto above = [&](std::size_t k) { return !(scores[k] < g); };
  Index rank = 1;
  for (std::size_t k = 0; k < scores.size(); ++k) {
    if (static_cast<Index>(k) != gold && above(k)) ++rank;
  }
  std::vector<Index> unique(filtered.begin(), filtered.end());
  std::sort(unique.begin(), unique.end());
  unique.erase(std::unique(unique.begin(), unique.end()), unique.end());
  for (Index k : unique) {
    if (k != gold && k >= 0 && static_cast<std::size_t>(k) < scores.size() && above(static_cast<std::size_t>(k))) {
      --rank;
    }
  }
  return rank;
}

Index filtered_rank(const ModelParams& params, Index s, Index p, Index t, Index gold, const FilterIndex& filter) {
  check_indices(params, s, p, gold, t);
  const auto scores = score_all_objects(params, s, p, t);
  std::vector<Index> filtered;
  filter.objects(s, p, t, filtered);
  return filtered_rank_from_scores(scores, gold, filtered);
}

RankingReport report_from_ranks(std::span<const RankQuery> queries, std::span<const Index> ranks, bool rhs_only) {
  RankingReport report;
  report.rhs_only = rhs_only;
  report.count = ranks.size();
  double sum_t = 0.0, sum_nt = 0.0;
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    const double rr = 1.0 / static_cast<double>(ranks[i]);
    report.mrr += rr;
    report.hits1 += ranks[i] <= 1;
    report.hits3 += ranks[i] <= 3;
    report.hits10 += ranks[i] <= 10;
    if (queries[i].temporal) {
      sum_t += rr;
      ++report.temporal.count;
    } else {
      sum_nt += rr;
      ++report.non_temporal.count;
    }
  }
  if (report.count > 0) {
    const double n = static_cast<double>(report.count);
    report.mrr /= n;
    report.hits1 /= n;
    report.hits3 /= n;
    report.hits10 /= n;
  }
  if (report.temporal.count) report.temporal.mrr = sum_t / static_cast<double>(report.temporal.count);
  if (report.non_temporal.count) report.non_temporal.mrr = sum_nt / static_cast<double>(report.non_temporal.count);
  return report;
}

RankingReport evaluate(const ModelParams& params, std::span<const RankQuery> queries, const FilterIndex& filter,
                       bool rhs_only, std::vector<Index>* ranks_out) {
  std::vector<Index> ranks(queries.size());
  std::vector<double> scores(params.num_entities());
  std::vector<Index> filtered;
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const auto& q = queries[i];
    check_indices(params, q.s, q.p, q.o, q.t);
    score_all_objects(params, q.s, q.p, q.t, scores);
    filter.objects(q.s, q.p, q.t, filtered);
    ranks[i] = filtered_rank_from_scores(scores, q.o, filtered);
  }
  RankingReport report = report_from_ranks(queries, ranks, rhs_only);
  if (ranks_out) *ranks_out = std::move(ranks);
  return report;
}

RankingReport evaluate_split(const ModelParams& params, const DatasetBundle& bundle, Split split,
                             const EvalOptions& options, std::vector<RankQuery>* queries_out,
                             std::vector<Index>* ranks_out) {
  const FilterIndex filter = FilterIndex::build(bundle, options.time_aware_filter);
  std::vector<IntervalFact> facts;
  const Index base = static_cast<Index>(bundle.base_predicates());
  for (const auto& f : bundle.split(split)) {
    if (f.p < base) facts.push_back(f);
  }
  auto queries = build_queries(facts, bundle.base_predicates(), bundle.date_range(), is_temporal(params.kind), options);
  RankingReport report = evaluate(params, queries, filter, options.rhs_only, ranks_out);
  if (queries_out) *queries_out = std::move(queries);
  return report;
}

double average_precision(std::span<const double> scores, std::span<const std::uint8_t> positive) {
  if (scores.size() != positive.size()) throw ConfigError("average_precision: size mismatch");
  const std::size_t total_pos = static_cast<std::size_t>(std::count(positive.begin(), positive.end(), 1));
  if (total_pos == 0) throw Error("average_precision: no positive labels");
  auto value = [&](std::size_t i) {
    return std::isnan(scores[i]) ? -std::numeric_limits<double>::infinity() : scores[i];
  };
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return value(a) > value(b); });

  double ap = 0.0, prev_recall = 0.0;
  std::size_t tp = 0, fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    // All candidates sharing one score enter at the same threshold.
    std::size_t j = i;
    while (j < order.size() && value(order[j]) == value(order[i])) {
      if (positive[order[j]]) {
        ++tp;
      } else {
        ++fp;
      }
      ++j;
    }
    const double recall = static_cast<double>(tp) / static_cast<double>(total_pos);
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    ap += (recall - prev_recall) * precision;
    prev_recall = recall;
    i = j;
  }
  return ap;
}

AuprcResult time_auprc(const ModelParams& params, std::span<const IntervalFact> facts, DateRange range) {
  if (!is_temporal(params.kind)) throw UnsupportedModelError("time_auprc requires a temporal model");
  const std::size_t nt = params.num_timestamps();
  std::vector<double> scores(nt);
  std::vector<std::uint8_t> positive(nt);
  AuprcResult result;
  double total = 0.0;
  for (const auto& f : facts) {
    const Index first = f.begin.value_or(range.first);
    const Index last = f.end.value_or(range.last);
    std::size_t count = 0;
    for (std::size_t l = 0; l < nt; ++l) {
      const Index li = static_cast<Index>(l);
      positive[l] = first <= li && li <= last;
      count += positive[l];
    }
    if (count == 0 || count == nt) {
      ++result.skipped;
      continue;
    }
    score_all_times(params, f.s, f.p, f.o, scores);
    total += average_precision(scores, positive);
    ++result.evaluated;
  }
  if (result.evaluated == 0) throw Error("time_auprc: no evaluable facts (every interval is empty or complete)");
  result.macro_auprc = total / static_cast<double>(result.evaluated);
  return result;
}

std::vector<TracePoint> score_trace(const ModelParams& params, Index s, Index p, Index o) {
  const auto scores = score_all_times(params, s, p, o);
  std::vector<TracePoint> trace(scores.size());
  for (std::size_t l = 0; l < scores.size(); ++l) trace[l] = {static_cast<Index>(l), scores[l]};
  return trace;
}

std::string report_to_json(const RankingReport& r, std::uint64_t seed) {
  json j = {
      {"mrr", r.mrr},
      {"hits@1", r.hits1},
      {"hits@3", r.hits3},
      {"hits@10", r.hits10},
      {"count", r.count},
      {"temporal", {{"mrr", r.temporal.mrr}, {"count", r.temporal.count}}},
      {"non_temporal", {{"mrr", r.non_temporal.mrr}, {"count", r.non_temporal.count}}},
      {"rhs_only", r.rhs_only},
      {"seed", seed},
  };
  if (r.time_auprc) j["time_auprc"] = *r.time_auprc;
  return j.dump(2);
}

RankingReport report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    RankingReport r;
    r.mrr = j.at("mrr").get<double>();
    r.hits1 = j.at("hits@1").get<double>();
    r.hits3 = j.at("hits@3").get<double>();
    r.hits10 = j.at("hits@10").get<double>();
    r.count = j.at("count").get<std::size_t>();
    r.temporal = {j.at("temporal").at("mrr").get<double>(), j.at("temporal").at("count").get<std::size_t>()};
    r.non_temporal = {j.at("non_temporal").at("mrr").get<double>(),
                      j.at("non_temporal").at("count").get<std::size_t>()};
    r.rhs_only = j.at("rhs_only").get<bool>();
    if (j.contains("time_auprc")) r.time_auprc = j.at("time_auprc").get<double>();
    return r;
  } catch (const json::exception& e) {
    throw FormatError(std::string("ranking report: ") + e.what());
  }
}

}  // namespace chronokb
