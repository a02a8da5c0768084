#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "chronokb/data.hpp"
#include "chronokb/model.hpp"

namespace chronokb {

// Known-true objects per (subject, predicate), each with the timestamp range
// over which the fact holds. Reciprocal entries (o, p + P, s) are included,
// so left-hand-side queries phrased through reciprocal predicates filter too.
//
// With time-aware filtering (the default) a candidate k is filtered for the
// query (s, p, ?, t) iff some known fact (s, p, k) holds at t. Otherwise the
// timestamp is ignored.
class FilterIndex {
 public:
  FilterIndex() = default;
  FilterIndex(std::size_t model_predicates, bool time_aware = true);

  // Train, valid and test facts of an un-augmented view of the bundle.
  static FilterIndex build(const DatasetBundle& bundle, bool time_aware = true);

  // Adds the fact and its reciprocal. Missing bounds span `range`.
  void add(const IntervalFact& fact, std::size_t base_predicates, DateRange range);
  void add_entry(Index s, Index p, Index o, Index first, Index last);

  bool contains(Index s, Index p, Index o, Index t) const;
  // Objects true for (s, p, ., t), possibly with repeats.
  void objects(Index s, Index p, Index t, std::vector<Index>& out) const;
  bool time_aware() const { return time_aware_; }

 private:
  struct Entry {
    Index o;
    Index first;
    Index last;
  };
  std::uint64_t key(Index s, Index p) const {
    return static_cast<std::uint64_t>(s) * static_cast<std::uint64_t>(predicates_) + static_cast<std::uint64_t>(p);
  }

  std::size_t predicates_ = 0;
  bool time_aware_ = true;
  std::unordered_map<std::uint64_t, std::vector<Entry>> entries_;
};

// One ranking query (s, p, ?, t) with its gold object.
struct RankQuery {
  Index s = 0;
  Index p = 0;
  Index o = 0;  // gold
  Index t = 0;
  bool temporal = false;  // source record carried a time annotation

  friend bool operator==(const RankQuery&, const RankQuery&) = default;
};

struct EvalOptions {
  // Only rank missing objects; otherwise also rank subjects through the
  // reciprocal predicate p + P.
  bool rhs_only = false;
  bool time_aware_filter = true;
  // Seed for drawing query timestamps of interval facts.
  std::uint64_t seed = 0;
};

// Queries for `facts` in order: per fact the (s, p, ?, t) query, then the
// reciprocal (o, p + P, ?, t) query unless rhs_only. Interval facts get one
// sampled timestamp shared by both directions.
std::vector<RankQuery> build_queries(std::span<const IntervalFact> facts, std::size_t base_predicates,
                                     DateRange range, bool temporal_model, const EvalOptions& options);

struct MrrCount {
  double mrr = 0.0;
  std::size_t count = 0;
};

struct RankingReport {
  double mrr = 0.0;
  double hits1 = 0.0;
  double hits3 = 0.0;
  double hits10 = 0.0;
  std::size_t count = 0;
  MrrCount temporal;
  MrrCount non_temporal;
  bool rhs_only = false;
  std::optional<double> time_auprc;
};

// 1 + number of unfiltered candidates k != gold with score(k) >= score(gold).
// A query without filter entries is treated as filtering only the gold.
Index filtered_rank(const ModelParams& params, Index s, Index p, Index t, Index gold, const FilterIndex& filter);
// Same rule on precomputed candidate scores.
Index filtered_rank_from_scores(std::span<const double> scores, Index gold, std::span<const Index> filtered);

// Aggregates ranks; `ranks_out`, if given, receives one rank per query.
RankingReport evaluate(const ModelParams& params, std::span<const RankQuery> queries, const FilterIndex& filter,
                       bool rhs_only, std::vector<Index>* ranks_out = nullptr);
RankingReport report_from_ranks(std::span<const RankQuery> queries, std::span<const Index> ranks, bool rhs_only);

// Builds queries and a filter for one split of the bundle and evaluates it.
RankingReport evaluate_split(const ModelParams& params, const DatasetBundle& bundle, Split split,
                             const EvalOptions& options, std::vector<RankQuery>* queries_out = nullptr,
                             std::vector<Index>* ranks_out = nullptr);

// Area under the precision-recall curve of ranking `scores` against the
// binary labels: thresholds at every distinct score, step integration
// sum_i (R_i - R_{i-1}) P_i.
double average_precision(std::span<const double> scores, std::span<const std::uint8_t> positive);

// Macro-averaged AUPRC of classifying timestamps inside each fact's range.
// Facts whose positive set is empty or the whole time axis are skipped.
// Throws Error when no fact is evaluable.
struct AuprcResult {
  double macro_auprc = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};
AuprcResult time_auprc(const ModelParams& params, std::span<const IntervalFact> facts, DateRange range);

struct TracePoint {
  Index timestamp = 0;
  double score = 0.0;
};
// Score of (s, p, o) at every timestamp.
std::vector<TracePoint> score_trace(const ModelParams& params, Index s, Index p, Index o);

std::string report_to_json(const RankingReport& report, std::uint64_t seed);
RankingReport report_from_json(const std::string& text);

}  // namespace chronokb
