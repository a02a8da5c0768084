#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace oracle {

namespace {

double real_part(double x) { return x; }
double real_part(cplx z) { return z.real(); }

void guard(std::size_t entries) {
  if (entries > kMaxEntries) throw std::length_error("oracle tensor exceeds the size guard");
}

template <class T>
Tensor cp3_impl(const Matrix<T>& a, const Matrix<T>& b, const Matrix<T>& c) {
  if (a.cols != b.cols || a.cols != c.cols) throw std::invalid_argument("cp3: rank mismatch");
  guard(a.rows * b.rows * c.rows);
  Tensor x{{a.rows, b.rows, c.rows}, std::vector<double>(a.rows * b.rows * c.rows)};
  std::size_t at = 0;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.rows; ++j)
      for (std::size_t k = 0; k < c.rows; ++k) {
        T sum{};
        for (std::size_t r = 0; r < a.cols; ++r) sum += a(i, r) * b(j, r) * c(k, r);
        x.data[at++] = real_part(sum);
      }
  return x;
}

template <class T>
Tensor cp4_impl(const Matrix<T>& a, const Matrix<T>& b, const Matrix<T>& c, const Matrix<T>& d) {
  if (a.cols != b.cols || a.cols != c.cols || a.cols != d.cols) throw std::invalid_argument("cp4: rank mismatch");
  guard(a.rows * b.rows * c.rows * d.rows);
  Tensor x{{a.rows, b.rows, c.rows, d.rows}, std::vector<double>(a.rows * b.rows * c.rows * d.rows)};
  std::size_t at = 0;
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.rows; ++j)
      for (std::size_t k = 0; k < c.rows; ++k)
        for (std::size_t l = 0; l < d.rows; ++l) {
          T sum{};
          for (std::size_t r = 0; r < a.cols; ++r) sum += a(i, r) * b(j, r) * c(k, r) * d(l, r);
          x.data[at++] = real_part(sum);
        }
  return x;
}

template <class T>
double unfolding_impl(const Matrix<T>& u, const Matrix<T>& v, const Matrix<T>& w, const Matrix<T>& t) {
  const Tensor x = cp4(u, v, w, t);
  const Tensor y = cp3(u, v, khatri_rao(w, t));
  double worst = 0.0;
  for (std::size_t i = 0; i < u.rows; ++i)
    for (std::size_t j = 0; j < v.rows; ++j)
      for (std::size_t k = 0; k < w.rows; ++k)
        for (std::size_t l = 0; l < t.rows; ++l) {
          worst = std::max(worst, std::abs(x(i, j, k, l) - y(i, j, k * t.rows + l)));
        }
  return worst;
}

ComplexMatrix conj(const ComplexMatrix& m) {
  ComplexMatrix out = m;
  for (auto& z : out.data) z = std::conj(z);
  return out;
}

}  // namespace

template <>
RealMatrix random_matrix<double>(std::size_t rows, std::size_t cols, chronokb::Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  RealMatrix m(rows, cols);
  for (auto& x : m.data) x = g(rng);
  return m;
}

template <>
ComplexMatrix random_matrix<cplx>(std::size_t rows, std::size_t cols, chronokb::Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  ComplexMatrix m(rows, cols);
  for (auto& z : m.data) {
    const double re = g(rng);
    z = {re, g(rng)};
  }
  return m;
}

template <class T>
Matrix<T> khatri_rao(const Matrix<T>& a, const Matrix<T>& b) {
  if (a.cols != b.cols) throw std::invalid_argument("khatri_rao: column counts differ");
  Matrix<T> out(a.rows * b.rows, a.cols);
  for (std::size_t i = 0; i < a.rows; ++i)
    for (std::size_t j = 0; j < b.rows; ++j)
      for (std::size_t r = 0; r < a.cols; ++r) out(i * b.rows + j, r) = a(i, r) * b(j, r);
  return out;
}

template RealMatrix khatri_rao(const RealMatrix&, const RealMatrix&);
template ComplexMatrix khatri_rao(const ComplexMatrix&, const ComplexMatrix&);

Tensor cp3(const RealMatrix& a, const RealMatrix& b, const RealMatrix& c) { return cp3_impl(a, b, c); }
Tensor cp3(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c) { return cp3_impl(a, b, c); }
Tensor cp4(const RealMatrix& a, const RealMatrix& b, const RealMatrix& c, const RealMatrix& d) {
  return cp4_impl(a, b, c, d);
}
Tensor cp4(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& c, const ComplexMatrix& d) {
  return cp4_impl(a, b, c, d);
}

double unfolding_check(const RealMatrix& u, const RealMatrix& v, const RealMatrix& w, const RealMatrix& t) {
  return unfolding_impl(u, v, w, t);
}
double unfolding_check(const ComplexMatrix& u, const ComplexMatrix& v, const ComplexMatrix& w,
                       const ComplexMatrix& t) {
  return unfolding_impl(u, v, w, t);
}

ComplexMatrix to_matrix(const chronokb::ComplexTable& table) {
  ComplexMatrix m(table.rows(), table.rank());
  for (std::size_t i = 0; i < table.rows(); ++i)
    for (std::size_t r = 0; r < table.rank(); ++r) m(i, r) = table.at(i, r);
  return m;
}

Tensor dense_tensor(const chronokb::ModelParams& params) {
  const ComplexMatrix u = to_matrix(params.entities);
  const ComplexMatrix v = to_matrix(params.predicates);
  const ComplexMatrix w = conj(u);
  const std::size_t nt = params.timestamps ? params.timestamps->rows() : 1;
  guard(u.rows * v.rows * u.rows * nt);

  if (params.kind == chronokb::ModelKind::TComplEx) return cp4(u, v, w, to_matrix(*params.timestamps));

  const Tensor stat = cp3(u, v, w);
  Tensor x{{u.rows, v.rows, u.rows, nt}, std::vector<double>(u.rows * v.rows * u.rows * nt)};
  std::optional<Tensor> temporal;
  if (params.kind == chronokb::ModelKind::TNTComplEx) {
    temporal = cp4(u, to_matrix(*params.temporal_predicates), w, to_matrix(*params.timestamps));
  }
  std::size_t at = 0;
  for (std::size_t i = 0; i < u.rows; ++i)
    for (std::size_t j = 0; j < v.rows; ++j)
      for (std::size_t k = 0; k < u.rows; ++k)
        for (std::size_t l = 0; l < nt; ++l) x.data[at++] = stat(i, j, k) + (temporal ? (*temporal)(i, j, k, l) : 0.0);
  return x;
}

double naive_score(const chronokb::ModelParams& params, Index s, Index p, Index o, Index t) {
  const auto& U = params.entities;
  const auto& V = params.predicates;
  const auto is = static_cast<std::size_t>(s), ip = static_cast<std::size_t>(p), io = static_cast<std::size_t>(o),
             it = static_cast<std::size_t>(t);
  double total = 0.0;
  for (std::size_t r = 0; r < U.rank(); ++r) {
    cplx pred = V.at(ip, r);
    switch (params.kind) {
      case chronokb::ModelKind::ComplEx: break;
      case chronokb::ModelKind::TComplEx: pred = pred * params.timestamps->at(it, r); break;
      case chronokb::ModelKind::TNTComplEx:
        pred = params.temporal_predicates->at(ip, r) * params.timestamps->at(it, r) + pred;
        break;
    }
    total += (U.at(is, r) * pred * std::conj(U.at(io, r))).real();
  }
  return total;
}

std::vector<double> finite_difference(const std::function<double(std::span<const double>)>& f,
                                      std::span<const double> x, double step) {
  if (!(step > 0.0)) throw std::invalid_argument("finite_difference: step must be positive");
  std::vector<double> point(x.begin(), x.end());
  std::vector<double> grad(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    point[i] = x[i] + step;
    const double up = f(point);
    point[i] = x[i] - step;
    const double down = f(point);
    point[i] = x[i];
    if (!std::isfinite(up) || !std::isfinite(down)) throw std::domain_error("finite_difference: non-finite value");
    grad[i] = (up - down) / (2.0 * step);
  }
  return grad;
}

std::vector<double> richardson_difference(const std::function<double(std::span<const double>)>& f,
                                          std::span<const double> x, double step) {
  const auto coarse = finite_difference(f, x, step);
  const auto fine = finite_difference(f, x, step / 2.0);
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) out[i] = (4.0 * fine[i] - coarse[i]) / 3.0;
  return out;
}

double naive_log_sum_exp(std::span<const double> x) {
  double total = 0.0;
  for (double v : x) total += std::exp(v);
  return std::log(total);
}

std::vector<Index> naive_ranks(const chronokb::ModelParams& params, std::span<const chronokb::RankQuery> queries,
                               std::span<const chronokb::IntervalFact> known, std::size_t base_predicates,
                               chronokb::DateRange range, bool time_aware) {
  const auto base = static_cast<Index>(base_predicates);
  const auto ne = static_cast<Index>(params.entities.rows());
  std::vector<Index> ranks;
  for (const auto& q : queries) {
    std::set<Index> filtered;
    for (const auto& f : known) {
      if (f.p >= base) continue;
      const Index first = f.begin ? *f.begin : range.first;
      const Index last = f.end ? *f.end : range.last;
      if (time_aware && (q.t < first || q.t > last)) continue;
      if (f.s == q.s && f.p == q.p) filtered.insert(f.o);
      if (f.o == q.s && f.p + base == q.p) filtered.insert(f.s);
    }
    const double gold = naive_score(params, q.s, q.p, q.o, q.t);
    Index rank = 1;
    for (Index k = 0; k < ne; ++k) {
      if (k == q.o || filtered.count(k)) continue;
      if (naive_score(params, q.s, q.p, k, q.t) >= gold) ++rank;
    }
    ranks.push_back(rank);
  }
  return ranks;
}

NaiveReport naive_report(std::span<const Index> ranks) {
  NaiveReport r;
  for (Index x : ranks) {
    r.mrr += 1.0 / static_cast<double>(x);
    r.hits1 += x <= 1 ? 1.0 : 0.0;
    r.hits3 += x <= 3 ? 1.0 : 0.0;
    r.hits10 += x <= 10 ? 1.0 : 0.0;
  }
  const double n = static_cast<double>(ranks.size());
  r.mrr /= n;
  r.hits1 /= n;
  r.hits3 /= n;
  r.hits10 /= n;
  return r;
}

double naive_average_precision(std::span<const double> scores, std::span<const std::uint8_t> positive) {
  std::vector<double> thresholds(scores.begin(), scores.end());
  std::sort(thresholds.rbegin(), thresholds.rend());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
  double total_pos = 0.0;
  for (auto p : positive) total_pos += p;
  double ap = 0.0, prev_recall = 0.0;
  for (double tau : thresholds) {
    double tp = 0.0, fp = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (scores[i] >= tau) (positive[i] ? tp : fp) += 1.0;
    }
    const double recall = tp / total_pos;
    ap += (recall - prev_recall) * (tp / (tp + fp));
    prev_recall = recall;
  }
  return ap;
}

}  // namespace oracle
