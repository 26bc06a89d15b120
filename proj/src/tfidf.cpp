#include "egolex/tfidf.hpp"

#include <cmath>
#include <unordered_map>

namespace egolex::tfidf {
namespace {

std::unordered_map<TermId, std::int64_t> document_frequencies(std::span<const TermCounts> docs) {
  std::unordered_map<TermId, std::int64_t> df;
  for (const auto& d : docs) {
    for (const auto& [term, _] : d) ++df[term];
  }
  return df;
}

}  // namespace

std::vector<SparseVector> raw_weights(std::span<const TermCounts> docs) {
  const auto df = document_frequencies(docs);
  const double n = static_cast<double>(docs.size());
  std::vector<SparseVector> out;
  out.reserve(docs.size());
  for (const auto& d : docs) {
    SparseVector v;
    v.reserve(d.size());
    for (const auto& [term, count] : d) {
      const double idf = std::log((1.0 + n) / (1.0 + static_cast<double>(df.at(term)))) + 1.0;
      v.emplace_back(term, static_cast<double>(count) * idf);
    }
    out.push_back(std::move(v));
  }
  return out;
}

std::vector<SparseVector> vectorize(std::span<const TermCounts> docs) {
  auto vecs = raw_weights(docs);
  for (auto& v : vecs) {
    double norm = 0.0;
    for (const auto& [_, w] : v) norm += w * w;
    norm = std::sqrt(norm);
    if (norm == 0.0) {
      v.clear();
      continue;
    }
    for (auto& [_, w] : v) w /= norm;
  }
  return vecs;
}

double dot(const SparseVector& a, const SparseVector& b) {
  double s = 0.0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (i->first < j->first) {
      ++i;
    } else if (j->first < i->first) {
      ++j;
    } else {
      s += i->second * j->second;
      ++i;
      ++j;
    }
  }
  return s;
}

std::vector<double> similarity_matrix_serial(std::span<const SparseVector> vecs) {
  const std::size_t n = vecs.size();
  std::vector<double> m(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      const double s = dot(vecs[i], vecs[j]);
      m[i * n + j] = s;
      m[j * n + i] = s;
    }
  }
  return m;
}

std::vector<double> similarity_matrix_parallel(std::span<const SparseVector> vecs) {
  const std::size_t n = vecs.size();
  std::vector<double> m(n * n, 0.0);
  const auto rows = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t ii = 0; ii < rows; ++ii) {
    const auto i = static_cast<std::size_t>(ii);
    for (std::size_t j = i; j < n; ++j) {
      const double s = dot(vecs[i], vecs[j]);
      m[i * n + j] = s;
      m[j * n + i] = s;
    }
  }
  return m;
}

std::vector<double> similarities_to(std::span<const SparseVector> vecs, std::size_t idx, Exec exec) {
  std::vector<double> out(vecs.size());
  const auto n = static_cast<std::ptrdiff_t>(vecs.size());
  if (exec == Exec::serial) {
    for (std::ptrdiff_t j = 0; j < n; ++j) out[j] = dot(vecs[idx], vecs[j]);
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) out[j] = dot(vecs[idx], vecs[j]);
  }
  return out;
}

double mean_pairwise_similarity(std::span<const SparseVector> vecs, Exec exec) {
  const std::size_t n = vecs.size();
  if (n < 2) return 0.0;
  const auto m = exec == Exec::serial ? similarity_matrix_serial(vecs) : similarity_matrix_parallel(vecs);
  // Row-ordered summation keeps the result independent of the thread count.
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) s += m[i * n + j];
  }
  return s / (static_cast<double>(n) * static_cast<double>(n - 1) / 2.0);
}

TermCounts merge_counts(const TermCounts& a, const TermCounts& b) {
  TermCounts out;
  out.reserve(a.size() + b.size());
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() || j != b.end()) {
    if (j == b.end() || (i != a.end() && i->first < j->first)) {
      out.push_back(*i++);
    } else if (i == a.end() || j->first < i->first) {
      out.push_back(*j++);
    } else {
      out.emplace_back(i->first, i->second + j->second);
      ++i;
      ++j;
    }
  }
  return out;
}

}  // namespace egolex::tfidf
