#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "egolex/parallel.hpp"

namespace egolex::tfidf {

using TermId = std::uint32_t;
/// Raw term counts of one document, sorted by term id, counts > 0.
using TermCounts = std::vector<std::pair<TermId, std::int64_t>>;
/// L2-normalized weights sorted by term id. An all-zero document is empty.
using SparseVector = std::vector<std::pair<TermId, double>>;

/// tf = raw count, idf = ln((1 + N) / (1 + df)) + 1 with N = docs.size().
std::vector<SparseVector> vectorize(std::span<const TermCounts> docs);

/// Unnormalized tf-idf weights, for reporting characteristic terms.
std::vector<SparseVector> raw_weights(std::span<const TermCounts> docs);

double dot(const SparseVector& a, const SparseVector& b);

/// Cosine between two normalized vectors; 0 when either is empty.
inline double cosine(const SparseVector& a, const SparseVector& b) { return dot(a, b); }

/// Dense n x n cosine matrix, row-major, unit diagonal for non-empty documents.
std::vector<double> similarity_matrix_serial(std::span<const SparseVector> vecs);
std::vector<double> similarity_matrix_parallel(std::span<const SparseVector> vecs);

/// Cosines of vecs[idx] against every vector (entry idx included).
std::vector<double> similarities_to(std::span<const SparseVector> vecs, std::size_t idx,
                                    Exec exec = Exec::parallel);

/// Mean cosine over unordered pairs i < j; 0 for fewer than two documents.
double mean_pairwise_similarity(std::span<const SparseVector> vecs, Exec exec = Exec::parallel);

TermCounts merge_counts(const TermCounts& a, const TermCounts& b);

}  // namespace egolex::tfidf
