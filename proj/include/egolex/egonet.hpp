#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "egolex/lexing.hpp"
#include "egolex/meanshift.hpp"
#include "egolex/parallel.hpp"

namespace egolex::egonet {

struct RingWord {
  std::string lemma;
  std::int64_t count = 0;

  bool operator==(const RingWord&) const = default;
};

/// Ego network of words: frequency clusters ranked from the most frequent
/// (ring 0) outwards. Layer i is the union of rings 0..i.
class EgoNetwork {
 public:
  EgoNetwork() = default;
  /// Rings must be ordered innermost first. Words inside a ring are sorted
  /// by descending count, then lemma.
  EgoNetwork(std::string user_id, std::vector<std::vector<RingWord>> rings, double bandwidth = 0.0,
             double window_years = 1.0);

  const std::string& user_id() const { return user_id_; }
  std::size_t tau() const { return rings_.size(); }
  const std::vector<std::vector<RingWord>>& rings() const { return rings_; }
  const std::vector<RingWord>& ring(std::size_t i) const { return rings_.at(i); }
  double bandwidth() const { return bandwidth_; }
  double window_years() const { return window_years_; }

  /// |L_i| for i = 0..tau-1.
  const std::vector<std::size_t>& layer_sizes() const { return layer_sizes_; }
  /// Total occurrences per ring, O(e,r).
  const std::vector<std::int64_t>& ring_occupancy() const { return occupancy_; }
  /// Lemmas of layer i (rings 0..i).
  std::vector<std::string> layer(std::size_t i) const;
  /// Ring index of a lemma, if present.
  std::optional<std::size_t> ring_of(const std::string& lemma) const;
  std::size_t unique_words() const { return layer_sizes_.empty() ? 0 : layer_sizes_.back(); }
  std::int64_t total_occurrences() const;

 private:
  std::string user_id_;
  std::vector<std::vector<RingWord>> rings_;
  std::vector<std::size_t> layer_sizes_;
  std::vector<std::int64_t> occupancy_;
  double bandwidth_ = 0.0;
  double window_years_ = 1.0;
};

struct BuildOptions {
  std::optional<double> bandwidth;  // fixed h; estimated per ego when absent
  double bandwidth_quantile = meanshift::kDefaultQuantile;
};

/// Clusters ln(n / T) of every lemma with mean shift and ranks clusters so
/// that ring 0 holds the most frequent words.
EgoNetwork build_ego_network(const lex::WordCounts& wc, const BuildOptions& opts = {},
                             Exec exec = Exec::serial);

/// Builds networks for all non-empty word counts, preserving order.
std::vector<EgoNetwork> build_all(std::span<const lex::WordCounts> counts, const BuildOptions& opts = {},
                                  Exec exec = Exec::parallel);

/// rho_i = |L_i| / |L_{i-1}| for i >= 1; empty when tau < 2.
std::vector<double> scaling_ratios(std::span<const std::size_t> layer_sizes);
std::vector<double> scaling_ratios(const EgoNetwork& ego);

/// One JSON line per ego: {"user_id", "tau", "rings": [[[lemma, count], ...], ...]},
/// innermost ring first.
void write_egonets_jsonl(const std::filesystem::path& path, std::span<const EgoNetwork> egos);
std::vector<EgoNetwork> read_egonets_jsonl(const std::filesystem::path& path);
std::string to_json_line(const EgoNetwork& ego);
EgoNetwork from_json_line(const std::string& line);

}  // namespace egolex::egonet
