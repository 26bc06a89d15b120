#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "egolex/egonet.hpp"
#include "egolex/parallel.hpp"
#include "egolex/profiles.hpp"

namespace egolex::nullmodel {

using WordDists = std::unordered_map<std::string, topics::WordTopicDistribution>;

/// Ego network with its lemmas shuffled over a fixed sequence of count slots.
/// rings[r][i] holds the lemma now sitting in slot i of ring r, whose count is
/// slot_counts[r][i].
struct NullEgo {
  std::string user_id;
  std::uint64_t seed = 0;
  std::uint64_t replicate = 0;
  std::vector<std::vector<std::string>> rings;
  std::vector<std::vector<std::int64_t>> slot_counts;
  WordDists word_dists;

  std::size_t tau() const { return rings.size(); }
  std::int64_t occupancy(std::size_t ring) const;
};

/// splitmix64-based generator; its whole state is one counter, so streams
/// keyed by (seed, user, replicate) are independent of scheduling.
class Rng {
 public:
  explicit Rng(std::uint64_t key) : state_(key) {}
  std::uint64_t next();
  /// Uniform integer in [0, bound), bound > 0, without modulo bias.
  std::uint64_t below(std::uint64_t bound);

 private:
  std::uint64_t state_;
};

std::uint64_t hash_user(std::string_view user_id);
std::uint64_t stream_key(std::uint64_t seed, std::string_view user_id, std::uint64_t replicate = 0);

/// Uniform random permutation of 0..n-1 (Fisher-Yates).
std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng);

/// Places lemma perm[i] of the ego's slot order (ring 0 first, ring word
/// order within a ring) into slot i. The identity permutation gives back the
/// original network.
NullEgo shuffle_with_permutation(const egonet::EgoNetwork& ego, const WordDists& dists,
                                 std::span<const std::size_t> perm);

/// One draw of the null model for (seed, user_id, replicate).
NullEgo shuffle_ego(const egonet::EgoNetwork& ego, const WordDists& dists, std::uint64_t seed,
                    std::uint64_t replicate = 0);

/// P'_r(c) = sum o'(w) P_w(c) / sum o'(w), over slots whose lemma has a
/// distribution. Throws MetricError when that occupancy is zero.
topics::SemanticProfile null_ring_profile(const NullEgo& ne, std::size_t ring);

/// Occurrences in ring slots whose lemma has a distribution.
std::int64_t weighted_occupancy(const NullEgo& ne, std::size_t ring);

/// shuffle_ego for every ego; tables[i] belongs to egos[i].
std::vector<NullEgo> shuffle_all(std::span<const egonet::EgoNetwork> egos,
                                 std::span<const topics::EgoTopicTable> tables, std::uint64_t seed,
                                 std::uint64_t replicate = 0, Exec exec = Exec::parallel);

}  // namespace egolex::nullmodel
