#include "egolex/nullmodel.hpp"

#include <map>

#include <fmt/format.h>

#include "egolex/error.hpp"

namespace egolex::nullmodel {

std::int64_t NullEgo::occupancy(std::size_t ring) const {
  std::int64_t s = 0;
  for (auto c : slot_counts.at(ring)) s += c;
  return s;
}

std::uint64_t Rng::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t Rng::below(std::uint64_t bound) {
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = -bound % bound;
  for (;;) {
    const std::uint64_t x = next();
    if (x >= limit) return x % bound;
  }
}

std::uint64_t hash_user(std::string_view user_id) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : user_id) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t stream_key(std::uint64_t seed, std::string_view user_id, std::uint64_t replicate) {
  Rng mix(seed);
  std::uint64_t k = mix.next() ^ hash_user(user_id);
  Rng mix2(k + replicate * 0xd1b54a32d192ed03ULL);
  return mix2.next();
}

std::vector<std::size_t> random_permutation(std::size_t n, Rng& rng) {
  std::vector<std::size_t> p(n);
  for (std::size_t i = 0; i < n; ++i) p[i] = i;
  for (std::size_t i = n; i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.below(i));
    std::swap(p[i - 1], p[j]);
  }
  return p;
}

NullEgo shuffle_with_permutation(const egonet::EgoNetwork& ego, const WordDists& dists,
                                 std::span<const std::size_t> perm) {
  std::vector<std::string> lemmas;
  for (const auto& ring : ego.rings()) {
    for (const auto& w : ring) lemmas.push_back(w.lemma);
  }
  if (perm.size() != lemmas.size()) {
    throw Error(fmt::format("permutation of size {} for {} words", perm.size(), lemmas.size()));
  }
  NullEgo ne;
  ne.user_id = ego.user_id();
  std::size_t slot = 0;
  for (const auto& ring : ego.rings()) {
    auto& names = ne.rings.emplace_back();
    auto& counts = ne.slot_counts.emplace_back();
    for (const auto& w : ring) {
      names.push_back(lemmas.at(perm[slot++]));
      counts.push_back(w.count);
    }
  }
  for (const auto& l : lemmas) {
    if (auto it = dists.find(l); it != dists.end()) ne.word_dists.emplace(l, it->second);
  }
  return ne;
}

NullEgo shuffle_ego(const egonet::EgoNetwork& ego, const WordDists& dists, std::uint64_t seed,
                    std::uint64_t replicate) {
  Rng rng(stream_key(seed, ego.user_id(), replicate));
  const auto perm = random_permutation(ego.unique_words(), rng);
  auto ne = shuffle_with_permutation(ego, dists, perm);
  ne.seed = seed;
  ne.replicate = replicate;
  return ne;
}

std::int64_t weighted_occupancy(const NullEgo& ne, std::size_t ring) {
  std::int64_t s = 0;
  const auto& names = ne.rings.at(ring);
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (ne.word_dists.count(names[i])) s += ne.slot_counts[ring][i];
  }
  return s;
}

topics::SemanticProfile null_ring_profile(const NullEgo& ne, std::size_t ring) {
  if (ring >= ne.tau()) throw MetricError(fmt::format("ring {} does not exist", ring));
  const auto& names = ne.rings[ring];
  std::map<topics::TopicId, double> acc;
  double weight = 0.0;
  for (std::size_t i = 0; i < names.size(); ++i) {
    auto it = ne.word_dists.find(names[i]);
    if (it == ne.word_dists.end()) continue;
    const auto o = static_cast<double>(ne.slot_counts[ring][i]);
    weight += o;
    for (const auto& [c, p] : it->second.dist) acc[c] += o * p;
  }
  if (!(weight > 0.0)) throw MetricError(fmt::format("ring {} has no assigned occupancy", ring));
  topics::SemanticProfile prof;
  for (const auto& [c, m] : acc) {
    if (m > 0.0) prof.shares[c] = m / weight;
  }
  return prof;
}

std::vector<NullEgo> shuffle_all(std::span<const egonet::EgoNetwork> egos,
                                 std::span<const topics::EgoTopicTable> tables, std::uint64_t seed,
                                 std::uint64_t replicate, Exec exec) {
  if (egos.size() != tables.size()) throw Error("one topic table per ego required");
  std::vector<NullEgo> out(egos.size());
  const auto n = static_cast<std::ptrdiff_t>(egos.size());
  auto one = [&](std::ptrdiff_t i) {
    const auto dists = topics::word_topic_distributions(tables[static_cast<std::size_t>(i)]);
    out[static_cast<std::size_t>(i)] = shuffle_ego(egos[static_cast<std::size_t>(i)], dists, seed, replicate);
  };
  if (exec == Exec::serial) {
    for (std::ptrdiff_t i = 0; i < n; ++i) one(i);
  } else {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < n; ++i) one(i);
  }
  return out;
}

}  // namespace egolex::nullmodel
