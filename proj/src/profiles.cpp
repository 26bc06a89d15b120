#include "egolex/profiles.hpp"

#include <fmt/format.h>

#include "egolex/error.hpp"

namespace egolex::topics {
namespace {

void add_ring_mass(const egonet::EgoNetwork& ego, std::size_t ring, const EgoTopicTable& table,
                   std::map<TopicId, double>& acc) {
  for (const auto& w : ego.ring(ring)) {
    if (const auto* m = table.word(w.lemma)) {
      for (const auto& [c, p] : m->mass) acc[c] += p;
    }
  }
}

}  // namespace

double SemanticProfile::share(TopicId c) const {
  auto it = shares.find(c);
  return it == shares.end() ? 0.0 : it->second;
}

double SemanticProfile::total() const {
  double s = 0.0;
  for (const auto& [_, p] : shares) s += p;
  return s;
}

EgoTopicTable EgoTopicTable::build(const lex::WordCounts& wc, const Assignments& assignments) {
  EgoTopicTable t;
  for (const auto& occ : wc.occurrences) {
    auto& entry = t.words_[occ.lemma];
    ++entry.occurrences;
    const auto& dist = assignments.distribution(occ.tweet_id);
    if (dist.empty()) continue;
    ++entry.assigned;
    for (const auto& [c, p] : dist) entry.mass[c] += p;
  }
  return t;
}

const WordTopicMass* EgoTopicTable::word(const std::string& lemma) const {
  auto it = words_.find(lemma);
  return it == words_.end() ? nullptr : &it->second;
}

SemanticProfile normalize_mass(const std::map<TopicId, double>& mass) {
  double total = 0.0;
  for (const auto& [_, m] : mass) total += m;
  if (!(total > 0.0)) throw MetricError("empty profile");
  SemanticProfile p;
  for (const auto& [c, m] : mass) {
    if (m > 0.0) p.shares[c] = m / total;
  }
  return p;
}

SemanticProfile ring_semantic_profile(const egonet::EgoNetwork& ego, std::size_t ring,
                                      const EgoTopicTable& table) {
  if (ring >= ego.tau()) throw MetricError(fmt::format("ring {} does not exist", ring));
  std::map<TopicId, double> acc;
  add_ring_mass(ego, ring, table, acc);
  return normalize_mass(acc);
}

SemanticProfile ring_semantic_profile(const egonet::EgoNetwork& ego, std::size_t ring,
                                      const lex::WordCounts& wc, const Assignments& assignments) {
  return ring_semantic_profile(ego, ring, EgoTopicTable::build(wc, assignments));
}

SemanticProfile ego_semantic_profile(const egonet::EgoNetwork& ego, const EgoTopicTable& table) {
  std::map<TopicId, double> acc;
  for (std::size_t r = 0; r < ego.tau(); ++r) add_ring_mass(ego, r, table, acc);
  return normalize_mass(acc);
}

SemanticProfile ego_semantic_profile(const egonet::EgoNetwork& ego, const lex::WordCounts& wc,
                                     const Assignments& assignments) {
  return ego_semantic_profile(ego, EgoTopicTable::build(wc, assignments));
}

std::int64_t assigned_occurrences(const egonet::EgoNetwork& ego, std::size_t ring,
                                  const EgoTopicTable& table) {
  std::int64_t n = 0;
  for (const auto& w : ego.ring(ring)) {
    if (const auto* m = table.word(w.lemma)) n += m->assigned;
  }
  return n;
}

double ring_mass(const egonet::EgoNetwork& ego, std::size_t ring, const EgoTopicTable& table) {
  double s = 0.0;
  for (const auto& w : ego.ring(ring)) {
    if (const auto* m = table.word(w.lemma)) {
      for (const auto& [_, p] : m->mass) s += p;
    }
  }
  return s;
}

WordTopicDistribution word_topic_distribution(const EgoTopicTable& table, const std::string& lemma) {
  const auto* m = table.word(lemma);
  if (!m) throw MetricError(fmt::format("word '{}' not in ego", lemma));
  WordTopicDistribution d;
  d.lemma = lemma;
  try {
    d.dist = normalize_mass(m->mass).shares;
  } catch (const MetricError&) {
    throw MetricError(fmt::format("unassigned word '{}'", lemma));
  }
  return d;
}

WordTopicDistribution word_topic_distribution(const lex::WordCounts& wc, const std::string& lemma,
                                              const Assignments& assignments) {
  return word_topic_distribution(EgoTopicTable::build(wc, assignments), lemma);
}

std::unordered_map<std::string, WordTopicDistribution> word_topic_distributions(const EgoTopicTable& table) {
  std::unordered_map<std::string, WordTopicDistribution> out;
  for (const auto& [lemma, m] : table.words()) {
    double total = 0.0;
    for (const auto& [_, p] : m.mass) total += p;
    if (total > 0.0) out.emplace(lemma, word_topic_distribution(table, lemma));
  }
  return out;
}

}  // namespace egolex::topics
