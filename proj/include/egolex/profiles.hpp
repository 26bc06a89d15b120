#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "egolex/egonet.hpp"
#include "egolex/lexing.hpp"
#include "egolex/topics.hpp"

namespace egolex::topics {

/// Probability distribution over topic ids. Shares are positive.
struct SemanticProfile {
  std::map<TopicId, double> shares;

  double share(TopicId c) const;
  double total() const;
  std::size_t support() const { return shares.size(); }
  bool operator==(const SemanticProfile&) const = default;
};

/// Topic mass accumulated over the occurrences of one lemma.
struct WordTopicMass {
  std::map<TopicId, double> mass;  // sum of P_m(c) over occurrences
  std::int64_t occurrences = 0;
  std::int64_t assigned = 0;       // occurrences whose tweet carries topic mass
};

/// Per-ego lemma -> accumulated topic mass. Built once, shared by every
/// profile of the ego.
class EgoTopicTable {
 public:
  static EgoTopicTable build(const lex::WordCounts& wc, const Assignments& assignments);

  const WordTopicMass* word(const std::string& lemma) const;
  const std::unordered_map<std::string, WordTopicMass>& words() const { return words_; }

 private:
  std::unordered_map<std::string, WordTopicMass> words_;
};

/// Normalizes non-negative masses into a profile; throws MetricError("empty profile")
/// when the total is zero.
SemanticProfile normalize_mass(const std::map<TopicId, double>& mass);

/// P_r(c) = sum over ring occurrences of P_m(w)(c), normalized over topics.
SemanticProfile ring_semantic_profile(const egonet::EgoNetwork& ego, std::size_t ring,
                                      const EgoTopicTable& table);
SemanticProfile ring_semantic_profile(const egonet::EgoNetwork& ego, std::size_t ring,
                                      const lex::WordCounts& wc, const Assignments& assignments);

/// Same formula over every ring of the ego.
SemanticProfile ego_semantic_profile(const egonet::EgoNetwork& ego, const EgoTopicTable& table);
SemanticProfile ego_semantic_profile(const egonet::EgoNetwork& ego, const lex::WordCounts& wc,
                                     const Assignments& assignments);

/// Assigned occurrences of a ring, |W(e,r)| restricted to tweets with topic mass.
std::int64_t assigned_occurrences(const egonet::EgoNetwork& ego, std::size_t ring,
                                  const EgoTopicTable& table);
/// Total topic mass of a ring (equals assigned occurrences in hard mode).
double ring_mass(const egonet::EgoNetwork& ego, std::size_t ring, const EgoTopicTable& table);

struct WordTopicDistribution {
  std::string lemma;
  std::map<TopicId, double> dist;
};

/// Share of a lemma's topic mass per topic. Throws MetricError("unassigned word")
/// when none of its occurrences carries mass.
WordTopicDistribution word_topic_distribution(const EgoTopicTable& table, const std::string& lemma);
WordTopicDistribution word_topic_distribution(const lex::WordCounts& wc, const std::string& lemma,
                                              const Assignments& assignments);

/// Distributions of every lemma with mass, keyed by lemma.
std::unordered_map<std::string, WordTopicDistribution> word_topic_distributions(const EgoTopicTable& table);

}  // namespace egolex::topics
