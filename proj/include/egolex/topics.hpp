#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "egolex/parallel.hpp"

namespace egolex::topics {

using TopicId = int;
inline constexpr TopicId kOutlier = -1;
inline constexpr double kMassTolerance = 1e-6;

enum class Mode { hard, soft };

Mode parse_mode(const std::string& s);
const char* to_string(Mode m);

/// Sparse topic probabilities sorted by topic id, entries > 0.
using TopicVector = std::vector<std::pair<TopicId, double>>;

struct TopicAssignment {
  std::string tweet_id;
  Mode mode = Mode::hard;
  TopicId hard_label = kOutlier;  // hard mode only
  TopicVector probs;              // hard: one-hot of the label, empty for outliers

  double mass() const;
};

/// Per-tweet topic assignments in one mode. Tweets without a record are
/// outliers (no topic mass).
class Assignments {
 public:
  Assignments() = default;
  explicit Assignments(Mode mode) : mode_(mode) {}

  Mode mode() const { return mode_; }
  std::size_t size() const { return records_.size(); }
  /// Throws DataError on duplicate tweet ids or a mode mismatch.
  void add(TopicAssignment a);
  const TopicAssignment* find(const std::string& tweet_id) const;
  /// Topic probabilities of a tweet (empty for outliers and unknown tweets).
  const TopicVector& distribution(const std::string& tweet_id) const;
  /// Hard label, kOutlier when unknown.
  TopicId label(const std::string& tweet_id) const;
  /// All topic ids carrying mass anywhere, sorted.
  std::set<TopicId> topic_ids() const;
  /// Records sorted by tweet id.
  std::vector<const TopicAssignment*> sorted() const;

 private:
  Mode mode_ = Mode::hard;
  std::unordered_map<std::string, TopicAssignment> records_;
};

/// Reads assignments.jsonl. Hard: {"tweet_id": str, "topic": int}; soft:
/// {"tweet_id": str, "probs": {"<int>": float}}. When `universe` is given,
/// ids outside it are rejected; ids below -1 (hard) or below 0 (soft) are
/// always rejected, as are soft vectors summing above 1 + 1e-6.
Assignments load_topic_assignments(const std::filesystem::path& path, Mode mode,
                                   const std::optional<std::set<TopicId>>& universe = std::nullopt);
Assignments parse_topic_assignments(const std::string& jsonl, Mode mode,
                                    const std::optional<std::set<TopicId>>& universe = std::nullopt);
void write_topic_assignments(const std::filesystem::path& path, const Assignments& a);

/// Hard labels from soft vectors: argmax (lowest id on ties), outlier when the vector is empty.
Assignments harden(const Assignments& soft);

/// Lemmas of each tweet, the input of the per-topic documents.
using TweetLemmas = std::unordered_map<std::string, std::vector<std::string>>;

struct MergeStep {
  TopicId from = 0;
  TopicId into = 0;
  double similarity = 0.0;                // cosine between the merged pair
  double mean_pairwise_similarity = 0.0;  // over all remaining topic pairs, after the merge
  std::size_t topics_after = 0;
};

struct TopicModel {
  std::vector<TopicId> topic_ids;
  std::vector<MergeStep> trace;
  double initial_mean_similarity = 0.0;
  std::map<TopicId, std::map<std::string, std::int64_t>> documents;
  std::map<TopicId, std::size_t> hard_sizes;

  /// Highest tf-idf terms per topic, ties broken by lemma.
  std::map<TopicId, std::vector<std::pair<std::string, double>>> top_terms(std::size_t k) const;
};

struct MergeResult {
  Assignments hard;
  std::optional<Assignments> soft;
  TopicModel model;
};

/// Reduces the topic set to `target` topics. Each step merges the smallest
/// topic (fewest hard tweets, lowest id on ties) into the topic whose
/// tf-idf document is most similar (lowest id on ties); the merged topic keeps
/// the absorbing topic's id. `soft`, when given, follows the same merges with
/// probabilities added. A target at or above the current count is a no-op.
MergeResult merge_topics(const Assignments& hard, const TweetLemmas& docs, std::size_t target,
                         const Assignments* soft = nullptr, Exec exec = Exec::parallel);

/// Replays a merge trace: labels are relabelled and probabilities of merged
/// topics are summed.
Assignments apply_merge_trace(const Assignments& a, std::span<const MergeStep> trace);

void write_topic_model_json(const std::filesystem::path& path, const TopicModel& model,
                            std::size_t top_k = 10);

}  // namespace egolex::topics
