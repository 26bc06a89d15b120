#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "egolex/corpus.hpp"
#include "egolex/topics.hpp"

namespace egolex::synth {

/// Planted frequency band: lemmas whose ln(count / T) sits near `log_mean`.
struct Band {
  double log_mean = 0.0;
  std::size_t size = 0;
};

struct Options {
  std::size_t n_egos = 500;
  std::vector<Band> bands;  // any order; defaults to default_bands()
  std::uint64_t seed = 42;
  double bandwidth = 0.3;     // nominal; adjacent bands must be >= 3 apart
  double jitter = 0.1;        // per-lemma uniform log offset in [-jitter, jitter]
  std::size_t n_topics = 12;
  std::size_t words_per_tweet = 10;
  double outlier_fraction = 0.3;
  double size_jitter = 0.2;     // per-ego band size scaled by a factor in [1 - j, 1 + j]
  std::size_t pool_factor = 3;  // global vocabulary per band = factor * size
  Timestamp reference_time = parse_iso8601("2023-01-01T00:00:00Z");
};

/// Six bands, outermost (largest, rarest) first.
std::vector<Band> default_bands();

struct Corpus {
  std::vector<corpus::Tweet> tweets;  // sorted by user, then time
  topics::Assignments assignments{topics::Mode::hard};
  /// Planted rings per user, innermost (most frequent) band first.
  std::vector<std::pair<std::string, std::vector<std::vector<std::string>>>> truth;
};

/// Throws DataError("overlapping bands") when adjacent log means are closer
/// than 3 nominal bandwidths, and on bands that would produce hapaxes.
void validate_bands(std::span<const Band> bands, double bandwidth, double jitter);

/// Deterministic in `opts`. Each ego gets one stopword-only anchor tweet
/// 1.2 years before the reference time and the planted tweets inside the
/// last year, so a one-year window keeps it.
Corpus generate(const Options& opts);

void write_tweets_jsonl(const std::filesystem::path& path, std::span<const corpus::Tweet> tweets);
void write_truth_jsonl(const std::filesystem::path& path, const Corpus& c);
/// tweets.jsonl, assignments.jsonl and truth.jsonl under `dir`.
void write_corpus(const std::filesystem::path& dir, const Corpus& c);

}  // namespace egolex::synth
