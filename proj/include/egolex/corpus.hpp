#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "egolex/timeutil.hpp"

namespace egolex::corpus {

struct Tweet {
  std::string tweet_id;
  std::string user_id;
  Timestamp created_at;
  std::string text;
  std::string lang;
  bool is_retweet = false;
  std::optional<double> cap;
};

/// Facts about an ego's observed timeline, fixed when the ego is created.
/// Filters read these instead of the (possibly windowed) tweet list, which
/// keeps every filter a pure per-ego predicate.
struct ObservationSummary {
  Timestamp first_tweet{};
  Timestamp last_tweet{};
  double largest_gap_months = 0.0;
  std::vector<int> active_months;  // sorted calendar month indices with >= 1 tweet
  std::optional<double> cap;       // max over the ego's tweets
  std::size_t raw_records = 0;     // records in the source file, before language/retweet filters
};

struct Ego {
  std::string user_id;
  std::vector<Tweet> tweets;  // ascending created_at
  ObservationSummary summary;
};

struct Dataset {
  std::vector<Ego> egos;  // ascending user_id
  Timestamp reference_time{};
  std::optional<double> window_years;

  std::size_t tweet_count() const;
};

/// Builds an Ego from unsorted tweets, computing its summary. `raw_records`
/// defaults to the number of tweets.
Ego make_ego(std::string user_id, std::vector<Tweet> tweets,
             std::optional<std::size_t> raw_records = std::nullopt);

/// Reads line-delimited JSON tweets. Non-English records and retweets are
/// dropped. Blank lines are skipped. Throws DataError naming the line for
/// malformed records and for duplicate tweet ids.
Dataset load_timelines(const std::filesystem::path& path, Timestamp reference_time);

/// Same as load_timelines over an in-memory JSONL string.
Dataset parse_timelines(const std::string& jsonl, Timestamp reference_time);

/// Drops abandoned egos (trailing silence longer than both `abandonment_months`
/// and the largest historical gap) and sporadic egos (more than
/// `sporadic_fraction` of the calendar months since the first tweet are empty).
Dataset filter_inactive(const Dataset& ds, double abandonment_months = 6.0,
                        double sporadic_fraction = 0.5);

/// Drops egos observed for less than `t_years` and trims the rest to tweets
/// no older than reference_time - t_years. Idempotent.
Dataset apply_observation_window(const Dataset& ds, double t_years);

/// Drops egos whose CAP exceeds `threshold`. Egos without a CAP are kept.
Dataset filter_by_cap(const Dataset& ds, double threshold = 0.5);

/// Drops egos with fewer than `limit` raw records: their whole history fits
/// in the download limit, so the account may be too young to be stable.
Dataset filter_fully_covered(const Dataset& ds, std::size_t limit = 3200);

// Predicates behind the filters, exposed for reporting.
bool is_abandoned(const Ego& ego, Timestamp reference_time, double abandonment_months);
bool is_sporadic(const Ego& ego, Timestamp reference_time, double sporadic_fraction);
double observed_span_years(const Ego& ego, Timestamp reference_time);

}  // namespace egolex::corpus
