#include "egolex/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <unordered_set>

#include <fmt/format.h>
#include <json.hpp>

#include "egolex/error.hpp"

namespace egolex::corpus {
namespace {

using nlohmann::json;

const std::set<std::string> kAllowedKeys = {"tweet_id", "user_id",    "created_at", "text",
                                            "lang",     "is_retweet", "cap"};

Tweet parse_record(const std::string& line, std::size_t line_no, Timestamp reference_time) {
  auto fail = [line_no](const std::string& why) -> DataError {
    return DataError(fmt::format("line {}: {}", line_no, why));
  };
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw fail(fmt::format("invalid JSON ({})", e.what()));
  }
  if (!obj.is_object()) throw fail("record is not a JSON object");
  for (const auto& [key, _] : obj.items()) {
    if (!kAllowedKeys.contains(key)) throw fail(fmt::format("unexpected key '{}'", key));
  }
  auto require_string = [&](const char* key) -> std::string {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string()) throw fail(fmt::format("'{}' must be a string", key));
    return it->get<std::string>();
  };
  Tweet t;
  t.tweet_id = require_string("tweet_id");
  t.user_id = require_string("user_id");
  if (t.tweet_id.empty() || t.user_id.empty()) throw fail("empty tweet_id or user_id");
  try {
    t.created_at = parse_iso8601(require_string("created_at"));
  } catch (const DataError& e) {
    throw fail(e.what());
  }
  if (t.created_at > reference_time) {
    throw fail("created_at is after the reference time");
  }
  t.text = require_string("text");
  t.lang = require_string("lang");
  auto rt = obj.find("is_retweet");
  if (rt == obj.end() || !rt->is_boolean()) throw fail("'is_retweet' must be a boolean");
  t.is_retweet = rt->get<bool>();
  if (auto cap = obj.find("cap"); cap != obj.end() && !cap->is_null()) {
    if (!cap->is_number()) throw fail("'cap' must be a number");
    t.cap = cap->get<double>();
  }
  return t;
}

Dataset parse_stream(std::istream& in, Timestamp reference_time) {
  std::map<std::string, std::vector<Tweet>> by_user;
  std::map<std::string, std::size_t> raw_counts;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Tweet t = parse_record(line, line_no, reference_time);
    if (!seen_ids.insert(t.tweet_id).second) {
      throw DataError(fmt::format("line {}: duplicate tweet_id '{}'", line_no, t.tweet_id));
    }
    ++raw_counts[t.user_id];
    if (t.lang != "en" || t.is_retweet) continue;
    by_user[t.user_id].push_back(std::move(t));
  }
  Dataset ds;
  ds.reference_time = reference_time;
  for (auto& [user, tweets] : by_user) {
    ds.egos.push_back(make_ego(user, std::move(tweets), raw_counts[user]));
  }
  return ds;
}

Dataset keep_if(const Dataset& ds, auto&& pred) {
  Dataset out;
  out.reference_time = ds.reference_time;
  out.window_years = ds.window_years;
  for (const auto& ego : ds.egos) {
    if (pred(ego)) out.egos.push_back(ego);
  }
  return out;
}

}  // namespace

std::size_t Dataset::tweet_count() const {
  std::size_t n = 0;
  for (const auto& e : egos) n += e.tweets.size();
  return n;
}

Ego make_ego(std::string user_id, std::vector<Tweet> tweets, std::optional<std::size_t> raw_records) {
  std::sort(tweets.begin(), tweets.end(), [](const Tweet& a, const Tweet& b) {
    return a.created_at != b.created_at ? a.created_at < b.created_at : a.tweet_id < b.tweet_id;
  });
  Ego ego;
  ego.user_id = std::move(user_id);
  ObservationSummary& s = ego.summary;
  s.raw_records = raw_records.value_or(tweets.size());
  if (!tweets.empty()) {
    s.first_tweet = tweets.front().created_at;
    s.last_tweet = tweets.back().created_at;
  }
  std::set<int> months;
  for (std::size_t i = 0; i < tweets.size(); ++i) {
    months.insert(calendar_month_index(tweets[i].created_at));
    if (i > 0) {
      s.largest_gap_months = std::max(
          s.largest_gap_months, months_between(tweets[i - 1].created_at, tweets[i].created_at));
    }
    if (tweets[i].cap) s.cap = std::max(s.cap.value_or(*tweets[i].cap), *tweets[i].cap);
  }
  s.active_months.assign(months.begin(), months.end());
  ego.tweets = std::move(tweets);
  return ego;
}

Dataset load_timelines(const std::filesystem::path& path, Timestamp reference_time) {
  std::ifstream in(path);
  if (!in) throw DataError(fmt::format("cannot open '{}'", path.string()));
  return parse_stream(in, reference_time);
}

Dataset parse_timelines(const std::string& jsonl, Timestamp reference_time) {
  std::istringstream in(jsonl);
  return parse_stream(in, reference_time);
}

bool is_abandoned(const Ego& ego, Timestamp reference_time, double abandonment_months) {
  const double trailing = months_between(ego.summary.last_tweet, reference_time);
  return trailing > std::max(abandonment_months, ego.summary.largest_gap_months);
}

bool is_sporadic(const Ego& ego, Timestamp reference_time, double sporadic_fraction) {
  const int first = calendar_month_index(ego.summary.first_tweet);
  const int last = calendar_month_index(reference_time);
  const int total = last - first + 1;
  if (total <= 0) return false;
  const auto active = static_cast<int>(std::count_if(
      ego.summary.active_months.begin(), ego.summary.active_months.end(),
      [&](int m) { return m >= first && m <= last; }));
  const int inactive = total - active;
  return static_cast<double>(inactive) > sporadic_fraction * total;
}

double observed_span_years(const Ego& ego, Timestamp reference_time) {
  return years_between(ego.summary.first_tweet, reference_time);
}

Dataset filter_inactive(const Dataset& ds, double abandonment_months, double sporadic_fraction) {
  return keep_if(ds, [&](const Ego& e) {
    return !e.tweets.empty() && !is_abandoned(e, ds.reference_time, abandonment_months) &&
           !is_sporadic(e, ds.reference_time, sporadic_fraction);
  });
}

Dataset apply_observation_window(const Dataset& ds, double t_years) {
  if (!(t_years > 0.0)) throw DataError("observation window must be positive");
  const Timestamp cutoff = minus_years(ds.reference_time, t_years);
  Dataset out;
  out.reference_time = ds.reference_time;
  out.window_years = t_years;
  for (const auto& ego : ds.egos) {
    if (ego.summary.first_tweet > cutoff) continue;  // observed for less than T
    Ego kept;
    kept.user_id = ego.user_id;
    kept.summary = ego.summary;
    std::copy_if(ego.tweets.begin(), ego.tweets.end(), std::back_inserter(kept.tweets),
                 [&](const Tweet& t) { return t.created_at >= cutoff; });
    if (kept.tweets.empty()) continue;
    out.egos.push_back(std::move(kept));
  }
  return out;
}

Dataset filter_by_cap(const Dataset& ds, double threshold) {
  if (!(threshold >= 0.0 && threshold <= 1.0)) throw DataError("CAP threshold must be in [0,1]");
  for (const auto& ego : ds.egos) {
    for (const auto& t : ego.tweets) {
      if (t.cap && !(*t.cap >= 0.0 && *t.cap <= 1.0)) {
        throw DataError(fmt::format("tweet '{}': cap {} outside [0,1]", t.tweet_id, *t.cap));
      }
    }
    if (ego.summary.cap && !(*ego.summary.cap >= 0.0 && *ego.summary.cap <= 1.0)) {
      throw DataError(fmt::format("ego '{}': cap {} outside [0,1]", ego.user_id, *ego.summary.cap));
    }
  }
  return keep_if(ds, [&](const Ego& e) { return !(e.summary.cap && *e.summary.cap > threshold); });
}

Dataset filter_fully_covered(const Dataset& ds, std::size_t limit) {
  return keep_if(ds, [&](const Ego& e) { return e.summary.raw_records >= limit; });
}

}  // namespace egolex::corpus
