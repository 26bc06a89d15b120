#include <doctest.h>

#include <algorithm>
#include <chrono>

#include "egolex/corpus.hpp"
#include "egolex/error.hpp"
#include "support.hpp"

using namespace egolex;
using namespace egolex::corpus;
using testing::tweet_json;

namespace {

const Timestamp kRef = parse_iso8601("2023-01-15T00:00:00Z");

Tweet tweet_at(const std::string& id, const std::string& user, Timestamp t, std::optional<double> cap = {}) {
  Tweet tw;
  tw.tweet_id = id;
  tw.user_id = user;
  tw.created_at = t;
  tw.text = "x";
  tw.lang = "en";
  tw.cap = cap;
  return tw;
}

Timestamp days_before(Timestamp t, double days) {
  return t - std::chrono::seconds(static_cast<std::int64_t>(days * kSecondsPerDay));
}

bool same(const Dataset& a, const Dataset& b) {
  if (a.egos.size() != b.egos.size() || a.reference_time != b.reference_time) return false;
  for (std::size_t i = 0; i < a.egos.size(); ++i) {
    const auto& x = a.egos[i];
    const auto& y = b.egos[i];
    if (x.user_id != y.user_id || x.tweets.size() != y.tweets.size()) return false;
    for (std::size_t j = 0; j < x.tweets.size(); ++j) {
      if (x.tweets[j].tweet_id != y.tweets[j].tweet_id || x.tweets[j].created_at != y.tweets[j].created_at ||
          x.tweets[j].text != y.tweets[j].text) {
        return false;
      }
    }
  }
  return true;
}

// Random egos with spans up to 4 years, random gaps, optional caps.
Dataset random_dataset(testing::Gen& g, std::size_t n_egos) {
  Dataset ds;
  ds.reference_time = kRef;
  int id = 0;
  for (std::size_t e = 0; e < n_egos; ++e) {
    const std::string user = fmt::format("u{:03}", e);
    const double span_days = g.uniform(10, 4 * 365.25);
    const double end_days = g.uniform(0, 300);
    const auto n = static_cast<std::size_t>(g.integer(1, 40));
    std::optional<double> cap;
    if (g.uniform() < 0.7) cap = g.uniform();
    std::vector<Tweet> tweets;
    for (std::size_t k = 0; k < n; ++k) {
      const double d = k == 0 ? end_days + span_days : g.uniform(end_days, end_days + span_days);
      tweets.push_back(tweet_at(fmt::format("t{}", id++), user, days_before(kRef, d), cap));
    }
    ds.egos.push_back(make_ego(user, std::move(tweets)));
  }
  return ds;
}

}  // namespace

TEST_CASE("timestamps parse and format as UTC") {
  const auto t = parse_iso8601("2021-03-04T05:06:07Z");
  CHECK(format_iso8601(t) == "2021-03-04T05:06:07Z");
  CHECK(parse_iso8601("2021-03-04T05:06:07+00:00") == t);
  CHECK(parse_iso8601("2021-03-04T05:06:07") == t);
  CHECK_THROWS_AS(parse_iso8601("2021-03-04T05:06:07+02:00"), DataError);
  CHECK_THROWS_AS(parse_iso8601("2021-13-04T05:06:07Z"), DataError);
  CHECK_THROWS_AS(parse_iso8601("yesterday"), DataError);
  CHECK(calendar_month_index(parse_iso8601("2021-12-31T23:59:59Z")) + 1 ==
        calendar_month_index(parse_iso8601("2022-01-01T00:00:00Z")));
}

TEST_CASE("load keeps English non-retweets") {
  std::string s;
  s += tweet_json("1", "a", "2022-01-01T00:00:00Z");
  s += tweet_json("2", "a", "2022-01-02T00:00:00Z");
  s += tweet_json("3", "b", "2022-01-03T00:00:00Z");
  s += tweet_json("4", "b", "2022-01-04T00:00:00Z", "bonjour", "fr");
  auto ds = parse_timelines(s, kRef);
  CHECK(ds.tweet_count() == 3);
  REQUIRE(ds.egos.size() == 2);
  CHECK(ds.egos[0].user_id == "a");
  CHECK(ds.egos[1].summary.raw_records == 2);

  std::string r;
  for (int i = 0; i < 5; ++i) r += tweet_json(std::to_string(i), "a", "2022-01-01T00:00:00Z", "x", "en", i < 2);
  CHECK(parse_timelines(r, kRef).tweet_count() == 3);
  CHECK(parse_timelines("", kRef).egos.empty());
}

TEST_CASE("load sorts each timeline by time") {
  std::string s;
  s += tweet_json("b", "u", "2022-05-01T00:00:00Z");
  s += tweet_json("a", "u", "2022-01-01T00:00:00Z");
  const auto ds = parse_timelines(s, kRef);
  CHECK(ds.egos[0].tweets[0].tweet_id == "a");
}

TEST_CASE("malformed records name the line") {
  std::string s = tweet_json("1", "a", "2022-01-01T00:00:00Z") + "\n{\"tweet_id\": 3}\n";
  try {
    parse_timelines(s, kRef);
    FAIL("expected an error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_timelines("not json\n", kRef), DataError);
  CHECK_THROWS_AS(parse_timelines(tweet_json("1", "a", "2022-01-01T00:00:00Z") +
                                      tweet_json("1", "b", "2022-01-01T00:00:00Z"),
                                  kRef),
                  DataError);
  CHECK_THROWS_AS(parse_timelines(tweet_json("1", "a", "2024-01-01T00:00:00Z"), kRef), DataError);
  CHECK_THROWS_AS(parse_timelines(R"({"tweet_id":"1","user_id":"a","created_at":"2022-01-01T00:00:00Z","text":"x","lang":"en","is_retweet":false,"extra":1})"
                                  "\n",
                                  kRef),
                  DataError);
}

TEST_CASE("abandoned and sporadic egos are dropped") {
  Dataset ds;
  ds.reference_time = kRef;
  // Monthly tweets, last one 8 months ago: trailing silence beats both 6 months and the 1-month gaps.
  std::vector<Tweet> abandoned;
  for (int m = 0; m < 12; ++m) abandoned.push_back(tweet_at(fmt::format("a{}", m), "a", days_before(kRef, 243 + 30.44 * m)));
  ds.egos.push_back(make_ego("a", abandoned));
  // Every month up to now.
  std::vector<Tweet> regular;
  for (int m = 0; m < 24; ++m) regular.push_back(tweet_at(fmt::format("r{}", m), "r", days_before(kRef, 2 + 30.44 * m)));
  ds.egos.push_back(make_ego("r", regular));
  // 20 active months out of 24 calendar months (Feb 2021 .. Jan 2023), last tweet a month ago.
  std::vector<Tweet> gappy;
  int k = 0;
  for (int y = 2021; y <= 2022; ++y) {
    for (int m = 1; m <= 12; ++m) {
      if (y == 2021 && m == 1) continue;
      if ((y == 2021 && (m == 4 || m == 5 || m == 6)) || (y == 2022 && m == 8)) continue;
      gappy.push_back(tweet_at(fmt::format("g{}", k++), "s", parse_iso8601(fmt::format("{}-{:02}-15T00:00:00Z", y, m))));
    }
  }
  REQUIRE(gappy.size() == 19);
  gappy.push_back(tweet_at("g-last", "s", parse_iso8601("2022-12-14T00:00:00Z")));
  ds.egos.push_back(make_ego("s", gappy));
  CHECK_FALSE(is_sporadic(ds.egos[2], kRef, 0.5));

  const auto kept = filter_inactive(ds);
  std::vector<std::string> users;
  for (const auto& e : kept.egos) users.push_back(e.user_id);
  CHECK(users == std::vector<std::string>{"r", "s"});

  // Two tweets two years apart with nothing since: mostly empty months.
  Dataset sp;
  sp.reference_time = kRef;
  sp.egos.push_back(make_ego("z", {tweet_at("z1", "z", days_before(kRef, 700)), tweet_at("z2", "z", days_before(kRef, 3))}));
  CHECK(is_sporadic(sp.egos[0], kRef, 0.5));
  CHECK(filter_inactive(sp).egos.empty());
}

TEST_CASE("observation window drops short egos and trims the rest") {
  Dataset ds;
  ds.reference_time = kRef;
  ds.egos.push_back(make_ego("short", {tweet_at("s1", "short", days_before(kRef, 180)),
                                       tweet_at("s2", "short", days_before(kRef, 1))}));
  std::vector<Tweet> longer;
  for (int d = 0; d < 3 * 365; d += 30) longer.push_back(tweet_at(fmt::format("l{}", d), "long", days_before(kRef, d + 1)));
  ds.egos.push_back(make_ego("long", longer));
  const auto w = apply_observation_window(ds, 1.0);
  REQUIRE(w.egos.size() == 1);
  CHECK(w.egos[0].user_id == "long");
  CHECK(w.window_years == 1.0);
  const auto cutoff = minus_years(kRef, 1.0);
  for (const auto& t : w.egos[0].tweets) CHECK(t.created_at >= cutoff);
  CHECK(w.egos[0].tweets.size() == 13);
  CHECK_THROWS_AS(apply_observation_window(ds, 0.0), DataError);
}

TEST_CASE("window kept-count matches an independent span computation") {
  testing::Gen g(7);
  const auto ds = random_dataset(g, 100);
  for (double t : {0.5, 1.0, 2.0, 3.0}) {
    std::size_t expected = 0;
    const auto limit = std::chrono::seconds(static_cast<std::int64_t>(t * kDaysPerYear * kSecondsPerDay));
    for (const auto& e : ds.egos) {
      const auto first = std::min_element(e.tweets.begin(), e.tweets.end(), [](const Tweet& a, const Tweet& b) {
                           return a.created_at < b.created_at;
                         })->created_at;
      const bool long_enough = kRef - first >= limit;
      const bool has_recent = std::any_of(e.tweets.begin(), e.tweets.end(),
                                          [&](const Tweet& tw) { return kRef - tw.created_at <= limit; });
      expected += long_enough && has_recent ? 1 : 0;
    }
    CHECK(apply_observation_window(ds, t).egos.size() == expected);
  }
}

TEST_CASE("cap filter") {
  Dataset ds;
  ds.reference_time = kRef;
  ds.egos.push_back(make_ego("bot", {tweet_at("b", "bot", days_before(kRef, 1), 0.7)}));
  ds.egos.push_back(make_ego("none", {tweet_at("n", "none", days_before(kRef, 1))}));
  ds.egos.push_back(make_ego("low", {tweet_at("l", "low", days_before(kRef, 1), 0.2)}));
  const auto kept = filter_by_cap(ds, 0.5);
  REQUIRE(kept.egos.size() == 2);
  CHECK(kept.egos[0].user_id == "none");
  CHECK(kept.egos[1].user_id == "low");
  ds.egos.push_back(make_ego("bad", {tweet_at("x", "bad", days_before(kRef, 1), 1.5)}));
  CHECK_THROWS_AS(filter_by_cap(ds, 0.5), DataError);
  CHECK_THROWS_AS(filter_by_cap(kept, 1.5), DataError);

  testing::Gen g(3);
  const auto rnd = random_dataset(g, 100);
  std::size_t expected = 0;
  for (const auto& e : rnd.egos) {
    double mx = -1;
    for (const auto& t : e.tweets) mx = std::max(mx, t.cap.value_or(-1));
    expected += mx <= 0.5 ? 1 : 0;
  }
  CHECK(filter_by_cap(rnd, 0.5).egos.size() == expected);
}

TEST_CASE("fully covered timelines are dropped on request") {
  Dataset ds;
  ds.reference_time = kRef;
  ds.egos.push_back(make_ego("few", {tweet_at("f", "few", days_before(kRef, 1))}));
  ds.egos.push_back(make_ego("many", {tweet_at("m", "many", days_before(kRef, 1))}, 3200));
  const auto kept = filter_fully_covered(ds);
  REQUIRE(kept.egos.size() == 1);
  CHECK(kept.egos[0].user_id == "many");
}

TEST_CASE("windowing is idempotent and filters commute") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    testing::Gen g(seed);
    const auto ds = random_dataset(g, 40);
    const auto once = apply_observation_window(ds, 1.0);
    CHECK(same(once, apply_observation_window(once, 1.0)));

    auto inactive = [](const Dataset& d) { return filter_inactive(d); };
    auto cap = [](const Dataset& d) { return filter_by_cap(d, 0.5); };
    auto window = [](const Dataset& d) { return apply_observation_window(d, 1.0); };
    const auto a = window(cap(inactive(ds)));
    CHECK(same(a, inactive(cap(window(ds)))));
    CHECK(same(a, cap(window(inactive(ds)))));
    CHECK(same(a, window(inactive(cap(ds)))));
  }
}

TEST_CASE("filters never rewrite tweets") {
  testing::Gen g(11);
  const auto ds = random_dataset(g, 30);
  const auto w = apply_observation_window(filter_inactive(ds), 1.0);
  for (const auto& e : w.egos) {
    const auto& orig = *std::find_if(ds.egos.begin(), ds.egos.end(), [&](const Ego& o) { return o.user_id == e.user_id; });
    for (const auto& t : e.tweets) {
      auto it = std::find_if(orig.tweets.begin(), orig.tweets.end(), [&](const Tweet& o) { return o.tweet_id == t.tweet_id; });
      REQUIRE(it != orig.tweets.end());
      CHECK(it->text == t.text);
      CHECK(it->created_at == t.created_at);
    }
  }
}
