#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "egolex/error.hpp"
#include "egolex/jenks.hpp"
#include "egolex/semmetrics.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace egolex;
using namespace egolex::semantic;

namespace {

SemanticProfile prof(std::map<TopicId, double> m) { return SemanticProfile{std::move(m)}; }

SemanticProfile random_profile(testing::Gen& g, std::size_t k, bool quantize = false) {
  std::map<TopicId, double> m;
  double total = 0;
  for (std::size_t c = 0; c < k; ++c) {
    double w = g.uniform(0.001, 1.0);
    if (g.uniform() < 0.3) w *= 10;
    if (quantize) w = std::ceil(w * 4) / 4;
    m[static_cast<TopicId>(c)] = w;
    total += w;
  }
  for (auto& [_, w] : m) w /= total;
  return prof(m);
}

// Ego with the given ring profiles and no whole-ego profile.
EgoSemantics ego_of(const std::string& id, const std::vector<SemanticProfile>& rings) {
  EgoSemantics e;
  e.user_id = id;
  e.tau = rings.size();
  for (const auto& r : rings) {
    e.rings.emplace_back(r);
    try {
      e.ring_splits.emplace_back(jenks_primary_split(r));
    } catch (const MetricError&) {
      e.ring_splits.emplace_back(std::nullopt);
    }
    e.assigned.push_back(10);
  }
  return e;
}

}  // namespace

TEST_CASE("topic count") {
  const auto t = topic_count(prof({{1, 0.5}, {2, 0.5}}), 10);
  CHECK(t.n == 2);
  CHECK(t.n_norm == doctest::Approx(0.2));
  CHECK(topic_count(prof({{4, 1.0}}), 3).n == 1);
  CHECK_THROWS_AS(topic_count(prof({{4, 1.0}}), 0), MetricError);
}

TEST_CASE("entropy") {
  std::map<TopicId, double> u;
  for (int c = 0; c < 100; ++c) u[c] = 0.01;
  CHECK(entropy(prof(u)) == doctest::Approx(4.60517).epsilon(1e-6));
  CHECK(entropy(prof({{3, 1.0}})) == 0.0);
  CHECK(entropy(prof({{0, 0.5}, {1, 0.25}, {2, 0.25}})) == doctest::Approx(1.039721).epsilon(1e-6));

  testing::Gen g(5);
  for (int i = 0; i < 300; ++i) {
    const std::size_t k = 1 + g.index(40);
    const auto p = random_profile(g, k);
    const double h = entropy(p);
    CHECK(h >= 0.0);
    CHECK(h <= std::log(static_cast<double>(k)) + 1e-12);
  }
}

TEST_CASE("js distance examples") {
  const auto a = prof({{0, 1.0}});
  const auto b = prof({{1, 1.0}});
  CHECK(js_distance(a, a) == 0.0);
  CHECK(js_distance(a, b) == doctest::Approx(0.832555).epsilon(1e-6));
  CHECK(js_distance(prof({{0, 1.0}}), prof({{0, 0.5}, {1, 0.5}})) == doctest::Approx(0.464501).epsilon(1e-6));
  CHECK(std::isinf(kl_divergence(prof({{0, 0.5}, {1, 0.5}}), a)));
  CHECK(kl_divergence(a, prof({{0, 0.5}, {1, 0.5}})) == doctest::Approx(std::log(2.0)));
}

TEST_CASE("js distance properties") {
  testing::Gen g(11);
  const double bound = std::sqrt(std::log(2.0));
  for (int i = 0; i < 500; ++i) {
    const auto p = random_profile(g, 1 + g.index(30));
    const auto q = random_profile(g, 1 + g.index(30));
    const double d = js_distance(p, q);
    CHECK(d >= 0.0);
    CHECK(d <= bound + 1e-9);
    CHECK(d == js_distance(q, p));
    CHECK(js_distance(p, p) == 0.0);
    std::map<int, double> pm(p.shares.begin(), p.shares.end());
    std::map<int, double> qm(q.shares.begin(), q.shares.end());
    CHECK(d == doctest::Approx(oracle::js_direct(pm, qm)).epsilon(1e-9));
  }
}

TEST_CASE("ring distance matrix") {
  testing::Gen g(2);
  std::vector<SemanticProfile> rings;
  for (int i = 0; i < 5; ++i) rings.push_back(random_profile(g, 6));
  const auto m = ring_distance_matrix(rings);
  REQUIRE(m.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(m[i][i] == 0.0);
    for (std::size_t j = 0; j < 5; ++j) {
      CHECK(m[i][j] == m[j][i]);
      CHECK(m[i][j] == js_distance(rings[i], rings[j]));
    }
  }
  const std::vector<SemanticProfile> same(3, rings[0]);
  for (const auto& row : ring_distance_matrix(same)) {
    for (double x : row) CHECK(x == 0.0);
  }
}

TEST_CASE("jenks split examples") {
  auto s = jenks_primary_split(prof({{1, 0.4}, {2, 0.4}, {3, 0.1}, {4, 0.1}}));
  CHECK(s.primary == std::set<TopicId>{1, 2});
  CHECK(s.nonprimary == std::set<TopicId>{3, 4});
  CHECK(s.break_value == 0.1);
  CHECK(s.silhouette == doctest::Approx(1.0));

  s = jenks_primary_split(prof({{7, 0.9}, {8, 0.05}, {9, 0.05}}));
  CHECK(s.primary == std::set<TopicId>{7});

  // cut between .1 and .3: cost .02 against .0267 for the other cut
  s = jenks_primary_split(prof({{1, 0.5}, {2, 0.3}, {3, 0.1}, {4, 0.1}}));
  CHECK(s.primary == std::set<TopicId>{1, 2});

  CHECK_THROWS_WITH_AS(jenks_primary_split(prof({{1, 0.5}, {2, 0.5}})), "degenerate split", MetricError);
  CHECK_THROWS_AS(jenks_primary_split(prof({{1, 1.0}})), MetricError);
}

TEST_CASE("silhouette by hand") {
  const std::vector<double> v = {0.1, 0.2, 0.7};
  const std::vector<int> l = {0, 0, 1};
  // point 0: (0.6-0.1)/0.6, point 1: (0.5-0.1)/0.5, point 2 is a singleton
  CHECK(silhouette_1d(v, l) == doctest::Approx((5.0 / 6 + 0.8) / 3));
}

TEST_CASE("jenks agrees with exhaustive search") {
  testing::Gen g(1234);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t k = 3 + g.index(98);
    const auto p = random_profile(g, k, i % 4 == 0);
    std::vector<double> shares;
    for (const auto& [_, s] : p.shares) shares.push_back(s);
    const auto o = oracle::jenks_exhaustive(shares);
    std::optional<PrimarySplit> s;
    try {
      s = jenks_primary_split(p);
    } catch (const MetricError&) {
    }
    if (std::isinf(o.cost)) {
      CHECK_FALSE(s);
      continue;
    }
    REQUIRE(s);
    double lowest = 1;
    for (TopicId c : s->primary) lowest = std::min(lowest, p.share(c));
    if (o.unique) {
      CHECK(lowest == o.threshold);
    } else {
      std::vector<double> lo, hi;
      for (double x : shares) (x >= lowest ? hi : lo).push_back(x);
      CHECK(oracle::ssd(lo, 0, lo.size()) + oracle::ssd(hi, 0, hi.size()) == doctest::Approx(o.cost).epsilon(1e-12));
    }
    // every primary share exceeds every non-primary share
    for (TopicId u : s->primary) {
      for (TopicId l : s->nonprimary) CHECK(p.share(u) > p.share(l));
    }
    CHECK(s->primary.size() + s->nonprimary.size() == p.support());
    double maxl = 0;
    for (TopicId l : s->nonprimary) maxl = std::max(maxl, p.share(l));
    CHECK(s->break_value == maxl);
    CHECK(s->silhouette >= -1.0);
    CHECK(s->silhouette <= 1.0);
  }
}

TEST_CASE("jenks split is invariant under rescaling") {
  testing::Gen g(8);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_profile(g, 3 + g.index(40));
    SemanticProfile q = p;
    const double f = g.uniform(0.01, 100.0);
    for (auto& [_, s] : q.shares) s *= f;
    CHECK(jenks_primary_split(p).primary == jenks_primary_split(q).primary);
  }
}

TEST_CASE("coverage and strength on a two-ring ego") {
  // ring 0: U={1}, L={2,3}; ring 1: U={2,3}, L={1}
  const auto e = ego_of("u", {prof({{1, 0.6}, {2, 0.3}, {3, 0.1}}), prof({{1, 0.1}, {2, 0.45}, {3, 0.45}})});
  REQUIRE(e.split(0)->primary == std::set<TopicId>{1});
  REQUIRE(e.split(1)->primary == std::set<TopicId>{2, 3});
  const std::vector<EgoSemantics> egos = {e};
  CHECK(coverage_K(egos, 0, 1).value == doctest::Approx(0.1));
  CHECK(coverage_K(egos, 1, 0).value == doctest::Approx(0.4));
  CHECK(coverage_K(egos, 1, 1).value == doctest::Approx(0.9));
  CHECK(strength_S(egos, Selector::top, 0, 0).value == doctest::Approx(0.6));
  CHECK(strength_S(egos, Selector::top, 1, 1).value == doctest::Approx(0.45));
  CHECK(strength_S(egos, Selector::bottom, 0, 0).value == doctest::Approx(0.2));
  CHECK(strength_S(egos, Selector::top_bottom, 0, 1).value == doctest::Approx(0.1));
  CHECK_THROWS_WITH_AS(strength_S(egos, Selector::top_both, 0, 1), "empty selection for all egos", MetricError);

  const auto t = sigma_tables(egos, 2);
  CHECK(t.sigma_bottom.at({0, 1}) == doctest::Approx(0.0));
  CHECK(t.S_top_both.count({0, 1}) == 0);
  CHECK(t.p_value_omitted.count({"sigma_bottom", 0, 1}) == 1);
  CHECK(t.K.count({kWholeEgo, kWholeEgo}) == 1);
  CHECK(t.K.at({kWholeEgo, 0}).excluded == 1);
}

TEST_CASE("full coverage, disjoint coverage and uniform strength") {
  const auto e = ego_of("u", {prof({{1, 0.45}, {2, 0.45}, {3, 0.1}}), prof({{1, 0.5}, {2, 0.5}}),
                              prof({{5, 0.7}, {6, 0.3}})});
  const std::vector<EgoSemantics> egos = {e};
  CHECK(coverage_K(egos, 0, 1).value == doctest::Approx(1.0));
  CHECK(coverage_K(egos, 0, 2).value == 0.0);
  CHECK(strength_S(egos, Selector::top, 0, 1).value == doctest::Approx(0.5));
  CHECK(coverage_K(egos, 1, 0).excluded == 1);  // degenerate split in ring 1
}

TEST_CASE("aggregates match enumeration over a 3-ego fixture") {
  testing::Gen g(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<EgoSemantics> egos;
    for (int k = 0; k < 3; ++k) {
      std::vector<SemanticProfile> rings;
      for (int r = 0; r < 3; ++r) rings.push_back(random_profile(g, 2 + g.index(6), g.uniform() < 0.2));
      egos.push_back(ego_of(fmt::format("u{}", k), rings));
    }
    for (int x = 0; x < 3; ++x) {
      for (int y = 0; y < 3; ++y) {
        // enumerate with per-topic thresholds from the exhaustive oracle
        std::vector<double> cov, top, both, topbot;
        bool tie = false;
        for (const auto& e : egos) {
          std::vector<double> sx, sy;
          for (const auto& [_, s] : e.profile(x)->shares) sx.push_back(s);
          for (const auto& [_, s] : e.profile(y)->shares) sy.push_back(s);
          const auto ox = oracle::jenks_exhaustive(sx);
          const auto oy = oracle::jenks_exhaustive(sy);
          tie = tie || !oy.unique;
          if (std::isinf(ox.cost) || !ox.unique) continue;
          const auto& px = e.profile(x)->shares;
          const auto& py = e.profile(y)->shares;
          double c = 0, st = 0, sb = 0, stb = 0;
          int nt = 0, nb = 0, ntb = 0;
          for (const auto& [t, s] : px) {
            if (s < ox.threshold) continue;
            const double share = py.count(t) ? py.at(t) : 0.0;
            c += share;
            st += share;
            ++nt;
            if (std::isinf(oy.cost) || share <= 0) continue;  // L_y holds positive shares only
            const bool top_y = share >= oy.threshold;
            if (top_y) {
              sb += share;
              ++nb;
            } else {
              stb += share;
              ++ntb;
            }
          }
          cov.push_back(c);
          if (nt) top.push_back(st / nt);
          if (!std::isinf(oy.cost) && nb) both.push_back(sb / nb);
          if (!std::isinf(oy.cost) && ntb) topbot.push_back(stb / ntb);
        }
        auto mean = [](const std::vector<double>& v) {
          double s = 0;
          for (double x : v) s += x;
          return s / static_cast<double>(v.size());
        };
        const auto K = coverage_K(egos, x, y);
        if (tie || cov.size() != K.n_egos) continue;  // equal-cost cuts; either is optimal
        if (!cov.empty()) CHECK(K.value == doctest::Approx(mean(cov)).epsilon(1e-12));
        CHECK(K.n_egos + K.excluded == 3);
        if (!top.empty()) CHECK(strength_S(egos, Selector::top, x, y).value == doctest::Approx(mean(top)));
        if (!both.empty()) CHECK(strength_S(egos, Selector::top_both, x, y).value == doctest::Approx(mean(both)));
        if (!topbot.empty()) {
          CHECK(strength_S(egos, Selector::top_bottom, x, y).value == doctest::Approx(mean(topbot)));
        }
      }
    }
  }
}

TEST_CASE("primary and non-primary coverage add to one") {
  testing::Gen g(19);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_profile(g, 3 + g.index(20));
    const auto e = ego_of("u", {p, p});
    const auto k = ego_coverage(e, 0, 1, true);
    const auto l = ego_coverage(e, 0, 1, false);
    REQUIRE(k);
    CHECK(*k + *l == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("separation: primary strength beats non-primary strength") {
  testing::Gen g(23);
  for (int i = 0; i < 500; ++i) {
    const auto e = ego_of("u", {random_profile(g, 2 + g.index(60), i % 3 == 0)});
    if (!e.split(0)) continue;
    CHECK(*ego_strength(e, Selector::top, 0, 0) > *ego_strength(e, Selector::bottom, 0, 0));
  }
}

TEST_CASE("sigma on a constructed fixture of 30 egos") {
  // Ring 0 has a single primary topic, which is also the strongest primary
  // topic of ring 1. Its share in ring 1 beats the mean primary share.
  testing::Gen g(30);
  std::vector<EgoSemantics> egos;
  for (int k = 0; k < 30; ++k) {
    const double d = g.uniform(0.0, 0.02);
    egos.push_back(ego_of(fmt::format("u{:02}", k),
                          {prof({{1, 0.7}, {2, 0.1}, {3, 0.1}, {4, 0.1}}),
                           prof({{1, 0.4 + d}, {2, 0.35 - d}, {3, 0.1}, {4, 0.1}, {5, 0.05}})}));
  }
  const auto t = sigma_tables(egos, 2, TTestMode::both);
  CHECK(t.sigma_top.at({0, 1}) > 0.0);
  CHECK(t.p_values.at({"sigma_top", 0, 1}) < 0.05);
  CHECK(t.p_values.count({"sigma_top_welch", 0, 1}) == 1);
  CHECK(t.S_top_both.at({0, 1}).n_egos == 30);

  // identical strengths give sigma 0
  std::vector<EgoSemantics> flat(10, ego_of("u", {prof({{1, 0.5}, {2, 0.4}, {3, 0.1}}),
                                                  prof({{1, 0.5}, {2, 0.4}, {3, 0.1}})}));
  const auto z = sigma_tables(flat, 2);
  CHECK(z.sigma_top.at({0, 1}) == 0.0);
  // egos with a different tau are ignored
  CHECK(sigma_tables(flat, 3).K.at({0, 0}).n_egos == 0);
}
