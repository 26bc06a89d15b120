#include "egolex/semmetrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "egolex/error.hpp"
#include "egolex/jenks.hpp"

namespace egolex::semantic {
namespace {

// Walks the union of two supports in topic order.
template <class F>
void for_union(const SemanticProfile& p, const SemanticProfile& q, F&& f) {
  auto i = p.shares.begin();
  auto j = q.shares.begin();
  while (i != p.shares.end() || j != q.shares.end()) {
    if (j == q.shares.end() || (i != p.shares.end() && i->first < j->first)) {
      f(i->second, 0.0);
      ++i;
    } else if (i == p.shares.end() || j->first < i->first) {
      f(0.0, j->second);
      ++j;
    } else {
      f(i->second, j->second);
      ++i;
      ++j;
    }
  }
}

std::set<TopicId> intersect(const std::set<TopicId>& a, const std::set<TopicId>& b) {
  std::set<TopicId> out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::inserter(out, out.end()));
  return out;
}

Aggregate aggregate(std::span<const EgoSemantics> egos, auto&& per_ego) {
  Aggregate a;
  double sum = 0.0;
  for (const auto& e : egos) {
    if (auto v = per_ego(e)) {
      sum += *v;
      ++a.n_egos;
    } else {
      ++a.excluded;
    }
  }
  a.value = a.n_egos > 0 ? sum / static_cast<double>(a.n_egos) : std::numeric_limits<double>::quiet_NaN();
  return a;
}

}  // namespace

TopicCount topic_count(const SemanticProfile& p, double assigned_occurrences) {
  if (!(assigned_occurrences > 0.0)) throw MetricError("topic count needs assigned occurrences");
  TopicCount t;
  for (const auto& [_, s] : p.shares) t.n += s > 0.0 ? 1 : 0;
  t.n_norm = static_cast<double>(t.n) / assigned_occurrences;
  return t;
}

double entropy(const SemanticProfile& p) {
  double h = 0.0;
  for (const auto& [_, s] : p.shares) {
    if (s > 0.0) h -= s * std::log(s);
  }
  return h;
}

double kl_divergence(const SemanticProfile& p, const SemanticProfile& q) {
  double d = 0.0;
  for_union(p, q, [&](double a, double b) {
    if (a <= 0.0) return;
    d += b > 0.0 ? a * std::log(a / b) : std::numeric_limits<double>::infinity();
  });
  return d;
}

double js_divergence(const SemanticProfile& p, const SemanticProfile& q) {
  double d = 0.0;
  for_union(p, q, [&](double a, double b) {
    const double m = 0.5 * (a + b);
    // summed per topic so that swapping p and q is bit-exact
    const double ta = a > 0.0 ? 0.5 * a * std::log(a / m) : 0.0;
    const double tb = b > 0.0 ? 0.5 * b * std::log(b / m) : 0.0;
    d += ta + tb;
  });
  return std::max(0.0, d);
}

double js_distance(const SemanticProfile& p, const SemanticProfile& q) {
  return std::sqrt(js_divergence(p, q));
}

Matrix ring_distance_matrix(std::span<const SemanticProfile> ring_profiles) {
  const std::size_t n = ring_profiles.size();
  Matrix m(n, std::vector<double>(n, 0.0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      m[i][j] = m[j][i] = js_distance(ring_profiles[i], ring_profiles[j]);
    }
  }
  return m;
}

double silhouette_1d(std::span<const double> values, std::span<const int> labels) {
  const std::size_t n = values.size();
  if (n == 0) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double own = 0.0;
    double other = 0.0;
    std::size_t n_own = 0;
    std::size_t n_other = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j == i) continue;
      const double d = std::abs(values[i] - values[j]);
      if (labels[j] == labels[i]) {
        own += d;
        ++n_own;
      } else {
        other += d;
        ++n_other;
      }
    }
    if (n_own == 0 || n_other == 0) continue;
    const double a = own / static_cast<double>(n_own);
    const double b = other / static_cast<double>(n_other);
    const double denom = std::max(a, b);
    total += denom > 0.0 ? (b - a) / denom : 0.0;
  }
  return total / static_cast<double>(n);
}

PrimarySplit jenks_primary_split(const SemanticProfile& p) {
  std::vector<double> values;
  std::vector<double> weights;
  {
    std::vector<double> shares;
    for (const auto& [_, s] : p.shares) {
      if (s > 0.0) shares.push_back(s);
    }
    std::sort(shares.begin(), shares.end());
    for (double s : shares) {
      if (!values.empty() && values.back() == s) {
        weights.back() += 1.0;
      } else {
        values.push_back(s);
        weights.push_back(1.0);
      }
    }
  }
  if (values.size() < 2) throw MetricError("degenerate split");
  const std::size_t cut = jenks::natural_breaks(values, weights, 2).front();
  const double lowest_primary = values[cut];
  PrimarySplit split;
  split.break_value = values[cut - 1];
  std::vector<double> pts;
  std::vector<int> labels;
  for (const auto& [c, s] : p.shares) {
    if (s <= 0.0) continue;
    const bool primary = s >= lowest_primary;
    (primary ? split.primary : split.nonprimary).insert(c);
    pts.push_back(s);
    labels.push_back(primary ? 1 : 0);
  }
  split.silhouette = silhouette_1d(pts, labels);
  return split;
}

const SemanticProfile* EgoSemantics::profile(int scope) const {
  if (scope == kWholeEgo) return whole ? &*whole : nullptr;
  if (scope < 0 || static_cast<std::size_t>(scope) >= rings.size()) return nullptr;
  const auto& r = rings[static_cast<std::size_t>(scope)];
  return r ? &*r : nullptr;
}

const PrimarySplit* EgoSemantics::split(int scope) const {
  if (scope == kWholeEgo) return whole_split ? &*whole_split : nullptr;
  if (scope < 0 || static_cast<std::size_t>(scope) >= ring_splits.size()) return nullptr;
  const auto& s = ring_splits[static_cast<std::size_t>(scope)];
  return s ? &*s : nullptr;
}

EgoSemantics analyze_ego(const egonet::EgoNetwork& ego, const topics::EgoTopicTable& table) {
  EgoSemantics e;
  e.user_id = ego.user_id();
  e.tau = ego.tau();
  auto split_of = [](const SemanticProfile& p) -> std::optional<PrimarySplit> {
    try {
      return jenks_primary_split(p);
    } catch (const MetricError&) {
      return std::nullopt;
    }
  };
  for (std::size_t r = 0; r < ego.tau(); ++r) {
    e.assigned.push_back(topics::assigned_occurrences(ego, r, table));
    try {
      e.rings.emplace_back(topics::ring_semantic_profile(ego, r, table));
      e.ring_splits.push_back(split_of(*e.rings.back()));
    } catch (const MetricError&) {
      e.rings.emplace_back(std::nullopt);
      e.ring_splits.emplace_back(std::nullopt);
    }
  }
  try {
    e.whole = topics::ego_semantic_profile(ego, table);
    e.whole_split = split_of(*e.whole);
  } catch (const MetricError&) {
  }
  return e;
}

std::optional<double> ego_coverage(const EgoSemantics& e, int x, int y, bool primary) {
  const auto* split = e.split(x);
  const auto* py = e.profile(y);
  if (!split || !py) return std::nullopt;
  double s = 0.0;
  for (TopicId c : primary ? split->primary : split->nonprimary) s += py->share(c);
  return s;
}

std::optional<double> ego_strength(const EgoSemantics& e, Selector sel, int x, int y) {
  const auto* sx = e.split(x);
  const auto* py = e.profile(y);
  if (!sx || !py) return std::nullopt;
  std::set<TopicId> chosen;
  switch (sel) {
    case Selector::top:
      chosen = sx->primary;
      break;
    case Selector::bottom:
      chosen = sx->nonprimary;
      break;
    case Selector::top_both:
    case Selector::top_bottom: {
      const auto* sy = e.split(y);
      if (!sy) return std::nullopt;
      chosen = intersect(sx->primary, sel == Selector::top_both ? sy->primary : sy->nonprimary);
      break;
    }
  }
  if (chosen.empty()) return std::nullopt;
  double s = 0.0;
  for (TopicId c : chosen) s += py->share(c);
  return s / static_cast<double>(chosen.size());
}

Aggregate coverage_K(std::span<const EgoSemantics> egos, int x, int y) {
  return aggregate(egos, [&](const EgoSemantics& e) { return ego_coverage(e, x, y); });
}

Aggregate strength_S(std::span<const EgoSemantics> egos, Selector sel, int x, int y) {
  auto a = aggregate(egos, [&](const EgoSemantics& e) { return ego_strength(e, sel, x, y); });
  if (a.n_egos == 0) throw MetricError("empty selection for all egos");
  return a;
}

PullingPowerTables sigma_tables(std::span<const EgoSemantics> all, std::size_t tau, TTestMode mode) {
  std::vector<EgoSemantics> egos;
  for (const auto& e : all) {
    if (e.tau == tau) egos.push_back(e);
  }
  PullingPowerTables t;
  t.tau = tau;
  const int n = static_cast<int>(tau);
  auto try_strength = [&](Selector sel, int x, int y) -> std::optional<Aggregate> {
    try {
      return strength_S(egos, sel, x, y);
    } catch (const MetricError&) {
      return std::nullopt;
    }
  };

  for (int x = kWholeEgo; x < n; ++x) {
    for (int y = kWholeEgo; y < n; ++y) {
      t.K[{x, y}] = coverage_K(egos, x, y);
      if (auto s = try_strength(Selector::top, x, y)) t.S_top[{x, y}] = *s;
    }
  }
  for (int y = 0; y < n; ++y) {
    if (auto s = try_strength(Selector::bottom, y, y)) t.S_bottom[y] = *s;
  }

  auto test = [&](const std::string& name, Selector cross, Selector base, int x, int y) {
    std::vector<double> diffs;
    std::vector<double> cross_vals;
    std::vector<double> base_vals;
    for (const auto& e : egos) {
      const auto c = ego_strength(e, cross, x, y);
      const auto b = ego_strength(e, base, y, y);
      if (c) cross_vals.push_back(*c);
      if (b) base_vals.push_back(*b);
      if (c && b) diffs.push_back(*c - *b);
    }
    if (auto r = stats::one_sample_ttest(diffs)) {
      t.p_values[{name, x, y}] = r->p_value;
    } else {
      t.p_value_omitted.insert({name, x, y});
    }
    if (mode == TTestMode::both) {
      if (auto r = stats::welch_ttest(cross_vals, base_vals)) {
        t.p_values[{name + "_welch", x, y}] = r->p_value;
      } else {
        t.p_value_omitted.insert({name + "_welch", x, y});
      }
    }
  };

  for (int x = 0; x < n; ++x) {
    for (int y = 0; y < n; ++y) {
      if (x == y) continue;
      if (auto s = try_strength(Selector::top_both, x, y)) {
        t.S_top_both[{x, y}] = *s;
        if (auto it = t.S_top.find({y, y}); it != t.S_top.end()) {
          t.sigma_top[{x, y}] = s->value - it->second.value;
        }
        test("sigma_top", Selector::top_both, Selector::top, x, y);
      }
      if (auto s = try_strength(Selector::top_bottom, x, y)) {
        t.S_top_bottom[{x, y}] = *s;
        if (auto it = t.S_bottom.find(y); it != t.S_bottom.end()) {
          t.sigma_bottom[{x, y}] = s->value - it->second.value;
        }
        test("sigma_bottom", Selector::top_bottom, Selector::bottom, x, y);
      }
    }
  }
  return t;
}

}  // namespace egolex::semantic
