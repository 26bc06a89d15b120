#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "egolex/profiles.hpp"
#include "egolex/stats.hpp"

namespace egolex::semantic {

using topics::SemanticProfile;
using topics::TopicId;

struct TopicCount {
  std::size_t n = 0;      // topics with positive share
  double n_norm = 0.0;    // n / assigned occurrences
};

/// Throws MetricError when `assigned_occurrences` is not positive.
TopicCount topic_count(const SemanticProfile& p, double assigned_occurrences);

/// Shannon entropy in nats; 0 ln 0 = 0.
double entropy(const SemanticProfile& p);

/// D_KL(p || q) in nats; infinite when q lacks support of p.
double kl_divergence(const SemanticProfile& p, const SemanticProfile& q);
double js_divergence(const SemanticProfile& p, const SemanticProfile& q);
/// sqrt of the JS divergence; in [0, sqrt(ln 2)].
double js_distance(const SemanticProfile& p, const SemanticProfile& q);

using Matrix = std::vector<std::vector<double>>;

/// Pairwise JS distances; symmetric with a zero diagonal.
Matrix ring_distance_matrix(std::span<const SemanticProfile> ring_profiles);

struct PrimarySplit {
  std::set<TopicId> primary;     // U: high-share class
  std::set<TopicId> nonprimary;  // L: the remaining topics with positive share
  double break_value = 0.0;      // largest share in L
  double silhouette = 0.0;
};

/// Two-class natural-breaks split of the positive shares. Throws
/// MetricError("degenerate split") with fewer than two distinct shares.
PrimarySplit jenks_primary_split(const SemanticProfile& p);

/// Mean silhouette of 1-D values under a labelling, absolute-difference
/// metric. Singleton clusters score 0.
double silhouette_1d(std::span<const double> values, std::span<const int> labels);

/// Scope of a metric: ring index 0..tau-1, or the whole ego network.
inline constexpr int kWholeEgo = -1;

/// Profiles and splits of one ego. Missing entries mark empty rings or
/// degenerate splits.
struct EgoSemantics {
  std::string user_id;
  std::size_t tau = 0;
  std::vector<std::optional<SemanticProfile>> rings;
  std::vector<std::optional<PrimarySplit>> ring_splits;
  std::vector<std::int64_t> assigned;  // assigned occurrences per ring
  std::optional<SemanticProfile> whole;
  std::optional<PrimarySplit> whole_split;

  const SemanticProfile* profile(int scope) const;
  const PrimarySplit* split(int scope) const;
};

EgoSemantics analyze_ego(const egonet::EgoNetwork& ego, const topics::EgoTopicTable& table);

enum class Selector {
  top,         // U_x
  bottom,      // L_x
  top_both,    // U_x ∩ U_y
  top_bottom,  // U_x ∩ L_y
};

/// Per-ego coverage sum_{c in U_x} P_y(c); nullopt when x has no split or y no profile.
std::optional<double> ego_coverage(const EgoSemantics& e, int x, int y, bool primary = true);

/// Per-ego mean share in P_y of the selected topic set; nullopt when the set
/// is empty or a needed profile/split is missing.
std::optional<double> ego_strength(const EgoSemantics& e, Selector sel, int x, int y);

struct Aggregate {
  double value = 0.0;
  std::size_t n_egos = 0;    // contributing egos
  std::size_t excluded = 0;  // egos without a value
};

/// K_TOP(x)^y: mean over egos of the coverage of U_x in P_y.
Aggregate coverage_K(std::span<const EgoSemantics> egos, int x, int y);

/// S^y over egos for a selector; throws MetricError when no ego contributes.
Aggregate strength_S(std::span<const EgoSemantics> egos, Selector sel, int x, int y);

enum class TTestMode { one_sample, both };

using ScopePair = std::pair<int, int>;

struct PullingPowerTables {
  std::size_t tau = 0;
  std::map<ScopePair, Aggregate> K;           // K_TOP(x)^y, x,y in rings and whole ego
  std::map<ScopePair, Aggregate> S_top;       // S_TOP(x)^y
  std::map<int, Aggregate> S_bottom;          // S_BOTTOM(y)^y
  std::map<ScopePair, Aggregate> S_top_both;  // S_TOP(x,y)^y, x != y
  std::map<ScopePair, Aggregate> S_top_bottom;  // S_TOP(x),BOTTOM(y)^y, x != y
  std::map<ScopePair, double> sigma_top;      // S_TOP(x,y)^y - S_TOP(y)^y
  std::map<ScopePair, double> sigma_bottom;   // S_TOP(x),BOTTOM(y)^y - S_BOTTOM(y)^y
  /// ("sigma_top" | "sigma_bottom" | "..._welch", x, y) -> two-sided p-value.
  std::map<std::tuple<std::string, int, int>, double> p_values;
  /// Cells whose test was skipped (fewer than two contributing egos).
  std::set<std::tuple<std::string, int, int>> p_value_omitted;
};

/// All pulling-power tables over egos with exactly `tau` rings.
PullingPowerTables sigma_tables(std::span<const EgoSemantics> egos, std::size_t tau,
                                TTestMode mode = TTestMode::one_sample);

}  // namespace egolex::semantic
