#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "egolex/corpus.hpp"
#include "egolex/egonet.hpp"
#include "egolex/error.hpp"
#include "egolex/lexing.hpp"
#include "egolex/nullmodel.hpp"
#include "egolex/profiles.hpp"
#include "egolex/semmetrics.hpp"
#include "egolex/topics.hpp"

namespace egolex::report {

inline constexpr const char* kVersion = "0.1.0";

struct RunConfig {
  std::filesystem::path tweets;
  std::filesystem::path stopwords;
  std::filesystem::path lemmas;
  std::filesystem::path assignments;
  std::string reference_time;
  double t_years = 1.0;
  double cap_threshold = 0.5;
  std::string tau_filter = "modal";  // "modal" or a positive integer
  std::size_t target_topics = 100;
  topics::Mode mode = topics::Mode::hard;
  double bandwidth_quantile = 0.3;
  std::optional<double> bandwidth;
  std::uint64_t seed = 0;
  std::size_t replicates = 1;
  semantic::TTestMode ttest = semantic::TTestMode::one_sample;
  bool intercept = true;
  bool drop_fully_covered = false;
  std::filesystem::path out = "out";

  /// Flat JSON object; keys not listed above are rejected. Keys absent from
  /// `j` keep their current value.
  void apply_json(const nlohmann::json& j);
  static RunConfig load(const std::filesystem::path& path);
  /// Config echo for the manifest (the output directory is left out so that
  /// bundles written to different places compare equal).
  nlohmann::ordered_json to_json() const;

  Timestamp reference() const;
  std::optional<std::size_t> explicit_tau() const;

  /// Checks numeric ranges and that every listed path field is set and exists.
  /// Errors name the offending field.
  void validate(std::span<const std::string_view> path_fields) const;
};

/// A pipeline failure tagged with the stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, const std::string& what);
  const std::string& stage() const { return stage_; }

 private:
  std::string stage_;
};

struct SweepRow {
  double t_years = 0.0;
  std::size_t users = 0;
  double mean_tweets = 0.0;
};

struct Sweep {
  std::vector<SweepRow> rows;
  std::optional<double> pearson_r;  // mean tweets against T
};

/// Surviving users and mean tweets per user for each window length.
Sweep window_sweep(const corpus::Dataset& ds, std::span<const double> t_list);

/// curve[x-1] = mean over profiles of the summed shares of the x largest
/// topics, for x = 1..n_topics.
std::vector<double> topx_coverage_curve(std::span<const topics::SemanticProfile> profiles,
                                        std::size_t n_topics);

/// "r1".."rtau" for rings, "ego" for the whole network.
std::string scope_label(int scope);

/// Stages run lazily: asking for a result runs the stages it depends on.
class Pipeline {
 public:
  explicit Pipeline(RunConfig cfg, Exec exec = Exec::parallel);

  const RunConfig& config() const { return cfg_; }

  const corpus::Dataset& dataset();
  const std::vector<lex::WordCounts>& word_counts();
  const std::vector<egonet::EgoNetwork>& egonets();
  /// Replaces the egonet stage, e.g. with networks read from egonets.jsonl.
  void set_egonets(std::vector<egonet::EgoNetwork> egos);
  std::size_t selected_tau();
  const topics::MergeResult& topic_model();
  /// Merged assignments in the configured mode.
  const topics::Assignments& profile_assignments();
  /// Per-ego topic tables and semantics, aligned with egonets().
  const std::vector<topics::EgoTopicTable>& topic_tables();
  const std::vector<semantic::EgoSemantics>& semantics();

  void write_preprocess();
  void write_egonets();
  void write_structural();
  void write_topics();
  void write_profiles();
  void write_semantic();
  void write_null();
  void write_manifest();
  /// Every stage and output, then the manifest.
  void run_all();

  const nlohmann::ordered_json& manifest() const { return manifest_; }

 private:
  template <class F>
  decltype(auto) stage(const char* name, F&& f);
  std::filesystem::path out(const std::string& name);
  void record_output(const std::string& name, std::size_t rows);
  std::vector<const semantic::EgoSemantics*> selected();

  RunConfig cfg_;
  Exec exec_;
  std::optional<lex::Lexicon> lexicon_;
  std::optional<corpus::Dataset> dataset_;
  std::optional<std::vector<lex::WordCounts>> counts_;
  std::optional<std::vector<egonet::EgoNetwork>> egonets_;
  std::optional<std::size_t> tau_;
  std::optional<topics::MergeResult> merge_;
  std::optional<std::vector<topics::EgoTopicTable>> tables_;
  std::optional<std::vector<semantic::EgoSemantics>> semantics_;
  nlohmann::ordered_json manifest_;
};

}  // namespace egolex::report
