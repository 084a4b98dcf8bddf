#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "gatebench/gate.hpp"

namespace gatebench {

inline constexpr int kDefaultBootstrapB = 2000;
inline constexpr int kSuppressBelow = 5;
inline constexpr int kCautionBelow = 15;

/// Regularized incomplete beta I_x(a, b).
double incomplete_beta(double x, double a, double b);
/// Inverse of incomplete_beta in x.
double beta_quantile(double p, double a, double b);

struct Interval {
  double low = 0.0;
  double high = 1.0;
};

/// Exact two-sided binomial interval at level 1 - alpha.
Interval clopper_pearson(int successes, int n, double alpha = 0.05);

struct DepthStats {
  int depth_bin = 2;
  int n_gate_pass = 0;
  int n_fail = 0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  double cp_low = 0.0;
  double cp_high = 1.0;
  bool suppressed = true;
  bool caution = true;
};

/// Stats for one bin from its counts. The bootstrap resamples the n
/// gate-passing outcomes with replacement B times (percentile 2.5/97.5).
DepthStats depth_stats_from_counts(int depth_bin, int n_fail, int n_gate_pass, int bootstrap_b = kDefaultBootstrapB,
                                   std::uint64_t seed = 0);

enum class GatePopulation { double_gate, single_gate };

/// Residual failure per depth bin over determinate verdicts. Bins 2/4/6/8 are
/// always present; empty bins come back suppressed.
std::map<int, DepthStats> residual_failure_by_depth(std::span<const GateVerdict> verdicts,
                                                    int bootstrap_b = kDefaultBootstrapB, std::uint64_t seed = 0,
                                                    GatePopulation population = GatePopulation::double_gate);

struct StabilityStats {
  double per_probe_rate = 0.0;
  double per_fact_rate = 0.0;
  int n_probes = 0;
  int n_facts = 0;
  std::map<int, double> joint_at_k;
};

/// per_probe_rate^k: probability that k independent atoms are all stable.
double joint_stability(double per_probe_rate, int k);

StabilityStats stability_from_rates(double per_probe_rate, double per_fact_rate = 0.0);

/// Per-probe and per-fact stability over atom-probe records. Probes are
/// deduplicated by (atom_id, probe_index); transport-failed probes are left
/// out. Throws ValidationError when no atom probe remains.
StabilityStats atomic_stability(std::span<const CaseRecord> records);

enum class Censoring { none, below_min, above_max };
std::string_view to_string(Censoring c) noexcept;
Censoring censoring_from_string(std::string_view s);

struct D50Estimate {
  std::optional<double> point;
  std::optional<std::pair<double, double>> band;
  Censoring censored = Censoring::none;
  // Smallest bin whose rate exceeds 0.5, if any.
  std::optional<int> first_bin_exceeding;
  // Smallest and largest unsuppressed bins, used to render censored values.
  int min_bin = 0;
  int max_bin = 0;
};

/// Linear interpolation of the 50% crossing between the first bracketing
/// pair of unsuppressed bins. Throws ValidationError if every bin is
/// suppressed.
D50Estimate critical_depth(const std::map<int, DepthStats>& depth_stats);

/// "3.3", "<4", ">8" or "--".
std::string render_d50(const D50Estimate& d);
std::string render_band(const D50Estimate& d);

struct Scores {
  std::string model_id;
  std::string run_id;
  std::string manifest_hash;
  std::string records_hash;
  std::optional<StabilityStats> stability;
  std::map<int, DepthStats> depth_stats;
  D50Estimate d50;
  std::optional<GatePopulationStats> conflation;
  int bootstrap_b = kDefaultBootstrapB;
  std::uint64_t seed = 0;
};

struct ScoreInputs {
  std::string manifest_hash;
  std::string records_hash;
  int bootstrap_b = kDefaultBootstrapB;
  std::uint64_t seed = 0;
};

Scores compute_scores(std::span<const CaseRecord> records, std::span<const GateVerdict> verdicts,
                      const ScoreInputs& inputs);

json to_json_value(const Scores& s);
Scores scores_from_json(const json& j);

struct DecompositionReport {
  std::string reference_run;
  std::string comparator_run;
  std::string manifest_hash;
  double stability_reference = 0.0;
  double stability_comparator = 0.0;
  double per_fact_reference = 0.0;
  double per_fact_comparator = 0.0;
  double delta_atom_pp = 0.0;
  std::map<int, double> delta_comp_pp;
  std::optional<double> delta_depth;
  bool matched = false;
};

inline constexpr double kMatchedWindowPp = 2.0;

/// Reference minus comparator on every channel. Throws ValidationError when
/// the runs were scored on different manifests or either lacks stability.
DecompositionReport decompose(const Scores& reference, const Scores& comparator);
json to_json_value(const DecompositionReport& r);

}  // namespace gatebench
