#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gatebench/backend.hpp"
#include "gatebench/matcher.hpp"
#include "gatebench/prompt.hpp"
#include "gatebench/types.hpp"

namespace gatebench {

enum class Mode { closed_book, in_context };
std::string_view to_string(Mode m) noexcept;

/// One model interaction, persisted as one JSONL line.
struct CaseRecord {
  std::string record_id;
  std::string case_id;
  ProbeKind kind = ProbeKind::main;
  std::optional<std::string> atom_id;
  std::optional<int> probe_index;
  Family family = Family::temporal_rank;
  int depth = 2;
  int depth_bin = 2;
  PromptVariantId prompt_variant = PromptVariantId::v1_xml_reasoning;
  Mode mode = Mode::closed_book;
  std::string model_id;
  std::string prompt;
  std::string raw_output;
  std::optional<std::string> extracted_answer;
  bool abstained = false;
  bool format_ok = false;
  bool match_exact = false;
  bool match_consistency = false;
  MatchRule rule_fired = MatchRule::none;
  std::optional<RejectReason> reject_reason;
  std::vector<std::string> warnings;
  std::string timestamp;
  std::string run_id;
  std::uint64_t seed = 0;

  /// Transport or HTTP failure: the record carries no model answer.
  bool transport_failed() const;
};

void to_json(json& j, const CaseRecord& r);
void from_json(const json& j, CaseRecord& r);

std::string records_to_jsonl(std::span<const CaseRecord> records);
std::vector<CaseRecord> records_from_jsonl(std::string_view text);
std::vector<CaseRecord> read_records(const std::filesystem::path& path);

// ---------------------------------------------------------------------------

struct MatcherConfig {
  const ShortFormRegistry* short_forms = nullptr;  // builtin registry when null
  std::optional<AdjudicatorClient> adjudicator;
};

struct RunOptions {
  PromptVariant variant = PromptVariant::make(PromptVariantId::v1_xml_reasoning);
  MatcherConfig matcher;
  int parallelism = 1;
  std::string run_id = "run";
  std::uint64_t seed = 0;
  /// Record timestamps. Defaults to UTC wall-clock time.
  std::function<std::string()> clock;
};

std::string utc_now_iso8601();

/// Issues 4 atom probes per pool atom, one probe per sub-question and one
/// main probe for every case, then extracts and matches each answer. Records
/// come back in probe order regardless of parallelism.
std::vector<CaseRecord> run_benchmark(const BenchmarkManifest& manifest, std::span<const AtomFact> pool,
                                      const Backend& backend, const RunOptions& options);

/// Extraction and matching for one response. Exposed for replay and tests.
struct ScoredAnswer {
  ExtractionResult extraction;
  MatchVerdict verdict;
  std::vector<std::string> warnings;
};
ScoredAnswer score_response(const CompositionCase& c, ProbeKind kind, const std::string& question,
                            const std::string& gold, const AtomFact* atom, const BackendResponse& response,
                            const PromptVariant& variant, Mode mode, const MatcherConfig& matcher);

// ---------------------------------------------------------------------------

enum class ArtifactFlag { format_artifact, over_abstention };

struct GateVerdict {
  std::string case_id;
  Family family = Family::temporal_rank;
  int depth = 2;
  int depth_bin = 2;
  std::map<std::string, bool> atoms_stable;
  bool atomic_gate_pass = false;
  bool subq_gate_pass = false;
  bool double_gate_pass = false;
  bool single_gate_pass = false;
  bool main_correct = false;
  bool residual_failure = false;
  std::vector<ArtifactFlag> artifact_flags;
  // Indeterminate verdicts (missing or transport-failed records) are kept for
  // bookkeeping but never enter a rate.
  bool determinate = true;
  std::string indeterminate_reason;

  bool operator==(const GateVerdict&) const = default;
};

void to_json(json& j, const GateVerdict& v);
void from_json(const json& j, GateVerdict& v);
std::string verdicts_to_jsonl(std::span<const GateVerdict> verdicts);
std::vector<GateVerdict> read_verdicts(const std::filesystem::path& path);

/// True iff all four paraphrase probes of the atom are consistency-matched.
/// Throws ProtocolError unless exactly four probes (indices 0..3) are given.
bool compute_stability(std::span<const CaseRecord> atom_records);

/// Gate one case from its records.
GateVerdict gate_case(const CompositionCase& c, std::span<const CaseRecord> records);

/// Gate every case of a manifest (or, without one, every case seen in the
/// records, inferring its structure from them).
std::vector<GateVerdict> gate_records(std::span<const CaseRecord> records, const BenchmarkManifest* manifest);

struct GatePopulationStats {
  int single_gate_n = 0;
  int double_gate_n = 0;
  double removed_fraction = 0.0;
  double single_gate_rate = 0.0;
  double double_gate_rate = 0.0;
  double inflation_pp = 0.0;
};

/// Single-gate vs double-gate comparison over determinate verdicts.
GatePopulationStats gate_population_stats(std::span<const GateVerdict> verdicts);
json to_json_value(const GatePopulationStats& s);

}  // namespace gatebench
