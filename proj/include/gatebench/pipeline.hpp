#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gatebench/backend.hpp"
#include "gatebench/errors.hpp"
#include "gatebench/matcher.hpp"
#include "gatebench/types.hpp"

namespace gatebench {

enum class Stage { generate, run, gate, score, report };
std::string_view to_string(Stage s) noexcept;
Stage stage_from_string(std::string_view s);

/// 10 generate, 20 run, 30 gate, 40 score (and decompose), 50 report.
int exit_code(Stage s) noexcept;
inline constexpr int kConfigExitCode = 2;

/// An error raised while a stage was executing.
struct StageError : Error {
  StageError(Stage s, const std::string& what) : Error(std::string(to_string(s)) + ": " + what), stage(s) {}
  Stage stage;
};

struct BackendConfig {
  std::string type = "scripted";  // "scripted" | "http"
  std::string model_id = "scripted";
  ScriptedModelParams scripted;
  HttpBackendConfig http;
};

struct PipelineConfig {
  std::filesystem::path out_dir = "out";
  std::uint64_t seed = 1;
  std::filesystem::path pool = "data/d4v2_atoms.json";
  std::string counts = "builtin:d4v2";  // or a count-spec file path
  std::optional<std::filesystem::path> short_forms;
  std::vector<Stage> stages{Stage::generate, Stage::run, Stage::gate, Stage::score, Stage::report};
  BackendConfig backend;
  std::string variant = "v1_xml_reasoning";
  int parallelism = 1;
  int bootstrap_b = 2000;
  std::string run_id = "run";
  // Timestamp written into every record. Scripted runs default to a fixed
  // value so their outputs are reproducible byte for byte.
  std::optional<std::string> fixed_timestamp;
  std::optional<AdjudicatorClient> adjudicator;
  bool force = false;
};

/// Parses a config object. Relative paths resolve against `base_dir`.
/// Throws ConfigError on unknown keys or bad values.
PipelineConfig parse_pipeline_config(const json& j, const std::filesystem::path& base_dir);
PipelineConfig load_pipeline_config(const std::filesystem::path& path);

/// Backend settings without secrets, used for stage fingerprints.
json backend_fingerprint(const BackendConfig& b);

std::unique_ptr<Backend> make_backend(const BackendConfig& b);

struct OutputPaths {
  std::filesystem::path manifest, records, run_manifest, verdicts, scores, report_dir;
  static OutputPaths under(const std::filesystem::path& out_dir);
};

// Stage bodies with explicit paths. The CLI subcommands call these directly.
void generate_stage(const PipelineConfig& cfg, const std::filesystem::path& manifest_out);
void run_stage(const PipelineConfig& cfg, const std::filesystem::path& manifest_path,
               const std::filesystem::path& records_out, const std::filesystem::path& run_manifest_out);
void gate_stage(const std::filesystem::path& records_path, const std::optional<std::filesystem::path>& manifest_path,
                const std::filesystem::path& verdicts_out);
void score_stage(const std::filesystem::path& records_path, const std::filesystem::path& verdicts_path,
                 const std::optional<std::filesystem::path>& run_manifest_path, int bootstrap_b, std::uint64_t seed,
                 const std::filesystem::path& scores_out);
void decompose_stage(const std::filesystem::path& scores_a, const std::filesystem::path& scores_b,
                     const std::filesystem::path& out);
void report_stage(const std::vector<std::filesystem::path>& scores_paths, const std::filesystem::path& out_dir);

struct StageOutcome {
  Stage stage;
  bool skipped = false;
};

/// Runs the configured stages in order. A stage whose fingerprint and
/// outputs match its last stamp is skipped unless cfg.force. Throws
/// StageError naming the failing stage.
std::vector<StageOutcome> run_pipeline(const PipelineConfig& cfg, std::ostream* log = nullptr);

}  // namespace gatebench
