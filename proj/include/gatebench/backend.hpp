#pragma once

#include <chrono>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gatebench/matcher.hpp"
#include "gatebench/types.hpp"

namespace gatebench {

enum class ProbeKind { atom_probe, sub_question, main };
std::string_view to_string(ProbeKind k) noexcept;
ProbeKind probe_kind_from_string(std::string_view s);

struct QuerySpec {
  std::string model_id;
  std::string prompt;
  double temperature = 0.0;
  int max_tokens = 512;
  std::optional<std::string> stop;
};

/// What the scripted backend needs to know about a probe. The HTTP backend
/// ignores it.
struct ProbeInfo {
  std::string case_id;
  ProbeKind kind = ProbeKind::main;
  int depth_bin = 2;
  std::string gold;
  int probe_index = 0;
  std::string atom_id;                 // atom probes and sub-questions
  std::vector<std::string> case_atoms;  // main probes: every atom of the case
  std::vector<std::string> wrong_answers;  // plausible wrong answers, if any
};

enum class TransportStatus { ok, http_error, transport_failure };

struct BackendResponse {
  std::string raw_text;
  std::int64_t latency_ms = 0;
  json transport_meta = json::object();
  TransportStatus status = TransportStatus::ok;
  std::string error;
};

/// Uniform query interface. Implementations are safe for concurrent use.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual BackendResponse query(const QuerySpec& spec, const ProbeInfo& probe) const = 0;
  virtual std::string model_id() const = 0;
  /// Throws ConfigError before any request is issued.
  virtual void validate() const {}
};

// ---------------------------------------------------------------------------

struct HttpBackendConfig {
  std::string endpoint;  // base URL; /v1/chat/completions is appended
  std::string model_id;
  std::string api_key;   // GATEBENCH_API_KEY when empty
  std::chrono::milliseconds timeout{120000};
  RetryPolicy retry;
  json extra_request_fields = json::object();
};

/// Request body for one chat completion. Exposed for tests.
json chat_completion_body(const QuerySpec& spec, const json& extra_fields = json::object());

/// OpenAI-compatible POST {base}/v1/chat/completions.
BackendResponse query_http(const HttpBackendConfig& config, const QuerySpec& spec);

class HttpBackend final : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  BackendResponse query(const QuerySpec& spec, const ProbeInfo& probe) const override;
  std::string model_id() const override { return config_.model_id; }
  void validate() const override;

 private:
  HttpBackendConfig config_;
};

// ---------------------------------------------------------------------------

struct ScriptedModelParams {
  double atom_correct_prob = 1.0;
  std::map<std::string, double> atom_correct_overrides;  // atom_id → probability
  double paraphrase_flip_prob = 0.0;
  std::map<int, double> comp_success_prob;  // depth_bin → probability; missing bins succeed
  // Main-probe success for cases containing an unstable atom; unset means
  // instability does not affect the main answer.
  std::optional<double> unstable_comp_success_prob;
  double abstain_prob = 0.0;
  double format_violation_prob = 0.0;
  std::uint64_t seed = 0;

  /// Throws ValidationError when a probability is outside [0, 1].
  void validate() const;
  double atom_prob(const std::string& atom_id) const;
};

void to_json(json& j, const ScriptedModelParams& p);
void from_json(const json& j, ScriptedModelParams& p);

/// Deterministic in (params, probe): no state, no dependence on call order.
BackendResponse query_scripted(const ScriptedModelParams& params, const ProbeInfo& probe);

/// Whether the scripted model treats the atom as unstable (one paraphrase
/// probe flips). Exposed so tests can derive expectations independently.
bool scripted_atom_unstable(const ScriptedModelParams& params, const std::string& atom_id);
bool scripted_atom_known(const ScriptedModelParams& params, const std::string& atom_id);

class ScriptedBackend final : public Backend {
 public:
  explicit ScriptedBackend(ScriptedModelParams params, std::string model_id = "scripted");
  BackendResponse query(const QuerySpec& spec, const ProbeInfo& probe) const override;
  std::string model_id() const override { return model_id_; }
  void validate() const override { params_.validate(); }
  const ScriptedModelParams& params() const noexcept { return params_; }

 private:
  ScriptedModelParams params_;
  std::string model_id_;
};

}  // namespace gatebench
