#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gatebench {

enum class PromptVariantId { v1_xml_reasoning, v2_xml_answer_only, v3_plain, cot_xml, in_context_evidence };

struct PromptVariant {
  PromptVariantId id = PromptVariantId::v1_xml_reasoning;
  int max_output_tokens = 512;
  std::optional<std::string> stop_string;

  static PromptVariant make(PromptVariantId id);
  bool is_xml() const noexcept { return id != PromptVariantId::v3_plain; }
};

std::string_view to_string(PromptVariantId id) noexcept;
PromptVariantId prompt_variant_from_string(std::string_view s);

inline constexpr std::string_view kAnswerStop = "</answer>";

/// Renders the full user message for one probe. `evidence` must be given for
/// in_context_evidence and only for it.
std::string build_prompt(std::string_view question, const PromptVariant& variant,
                         std::optional<std::span<const std::string>> evidence = std::nullopt);

struct ExtractionResult {
  std::optional<std::string> extracted_answer;
  bool abstained = false;
  bool format_ok = false;
  bool used_fallback = false;
  bool operator==(const ExtractionResult&) const = default;
};

ExtractionResult extract_answer(std::string_view raw_completion, const PromptVariant& variant);

/// Fraction of results with a well-formed answer tag. Throws on empty input.
double format_compliance_rate(std::span<const ExtractionResult> results);

}  // namespace gatebench
