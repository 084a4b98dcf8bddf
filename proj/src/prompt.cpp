#include "gatebench/prompt.hpp"

#include <cctype>

#include "gatebench/errors.hpp"
#include "gatebench/matcher.hpp"

namespace gatebench {

namespace {

// Closed-book template, reproduced verbatim; {QUESTION} is substituted.
constexpr std::string_view kPreambleClosedBook =
    "You are a careful research assistant. No external evidence is provided. Answer from your internal "
    "knowledge only. If you are genuinely uncertain, answer exactly INSUFFICIENT_EVIDENCE.";

constexpr std::string_view kPreambleCot =
    "You are a careful research assistant. No external evidence is provided. Answer from your internal "
    "knowledge only. Think through each question step by step: first identify each relevant fact, then "
    "reason about their relationships, and finally combine them. If you are genuinely uncertain, answer "
    "exactly INSUFFICIENT_EVIDENCE.";

constexpr std::string_view kPreambleEvidence =
    "You are a careful research assistant. Answer using only the evidence provided above. If the evidence "
    "is insufficient, answer exactly INSUFFICIENT_EVIDENCE.";

constexpr std::string_view kFormatIntro =
    "Respond using exactly this XML format and nothing else after the closing answer tag:";

constexpr std::string_view kReasoningBlock =
    "<reasoning>Use 1-4 concise sentences based only on your internal knowledge.</reasoning>";

constexpr std::string_view kEvidenceReasoningBlock =
    "<reasoning>Use 1-4 concise sentences based only on the evidence.</reasoning>";

constexpr std::string_view kAnswerBlock = "<answer>final answer here</answer>";

constexpr std::string_view kNoThink = "Do not use <think> tags.";

constexpr std::string_view kClosing =
    "If you are genuinely uncertain, the final answer must be <answer>INSUFFICIENT_EVIDENCE</answer>.";

constexpr std::string_view kPlainInstruction = "Answer the question using only your internal knowledge.";

constexpr std::string_view kPlainAbstain = "If you are genuinely uncertain, answer exactly INSUFFICIENT_EVIDENCE.";

std::string xml_prompt(std::string_view preamble, std::string_view reasoning, std::string_view question) {
  std::string out;
  out.reserve(640 + question.size());
  out += preamble;
  out += "\n\n";
  out += kFormatIntro;
  out += "\n\n";
  if (!reasoning.empty()) {
    out += reasoning;
    out += "\n\n";
  }
  out += kAnswerBlock;
  out += "\n\n";
  out += kNoThink;
  out += "\n\n<question>";
  out += question;
  out += "</question>\n\n";
  out += kClosing;
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

PromptVariant PromptVariant::make(PromptVariantId id) {
  PromptVariant v;
  v.id = id;
  v.max_output_tokens = id == PromptVariantId::cot_xml ? 1024 : 512;
  if (id != PromptVariantId::v3_plain) v.stop_string = std::string(kAnswerStop);
  return v;
}

std::string_view to_string(PromptVariantId id) noexcept {
  switch (id) {
    case PromptVariantId::v1_xml_reasoning: return "v1_xml_reasoning";
    case PromptVariantId::v2_xml_answer_only: return "v2_xml_answer_only";
    case PromptVariantId::v3_plain: return "v3_plain";
    case PromptVariantId::cot_xml: return "cot_xml";
    case PromptVariantId::in_context_evidence: return "in_context_evidence";
  }
  return "?";
}

PromptVariantId prompt_variant_from_string(std::string_view s) {
  for (auto id : {PromptVariantId::v1_xml_reasoning, PromptVariantId::v2_xml_answer_only, PromptVariantId::v3_plain,
                  PromptVariantId::cot_xml, PromptVariantId::in_context_evidence})
    if (to_string(id) == s) return id;
  // short aliases used on the command line
  if (s == "v1") return PromptVariantId::v1_xml_reasoning;
  if (s == "v2") return PromptVariantId::v2_xml_answer_only;
  if (s == "v3") return PromptVariantId::v3_plain;
  if (s == "cot") return PromptVariantId::cot_xml;
  if (s == "in_context") return PromptVariantId::in_context_evidence;
  throw ValidationError("unknown prompt variant '" + std::string(s) + "'");
}

std::string build_prompt(std::string_view question, const PromptVariant& variant,
                         std::optional<std::span<const std::string>> evidence) {
  const bool wants_evidence = variant.id == PromptVariantId::in_context_evidence;
  if (evidence && !wants_evidence)
    throw ValidationError("evidence supplied for closed-book variant " + std::string(to_string(variant.id)));
  if (!evidence && wants_evidence) throw ValidationError("in_context_evidence requires evidence blocks");

  switch (variant.id) {
    case PromptVariantId::v1_xml_reasoning:
      return xml_prompt(kPreambleClosedBook, kReasoningBlock, question);
    case PromptVariantId::v2_xml_answer_only:
      return xml_prompt(kPreambleClosedBook, {}, question);
    case PromptVariantId::cot_xml:
      return xml_prompt(kPreambleCot, kReasoningBlock, question);
    case PromptVariantId::v3_plain: {
      std::string out = "Question: ";
      out += question;
      out += '\n';
      out += kPlainInstruction;
      out += ' ';
      out += kPlainAbstain;
      return out;
    }
    case PromptVariantId::in_context_evidence: {
      std::string out;
      std::size_t n = 0;
      for (const auto& block : *evidence) {
        out += "[Evidence " + std::to_string(++n) + "] ";
        out += block;
        out += '\n';
      }
      out += '\n';
      out += xml_prompt(kPreambleEvidence, kEvidenceReasoningBlock, question);
      return out;
    }
  }
  throw ValidationError("unhandled prompt variant");
}

namespace {

constexpr std::string_view kAnswerOpen = "<answer>";
constexpr std::string_view kReasoningOpen = "<reasoning>";
constexpr std::string_view kReasoningClose = "</reasoning>";

// First "<answer>" that is not inside a <reasoning> block. An unterminated
// reasoning block hides everything after it.
std::size_t find_answer_open(std::string_view text) {
  std::size_t pos = 0;
  while (pos < text.size()) {
    const auto ans = text.find(kAnswerOpen, pos);
    const auto rsn = text.find(kReasoningOpen, pos);
    if (ans == std::string_view::npos) return ans;
    if (rsn == std::string_view::npos || ans < rsn) return ans;
    const auto close = text.find(kReasoningClose, rsn + kReasoningOpen.size());
    if (close == std::string_view::npos) return std::string_view::npos;
    pos = close + kReasoningClose.size();
  }
  return std::string_view::npos;
}

ExtractionResult with_answer(std::string_view answer, bool format_ok, bool fallback) {
  ExtractionResult r;
  r.extracted_answer = std::string(answer);
  r.abstained = answer == kAbstentionToken;
  r.format_ok = format_ok;
  r.used_fallback = fallback;
  return r;
}

}  // namespace

ExtractionResult extract_answer(std::string_view raw_completion, const PromptVariant& variant) {
  const auto text = trim(raw_completion);
  if (!variant.is_xml()) {
    // Last non-empty line, terminal punctuation removed.
    std::string_view last;
    std::size_t end = text.size();
    while (end > 0) {
      auto start = text.rfind('\n', end - 1);
      start = start == std::string_view::npos ? 0 : start + 1;
      const auto line = trim(text.substr(start, end - start));
      if (!line.empty()) {
        last = line;
        break;
      }
      if (start == 0) break;
      end = start - 1;
    }
    while (!last.empty() && (last.back() == '.' || last.back() == '!' || last.back() == '?' ||
                             last.back() == ',' || last.back() == ';' || last.back() == ':'))
      last.remove_suffix(1);
    last = trim(last);
    if (last.empty()) {
      ExtractionResult r;
      r.used_fallback = true;
      return r;
    }
    return with_answer(last, false, true);
  }

  const auto open = find_answer_open(text);
  if (open == std::string_view::npos) return {};
  const auto body_start = open + kAnswerOpen.size();
  const auto close = text.find(kAnswerStop, body_start);
  if (close == std::string_view::npos) {
    const auto body = trim(text.substr(body_start));
    if (body.empty()) return {};
    return with_answer(body, false, false);
  }
  const auto body = trim(text.substr(body_start, close - body_start));
  if (body.empty()) {
    ExtractionResult r;
    r.format_ok = true;
    return r;
  }
  return with_answer(body, true, false);
}

double format_compliance_rate(std::span<const ExtractionResult> results) {
  if (results.empty()) throw ValidationError("format_compliance_rate needs at least one result");
  std::size_t ok = 0;
  for (const auto& r : results) ok += r.format_ok ? 1 : 0;
  return static_cast<double>(ok) / static_cast<double>(results.size());
}

}  // namespace gatebench
