#pragma once

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gatebench/types.hpp"

namespace gatebench {

inline constexpr std::string_view kAbstentionToken = "INSUFFICIENT_EVIDENCE";

struct Normalized {
  std::string text;
  std::optional<TemporalValue> value;
  // True when the surface form carried an explicit era marker (BC, BCE, AD, CE).
  bool era_marked = false;
};

/// Lowercase, strip punctuation, collapse whitespace, and pull out a calendar
/// value when the answer is year-like ("1876", "1876 AD", "the year 1876",
/// "200 BCE", "July 20, 1969", "1969-07-20").
Normalized normalize(std::string_view answer);

enum class MatchRule { exact_norm, bce_equiv, partial_name, paraphrase, year_tolerance, abstention_valid, none };
enum class RejectReason { contradiction, wrong_entity, incomplete, format_violation, abstention_on_knowable };

std::string_view to_string(MatchRule r) noexcept;
std::string_view to_string(RejectReason r) noexcept;
MatchRule match_rule_from_string(std::string_view s);
RejectReason reject_reason_from_string(std::string_view s);

struct MatchVerdict {
  bool exact = false;
  bool consistency = false;
  MatchRule rule_fired = MatchRule::none;
  std::optional<RejectReason> reject_reason;

  static MatchVerdict accept(MatchRule rule) {
    return {rule == MatchRule::exact_norm, true, rule, std::nullopt};
  }
  static MatchVerdict reject(RejectReason why) { return {false, false, MatchRule::none, why}; }
  bool operator==(const MatchVerdict&) const = default;
};

/// Alias → canonical name map for standard short forms ("WWI" → "World War I").
class ShortFormRegistry {
 public:
  ShortFormRegistry() = default;
  explicit ShortFormRegistry(const std::map<std::string, std::string>& aliases);

  static ShortFormRegistry load(const std::filesystem::path& path);
  /// The registry shipped in data/short_forms.json, compiled in.
  static const ShortFormRegistry& builtin();

  void add(std::string_view alias, std::string_view canonical);
  /// Rewrites every alias occurrence (on normalized token boundaries) to its
  /// normalized canonical form.
  std::string expand(std::string_view normalized_text) const;
  bool empty() const noexcept { return aliases_.empty(); }

 private:
  // Normalized alias tokens → normalized canonical text. Longest alias first.
  std::vector<std::pair<std::vector<std::string>, std::string>> aliases_;
};

struct MatchContext {
  std::string question;
  bool gold_is_knowable = true;
  // The case's labelled options; enables label answers ("B", "(B)") and the
  // uniqueness check of the partial-name rule.
  std::vector<Option> options;
  Granularity granularity = Granularity::year;
  // Year-only rules (BC/BCE, ±1 year) apply when the gold is a date. Numeric
  // golds of the synthetic families set this to false.
  bool temporal_gold = true;
  const ShortFormRegistry* short_forms = nullptr;
};

bool is_abstention(std::string_view answer);

/// Rule-based consistency tier. Rules run in a fixed order and the first that
/// fires wins: exact, BC/BCE, ±1 year, partial name / short form, abstention.
MatchVerdict match(std::string_view candidate, std::string_view gold, const MatchContext& ctx);

/// Ordering answers for ranking questions: "C, D, A, B", "C → D → A → B",
/// "C then D then A then B", one per line, or event names in order.
MatchVerdict match_ordering(std::string_view candidate, const std::vector<std::string>& gold_sequence,
                            const MatchContext& ctx);

/// Splits an ordering answer on commas, arrows, "then", semicolons and
/// newlines. Exposed for tests.
std::vector<std::string> split_ordering(std::string_view candidate);

// ---------------------------------------------------------------------------
// External adjudicator (optional second tier).

struct RetryPolicy {
  int max_retries = 3;
  std::chrono::milliseconds initial_backoff{1000};
  double multiplier = 2.0;
};

struct AdjudicatorClient {
  std::string endpoint;  // full URL, e.g. http://host:port/adjudicate
  std::string api_key;
  std::chrono::milliseconds timeout{30000};
  RetryPolicy retry;

  /// Reads GATEBENCH_ADJUDICATOR_URL / GATEBENCH_ADJUDICATOR_KEY. nullopt when
  /// the URL is unset.
  static std::optional<AdjudicatorClient> from_env();
};

/// Guidelines sent with every adjudication request.
std::string_view adjudication_guidelines();

struct AdjudicationResult {
  std::optional<bool> match;  // nullopt on transport failure
  std::string warning;
};

/// One POST {question, gold, candidate, guidelines} → {match: bool}.
AdjudicationResult adjudicate_external(const AdjudicatorClient& client, std::string_view question,
                                       std::string_view gold, std::string_view candidate);

/// Combines the rule tier with the external tier: the adjudicator is only
/// consulted when the rule tier rejects and the answer is not a format
/// violation. A transport failure keeps the rule verdict and appends a warning.
MatchVerdict adjudicated_match(const MatchVerdict& rule_verdict, const AdjudicatorClient* client,
                               std::string_view question, std::string_view gold, std::string_view candidate,
                               std::vector<std::string>& warnings);

}  // namespace gatebench
