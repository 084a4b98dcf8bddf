#include "gatebench/matcher.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdlib>
#include <regex>

#include "gatebench/errors.hpp"
#include "gatebench/http.hpp"
#include "gatebench/io.hpp"

namespace gatebench {

namespace {

bool is_ascii_alnum(unsigned char c) { return std::isalnum(c) != 0; }

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::vector<std::string> tokenize(std::string_view normalized) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < normalized.size()) {
    while (i < normalized.size() && normalized[i] == ' ') ++i;
    const auto start = i;
    while (i < normalized.size() && normalized[i] != ' ') ++i;
    if (i > start) out.emplace_back(normalized.substr(start, i - start));
  }
  return out;
}

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

bool all_digits(std::string_view t) {
  return !t.empty() && std::all_of(t.begin(), t.end(), [](unsigned char c) { return std::isdigit(c) != 0; });
}

std::optional<int> month_index(std::string_view t) {
  static constexpr std::array<std::string_view, 12> kFull{"january", "february", "march",     "april",
                                                          "may",     "june",     "july",      "august",
                                                          "september", "october", "november", "december"};
  static constexpr std::array<std::string_view, 12> kShort{"jan", "feb", "mar", "apr", "may", "jun",
                                                           "jul", "aug", "sep", "oct", "nov", "dec"};
  for (std::size_t i = 0; i < 12; ++i)
    if (t == kFull[i] || t == kShort[i]) return static_cast<int>(i + 1);
  if (t == "sept") return 9;
  return std::nullopt;
}

// "20th" → 20
std::optional<int> ordinal_day(std::string_view t) {
  if (t.size() < 3) return std::nullopt;
  const auto suffix = t.substr(t.size() - 2);
  if (suffix != "st" && suffix != "nd" && suffix != "rd" && suffix != "th") return std::nullopt;
  const auto digits = t.substr(0, t.size() - 2);
  if (!all_digits(digits) || digits.size() > 2) return std::nullopt;
  return std::atoi(std::string(digits).c_str());
}

bool is_bce_marker(std::string_view t) { return t == "bc" || t == "bce"; }
bool is_ce_marker(std::string_view t) { return t == "ad" || t == "ce"; }

std::string normalize_text(std::string_view answer) {
  std::string out;
  out.reserve(answer.size());
  for (std::size_t i = 0; i < answer.size(); ++i) {
    const auto c = static_cast<unsigned char>(answer[i]);
    if (c == '.' || c == '\'') continue;
    // U+2019 right single quotation mark
    if (c == 0xE2 && i + 2 < answer.size() && static_cast<unsigned char>(answer[i + 1]) == 0x80 &&
        static_cast<unsigned char>(answer[i + 2]) == 0x99) {
      i += 2;
      continue;
    }
    if (c >= 0x80) {
      out.push_back(static_cast<char>(c));
    } else if (is_ascii_alnum(c)) {
      out.push_back(static_cast<char>(std::tolower(c)));
    } else {
      out.push_back(' ');
    }
  }
  return join(tokenize(out));
}

}  // namespace

Normalized normalize(std::string_view answer) {
  Normalized n;
  n.text = normalize_text(answer);
  const auto tokens = tokenize(n.text);

  static const std::regex kIso(R"((^|[^0-9])(\d{3,4})-(\d{1,2})-(\d{1,2})([^0-9]|$))");
  std::match_results<std::string_view::const_iterator> m;
  if (std::regex_search(answer.begin(), answer.end(), m, kIso)) {
    TemporalValue v;
    v.year = std::stoll(m[2].str());
    const int month = std::stoi(m[3].str());
    const int day = std::stoi(m[4].str());
    if (month >= 1 && month <= 12 && day >= 1 && day <= 31) {
      v.month = month;
      v.day = day;
      n.value = v;
      return n;
    }
  }

  static const std::regex kIsoMonth(R"((^|[^0-9-])(\d{3,4})-(\d{1,2})([^0-9-]|$))");
  if (std::regex_search(answer.begin(), answer.end(), m, kIsoMonth)) {
    const int month = std::stoi(m[3].str());
    if (month >= 1 && month <= 12) {
      TemporalValue v;
      v.year = std::stoll(m[2].str());
      v.month = month;
      n.value = v;
      return n;
    }
  }

  std::vector<std::size_t> numbers;
  std::optional<std::size_t> month_at;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (all_digits(tokens[i]) && tokens[i].size() <= 4) numbers.push_back(i);
    if (!month_at && month_index(tokens[i])) month_at = i;
  }

  std::optional<std::size_t> year_at;
  std::optional<int> day;
  if (month_at) {
    for (auto i : numbers) {
      const auto v = std::stoll(tokens[i]);
      if (!year_at && (tokens[i].size() >= 3 || v > 31)) {
        year_at = i;
      } else if (!day && v >= 1 && v <= 31) {
        day = static_cast<int>(v);
      }
    }
    if (!day) {
      for (const auto& t : tokens) {
        if (auto d = ordinal_day(t)) {
          day = d;
          break;
        }
      }
    }
  } else if (numbers.size() == 1) {
    year_at = numbers.front();
  }
  if (!year_at) return n;

  TemporalValue v;
  v.year = std::stoll(tokens[*year_at]);
  const auto next = *year_at + 1;
  const bool bce_after = next < tokens.size() && is_bce_marker(tokens[next]);
  const bool ce_after = next < tokens.size() && is_ce_marker(tokens[next]);
  const bool ce_before = *year_at > 0 && is_ce_marker(tokens[*year_at - 1]);
  if (bce_after) v.year = -v.year;
  n.era_marked = bce_after || ce_after || ce_before;
  if (month_at) {
    v.month = *month_index(tokens[*month_at]);
    v.day = day;
  }
  n.value = v;
  return n;
}

std::string_view to_string(MatchRule r) noexcept {
  switch (r) {
    case MatchRule::exact_norm: return "exact_norm";
    case MatchRule::bce_equiv: return "bce_equiv";
    case MatchRule::partial_name: return "partial_name";
    case MatchRule::paraphrase: return "paraphrase";
    case MatchRule::year_tolerance: return "year_tolerance";
    case MatchRule::abstention_valid: return "abstention_valid";
    case MatchRule::none: return "none";
  }
  return "none";
}

std::string_view to_string(RejectReason r) noexcept {
  switch (r) {
    case RejectReason::contradiction: return "contradiction";
    case RejectReason::wrong_entity: return "wrong_entity";
    case RejectReason::incomplete: return "incomplete";
    case RejectReason::format_violation: return "format_violation";
    case RejectReason::abstention_on_knowable: return "abstention_on_knowable";
  }
  return "contradiction";
}

MatchRule match_rule_from_string(std::string_view s) {
  for (auto r : {MatchRule::exact_norm, MatchRule::bce_equiv, MatchRule::partial_name, MatchRule::paraphrase,
                 MatchRule::year_tolerance, MatchRule::abstention_valid, MatchRule::none})
    if (to_string(r) == s) return r;
  throw ParseError("unknown rule '" + std::string(s) + "'");
}

RejectReason reject_reason_from_string(std::string_view s) {
  for (auto r : {RejectReason::contradiction, RejectReason::wrong_entity, RejectReason::incomplete,
                 RejectReason::format_violation, RejectReason::abstention_on_knowable})
    if (to_string(r) == s) return r;
  throw ParseError("unknown reject reason '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// Short forms

ShortFormRegistry::ShortFormRegistry(const std::map<std::string, std::string>& aliases) {
  for (const auto& [alias, canonical] : aliases) add(alias, canonical);
}

void ShortFormRegistry::add(std::string_view alias, std::string_view canonical) {
  auto tokens = tokenize(normalize_text(alias));
  if (tokens.empty()) return;
  aliases_.emplace_back(std::move(tokens), normalize_text(canonical));
  std::stable_sort(aliases_.begin(), aliases_.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
}

ShortFormRegistry ShortFormRegistry::load(const std::filesystem::path& path) {
  const auto j = read_json_file(path);
  if (!j.is_object()) throw ParseError(path.string() + ": short-form registry must be a JSON object");
  return ShortFormRegistry(j.get<std::map<std::string, std::string>>());
}

const ShortFormRegistry& ShortFormRegistry::builtin() {
  // Keep in sync with data/short_forms.json (checked by a unit test).
  static const ShortFormRegistry registry(std::map<std::string, std::string>{
      {"WWI", "World War I"},
      {"WW1", "World War I"},
      {"the Great War", "World War I"},
      {"First World War", "World War I"},
      {"WWII", "World War II"},
      {"WW2", "World War II"},
      {"Second World War", "World War II"},
      {"USSR", "Soviet Union"},
      {"US", "United States"},
      {"USA", "United States"},
      {"UK", "United Kingdom"},
      {"UN", "United Nations"},
      {"NATO", "North Atlantic Treaty Organization"},
      {"WWW", "World Wide Web"},
      {"HGP", "Human Genome Project"},
  });
  return registry;
}

std::string ShortFormRegistry::expand(std::string_view normalized_text) const {
  const auto tokens = tokenize(normalized_text);
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < tokens.size()) {
    bool replaced = false;
    for (const auto& [alias, canonical] : aliases_) {
      if (i + alias.size() > tokens.size()) continue;
      if (std::equal(alias.begin(), alias.end(), tokens.begin() + static_cast<std::ptrdiff_t>(i))) {
        for (auto& t : tokenize(canonical)) out.push_back(std::move(t));
        i += alias.size();
        replaced = true;
        break;
      }
    }
    if (!replaced) out.push_back(tokens[i++]);
  }
  return join(out);
}

// ---------------------------------------------------------------------------
// Rule tier

bool is_abstention(std::string_view answer) { return trim(answer) == kAbstentionToken; }

namespace {

bool is_subsequence(const std::vector<std::string>& needle, const std::vector<std::string>& hay) {
  std::size_t j = 0;
  for (const auto& t : hay)
    if (j < needle.size() && t == needle[j]) ++j;
  return j == needle.size();
}

bool values_equal(const TemporalValue& cand, const TemporalValue& gold, Granularity g) {
  if (cand.year != gold.year) return false;
  if (g == Granularity::year) return true;
  if (cand.month != gold.month) return false;
  if (g == Granularity::month) return true;
  return cand.day == gold.day;
}

bool missing_granularity(const TemporalValue& cand, Granularity g) {
  if (g == Granularity::month) return !cand.month;
  if (g == Granularity::day) return !cand.month || !cand.day;
  return false;
}

// Calendar distance; there is no year zero, so 1 BC → AD 1 is one year.
std::int64_t year_distance(std::int64_t a, std::int64_t b) {
  auto d = std::llabs(a - b);
  if ((a < 0) != (b < 0) && d > 0) --d;
  return d;
}

// "(B)", "B", "b)" or "B." → label index; also strips a leading label prefix
// like "(B) the moon landing" and returns the remainder.
struct LabelParse {
  std::optional<std::size_t> bare;
  std::string_view remainder;
};

LabelParse parse_label(std::string_view raw, const std::vector<Option>& options) {
  LabelParse out;
  out.remainder = trim(raw);
  auto s = out.remainder;
  if (s.empty()) return out;
  bool paren = false;
  if (s.front() == '(') {
    paren = true;
    s.remove_prefix(1);
  }
  if (s.empty() || !std::isalpha(static_cast<unsigned char>(s.front()))) return out;
  const char letter = static_cast<char>(std::toupper(static_cast<unsigned char>(s.front())));
  std::optional<std::size_t> idx;
  for (std::size_t i = 0; i < options.size(); ++i)
    if (options[i].label.size() == 1 && options[i].label[0] == letter) idx = i;
  if (!idx) return out;
  s.remove_prefix(1);
  if (paren) {
    if (s.empty() || s.front() != ')') return out;
    s.remove_prefix(1);
  } else if (!s.empty() && (s.front() == ')' || s.front() == '.' || s.front() == ':')) {
    s.remove_prefix(1);
  } else if (!s.empty()) {
    return out;  // a word starting with the letter, not a label
  }
  const auto rest = trim(s);
  if (rest.empty() || rest == ".") {
    out.bare = idx;
    out.remainder = {};
  } else {
    out.remainder = rest;
  }
  return out;
}

struct Prepared {
  Normalized norm;
  std::vector<std::string> expanded_tokens;
};

Prepared prepare(std::string_view text, const ShortFormRegistry& forms) {
  Prepared p;
  p.norm = normalize(text);
  p.expanded_tokens = tokenize(forms.empty() ? p.norm.text : forms.expand(p.norm.text));
  return p;
}

// Partial-name uniqueness: no other option's expanded name contains the
// candidate tokens as a subsequence.
bool unique_among_options(const std::vector<std::string>& cand, std::string_view gold,
                          const MatchContext& ctx, const ShortFormRegistry& forms) {
  const auto gold_norm = normalize_text(gold);
  for (const auto& o : ctx.options) {
    if (normalize_text(o.text) == gold_norm) continue;
    if (is_subsequence(cand, prepare(o.text, forms).expanded_tokens)) return false;
  }
  return true;
}

MatchVerdict match_impl(std::string_view candidate_raw, std::string_view gold, const MatchContext& ctx) {
  const auto& forms = ctx.short_forms ? *ctx.short_forms : ShortFormRegistry::builtin();
  auto candidate = trim(candidate_raw);
  if (candidate.empty()) return MatchVerdict::reject(RejectReason::format_violation);

  if (is_abstention(candidate)) {
    if (is_abstention(gold)) return MatchVerdict::accept(MatchRule::exact_norm);
    if (!ctx.gold_is_knowable) return MatchVerdict::accept(MatchRule::abstention_valid);
    return MatchVerdict::reject(RejectReason::abstention_on_knowable);
  }

  std::string resolved;
  if (!ctx.options.empty()) {
    const auto lp = parse_label(candidate, ctx.options);
    if (lp.bare) {
      resolved = ctx.options[*lp.bare].text;
      candidate = resolved;
    } else {
      candidate = lp.remainder;
    }
  }

  const auto c = prepare(candidate, forms);
  const auto g = prepare(gold, forms);

  // 1. exact after normalization (including date canonicalisation)
  if (c.norm.text == g.norm.text) return MatchVerdict::accept(MatchRule::exact_norm);
  if (c.norm.value && g.norm.value) {
    if (values_equal(*c.norm.value, *g.norm.value, ctx.granularity)) {
      if (missing_granularity(*c.norm.value, ctx.granularity))
        return MatchVerdict::reject(RejectReason::incomplete);
      // 2. BC/BCE spelling differences on an equal BCE year
      if (ctx.temporal_gold && g.norm.value->is_bce() && c.norm.era_marked && g.norm.era_marked)
        return MatchVerdict::accept(MatchRule::bce_equiv);
      return MatchVerdict::accept(MatchRule::exact_norm);
    }
    if (c.norm.value->year == g.norm.value->year && missing_granularity(*c.norm.value, ctx.granularity))
      return MatchVerdict::reject(RejectReason::incomplete);
    // 3. ±1 year
    if (ctx.temporal_gold && ctx.granularity == Granularity::year &&
        year_distance(c.norm.value->year, g.norm.value->year) == 1)
      return MatchVerdict::accept(MatchRule::year_tolerance);
    return MatchVerdict::reject(RejectReason::contradiction);
  }

  // 4. partial names and registered short forms
  if (!c.expanded_tokens.empty() && c.expanded_tokens == g.expanded_tokens)
    return MatchVerdict::accept(MatchRule::partial_name);
  const bool proper_subsequence = !c.expanded_tokens.empty() &&
                                  c.expanded_tokens.size() < g.expanded_tokens.size() &&
                                  is_subsequence(c.expanded_tokens, g.expanded_tokens);
  if (proper_subsequence) {
    if (join(c.expanded_tokens).size() >= 4 && unique_among_options(c.expanded_tokens, gold, ctx, forms))
      return MatchVerdict::accept(MatchRule::partial_name);
    return MatchVerdict::reject(RejectReason::incomplete);
  }

  if (g.norm.value && ctx.temporal_gold) return MatchVerdict::reject(RejectReason::contradiction);
  return MatchVerdict::reject(RejectReason::wrong_entity);
}

}  // namespace

MatchVerdict match(std::string_view candidate, std::string_view gold, const MatchContext& ctx) {
  return match_impl(candidate, gold, ctx);
}

std::vector<std::string> split_ordering(std::string_view candidate) {
  // Unify every delimiter to '\n' first.
  std::string s(candidate);
  auto replace_all = [&s](std::string_view from) {
    std::size_t pos = 0;
    while ((pos = s.find(from, pos)) != std::string::npos) {
      s.replace(pos, from.size(), "\n");
      pos += 1;
    }
  };
  for (std::string_view d : {"→", "⟶", "⇒", "->", "=>", "<", ",", ";"}) replace_all(d);
  // " then " as a whole word, any case
  {
    std::string lower = s;
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    std::size_t pos = 0;
    while ((pos = lower.find("then", pos)) != std::string::npos) {
      const bool left = pos == 0 || !std::isalnum(static_cast<unsigned char>(lower[pos - 1]));
      const bool right = pos + 4 >= lower.size() || !std::isalnum(static_cast<unsigned char>(lower[pos + 4]));
      if (left && right) {
        s.replace(pos, 4, "\n");
        lower.replace(pos, 4, "\n");
        pos += 1;
      } else {
        pos += 4;
      }
    }
  }

  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find('\n', start);
    auto piece = trim(std::string_view(s).substr(start, end == std::string::npos ? std::string::npos : end - start));
    // "and B", "1. B", "2) B"
    if (piece.substr(0, 4) == "and " || piece.substr(0, 4) == "And ") piece = trim(piece.substr(4));
    std::size_t k = 0;
    while (k < piece.size() && std::isdigit(static_cast<unsigned char>(piece[k]))) ++k;
    if (k > 0 && k < piece.size() && (piece[k] == '.' || piece[k] == ')')) piece = trim(piece.substr(k + 1));
    while (!piece.empty() && piece.back() == '.') piece = trim(piece.substr(0, piece.size() - 1));
    if (!piece.empty()) out.emplace_back(piece);
    if (end == std::string::npos) break;
    start = end + 1;
  }
  return out;
}

MatchVerdict match_ordering(std::string_view candidate, const std::vector<std::string>& gold_sequence,
                            const MatchContext& ctx) {
  if (gold_sequence.size() < 2) throw ValidationError("ordering gold needs at least two elements");
  if (trim(candidate).empty()) return MatchVerdict::reject(RejectReason::format_violation);
  if (is_abstention(candidate))
    return ctx.gold_is_knowable ? MatchVerdict::reject(RejectReason::abstention_on_knowable)
                                : MatchVerdict::accept(MatchRule::abstention_valid);

  auto parts = split_ordering(candidate);
  // "C D A B": a single piece made only of option labels
  if (parts.size() == 1) {
    const auto tokens = tokenize(parts.front());
    bool all_labels = tokens.size() >= 2;
    for (const auto& t : tokens) all_labels = all_labels && parse_label(t, ctx.options).bare.has_value();
    if (all_labels) parts = tokens;
  }
  if (parts.size() < 2) return MatchVerdict::reject(RejectReason::incomplete);

  // Labels of the gold ordering, as option indices when options are known.
  bool all_exact = true;
  std::vector<std::string> parsed;
  for (const auto& part : parts) {
    if (!ctx.options.empty()) {
      if (auto lp = parse_label(part, ctx.options); lp.bare) {
        parsed.push_back(ctx.options[*lp.bare].label);
        continue;
      }
      std::optional<std::size_t> hit;
      bool ambiguous = false;
      bool exact = false;
      MatchContext elem = ctx;
      for (std::size_t i = 0; i < ctx.options.size(); ++i) {
        const auto v = match(part, ctx.options[i].text, elem);
        if (v.consistency) {
          if (hit) ambiguous = true;
          hit = i;
          exact = v.exact;
        }
      }
      if (hit && !ambiguous) {
        parsed.push_back(ctx.options[*hit].label);
        all_exact = all_exact && exact;
        continue;
      }
      parsed.emplace_back();  // unresolved
      continue;
    }
    // No options: compare element-wise against the gold names directly.
    parsed.emplace_back(part);
  }

  if (parsed.size() < gold_sequence.size()) return MatchVerdict::reject(RejectReason::incomplete);
  if (parsed.size() > gold_sequence.size()) return MatchVerdict::reject(RejectReason::wrong_entity);
  for (std::size_t i = 0; i < parsed.size(); ++i) {
    if (parsed[i].empty()) return MatchVerdict::reject(RejectReason::wrong_entity);
    if (ctx.options.empty()) {
      MatchContext elem = ctx;
      const auto v = match(parsed[i], gold_sequence[i], elem);
      if (!v.consistency) return MatchVerdict::reject(RejectReason::contradiction);
      all_exact = all_exact && v.exact;
    } else if (parsed[i] != gold_sequence[i]) {
      return MatchVerdict::reject(RejectReason::contradiction);
    }
  }
  return MatchVerdict::accept(all_exact ? MatchRule::exact_norm : MatchRule::partial_name);
}

// ---------------------------------------------------------------------------
// External tier

std::optional<AdjudicatorClient> AdjudicatorClient::from_env() {
  const char* url = std::getenv("GATEBENCH_ADJUDICATOR_URL");
  if (!url || !*url) return std::nullopt;
  AdjudicatorClient c;
  c.endpoint = url;
  if (const char* key = std::getenv("GATEBENCH_ADJUDICATOR_KEY")) c.api_key = key;
  return c;
}

std::string_view adjudication_guidelines() {
  return "Decide whether the candidate answer means the same thing as the gold answer for the question.\n"
         "Accept: identical answers after lowercasing, removing punctuation and canonicalising dates; "
         "BC and BCE written for the same year; a year off by one; a surname alone when it identifies "
         "the gold person without ambiguity; a standard short form of an event name (WWI for World War I); "
         "a different wording that states the same fact.\n"
         "Reject: a different year, event, person or place; an answer missing part of what the gold "
         "requires; an empty or unparseable answer; INSUFFICIENT_EVIDENCE when the gold is a knowable "
         "real-world fact.\n"
         "Reply with JSON {\"match\": true} or {\"match\": false}.";
}

AdjudicationResult adjudicate_external(const AdjudicatorClient& client, std::string_view question,
                                       std::string_view gold, std::string_view candidate) {
  AdjudicationResult out;
  http::Url url;
  try {
    url = http::parse_url(client.endpoint);
  } catch (const ConfigError& e) {
    out.warning = std::string("adjudicator_unavailable: ") + e.what();
    return out;
  }
  const json body{{"question", question},
                  {"gold", gold},
                  {"candidate", candidate},
                  {"guidelines", adjudication_guidelines()}};
  std::map<std::string, std::string> headers;
  if (!client.api_key.empty()) headers["Authorization"] = "Bearer " + client.api_key;
  const auto res = http::post_json(url, body.dump(), headers, client.timeout, client.retry);
  if (res.outcome != http::Outcome::ok) {
    out.warning = "adjudicator_unavailable: " + res.error;
    return out;
  }
  try {
    const auto j = json::parse(res.body);
    out.match = j.at("match").get<bool>();
  } catch (const std::exception& e) {
    out.warning = std::string("adjudicator_bad_response: ") + e.what();
  }
  return out;
}

MatchVerdict adjudicated_match(const MatchVerdict& rule_verdict, const AdjudicatorClient* client,
                               std::string_view question, std::string_view gold, std::string_view candidate,
                               std::vector<std::string>& warnings) {
  if (rule_verdict.consistency || client == nullptr) return rule_verdict;
  if (rule_verdict.reject_reason == RejectReason::format_violation ||
      rule_verdict.reject_reason == RejectReason::abstention_on_knowable)
    return rule_verdict;
  const auto res = adjudicate_external(*client, question, gold, candidate);
  if (!res.warning.empty()) warnings.push_back(res.warning);
  if (res.match.value_or(false)) return MatchVerdict::accept(MatchRule::paraphrase);
  return rule_verdict;
}

}  // namespace gatebench
