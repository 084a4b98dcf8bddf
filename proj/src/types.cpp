#include "gatebench/types.hpp"

#include <array>
#include <utility>

#include "gatebench/errors.hpp"

namespace gatebench {

namespace {

constexpr std::array<std::pair<Family, std::string_view>, 7> kFamilyNames{{
    {Family::temporal_rank, "temporal_rank"},
    {Family::temporal_successor, "temporal_successor"},
    {Family::temporal_interval_decoy, "temporal_interval_decoy"},
    {Family::pair_far_control, "pair_far_control"},
    {Family::kinship, "kinship"},
    {Family::numerical, "numerical"},
    {Family::spatial, "spatial"},
}};

constexpr std::array<std::pair<Category, std::string_view>, 5> kCategoryNames{{
    {Category::political, "political"},
    {Category::scientific, "scientific"},
    {Category::cultural, "cultural"},
    {Category::sports, "sports"},
    {Category::tech, "tech"},
}};

constexpr std::array<std::pair<Granularity, std::string_view>, 3> kGranularityNames{{
    {Granularity::year, "year"},
    {Granularity::month, "month"},
    {Granularity::day, "day"},
}};

}  // namespace

bool is_synthetic(Family f) noexcept {
  return f == Family::kinship || f == Family::numerical || f == Family::spatial;
}

std::string_view to_string(Family f) noexcept {
  for (const auto& [k, v] : kFamilyNames)
    if (k == f) return v;
  return "?";
}

Family family_from_string(std::string_view s) {
  for (const auto& [k, v] : kFamilyNames)
    if (v == s) return k;
  throw ValidationError("unknown task family '" + std::string(s) + "'");
}

std::string_view to_string(Category c) noexcept {
  for (const auto& [k, v] : kCategoryNames)
    if (k == c) return v;
  return "?";
}

Category category_from_string(std::string_view s) {
  for (const auto& [k, v] : kCategoryNames)
    if (v == s) return k;
  throw ValidationError("unknown category '" + std::string(s) + "'");
}

int depth_bin(int depth) {
  switch (depth) {
    case 2:
    case 4:
    case 6:
    case 8:
      return depth;
    case 7:
      return 4;
    case 9:
      return 6;
    case 11:
      return 8;
    default:
      break;
  }
  // Synthetic chains use arbitrary depths; bin to the nearest reporting bin
  // at or below, never below 2.
  if (depth < 2) throw ValidationError("depth must be >= 2, got " + std::to_string(depth));
  if (depth >= 8) return 8;
  return depth % 2 == 0 ? depth : depth - 1;
}

std::string option_label(std::size_t i) {
  if (i >= 26) throw ValidationError("too many options for single-letter labels");
  return std::string(1, static_cast<char>('A' + i));
}

std::vector<std::string> split_label_sequence(std::string_view gold) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= gold.size()) {
    auto pos = gold.find(',', start);
    auto piece = gold.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start);
    while (!piece.empty() && piece.front() == ' ') piece.remove_prefix(1);
    while (!piece.empty() && piece.back() == ' ') piece.remove_suffix(1);
    if (!piece.empty()) out.emplace_back(piece);
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

void to_json(json& j, const TemporalValue& v) {
  j = json{{"year", v.year}};
  if (v.month) j["month"] = *v.month;
  if (v.day) j["day"] = *v.day;
}

void from_json(const json& j, TemporalValue& v) {
  if (!j.is_object() || !j.contains("year") || !j.at("year").is_number_integer())
    throw ValidationError("canonical_value must be an object with an integer year");
  v.year = j.at("year").get<std::int64_t>();
  v.month.reset();
  v.day.reset();
  if (j.contains("month") && !j.at("month").is_null()) v.month = j.at("month").get<int>();
  if (j.contains("day") && !j.at("day").is_null()) v.day = j.at("day").get<int>();
}

void to_json(json& j, const AtomFact& a) {
  j = json{{"atom_id", a.atom_id},
           {"statement", a.statement},
           {"canonical_value", a.canonical_value},
           {"entity", a.entity},
           {"category", to_string(a.category)},
           {"paraphrases", a.paraphrases},
           {"gold_answer", a.gold_answer}};
  if (a.granularity != Granularity::year) {
    for (const auto& [k, v] : kGranularityNames)
      if (k == a.granularity) j["granularity"] = v;
  }
}

void from_json(const json& j, AtomFact& a) {
  a.atom_id = j.at("atom_id").get<std::string>();
  a.statement = j.at("statement").get<std::string>();
  a.canonical_value = j.at("canonical_value").get<TemporalValue>();
  a.entity = j.at("entity").get<std::string>();
  a.category = category_from_string(j.at("category").get<std::string>());
  a.paraphrases = j.at("paraphrases").get<std::vector<std::string>>();
  a.gold_answer = j.at("gold_answer").get<std::string>();
  a.granularity = Granularity::year;
  if (j.contains("granularity")) {
    const auto g = j.at("granularity").get<std::string>();
    bool found = false;
    for (const auto& [k, v] : kGranularityNames) {
      if (v == g) {
        a.granularity = k;
        found = true;
      }
    }
    if (!found) throw ValidationError("atom " + a.atom_id + ": unknown granularity '" + g + "'");
  }
}

void to_json(json& j, const CompositionCase& c) {
  json subs = json::array();
  for (const auto& s : c.sub_questions) subs.push_back({{"text", s.text}, {"gold_answer", s.gold_answer}});
  json opts = json::array();
  for (const auto& o : c.options) opts.push_back({{"label", o.label}, {"text", o.text}});
  j = json{{"case_id", c.case_id},
           {"family", to_string(c.family)},
           {"depth", c.depth},
           {"depth_bin", c.depth_bin},
           {"atom_ids", c.atom_ids},
           {"main_question", c.main_question},
           {"sub_questions", std::move(subs)},
           {"gold_answer", c.gold_answer},
           {"options", std::move(opts)}};
  j["evidence_blocks"] = c.evidence_blocks ? json(*c.evidence_blocks) : json(nullptr);
  if (c.relation) j["relation"] = *c.relation;
  if (c.variant) j["variant"] = *c.variant;
}

void from_json(const json& j, CompositionCase& c) {
  c.case_id = j.at("case_id").get<std::string>();
  c.family = family_from_string(j.at("family").get<std::string>());
  c.depth = j.at("depth").get<int>();
  c.depth_bin = j.at("depth_bin").get<int>();
  c.atom_ids = j.at("atom_ids").get<std::vector<std::string>>();
  c.main_question = j.at("main_question").get<std::string>();
  c.sub_questions.clear();
  for (const auto& s : j.at("sub_questions"))
    c.sub_questions.push_back({s.at("text").get<std::string>(), s.at("gold_answer").get<std::string>()});
  c.gold_answer = j.at("gold_answer").get<std::string>();
  c.options.clear();
  if (j.contains("options"))
    for (const auto& o : j.at("options"))
      c.options.push_back({o.at("label").get<std::string>(), o.at("text").get<std::string>()});
  c.evidence_blocks.reset();
  if (j.contains("evidence_blocks") && !j.at("evidence_blocks").is_null())
    c.evidence_blocks = j.at("evidence_blocks").get<std::vector<std::string>>();
  c.relation.reset();
  if (j.contains("relation")) c.relation = j.at("relation").get<std::string>();
  c.variant.reset();
  if (j.contains("variant")) c.variant = j.at("variant").get<std::string>();
}

void to_json(json& j, const BenchmarkManifest& m) {
  // counts serialize as "family@depth" keys so the object stays sorted and flat.
  json counts = json::object();
  for (const auto& [k, n] : m.counts)
    counts[std::string(to_string(k.family)) + "@" + std::to_string(k.depth)] = n;
  j = json{{"seed", m.seed}, {"pool_hash", m.pool_hash}, {"cases", m.cases}, {"counts", std::move(counts)}};
}

void from_json(const json& j, BenchmarkManifest& m) {
  m.seed = j.at("seed").get<std::uint64_t>();
  m.pool_hash = j.at("pool_hash").get<std::string>();
  m.cases = j.at("cases").get<std::vector<CompositionCase>>();
  m.counts.clear();
  for (const auto& [key, n] : j.at("counts").items()) {
    const auto at = key.find('@');
    if (at == std::string::npos) throw ParseError("bad counts key '" + key + "'");
    m.counts[{family_from_string(key.substr(0, at)), std::stoi(key.substr(at + 1))}] = n.get<int>();
  }
}

}  // namespace gatebench
