#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace gatebench {

using json = nlohmann::json;

/// A calendar value. Negative years are BCE; there is no year zero in input
/// data but it is not rejected.
struct TemporalValue {
  std::int64_t year = 0;
  std::optional<int> month;
  std::optional<int> day;

  bool is_bce() const noexcept { return year < 0; }
  bool operator==(const TemporalValue&) const = default;
};

enum class Category { political, scientific, cultural, sports, tech };

/// Answer granularity for temporal golds. Year unless a pool says otherwise.
enum class Granularity { year, month, day };

struct AtomFact {
  std::string atom_id;
  std::string statement;
  TemporalValue canonical_value;
  std::string entity;
  Category category = Category::political;
  std::vector<std::string> paraphrases;
  std::string gold_answer;
  Granularity granularity = Granularity::year;
};

enum class Family {
  temporal_rank,
  temporal_successor,
  temporal_interval_decoy,
  pair_far_control,
  kinship,
  numerical,
  spatial,
};

bool is_synthetic(Family f) noexcept;
std::string_view to_string(Family f) noexcept;
Family family_from_string(std::string_view s);

/// Maps a depth onto the four reporting bins: 7→4, 9→6, 11→8.
int depth_bin(int depth);

struct Option {
  std::string label;
  std::string text;
  bool operator==(const Option&) const = default;
};

struct SubQuestion {
  std::string text;
  std::string gold_answer;
  bool operator==(const SubQuestion&) const = default;
};

struct CompositionCase {
  std::string case_id;
  Family family = Family::temporal_rank;
  int depth = 2;
  int depth_bin = 2;
  std::vector<std::string> atom_ids;
  std::string main_question;
  std::vector<SubQuestion> sub_questions;
  std::string gold_answer;
  std::optional<std::vector<std::string>> evidence_blocks;
  // Labelled choices shown in the main question, in display order. Option i
  // refers to the i-th candidate atom (after the reference/boundary atoms).
  std::vector<Option> options;
  // temporal_successor only: "after" or "before".
  std::optional<std::string> relation;
  // Synthetic families only: which variant of the chain was generated.
  std::optional<std::string> variant;

  bool operator==(const CompositionCase&) const = default;
};

struct CellKey {
  Family family;
  int depth;
  auto operator<=>(const CellKey&) const = default;
};

using CountSpec = std::map<CellKey, int>;

struct BenchmarkManifest {
  std::uint64_t seed = 0;
  std::string pool_hash;
  std::vector<CompositionCase> cases;
  CountSpec counts;
};

// JSON mappings. Field names follow the on-disk schemas.
void to_json(json& j, const TemporalValue& v);
void from_json(const json& j, TemporalValue& v);
void to_json(json& j, const AtomFact& a);
void from_json(const json& j, AtomFact& a);
void to_json(json& j, const CompositionCase& c);
void from_json(const json& j, CompositionCase& c);
void to_json(json& j, const BenchmarkManifest& m);
void from_json(const json& j, BenchmarkManifest& m);

std::string_view to_string(Category c) noexcept;
Category category_from_string(std::string_view s);

/// "C, D, A, B" for a rank gold; splits on ", ".
std::vector<std::string> split_label_sequence(std::string_view gold);

/// Option label for index i: A, B, ..., Z.
std::string option_label(std::size_t i);

}  // namespace gatebench
