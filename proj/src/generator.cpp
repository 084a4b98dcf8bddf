#include "gatebench/generator.hpp"

#include <algorithm>
#include <cstdio>
#include <numeric>
#include <set>
#include <unordered_map>
#include <unordered_set>

#include "gatebench/errors.hpp"
#include "gatebench/io.hpp"
#include "gatebench/matcher.hpp"
#include "gatebench/rng.hpp"

namespace gatebench {

// ---------------------------------------------------------------------------
// Pool

std::vector<AtomFact> parse_atom_pool(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("atom pool: ") + e.what());
  }
  if (!j.is_array()) throw ParseError("atom pool must be a JSON array");
  std::vector<AtomFact> pool;
  pool.reserve(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    const auto& item = j[i];
    const std::string id = item.is_object() && item.contains("atom_id") && item["atom_id"].is_string()
                               ? item["atom_id"].get<std::string>()
                               : "#" + std::to_string(i);
    try {
      pool.push_back(item.get<AtomFact>());
    } catch (const json::exception& e) {
      throw ValidationError("atom " + id + ": " + e.what());
    } catch (const ValidationError& e) {
      throw ValidationError("atom " + id + ": " + e.what());
    }
  }
  validate_pool(pool);
  return pool;
}

std::vector<AtomFact> load_atom_pool(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ParseError("atom pool not found: " + path.string());
  return parse_atom_pool(read_file(path));
}

void validate_pool(std::span<const AtomFact> pool) {
  std::unordered_set<std::string> seen;
  for (const auto& a : pool) {
    const auto where = "atom " + a.atom_id + ": ";
    if (a.atom_id.empty()) throw ValidationError("atom with empty atom_id");
    if (!seen.insert(a.atom_id).second) throw ValidationError(where + "duplicate atom_id");
    if (a.paraphrases.size() != 4)
      throw ValidationError(where + "expected 4 paraphrases, found " + std::to_string(a.paraphrases.size()));
    for (const auto& p : a.paraphrases)
      if (p.empty()) throw ValidationError(where + "empty paraphrase");
    if (a.entity.empty()) throw ValidationError(where + "empty entity");
    const auto& v = a.canonical_value;
    if (v.day && !v.month) throw ValidationError(where + "day given without month");
    if (v.month && (*v.month < 1 || *v.month > 12)) throw ValidationError(where + "month out of range");
    if (v.day && (*v.day < 1 || *v.day > 31)) throw ValidationError(where + "day out of range");
    const auto n = normalize(a.gold_answer);
    if (!n.value || n.value->year != v.year)
      throw ValidationError(where + "gold_answer '" + a.gold_answer + "' does not normalize to year " +
                            std::to_string(v.year));
    if (v.month && n.value->month && n.value->month != v.month)
      throw ValidationError(where + "gold_answer month disagrees with canonical_value");
  }
}

std::string pool_hash(std::span<const AtomFact> pool) {
  json j = json::array();
  for (const auto& a : pool) j.push_back(a);
  return canonical_json_hash(j);
}

// ---------------------------------------------------------------------------
// Count specs

CountSpec d4v2_spec() {
  CountSpec s;
  for (int d : {4, 6, 8}) {
    s[{Family::temporal_rank, d}] = 30;
    s[{Family::temporal_successor, d}] = 30;
  }
  for (int d : {4, 6, 7, 8, 9, 11}) s[{Family::temporal_interval_decoy, d}] = 30;
  s[{Family::pair_far_control, 2}] = 30;
  return s;
}

CountSpec load_count_spec(const std::string& path_or_builtin) {
  if (path_or_builtin == "builtin:d4v2") return d4v2_spec();
  const auto j = read_json_file(path_or_builtin);
  CountSpec s;
  try {
    for (const auto& cell : j.at("cells")) {
      const CellKey key{family_from_string(cell.at("family").get<std::string>()), cell.at("depth").get<int>()};
      const int count = cell.at("count").get<int>();
      if (count < 0) throw ValidationError("negative count");
      s[key] += count;
    }
  } catch (const json::exception& e) {
    throw ParseError(path_or_builtin + ": " + e.what());
  }
  return s;
}

json count_spec_to_json(const CountSpec& spec) {
  json cells = json::array();
  for (const auto& [k, n] : spec) cells.push_back({{"family", to_string(k.family)}, {"depth", k.depth}, {"count", n}});
  return json{{"cells", std::move(cells)}};
}

int required_atoms(Family family, int depth) {
  return family == Family::temporal_interval_decoy ? depth + 2 : depth;
}

// ---------------------------------------------------------------------------
// Temporal families

namespace {

constexpr std::int64_t kMargin = 5;      // decoy / successor separation, years
constexpr std::int64_t kPairGap = 50;    // pair control separation, strictly greater

std::string case_id_for(Family f, int depth, int index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "%03d", index);
  return std::string(to_string(f)) + "-d" + std::to_string(depth) + "-" + buf;
}

std::string sub_question_text(const AtomFact& a) {
  return "When did " + a.entity + " happen? Answer with the year.";
}

std::string options_text(const std::vector<Option>& options) {
  std::string out;
  for (std::size_t i = 0; i < options.size(); ++i) {
    if (i > 0) out += ", ";
    out += "(" + options[i].label + ") " + options[i].text;
  }
  return out;
}

struct CellContext {
  std::span<const AtomFact> pool;
  Family family;
  int depth;
};

[[noreturn]] void infeasible(const CellContext& cx, const std::string& why) {
  throw InfeasibleError("cell " + std::string(to_string(cx.family)) + "@d" + std::to_string(cx.depth) +
                        " is infeasible: " + why);
}

std::int64_t year_of(const AtomFact& a) { return a.canonical_value.year; }

// Draws k distinct indices from `candidates` (already a list of pool indices).
std::vector<std::size_t> draw(std::vector<std::size_t> candidates, std::size_t k, CounterRng& rng) {
  rng.shuffle(candidates.begin(), candidates.end());
  candidates.resize(k);
  return candidates;
}

void fill_common(CompositionCase& c, const CellContext& cx, const std::vector<std::size_t>& atoms) {
  c.family = cx.family;
  c.depth = cx.depth;
  c.depth_bin = depth_bin(cx.depth);
  for (auto i : atoms) {
    c.atom_ids.push_back(cx.pool[i].atom_id);
    c.sub_questions.push_back({sub_question_text(cx.pool[i]), cx.pool[i].gold_answer});
  }
}

std::vector<Option> make_options(const CellContext& cx, std::span<const std::size_t> candidates) {
  std::vector<Option> out;
  for (std::size_t i = 0; i < candidates.size(); ++i) out.push_back({option_label(i), cx.pool[candidates[i]].entity});
  return out;
}

CompositionCase make_rank(const CellContext& cx, CounterRng& rng) {
  std::vector<std::size_t> order(cx.pool.size());
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order.begin(), order.end());
  std::vector<std::size_t> picked;
  std::set<std::int64_t> years;
  for (auto i : order) {
    if (picked.size() == static_cast<std::size_t>(cx.depth)) break;
    if (years.insert(year_of(cx.pool[i])).second) picked.push_back(i);
  }
  if (picked.size() < static_cast<std::size_t>(cx.depth))
    infeasible(cx, "needs " + std::to_string(cx.depth) + " atoms with distinct years, pool has " +
                       std::to_string(years.size()));

  CompositionCase c;
  fill_common(c, cx, picked);
  c.options = make_options(cx, picked);
  std::vector<std::size_t> idx(picked.size());
  std::iota(idx.begin(), idx.end(), 0);
  std::sort(idx.begin(), idx.end(),
            [&](auto a, auto b) { return year_of(cx.pool[picked[a]]) < year_of(cx.pool[picked[b]]); });
  std::string gold;
  for (auto i : idx) gold += (gold.empty() ? "" : ", ") + option_label(i);
  c.gold_answer = gold;
  c.main_question = "Rank these events from earliest to latest: " + options_text(c.options) +
                    ". Answer with the option letters in order, separated by commas.";
  return c;
}

CompositionCase make_successor(const CellContext& cx, CounterRng& rng) {
  const bool after = rng.bernoulli(0.5);
  const auto n_other = static_cast<std::size_t>(cx.depth - 2);
  const auto n = cx.pool.size();
  if (n < static_cast<std::size_t>(cx.depth))
    infeasible(cx, "needs " + std::to_string(cx.depth) + " distinct atoms, pool has " + std::to_string(n));

  // Reference atoms with at least one qualifying candidate and enough
  // non-qualifying ones, each separated from the reference by the margin.
  struct Split {
    std::size_t ref;
    std::vector<std::size_t> hits, misses;
  };
  auto split_for = [&](std::size_t r, bool dir_after) {
    Split s{r, {}, {}};
    for (std::size_t i = 0; i < n; ++i) {
      if (i == r) continue;
      const auto dy = year_of(cx.pool[i]) - year_of(cx.pool[r]);
      if (dir_after ? dy >= kMargin : dy <= -kMargin) s.hits.push_back(i);
      if (dir_after ? dy <= -kMargin : dy >= kMargin) s.misses.push_back(i);
    }
    return s;
  };
  auto feasible_refs = [&](bool dir_after) {
    std::vector<Split> out;
    for (std::size_t r = 0; r < n; ++r) {
      auto s = split_for(r, dir_after);
      if (!s.hits.empty() && s.misses.size() >= n_other) out.push_back(std::move(s));
    }
    return out;
  };
  auto refs = feasible_refs(after);
  bool dir = after;
  if (refs.empty()) {
    dir = !after;
    refs = feasible_refs(dir);
  }
  if (refs.empty()) infeasible(cx, "no reference event has one qualifying and " + std::to_string(n_other) +
                                       " non-qualifying candidates");

  const auto& s = refs[rng.below(refs.size())];
  const auto target = s.hits[rng.below(s.hits.size())];
  auto candidates = draw(s.misses, n_other, rng);
  candidates.push_back(target);
  rng.shuffle(candidates.begin(), candidates.end());

  std::vector<std::size_t> atoms{s.ref};
  atoms.insert(atoms.end(), candidates.begin(), candidates.end());
  CompositionCase c;
  fill_common(c, cx, atoms);
  c.options = make_options(cx, candidates);
  c.relation = dir ? "after" : "before";
  c.gold_answer = cx.pool[target].entity;
  c.main_question = "Which of these events happened " + *c.relation + " " + cx.pool[s.ref].entity + "? " +
                    options_text(c.options) + ".";
  return c;
}

CompositionCase make_interval(const CellContext& cx, CounterRng& rng) {
  const auto n = cx.pool.size();
  const auto need = static_cast<std::size_t>(required_atoms(cx.family, cx.depth));
  if (n < need)
    infeasible(cx, "needs " + std::to_string(need) + " distinct atoms (2 + depth), pool has " + std::to_string(n));
  const auto n_decoys = static_cast<std::size_t>(cx.depth - 1);

  struct Interval {
    std::size_t lo, hi;
    std::vector<std::size_t> inside, outside;
  };
  std::vector<Interval> feasible;
  for (std::size_t lo = 0; lo < n; ++lo) {
    for (std::size_t hi = 0; hi < n; ++hi) {
      const auto ylo = year_of(cx.pool[lo]);
      const auto yhi = year_of(cx.pool[hi]);
      if (yhi - ylo < 2 * kMargin) continue;
      Interval iv{lo, hi, {}, {}};
      for (std::size_t i = 0; i < n; ++i) {
        if (i == lo || i == hi) continue;
        const auto y = year_of(cx.pool[i]);
        if (y >= ylo + kMargin && y <= yhi - kMargin) iv.inside.push_back(i);
        if (y <= ylo - kMargin || y >= yhi + kMargin) iv.outside.push_back(i);
      }
      if (!iv.inside.empty() && iv.outside.size() >= n_decoys) feasible.push_back(std::move(iv));
    }
  }
  if (feasible.empty())
    infeasible(cx, "no boundary pair leaves one inside event and " + std::to_string(n_decoys) + " decoys outside");

  const auto& iv = feasible[rng.below(feasible.size())];
  const auto target = iv.inside[rng.below(iv.inside.size())];
  auto candidates = draw(iv.outside, n_decoys, rng);
  candidates.push_back(target);
  rng.shuffle(candidates.begin(), candidates.end());

  std::vector<std::size_t> atoms{iv.lo, iv.hi};
  atoms.insert(atoms.end(), candidates.begin(), candidates.end());
  CompositionCase c;
  fill_common(c, cx, atoms);
  c.options = make_options(cx, candidates);
  c.gold_answer = cx.pool[target].entity;
  c.main_question = "Which of these events occurred between " + cx.pool[iv.lo].entity + " and " +
                    cx.pool[iv.hi].entity + "? " + options_text(c.options) + ".";
  return c;
}

CompositionCase make_pair(const CellContext& cx, CounterRng& rng) {
  if (cx.depth != 2) infeasible(cx, "pair_far_control is defined at depth 2 only");
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < cx.pool.size(); ++i)
    for (std::size_t j = i + 1; j < cx.pool.size(); ++j)
      if (std::llabs(year_of(cx.pool[i]) - year_of(cx.pool[j])) > kPairGap) pairs.emplace_back(i, j);
  if (pairs.empty()) infeasible(cx, "no atom pair is separated by more than 50 years");
  auto [a, b] = pairs[rng.below(pairs.size())];
  if (rng.bernoulli(0.5)) std::swap(a, b);

  const std::vector<std::size_t> atoms{a, b};
  CompositionCase c;
  fill_common(c, cx, atoms);
  c.options = make_options(cx, atoms);
  c.gold_answer = year_of(cx.pool[a]) < year_of(cx.pool[b]) ? cx.pool[a].entity : cx.pool[b].entity;
  c.main_question = "Which came first: " + cx.pool[a].entity + " or " + cx.pool[b].entity + "?";
  return c;
}

}  // namespace

BenchmarkManifest generate_benchmark(std::span<const AtomFact> pool, const CountSpec& spec, std::uint64_t seed) {
  validate_pool(pool);
  BenchmarkManifest m;
  m.seed = seed;
  m.pool_hash = pool_hash(pool);
  m.counts = spec;
  for (const auto& [key, count] : spec) {
    if (count <= 0) continue;
    if (key.depth < 2) throw InfeasibleError("cell " + std::string(to_string(key.family)) + "@d" +
                                             std::to_string(key.depth) + " is infeasible: depth must be >= 2");
    if (is_synthetic(key.family)) {
      const auto cell_seed = StreamKey(seed).add(to_string(key.family)).add(static_cast<std::uint64_t>(key.depth));
      auto cases = generate_synthetic_family(key.family, count, key.depth, cell_seed.value(), pool);
      for (auto& c : cases) m.cases.push_back(std::move(c));
      continue;
    }
    const CellContext cx{pool, key.family, key.depth};
    for (int i = 0; i < count; ++i) {
      CounterRng rng(StreamKey(seed)
                         .add(to_string(key.family))
                         .add(static_cast<std::uint64_t>(key.depth))
                         .add(static_cast<std::uint64_t>(i)));
      CompositionCase c;
      switch (key.family) {
        case Family::temporal_rank: c = make_rank(cx, rng); break;
        case Family::temporal_successor: c = make_successor(cx, rng); break;
        case Family::temporal_interval_decoy: c = make_interval(cx, rng); break;
        case Family::pair_far_control: c = make_pair(cx, rng); break;
        default: break;
      }
      c.case_id = case_id_for(key.family, key.depth, i);
      m.cases.push_back(std::move(c));
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// Synthetic families

namespace {

constexpr std::array<std::string_view, 28> kSyllables{
    "ka", "lo", "mi", "ren", "tha", "vor", "zel", "qui", "bra", "nys", "dor", "fae", "gil", "hul",
    "jor", "lix", "mun", "pel", "ros", "sav", "tir", "ulm", "wex", "yra", "ost", "eph", "ban", "cue"};

class NameGenerator {
 public:
  NameGenerator(CounterRng& rng, const std::unordered_set<std::string>& forbidden) : rng_(rng), forbidden_(forbidden) {}

  std::string next() {
    for (;;) {
      const auto n_syll = 2 + rng_.below(2);
      std::string name;
      for (std::uint64_t i = 0; i < n_syll; ++i) name += kSyllables[rng_.below(kSyllables.size())];
      if (forbidden_.contains(name) || used_.contains(name)) continue;
      used_.insert(name);
      name[0] = static_cast<char>(name[0] - 'a' + 'A');
      return name;
    }
  }

 private:
  CounterRng& rng_;
  const std::unordered_set<std::string>& forbidden_;
  std::unordered_set<std::string> used_;
};

std::unordered_set<std::string> forbidden_tokens(std::span<const AtomFact> exclude) {
  std::unordered_set<std::string> out;
  auto add_all = [&out](std::string_view text) {
    std::string tok;
    for (char ch : normalize(text).text + " ") {
      if (ch == ' ') {
        if (!tok.empty()) out.insert(tok);
        tok.clear();
      } else {
        tok.push_back(ch);
      }
    }
  };
  for (const auto& a : exclude) {
    add_all(a.entity);
    add_all(a.statement);
  }
  return out;
}

CompositionCase make_kinship(int depth, CounterRng& rng, NameGenerator& names) {
  const bool maternal = rng.bernoulli(0.5);
  const std::string rel = maternal ? "mother" : "father";
  std::vector<std::string> people;
  for (int i = 0; i <= depth; ++i) people.push_back(names.next());
  CompositionCase c;
  c.variant = maternal ? "matrilineal" : "patrilineal";
  std::vector<std::string> facts;
  for (int i = 0; i < depth; ++i) {
    facts.push_back(people[i] + " is the " + rel + " of " + people[i + 1] + ".");
    c.sub_questions.push_back({"According to the evidence, who is the " + rel + " of " + people[i + 1] + "?", people[i]});
  }
  c.main_question = "According to the evidence, who is the " + *c.variant + " ancestor of " + people[depth] +
                    " exactly " + std::to_string(depth) + " generation" + (depth == 1 ? "" : "s") + " back?";
  c.gold_answer = people[0];
  rng.shuffle(facts.begin(), facts.end());
  c.evidence_blocks = std::move(facts);
  return c;
}

CompositionCase make_numerical(int depth, CounterRng& rng, NameGenerator& names) {
  std::vector<std::string> holders;
  for (int i = 0; i < depth; ++i) holders.push_back(names.next());
  CompositionCase c;
  c.variant = "offset_chain";
  std::vector<std::string> facts;
  std::int64_t value = 20 + static_cast<std::int64_t>(rng.below(41));
  facts.push_back(holders[0] + " holds " + std::to_string(value) + " credits.");
  c.sub_questions.push_back(
      {"According to the evidence, how many credits does " + holders[0] + " hold?", std::to_string(value)});
  for (int i = 1; i < depth; ++i) {
    const auto k = 1 + static_cast<std::int64_t>(rng.below(9));
    const bool more = value - k < 1 || rng.bernoulli(0.5);
    value += more ? k : -k;
    const std::string dir = more ? "more" : "fewer";
    facts.push_back(holders[i] + " holds " + std::to_string(k) + " " + dir + " credits than " + holders[i - 1] + ".");
    c.sub_questions.push_back({"According to the evidence, how many more or fewer credits does " + holders[i] +
                                   " hold than " + holders[i - 1] + "?",
                               std::to_string(k) + " " + dir});
  }
  c.main_question = "According to the evidence, how many credits does " + holders[depth - 1] + " hold?";
  c.gold_answer = std::to_string(value);
  rng.shuffle(facts.begin(), facts.end());
  c.evidence_blocks = std::move(facts);
  return c;
}

CompositionCase make_spatial(int depth, CounterRng& rng, NameGenerator& names) {
  const bool east = rng.bernoulli(0.5);
  const std::string dir = east ? "east" : "north";
  std::vector<std::string> places;
  for (int i = 0; i <= depth; ++i) places.push_back(names.next());
  CompositionCase c;
  c.variant = east ? "eastward" : "northward";
  std::vector<std::string> facts;
  for (int i = 0; i < depth; ++i) {
    facts.push_back(places[i + 1] + " is " + dir + " of " + places[i] + ".");
    c.sub_questions.push_back(
        {"According to the evidence, which place is directly " + dir + " of " + places[i] + "?", places[i + 1]});
  }
  c.main_question = "According to the evidence, which place is farthest " + dir + "?";
  c.gold_answer = places[depth];
  rng.shuffle(facts.begin(), facts.end());
  c.evidence_blocks = std::move(facts);
  return c;
}

}  // namespace

std::vector<CompositionCase> generate_synthetic_family(Family family, int n_cases, int depth, std::uint64_t seed,
                                                       std::span<const AtomFact> exclude) {
  if (!is_synthetic(family))
    throw ValidationError("unsupported synthetic family '" + std::string(to_string(family)) + "'");
  if (depth < 1) throw ValidationError("synthetic depth must be >= 1");
  const auto forbidden = forbidden_tokens(exclude);
  std::vector<CompositionCase> out;
  for (int i = 0; i < n_cases; ++i) {
    CounterRng rng(StreamKey(seed).add(to_string(family)).add(static_cast<std::uint64_t>(depth)).add(
        static_cast<std::uint64_t>(i)));
    NameGenerator names(rng, forbidden);
    CompositionCase c;
    switch (family) {
      case Family::kinship: c = make_kinship(depth, rng, names); break;
      case Family::numerical: c = make_numerical(depth, rng, names); break;
      default: c = make_spatial(depth, rng, names); break;
    }
    c.family = family;
    c.depth = depth;
    c.depth_bin = depth_bin(std::max(depth, 2));
    c.case_id = case_id_for(family, depth, i);
    for (std::size_t k = 0; k < c.sub_questions.size(); ++k) c.atom_ids.push_back(c.case_id + "/e" + std::to_string(k));
    out.push_back(std::move(c));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Oracle

std::string gold_answer_oracle(const CompositionCase& c, std::span<const AtomFact> pool) {
  if (is_synthetic(c.family)) throw ValidationError("gold oracle covers temporal families only");
  std::unordered_map<std::string_view, const AtomFact*> by_id;
  for (const auto& a : pool) by_id.emplace(a.atom_id, &a);
  std::vector<const AtomFact*> atoms;
  for (const auto& id : c.atom_ids) {
    auto it = by_id.find(id);
    if (it == by_id.end()) throw ValidationError("case " + c.case_id + ": missing atom reference " + id);
    atoms.push_back(it->second);
  }
  auto exactly_one = [&](std::vector<const AtomFact*> hits) {
    if (hits.size() != 1)
      throw ValidationError("case " + c.case_id + ": " + std::to_string(hits.size()) + " candidates qualify");
    return hits.front()->entity;
  };

  switch (c.family) {
    case Family::temporal_rank: {
      std::vector<std::size_t> idx(atoms.size());
      std::iota(idx.begin(), idx.end(), 0);
      std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) {
        return atoms[a]->canonical_value.year < atoms[b]->canonical_value.year;
      });
      std::string out;
      for (auto i : idx) out += (out.empty() ? "" : ", ") + option_label(i);
      return out;
    }
    case Family::temporal_successor: {
      if (atoms.size() < 2 || !c.relation) throw ValidationError("case " + c.case_id + ": malformed successor case");
      const auto ref = atoms[0]->canonical_value.year;
      const bool after = *c.relation == "after";
      std::vector<const AtomFact*> hits;
      for (std::size_t i = 1; i < atoms.size(); ++i) {
        const auto y = atoms[i]->canonical_value.year;
        if (after ? y > ref : y < ref) hits.push_back(atoms[i]);
      }
      return exactly_one(hits);
    }
    case Family::temporal_interval_decoy: {
      if (atoms.size() < 3) throw ValidationError("case " + c.case_id + ": malformed interval case");
      const auto lo = atoms[0]->canonical_value.year;
      const auto hi = atoms[1]->canonical_value.year;
      std::vector<const AtomFact*> hits;
      for (std::size_t i = 2; i < atoms.size(); ++i) {
        const auto y = atoms[i]->canonical_value.year;
        if (y > lo && y < hi) hits.push_back(atoms[i]);
      }
      return exactly_one(hits);
    }
    case Family::pair_far_control: {
      if (atoms.size() != 2) throw ValidationError("case " + c.case_id + ": pair control needs two atoms");
      return atoms[0]->canonical_value.year < atoms[1]->canonical_value.year ? atoms[0]->entity : atoms[1]->entity;
    }
    default: break;
  }
  throw ValidationError("unhandled family");
}

std::string manifest_to_string(const BenchmarkManifest& m) { return json(m).dump(2) + "\n"; }

BenchmarkManifest load_manifest(const std::filesystem::path& path) {
  try {
    return read_json_file(path).get<BenchmarkManifest>();
  } catch (const json::exception& e) {
    throw ParseError(path.string() + ": " + e.what());
  }
}

}  // namespace gatebench
