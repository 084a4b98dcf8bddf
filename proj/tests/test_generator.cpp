#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <regex>
#include <set>
#include <sstream>
#include <tuple>

#include "gatebench/errors.hpp"
#include "gatebench/generator.hpp"
#include "gatebench/io.hpp"
#include "gatebench/matcher.hpp"

using namespace gatebench;
namespace fs = std::filesystem;

namespace {

const std::vector<AtomFact>& pool() {
  static const auto p = load_atom_pool(fs::path(GATEBENCH_SOURCE_DIR) / "data" / "d4v2_atoms.json");
  return p;
}

std::map<std::string, const AtomFact*> index(std::span<const AtomFact> atoms) {
  std::map<std::string, const AtomFact*> out;
  for (const auto& a : atoms) out[a.atom_id] = &a;
  return out;
}

AtomFact atom(std::string id, std::int64_t year, std::string entity) {
  AtomFact a;
  a.atom_id = std::move(id);
  a.entity = entity;
  a.statement = entity + " happened in " + std::to_string(year);
  a.canonical_value.year = year;
  a.gold_answer = year < 0 ? std::to_string(-year) + " BC" : std::to_string(year);
  a.paraphrases = {"p1 " + entity, "p2 " + entity, "p3 " + entity, "p4 " + entity};
  return a;
}

fs::path temp_file(const std::string& name, const std::string& text) {
  const auto dir = fs::temp_directory_path() / "gatebench_gen_tests";
  fs::create_directories(dir);
  write_file(dir / name, text);
  return dir / name;
}

}  // namespace

TEST_CASE("shipped pool") {
  const auto& p = pool();
  CHECK(p.size() == 79);
  auto idx = index(p);
  REQUIRE(idx.contains("telephone-1876"));
  CHECK(idx["telephone-1876"]->canonical_value.year == 1876);
  for (const auto& a : p) {
    CHECK(a.paraphrases.size() == 4);
    CHECK(normalize(a.gold_answer).value->year == a.canonical_value.year);
  }
}

TEST_CASE("pool loading errors") {
  CHECK_THROWS_AS(load_atom_pool(temp_file("empty.json", "")), ParseError);
  auto a = atom("x-1900", 1900, "event x");
  a.paraphrases.pop_back();
  const json j = std::vector<AtomFact>{a};
  try {
    load_atom_pool(temp_file("three.json", j.dump()));
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("x-1900") != std::string::npos);
  }
  std::vector<AtomFact> dup{atom("d", 1900, "a"), atom("d", 1901, "b")};
  CHECK_THROWS_AS(validate_pool(dup), ValidationError);
  auto bad_gold = atom("g", 1900, "g");
  bad_gold.gold_answer = "1901";
  CHECK_THROWS_AS(validate_pool(std::vector<AtomFact>{bad_gold}), ValidationError);
}

TEST_CASE("pool hash is canonical") {
  const auto h = pool_hash(pool());
  CHECK(h.size() == 64);
  CHECK(h == canonical_json_hash(json(pool())));
}

TEST_CASE("builtin spec shape") {
  const auto spec = d4v2_spec();
  int total = 0;
  std::map<Family, int> per_family;
  for (const auto& [k, n] : spec) {
    total += n;
    per_family[k.family] += n;
    CHECK(n == 30);
  }
  CHECK(total == 390);
  CHECK(per_family[Family::temporal_rank] == 90);
  CHECK(per_family[Family::temporal_successor] == 90);
  CHECK(per_family[Family::temporal_interval_decoy] == 180);
  CHECK(per_family[Family::pair_far_control] == 30);
  CHECK(spec.at({Family::pair_far_control, 2}) == 30);
  for (int d : {4, 6, 7, 8, 9, 11}) CHECK(spec.at({Family::temporal_interval_decoy, d}) == 30);
}

TEST_CASE("generated manifest invariants") {
  const auto m = generate_benchmark(pool(), d4v2_spec(), 42);
  REQUIRE(m.cases.size() == 390);
  auto idx = index(pool());
  std::set<std::string> case_ids;
  std::map<CellKey, int> seen;
  long probe_rows = 0;
  for (const auto& c : m.cases) {
    CHECK(case_ids.insert(c.case_id).second);
    ++seen[{c.family, c.depth}];
    CHECK(c.depth_bin == depth_bin(c.depth));
    CHECK(std::set<std::string>(c.atom_ids.begin(), c.atom_ids.end()).size() == c.atom_ids.size());
    const auto need = c.family == Family::temporal_interval_decoy ? c.depth + 2 : c.depth;
    CHECK(c.atom_ids.size() == static_cast<std::size_t>(need));
    CHECK(c.sub_questions.size() == c.atom_ids.size());
    CHECK_FALSE(c.evidence_blocks);
    CHECK(gold_answer_oracle(c, pool()) == c.gold_answer);
    probe_rows += 4 * static_cast<long>(c.atom_ids.size());
    for (std::size_t k = 0; k < c.atom_ids.size(); ++k)
      CHECK(c.sub_questions[k].gold_answer == idx.at(c.atom_ids[k])->gold_answer);
  }
  CHECK(seen == m.counts);
  CHECK(probe_rows == 4L * (90 * 6 + 90 * 6 + 30 * (6 + 8 + 9 + 10 + 11 + 13) + 30 * 2));
}

TEST_CASE("family semantics recomputed from canonical years") {
  const auto m = generate_benchmark(pool(), d4v2_spec(), 7);
  auto idx = index(pool());
  auto year = [&](const std::string& id) { return idx.at(id)->canonical_value.year; };
  auto entity = [&](const std::string& id) { return idx.at(id)->entity; };
  for (const auto& c : m.cases) {
    CAPTURE(c.case_id);
    switch (c.family) {
      case Family::temporal_rank: {
        // labels sorted by year
        std::vector<std::pair<std::int64_t, std::string>> ys;
        for (std::size_t i = 0; i < c.atom_ids.size(); ++i) ys.emplace_back(year(c.atom_ids[i]), c.options[i].label);
        std::sort(ys.begin(), ys.end());
        std::string want;
        for (const auto& [y, l] : ys) want += (want.empty() ? "" : ", ") + l;
        CHECK(c.gold_answer == want);
        break;
      }
      case Family::temporal_successor: {
        const auto ref = year(c.atom_ids[0]);
        const bool after = c.relation == std::string("after");
        int hits = 0;
        for (std::size_t i = 1; i < c.atom_ids.size(); ++i) {
          const auto y = year(c.atom_ids[i]);
          if (after ? y > ref : y < ref) {
            ++hits;
            CHECK(c.gold_answer == entity(c.atom_ids[i]));
          }
        }
        CHECK(hits == 1);
        CHECK(c.options.size() == c.atom_ids.size() - 1);
        break;
      }
      case Family::temporal_interval_decoy: {
        const auto lo = year(c.atom_ids[0]);
        const auto hi = year(c.atom_ids[1]);
        int inside = 0;
        for (std::size_t i = 2; i < c.atom_ids.size(); ++i) {
          const auto y = year(c.atom_ids[i]);
          if (lo < y && y < hi) {
            ++inside;
            CHECK(c.gold_answer == entity(c.atom_ids[i]));
            CHECK(y - lo >= 5);
            CHECK(hi - y >= 5);
          } else {
            CHECK((y <= lo - 5 || y >= hi + 5));
          }
        }
        CHECK(inside == 1);
        break;
      }
      case Family::pair_far_control: {
        const auto a = year(c.atom_ids[0]);
        const auto b = year(c.atom_ids[1]);
        CHECK(std::llabs(a - b) > 50);
        CHECK(c.gold_answer == entity(a < b ? c.atom_ids[0] : c.atom_ids[1]));
        break;
      }
      default: FAIL("unexpected family");
    }
  }
}

TEST_CASE("generation is deterministic and seed-sensitive") {
  const auto a = manifest_to_string(generate_benchmark(pool(), d4v2_spec(), 3));
  const auto b = manifest_to_string(generate_benchmark(pool(), d4v2_spec(), 3));
  const auto c = manifest_to_string(generate_benchmark(pool(), d4v2_spec(), 4));
  CHECK(a == b);
  CHECK(a != c);
}

TEST_CASE("manifest round trip") {
  const auto m = generate_benchmark(pool(), d4v2_spec(), 5);
  const auto text = manifest_to_string(m);
  const auto path = temp_file("manifest.json", text);
  const auto back = load_manifest(path);
  CHECK(back.cases == m.cases);
  CHECK(back.counts == m.counts);
  CHECK(manifest_to_string(back) == text);
}

TEST_CASE("empty and infeasible specs") {
  CountSpec zero{{{Family::temporal_rank, 4}, 0}};
  CHECK(generate_benchmark(pool(), zero, 1).cases.empty());

  std::vector<AtomFact> five;
  for (int i = 0; i < 5; ++i) five.push_back(atom("a" + std::to_string(i), 1800 + 40 * i, "event " + std::to_string(i)));
  CountSpec decoy{{{Family::temporal_interval_decoy, 4}, 1}};
  try {
    generate_benchmark(five, decoy, 1);
    FAIL("expected infeasible");
  } catch (const InfeasibleError& e) {
    CHECK(std::string(e.what()).find("temporal_interval_decoy@d4") != std::string::npos);
  }
  CountSpec near{{{Family::pair_far_control, 2}, 1}};
  std::vector<AtomFact> close{atom("x", 1900, "x"), atom("y", 1910, "y")};
  CHECK_THROWS_AS(generate_benchmark(close, near, 1), InfeasibleError);
}

TEST_CASE("count spec files") {
  const auto path = temp_file("counts.json", R"({"cells":[{"family":"temporal_rank","depth":4,"count":2},
                                                        {"family":"kinship","depth":3,"count":1}]})");
  const auto spec = load_count_spec(path.string());
  CHECK(spec.at({Family::temporal_rank, 4}) == 2);
  const auto m = generate_benchmark(pool(), spec, 1);
  CHECK(m.cases.size() == 3);
  CHECK(load_count_spec("builtin:d4v2") == d4v2_spec());
}

TEST_CASE("oracle examples") {
  std::vector<AtomFact> p{atom("telephone", 1876, "the telephone"), atom("flight", 1903, "the first powered flight"),
                          atom("bastille", 1789, "the storming of the Bastille"), atom("wwi-end", 1918, "the end of World War I"),
                          atom("landing", 1969, "the Moon landing"), atom("cuba", 1962, "the Cuban Missile Crisis")};
  CompositionCase rank;
  rank.family = Family::temporal_rank;
  rank.depth = 4;
  rank.atom_ids = {"telephone", "flight", "bastille", "wwi-end"};
  for (std::size_t i = 0; i < 4; ++i) rank.options.push_back({option_label(i), p[i].entity});
  CHECK(gold_answer_oracle(rank, p) == "C, A, B, D");

  CompositionCase pair;
  pair.family = Family::pair_far_control;
  pair.depth = 2;
  pair.atom_ids = {"flight", "telephone"};
  CHECK(gold_answer_oracle(pair, p) == "the telephone");

  CompositionCase iv;
  iv.family = Family::temporal_interval_decoy;
  iv.depth = 2;
  iv.atom_ids = {"wwi-end", "landing", "cuba", "telephone"};
  CHECK(gold_answer_oracle(iv, p) == "the Cuban Missile Crisis");

  CompositionCase missing = pair;
  missing.atom_ids = {"flight", "nope"};
  CHECK_THROWS(gold_answer_oracle(missing, p));
}

TEST_CASE("synthetic families") {
  SUBCASE("kinship") {
    const auto cases = generate_synthetic_family(Family::kinship, 33, 3, 7, pool());
    REQUIRE(cases.size() == 33);
    for (const auto& c : cases) {
      REQUIRE(c.evidence_blocks);
      CHECK(c.evidence_blocks->size() == 3);
      CHECK(c.sub_questions.size() == 3);
      // walk the chain from the evidence: parent-of links
      const std::regex link(R"((\w+) is the (mother|father) of (\w+)\.)");
      std::map<std::string, std::string> parent;
      for (const auto& e : *c.evidence_blocks) {
        std::smatch mm;
        REQUIRE(std::regex_match(e, mm, link));
        parent[mm[3]] = mm[1];
      }
      std::set<std::string> parents;
      for (const auto& [child, par] : parent) parents.insert(par);
      std::string cur;
      for (const auto& [child, par] : parent)
        if (!parents.count(child)) cur = child;  // the youngest is nobody's parent
      REQUIRE_FALSE(cur.empty());
      while (parent.count(cur)) cur = parent[cur];
      CHECK(c.gold_answer == cur);
    }
  }
  SUBCASE("numerical") {
    const auto cases = generate_synthetic_family(Family::numerical, 20, 2, 0, pool());
    for (const auto& c : cases) {
      REQUIRE(c.evidence_blocks);
      const std::regex base(R"((\w+) holds (\d+) credits\.)");
      const std::regex delta(R"((\w+) holds (\d+) (more|fewer) credits than (\w+)\.)");
      std::map<std::string, long> value;
      std::vector<std::tuple<std::string, long, std::string>> rel;
      for (const auto& e : *c.evidence_blocks) {
        std::smatch mm;
        if (std::regex_match(e, mm, delta))
          rel.emplace_back(mm[1], (mm[3] == "more" ? 1 : -1) * std::stol(mm[2]), mm[4]);
        else if (std::regex_match(e, mm, base))
          value[mm[1]] = std::stol(mm[2]);
        else
          FAIL("unparsed evidence: " << e);
      }
      for (bool changed = true; changed;) {
        changed = false;
        for (const auto& [who, d, of] : rel)
          if (!value.count(who) && value.count(of)) value[who] = value[of] + d, changed = true;
      }
      std::set<std::string> referenced;
      for (const auto& [who, d, of] : rel) referenced.insert(of);
      for (const auto& [who, d, of] : rel)
        if (!referenced.count(who)) CHECK(c.gold_answer == std::to_string(value.at(who)));
    }
  }
  SUBCASE("spatial") {
    const auto cases = generate_synthetic_family(Family::spatial, 10, 4, 3, pool());
    for (const auto& c : cases) {
      REQUIRE(c.evidence_blocks);
      CHECK(c.evidence_blocks->size() == 4);
      CHECK(c.gold_answer == c.sub_questions.back().gold_answer);
    }
  }
  SUBCASE("names never collide with the pool") {
    std::set<std::string> pool_tokens;
    for (const auto& a : pool())
      for (const auto& text : {a.entity, a.statement}) {
        std::istringstream in(normalize(text).text);
        for (std::string t; in >> t;) pool_tokens.insert(t);
      }
    for (auto f : {Family::kinship, Family::numerical, Family::spatial})
      for (const auto& c : generate_synthetic_family(f, 30, 4, 11, pool()))
        for (const auto& s : c.sub_questions)
          if (!std::isdigit(static_cast<unsigned char>(s.gold_answer[0]))) CHECK_FALSE(pool_tokens.count(normalize(s.gold_answer).text));
  }
  CHECK(generate_synthetic_family(Family::kinship, 0, 3, 1).empty());
  CHECK_THROWS(generate_synthetic_family(Family::temporal_rank, 1, 3, 1));
}
