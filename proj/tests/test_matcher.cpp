#include <doctest.h>

#include <atomic>
#include <thread>

#include <httplib.h>

#include "gatebench/matcher.hpp"

using namespace gatebench;

namespace {

MatchContext temporal() { return MatchContext{}; }

MatchContext with_options(std::vector<Option> options) {
  MatchContext c;
  c.options = std::move(options);
  return c;
}

}  // namespace

TEST_CASE("normalize") {
  SUBCASE("years") {
    CHECK(normalize("1876").value->year == 1876);
    CHECK(normalize("1876 AD").value->year == 1876);
    CHECK(normalize("the year 1876").value->year == 1876);
    CHECK(normalize("In 1876.").value->year == 1876);
  }
  SUBCASE("bce") {
    const auto n = normalize("44 BC");
    REQUIRE(n.value);
    CHECK(n.value->year == -44);
    CHECK(n.era_marked);
    CHECK(normalize("44 B.C.E.").value->year == -44);
  }
  SUBCASE("dates") {
    const auto iso = normalize("1969-07-20");
    REQUIRE(iso.value);
    CHECK(iso.value->year == 1969);
    CHECK(iso.value->month == 7);
    CHECK(iso.value->day == 20);
    const auto prose = normalize("July 20th, 1969");
    REQUIRE(prose.value);
    CHECK(*prose.value == *iso.value);
  }
  SUBCASE("text") {
    CHECK(normalize("  The   Moon-Landing!! ").text == "the moon landing");
    CHECK(normalize("Newton's law").text == "newtons law");
    CHECK_FALSE(normalize("Apollo eleven").value);
    CHECK_FALSE(normalize("between 1900 and 1910").value);
  }
}

TEST_CASE("exact match after normalisation") {
  CHECK(match("1876", "1876", temporal()).rule_fired == MatchRule::exact_norm);
  CHECK(match("the year 1876", "1876", temporal()).exact);
  CHECK(match("1876 AD", "1876", temporal()).consistency);
  CHECK(match("The Moon Landing.", "the moon landing", temporal()).exact);
  // failing: a different year far away
  const auto v = match("1850", "1876", temporal());
  CHECK_FALSE(v.consistency);
  CHECK(v.reject_reason == RejectReason::contradiction);
}

TEST_CASE("BC/BCE equivalence") {
  const auto v = match("44 BCE", "44 BC", temporal());
  CHECK(v.consistency);
  CHECK(v.rule_fired == MatchRule::bce_equiv);
  CHECK_FALSE(v.exact);
  CHECK(match("200 B.C.", "200 BCE", temporal()).consistency);
  // failing: dropping the era flips the sign of the year
  CHECK_FALSE(match("44 AD", "44 BC", temporal()).consistency);
  CHECK_FALSE(match("44", "44 BC", temporal()).consistency);
}

TEST_CASE("plus or minus one year") {
  const auto v = match("1877", "1876", temporal());
  CHECK(v.consistency);
  CHECK_FALSE(v.exact);
  CHECK(v.rule_fired == MatchRule::year_tolerance);
  CHECK(match("1875", "1876", temporal()).consistency);
  // no year zero: 1 BC and AD 1 are adjacent
  CHECK(match("AD 1", "1 BC", temporal()).consistency);
  // failing: two years off
  const auto off = match("1878", "1876", temporal());
  CHECK_FALSE(off.consistency);
  CHECK(off.reject_reason == RejectReason::contradiction);
  // numeric golds that are not years get no tolerance
  MatchContext numeric;
  numeric.temporal_gold = false;
  CHECK_FALSE(match("41", "42", numeric).consistency);
  CHECK(match("42", "42", numeric).consistency);
}

TEST_CASE("partial names") {
  MatchContext c;
  CHECK(match("Einstein", "Albert Einstein", c).rule_fired == MatchRule::partial_name);
  CHECK(match("WWI", "World War I", c).consistency);
  CHECK(match("the Great War", "World War I", c).consistency);
  CHECK(match("WW2", "the end of World War II", c).consistency);
  // failing: a too-short fragment and an ambiguous surname
  CHECK(match("Ohm", "Georg Ohm", c).reject_reason == RejectReason::incomplete);
  auto ambiguous = with_options({{"A", "Albert Einstein"}, {"B", "Hans Albert Einstein"}});
  CHECK_FALSE(match("Einstein", "Albert Einstein", ambiguous).consistency);
  // failing: WWII is not WWI
  CHECK_FALSE(match("WWII", "World War I", c).consistency);
}

TEST_CASE("option labels resolve to their text") {
  auto c = with_options({{"A", "the telephone patent"}, {"B", "the first powered flight"}});
  CHECK(match("B", "the first powered flight", c).consistency);
  CHECK(match("(B)", "the first powered flight", c).consistency);
  CHECK(match("(B) the first powered flight", "the first powered flight", c).consistency);
  CHECK_FALSE(match("A", "the first powered flight", c).consistency);
  CHECK(match("A", "the first powered flight", c).reject_reason == RejectReason::wrong_entity);
}

TEST_CASE("wrong entity") {
  const auto v = match("Franco-Prussian War", "Spanish-American War", temporal());
  CHECK_FALSE(v.consistency);
  CHECK(v.reject_reason == RejectReason::wrong_entity);
  CHECK(match("Spanish American War", "Spanish-American War", temporal()).consistency);
}

TEST_CASE("incomplete answers") {
  MatchContext monthly;
  monthly.granularity = Granularity::month;
  const auto v = match("1969", "July 1969", monthly);
  CHECK_FALSE(v.consistency);
  CHECK(v.reject_reason == RejectReason::incomplete);
  CHECK(match("July 1969", "1969-07", monthly).consistency);
  CHECK_FALSE(match("August 1969", "July 1969", monthly).consistency);
}

TEST_CASE("abstention") {
  MatchContext knowable;
  const auto v = match("INSUFFICIENT_EVIDENCE", "1876", knowable);
  CHECK_FALSE(v.consistency);
  CHECK(v.reject_reason == RejectReason::abstention_on_knowable);

  MatchContext unknowable;
  unknowable.gold_is_knowable = false;
  const auto ok = match("  INSUFFICIENT_EVIDENCE\n", "Ardel Vosk", unknowable);
  CHECK(ok.consistency);
  CHECK(ok.rule_fired == MatchRule::abstention_valid);
  // case variants are not the token
  CHECK_FALSE(is_abstention("insufficient_evidence"));
  CHECK(is_abstention(" INSUFFICIENT_EVIDENCE "));
}

TEST_CASE("format violation") {
  const auto v = match("   ", "1876", temporal());
  CHECK(v.reject_reason == RejectReason::format_violation);
  CHECK(match("1876", "1876", temporal()).consistency);
}

TEST_CASE("ordering answers") {
  const std::vector<std::string> gold{"C", "D", "A", "B"};
  std::vector<Option> options{{"A", "event a"}, {"B", "event b"}, {"C", "event c"}, {"D", "event d"}};
  MatchContext c;
  c.options = options;
  CHECK(match_ordering("C, D, A, B", gold, c).exact);
  CHECK(match_ordering("C -> D -> A -> B", gold, c).consistency);
  CHECK(match_ordering("C D A B", gold, c).consistency);
  CHECK(match_ordering("(C) event c, (D) event d, (A) event a, (B) event b", gold, c).consistency);
  CHECK(match_ordering("event c, event d, event a, event b", gold, c).consistency);
  CHECK(match_ordering("C < D < A < B", gold, c).consistency);

  SUBCASE("incomplete ordering") {
    const auto v = match_ordering("C, D, A", gold, c);
    CHECK_FALSE(v.consistency);
    CHECK(v.reject_reason == RejectReason::incomplete);
    CHECK(match_ordering("C", gold, c).reject_reason == RejectReason::incomplete);
  }
  SUBCASE("wrong order") {
    const auto v = match_ordering("D, C, A, B", gold, c);
    CHECK_FALSE(v.consistency);
    CHECK(v.reject_reason == RejectReason::contradiction);
  }
  SUBCASE("unknown element") {
    CHECK(match_ordering("C, D, A, E", gold, c).reject_reason == RejectReason::wrong_entity);
  }
  CHECK(match_ordering("INSUFFICIENT_EVIDENCE", gold, c).reject_reason == RejectReason::abstention_on_knowable);
}

TEST_CASE("split_ordering") {
  CHECK(split_ordering("A then B then C") == std::vector<std::string>{"A", "B", "C"});
  CHECK(split_ordering("1. A\n2. B") == std::vector<std::string>{"A", "B"});
}

TEST_CASE("external adjudicator tier") {
  httplib::Server adj;
  std::atomic<int> calls{0};
  adj.Post("/adjudicate", [&](const httplib::Request& req, httplib::Response& res) {
    ++calls;
    const auto body = json::parse(req.body);
    const bool same = body.at("candidate") == "the year the telephone was invented" && body.at("gold") == "1876";
    res.set_content(json{{"match", same}}.dump(), "application/json");
  });
  const int port = adj.bind_to_any_port("127.0.0.1");
  std::thread t([&] { adj.listen_after_bind(); });
  adj.wait_until_ready();

  AdjudicatorClient client;
  client.endpoint = "http://127.0.0.1:" + std::to_string(port) + "/adjudicate";
  client.retry.initial_backoff = std::chrono::milliseconds(0);
  std::vector<std::string> warnings;

  SUBCASE("reasonable paraphrase is accepted by the adjudicator") {
    const auto rule = match("the year the telephone was invented", "1876", MatchContext{});
    CHECK_FALSE(rule.consistency);
    const auto v = adjudicated_match(rule, &client, "When was the telephone patented?", "1876",
                                     "the year the telephone was invented", warnings);
    CHECK(v.consistency);
    CHECK(v.rule_fired == MatchRule::paraphrase);
    CHECK(calls == 1);
  }
  SUBCASE("adjudicator rejection keeps the rule verdict") {
    const auto rule = match("the year of the moon landing", "1876", MatchContext{});
    const auto v = adjudicated_match(rule, &client, "q", "1876", "the year of the moon landing", warnings);
    CHECK_FALSE(v.consistency);
    CHECK(v == rule);
  }
  SUBCASE("rule accepts never reach the adjudicator") {
    const auto rule = match("1876", "1876", MatchContext{});
    const auto v = adjudicated_match(rule, &client, "q", "1876", "1876", warnings);
    CHECK(v.exact);
    CHECK(calls == 0);
  }
  SUBCASE("format violations and knowable abstentions are never adjudicated") {
    const auto rule = match("INSUFFICIENT_EVIDENCE", "1876", MatchContext{});
    adjudicated_match(rule, &client, "q", "1876", "INSUFFICIENT_EVIDENCE", warnings);
    CHECK(calls == 0);
  }
  SUBCASE("unreachable adjudicator falls back with a warning") {
    AdjudicatorClient dead = client;
    dead.endpoint = "http://127.0.0.1:1/adjudicate";
    dead.retry.max_retries = 0;
    dead.timeout = std::chrono::milliseconds(500);
    const auto rule = match("the year the telephone was invented", "1876", MatchContext{});
    const auto v = adjudicated_match(rule, &dead, "q", "1876", "the year the telephone was invented", warnings);
    CHECK(v == rule);
    REQUIRE(warnings.size() == 1);
  }
  adj.stop();
  t.join();
}
