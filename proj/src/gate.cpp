#include "gatebench/gate.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <ctime>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "gatebench/errors.hpp"
#include "gatebench/io.hpp"

namespace gatebench {

std::string_view to_string(Mode m) noexcept { return m == Mode::closed_book ? "closed_book" : "in_context"; }

namespace {

Mode mode_from_string(std::string_view s) {
  if (s == "closed_book") return Mode::closed_book;
  if (s == "in_context") return Mode::in_context;
  throw ParseError("unknown mode '" + std::string(s) + "'");
}

std::string_view to_string(ArtifactFlag f) noexcept {
  return f == ArtifactFlag::format_artifact ? "format_artifact" : "over_abstention";
}

ArtifactFlag artifact_flag_from_string(std::string_view s) {
  if (s == "format_artifact") return ArtifactFlag::format_artifact;
  if (s == "over_abstention") return ArtifactFlag::over_abstention;
  throw ParseError("unknown artifact flag '" + std::string(s) + "'");
}

constexpr std::string_view kTransportWarning = "transport_failure";
constexpr std::string_view kHttpWarning = "http_error";

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

}  // namespace

bool CaseRecord::transport_failed() const {
  return std::any_of(warnings.begin(), warnings.end(), [](const std::string& w) {
    return starts_with(w, kTransportWarning) || starts_with(w, kHttpWarning);
  });
}

void to_json(json& j, const CaseRecord& r) {
  j = json{{"record_id", r.record_id},
           {"case_id", r.case_id},
           {"kind", to_string(r.kind)},
           {"atom_id", r.atom_id ? json(*r.atom_id) : json(nullptr)},
           {"probe_index", r.probe_index ? json(*r.probe_index) : json(nullptr)},
           {"family", to_string(r.family)},
           {"depth", r.depth},
           {"depth_bin", r.depth_bin},
           {"prompt_variant", to_string(r.prompt_variant)},
           {"mode", to_string(r.mode)},
           {"model_id", r.model_id},
           {"prompt", r.prompt},
           {"raw_output", r.raw_output},
           {"extracted_answer", r.extracted_answer ? json(*r.extracted_answer) : json(nullptr)},
           {"abstained", r.abstained},
           {"format_ok", r.format_ok},
           {"match_exact", r.match_exact},
           {"match_consistency", r.match_consistency},
           {"rule_fired", to_string(r.rule_fired)},
           {"reject_reason", r.reject_reason ? json(to_string(*r.reject_reason)) : json(nullptr)},
           {"warnings", r.warnings},
           {"timestamp", r.timestamp},
           {"run_id", r.run_id},
           {"seed", r.seed}};
}

void from_json(const json& j, CaseRecord& r) {
  r.record_id = j.at("record_id").get<std::string>();
  r.case_id = j.at("case_id").get<std::string>();
  r.kind = probe_kind_from_string(j.at("kind").get<std::string>());
  r.atom_id = j.at("atom_id").is_null() ? std::nullopt : std::optional(j.at("atom_id").get<std::string>());
  r.probe_index = j.at("probe_index").is_null() ? std::nullopt : std::optional(j.at("probe_index").get<int>());
  r.family = family_from_string(j.at("family").get<std::string>());
  r.depth = j.at("depth").get<int>();
  r.depth_bin = j.at("depth_bin").get<int>();
  r.prompt_variant = prompt_variant_from_string(j.at("prompt_variant").get<std::string>());
  r.mode = mode_from_string(j.at("mode").get<std::string>());
  r.model_id = j.at("model_id").get<std::string>();
  r.prompt = j.at("prompt").get<std::string>();
  r.raw_output = j.at("raw_output").get<std::string>();
  r.extracted_answer =
      j.at("extracted_answer").is_null() ? std::nullopt : std::optional(j.at("extracted_answer").get<std::string>());
  r.abstained = j.at("abstained").get<bool>();
  r.format_ok = j.at("format_ok").get<bool>();
  r.match_exact = j.at("match_exact").get<bool>();
  r.match_consistency = j.at("match_consistency").get<bool>();
  r.rule_fired = match_rule_from_string(j.at("rule_fired").get<std::string>());
  r.reject_reason = j.at("reject_reason").is_null()
                        ? std::nullopt
                        : std::optional(reject_reason_from_string(j.at("reject_reason").get<std::string>()));
  r.warnings = j.at("warnings").get<std::vector<std::string>>();
  r.timestamp = j.at("timestamp").get<std::string>();
  r.run_id = j.at("run_id").get<std::string>();
  r.seed = j.at("seed").get<std::uint64_t>();
}

std::string records_to_jsonl(std::span<const CaseRecord> records) {
  std::string out;
  for (const auto& r : records) {
    out += json(r).dump();
    out += '\n';
  }
  return out;
}

namespace {

template <class T>
std::vector<T> parse_jsonl(std::string_view text, std::string_view what) {
  std::vector<T> out;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const auto line = text.substr(start, end - start);
    ++line_no;
    start = end + 1;
    if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
    try {
      out.push_back(json::parse(line).get<T>());
    } catch (const std::exception& e) {
      throw ParseError(std::string(what) + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace

std::vector<CaseRecord> records_from_jsonl(std::string_view text) { return parse_jsonl<CaseRecord>(text, "records"); }

std::vector<CaseRecord> read_records(const std::filesystem::path& path) {
  return records_from_jsonl(read_file(path));
}

std::string utc_now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// ---------------------------------------------------------------------------
// Probing

namespace {

struct Probe {
  const CompositionCase* c = nullptr;
  const AtomFact* atom = nullptr;  // atom probes and temporal sub-questions
  ProbeKind kind = ProbeKind::main;
  std::string question;
  std::string gold;
  std::optional<std::string> atom_id;
  std::optional<int> probe_index;
  std::vector<std::string> wrong_answers;
};

std::vector<std::string> rank_wrong_orders(const std::string& gold) {
  auto labels = split_label_sequence(gold);
  std::vector<std::string> out;
  for (std::size_t k = 0; k + 1 < labels.size(); ++k) {
    auto swapped = labels;
    std::swap(swapped[k], swapped[k + 1]);
    std::string s;
    for (const auto& l : swapped) s += (s.empty() ? "" : ", ") + l;
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<std::string> main_wrong_answers(const CompositionCase& c) {
  std::vector<std::string> out;
  if (c.family == Family::temporal_rank) return rank_wrong_orders(c.gold_answer);
  for (const auto& o : c.options)
    if (o.text != c.gold_answer) out.push_back(o.text);
  if (!out.empty()) return out;
  if (c.family == Family::numerical) {
    const auto v = std::stoll(c.gold_answer);
    for (long long d : {-3, -2, -1, 1, 2, 3}) out.push_back(std::to_string(v + d));
    return out;
  }
  for (const auto& s : c.sub_questions)
    if (s.gold_answer != c.gold_answer) out.push_back(s.gold_answer);
  return out;
}

std::vector<std::string> sub_wrong_answers(const CompositionCase& c, const std::string& gold) {
  std::vector<std::string> out;
  if (!is_synthetic(c.family)) return out;
  for (const auto& s : c.sub_questions)
    if (s.gold_answer != gold) out.push_back(s.gold_answer);
  if (c.gold_answer != gold && std::find(out.begin(), out.end(), c.gold_answer) == out.end())
    out.push_back(c.gold_answer);
  return out;
}

std::string record_id_for(const Probe& p) {
  std::string id = p.c->case_id + ":" + std::string(to_string(p.kind));
  if (p.atom_id) id += ":" + *p.atom_id;
  if (p.probe_index) id += ":" + std::to_string(*p.probe_index);
  return id;
}

}  // namespace

ScoredAnswer score_response(const CompositionCase& c, ProbeKind kind, const std::string& question,
                            const std::string& gold, const AtomFact* atom, const BackendResponse& response,
                            const PromptVariant& variant, Mode mode, const MatcherConfig& matcher) {
  ScoredAnswer out;
  // OpenAI-compatible servers drop the matched stop string from the
  // completion. When the server reports a stop-string finish, the closing tag
  // is restored for extraction only; raw_output stays verbatim.
  std::string text = response.raw_text;
  if (variant.stop_string && response.transport_meta.is_object() &&
      response.transport_meta.value("finish_reason", std::string()) == "stop" &&
      text.find(*variant.stop_string) == std::string::npos && text.find("<answer>") != std::string::npos) {
    text += *variant.stop_string;
    out.warnings.emplace_back("stop_string_restored");
  }
  out.extraction = extract_answer(text, variant);
  if (!out.extraction.extracted_answer) {
    out.verdict = MatchVerdict::reject(RejectReason::format_violation);
    return out;
  }

  MatchContext ctx;
  ctx.question = question;
  ctx.gold_is_knowable = !(is_synthetic(c.family) && mode == Mode::closed_book);
  ctx.temporal_gold = !is_synthetic(c.family);
  ctx.short_forms = matcher.short_forms;
  if (atom) ctx.granularity = atom->granularity;
  const auto& candidate = *out.extraction.extracted_answer;

  MatchVerdict v;
  if (kind == ProbeKind::main) {
    ctx.options = c.options;
    if (c.family == Family::temporal_rank)
      v = match_ordering(candidate, split_label_sequence(gold), ctx);
    else
      v = match(candidate, gold, ctx);
  } else {
    v = match(candidate, gold, ctx);
  }
  out.verdict = adjudicated_match(v, matcher.adjudicator ? &*matcher.adjudicator : nullptr, question, gold,
                                  candidate, out.warnings);
  return out;
}

std::vector<CaseRecord> run_benchmark(const BenchmarkManifest& manifest, std::span<const AtomFact> pool,
                                      const Backend& backend, const RunOptions& options) {
  backend.validate();
  const auto& variant = options.variant;
  const Mode mode = variant.id == PromptVariantId::in_context_evidence ? Mode::in_context : Mode::closed_book;

  std::unordered_map<std::string_view, const AtomFact*> by_id;
  for (const auto& a : pool) by_id.emplace(a.atom_id, &a);

  std::vector<Probe> probes;
  for (const auto& c : manifest.cases) {
    if (mode == Mode::in_context && !c.evidence_blocks)
      throw ConfigError("case " + c.case_id + " has no evidence blocks; in_context_evidence cannot run it");
    if (!is_synthetic(c.family)) {
      for (const auto& id : c.atom_ids) {
        auto it = by_id.find(id);
        if (it == by_id.end()) throw ConfigError("case " + c.case_id + " references unknown atom " + id);
        for (int i = 0; i < 4; ++i) {
          Probe p;
          p.c = &c;
          p.atom = it->second;
          p.kind = ProbeKind::atom_probe;
          p.question = it->second->paraphrases[static_cast<std::size_t>(i)];
          p.gold = it->second->gold_answer;
          p.atom_id = id;
          p.probe_index = i;
          probes.push_back(std::move(p));
        }
      }
    }
    for (std::size_t k = 0; k < c.sub_questions.size(); ++k) {
      Probe p;
      p.c = &c;
      p.kind = ProbeKind::sub_question;
      p.question = c.sub_questions[k].text;
      p.gold = c.sub_questions[k].gold_answer;
      if (k < c.atom_ids.size()) {
        p.atom_id = c.atom_ids[k];
        if (auto it = by_id.find(c.atom_ids[k]); it != by_id.end()) p.atom = it->second;
      }
      p.wrong_answers = sub_wrong_answers(c, p.gold);
      probes.push_back(std::move(p));
    }
    Probe p;
    p.c = &c;
    p.kind = ProbeKind::main;
    p.question = c.main_question;
    p.gold = c.gold_answer;
    p.wrong_answers = main_wrong_answers(c);
    probes.push_back(std::move(p));
  }

  const auto clock = options.clock ? options.clock : std::function<std::string()>(utc_now_iso8601);
  const auto model_id = backend.model_id();
  std::vector<CaseRecord> records(probes.size());

  auto run_one = [&](std::size_t i) {
    const auto& p = probes[i];
    const auto& c = *p.c;
    CaseRecord r;
    r.record_id = record_id_for(p);
    r.case_id = c.case_id;
    r.kind = p.kind;
    r.atom_id = p.atom_id;
    r.probe_index = p.probe_index;
    r.family = c.family;
    r.depth = c.depth;
    r.depth_bin = c.depth_bin;
    r.prompt_variant = variant.id;
    r.mode = mode;
    r.model_id = model_id;
    r.run_id = options.run_id;
    r.seed = options.seed;
    const bool with_evidence = mode == Mode::in_context && c.evidence_blocks && p.kind != ProbeKind::atom_probe;
    r.prompt = with_evidence ? build_prompt(p.question, variant, std::span<const std::string>(*c.evidence_blocks))
                             : build_prompt(p.question, variant);

    QuerySpec q;
    q.model_id = model_id;
    q.prompt = r.prompt;
    q.temperature = 0.0;
    q.max_tokens = variant.max_output_tokens;
    q.stop = variant.stop_string;

    ProbeInfo info;
    info.case_id = c.case_id;
    info.kind = p.kind;
    info.depth_bin = c.depth_bin;
    info.gold = p.gold;
    info.probe_index = p.probe_index.value_or(0);
    info.atom_id = p.atom_id.value_or("");
    if (p.kind == ProbeKind::main) info.case_atoms = c.atom_ids;
    info.wrong_answers = p.wrong_answers;

    const auto resp = backend.query(q, info);
    r.timestamp = clock();
    r.raw_output = resp.raw_text;
    if (resp.status != TransportStatus::ok) {
      r.warnings.push_back(std::string(resp.status == TransportStatus::http_error ? kHttpWarning : kTransportWarning) +
                           ": " + resp.error);
      records[i] = std::move(r);
      return;
    }
    if (resp.transport_meta.is_object() && resp.transport_meta.value("retries", 0) > 0)
      r.warnings.push_back("retries: " + std::to_string(resp.transport_meta.value("retries", 0)));
    auto scored = score_response(c, p.kind, p.question, p.gold, p.atom, resp, variant, mode, options.matcher);
    r.extracted_answer = scored.extraction.extracted_answer;
    r.abstained = scored.extraction.abstained;
    r.format_ok = scored.extraction.format_ok;
    r.match_exact = scored.verdict.exact;
    r.match_consistency = scored.verdict.consistency;
    r.rule_fired = scored.verdict.rule_fired;
    r.reject_reason = scored.verdict.reject_reason;
    for (auto& w : scored.warnings) r.warnings.push_back(std::move(w));
    records[i] = std::move(r);
  };

  const auto workers = static_cast<std::size_t>(std::max(1, options.parallelism));
  if (workers == 1 || probes.size() < 2) {
    for (std::size_t i = 0; i < probes.size(); ++i) run_one(i);
    return records;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool_threads;
  for (std::size_t w = 0; w < workers; ++w) {
    pool_threads.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < probes.size(); i = next++) run_one(i);
      } catch (...) {
        errors[w] = std::current_exception();
        next = probes.size();
      }
    });
  }
  for (auto& t : pool_threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return records;
}

// ---------------------------------------------------------------------------
// Gating

void to_json(json& j, const GateVerdict& v) {
  json flags = json::array();
  for (auto f : v.artifact_flags) flags.push_back(to_string(f));
  j = json{{"case_id", v.case_id},
           {"family", to_string(v.family)},
           {"depth", v.depth},
           {"depth_bin", v.depth_bin},
           {"atoms_stable", v.atoms_stable},
           {"atomic_gate_pass", v.atomic_gate_pass},
           {"subq_gate_pass", v.subq_gate_pass},
           {"double_gate_pass", v.double_gate_pass},
           {"single_gate_pass", v.single_gate_pass},
           {"main_correct", v.main_correct},
           {"residual_failure", v.residual_failure},
           {"artifact_flags", std::move(flags)},
           {"determinate", v.determinate},
           {"indeterminate_reason", v.indeterminate_reason}};
}

void from_json(const json& j, GateVerdict& v) {
  v.case_id = j.at("case_id").get<std::string>();
  v.family = family_from_string(j.at("family").get<std::string>());
  v.depth = j.at("depth").get<int>();
  v.depth_bin = j.at("depth_bin").get<int>();
  v.atoms_stable = j.at("atoms_stable").get<std::map<std::string, bool>>();
  v.atomic_gate_pass = j.at("atomic_gate_pass").get<bool>();
  v.subq_gate_pass = j.at("subq_gate_pass").get<bool>();
  v.double_gate_pass = j.at("double_gate_pass").get<bool>();
  v.single_gate_pass = j.at("single_gate_pass").get<bool>();
  v.main_correct = j.at("main_correct").get<bool>();
  v.residual_failure = j.at("residual_failure").get<bool>();
  v.artifact_flags.clear();
  for (const auto& f : j.at("artifact_flags")) v.artifact_flags.push_back(artifact_flag_from_string(f.get<std::string>()));
  v.determinate = j.value("determinate", true);
  v.indeterminate_reason = j.value("indeterminate_reason", std::string());
}

std::string verdicts_to_jsonl(std::span<const GateVerdict> verdicts) {
  std::string out;
  for (const auto& v : verdicts) {
    out += json(v).dump();
    out += '\n';
  }
  return out;
}

std::vector<GateVerdict> read_verdicts(const std::filesystem::path& path) {
  return parse_jsonl<GateVerdict>(read_file(path), "verdicts");
}

bool compute_stability(std::span<const CaseRecord> atom_records) {
  const std::string atom = atom_records.empty() || !atom_records.front().atom_id ? std::string("?")
                                                                                  : *atom_records.front().atom_id;
  if (atom_records.size() != 4)
    throw ProtocolError("atom " + atom + ": expected 4 paraphrase probes, found " +
                        std::to_string(atom_records.size()));
  std::array<bool, 4> seen{};
  for (const auto& r : atom_records) {
    if (r.kind != ProbeKind::atom_probe || !r.probe_index || *r.probe_index < 0 || *r.probe_index > 3 ||
        seen[static_cast<std::size_t>(*r.probe_index)] || r.atom_id != atom_records.front().atom_id)
      throw ProtocolError("atom " + atom + ": probes must be atom_probe records with indices 0..3");
    seen[static_cast<std::size_t>(*r.probe_index)] = true;
  }
  return std::all_of(atom_records.begin(), atom_records.end(), [](const CaseRecord& r) {
    return !r.transport_failed() && !r.abstained && r.match_consistency;
  });
}

GateVerdict gate_case(const CompositionCase& c, std::span<const CaseRecord> records) {
  GateVerdict v;
  v.case_id = c.case_id;
  v.family = c.family;
  v.depth = c.depth;
  v.depth_bin = c.depth_bin;
  auto indeterminate = [&v](std::string why) {
    v.determinate = false;
    v.indeterminate_reason = std::move(why);
    v.atomic_gate_pass = v.subq_gate_pass = v.double_gate_pass = v.single_gate_pass = false;
    v.main_correct = v.residual_failure = false;
    v.artifact_flags.clear();
    return v;
  };

  std::map<std::string, std::vector<CaseRecord>> atom_probes;
  std::map<std::string, const CaseRecord*> subs;
  const CaseRecord* main = nullptr;
  for (const auto& r : records) {
    if (r.case_id != c.case_id) continue;
    if (r.transport_failed()) return indeterminate("transport failure in " + r.record_id);
    switch (r.kind) {
      case ProbeKind::atom_probe:
        if (!r.atom_id) throw ProtocolError("atom probe " + r.record_id + " has no atom_id");
        atom_probes[*r.atom_id].push_back(r);
        break;
      case ProbeKind::sub_question:
        if (!r.atom_id) throw ProtocolError("sub-question " + r.record_id + " has no atom_id");
        if (subs.contains(*r.atom_id)) throw ProtocolError("duplicate sub-question record " + r.record_id);
        subs[*r.atom_id] = &r;
        break;
      case ProbeKind::main:
        if (main) throw ProtocolError("duplicate main record for case " + c.case_id);
        main = &r;
        break;
    }
  }

  const bool expects_atom_probes = !is_synthetic(c.family);
  bool atomic = true;
  for (const auto& id : c.atom_ids) {
    if (!expects_atom_probes) break;
    auto it = atom_probes.find(id);
    if (it == atom_probes.end() || it->second.size() < 4) return indeterminate("missing atom probes for " + id);
    const bool stable = compute_stability(it->second);
    v.atoms_stable[id] = stable;
    atomic = atomic && stable;
  }
  bool subq = true;
  for (std::size_t k = 0; k < c.sub_questions.size(); ++k) {
    const auto& id = k < c.atom_ids.size() ? c.atom_ids[k] : std::string();
    auto it = subs.find(id);
    if (it == subs.end()) return indeterminate("missing sub-question record for " + id);
    subq = subq && it->second->match_consistency;
  }
  if (!main) return indeterminate("missing main record");

  v.atomic_gate_pass = atomic;
  v.subq_gate_pass = subq;
  v.double_gate_pass = atomic && subq;
  v.single_gate_pass = subq;
  v.main_correct = main->match_consistency;
  v.residual_failure = v.double_gate_pass && !v.main_correct;
  if (!main->format_ok) v.artifact_flags.push_back(ArtifactFlag::format_artifact);
  if (main->abstained && v.double_gate_pass) v.artifact_flags.push_back(ArtifactFlag::over_abstention);
  return v;
}

std::vector<GateVerdict> gate_records(std::span<const CaseRecord> records, const BenchmarkManifest* manifest) {
  std::unordered_map<std::string, std::vector<CaseRecord>> by_case;
  std::vector<std::string> order;
  for (const auto& r : records) {
    auto [it, inserted] = by_case.try_emplace(r.case_id);
    if (inserted) order.push_back(r.case_id);
    it->second.push_back(r);
  }

  std::vector<GateVerdict> out;
  if (manifest) {
    for (const auto& c : manifest->cases) {
      auto it = by_case.find(c.case_id);
      if (it == by_case.end()) {
        out.push_back(gate_case(c, {}));
        continue;
      }
      out.push_back(gate_case(c, it->second));
    }
    return out;
  }

  // Infer each case's structure from its records: sub-questions are aligned
  // with atoms, so their atom ids give the atom list.
  for (const auto& id : order) {
    const auto& recs = by_case[id];
    CompositionCase c;
    c.case_id = id;
    c.family = recs.front().family;
    c.depth = recs.front().depth;
    c.depth_bin = recs.front().depth_bin;
    for (const auto& r : recs) {
      if (r.kind == ProbeKind::sub_question && r.atom_id) {
        c.atom_ids.push_back(*r.atom_id);
        c.sub_questions.push_back({});
      }
    }
    if (c.atom_ids.empty()) {
      for (const auto& r : recs)
        if (r.kind == ProbeKind::atom_probe && r.atom_id &&
            std::find(c.atom_ids.begin(), c.atom_ids.end(), *r.atom_id) == c.atom_ids.end())
          c.atom_ids.push_back(*r.atom_id);
    }
    out.push_back(gate_case(c, recs));
  }
  return out;
}

GatePopulationStats gate_population_stats(std::span<const GateVerdict> verdicts) {
  GatePopulationStats s;
  int single_fail = 0;
  int double_fail = 0;
  for (const auto& v : verdicts) {
    if (!v.determinate) continue;
    if (v.double_gate_pass && !v.single_gate_pass)
      throw ProtocolError("case " + v.case_id + " passes the double gate but not the single gate");
    if (v.single_gate_pass) {
      ++s.single_gate_n;
      if (!v.main_correct) ++single_fail;
    }
    if (v.double_gate_pass) {
      ++s.double_gate_n;
      if (!v.main_correct) ++double_fail;
    }
  }
  if (s.single_gate_n == 0) throw ValidationError("no single-gate-passing cases");
  s.removed_fraction = 1.0 - static_cast<double>(s.double_gate_n) / static_cast<double>(s.single_gate_n);
  s.single_gate_rate = static_cast<double>(single_fail) / static_cast<double>(s.single_gate_n);
  s.double_gate_rate = s.double_gate_n > 0 ? static_cast<double>(double_fail) / static_cast<double>(s.double_gate_n) : 0.0;
  s.inflation_pp = 100.0 * (s.single_gate_rate - s.double_gate_rate);
  return s;
}

json to_json_value(const GatePopulationStats& s) {
  return json{{"single_gate_n", s.single_gate_n},     {"double_gate_n", s.double_gate_n},
              {"removed_fraction", s.removed_fraction}, {"single_gate_rate", s.single_gate_rate},
              {"double_gate_rate", s.double_gate_rate}, {"inflation_pp", s.inflation_pp}};
}

}  // namespace gatebench
