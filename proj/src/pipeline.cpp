#include "gatebench/pipeline.hpp"

#include <ostream>
#include <set>

#include "gatebench/gate.hpp"
#include "gatebench/generator.hpp"
#include "gatebench/io.hpp"
#include "gatebench/prompt.hpp"
#include "gatebench/report.hpp"
#include "gatebench/stats.hpp"

namespace gatebench {

namespace fs = std::filesystem;

std::string_view to_string(Stage s) noexcept {
  switch (s) {
    case Stage::generate: return "generate";
    case Stage::run: return "run";
    case Stage::gate: return "gate";
    case Stage::score: return "score";
    case Stage::report: return "report";
  }
  return "generate";
}

Stage stage_from_string(std::string_view s) {
  for (auto st : {Stage::generate, Stage::run, Stage::gate, Stage::score, Stage::report})
    if (to_string(st) == s) return st;
  throw ConfigError("unknown stage '" + std::string(s) + "'");
}

int exit_code(Stage s) noexcept {
  switch (s) {
    case Stage::generate: return 10;
    case Stage::run: return 20;
    case Stage::gate: return 30;
    case Stage::score: return 40;
    case Stage::report: return 50;
  }
  return 1;
}

// ---------------------------------------------------------------------------
// Config

namespace {

constexpr std::string_view kFixedTimestamp = "1970-01-01T00:00:00Z";

void check_keys(const json& j, std::string_view where, std::initializer_list<std::string_view> allowed) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be an object");
  for (const auto& [k, v] : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
      throw ConfigError("unknown key '" + k + "' in " + std::string(where));
  }
}

fs::path resolve(const fs::path& base, const std::string& p) {
  fs::path path(p);
  return path.is_absolute() ? path : base / path;
}

RetryPolicy parse_retry(const json& j, RetryPolicy r) {
  if (j.contains("max_retries")) r.max_retries = j.at("max_retries").get<int>();
  if (j.contains("initial_backoff_ms")) r.initial_backoff = std::chrono::milliseconds(j.at("initial_backoff_ms").get<long>());
  if (j.contains("backoff_multiplier")) r.multiplier = j.at("backoff_multiplier").get<double>();
  if (r.max_retries < 0 || r.initial_backoff.count() < 0 || r.multiplier < 1.0)
    throw ConfigError("retry policy needs max_retries >= 0, initial_backoff_ms >= 0, backoff_multiplier >= 1");
  return r;
}

BackendConfig parse_backend(const json& j) {
  BackendConfig b;
  b.type = j.value("type", std::string("scripted"));
  if (b.type == "scripted") {
    check_keys(j, "backend", {"type", "model_id", "params"});
    b.model_id = j.value("model_id", std::string("scripted"));
    if (j.contains("params")) {
      check_keys(j.at("params"), "backend.params",
                 {"atom_correct_prob", "paraphrase_flip_prob", "comp_success_prob", "unstable_comp_success_prob",
                  "abstain_prob", "format_violation_prob", "seed"});
      b.scripted = j.at("params").get<ScriptedModelParams>();
    }
    try {
      b.scripted.validate();
    } catch (const ValidationError& e) {
      throw ConfigError(std::string("backend.params: ") + e.what());
    }
  } else if (b.type == "http") {
    check_keys(j, "backend", {"type", "model_id", "endpoint", "timeout_ms", "max_retries", "initial_backoff_ms",
                              "backoff_multiplier", "extra_request_fields"});
    if (!j.contains("endpoint") || !j.contains("model_id")) throw ConfigError("http backend needs endpoint and model_id");
    b.model_id = j.at("model_id").get<std::string>();
    b.http.model_id = b.model_id;
    b.http.endpoint = j.at("endpoint").get<std::string>();
    if (j.contains("timeout_ms")) b.http.timeout = std::chrono::milliseconds(j.at("timeout_ms").get<long>());
    b.http.retry = parse_retry(j, b.http.retry);
    if (j.contains("extra_request_fields")) b.http.extra_request_fields = j.at("extra_request_fields");
    for (const char* reserved : {"model", "messages", "temperature", "max_tokens", "stop"})
      if (b.http.extra_request_fields.contains(reserved))
        throw ConfigError(std::string("extra_request_fields may not override '") + reserved + "'");
  } else {
    throw ConfigError("backend.type must be 'scripted' or 'http'");
  }
  return b;
}

}  // namespace

PipelineConfig parse_pipeline_config(const json& j, const fs::path& base_dir) {
  try {
    check_keys(j, "config",
               {"out_dir", "seed", "pool", "counts", "short_forms", "stages", "backend", "variant", "parallelism",
                "bootstrap_b", "run_id", "fixed_timestamp", "adjudicator"});
    PipelineConfig c;
    c.out_dir = resolve(base_dir, j.value("out_dir", std::string("out")));
    c.seed = j.value("seed", std::uint64_t{1});
    c.pool = resolve(base_dir, j.value("pool", std::string("data/d4v2_atoms.json")));
    c.counts = j.value("counts", std::string("builtin:d4v2"));
    if (c.counts.rfind("builtin:", 0) != 0) c.counts = resolve(base_dir, c.counts).string();
    if (j.contains("short_forms")) c.short_forms = resolve(base_dir, j.at("short_forms").get<std::string>());
    if (j.contains("stages")) {
      c.stages.clear();
      for (const auto& s : j.at("stages")) c.stages.push_back(stage_from_string(s.get<std::string>()));
    }
    if (j.contains("backend")) c.backend = parse_backend(j.at("backend"));
    if (c.backend.type == "scripted" && !(j.contains("backend") && j["backend"].contains("params") &&
                                          j["backend"]["params"].contains("seed")))
      c.backend.scripted.seed = c.seed;
    c.variant = std::string(to_string(prompt_variant_from_string(j.value("variant", std::string("v1_xml_reasoning")))));
    c.parallelism = j.value("parallelism", 1);
    if (c.parallelism < 1) throw ConfigError("parallelism must be >= 1");
    c.bootstrap_b = j.value("bootstrap_b", kDefaultBootstrapB);
    if (c.bootstrap_b < 1) throw ConfigError("bootstrap_b must be >= 1");
    c.run_id = j.value("run_id", std::string("run"));
    if (c.run_id.empty() || c.run_id.find_first_of("/\\") != std::string::npos)
      throw ConfigError("run_id must be non-empty and contain no path separators");
    if (j.contains("fixed_timestamp")) c.fixed_timestamp = j.at("fixed_timestamp").get<std::string>();
    if (j.contains("adjudicator")) {
      const auto& a = j.at("adjudicator");
      check_keys(a, "adjudicator", {"endpoint", "timeout_ms", "max_retries", "initial_backoff_ms", "backoff_multiplier"});
      AdjudicatorClient client;
      client.endpoint = a.at("endpoint").get<std::string>();
      if (const char* key = std::getenv("GATEBENCH_ADJUDICATOR_KEY")) client.api_key = key;
      if (a.contains("timeout_ms")) client.timeout = std::chrono::milliseconds(a.at("timeout_ms").get<long>());
      client.retry = parse_retry(a, client.retry);
      c.adjudicator = client;
    }
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  } catch (const ParseError& e) {
    throw ConfigError(e.what());
  }
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  json j;
  try {
    j = read_json_file(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return parse_pipeline_config(j, path.parent_path().empty() ? fs::path(".") : path.parent_path());
}

json backend_fingerprint(const BackendConfig& b) {
  if (b.type == "scripted") return json{{"type", b.type}, {"model_id", b.model_id}, {"params", b.scripted}};
  return json{{"type", b.type},
              {"model_id", b.model_id},
              {"endpoint", b.http.endpoint},
              {"timeout_ms", b.http.timeout.count()},
              {"max_retries", b.http.retry.max_retries},
              {"extra_request_fields", b.http.extra_request_fields}};
}

std::unique_ptr<Backend> make_backend(const BackendConfig& b) {
  if (b.type == "scripted") return std::make_unique<ScriptedBackend>(b.scripted, b.model_id);
  if (b.type == "http") {
    auto cfg = b.http;
    cfg.model_id = b.model_id;
    return std::make_unique<HttpBackend>(cfg);
  }
  throw ConfigError("unknown backend type '" + b.type + "'");
}

OutputPaths OutputPaths::under(const fs::path& out_dir) {
  return {out_dir / "manifest.json", out_dir / "records.jsonl", out_dir / "run_manifest.json",
          out_dir / "verdicts.jsonl", out_dir / "scores.json",  out_dir / "report"};
}

// ---------------------------------------------------------------------------
// Stages

void generate_stage(const PipelineConfig& cfg, const fs::path& manifest_out) {
  const auto pool = load_atom_pool(cfg.pool);
  const auto spec = load_count_spec(cfg.counts);
  const auto manifest = generate_benchmark(pool, spec, cfg.seed);
  write_file(manifest_out, manifest_to_string(manifest));
}

void run_stage(const PipelineConfig& cfg, const fs::path& manifest_path, const fs::path& records_out,
               const fs::path& run_manifest_out) {
  const auto pool = load_atom_pool(cfg.pool);
  const auto manifest_text = read_file(manifest_path);
  const auto manifest = load_manifest(manifest_path);
  if (manifest.pool_hash != pool_hash(pool))
    throw ValidationError("manifest was generated from a different atom pool");
  const auto backend = make_backend(cfg.backend);

  std::optional<ShortFormRegistry> registry;
  if (cfg.short_forms) registry = ShortFormRegistry::load(*cfg.short_forms);

  RunOptions opts;
  opts.variant = PromptVariant::make(prompt_variant_from_string(cfg.variant));
  opts.matcher.short_forms = registry ? &*registry : nullptr;
  opts.matcher.adjudicator = cfg.adjudicator;
  opts.parallelism = cfg.parallelism;
  opts.run_id = cfg.run_id;
  opts.seed = cfg.seed;
  std::optional<std::string> fixed = cfg.fixed_timestamp;
  if (!fixed && cfg.backend.type == "scripted") fixed = std::string(kFixedTimestamp);
  if (fixed) opts.clock = [ts = *fixed] { return ts; };
  const auto clock = opts.clock ? opts.clock : std::function<std::string()>(utc_now_iso8601);

  const auto started = clock();
  const auto records = run_benchmark(manifest, pool, *backend, opts);
  const auto finished = clock();

  json counts{{"cases", manifest.cases.size()}, {"records", records.size()}};
  int atom = 0, sub = 0, main = 0, failed = 0;
  for (const auto& r : records) {
    (r.kind == ProbeKind::atom_probe ? atom : r.kind == ProbeKind::sub_question ? sub : main)++;
    if (r.transport_failed()) ++failed;
  }
  counts["atom_probe"] = atom;
  counts["sub_question"] = sub;
  counts["main"] = main;
  counts["transport_failures"] = failed;

  write_file(records_out, records_to_jsonl(records));
  const json run_manifest{{"run_id", cfg.run_id},
                          {"model_id", backend->model_id()},
                          {"variant", to_string(opts.variant.id)},
                          {"seed", cfg.seed},
                          {"manifest_hash", sha256_hex(manifest_text)},
                          {"started_at", started},
                          {"finished_at", finished},
                          {"counts", counts}};
  write_file(run_manifest_out, run_manifest.dump(2) + "\n");
}

void gate_stage(const fs::path& records_path, const std::optional<fs::path>& manifest_path,
                const fs::path& verdicts_out) {
  const auto records = read_records(records_path);
  std::vector<GateVerdict> verdicts;
  if (manifest_path) {
    const auto manifest = load_manifest(*manifest_path);
    verdicts = gate_records(records, &manifest);
  } else {
    verdicts = gate_records(records, nullptr);
  }
  write_file(verdicts_out, verdicts_to_jsonl(verdicts));
}

void score_stage(const fs::path& records_path, const fs::path& verdicts_path,
                 const std::optional<fs::path>& run_manifest_path, int bootstrap_b, std::uint64_t seed,
                 const fs::path& scores_out) {
  const auto records_text = read_file(records_path);
  const auto records = records_from_jsonl(records_text);
  const auto verdicts = read_verdicts(verdicts_path);
  ScoreInputs in;
  in.records_hash = sha256_hex(records_text);
  in.bootstrap_b = bootstrap_b;
  in.seed = seed;
  auto rm = run_manifest_path;
  if (!rm) {
    const auto sibling = records_path.parent_path() / "run_manifest.json";
    if (fs::exists(sibling)) rm = sibling;
  }
  if (rm) in.manifest_hash = read_json_file(*rm).at("manifest_hash").get<std::string>();
  const auto scores = compute_scores(records, verdicts, in);
  write_file(scores_out, to_json_value(scores).dump(2) + "\n");
}

void decompose_stage(const fs::path& a, const fs::path& b, const fs::path& out) {
  const auto report = decompose(scores_from_json(read_json_file(a)), scores_from_json(read_json_file(b)));
  write_file(out, to_json_value(report).dump(2) + "\n");
}

void report_stage(const std::vector<fs::path>& scores_paths, const fs::path& out_dir) {
  std::vector<Scores> runs;
  for (const auto& p : scores_paths) runs.push_back(scores_from_json(read_json_file(p)));
  write_report(build_report(runs), out_dir);
}

// ---------------------------------------------------------------------------
// Orchestration

namespace {

std::string file_hash(const fs::path& p) { return fs::exists(p) ? sha256_hex(read_file(p)) : std::string(); }

std::vector<fs::path> report_outputs(const fs::path& dir) {
  std::vector<fs::path> out;
  if (!fs::exists(dir)) return {dir / "report.json"};
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

struct Stamp {
  fs::path path;
  std::string fingerprint;

  bool fresh(const std::vector<fs::path>& outputs) const {
    if (!fs::exists(path)) return false;
    json j;
    try {
      j = read_json_file(path);
    } catch (const Error&) {
      return false;
    }
    if (j.value("fingerprint", std::string()) != fingerprint) return false;
    const auto& recorded = j.value("outputs", json::object());
    if (recorded.size() != outputs.size()) return false;
    for (const auto& o : outputs) {
      const auto key = o.filename().string();
      if (!recorded.contains(key) || !fs::exists(o) || recorded[key].get<std::string>() != file_hash(o)) return false;
    }
    return true;
  }

  void write(const std::vector<fs::path>& outputs) const {
    json hashes = json::object();
    for (const auto& o : outputs) hashes[o.filename().string()] = file_hash(o);
    write_file(path, json{{"fingerprint", fingerprint}, {"outputs", hashes}}.dump(2) + "\n");
  }
};

}  // namespace

std::vector<StageOutcome> run_pipeline(const PipelineConfig& cfg, std::ostream* log) {
  const auto paths = OutputPaths::under(cfg.out_dir);
  const auto stamps = cfg.out_dir / ".stamps";
  std::vector<StageOutcome> outcomes;
  std::set<Stage> requested(cfg.stages.begin(), cfg.stages.end());

  for (auto stage : {Stage::generate, Stage::run, Stage::gate, Stage::score, Stage::report}) {
    if (!requested.contains(stage)) continue;
    try {
      fs::create_directories(stamps);
      json fp;
      std::vector<fs::path> outputs;
      switch (stage) {
        case Stage::generate:
          fp = {{"pool", file_hash(cfg.pool)},
                {"counts", count_spec_to_json(load_count_spec(cfg.counts))},
                {"seed", cfg.seed}};
          outputs = {paths.manifest};
          break;
        case Stage::run:
          fp = {{"manifest", file_hash(paths.manifest)},
                {"pool", file_hash(cfg.pool)},
                {"backend", backend_fingerprint(cfg.backend)},
                {"variant", cfg.variant},
                {"seed", cfg.seed},
                {"run_id", cfg.run_id},
                {"short_forms", cfg.short_forms ? file_hash(*cfg.short_forms) : std::string()},
                {"fixed_timestamp", cfg.fixed_timestamp ? json(*cfg.fixed_timestamp) : json(nullptr)},
                {"adjudicator", cfg.adjudicator ? json(cfg.adjudicator->endpoint) : json(nullptr)}};
          outputs = {paths.records, paths.run_manifest};
          break;
        case Stage::gate:
          fp = {{"records", file_hash(paths.records)}, {"manifest", file_hash(paths.manifest)}};
          outputs = {paths.verdicts};
          break;
        case Stage::score:
          fp = {{"records", file_hash(paths.records)},
                {"verdicts", file_hash(paths.verdicts)},
                {"run_manifest", file_hash(paths.run_manifest)},
                {"bootstrap_b", cfg.bootstrap_b},
                {"seed", cfg.seed}};
          outputs = {paths.scores};
          break;
        case Stage::report:
          fp = {{"scores", file_hash(paths.scores)}};
          outputs = report_outputs(paths.report_dir);
          break;
      }
      const Stamp stamp{stamps / (std::string(to_string(stage)) + ".json"), canonical_json_hash(fp)};
      if (!cfg.force && stamp.fresh(outputs)) {
        if (log) *log << to_string(stage) << ": up to date, skipped\n";
        outcomes.push_back({stage, true});
        continue;
      }
      switch (stage) {
        case Stage::generate: generate_stage(cfg, paths.manifest); break;
        case Stage::run: run_stage(cfg, paths.manifest, paths.records, paths.run_manifest); break;
        case Stage::gate: gate_stage(paths.records, paths.manifest, paths.verdicts); break;
        case Stage::score:
          score_stage(paths.records, paths.verdicts, paths.run_manifest, cfg.bootstrap_b, cfg.seed, paths.scores);
          break;
        case Stage::report:
          report_stage({paths.scores}, paths.report_dir);
          outputs = report_outputs(paths.report_dir);
          break;
      }
      stamp.write(outputs);
      if (log) *log << to_string(stage) << ": done\n";
      outcomes.push_back({stage, false});
    } catch (const StageError&) {
      throw;
    } catch (const std::exception& e) {
      throw StageError(stage, e.what());
    }
  }
  return outcomes;
}

}  // namespace gatebench
