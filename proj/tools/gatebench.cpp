// gatebench: generate benchmarks, probe a model, gate, score and report.

#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "gatebench/io.hpp"
#include "gatebench/pipeline.hpp"

namespace fs = std::filesystem;
using namespace gatebench;

namespace {

int fail(int code, const std::string& what) {
  std::cerr << "gatebench: " << what << "\n";
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Double-gate composition benchmark harness"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool force = false;
  std::optional<int> parallelism;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--seed", seed, "Seed for generation, the scripted backend and the bootstrap");
  app.add_option("--out-dir", out_dir, "Output directory");
  app.add_flag("--force", force, "Re-run pipeline stages even when their outputs are current");
  app.add_option("--parallelism", parallelism, "Concurrent probes during run")->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("generate", "Generate a benchmark manifest");
  std::string gen_pool, gen_counts, gen_out;
  gen->add_option("--pool", gen_pool, "Atom pool JSON");
  gen->add_option("--counts,--spec", gen_counts, "Count spec file or builtin:d4v2");
  gen->add_option("--out", gen_out, "Manifest output path");

  auto* run = app.add_subcommand("run", "Probe a backend on every case of a manifest");
  std::string run_manifest, run_pool, run_variant, run_out, run_meta;
  std::string run_backend, run_endpoint, run_model, run_params;
  run->add_option("--manifest", run_manifest, "Benchmark manifest");
  run->add_option("--pool", run_pool, "Atom pool JSON");
  run->add_option("--variant", run_variant, "Prompt variant (v1, v2, v3, cot, in_context)");
  run->add_option("--out", run_out, "Records JSONL output path");
  run->add_option("--run-manifest", run_meta, "Run manifest output path");
  run->add_option("--backend", run_backend, "scripted or http")->check(CLI::IsMember({"scripted", "http"}));
  run->add_option("--endpoint", run_endpoint, "Base URL of an OpenAI-compatible server");
  run->add_option("--model", run_model, "Model id sent with every request");
  run->add_option("--params", run_params, "Scripted model parameters JSON");

  auto* gate = app.add_subcommand("gate", "Apply the atomic and sub-question gates to records");
  std::string gate_records_path, gate_manifest, gate_out;
  gate->add_option("--records", gate_records_path, "Records JSONL")->required();
  gate->add_option("--manifest", gate_manifest, "Benchmark manifest (structure is inferred from records otherwise)");
  gate->add_option("--out", gate_out, "Verdicts JSONL output path");

  auto* score = app.add_subcommand("score", "Compute stability, residual failure by depth and d50");
  std::string score_records, score_verdicts, score_meta, score_out;
  int score_b = 0;
  score->add_option("--records", score_records, "Records JSONL")->required();
  score->add_option("--verdicts", score_verdicts, "Verdicts JSONL")->required();
  score->add_option("--run-manifest", score_meta, "Run manifest (default: next to the records)");
  score->add_option("--B", score_b, "Bootstrap replicates")->check(CLI::PositiveNumber);
  score->add_option("--out", score_out, "Scores JSON output path");

  auto* dec = app.add_subcommand("decompose", "Compare two scored runs");
  std::string dec_a, dec_b, dec_out;
  dec->add_option("--run-a", dec_a, "Reference scores JSON")->required()->check(CLI::ExistingFile);
  dec->add_option("--run-b", dec_b, "Comparator scores JSON")->required()->check(CLI::ExistingFile);
  dec->add_option("--out", dec_out, "Decomposition JSON output path");

  auto* rep = app.add_subcommand("report", "Render tables, curves and SVG from scores");
  std::vector<std::string> rep_scores;
  rep->add_option("--scores", rep_scores, "Scores JSON, one per run")->required();

  auto* pipe = app.add_subcommand("pipeline", "Run generate, run, gate, score and report from the config");

  CLI11_PARSE(app, argc, argv);

  PipelineConfig cfg;
  try {
    if (!config_path.empty()) cfg = load_pipeline_config(config_path);
    if (!run_backend.empty()) cfg.backend.type = run_backend;
    if (!run_model.empty()) cfg.backend.model_id = run_model;
    if (!run_endpoint.empty()) cfg.backend.http.endpoint = run_endpoint;
    if (!run_params.empty()) {
      const auto params = read_json_file(run_params);
      cfg.backend.scripted = params.get<ScriptedModelParams>();
      if (!params.contains("seed")) cfg.backend.scripted.seed = cfg.seed;
      cfg.backend.scripted.validate();
    }
    if (cfg.backend.type == "http" && (cfg.backend.http.endpoint.empty() || cfg.backend.model_id.empty()))
      throw ConfigError("the http backend needs --endpoint and --model");
  } catch (const Error& e) {
    return fail(kConfigExitCode, e.what());
  } catch (const json::exception& e) {
    return fail(kConfigExitCode, e.what());
  }
  if (seed) {
    cfg.seed = *seed;
    cfg.backend.scripted.seed = *seed;
  }
  if (!out_dir.empty()) cfg.out_dir = out_dir;
  if (parallelism) cfg.parallelism = *parallelism;
  cfg.force = force;
  const auto paths = OutputPaths::under(cfg.out_dir);
  auto out_or = [](const std::string& given, const fs::path& fallback) {
    return given.empty() ? fallback : fs::path(given);
  };
  auto ensure_parent = [](const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
  };

  Stage stage = Stage::generate;
  try {
    if (*gen) {
      stage = Stage::generate;
      if (!gen_pool.empty()) cfg.pool = gen_pool;
      if (!gen_counts.empty()) cfg.counts = gen_counts;
      const auto out = out_or(gen_out, paths.manifest);
      ensure_parent(out);
      generate_stage(cfg, out);
    } else if (*run) {
      stage = Stage::run;
      if (!run_pool.empty()) cfg.pool = run_pool;
      if (!run_variant.empty()) cfg.variant = run_variant;
      const auto out = out_or(run_out, paths.records);
      ensure_parent(out);
      const auto meta = out_or(run_meta, out.parent_path() / "run_manifest.json");
      run_stage(cfg, out_or(run_manifest, paths.manifest), out, meta);
    } else if (*gate) {
      stage = Stage::gate;
      const auto out = out_or(gate_out, paths.verdicts);
      ensure_parent(out);
      gate_stage(gate_records_path, gate_manifest.empty() ? std::nullopt : std::optional<fs::path>(gate_manifest), out);
    } else if (*score) {
      stage = Stage::score;
      const auto out = out_or(score_out, paths.scores);
      ensure_parent(out);
      score_stage(score_records, score_verdicts, score_meta.empty() ? std::nullopt : std::optional<fs::path>(score_meta),
                  score_b > 0 ? score_b : cfg.bootstrap_b, cfg.seed, out);
    } else if (*dec) {
      stage = Stage::score;
      const auto out = out_or(dec_out, cfg.out_dir / "decomposition.json");
      ensure_parent(out);
      decompose_stage(dec_a, dec_b, out);
    } else if (*rep) {
      stage = Stage::report;
      std::vector<fs::path> inputs(rep_scores.begin(), rep_scores.end());
      report_stage(inputs, paths.report_dir);
    } else if (*pipe) {
      for (const auto& o : run_pipeline(cfg, &std::cerr)) (void)o;
    }
  } catch (const StageError& e) {
    return fail(exit_code(e.stage), e.what());
  } catch (const std::exception& e) {
    return fail(exit_code(stage), std::string(to_string(stage)) + ": " + e.what());
  }
  return 0;
}
