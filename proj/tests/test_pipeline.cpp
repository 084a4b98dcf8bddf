#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <sstream>
#include <sys/wait.h>

#include "gatebench/generator.hpp"
#include "gatebench/io.hpp"
#include "gatebench/mock_server.hpp"
#include "gatebench/pipeline.hpp"
#include "gatebench/stats.hpp"

using namespace gatebench;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = GATEBENCH_SOURCE_DIR;

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("gatebench_pipeline_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

json small_config(const fs::path& dir) {
  write_file(dir / "counts.json", count_spec_to_json(CountSpec{{{Family::temporal_rank, 2}, 30},
                                                               {{Family::temporal_successor, 4}, 30},
                                                               {{Family::temporal_interval_decoy, 6}, 24},
                                                               {{Family::pair_far_control, 2}, 10},
                                                               {{Family::kinship, 8}, 20}})
                                       .dump(2));
  return json{{"out_dir", "out"},
              {"seed", 5},
              {"pool", (kSource / "data" / "d4v2_atoms.json").string()},
              {"counts", "counts.json"},
              {"bootstrap_b", 300},
              {"run_id", "small"},
              {"backend",
               {{"type", "scripted"},
                {"model_id", "scripted-small"},
                {"params",
                 {{"atom_correct_prob", 0.97},
                  {"paraphrase_flip_prob", 0.02},
                  {"comp_success_prob", {{"2", 0.9}, {"4", 0.4}, {"6", 0.3}, {"8", 0.2}}}}}}}};
}

PipelineConfig load(const fs::path& dir, const json& j) {
  write_file(dir / "config.json", j.dump(2));
  return load_pipeline_config(dir / "config.json");
}

std::vector<fs::path> outputs(const fs::path& out) {
  const auto p = OutputPaths::under(out);
  std::vector<fs::path> files{p.manifest, p.records, p.run_manifest, p.verdicts, p.scores};
  for (const auto& e : fs::directory_iterator(p.report_dir)) files.push_back(e.path());
  std::sort(files.begin(), files.end());
  return files;
}

int cli(const std::string& args) {
  const auto cmd = std::string(GATEBENCH_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

}  // namespace

TEST_CASE("config parsing") {
  const auto dir = scratch("config");
  const auto cfg = load(dir, small_config(dir));
  CHECK(cfg.out_dir == dir / "out");
  CHECK(cfg.counts == (dir / "counts.json").string());
  CHECK(cfg.backend.scripted.seed == 5);  // inherits the run seed
  CHECK(cfg.backend.scripted.comp_success_prob.at(4) == 0.4);

  auto bad = small_config(dir);
  bad["colour"] = "blue";
  CHECK_THROWS_AS(load(dir, bad), ConfigError);
  bad = small_config(dir);
  bad["backend"]["params"]["atom_correct_prob"] = 2.0;
  CHECK_THROWS_AS(load(dir, bad), ConfigError);
  bad = small_config(dir);
  bad["backend"] = {{"type", "http"}, {"model_id", "m"}, {"endpoint", "http://x"},
                    {"extra_request_fields", {{"temperature", 0.7}}}};
  CHECK_THROWS_AS(load(dir, bad), ConfigError);
  bad = small_config(dir);
  bad["run_id"] = "a/b";
  CHECK_THROWS_AS(load(dir, bad), ConfigError);
  CHECK_THROWS_AS(load_pipeline_config(dir / "missing.json"), ConfigError);

  const auto fp = backend_fingerprint(cfg.backend);
  CHECK(fp.at("type") == "scripted");
  auto http = small_config(dir);
  http["backend"] = {{"type", "http"}, {"model_id", "m"}, {"endpoint", "http://127.0.0.1:9"}};
  const auto hc = load(dir, http);
  CHECK_FALSE(backend_fingerprint(hc.backend).dump().find("api_key") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("pipeline output is byte-identical across runs") {
  const auto a = scratch("det_a");
  const auto b = scratch("det_b");
  auto ca = load(a, small_config(a));
  auto cb = load(b, small_config(b));
  cb.parallelism = 3;
  run_pipeline(ca);
  run_pipeline(cb);
  const auto fa = outputs(ca.out_dir);
  const auto fb = outputs(cb.out_dir);
  REQUIRE(fa.size() == fb.size());
  CHECK(fa.size() == 11);
  for (std::size_t i = 0; i < fa.size(); ++i) {
    CAPTURE(fa[i].filename().string());
    CHECK(fa[i].filename() == fb[i].filename());
    CHECK(read_file(fa[i]) == read_file(fb[i]));
  }
  const auto records = read_file(OutputPaths::under(ca.out_dir).records);
  CHECK(records.find("1970-01-01T00:00:00Z") != std::string::npos);
  const auto meta = read_json_file(OutputPaths::under(ca.out_dir).run_manifest);
  CHECK(meta.at("manifest_hash") == sha256_hex(read_file(OutputPaths::under(ca.out_dir).manifest)));
  const auto scores = read_json_file(OutputPaths::under(ca.out_dir).scores);
  CHECK(scores.at("manifest_hash") == meta.at("manifest_hash"));
  CHECK(scores.at("model_id") == "scripted-small");
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("stamps skip fresh stages") {
  const auto dir = scratch("stamps");
  auto cfg = load(dir, small_config(dir));
  auto first = run_pipeline(cfg);
  for (const auto& o : first) CHECK_FALSE(o.skipped);

  std::ostringstream log;
  auto second = run_pipeline(cfg, &log);
  REQUIRE(second.size() == 5);
  for (const auto& o : second) CHECK(o.skipped);
  CHECK(log.str().find("up to date") != std::string::npos);

  // a changed stage input reruns that stage and everything after it
  cfg.bootstrap_b = 301;
  auto third = run_pipeline(cfg);
  CHECK(third[0].skipped);
  CHECK(third[2].skipped);
  CHECK_FALSE(third[3].skipped);
  CHECK_FALSE(third[4].skipped);

  // a tampered output is not trusted
  write_file(OutputPaths::under(cfg.out_dir).verdicts, "");
  auto fourth = run_pipeline(cfg);
  CHECK(fourth[1].skipped);
  CHECK_FALSE(fourth[2].skipped);

  cfg.force = true;
  for (const auto& o : run_pipeline(cfg)) CHECK_FALSE(o.skipped);
  fs::remove_all(dir);
}

TEST_CASE("stage errors name their stage") {
  const auto dir = scratch("errors");
  auto j = small_config(dir);
  j["pool"] = "no/such/pool.json";
  const auto cfg = load(dir, j);
  try {
    run_pipeline(cfg);
    FAIL("expected a stage error");
  } catch (const StageError& e) {
    CHECK(e.stage == Stage::generate);
    CHECK(exit_code(e.stage) == 10);
  }
  CHECK(exit_code(Stage::run) == 20);
  CHECK(exit_code(Stage::gate) == 30);
  CHECK(exit_code(Stage::score) == 40);
  CHECK(exit_code(Stage::report) == 50);

  // a manifest generated from a different pool is refused by the run stage
  auto ok = load(dir, small_config(dir));
  generate_stage(ok, dir / "m.json");
  auto edited = read_json_file(dir / "m.json");
  edited["pool_hash"] = "0000";
  write_file(dir / "m.json", edited.dump());
  CHECK_THROWS(run_stage(ok, dir / "m.json", dir / "r.jsonl", dir / "rm.json"));
  fs::remove_all(dir);
}

TEST_CASE("command line") {
  const auto dir = scratch("cli");
  small_config(dir);
  const auto pool = (kSource / "data" / "d4v2_atoms.json").string();
  const auto out = (dir / "o").string();
  CHECK(cli("generate --pool " + pool + " --spec " + (dir / "counts.json").string() + " --seed 3 --out " + out +
            "/manifest.json") == 0);
  CHECK(fs::exists(dir / "o" / "manifest.json"));
  CHECK(cli("--out-dir " + out + " --seed 3 run --pool " + pool + " --backend scripted") == 0);
  CHECK(cli("--out-dir " + out + " gate --records " + out + "/records.jsonl --manifest " + out + "/manifest.json") == 0);
  CHECK(cli("--out-dir " + out + " score --records " + out + "/records.jsonl --verdicts " + out +
            "/verdicts.jsonl --B 200") == 0);
  CHECK(cli("--out-dir " + out + " report --scores " + out + "/scores.json") == 0);
  CHECK(fs::exists(dir / "o" / "report" / "main_table.csv"));
  CHECK(cli("--out-dir " + out + " decompose --run-a " + out + "/scores.json --run-b " + out + "/scores.json") == 0);
  const auto dec = read_json_file(dir / "o" / "decomposition.json");
  CHECK(dec.at("matched") == true);

  CHECK(cli("generate --pool " + (dir / "missing.json").string() + " --out " + out + "/m2.json") == 10);
  CHECK(cli("--config " + (dir / "missing.json").string() + " pipeline") == 2);
  CHECK(cli("--out-dir " + out + " gate --records " + (dir / "missing.jsonl").string()) == 30);
  CHECK(cli("--out-dir " + out + " run --backend http") == 2);

  write_file(dir / "config.json", small_config(dir).dump());
  CHECK(cli("--config " + (dir / "config.json").string() + " pipeline") == 0);
  auto broken = small_config(dir);
  broken["pool"] = "missing.json";
  write_file(dir / "config.json", broken.dump());
  CHECK(cli("--config " + (dir / "config.json").string() + " --force pipeline") == 10);
  fs::remove_all(dir);
}

TEST_CASE("pipeline against the mock server") {
  // The mock answers every question it has a table entry for; the rest
  // abstain, which fails the gates for those cases.
  const auto dir = scratch("mock");
  auto base = load(dir, small_config(dir));
  generate_stage(base, dir / "manifest.json");
  const auto manifest = load_manifest(dir / "manifest.json");
  const auto pool = load_atom_pool(base.pool);
  std::map<std::string, std::string> answers;
  for (const auto& a : pool)
    for (const auto& p : a.paraphrases) answers[p] = a.gold_answer;
  for (const auto& c : manifest.cases) {
    for (const auto& s : c.sub_questions) answers[s.text] = s.gold_answer;
    answers[c.main_question] = c.gold_answer;
  }
  MockChatServer server(table_responder(answers));
  server.start();

  auto j = small_config(dir);
  j["backend"] = {{"type", "http"}, {"model_id", "mock"}, {"endpoint", server.base_url()}, {"initial_backoff_ms", 1}};
  j["parallelism"] = 4;
  j["fixed_timestamp"] = "1970-01-01T00:00:00Z";
  auto cfg = load(dir, j);
  run_pipeline(cfg);
  server.stop();

  const auto scores = scores_from_json(read_json_file(OutputPaths::under(cfg.out_dir).scores));
  REQUIRE(scores.stability);
  CHECK(scores.stability->per_probe_rate == 1.0);
  for (const auto& [bin, s] : scores.depth_stats) CHECK(s.n_fail == 0);
  for (const auto& req : server.requests()) {
    CHECK(req.at("temperature") == 0.0);
    CHECK(req.at("max_tokens") == 512);
    CHECK(req.at("stop") == json::array({"</answer>"}));
  }
  fs::remove_all(dir);
}
