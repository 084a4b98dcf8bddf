#include "gatebench/backend.hpp"

#include <cstdlib>

#include "gatebench/errors.hpp"
#include "gatebench/http.hpp"
#include "gatebench/rng.hpp"

namespace gatebench {

std::string_view to_string(ProbeKind k) noexcept {
  switch (k) {
    case ProbeKind::atom_probe: return "atom_probe";
    case ProbeKind::sub_question: return "sub_question";
    case ProbeKind::main: return "main";
  }
  return "main";
}

ProbeKind probe_kind_from_string(std::string_view s) {
  for (auto k : {ProbeKind::atom_probe, ProbeKind::sub_question, ProbeKind::main})
    if (to_string(k) == s) return k;
  throw ParseError("unknown probe kind '" + std::string(s) + "'");
}

// ---------------------------------------------------------------------------
// HTTP

json chat_completion_body(const QuerySpec& spec, const json& extra_fields) {
  json body = extra_fields.is_object() ? extra_fields : json::object();
  body["model"] = spec.model_id;
  body["messages"] = json::array({json{{"role", "user"}, {"content", spec.prompt}}});
  body["temperature"] = spec.temperature;
  body["max_tokens"] = spec.max_tokens;
  if (spec.stop)
    body["stop"] = json::array({*spec.stop});
  else
    body.erase("stop");
  return body;
}

BackendResponse query_http(const HttpBackendConfig& config, const QuerySpec& spec) {
  if (spec.temperature != 0.0) throw ValidationError("requests must use temperature 0");
  auto url = http::parse_url(config.endpoint);
  url.path = http::join_path(url.path == "/" ? "" : url.path, "/v1/chat/completions");

  std::string key = config.api_key;
  if (key.empty())
    if (const char* env = std::getenv("GATEBENCH_API_KEY")) key = env;
  std::map<std::string, std::string> headers;
  if (!key.empty()) headers["Authorization"] = "Bearer " + key;

  const auto res = http::post_json(url, chat_completion_body(spec, config.extra_request_fields).dump(), headers,
                                   config.timeout, config.retry);
  BackendResponse out;
  out.latency_ms = res.elapsed.count();
  out.transport_meta = {{"retries", res.retries}, {"http_status", res.status}};
  switch (res.outcome) {
    case http::Outcome::fatal_http:
      out.status = TransportStatus::http_error;
      out.error = res.error;
      return out;
    case http::Outcome::exhausted:
      out.status = TransportStatus::transport_failure;
      out.error = res.error;
      return out;
    case http::Outcome::ok:
      break;
  }
  try {
    const auto j = json::parse(res.body);
    const auto& choice = j.at("choices").at(0);
    const auto& content = choice.at("message").at("content");
    out.raw_text = content.is_null() ? std::string() : content.get<std::string>();
    if (choice.contains("finish_reason") && choice["finish_reason"].is_string())
      out.transport_meta["finish_reason"] = choice["finish_reason"];
  } catch (const std::exception& e) {
    out.status = TransportStatus::transport_failure;
    out.error = std::string("malformed completion response: ") + e.what();
  }
  return out;
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {}

void HttpBackend::validate() const {
  if (config_.model_id.empty()) throw ConfigError("http backend needs a model id");
  (void)http::parse_url(config_.endpoint);
  if (config_.retry.max_retries < 0) throw ConfigError("max_retries must be >= 0");
}

BackendResponse HttpBackend::query(const QuerySpec& spec, const ProbeInfo&) const { return query_http(config_, spec); }

// ---------------------------------------------------------------------------
// Scripted

void ScriptedModelParams::validate() const {
  auto check = [](double p, const std::string& what) {
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError(what + " must be in [0,1]");
  };
  check(atom_correct_prob, "atom_correct_prob");
  for (const auto& [id, p] : atom_correct_overrides) check(p, "atom_correct_prob[" + id + "]");
  check(paraphrase_flip_prob, "paraphrase_flip_prob");
  for (const auto& [bin, p] : comp_success_prob) check(p, "comp_success_prob[" + std::to_string(bin) + "]");
  if (unstable_comp_success_prob) check(*unstable_comp_success_prob, "unstable_comp_success_prob");
  check(abstain_prob, "abstain_prob");
  check(format_violation_prob, "format_violation_prob");
}

double ScriptedModelParams::atom_prob(const std::string& atom_id) const {
  auto it = atom_correct_overrides.find(atom_id);
  return it == atom_correct_overrides.end() ? atom_correct_prob : it->second;
}

void to_json(json& j, const ScriptedModelParams& p) {
  json atom = p.atom_correct_prob;
  if (!p.atom_correct_overrides.empty()) {
    atom = json::object();
    atom["default"] = p.atom_correct_prob;
    for (const auto& [id, v] : p.atom_correct_overrides) atom[id] = v;
  }
  json comp = json::object();
  for (const auto& [bin, v] : p.comp_success_prob) comp[std::to_string(bin)] = v;
  j = json{{"atom_correct_prob", atom},
           {"paraphrase_flip_prob", p.paraphrase_flip_prob},
           {"comp_success_prob", comp},
           {"abstain_prob", p.abstain_prob},
           {"format_violation_prob", p.format_violation_prob},
           {"seed", p.seed}};
  if (p.unstable_comp_success_prob) j["unstable_comp_success_prob"] = *p.unstable_comp_success_prob;
}

void from_json(const json& j, ScriptedModelParams& p) {
  p = ScriptedModelParams{};
  if (j.contains("atom_correct_prob")) {
    const auto& a = j.at("atom_correct_prob");
    if (a.is_number()) {
      p.atom_correct_prob = a.get<double>();
    } else {
      for (const auto& [k, v] : a.items()) {
        if (k == "default")
          p.atom_correct_prob = v.get<double>();
        else
          p.atom_correct_overrides[k] = v.get<double>();
      }
    }
  }
  if (j.contains("paraphrase_flip_prob")) p.paraphrase_flip_prob = j.at("paraphrase_flip_prob").get<double>();
  if (j.contains("comp_success_prob")) {
    const auto& c = j.at("comp_success_prob");
    if (c.is_number()) {
      for (int bin : {2, 4, 6, 8}) p.comp_success_prob[bin] = c.get<double>();
    } else {
      for (const auto& [k, v] : c.items()) p.comp_success_prob[std::stoi(k)] = v.get<double>();
    }
  }
  if (j.contains("unstable_comp_success_prob")) p.unstable_comp_success_prob = j.at("unstable_comp_success_prob").get<double>();
  if (j.contains("abstain_prob")) p.abstain_prob = j.at("abstain_prob").get<double>();
  if (j.contains("format_violation_prob")) p.format_violation_prob = j.at("format_violation_prob").get<double>();
  if (j.contains("seed")) p.seed = j.at("seed").get<std::uint64_t>();
}

namespace {

double draw(const ScriptedModelParams& p, std::string_view stream, std::string_view id, std::uint64_t index = 0) {
  return CounterRng(StreamKey(p.seed).add(stream).add(id).add(index)).uniform01();
}

bool flipped(const ScriptedModelParams& p, const std::string& atom_id, int probe_index) {
  return draw(p, "flip", atom_id, static_cast<std::uint64_t>(probe_index)) < p.paraphrase_flip_prob;
}

std::string perturbed_year(const std::string& gold, std::uint64_t r) {
  const auto n = normalize(gold);
  if (!n.value) return "unknown";
  auto year = n.value->year;
  const auto delta = static_cast<std::int64_t>(2 + r % 19);
  year += (r >> 8) % 2 ? delta : -delta;
  if (year == 0) year = 3;
  if (year < 0) return std::to_string(-year) + " BC";
  return std::to_string(year);
}

std::string wrong_answer(const ScriptedModelParams& p, const ProbeInfo& probe, std::string_view key) {
  const auto r = StreamKey(p.seed).add("wrong").add(key).add(static_cast<std::uint64_t>(probe.probe_index)).value();
  if (!probe.wrong_answers.empty()) return probe.wrong_answers[r % probe.wrong_answers.size()];
  return perturbed_year(probe.gold, r);
}

std::string render(const QuerySpec* spec, std::string_view answer) {
  if (spec && !spec->stop) return "Recalling the relevant facts.\n" + std::string(answer);
  return "<reasoning>Recalled the relevant facts and combined them.</reasoning>\n<answer>" + std::string(answer) +
         "</answer>";
}

BackendResponse scripted_response(const ScriptedModelParams& params, const ProbeInfo& probe, const QuerySpec* spec) {
  // Probe identity: atom probes and sub-questions are keyed by the atom (the
  // prompt is the same in every case), main probes by the case.
  std::string key;
  switch (probe.kind) {
    case ProbeKind::atom_probe: key = "atom/" + probe.atom_id + "/" + std::to_string(probe.probe_index); break;
    case ProbeKind::sub_question: key = "sub/" + probe.atom_id; break;
    case ProbeKind::main: key = "main/" + probe.case_id; break;
  }

  BackendResponse out;
  out.transport_meta = {{"backend", "scripted"}};
  if (draw(params, "format", key) < params.format_violation_prob) {
    out.raw_text = "Let me think about this question carefully before answering.";
    return out;
  }
  if (draw(params, "abstain", key) < params.abstain_prob) {
    out.raw_text = render(spec, kAbstentionToken);
    return out;
  }

  bool correct = false;
  switch (probe.kind) {
    case ProbeKind::atom_probe:
      correct = scripted_atom_known(params, probe.atom_id) && !flipped(params, probe.atom_id, probe.probe_index);
      break;
    case ProbeKind::sub_question:
      correct = scripted_atom_known(params, probe.atom_id);
      break;
    case ProbeKind::main: {
      auto it = params.comp_success_prob.find(probe.depth_bin);
      double p = it == params.comp_success_prob.end() ? 1.0 : it->second;
      if (params.unstable_comp_success_prob) {
        for (const auto& a : probe.case_atoms) {
          if (scripted_atom_unstable(params, a)) {
            p = *params.unstable_comp_success_prob;
            break;
          }
        }
      }
      correct = draw(params, "main", probe.case_id) < p;
      break;
    }
  }
  out.raw_text = render(spec, correct ? probe.gold : wrong_answer(params, probe, key));
  return out;
}

}  // namespace

bool scripted_atom_known(const ScriptedModelParams& params, const std::string& atom_id) {
  return draw(params, "known", atom_id) < params.atom_prob(atom_id);
}

bool scripted_atom_unstable(const ScriptedModelParams& params, const std::string& atom_id) {
  if (!scripted_atom_known(params, atom_id)) return false;
  for (int i = 0; i < 4; ++i)
    if (flipped(params, atom_id, i)) return true;
  return false;
}

BackendResponse query_scripted(const ScriptedModelParams& params, const ProbeInfo& probe) {
  return scripted_response(params, probe, nullptr);
}

ScriptedBackend::ScriptedBackend(ScriptedModelParams params, std::string model_id)
    : params_(std::move(params)), model_id_(std::move(model_id)) {}

BackendResponse ScriptedBackend::query(const QuerySpec& spec, const ProbeInfo& probe) const {
  return scripted_response(params_, probe, &spec);
}

}  // namespace gatebench
