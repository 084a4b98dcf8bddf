#include "gatebench/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "gatebench/errors.hpp"
#include "gatebench/rng.hpp"

namespace gatebench {

namespace {

// Lentz continued fraction for the incomplete beta.
double beta_cf(double x, double a, double b) {
  constexpr int kMaxIter = 500;
  constexpr double kEps = 1e-15;
  constexpr double kTiny = 1e-300;
  const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < kEps) break;
  }
  return h;
}

double pct(double v) { return 100.0 * v; }

std::string fixed1(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", v);
  return buf;
}

// Type-7 sample quantile of sorted data.
double quantile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double h = (static_cast<double>(sorted.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

}  // namespace

double incomplete_beta(double x, double a, double b) {
  if (!(a > 0.0 && b > 0.0)) throw ValidationError("incomplete_beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(x, a, b) / a;
  return 1.0 - front * beta_cf(1.0 - x, b, a) / b;
}

double beta_quantile(double p, double a, double b) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200 && hi - lo > 1e-15; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (incomplete_beta(mid, a, b) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

Interval clopper_pearson(int x, int n, double alpha) {
  if (n < 0 || x < 0 || x > n) throw ValidationError("clopper_pearson needs 0 <= x <= n");
  if (n == 0) return {0.0, 1.0};
  Interval out;
  out.low = x == 0 ? 0.0 : beta_quantile(alpha / 2.0, x, n - x + 1);
  out.high = x == n ? 1.0 : beta_quantile(1.0 - alpha / 2.0, x + 1, n - x);
  return out;
}

DepthStats depth_stats_from_counts(int bin, int n_fail, int n, int bootstrap_b, std::uint64_t seed) {
  if (bootstrap_b < 1) throw ValidationError("bootstrap B must be >= 1");
  if (n < 0 || n_fail < 0 || n_fail > n) throw ValidationError("need 0 <= fails <= n");
  DepthStats s;
  s.depth_bin = bin;
  s.n_gate_pass = n;
  s.n_fail = n_fail;
  s.suppressed = n < kSuppressBelow;
  s.caution = n < kCautionBelow;
  if (n == 0) return s;
  s.rate = static_cast<double>(n_fail) / n;
  const auto cp = clopper_pearson(n_fail, n);
  s.cp_low = cp.low;
  s.cp_high = cp.high;

  // Outcomes are ordered failures first, so a resampled index below n_fail
  // is a failure. Each replicate has its own substream.
  std::vector<double> reps(static_cast<std::size_t>(bootstrap_b));
  const auto un = static_cast<std::uint64_t>(n);
  const auto uf = static_cast<std::uint64_t>(n_fail);
  for (int b = 0; b < bootstrap_b; ++b) {
    CounterRng rng(StreamKey(seed).add("bootstrap").add(static_cast<std::uint64_t>(bin)).add(static_cast<std::uint64_t>(b)));
    std::uint64_t fails = 0;
    for (int i = 0; i < n; ++i)
      if (rng.below(un) < uf) ++fails;
    reps[static_cast<std::size_t>(b)] = static_cast<double>(fails) / n;
  }
  std::sort(reps.begin(), reps.end());
  s.ci_low = std::min(quantile_sorted(reps, 0.025), s.rate);
  s.ci_high = std::max(quantile_sorted(reps, 0.975), s.rate);
  return s;
}

std::map<int, DepthStats> residual_failure_by_depth(std::span<const GateVerdict> verdicts, int bootstrap_b,
                                                    std::uint64_t seed, GatePopulation population) {
  std::map<int, std::pair<int, int>> counts;  // bin -> (fails, n)
  for (int bin : {2, 4, 6, 8}) counts[bin] = {0, 0};
  for (const auto& v : verdicts) {
    if (!v.determinate) continue;
    const bool in_population = population == GatePopulation::double_gate ? v.double_gate_pass : v.single_gate_pass;
    if (!in_population) continue;
    auto& [fails, n] = counts[v.depth_bin];
    ++n;
    if (!v.main_correct) ++fails;
  }
  std::map<int, DepthStats> out;
  for (const auto& [bin, c] : counts) out[bin] = depth_stats_from_counts(bin, c.first, c.second, bootstrap_b, seed);
  return out;
}

double joint_stability(double per_probe_rate, int k) {
  if (k < 0) throw ValidationError("k must be >= 0");
  return std::pow(per_probe_rate, k);
}

StabilityStats stability_from_rates(double per_probe_rate, double per_fact_rate) {
  StabilityStats s;
  s.per_probe_rate = per_probe_rate;
  s.per_fact_rate = per_fact_rate;
  for (int k = 1; k <= 4; ++k) s.joint_at_k[k] = joint_stability(per_probe_rate, k);
  return s;
}

StabilityStats atomic_stability(std::span<const CaseRecord> records) {
  std::map<std::string, std::map<int, bool>> probes;  // atom -> index -> matched
  for (const auto& r : records) {
    if (r.kind != ProbeKind::atom_probe || !r.atom_id || !r.probe_index || r.transport_failed()) continue;
    probes[*r.atom_id].try_emplace(*r.probe_index, r.match_consistency && !r.abstained);
  }
  int n_probes = 0, matched = 0, n_facts = 0, stable = 0;
  for (const auto& [atom, by_index] : probes) {
    bool all = true;
    for (const auto& [idx, ok] : by_index) {
      ++n_probes;
      if (ok) ++matched;
      all = all && ok;
    }
    if (by_index.size() == 4) {
      ++n_facts;
      if (all) ++stable;
    }
  }
  if (n_probes == 0) throw ValidationError("no atom probes to compute stability from");
  auto s = stability_from_rates(static_cast<double>(matched) / n_probes,
                                n_facts ? static_cast<double>(stable) / n_facts : 0.0);
  s.n_probes = n_probes;
  s.n_facts = n_facts;
  return s;
}

std::string_view to_string(Censoring c) noexcept {
  switch (c) {
    case Censoring::none: return "none";
    case Censoring::below_min: return "below_min";
    case Censoring::above_max: return "above_max";
  }
  return "none";
}

Censoring censoring_from_string(std::string_view s) {
  for (auto c : {Censoring::none, Censoring::below_min, Censoring::above_max})
    if (to_string(c) == s) return c;
  throw ParseError("unknown censoring '" + std::string(s) + "'");
}

namespace {

double crossing(double di, double dj, double ri, double rj) {
  if (ri >= 0.5) return di;
  if (rj < 0.5) return dj;
  return di + (dj - di) * (0.5 - ri) / (rj - ri);
}

}  // namespace

D50Estimate critical_depth(const std::map<int, DepthStats>& depth_stats) {
  std::vector<const DepthStats*> bins;
  for (const auto& [bin, s] : depth_stats)
    if (!s.suppressed) bins.push_back(&s);
  if (bins.empty()) throw ValidationError("every depth bin is suppressed; d50 undefined");

  D50Estimate out;
  out.min_bin = bins.front()->depth_bin;
  out.max_bin = bins.back()->depth_bin;
  for (const auto* s : bins) {
    if (s->rate > 0.5) {
      out.first_bin_exceeding = s->depth_bin;
      break;
    }
  }
  if (bins.front()->rate >= 0.5) {
    out.censored = Censoring::below_min;
    return out;
  }
  for (std::size_t k = 0; k + 1 < bins.size(); ++k) {
    const auto& a = *bins[k];
    const auto& b = *bins[k + 1];
    if (!(a.rate < 0.5 && b.rate >= 0.5)) continue;
    const double di = a.depth_bin, dj = b.depth_bin;
    out.point = crossing(di, dj, a.rate, b.rate);
    const double optimistic = crossing(di, dj, a.cp_high, b.cp_low);
    const double pessimistic = crossing(di, dj, a.cp_low, b.cp_high);
    out.band = std::pair{std::min(optimistic, pessimistic), std::max(optimistic, pessimistic)};
    return out;
  }
  out.censored = Censoring::above_max;
  return out;
}

std::string render_d50(const D50Estimate& d) {
  switch (d.censored) {
    case Censoring::below_min: return "<" + std::to_string(d.min_bin);
    case Censoring::above_max: return ">" + std::to_string(d.max_bin);
    case Censoring::none: break;
  }
  return d.point ? fixed1(*d.point) : "--";
}

std::string render_band(const D50Estimate& d) {
  if (!d.band) return "--";
  return "[" + fixed1(d.band->first) + "," + fixed1(d.band->second) + "]";
}

// ---------------------------------------------------------------------------

Scores compute_scores(std::span<const CaseRecord> records, std::span<const GateVerdict> verdicts,
                      const ScoreInputs& inputs) {
  Scores s;
  if (!records.empty()) {
    s.model_id = records.front().model_id;
    s.run_id = records.front().run_id;
  }
  s.manifest_hash = inputs.manifest_hash;
  s.records_hash = inputs.records_hash;
  s.bootstrap_b = inputs.bootstrap_b;
  s.seed = inputs.seed;
  const bool has_atom_probes =
      std::any_of(records.begin(), records.end(), [](const CaseRecord& r) { return r.kind == ProbeKind::atom_probe; });
  if (has_atom_probes) s.stability = atomic_stability(records);
  s.depth_stats = residual_failure_by_depth(verdicts, inputs.bootstrap_b, inputs.seed);
  try {
    s.d50 = critical_depth(s.depth_stats);
  } catch (const ValidationError&) {
    s.d50 = D50Estimate{};
  }
  const bool any_single = std::any_of(verdicts.begin(), verdicts.end(),
                                      [](const GateVerdict& v) { return v.determinate && v.single_gate_pass; });
  if (any_single) s.conflation = gate_population_stats(verdicts);
  return s;
}

namespace {

json stability_json(const StabilityStats& st) {
  json joint = json::object();
  for (const auto& [k, v] : st.joint_at_k) joint[std::to_string(k)] = v;
  return json{{"per_probe_rate", st.per_probe_rate},
              {"per_fact_rate", st.per_fact_rate},
              {"n_probes", st.n_probes},
              {"n_facts", st.n_facts},
              {"joint_at_k", joint}};
}

StabilityStats stability_from_json(const json& j) {
  StabilityStats st;
  st.per_probe_rate = j.at("per_probe_rate").get<double>();
  st.per_fact_rate = j.at("per_fact_rate").get<double>();
  st.n_probes = j.value("n_probes", 0);
  st.n_facts = j.value("n_facts", 0);
  for (const auto& [k, v] : j.at("joint_at_k").items()) st.joint_at_k[std::stoi(k)] = v.get<double>();
  return st;
}

json depth_json(const DepthStats& d) {
  return json{{"depth_bin", d.depth_bin}, {"n_gate_pass", d.n_gate_pass}, {"n_fail", d.n_fail},
              {"rate", d.rate},           {"ci_low", d.ci_low},           {"ci_high", d.ci_high},
              {"cp_low", d.cp_low},       {"cp_high", d.cp_high},         {"suppressed", d.suppressed},
              {"caution", d.caution}};
}

DepthStats depth_from_json(const json& j) {
  DepthStats d;
  d.depth_bin = j.at("depth_bin").get<int>();
  d.n_gate_pass = j.at("n_gate_pass").get<int>();
  d.n_fail = j.at("n_fail").get<int>();
  d.rate = j.at("rate").get<double>();
  d.ci_low = j.at("ci_low").get<double>();
  d.ci_high = j.at("ci_high").get<double>();
  d.cp_low = j.at("cp_low").get<double>();
  d.cp_high = j.at("cp_high").get<double>();
  d.suppressed = j.at("suppressed").get<bool>();
  d.caution = j.at("caution").get<bool>();
  return d;
}

template <class T>
json opt(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

json to_json_value(const Scores& s) {
  json depth = json::array();
  for (const auto& [bin, d] : s.depth_stats) depth.push_back(depth_json(d));
  json d50{{"point", opt(s.d50.point)},
           {"band", s.d50.band ? json::array({s.d50.band->first, s.d50.band->second}) : json(nullptr)},
           {"censored", to_string(s.d50.censored)},
           {"first_bin_exceeding", opt(s.d50.first_bin_exceeding)},
           {"min_bin", s.d50.min_bin},
           {"max_bin", s.d50.max_bin},
           {"rendered", render_d50(s.d50)}};
  return json{{"model_id", s.model_id},
              {"run_id", s.run_id},
              {"manifest_hash", s.manifest_hash},
              {"records_hash", s.records_hash},
              {"bootstrap_b", s.bootstrap_b},
              {"seed", s.seed},
              {"stability", s.stability ? stability_json(*s.stability) : json(nullptr)},
              {"depth_stats", depth},
              {"d50", d50},
              {"conflation", s.conflation ? to_json_value(*s.conflation) : json(nullptr)}};
}

Scores scores_from_json(const json& j) {
  try {
    Scores s;
    s.model_id = j.at("model_id").get<std::string>();
    s.run_id = j.at("run_id").get<std::string>();
    s.manifest_hash = j.at("manifest_hash").get<std::string>();
    s.records_hash = j.value("records_hash", std::string());
    s.bootstrap_b = j.value("bootstrap_b", kDefaultBootstrapB);
    s.seed = j.value("seed", std::uint64_t{0});
    if (!j.at("stability").is_null()) s.stability = stability_from_json(j.at("stability"));
    for (const auto& d : j.at("depth_stats")) {
      auto ds = depth_from_json(d);
      s.depth_stats[ds.depth_bin] = ds;
    }
    const auto& d50 = j.at("d50");
    if (!d50.at("point").is_null()) s.d50.point = d50.at("point").get<double>();
    if (!d50.at("band").is_null()) s.d50.band = std::pair{d50["band"][0].get<double>(), d50["band"][1].get<double>()};
    s.d50.censored = censoring_from_string(d50.at("censored").get<std::string>());
    if (!d50.at("first_bin_exceeding").is_null()) s.d50.first_bin_exceeding = d50["first_bin_exceeding"].get<int>();
    s.d50.min_bin = d50.value("min_bin", 0);
    s.d50.max_bin = d50.value("max_bin", 0);
    if (j.contains("conflation") && !j.at("conflation").is_null()) {
      const auto& c = j.at("conflation");
      GatePopulationStats g;
      g.single_gate_n = c.at("single_gate_n").get<int>();
      g.double_gate_n = c.at("double_gate_n").get<int>();
      g.removed_fraction = c.at("removed_fraction").get<double>();
      g.single_gate_rate = c.at("single_gate_rate").get<double>();
      g.double_gate_rate = c.at("double_gate_rate").get<double>();
      g.inflation_pp = c.at("inflation_pp").get<double>();
      s.conflation = g;
    }
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("scores: ") + e.what());
  }
}

DecompositionReport decompose(const Scores& a, const Scores& b) {
  if (a.manifest_hash.empty() || b.manifest_hash.empty())
    throw ValidationError("both runs need a manifest hash to be compared");
  if (a.manifest_hash != b.manifest_hash)
    throw ValidationError("runs " + a.run_id + " and " + b.run_id + " were scored on different manifests");
  if (!a.stability || !b.stability) throw ValidationError("both runs need atom stability to be compared");

  DecompositionReport r;
  r.reference_run = a.run_id;
  r.comparator_run = b.run_id;
  r.manifest_hash = a.manifest_hash;
  r.stability_reference = a.stability->per_probe_rate;
  r.stability_comparator = b.stability->per_probe_rate;
  r.per_fact_reference = a.stability->per_fact_rate;
  r.per_fact_comparator = b.stability->per_fact_rate;
  r.delta_atom_pp = pct(r.stability_reference - r.stability_comparator);
  std::set<int> bins;
  for (const auto& [bin, s] : a.depth_stats) bins.insert(bin);
  for (int bin : bins) {
    auto ib = b.depth_stats.find(bin);
    if (ib == b.depth_stats.end()) continue;
    const auto& sa = a.depth_stats.at(bin);
    if (sa.suppressed || ib->second.suppressed) continue;
    r.delta_comp_pp[bin] = pct(sa.rate - ib->second.rate);
  }
  if (a.d50.point && b.d50.point) r.delta_depth = *a.d50.point - *b.d50.point;
  r.matched = std::fabs(r.delta_atom_pp) <= kMatchedWindowPp + 1e-9;
  return r;
}

json to_json_value(const DecompositionReport& r) {
  json comp = json::object();
  for (const auto& [bin, v] : r.delta_comp_pp) comp[std::to_string(bin)] = v;
  return json{{"reference_run", r.reference_run},
              {"comparator_run", r.comparator_run},
              {"manifest_hash", r.manifest_hash},
              {"stability_reference", r.stability_reference},
              {"stability_comparator", r.stability_comparator},
              {"per_fact_reference", r.per_fact_reference},
              {"per_fact_comparator", r.per_fact_comparator},
              {"delta_atom_pp", r.delta_atom_pp},
              {"delta_comp_pp", comp},
              {"delta_depth", opt(r.delta_depth)},
              {"matched", r.matched}};
}

}  // namespace gatebench
