#include "gatebench/report.hpp"

#include <cstdio>
#include <set>

#include "gatebench/errors.hpp"
#include "gatebench/io.hpp"

namespace gatebench {

namespace {

std::string fixed(double v, int digits) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pct1(double v) { return fixed(100.0 * v, 1); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ',';
    out += csv_field(fields[i]);
  }
  return out + "\n";
}

void require_same_manifest(std::span<const Scores> runs) {
  for (const auto& r : runs)
    if (r.manifest_hash != runs.front().manifest_hash)
      throw ValidationError("runs " + runs.front().run_id + " and " + r.run_id + " come from different manifests");
}

std::set<int> all_bins(std::span<const Scores> runs) {
  std::set<int> bins;
  for (const auto& r : runs)
    for (const auto& [bin, s] : r.depth_stats) bins.insert(bin);
  return bins;
}

std::string svg_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string collapse_svg(const std::vector<std::pair<std::string, CollapseCurve>>& curves) {
  constexpr double W = 480, H = 320, L = 60, R = 20, T = 20, B = 50;
  int dmin = 2, dmax = 8;
  for (const auto& [name, c] : curves) {
    for (const auto& p : c.points) {
      dmin = std::min(dmin, p.depth_bin);
      dmax = std::max(dmax, p.depth_bin);
    }
  }
  if (dmax == dmin) ++dmax;
  auto x = [&](double d) { return L + (W - L - R) * (d - dmin) / (dmax - dmin); };
  auto y = [&](double r) { return T + (H - T - B) * (1.0 - r); };
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"480\" height=\"320\" viewBox=\"0 0 480 320\">\n";
  s += "<rect width=\"480\" height=\"320\" fill=\"white\"/>\n";
  s += "<line x1=\"" + fixed(L, 1) + "\" y1=\"" + fixed(H - B, 1) + "\" x2=\"" + fixed(W - R, 1) + "\" y2=\"" +
       fixed(H - B, 1) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fixed(L, 1) + "\" y1=\"" + fixed(T, 1) + "\" x2=\"" + fixed(L, 1) + "\" y2=\"" +
       fixed(H - B, 1) + "\" stroke=\"black\"/>\n";
  for (int d = dmin; d <= dmax; d += 2) {
    s += "<text x=\"" + fixed(x(d), 1) + "\" y=\"" + fixed(H - B + 18, 1) +
         "\" font-size=\"11\" text-anchor=\"middle\">" + std::to_string(d) + "</text>\n";
  }
  for (int k = 0; k <= 4; ++k) {
    const double r = k / 4.0;
    s += "<text x=\"" + fixed(L - 6, 1) + "\" y=\"" + fixed(y(r) + 4, 1) +
         "\" font-size=\"11\" text-anchor=\"end\">" + std::to_string(k * 25) + "</text>\n";
  }
  s += "<text x=\"" + fixed((L + W - R) / 2, 1) + "\" y=\"" + fixed(H - 12, 1) +
       "\" font-size=\"12\" text-anchor=\"middle\">depth</text>\n";
  s += "<text x=\"16\" y=\"" + fixed((T + H - B) / 2, 1) + "\" font-size=\"12\" text-anchor=\"middle\" transform=\"rotate(-90 16 " +
       fixed((T + H - B) / 2, 1) + ")\">residual failure (%)</text>\n";

  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& [name, c] = curves[i];
    const std::string color = kColors[i % (sizeof kColors / sizeof *kColors)];
    std::string band, line;
    for (const auto& p : c.points) band += fixed(x(p.depth_bin), 1) + "," + fixed(y(p.ci_high), 1) + " ";
    for (auto it = c.points.rbegin(); it != c.points.rend(); ++it)
      band += fixed(x(it->depth_bin), 1) + "," + fixed(y(it->ci_low), 1) + " ";
    for (const auto& p : c.points) line += fixed(x(p.depth_bin), 1) + "," + fixed(y(p.rate), 1) + " ";
    band.pop_back();
    line.pop_back();
    s += "<polygon points=\"" + band + "\" fill=\"" + color + "\" fill-opacity=\"0.15\" stroke=\"none\"/>\n";
    s += "<polyline points=\"" + line + "\" fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    for (const auto& p : c.points)
      s += "<circle cx=\"" + fixed(x(p.depth_bin), 1) + "\" cy=\"" + fixed(y(p.rate), 1) + "\" r=\"3\" fill=\"" +
           color + "\"/>\n";
    s += "<text x=\"" + fixed(L + 8, 1) + "\" y=\"" + fixed(T + 14 + 14.0 * i, 1) + "\" font-size=\"11\" fill=\"" +
         color + "\">" + svg_escape(name) + "</text>\n";
  }
  s += "</svg>\n";
  return s;
}

}  // namespace

std::string render_rate_cell(const DepthStats& s) {
  if (s.suppressed) return "--";
  std::string cell = pct1(s.rate) + " (" + std::to_string(s.n_gate_pass) + ")";
  if (s.caution) cell += kDagger;
  return cell;
}

std::string render_main_table(std::span<const Scores> runs) {
  if (runs.empty()) throw ValidationError("no runs to tabulate");
  require_same_manifest(runs);
  const auto bins = all_bins(runs);
  std::vector<std::string> header{"model", "stability"};
  for (int b : bins) header.push_back("d" + std::to_string(b));
  std::string out = csv_row(header);
  for (const auto& r : runs) {
    std::vector<std::string> row{r.model_id, r.stability ? pct1(r.stability->per_probe_rate) : "--"};
    for (int b : bins) {
      auto it = r.depth_stats.find(b);
      row.push_back(it == r.depth_stats.end() ? "--" : render_rate_cell(it->second));
    }
    out += csv_row(row);
  }
  return out;
}

std::string render_d50_table(std::span<const Scores> runs) {
  if (runs.empty()) throw ValidationError("no runs to tabulate");
  require_same_manifest(runs);
  std::string out = csv_row({"model", "d50", "band", "censored", "first_bin_above_50"});
  for (const auto& r : runs) {
    out += csv_row({r.model_id, render_d50(r.d50), render_band(r.d50), std::string(to_string(r.d50.censored)),
                    r.d50.first_bin_exceeding ? std::to_string(*r.d50.first_bin_exceeding) : "--"});
  }
  return out;
}

std::string render_conflation_table(std::span<const Scores> runs) {
  if (runs.empty()) throw ValidationError("no runs to tabulate");
  require_same_manifest(runs);
  std::string out = csv_row({"model", "single_gate_n", "double_gate_n", "removed_pct", "single_gate_rate",
                             "double_gate_rate", "inflation_pp"});
  for (const auto& r : runs) {
    if (!r.conflation) {
      out += csv_row({r.model_id, "--", "--", "--", "--", "--", "--"});
      continue;
    }
    const auto& c = *r.conflation;
    out += csv_row({r.model_id, std::to_string(c.single_gate_n), std::to_string(c.double_gate_n),
                    pct1(c.removed_fraction), pct1(c.single_gate_rate), pct1(c.double_gate_rate),
                    fixed(c.inflation_pp, 1)});
  }
  return out;
}

std::string render_decomposition_table(const DecompositionReport& r) {
  std::string out = csv_row({"channel", "depth_bin", "value"});
  out += csv_row({"delta_atom_pp", "", fixed(r.delta_atom_pp, 1)});
  for (const auto& [bin, v] : r.delta_comp_pp) out += csv_row({"delta_comp_pp", std::to_string(bin), fixed(v, 1)});
  out += csv_row({"delta_depth", "", r.delta_depth ? fixed(*r.delta_depth, 2) : "--"});
  out += csv_row({"matched", "", r.matched ? "true" : "false"});
  return out;
}

CollapseCurve render_collapse_curve(const Scores& scores, bool with_svg) {
  CollapseCurve c;
  for (const auto& [bin, s] : scores.depth_stats) {
    if (s.suppressed) continue;
    c.points.push_back({bin, s.rate, s.ci_low, s.ci_high, s.n_gate_pass});
  }
  if (c.points.size() < 2)
    throw ValidationError("run " + scores.run_id + " has fewer than two reportable depth bins");
  if (with_svg) c.svg = collapse_svg({{scores.model_id, c}});
  return c;
}

std::string curve_to_csv(const CollapseCurve& c) {
  std::string out = csv_row({"depth_bin", "rate", "ci_low", "ci_high", "n"});
  for (const auto& p : c.points)
    out += csv_row({std::to_string(p.depth_bin), fixed(p.rate, 4), fixed(p.ci_low, 4), fixed(p.ci_high, 4),
                    std::to_string(p.n)});
  return out;
}

ReportBundle build_report(std::span<const Scores> runs, bool with_svg) {
  ReportBundle b;
  b.tables["main_table"] = render_main_table(runs);
  b.tables["d50_table"] = render_d50_table(runs);
  b.tables["conflation"] = render_conflation_table(runs);

  std::vector<std::pair<std::string, CollapseCurve>> plotted;
  json prov = json::array();
  for (const auto& r : runs) {
    json entry{{"run_id", r.run_id},
               {"model_id", r.model_id},
               {"manifest_hash", r.manifest_hash},
               {"records_hash", r.records_hash},
               {"bootstrap_b", r.bootstrap_b},
               {"seed", r.seed}};
    try {
      auto curve = render_collapse_curve(r);
      b.curves[r.run_id] = curve;
      plotted.emplace_back(r.model_id, std::move(curve));
    } catch (const ValidationError& e) {
      entry["curve_skipped"] = e.what();
    }
    prov.push_back(std::move(entry));
  }
  b.provenance = json{{"runs", prov}};
  if (with_svg && !plotted.empty()) b.svg = collapse_svg(plotted);
  return b;
}

json to_json_value(const ReportBundle& b) {
  json curves = json::object();
  for (const auto& [name, c] : b.curves) {
    json pts = json::array();
    for (const auto& p : c.points)
      pts.push_back({{"depth_bin", p.depth_bin}, {"rate", p.rate}, {"ci_low", p.ci_low}, {"ci_high", p.ci_high}, {"n", p.n}});
    curves[name] = pts;
  }
  return json{{"tables", b.tables}, {"curves", curves}, {"provenance", b.provenance}};
}

void write_report(const ReportBundle& b, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  for (const auto& [name, csv] : b.tables) write_file(dir / (name + ".csv"), csv);
  for (const auto& [name, c] : b.curves) write_file(dir / ("collapse_" + name + ".csv"), curve_to_csv(c));
  if (b.svg) write_file(dir / "collapse_curve.svg", *b.svg);
  write_file(dir / "report.json", to_json_value(b).dump(2) + "\n");
}

}  // namespace gatebench
