#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gatebench/stats.hpp"

namespace gatebench {

inline constexpr std::string_view kDagger = "\xE2\x80\xA0";  // U+2020

/// "12.0 (25)", "100.0 (11)†" or "--" for a suppressed bin.
std::string render_rate_cell(const DepthStats& s);

/// One row per run: model, stability %, then rate (n) per depth bin.
/// Throws ValidationError if the runs come from different manifests.
std::string render_main_table(std::span<const Scores> runs);

/// model, d50, band, first bin above 50%.
std::string render_d50_table(std::span<const Scores> runs);

/// Single- vs double-gate population comparison per run.
std::string render_conflation_table(std::span<const Scores> runs);

std::string render_decomposition_table(const DecompositionReport& r);

struct CurvePoint {
  int depth_bin = 0;
  double rate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  int n = 0;
};

struct CollapseCurve {
  std::vector<CurvePoint> points;
  std::optional<std::string> svg;
};

/// Unsuppressed bins in depth order. Throws ValidationError with fewer than
/// two such bins.
CollapseCurve render_collapse_curve(const Scores& scores, bool with_svg = false);
std::string curve_to_csv(const CollapseCurve& c);

struct ReportBundle {
  std::map<std::string, std::string> tables;  // name -> CSV
  std::map<std::string, CollapseCurve> curves;
  std::optional<std::string> svg;
  json provenance;
};

ReportBundle build_report(std::span<const Scores> runs, bool with_svg = true);
json to_json_value(const ReportBundle& b);

/// Writes <name>.csv per table, collapse_<run>.csv per curve, the SVG and
/// report.json into `dir`.
void write_report(const ReportBundle& b, const std::filesystem::path& dir);

}  // namespace gatebench
