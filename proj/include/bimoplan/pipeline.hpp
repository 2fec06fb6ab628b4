#pragma once

#include <string>
#include <vector>

#include "bimoplan/dry_run.hpp"
#include "bimoplan/plan.hpp"
#include "bimoplan/synth.hpp"

namespace bimoplan {

/// Everything the analysis stage derives from one demonstration.
struct AnalysisResult {
  Trace trace;  // normalized
  std::vector<BimanualGraph> graphs;       // per frame, classified
  std::vector<std::string> frame_labels;   // coordination label per frame
  std::vector<std::string> topologies;     // bimanual topology label per frame
  SegmentationResult segmentation;
  std::string trace_id;
};

/// Normalizes (when needed), builds the per-frame graph series, classifies
/// every frame, segments into interaction units, and extracts primitives.
AnalysisResult analyze(const Trace& raw, const RunConfig& config);

Plan compile_plan(const AnalysisResult& analysis, const RunConfig& config);

std::string analysis_report_json(const AnalysisResult& analysis, const RunConfig& config);
std::string graphs_jsonl(const AnalysisResult& analysis);
std::string metric_series_csv(const MetricSeries& series);

/// Content hash of the normalized trace; identical recordings share an id.
std::string trace_content_id(const Trace& normalized);

}  // namespace bimoplan
