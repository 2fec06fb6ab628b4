#include "bimoplan/pipeline.hpp"

#include <cstdio>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bimoplan/errors.hpp"

namespace bimoplan {
namespace {

using nlohmann::json;

json edge_json(const Edge& e) {
  json out;
  out["tail"] = e.tail.id();
  out["tip"] = e.tip.id();
  out["relation"] = e.relation == Relation::HO ? "HO" : "OO";
  out["rel_pose"] = format_transform(e.rel_pose);
  if (e.relation == Relation::HO) out["mi_bits"] = e.mi_bits;
  return out;
}

json scene_graph_json(const SceneGraph& g) {
  json out;
  out["hand"] = hand_side_name(g.hand);
  out["topology"] = topology_name(topology(g));
  out["edges"] = json::array();
  for (const auto& e : g.edges) out["edges"].push_back(edge_json(e));
  return out;
}

}  // namespace

std::string trace_content_id(const Trace& normalized) {
  std::ostringstream buffer;
  write_csv(normalized, buffer);
  char out[32];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(fnv1a64(buffer.str())));
  return out;
}

AnalysisResult analyze(const Trace& raw, const RunConfig& config) {
  AnalysisResult result;
  result.trace = normalize(raw, config.rate_hz, config.max_gap_s);
  result.trace_id = trace_content_id(result.trace);

  GraphSeries series = build_graph_series(result.trace, config);
  const std::size_t frames = result.trace.frame_count();
  result.graphs.reserve(frames);
  for (std::size_t k = 0; k < frames; ++k) {
    BimanualGraph g = merge(series.right[k], series.left[k]);
    g.mode = classify(g, config);
    result.frame_labels.push_back(coordination_label(g.mode));
    result.topologies.push_back(bimanual_topology_label(g));
    result.graphs.push_back(std::move(g));
  }
  result.segmentation = segment_and_extract(result.graphs, config);
  return result;
}

Plan compile_plan(const AnalysisResult& analysis, const RunConfig& config) {
  return compile(analysis.segmentation, config, analysis.trace_id);
}

std::string analysis_report_json(const AnalysisResult& analysis, const RunConfig& config) {
  json doc;
  doc["trace_id"] = analysis.trace_id;
  doc["config_hash"] = config_hash(config);
  doc["config"] = emit_config(config);
  doc["frames"] = analysis.trace.frame_count();
  doc["rate_hz"] = analysis.trace.rate_hz;

  doc["units"] = json::array();
  for (const auto& unit : analysis.segmentation.units) {
    json u;
    u["index"] = unit.index;
    u["t_start"] = unit.t_start;
    u["t_end"] = unit.t_end;
    u["coordination"] = coordination_label(unit.mode);
    if (unit.mode.kind == CoordinationMode::Kind::Sequential) {
      u["dominant"] = unit.mode.dominant_object;
      u["reference"] = unit.mode.reference_object;
      u["dominant_hand"] = hand_side_name(unit.mode.dominant_hand);
    }
    u["signature"] = json::array();
    for (const auto& key : unit.signature) u["signature"].push_back(key.str());
    doc["units"].push_back(std::move(u));
  }

  doc["primitives"] = json::array();
  for (const auto& p : analysis.segmentation.primitives) {
    json pj;
    pj["action"] = action_kind_name(p.action);
    pj["actor"] = actor_name(p.actor);
    pj["coordination"] = coordination_label(p.mode);
    pj["unit"] = p.unit_index;
    pj["target"] = p.target;
    if (!p.subject.empty()) pj["subject"] = p.subject;
    if (p.action == ActionKind::Move) pj["transform"] = format_transform(p.transform);
    doc["primitives"].push_back(std::move(pj));
  }

  doc["unfinished_grasps"] = analysis.segmentation.unfinished_grasps;

  // Run-length encoded per-frame diagnostics.
  auto rle = [](const std::vector<std::string>& labels) {
    json spans = json::array();
    std::size_t begin = 0;
    for (std::size_t k = 1; k <= labels.size(); ++k) {
      if (k == labels.size() || labels[k] != labels[begin]) {
        spans.push_back({{"label", labels[begin]}, {"start", begin}, {"end", k - 1}});
        begin = k;
      }
    }
    return spans;
  };
  doc["frame_labels"] = rle(analysis.frame_labels);
  doc["topologies"] = rle(analysis.topologies);
  return doc.dump(2);
}

std::string graphs_jsonl(const AnalysisResult& analysis) {
  std::ostringstream out;
  for (std::size_t k = 0; k < analysis.graphs.size(); ++k) {
    const BimanualGraph& g = analysis.graphs[k];
    json line;
    line["frame"] = k;
    line["t"] = g.frame_t;
    line["coordination"] = coordination_label(g.mode);
    line["topology"] = bimanual_topology_label(g);
    line["right"] = scene_graph_json(g.right);
    line["left"] = scene_graph_json(g.left);
    out << line.dump() << '\n';
  }
  return out.str();
}

std::string metric_series_csv(const MetricSeries& series) {
  std::ostringstream out;
  out << "t,value\n";
  char buf[64];
  for (std::size_t i = 0; i < series.timestamps.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.9f,%.9f", series.timestamps[i], series.values[i]);
    out << buf << '\n';
  }
  return out.str();
}

}  // namespace bimoplan
