#include "bimoplan.h"

#include <cstring>
#include <sstream>
#include <string>

#include "bimoplan/errors.hpp"
#include "bimoplan/pipeline.hpp"

namespace {

thread_local std::string g_last_error;

char* dup_string(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

bimoplan_status map_code(bimoplan::ErrorCode code) {
  using bimoplan::ErrorCode;
  switch (code) {
    case ErrorCode::IoError: return BIMOPLAN_ERR_IO;
    case ErrorCode::ParseError:
    case ErrorCode::SchemaError:
    case ErrorCode::DuplicateHand: return BIMOPLAN_ERR_PARSE;
    case ErrorCode::ConfigError: return BIMOPLAN_ERR_CONFIG;
    case ErrorCode::EmptyOverlap:
    case ErrorCode::GapTooLong:
    case ErrorCode::LengthMismatch:
    case ErrorCode::UnknownElement:
    case ErrorCode::WindowOutOfRange:
    case ErrorCode::MalformedGraph:
    case ErrorCode::FrameMismatch:
    case ErrorCode::UnclassifiableTopology:
    case ErrorCode::NotSequential: return BIMOPLAN_ERR_ANALYSIS;
    case ErrorCode::OrphanOO:
    case ErrorCode::MalformedP:
    case ErrorCode::MissingGraspOffsets: return BIMOPLAN_ERR_COMPILE;
    case ErrorCode::SchemaViolation: return BIMOPLAN_ERR_SCHEMA;
    case ErrorCode::UnknownActionName:
    case ErrorCode::TickBudgetExhausted:
    case ErrorCode::GraspOutOfReach: return BIMOPLAN_ERR_DRYRUN;
    case ErrorCode::InvalidArgument: return BIMOPLAN_ERR_INVALID_ARG;
  }
  return BIMOPLAN_ERR_INTERNAL;
}

template <typename Fn>
bimoplan_status guarded(Fn&& fn) {
  try {
    fn();
    return BIMOPLAN_OK;
  } catch (const bimoplan::Error& e) {
    g_last_error = e.what();
    return map_code(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return BIMOPLAN_ERR_INTERNAL;
  }
}

bimoplan_status invalid(const char* message) {
  g_last_error = message;
  return BIMOPLAN_ERR_INVALID_ARG;
}

}  // namespace

struct bimoplan_config {
  bimoplan::RunConfig value;
};
struct bimoplan_trace {
  bimoplan::Trace value;
};
struct bimoplan_analysis {
  bimoplan::AnalysisResult value;
};
struct bimoplan_plan {
  bimoplan::Plan value;
};

extern "C" {

const char* bimoplan_status_name(bimoplan_status status) {
  switch (status) {
    case BIMOPLAN_OK: return "ok";
    case BIMOPLAN_ERR_INVALID_ARG: return "invalid_argument";
    case BIMOPLAN_ERR_IO: return "io";
    case BIMOPLAN_ERR_PARSE: return "parse";
    case BIMOPLAN_ERR_CONFIG: return "config";
    case BIMOPLAN_ERR_ANALYSIS: return "analysis";
    case BIMOPLAN_ERR_COMPILE: return "compile";
    case BIMOPLAN_ERR_SCHEMA: return "schema";
    case BIMOPLAN_ERR_DRYRUN: return "dryrun";
    case BIMOPLAN_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* bimoplan_last_error(void) { return g_last_error.c_str(); }

void bimoplan_string_free(char* text) { delete[] text; }

bimoplan_config* bimoplan_config_create(void) { return new bimoplan_config{}; }

void bimoplan_config_destroy(bimoplan_config* config) { delete config; }

bimoplan_status bimoplan_config_load(bimoplan_config* config, const char* path) {
  if (!config || !path) return invalid("config/path must not be null");
  return guarded([&] { config->value = bimoplan::load_config(path); });
}

bimoplan_status bimoplan_config_set(bimoplan_config* config, const char* key,
                                    const char* value) {
  if (!config || !key || !value) return invalid("config/key/value must not be null");
  return guarded([&] { bimoplan::apply_config_key(config->value, key, value); });
}

bimoplan_status bimoplan_config_emit(const bimoplan_config* config, char** out_text) {
  if (!config || !out_text) return invalid("config/out must not be null");
  return guarded([&] { *out_text = dup_string(bimoplan::emit_config(config->value)); });
}

bimoplan_status bimoplan_trace_load(const char* path, const char* format,
                                    bimoplan_trace** out_trace) {
  if (!path || !out_trace) return invalid("path/out must not be null");
  return guarded([&] {
    std::string fmt = format ? format : "";
    if (fmt.empty()) {
      const std::string p = path;
      fmt = p.size() >= 6 && p.substr(p.size() - 6) == ".jsonl" ? "jsonl" : "csv";
    }
    bimoplan::TraceFormat tf;
    if (fmt == "csv") {
      tf = bimoplan::TraceFormat::Csv;
    } else if (fmt == "jsonl") {
      tf = bimoplan::TraceFormat::Jsonl;
    } else {
      bimoplan::raise(bimoplan::ErrorCode::InvalidArgument, "format must be csv or jsonl");
    }
    *out_trace = new bimoplan_trace{bimoplan::ingest(path, tf)};
  });
}

void bimoplan_trace_destroy(bimoplan_trace* trace) { delete trace; }

bimoplan_status bimoplan_trace_csv(const bimoplan_trace* trace, char** out_csv) {
  if (!trace || !out_csv) return invalid("trace/out must not be null");
  return guarded([&] {
    std::ostringstream buffer;
    bimoplan::write_csv(trace->value, buffer);
    *out_csv = dup_string(buffer.str());
  });
}

bimoplan_status bimoplan_trace_synth(const char* scenario, uint64_t seed, double sigma_pos,
                                     double sigma_rot, bimoplan_trace** out_trace,
                                     char** out_truth_json) {
  if (!scenario || !out_trace) return invalid("scenario/out must not be null");
  return guarded([&] {
    bimoplan::ScenarioSpec spec;
    spec.kind = bimoplan::scenario_from_name(scenario);
    spec.seed = seed;
    spec.sigma_pos = sigma_pos;
    spec.sigma_rot = sigma_rot;
    auto [trace, truth] = bimoplan::generate(spec);
    *out_trace = new bimoplan_trace{std::move(trace)};
    if (out_truth_json) *out_truth_json = dup_string(truth.to_json());
  });
}

bimoplan_status bimoplan_analyze(const bimoplan_trace* trace, const bimoplan_config* config,
                                 bimoplan_analysis** out_analysis) {
  if (!trace || !config || !out_analysis) return invalid("trace/config/out must not be null");
  return guarded([&] {
    *out_analysis = new bimoplan_analysis{bimoplan::analyze(trace->value, config->value)};
  });
}

void bimoplan_analysis_destroy(bimoplan_analysis* analysis) { delete analysis; }

bimoplan_status bimoplan_analysis_report(const bimoplan_analysis* analysis,
                                         const bimoplan_config* config, char** out_json) {
  if (!analysis || !config || !out_json) return invalid("analysis/config/out must not be null");
  return guarded([&] {
    *out_json = dup_string(bimoplan::analysis_report_json(analysis->value, config->value));
  });
}

bimoplan_status bimoplan_analysis_graphs(const bimoplan_analysis* analysis,
                                         char** out_jsonl) {
  if (!analysis || !out_jsonl) return invalid("analysis/out must not be null");
  return guarded([&] { *out_jsonl = dup_string(bimoplan::graphs_jsonl(analysis->value)); });
}

bimoplan_status bimoplan_metric_csv(const bimoplan_trace* trace, const bimoplan_config* config,
                                    const char* elements, const char* metric, char** out_csv) {
  if (!trace || !config || !elements || !metric || !out_csv) {
    return invalid("trace/config/elements/metric/out must not be null");
  }
  return guarded([&] {
    std::vector<std::string> names;
    std::stringstream ss(elements);
    std::string token;
    while (std::getline(ss, token, ',')) {
      if (!token.empty()) names.push_back(token);
    }
    const std::string m = metric;
    bimoplan::MetricKind kind;
    if (m == "mi") kind = bimoplan::MetricKind::MutualInformation;
    else if (m == "coinfo") kind = bimoplan::MetricKind::CoInformation;
    else if (m == "distance") kind = bimoplan::MetricKind::Distance;
    else if (m == "distance_entropy") kind = bimoplan::MetricKind::DistanceEntropy;
    else bimoplan::raise(bimoplan::ErrorCode::InvalidArgument, "unknown metric '" + m + "'");

    bimoplan::Trace normalized =
        bimoplan::normalize(trace->value, config->value.rate_hz, config->value.max_gap_s);
    const auto series =
        bimoplan::metric_series(normalized, names, kind, config->value.series_params());
    *out_csv = dup_string(bimoplan::metric_series_csv(series));
  });
}

bimoplan_status bimoplan_compile(const bimoplan_analysis* analysis,
                                 const bimoplan_config* config, bimoplan_plan** out_plan) {
  if (!analysis || !config || !out_plan) return invalid("analysis/config/out must not be null");
  return guarded([&] {
    *out_plan = new bimoplan_plan{bimoplan::compile_plan(analysis->value, config->value)};
  });
}

void bimoplan_plan_destroy(bimoplan_plan* plan) { delete plan; }

bimoplan_status bimoplan_plan_xml(const bimoplan_plan* plan, char** out_xml) {
  if (!plan || !out_xml) return invalid("plan/out must not be null");
  return guarded([&] { *out_xml = dup_string(bimoplan::serialize(plan->value)); });
}

bimoplan_status bimoplan_plan_parse(const char* xml, bimoplan_plan** out_plan) {
  if (!xml || !out_plan) return invalid("xml/out must not be null");
  return guarded([&] { *out_plan = new bimoplan_plan{bimoplan::parse_plan(xml)}; });
}

bimoplan_status bimoplan_plan_lint(const bimoplan_plan* plan, char** out_findings) {
  if (!plan || !out_findings) return invalid("plan/out must not be null");
  return guarded([&] {
    std::ostringstream out;
    for (const auto& finding : bimoplan::lint(plan->value)) out << finding << '\n';
    *out_findings = dup_string(out.str());
  });
}

bimoplan_status bimoplan_dryrun(const bimoplan_plan* plan, const char* scene_json,
                                const bimoplan_config* config, double tol_m, double tol_rad,
                                char** out_report_json, int* out_pass) {
  if (!plan || !scene_json || !config || !out_report_json || !out_pass) {
    return invalid("plan/scene/config/out must not be null");
  }
  return guarded([&] {
    auto world = bimoplan::MockWorld::from_scene_json(scene_json);
    const auto report =
        bimoplan::dry_run(plan->value, std::move(world), config->value, tol_m, tol_rad);
    *out_report_json = dup_string(bimoplan::report_json(report));
    *out_pass = report.pass ? 1 : 0;
  });
}

}  // extern "C"
