// bimoplan command-line tool: analyze demonstrations, compile behavior-tree
// plans, generate synthetic recordings, export metric series, and validate
// plans against a mock world. Talks to the library through the C API only.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "bimoplan.h"

namespace {

// Exit codes: 0 success, 2 input/config error, 3 plan compilation error,
// 4 dry-run failure or budget exhaustion.
constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitCompile = 3;
constexpr int kExitDryRun = 4;

struct StringOut {
  char* value = nullptr;
  ~StringOut() { bimoplan_string_free(value); }
  std::string str() const { return value ? value : ""; }
};

int fail(bimoplan_status status) {
  std::cerr << "error (" << bimoplan_status_name(status) << "): " << bimoplan_last_error()
            << "\n";
  switch (status) {
    case BIMOPLAN_ERR_COMPILE: return kExitCompile;
    case BIMOPLAN_ERR_DRYRUN: return kExitDryRun;
    default: return kExitInput;
  }
}

bool write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write '" << path << "'\n";
    return false;
  }
  out << content;
  return true;
}

std::string read_file(const std::string& path, bool& ok) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    ok = false;
    return "";
  }
  std::stringstream ss;
  ss << in.rdbuf();
  ok = true;
  return ss.str();
}

using ConfigPtr = std::unique_ptr<bimoplan_config, decltype(&bimoplan_config_destroy)>;
using TracePtr = std::unique_ptr<bimoplan_trace, decltype(&bimoplan_trace_destroy)>;
using AnalysisPtr = std::unique_ptr<bimoplan_analysis, decltype(&bimoplan_analysis_destroy)>;
using PlanPtr = std::unique_ptr<bimoplan_plan, decltype(&bimoplan_plan_destroy)>;

int load_config(const std::string& path, const std::vector<std::string>& sets,
                ConfigPtr& config) {
  if (!path.empty()) {
    if (auto s = bimoplan_config_load(config.get(), path.c_str()); s != BIMOPLAN_OK) {
      return fail(s);
    }
  }
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "error: --set expects key=value, got '" << kv << "'\n";
      return kExitInput;
    }
    if (auto s = bimoplan_config_set(config.get(), kv.substr(0, eq).c_str(),
                                     kv.substr(eq + 1).c_str());
        s != BIMOPLAN_OK) {
      return fail(s);
    }
  }
  return kExitOk;
}

int load_trace(const std::string& path, const std::string& format, TracePtr& trace) {
  bimoplan_trace* raw = nullptr;
  const auto s =
      bimoplan_trace_load(path.c_str(), format.empty() ? nullptr : format.c_str(), &raw);
  if (s != BIMOPLAN_OK) return fail(s);
  trace.reset(raw);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"bimoplan: compile bimanual demonstrations into dual-arm behavior trees"};
  app.require_subcommand(1);

  std::string config_path, trace_path, trace_format;
  std::vector<std::string> config_sets;
  auto add_common = [&](CLI::App* cmd, bool with_trace) {
    cmd->add_option("--config", config_path, "key = value config file");
    cmd->add_option("--set", config_sets, "override one config key (key=value)")
        ->take_all();
    if (with_trace) {
      cmd->add_option("--trace", trace_path, "recorded demonstration")->required();
      cmd->add_option("--format", trace_format, "trace format: csv or jsonl");
    }
  };

  // analyze
  auto* analyze = app.add_subcommand("analyze", "segmentation report and diagnostics");
  std::string report_out = "report.json", graphs_out, metrics_dir;
  add_common(analyze, true);
  analyze->add_option("--out", report_out, "report JSON path");
  analyze->add_option("--graphs-out", graphs_out, "per-frame graph JSONL path");
  analyze->add_option("--metrics-dir", metrics_dir, "directory for per-pair metric CSVs");

  // plan
  auto* plan_cmd = app.add_subcommand("plan", "compile the behavior-tree plan");
  std::string plan_out = "plan.xml";
  add_common(plan_cmd, true);
  plan_cmd->add_option("--plan-out", plan_out, "plan XML path");

  // dryrun
  auto* dryrun = app.add_subcommand("dryrun", "execute a plan against a mock scene");
  std::string dr_plan, dr_scene, dr_report = "dryrun.json";
  double tol_m = 1e-6, tol_rad = 1e-6;
  add_common(dryrun, false);
  dryrun->add_option("--plan", dr_plan, "plan XML")->required();
  dryrun->add_option("--scene", dr_scene, "scene JSON")->required();
  dryrun->add_option("--out", dr_report, "report JSON path");
  dryrun->add_option("--tol-m", tol_m, "position tolerance, meters");
  dryrun->add_option("--tol-rad", tol_rad, "rotation tolerance, radians");

  // synth
  auto* synth = app.add_subcommand("synth", "generate a synthetic demonstration");
  std::string scenario = "cotransport", synth_out = "trace.csv", truth_out, scene_out;
  std::uint64_t seed = 7;
  double noise = 0.0, noise_rot = 0.0;
  synth->add_option("--scenario", scenario,
                    "pickplace | dual_uncoordinated | cotransport | hold_and_place | "
                    "pouring | assemble");
  synth->add_option("--seed", seed, "random seed");
  synth->add_option("--noise", noise, "positional noise sigma, meters");
  synth->add_option("--noise-rot", noise_rot, "rotational noise sigma, radians");
  synth->add_option("--out", synth_out, "trace CSV path");
  synth->add_option("--truth", truth_out, "ground-truth JSON path");
  synth->add_option("--scene", scene_out, "initial-scene JSON path (for dryrun)");

  // metrics
  auto* metrics = app.add_subcommand("metrics", "sliding-window metric series as CSV");
  std::string elements, metric = "mi", metrics_out;
  add_common(metrics, true);
  metrics->add_option("--elements", elements, "comma-separated element names")->required();
  metrics->add_option("--metric", metric, "mi | coinfo | distance | distance_entropy");
  metrics->add_option("--out", metrics_out, "CSV path (stdout when omitted)");

  CLI11_PARSE(app, argc, argv);

  ConfigPtr config(bimoplan_config_create(), &bimoplan_config_destroy);
  if (int rc = load_config(config_path, config_sets, config); rc != kExitOk) return rc;

  if (synth->parsed()) {
    bimoplan_trace* raw = nullptr;
    StringOut truth;
    const auto s = bimoplan_trace_synth(scenario.c_str(), seed, noise, noise_rot, &raw,
                                        truth_out.empty() && scene_out.empty() ? nullptr
                                                                               : &truth.value);
    if (s != BIMOPLAN_OK) return fail(s);
    TracePtr trace(raw, &bimoplan_trace_destroy);
    StringOut csv;
    if (auto sc = bimoplan_trace_csv(trace.get(), &csv.value); sc != BIMOPLAN_OK) {
      return fail(sc);
    }
    if (!write_file(synth_out, csv.str())) return kExitInput;
    if (!truth_out.empty() && !write_file(truth_out, truth.str())) return kExitInput;
    if (!scene_out.empty()) {
      // The truth JSON embeds the initial scene; extract it verbatim.
      const std::string text = truth.str();
      const auto pos = text.find("\"scene\": ");
      if (pos == std::string::npos) {
        std::cerr << "error: truth JSON lacks a scene block\n";
        return kExitInput;
      }
      // Balance braces from the scene object start.
      std::size_t start = text.find('{', pos);
      int depth = 0;
      std::size_t end = start;
      for (; end < text.size(); ++end) {
        if (text[end] == '{') ++depth;
        if (text[end] == '}' && --depth == 0) break;
      }
      if (!write_file(scene_out, text.substr(start, end - start + 1) + "\n")) {
        return kExitInput;
      }
    }
    std::cout << "wrote " << synth_out << "\n";
    return kExitOk;
  }

  if (metrics->parsed()) {
    TracePtr trace(nullptr, &bimoplan_trace_destroy);
    if (int rc = load_trace(trace_path, trace_format, trace); rc != kExitOk) return rc;
    StringOut csv;
    if (auto s = bimoplan_metric_csv(trace.get(), config.get(), elements.c_str(),
                                     metric.c_str(), &csv.value);
        s != BIMOPLAN_OK) {
      return fail(s);
    }
    if (metrics_out.empty()) {
      std::cout << csv.str();
    } else if (!write_file(metrics_out, csv.str())) {
      return kExitInput;
    }
    return kExitOk;
  }

  if (analyze->parsed() || plan_cmd->parsed()) {
    TracePtr trace(nullptr, &bimoplan_trace_destroy);
    if (int rc = load_trace(trace_path, trace_format, trace); rc != kExitOk) return rc;
    AnalysisPtr analysis(nullptr, &bimoplan_analysis_destroy);
    {
      bimoplan_analysis* raw = nullptr;
      if (auto s = bimoplan_analyze(trace.get(), config.get(), &raw); s != BIMOPLAN_OK) {
        return fail(s);
      }
      analysis.reset(raw);
    }

    if (analyze->parsed()) {
      StringOut report;
      if (auto s = bimoplan_analysis_report(analysis.get(), config.get(), &report.value);
          s != BIMOPLAN_OK) {
        return fail(s);
      }
      if (!write_file(report_out, report.str())) return kExitInput;
      if (!graphs_out.empty()) {
        StringOut graphs;
        if (auto s = bimoplan_analysis_graphs(analysis.get(), &graphs.value);
            s != BIMOPLAN_OK) {
          return fail(s);
        }
        if (!write_file(graphs_out, graphs.str())) return kExitInput;
      }
      std::cout << "wrote " << report_out << "\n";
      return kExitOk;
    }

    PlanPtr plan(nullptr, &bimoplan_plan_destroy);
    {
      bimoplan_plan* raw = nullptr;
      if (auto s = bimoplan_compile(analysis.get(), config.get(), &raw); s != BIMOPLAN_OK) {
        return fail(s);
      }
      plan.reset(raw);
    }
    StringOut xml, findings;
    if (auto s = bimoplan_plan_xml(plan.get(), &xml.value); s != BIMOPLAN_OK) return fail(s);
    if (auto s = bimoplan_plan_lint(plan.get(), &findings.value); s != BIMOPLAN_OK) {
      return fail(s);
    }
    if (!write_file(plan_out, xml.str())) return kExitInput;
    if (findings.str().empty()) {
      std::cout << "lint: plan certified\n";
    } else {
      std::cout << "lint findings:\n" << findings.str();
    }
    std::cout << "wrote " << plan_out << "\n";
    return kExitOk;
  }

  if (dryrun->parsed()) {
    bool ok = false;
    const std::string xml = read_file(dr_plan, ok);
    if (!ok) {
      std::cerr << "error: cannot read '" << dr_plan << "'\n";
      return kExitInput;
    }
    const std::string scene = read_file(dr_scene, ok);
    if (!ok) {
      std::cerr << "error: cannot read '" << dr_scene << "'\n";
      return kExitInput;
    }
    PlanPtr plan(nullptr, &bimoplan_plan_destroy);
    {
      bimoplan_plan* raw = nullptr;
      if (auto s = bimoplan_plan_parse(xml.c_str(), &raw); s != BIMOPLAN_OK) return fail(s);
      plan.reset(raw);
    }
    StringOut report;
    int pass = 0;
    if (auto s = bimoplan_dryrun(plan.get(), scene.c_str(), config.get(), tol_m, tol_rad,
                                 &report.value, &pass);
        s != BIMOPLAN_OK) {
      return fail(s);
    }
    if (!write_file(dr_report, report.str())) return kExitInput;
    std::cout << (pass ? "dry run: pass\n" : "dry run: FAIL\n");
    return pass ? kExitOk : kExitDryRun;
  }

  return kExitInput;
}
