#pragma once

#include "minqds/config.hpp"
#include "minqds/models.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace minqds {

/// Validated run description; every field comes from the config file with
/// CLI/environment overrides already applied, and unknown keys rejected.
struct ScenarioConfig {
  std::string scenario;  // scalar_demo | pure_loss | reflected_bm | transport_jump |
                         // heavy_ion | birth | files
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  std::vector<double> lambdas = {1.0};
  double condition_a_tol = 1e-8;
  int max_terms = 200;
  double tail_tol = 1e-6;
  double defect_tol = 0.1;
  std::string certify_strategy = "none";

  // grid models
  int n_points = 128;
  double x_max = 20.0;
  double alpha = 1.0;
  double mass = 1.0;
  std::string g_profile = "sqrt2_exp";
  std::string potential = "zero";
  double noise_amplitude = 0.5;

  // birth model
  std::string rates = "quadratic";
  int n_states = 100;

  // files scenario: matrix interchange paths
  std::string file_g;
  std::vector<std::string> file_ls;
  std::string file_c;

  // write G, L_l, C in the matrix interchange format next to the report
  bool export_operators = false;

  // oracle comparison
  bool oracle_enabled = false;
  long oracle_paths = 100000;
  double oracle_t = 2.0;
  double oracle_x0 = 1.0;

  // evolution dump
  double evolve_t_final = 1.0;

  static ScenarioConfig from(const Config& cfg);
};

struct ScenarioReport {
  std::string scenario;
  int exit_code = 0;
  std::string json_text;  // self-contained report (includes the config echo)
  std::map<std::string, std::string> csv_files;  // name -> content
};

/// Builds the configured bundle and runs the requested stages: Condition A,
/// defect iteration per lambda, certificates, oracle comparisons.  `stages`
/// is a subset of {"check-a","defect","resolve","certify","evolve","oracle"};
/// the empty set means the full pipeline.
ScenarioReport run_scenario(const ScenarioConfig& cfg,
                            const std::vector<std::string>& stages = {});

/// Writes report.json and the CSV artifacts into cfg.out_dir (atomically).
void write_report(const ScenarioReport& report, const std::string& out_dir);

ModelBundle build_bundle(const ScenarioConfig& cfg);

struct CompareRow {
  std::string metric;
  double a = 0.0;
  double b = 0.0;
  double ratio = 0.0;  // a / b when both finite and b != 0
};

struct CompareSummary {
  bool same_kind = false;
  std::vector<CompareRow> rows;     // refinement trends (defect vs h, b vs h)
  std::vector<std::string> notes;   // verdict changes and the like
  bool empty() const { return rows.empty() && notes.empty(); }
  std::string to_string() const;
};

/// Diffs two scenario reports of the same kind; volatile keys (timing,
/// version stamps) are ignored.  Throws on mismatched scenario kinds.
CompareSummary compare_report(const std::string& report_json_a,
                              const std::string& report_json_b);

}  // namespace minqds
