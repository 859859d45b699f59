// Scenario-driven command line front end.  Subcommands map onto the library
// pipeline stages; outputs are machine-readable CSV/JSON under --out.

#include "minqds/config.hpp"
#include "minqds/report.hpp"
#include "minqds/scenario.hpp"
#include "minqds/version.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using minqds::Config;

void apply_env_overrides(Config& cfg) {
  // MINQDS_* mirrors the flags; flags still win because they are applied later
  const std::pair<const char*, const char*> map[] = {
      {"MINQDS_SEED", "seed"},
      {"MINQDS_OUT", "out"},
      {"MINQDS_LAMBDA", "lambda"},
      {"MINQDS_TOL", "tol.condition_a"},
  };
  for (const auto& [env, key] : map) {
    if (const char* v = std::getenv(env)) cfg.set(key, v);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

int run_stages(const minqds::ScenarioConfig& sc, const std::vector<std::string>& stages) {
  const minqds::ScenarioReport rep = minqds::run_scenario(sc, stages);
  minqds::write_report(rep, sc.out_dir);
  std::cout << "report written to " << sc.out_dir << "/report.json";
  if (!rep.csv_files.empty()) {
    std::cout << " (+" << rep.csv_files.size() << " csv)";
  }
  std::cout << "\n";
  return rep.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"minimal quantum dynamical semigroup toolkit"};
  app.set_version_flag("--version", minqds::kVersion);
  app.require_subcommand(1);

  std::string config_path, out_dir, lambda_list, tol, seed;
  app.add_option("--config", config_path, "scenario configuration file")->envname("MINQDS_CONFIG");
  app.add_option("--out", out_dir, "output directory (overrides config)");
  app.add_option("--lambda", lambda_list, "lambda sweep list, e.g. \"0.5 1 2\"");
  app.add_option("--tol", tol, "Condition A classification tolerance");
  app.add_option("--seed", seed, "root random seed");

  auto* cmd_check = app.add_subcommand("check-a", "Condition A classification only");
  auto* cmd_defect = app.add_subcommand("defect", "defect iteration Q^n(I) per lambda");
  auto* cmd_resolve = app.add_subcommand("resolve", "Neumann resolvent of the identity");
  auto* cmd_certify = app.add_subcommand("certify", "sufficient-condition certificate");
  auto* cmd_evolve = app.add_subcommand("evolve", "time-domain trajectory dump");
  auto* cmd_oracle = app.add_subcommand("oracle-compare", "classical oracle comparison");
  auto* cmd_sweep = app.add_subcommand("sweep", "lambda/grid refinement sweep");
  auto* cmd_demo = app.add_subcommand("demo", "packaged scalar demo (no config needed)");
  for (auto* sub : {cmd_check, cmd_defect, cmd_resolve, cmd_certify, cmd_evolve,
                    cmd_oracle, cmd_sweep, cmd_demo}) {
    sub->fallthrough();
  }

  std::vector<int> sweep_grids;
  cmd_sweep->add_option("--grids", sweep_grids, "n_points list for the refinement sweep");

  CLI11_PARSE(app, argc, argv);

  try {
    Config cfg = config_path.empty() ? Config::parse_string("", "<empty>")
                                     : Config::parse_file(config_path);
    apply_env_overrides(cfg);
    if (!out_dir.empty()) cfg.set("out", out_dir);
    if (!lambda_list.empty()) cfg.set("lambda", lambda_list);
    if (!tol.empty()) cfg.set("tol.condition_a", tol);
    if (!seed.empty()) cfg.set("seed", seed);
    if (cmd_demo->parsed() && !cfg.has("scenario")) cfg.set("scenario", "scalar_demo");
    if (cmd_demo->parsed() && !cfg.has("certify.strategy")) {
      cfg.set("certify.strategy", "phi_dominance");
    }

    minqds::ScenarioConfig sc = minqds::ScenarioConfig::from(cfg);

    if (cmd_check->parsed()) return run_stages(sc, {"check-a"});
    if (cmd_defect->parsed()) return run_stages(sc, {"check-a", "defect"});
    if (cmd_resolve->parsed()) return run_stages(sc, {"check-a", "resolve"});
    if (cmd_certify->parsed()) return run_stages(sc, {"check-a", "certify"});
    if (cmd_evolve->parsed()) return run_stages(sc, {"check-a", "evolve"});
    if (cmd_oracle->parsed()) return run_stages(sc, {"check-a", "oracle"});
    if (cmd_demo->parsed()) return run_stages(sc, {});

    if (cmd_sweep->parsed()) {
      // lambda sweep at each grid size; refinement trends via compare_report
      if (sc.lambdas.size() == 1) sc.lambdas = {0.5, 1.0, 2.0, 4.0};
      std::vector<int> grids = sweep_grids;
      if (grids.empty()) grids = {64, 128, 256};
      const bool grid_model = sc.scenario == "reflected_bm" ||
                              sc.scenario == "transport_jump" ||
                              sc.scenario == "heavy_ion";
      if (!grid_model) grids = {sc.n_points};
      minqds::CsvTable sweep;
      sweep.columns = {"n_points", "h", "boundary_defect", "b_estimate"};
      int exit_code = 0;
      std::string prev_json;
      for (size_t gi = 0; gi < grids.size(); ++gi) {
        minqds::ScenarioConfig run = sc;
        run.n_points = grids[gi];
        run.out_dir = sc.out_dir + "/n" + std::to_string(grids[gi]);
        if (run.certify_strategy == "none" && grid_model) {
          run.certify_strategy =
              sc.scenario == "transport_jump"
                  ? "fn_dominance"
                  : (sc.scenario == "heavy_ion" ? "phi_dominance_form" : "phi_dominance");
        }
        const minqds::ScenarioReport rep =
            minqds::run_scenario(run, {"check-a", "defect", "certify"});
        minqds::write_report(rep, run.out_dir);
        exit_code = std::max(exit_code, rep.exit_code);

        const minqds::ModelBundle bundle = minqds::build_bundle(run);
        const minqds::BEstimate be =
            minqds::estimate_b(bundle.model, bundle.reference, bundle.b_constraints);
        sweep.add_row({std::to_string(grids[gi]),
                       minqds::csv_number(bundle.model.grid ? bundle.model.grid->spacing : 0.0),
                       minqds::csv_number(bundle.boundary_defect),
                       minqds::csv_number(be.b)});
        if (!prev_json.empty()) {
          const minqds::CompareSummary diff = minqds::compare_report(prev_json, rep.json_text);
          minqds::atomic_write_file(
              run.out_dir + "/compare_to_previous.txt", diff.to_string());
        }
        prev_json = rep.json_text;
      }
      minqds::ensure_directory(sc.out_dir);
      minqds::atomic_write_file(sc.out_dir + "/sweep.csv", sweep.to_string());
      std::cout << "sweep written to " << sc.out_dir << "/sweep.csv\n";
      return exit_code;
    }
  } catch (const std::exception& ex) {
    std::cerr << "error: " << ex.what() << "\n";
    return 1;
  }
  return 0;
}
