#include "minqds/scenario.hpp"

#include "minqds/oracle.hpp"
#include "minqds/report.hpp"
#include "minqds/resolvent.hpp"
#include "minqds/timedomain.hpp"
#include "minqds/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace minqds {

using Json = nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::function<double(double)> named_profile(const std::string& name) {
  if (name == "sqrt2_exp") {
    return [](double x) { return std::sqrt(2.0) * std::exp(-x); };
  }
  if (name == "zero") return [](double) { return 0.0; };
  if (name == "tanh") return [](double x) { return std::tanh(x); };
  throw std::runtime_error("unknown profile '" + name + "'");
}

std::vector<double> rates_from_name(const std::string& name, int N) {
  std::vector<double> r(N);
  for (int k = 0; k < N; ++k) {
    if (name == "quadratic") {
      r[k] = double(k + 1) * double(k + 1);
    } else if (name == "linear") {
      r[k] = double(k + 1);
    } else if (name == "loglinear") {
      r[k] = double(k + 1) * std::log(double(k + 2)) * std::log(double(k + 2));
    } else {
      throw std::runtime_error("unknown rates '" + name + "'");
    }
  }
  return r;
}

TailRule tail_rule_from_name(const std::string& name) {
  TailRule rule;
  if (name == "quadratic") {
    rule.kind = TailRule::Kind::poly;
    rule.p = 2.0;
  } else if (name == "linear") {
    rule.kind = TailRule::Kind::poly;
    rule.p = 1.0;
  } else if (name == "loglinear") {
    rule.kind = TailRule::Kind::poly_log;
    rule.p = 1.0;
    rule.q = 2.0;
  }
  return rule;
}

ModelBundle scalar_bundle(bool with_channel) {
  ModelBundle bundle;
  bundle.model.G = ComplexMatrix::Constant(1, 1, Complex(-0.5, 0.0));
  if (with_channel) {
    bundle.model.Ls = {ComplexMatrix::Identity(1, 1)};
  }
  bundle.model.label = with_channel ? "scalar_demo" : "pure_loss";
  bundle.reference = make_reference(ComplexMatrix::Identity(1, 1), ReferenceKind::custom);
  bundle.probes = ComplexMatrix::Identity(1, 1);
  bundle.defect_probes = bundle.probes;
  bundle.condition_a_form_tol = 1e-8;
  bundle.provenance = with_channel ? "conservative scalar demo (g=-1/2, l=1)"
                                   : "scalar pure-loss model (no channel)";
  return bundle;
}

ComplexVector gaussian_packet(const RealVector& x, const RealVector& w, double x0,
                              double sigma) {
  RealVector u(x.size());
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double d = (x(k) - x0) / sigma;
    u(k) = std::exp(-0.5 * d * d);
  }
  ComplexVector v = (w.cwiseSqrt().cwiseProduct(u)).cast<Complex>();
  return v / v.norm();
}

}  // namespace

ScenarioConfig ScenarioConfig::from(const Config& cfg) {
  ScenarioConfig sc;
  sc.scenario = cfg.get_string("scenario");
  const bool known =
      sc.scenario == "scalar_demo" || sc.scenario == "pure_loss" ||
      sc.scenario == "reflected_bm" || sc.scenario == "transport_jump" ||
      sc.scenario == "heavy_ion" || sc.scenario == "birth" || sc.scenario == "files";
  if (!known) {
    throw std::runtime_error(cfg.origin() + ": unknown scenario '" + sc.scenario + "'");
  }
  sc.out_dir = cfg.get_string("out", sc.out_dir);
  sc.seed = static_cast<std::uint64_t>(cfg.get_long("seed", 1));
  sc.lambdas = cfg.get_double_list("lambda", sc.lambdas);
  for (double l : sc.lambdas) {
    if (!(l > 0.0)) throw std::runtime_error(cfg.origin() + ": lambda values must be > 0");
  }
  sc.condition_a_tol = cfg.get_double("tol.condition_a", sc.condition_a_tol);
  sc.max_terms = static_cast<int>(cfg.get_long("resolvent.max_terms", sc.max_terms));
  sc.tail_tol = cfg.get_double("resolvent.tail_tol", sc.tail_tol);
  sc.defect_tol = cfg.get_double("resolvent.defect_tol", sc.defect_tol);
  sc.certify_strategy = cfg.get_string("certify.strategy", sc.certify_strategy);
  if (sc.certify_strategy != "none") cert_strategy_from_string(sc.certify_strategy);

  sc.n_points = static_cast<int>(cfg.get_long("grid.n_points", sc.n_points));
  sc.x_max = cfg.get_double("grid.x_max", sc.x_max);
  sc.alpha = cfg.get_double("model.alpha", sc.alpha);
  sc.mass = cfg.get_double("model.mass", sc.mass);
  sc.g_profile = cfg.get_string("model.g", sc.g_profile);
  sc.potential = cfg.get_string("model.potential", sc.potential);
  sc.noise_amplitude = cfg.get_double("model.noise_amplitude", sc.noise_amplitude);

  sc.rates = cfg.get_string("birth.rates", sc.rates);
  sc.n_states = static_cast<int>(cfg.get_long("birth.n_states", sc.n_states));

  if (sc.scenario == "files") {
    sc.file_g = cfg.get_string("files.g");
    sc.file_ls = cfg.get_string_list("files.l");
    sc.file_c = cfg.get_string("files.c", "");
  }

  sc.export_operators = cfg.get_bool("export.operators", sc.export_operators);
  sc.oracle_enabled = cfg.get_bool("oracle.enabled", sc.oracle_enabled);
  sc.oracle_paths = cfg.get_long("oracle.n_paths", sc.oracle_paths);
  sc.oracle_t = cfg.get_double("oracle.t", sc.oracle_t);
  sc.oracle_x0 = cfg.get_double("oracle.x0", sc.oracle_x0);
  sc.evolve_t_final = cfg.get_double("evolve.t_final", sc.evolve_t_final);

  cfg.require_fully_consumed();
  return sc;
}

ModelBundle build_bundle(const ScenarioConfig& cfg) {
  if (cfg.scenario == "scalar_demo") return scalar_bundle(true);
  if (cfg.scenario == "pure_loss") return scalar_bundle(false);
  HalfLineGrid grid{cfg.n_points, cfg.x_max};
  if (cfg.scenario == "reflected_bm") {
    return build_reflected_bm(cfg.alpha, named_profile(cfg.g_profile), grid);
  }
  if (cfg.scenario == "transport_jump") {
    return build_transport_jump(named_profile(cfg.g_profile), grid, true);
  }
  if (cfg.scenario == "heavy_ion") {
    const double w0 = cfg.noise_amplitude;
    return build_heavy_ion_1d(cfg.mass, cfg.alpha, named_profile(cfg.potential),
                              [w0](double) { return w0; }, grid);
  }
  if (cfg.scenario == "birth") {
    return build_birth_process(rates_from_name(cfg.rates, cfg.n_states), cfg.n_states);
  }
  if (cfg.scenario == "files") {
    ModelBundle bundle;
    bundle.model.G = load_matrix_file(cfg.file_g);
    for (const auto& p : cfg.file_ls) bundle.model.Ls.push_back(load_matrix_file(p));
    bundle.model.label = "files";
    bundle.model.validate();
    const ComplexMatrix C = cfg.file_c.empty()
                                ? ComplexMatrix::Identity(bundle.model.dim(), bundle.model.dim())
                                : load_matrix_file(cfg.file_c);
    bundle.reference = make_reference(C, ReferenceKind::custom);
    bundle.condition_a_form_tol = 1e-8;
    bundle.provenance = "operators ingested from interchange files";
    return bundle;
  }
  throw std::runtime_error("build_bundle: unhandled scenario");
}

ScenarioReport run_scenario(const ScenarioConfig& cfg,
                            const std::vector<std::string>& stages) {
  auto enabled = [&stages](const std::string& s) {
    return stages.empty() || std::find(stages.begin(), stages.end(), s) != stages.end();
  };

  ScenarioReport rep;
  rep.scenario = cfg.scenario;
  Json j;
  j["scenario"] = cfg.scenario;
  j["seed"] = cfg.seed;
  j["versions"] = {{"minqds", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                 std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)}};
  Json timing = Json::object();

  const auto t_build = Clock::now();
  ModelBundle bundle = build_bundle(cfg);
  timing["build"] = ms_since(t_build);
  j["model"] = {{"label", bundle.model.label},
                {"dim", bundle.model.dim()},
                {"channels", bundle.model.Ls.size()},
                {"provenance", bundle.provenance},
                {"boundary_defect", bundle.boundary_defect}};
  if (bundle.model.grid) {
    j["model"]["grid"] = {{"spacing", bundle.model.grid->spacing},
                          {"x_min", bundle.model.grid->x_min},
                          {"x_max", bundle.model.grid->x_max},
                          {"theta", bundle.model.grid->theta}};
  }

  // condition A always runs; everything downstream needs the classification
  const auto t_ca = Clock::now();
  const ConditionAReport ca = check_condition_a(bundle.model, cfg.condition_a_tol);
  timing["check_a"] = ms_since(t_ca);
  j["condition_a"] = {{"defect_norm", ca.defect_norm},
                      {"max_defect_eig", ca.max_defect_eig},
                      {"classification", to_string(ca.classification)},
                      {"tol", cfg.condition_a_tol}};
  if (ca.classification == ConditionAClass::violated) {
    throw std::runtime_error("scenario '" + cfg.scenario +
                             "': truncation creates mass (Condition A violated); "
                             "refusing to run the resolvent machinery");
  }

  ResolventConfig rcbase;
  rcbase.max_terms = cfg.max_terms;
  rcbase.tail_tol = cfg.tail_tol;
  rcbase.defect_tol = cfg.defect_tol;

  if (enabled("defect")) {
    const auto t0 = Clock::now();
    ResolventEngine eng(bundle.model);
    Json defects = Json::object();
    for (double lambda : cfg.lambdas) {
      ResolventConfig rc = rcbase;
      rc.lambda = lambda;
      const DefectSequence seq = defect_iteration(eng, rc, bundle.defect_probes);
      CsvTable csv;
      csv.columns = {"n", "norm", "min_eig_monotonicity", "identity_residual"};
      for (size_t n = 0; n < seq.monotonicity_min_eigs.size(); ++n) {
        csv.add_row({std::to_string(n), csv_number(seq.term_norms[n]),
                     csv_number(seq.monotonicity_min_eigs[n]),
                     csv_number(seq.identity_residuals[n])});
      }
      rep.csv_files["defect_lambda_" + format_double(lambda) + ".csv"] = csv.to_string();
      defects[format_double(lambda)] = {
          {"verdict", to_string(seq.verdict)},
          {"terms_used", seq.terms_used},
          {"final_norm", seq.term_norms.back()},
          {"probe_defect", seq.probe_defect},
          {"consistency_residual", seq.consistency_residual}};
    }
    j["defect"] = defects;
    timing["defect"] = ms_since(t0);
  }

  if (enabled("resolve")) {
    const auto t0 = Clock::now();
    ResolventEngine eng(bundle.model);
    const ComplexMatrix I = ComplexMatrix::Identity(bundle.model.dim(), bundle.model.dim());
    CsvTable csv;
    csv.columns = {"lambda", "terms_used", "tail_norm", "norm_lambda_R_I"};
    Json res = Json::object();
    for (double lambda : cfg.lambdas) {
      ResolventConfig rc = rcbase;
      rc.lambda = lambda;
      const NeumannResult nr = neumann_resolvent(eng, rc, I);
      const double nrm = lambda * operator_norm(nr.R);
      csv.add_row({csv_number(lambda), std::to_string(nr.terms_used),
                   csv_number(nr.tail_norm), csv_number(nrm)});
      res[format_double(lambda)] = {{"terms_used", nr.terms_used},
                                    {"tail_norm", nr.tail_norm},
                                    {"converged", nr.converged},
                                    {"norm_lambda_R_I", nrm}};
    }
    rep.csv_files["resolvent.csv"] = csv.to_string();
    j["resolvent"] = res;
    timing["resolve"] = ms_since(t0);
  }

  if (enabled("certify") && cfg.certify_strategy != "none") {
    const auto t0 = Clock::now();
    CertifyOptions opts;
    opts.condition_a_form_tol = bundle.condition_a_form_tol;
    opts.condition_a_tol = cfg.condition_a_tol;
    opts.probes = bundle.probes;
    opts.b_constraints = bundle.b_constraints;
    const Certificate cert =
        certify(bundle.model, bundle.reference,
                cert_strategy_from_string(cfg.certify_strategy), opts);
    Json checks = Json::array();
    for (const auto& c : cert.checks) {
      checks.push_back({{"name", c.name}, {"pass", c.pass}, {"value", c.value},
                        {"note", c.note}});
    }
    j["certificate"] = {{"strategy", to_string(cert.strategy)},
                        {"verdict", to_string(cert.verdict)},
                        {"b_estimate", cert.b_estimate},
                        {"dominance_margin", cert.dominance_margin},
                        {"checks", checks}};
    if (cert.verdict == CertVerdict::refuted_hypothesis) rep.exit_code = 2;
    timing["certify"] = ms_since(t0);
  }

  if (enabled("evolve")) {
    const auto t0 = Clock::now();
    const Eigen::Index d = bundle.model.dim();
    const ComplexMatrix I = ComplexMatrix::Identity(d, d);
    Evolver ev(bundle.model);
    const int steps = 20;
    std::vector<double> ts(steps + 1);
    for (int i = 0; i <= steps; ++i) ts[i] = cfg.evolve_t_final * i / steps;
    const auto traj = ev.path(I, ts);
    CsvTable csv;
    csv.columns = {"t", "diag_first", "diag_mid", "diag_last", "norm_TtI_minus_I"};
    for (int i = 0; i <= steps; ++i) {
      csv.add_row({csv_number(ts[i]), csv_number(traj[i](0, 0).real()),
                   csv_number(traj[i](d / 2, d / 2).real()),
                   csv_number(traj[i](d - 1, d - 1).real()),
                   csv_number(operator_norm(traj[i] - I))});
    }
    rep.csv_files["trajectory.csv"] = csv.to_string();
    j["evolve"] = {{"t_final", cfg.evolve_t_final},
                   {"final_identity_drift", operator_norm(traj.back() - I)}};
    timing["evolve"] = ms_since(t0);
  }

  if (enabled("oracle") && cfg.oracle_enabled) {
    const auto t0 = Clock::now();
    Json oj = Json::object();
    oj["seed"] = cfg.seed;
    if (cfg.scenario == "birth") {
      const ExplosionVerdict ev = explosion_test(rates_from_name(cfg.rates, cfg.n_states),
                                                 cfg.n_states, tail_rule_from_name(cfg.rates));
      CsvTable csv;
      csv.columns = {"k", "partial_sum_inv_rates"};
      for (size_t k = 0; k < ev.partial_sums.size(); ++k) {
        csv.add_row({std::to_string(k), csv_number(ev.partial_sums[k])});
      }
      rep.csv_files["explosion.csv"] = csv.to_string();
      oj["explosion_verdict"] = to_string(ev.verdict);
      // defect <-> explosion correspondence on this truncation
      ResolventConfig rc = rcbase;
      rc.lambda = cfg.lambdas.front();
      rc.max_terms = std::max(cfg.max_terms, cfg.n_states + 8);
      const DefectSequence seq = defect_iteration(bundle.model, rc, bundle.defect_probes);
      oj["defect_verdict"] = to_string(seq.verdict);
      oj["probe_defect"] = seq.probe_defect;
      oj["correspondence"] =
          (seq.verdict == DefectVerdict::defect_detected) ==
          (ev.verdict == ExplosionClass::explosive);
    } else if (cfg.scenario == "transport_jump" && bundle.classical) {
      const RealVector x = bundle.classical->grid.nodes();
      const ComplexVector packet = gaussian_packet(x, bundle.weights, cfg.oracle_x0, 0.75);
      RealVector density(x.size());
      for (Eigen::Index k = 0; k < x.size(); ++k) {
        density(k) = std::norm(packet(k));  // already weight-absorbed
      }
      Evolver evq(bundle.model);
      CsvTable csv;
      csv.columns = {"observable", "quantum", "classical_mean", "std_error", "abs_diff"};
      const std::vector<std::pair<std::string, std::function<double(double)>>> obs = {
          {"exp(-x)", [](double y) { return std::exp(-y); }},
          {"exp(-2x)", [](double y) { return std::exp(-2 * y); }},
          {"1/(1+x)", [](double y) { return 1.0 / (1.0 + y); }}};
      for (const auto& [name, f] : obs) {
        ComplexMatrix Mf = ComplexMatrix::Zero(x.size(), x.size());
        for (Eigen::Index k = 0; k < x.size(); ++k) Mf(k, k) = f(x(k));
        const ComplexMatrix Tt = evq.at(Mf, cfg.oracle_t);
        const double q = (packet.adjoint() * Tt * packet).value().real();
        const PathStats ps = simulate_transport_jump_density(
            *bundle.classical, f, name, density, cfg.oracle_t, cfg.oracle_paths, cfg.seed);
        const auto [mean, se] = ps.estimates.at(name);
        csv.add_row({name, csv_number(q), csv_number(mean), csv_number(se),
                     csv_number(std::abs(q - mean))});
        oj[name] = {{"quantum", q}, {"classical", mean}, {"std_error", se}};
      }
      rep.csv_files["oracle_compare.csv"] = csv.to_string();
      oj["n_paths"] = cfg.oracle_paths;
      oj["t"] = cfg.oracle_t;
    } else if (cfg.scenario == "reflected_bm" && bundle.classical) {
      const RealVector x = bundle.classical->grid.nodes();
      const RealMatrix A = classical_generator_bm(*bundle.classical);
      RealVector f(x.size());
      for (Eigen::Index k = 0; k < x.size(); ++k) f(k) = std::exp(-x(k));
      // how far the observable sits from the classical generator's nonlocal
      // boundary condition (the comparison tolerance absorbs the projection)
      const double h = bundle.classical->grid.h();
      const double fp0 = (f(1) - f(0)) / h;
      const RealVector jw = bundle.classical->weights.cwiseProduct(
          bundle.classical->g.cwiseAbs2());
      double bc = bundle.classical->alpha * fp0;
      for (Eigen::Index k = 0; k < x.size(); ++k) bc += jw(k) * (f(k) - f(0));
      oj["observable_bc_residual"] = std::abs(bc);
      const RealVector cf = (matrix_exp((cfg.oracle_t * A).cast<Complex>()) *
                             f.cast<Complex>()).real();
      ComplexMatrix Mf = ComplexMatrix::Zero(x.size(), x.size());
      for (Eigen::Index k = 0; k < x.size(); ++k) Mf(k, k) = f(k);
      Evolver evq(bundle.model);
      const ComplexMatrix Tt = evq.at(Mf, cfg.oracle_t);
      CsvTable csv;
      csv.columns = {"packet_center", "quantum", "classical", "abs_diff"};
      double worst = 0.0;
      for (double x0 : {1.0, 2.0, 4.0}) {
        const ComplexVector packet = gaussian_packet(x, bundle.weights, x0, 0.75);
        const double q = (packet.adjoint() * Tt * packet).value().real();
        double c = 0.0;
        for (Eigen::Index k = 0; k < x.size(); ++k) {
          c += cf(k) * std::norm(packet(k));
        }
        worst = std::max(worst, std::abs(q - c));
        csv.add_row({csv_number(x0), csv_number(q), csv_number(c),
                     csv_number(std::abs(q - c))});
      }
      rep.csv_files["oracle_compare.csv"] = csv.to_string();
      oj["max_abs_diff"] = worst;
      oj["t"] = cfg.oracle_t;
      oj["observable"] = "exp(-x)";
    }
    j["oracle"] = oj;
    timing["oracle"] = ms_since(t0);
  }

  if (cfg.export_operators) {
    auto to_text = [](const ComplexMatrix& m) {
      std::ostringstream ss;
      save_matrix(ss, m);
      return ss.str();
    };
    rep.csv_files["operator_g.mat"] = to_text(bundle.model.G);
    for (size_t l = 0; l < bundle.model.Ls.size(); ++l) {
      rep.csv_files["operator_l" + std::to_string(l) + ".mat"] = to_text(bundle.model.Ls[l]);
    }
    rep.csv_files["operator_c.mat"] = to_text(bundle.reference.C);
  }

  j["timing_ms"] = timing;
  rep.json_text = j.dump(2);
  return rep;
}

void write_report(const ScenarioReport& report, const std::string& out_dir) {
  ensure_directory(out_dir);
  atomic_write_file(out_dir + "/report.json", report.json_text + "\n");
  for (const auto& [name, content] : report.csv_files) {
    atomic_write_file(out_dir + "/" + name, content);
  }
}

namespace {

void strip_volatile(Json& j) {
  j.erase("timing_ms");
  j.erase("versions");
}

void collect_leaves(const Json& j, const std::string& prefix,
                    std::map<std::string, Json>& out) {
  if (j.is_object()) {
    for (const auto& [k, v] : j.items()) {
      collect_leaves(v, prefix.empty() ? k : prefix + "." + k, out);
    }
  } else {
    out[prefix] = j;
  }
}

}  // namespace

std::string CompareSummary::to_string() const {
  std::string out;
  if (empty()) return "identical reports\n";
  out += "metric,a,b,ratio\n";
  for (const auto& r : rows) {
    out += r.metric + "," + csv_number(r.a) + "," + csv_number(r.b) + "," +
           csv_number(r.ratio) + "\n";
  }
  for (const auto& n : notes) out += "# " + n + "\n";
  return out;
}

CompareSummary compare_report(const std::string& report_json_a,
                              const std::string& report_json_b) {
  Json a = Json::parse(report_json_a);
  Json b = Json::parse(report_json_b);
  if (a.value("scenario", "") != b.value("scenario", "")) {
    throw std::runtime_error("compare_report: mismatched scenario kinds '" +
                             a.value("scenario", "") + "' vs '" +
                             b.value("scenario", "") + "'");
  }
  strip_volatile(a);
  strip_volatile(b);
  CompareSummary sum;
  sum.same_kind = true;
  if (a == b) return sum;

  std::map<std::string, Json> la, lb;
  collect_leaves(a, "", la);
  collect_leaves(b, "", lb);
  for (const auto& [key, va] : la) {
    const auto it = lb.find(key);
    if (it == lb.end()) {
      sum.notes.push_back("'" + key + "' present only in the first report");
      continue;
    }
    const Json& vb = it->second;
    if (va == vb) continue;
    if (va.is_number() && vb.is_number()) {
      CompareRow row;
      row.metric = key;
      row.a = va.get<double>();
      row.b = vb.get<double>();
      row.ratio = row.b != 0.0 ? row.a / row.b : std::numeric_limits<double>::infinity();
      sum.rows.push_back(row);
    } else {
      sum.notes.push_back("'" + key + "' differs: " + va.dump() + " vs " + vb.dump());
    }
  }
  for (const auto& [key, vb] : lb) {
    if (!la.count(key)) {
      sum.notes.push_back("'" + key + "' present only in the second report");
    }
  }
  return sum;
}

}  // namespace minqds
