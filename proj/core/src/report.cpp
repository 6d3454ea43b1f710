#include "defectlab/report.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <type_traits>
#include <utility>

#include "json.hpp"

#include "defectlab/eigsolve.hpp"
#include "defectlab/errors.hpp"
#include "defectlab/field2d.hpp"
#include "defectlab/io.hpp"
#include "defectlab/mesh.hpp"
#include "defectlab/modes.hpp"
#include "defectlab/radial_solver.hpp"
#include "defectlab/stability.hpp"

namespace defectlab {

using ordered_json = nlohmann::ordered_json;

const char* const kReportSchemaVersion = "defectlab-report/1";

namespace {

const std::vector<std::string> kAnalyses = {"diagnose", "stability", "modes", "check2d",
                                            "uniqueness"};

bool wants(const RunConfig& cfg, const std::string& analysis) {
  return std::find(cfg.analyses.begin(), cfg.analyses.end(), analysis) != cfg.analyses.end();
}

double pencil_scale(const BulkConstants& c, const ModelParams& p) {
  return p.a2 + p.b2 * c.s_plus + p.c2 * c.s_plus * c.s_plus;
}

[[noreturn]] void rethrow_with_stage(const std::string& stage) {
  const auto tag = [&stage](const char* what) { return stage + ": " + what; };
  try {
    throw;
  } catch (const NonConvergenceError& e) {
    throw NonConvergenceError(tag(e.what()));
  } catch (const SignViolationError& e) {
    throw SignViolationError(tag(e.what()));
  } catch (const FactorizationError& e) {
    throw FactorizationError(tag(e.what()));
  } catch (const CriticalRegimeError& e) {
    throw CriticalRegimeError(tag(e.what()));
  } catch (const NumericError& e) {
    throw NumericError(tag(e.what()));
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(tag(e.what()));
  } catch (const std::runtime_error& e) {
    throw std::runtime_error(tag(e.what()));
  }
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

template <class Fn>
auto run_stage(ordered_json& timings, const std::string& name, Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    if constexpr (std::is_void_v<std::invoke_result_t<Fn>>) {
      fn();
      timings[name] = seconds_since(t0);
    } else {
      auto result = fn();
      timings[name] = seconds_since(t0);
      return result;
    }
  } catch (...) {
    rethrow_with_stage(name);
  }
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<double> random_support_vector(std::mt19937_64& rng, int nn) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> x(static_cast<std::size_t>(nn), 0.0);
  for (int i = 2; i + 2 < nn; ++i) x[i] = unit(rng);
  return x;
}

void add_verdict(ordered_json& verdicts, bool& all_ok, const std::string& name, bool ok,
                 const std::string& operation, double tolerance, double value) {
  ordered_json v;
  v["ok"] = ok;
  v["operation"] = operation;
  v["tolerance"] = tolerance;
  v["value"] = value;
  verdicts[name] = std::move(v);
  all_ok = all_ok && ok;
}

void add_identity(ordered_json& checks, bool& all_ok, const std::string& name,
                  const std::string& operation, int draws, double tolerance,
                  double max_discrepancy) {
  ordered_json e;
  e["name"] = name;
  e["operation"] = operation;
  e["draws"] = draws;
  e["tolerance"] = tolerance;
  e["max_discrepancy"] = max_discrepancy;
  e["ok"] = max_discrepancy <= tolerance;
  all_ok = all_ok && (max_discrepancy <= tolerance);
  checks.push_back(std::move(e));
}

ordered_json config_to_json(const RunConfig& cfg) {
  ordered_json j;
  j["a2"] = cfg.a2;
  j["b2"] = cfg.b2;
  j["c2"] = cfg.c2;
  j["k"] = cfg.k;
  j["whole_plane"] = cfg.whole_plane;
  j["radius"] = cfg.radius;
  j["r_eff"] = cfg.r_eff;
  j["n_elements"] = cfg.n_elements;
  j["grading"] = cfg.grading;
  j["grading_ratio"] = cfg.grading_ratio;
  j["tol"] = cfg.tol;
  j["analyses"] = cfg.analyses;
  j["out"] = cfg.out;
  j["seed"] = cfg.seed;
  j["jobs"] = cfg.jobs;
  return j;
}

RadialMesh make_mesh(const RunConfig& cfg) {
  const Domain domain = cfg.whole_plane ? Domain::whole_plane() : Domain::disk(cfg.radius);
  const Grading grading = cfg.grading == "uniform" ? Grading::uniform()
                                                   : Grading::geometric(cfg.grading_ratio);
  return build_mesh(cfg.params(), domain, cfg.n_elements, grading,
                    cfg.whole_plane ? cfg.r_eff : 0.0);
}

ordered_json spectrum_to_json(const SpectrumResult& s) {
  ordered_json j;
  j["label"] = s.label;
  j["eigenvalues"] = s.eigenvalues;
  j["residuals"] = s.residuals;
  j["converged"] = s.converged;
  j["iterations"] = s.iterations;
  return j;
}

void diagnose_section(const Profile& profile, const BulkConstants& bc, ordered_json& report,
                      ordered_json& verdicts, bool& all_ok) {
  const DiagnosticsReport d = diagnose(profile);
  ordered_json j;
  j["regime"] = regime_name(d.regime);
  j["box_bounds_ok"] = d.box_bounds_ok;
  j["sign_ok"] = d.sign_ok;
  j["sqrt3_bound_ok"] = d.sqrt3_bound_ok;
  j["core_resolution_ok"] = d.core_resolution_ok;
  j["monotonicity"] = {
      {"u_ok", d.monotonicity.u_ok},
      {"v_ok", d.monotonicity.v_ok},
      {"max_violation", d.monotonicity.max_violation},
  };
  j["critical_v_deviation"] = d.critical_v_deviation;
  j["max_residual"] = d.max_residual;
  j["asymptotics_checked"] = d.asymptotics_checked;
  j["p1_hat"] = d.p1_hat;
  j["q1_hat"] = d.q1_hat;
  j["p1_rel_err"] = d.p1_rel_err;
  j["q1_rel_err"] = d.q1_rel_err;

  const double mono_tol = 1e-10 * bc.s_plus;
  add_verdict(verdicts, all_ok, "monotonicity_by_regime",
              d.monotonicity.u_ok && d.monotonicity.v_ok, "diagnose/monotone_increments",
              mono_tol, d.monotonicity.max_violation);
  if (d.regime == Regime::Critical) {
    const double vtol = 1e-8 * bc.s_plus;
    j["critical_v_constant_ok"] = d.critical_v_deviation <= vtol;
    add_verdict(verdicts, all_ok, "critical_v_constant", d.critical_v_deviation <= vtol,
                "diagnose/critical_v_deviation", vtol, d.critical_v_deviation);
  }
  if (d.asymptotics_checked) {
    const double worst = std::max(d.p1_rel_err, d.q1_rel_err);
    add_verdict(verdicts, all_ok, "asymptotics_match", worst <= 0.05, "diagnose/far_field_fit",
                0.05, worst);
  }
  report["diagnostics"] = std::move(j);
}

void stability_section(const Profile& profile, double scale, std::uint64_t seed,
                       ordered_json& spectra, ordered_json& checks, ordered_json& verdicts,
                       bool& all_ok) {
  const QuadForm form = assemble_B(profile);
  const SpectrumResult spec = lowest_spectrum(form, 5);
  spectra["radial"] = spectrum_to_json(spec);
  const double lambda0 = spec.eigenvalues.empty() ? 0.0 : spec.eigenvalues.front();
  add_verdict(verdicts, all_ok, "radial_second_variation_positive", lambda0 > -1e-8 * scale,
              "lowest_spectrum(assemble_B)", 1e-8 * scale, lambda0);

  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  const int nn = profile.n_nodes();
  double worst = 0.0;
  const int draws = 3;
  for (int d = 0; d < draws; ++d) {
    const std::vector<double> xi = random_support_vector(rng, nn);
    const std::vector<double> eta = random_support_vector(rng, nn);
    const auto [direct, rewritten] = hardy_certificate_B(profile, xi, eta);
    worst = std::max(worst, std::abs(direct - rewritten) / (1.0 + std::abs(direct)));
  }
  add_identity(checks, all_ok, "hardy_certificate_B", "hardy_certificate_B", draws, 1e-8, worst);
}

void modes_section(const RunConfig& cfg, const Profile& profile, const RadialMesh& mesh,
                   double scale, ordered_json& report, ordered_json& spectra,
                   ordered_json& checks, ordered_json& verdicts, bool& all_ok) {
  const InstabilityScan scan = instability_search(cfg.params(), mesh);
  ordered_json entries = ordered_json::array();
  for (const ModeScanEntry& e : scan.entries) {
    ordered_json je;
    je["sector"] = e.sector;
    je["index"] = e.m_or_n;
    je["k"] = e.k;
    je["lambda_min"] = e.lambda_min;
    je["extension"] = e.extension;
    je["label"] = e.label;
    entries.push_back(std::move(je));
  }
  ordered_json js;
  js["entries"] = std::move(entries);
  js["lambda_min"] = scan.lambda_min;
  js["worst_label"] = scan.worst_label;
  js["found_negative"] = scan.found_negative;
  js["scale"] = scan.scale;
  js["worst"] = spectrum_to_json(scan.worst);
  spectra["scan"] = std::move(js);

  if (std::abs(cfg.k) == 1) {
    add_verdict(verdicts, all_ok, "mode_positivity", !scan.found_negative, "instability_search",
                1e-8 * scan.scale, scan.lambda_min);
    ordered_json kj;
    kj["rayleigh"] = kernel_check_m1(profile);
    kj["operation"] = "kernel_check_m1";
    report["kernel"] = std::move(kj);
  } else {
    add_verdict(verdicts, all_ok, "higher_degree_instability", scan.found_negative,
                "instability_search", 1e-8 * scan.scale, scan.lambda_min);
  }

  std::mt19937_64 rng(cfg.seed ^ 0xda3e39cb94b95bdbULL);
  const int nn = profile.n_nodes();
  const int draws = 3;
  {
    double worst = 0.0;
    for (int d = 0; d < draws; ++d) {
      const std::vector<double> w0 = random_support_vector(rng, nn);
      const std::vector<double> w1 = random_support_vector(rng, nn);
      const std::vector<double> w2 = random_support_vector(rng, nn);
      const double whole = pm_value(profile, 0, w0, w1, w2);
      const auto [b_part, f_part] = split_P0(profile, w0, w1, w2);
      worst = std::max(worst,
                       std::abs(whole - b_part - f_part) / (1.0 + std::abs(whole)));
    }
    add_identity(checks, all_ok, "p0_split", "split_P0", draws, 1e-8, worst);
  }
  if (std::abs(cfg.k) == 1 && profile.constants.regime != Regime::Critical) {
    for (int m = 1; m <= 3; ++m) {
      double worst = 0.0;
      for (int d = 0; d < draws; ++d) {
        HardyFactors factors;
        factors.eta = random_support_vector(rng, nn);
        factors.xi = random_support_vector(rng, nn);
        factors.zeta = random_support_vector(rng, nn);
        const double lhs = pm_value_factors(profile, m, factors);
        const HardySplit split = hardy_split_Jm_Im(profile, m, factors);
        const double denom = 1.0 + std::abs(lhs);
        worst = std::max(worst, std::abs(lhs - split.j_m - split.i_m) / denom);
        worst = std::max(worst, std::abs(split.i_m - split.sos_i_m) / denom);
      }
      char name[32];
      std::snprintf(name, sizeof(name), "hardy_split_m%d", m);
      add_identity(checks, all_ok, name, "hardy_split_Jm_Im", draws, 1e-8, worst);
    }
  }
  if (std::abs(cfg.k) == 1) {
    double worst = -1.0;
    for (int d = 0; d < draws; ++d) {
      const std::vector<double> xi_n = random_support_vector(rng, nn);
      const std::vector<double> xi_kn = random_support_vector(rng, nn);
      const auto [lhs, rhs] = v2_lower_bound_check(profile, 2, xi_n, xi_kn);
      worst = std::max(worst, (rhs - lhs) / (1.0 + std::abs(lhs)));
    }
    add_identity(checks, all_ok, "v2_lower_bound_n2", "v2_lower_bound_check", draws, 1e-8,
                 worst);
  }
  (void)scale;
}

void check2d_section(const RunConfig& cfg, const Profile& profile, ordered_json& report,
                     ordered_json& checks, ordered_json& verdicts, bool& all_ok,
                     std::vector<std::string>* artifacts) {
  const int n_phi = 128;
  const int band = 6;
  const QTensorField qfield = reconstruct_Q(profile, n_phi);
  const PerturbationField pfield =
      random_perturbation(qfield.radii, n_phi, band, cfg.seed ^ 0xc2b2ae3d27d4eb4fULL);

  const double residual = el_residual(qfield, cfg.params());
  const ModeSumCheck msc = mode_sum_check(qfield, pfield, cfg.params());
  const double sum_disc = std::abs(msc.direct - msc.via_modes) / (1.0 + std::abs(msc.direct));

  PerturbationField in_plane = pfield;
  std::fill(in_plane.w[3].begin(), in_plane.w[3].end(), 0.0);
  std::fill(in_plane.w[4].begin(), in_plane.w[4].end(), 0.0);
  PerturbationField out_of_plane = pfield;
  for (int l = 0; l < 3; ++l)
    std::fill(out_of_plane.w[l].begin(), out_of_plane.w[l].end(), 0.0);
  const double whole = msc.direct;
  const double part1 = L_direct(qfield, in_plane, cfg.params());
  const double part2 = L_direct(qfield, out_of_plane, cfg.params());
  const double split_disc = std::abs(whole - part1 - part2) / (1.0 + std::abs(whole));

  ordered_json j;
  j["n_phi"] = n_phi;
  j["band_limit"] = band;
  j["el_residual"] = residual;
  j["l_direct"] = msc.direct;
  j["via_modes"] = msc.via_modes;
  report["check2d"] = std::move(j);

  add_identity(checks, all_ok, "mode_sum", "mode_sum_check", 1, 1e-8, sum_disc);
  add_identity(checks, all_ok, "v1_v2_split", "L_direct", 1, 1e-10, split_disc);
  add_verdict(verdicts, all_ok, "mode_sum_agreement", sum_disc <= 1e-8, "mode_sum_check", 1e-8,
              sum_disc);

  if (!cfg.out.empty()) {
    const std::string qpath = cfg.out + "/qtensor.csv";
    const std::string ppath = cfg.out + "/perturbation.csv";
    write_qtensor_csv(qpath, qfield);
    write_perturbation_csv(ppath, pfield);
    artifacts->push_back(qpath);
    artifacts->push_back(ppath);
  }
}

void uniqueness_section(const RunConfig& cfg, const RadialMesh& mesh, const BulkConstants& bc,
                        ordered_json& report, ordered_json& verdicts, bool& all_ok) {
  const UniquenessProbe probe = uniqueness_probe(cfg.params(), mesh, 8, cfg.seed);
  ordered_json j;
  j["distinct_count"] = probe.distinct_count;
  j["max_pairwise_deviation"] = probe.max_pairwise_deviation;
  j["n_converged"] = probe.n_converged;
  j["n_failed"] = probe.n_failed;
  j["energies"] = probe.energies;
  report["uniqueness"] = std::move(j);
  const double tol = 1e-8 * bc.s_plus;
  add_verdict(verdicts, all_ok, "uniqueness_cluster",
              probe.distinct_count == 1 && probe.max_pairwise_deviation <= tol,
              "uniqueness_probe", tol, probe.max_pairwise_deviation);
}

}  // namespace

void RunConfig::validate() const {
  params().validate();
  if (!whole_plane && !(radius > 0.0))
    throw std::invalid_argument("config: disk radius must be positive");
  if (whole_plane && r_eff < 0.0)
    throw std::invalid_argument("config: r_eff must be nonnegative");
  if (n_elements < 8) throw std::invalid_argument("config: n_elements must be at least 8");
  if (grading != "uniform" && grading != "geometric")
    throw std::invalid_argument("config: grading must be uniform or geometric");
  if (grading == "geometric" && !(grading_ratio >= 1.0))
    throw std::invalid_argument("config: grading ratio must be at least 1");
  if (!(tol > 0.0) || tol > 1e-2)
    throw std::invalid_argument("config: tol must lie in (0, 1e-2]");
  if (jobs < 1) throw std::invalid_argument("config: jobs must be positive");
  for (const std::string& a : analyses)
    if (std::find(kAnalyses.begin(), kAnalyses.end(), a) == kAnalyses.end())
      throw std::invalid_argument("config: unknown analysis '" + a + "'");
}

std::string serialize_config(const RunConfig& config) {
  return config_to_json(config).dump(2) + "\n";
}

RunConfig parse_config_json(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  if (!j.is_object()) throw std::invalid_argument("config: top level must be an object");
  RunConfig cfg;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "a2") cfg.a2 = value.get<double>();
      else if (key == "b2") cfg.b2 = value.get<double>();
      else if (key == "c2") cfg.c2 = value.get<double>();
      else if (key == "k") cfg.k = value.get<int>();
      else if (key == "whole_plane") cfg.whole_plane = value.get<bool>();
      else if (key == "radius") cfg.radius = value.get<double>();
      else if (key == "r_eff") cfg.r_eff = value.get<double>();
      else if (key == "n_elements") cfg.n_elements = value.get<int>();
      else if (key == "grading") cfg.grading = value.get<std::string>();
      else if (key == "grading_ratio") cfg.grading_ratio = value.get<double>();
      else if (key == "tol") cfg.tol = value.get<double>();
      else if (key == "analyses") cfg.analyses = value.get<std::vector<std::string>>();
      else if (key == "out") cfg.out = value.get<std::string>();
      else if (key == "seed") cfg.seed = value.get<std::uint64_t>();
      else if (key == "jobs") cfg.jobs = value.get<int>();
      else throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("config: ") + e.what());
  }
  return cfg;
}

RunOutcome run(const RunConfig& config) {
  config.validate();
  RunOutcome outcome;
  if (!config.out.empty()) std::filesystem::create_directories(config.out);

  ordered_json report;
  report["schema_version"] = kReportSchemaVersion;
  report["config"] = config_to_json(config);

  const BulkConstants bc = bulk_constants(config.params());
  const double scale = pencil_scale(bc, config.params());
  report["constants"] = ordered_json{{"s_plus", bc.s_plus},
                                     {"u_star", bc.u_star},
                                     {"v_star", bc.v_star},
                                     {"regime", regime_name(bc.regime)},
                                     {"scale", scale}};

  ordered_json timings = ordered_json::object();
  ordered_json spectra = ordered_json::object();
  ordered_json checks = ordered_json::array();
  ordered_json verdicts = ordered_json::object();
  bool all_ok = true;

  const RadialMesh mesh = run_stage(timings, "mesh", [&] { return make_mesh(config); });
  SolveOptions opts;
  opts.tol = config.tol;
  const Profile profile =
      run_stage(timings, "solve", [&] { return solve_profile(config.params(), mesh, opts); });

  report["profile"] = ordered_json{{"n_nodes", profile.n_nodes()},
                                   {"r_eff", profile.mesh.r_eff},
                                   {"u_boundary", profile.u_boundary},
                                   {"v_boundary", profile.v_boundary},
                                   {"residual_norm", profile.residual_norm},
                                   {"energy", profile.energy},
                                   {"newton_iterations", profile.newton_iterations},
                                   {"used_flow_fallback", profile.used_flow_fallback}};
  if (!config.out.empty()) {
    const std::string ppath = config.out + "/profile.csv";
    write_profile_csv(ppath, profile);
    outcome.artifacts.push_back(ppath);
  }

  if (wants(config, "diagnose"))
    run_stage(timings, "diagnose", [&] { diagnose_section(profile, bc, report, verdicts, all_ok); });
  if (wants(config, "stability"))
    run_stage(timings, "stability", [&] {
      stability_section(profile, scale, config.seed, spectra, checks, verdicts, all_ok);
    });
  if (wants(config, "modes"))
    run_stage(timings, "modes", [&] {
      modes_section(config, profile, mesh, scale, report, spectra, checks, verdicts, all_ok);
    });
  if (wants(config, "check2d"))
    run_stage(timings, "check2d", [&] {
      check2d_section(config, profile, report, checks, verdicts, all_ok, &outcome.artifacts);
    });
  if (wants(config, "uniqueness"))
    run_stage(timings, "uniqueness",
              [&] { uniqueness_section(config, mesh, bc, report, verdicts, all_ok); });

  if (!spectra.empty()) report["spectra"] = std::move(spectra);
  report["identity_checks"] = std::move(checks);
  report["verdicts"] = std::move(verdicts);
  report["timings"] = std::move(timings);

  outcome.all_verdicts_ok = all_ok;
  outcome.report_json = report.dump(2) + "\n";
  if (!config.out.empty()) {
    const std::string rpath = config.out + "/report.json";
    write_text(rpath, outcome.report_json);
    outcome.artifacts.insert(outcome.artifacts.begin(), rpath);
  }
  return outcome;
}

namespace {

std::string csv_field_double(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || !j[key].is_number()) return "";
  return format_double(j[key].get<double>());
}

std::string aggregate_row(double value, const std::string& report_json,
                          const std::string& error) {
  std::ostringstream row;
  row << format_double(value) << ',';
  if (!error.empty()) {
    std::string cleaned = error;
    std::replace(cleaned.begin(), cleaned.end(), ',', ';');
    std::replace(cleaned.begin(), cleaned.end(), '\n', ' ');
    row << "error,,,,,,," << cleaned << '\n';
    return row.str();
  }
  const nlohmann::json rep = nlohmann::json::parse(report_json);
  std::string lmin_radial, lmin_v1, lmin_v2, q1_hat, mono, kernel;
  if (rep.contains("spectra")) {
    const auto& spectra = rep["spectra"];
    if (spectra.contains("radial") && !spectra["radial"]["eigenvalues"].empty())
      lmin_radial = format_double(spectra["radial"]["eigenvalues"][0].get<double>());
    if (spectra.contains("scan")) {
      double v1 = 0.0, v2 = 0.0;
      bool have1 = false, have2 = false;
      for (const auto& e : spectra["scan"]["entries"]) {
        const double lm = e["lambda_min"].get<double>();
        if (e["sector"] == "V1") {
          v1 = have1 ? std::min(v1, lm) : lm;
          have1 = true;
        } else {
          v2 = have2 ? std::min(v2, lm) : lm;
          have2 = true;
        }
      }
      if (have1) lmin_v1 = format_double(v1);
      if (have2) lmin_v2 = format_double(v2);
    }
  }
  if (rep.contains("diagnostics")) {
    const auto& d = rep["diagnostics"];
    if (d["asymptotics_checked"].get<bool>()) q1_hat = csv_field_double(d, "q1_hat");
    const auto& m = d["monotonicity"];
    mono = m["u_ok"].get<bool>() && m["v_ok"].get<bool>() ? "ok" : "violated";
  }
  if (rep.contains("kernel")) kernel = csv_field_double(rep["kernel"], "rayleigh");
  row << "ok," << lmin_radial << ',' << lmin_v1 << ',' << lmin_v2 << ',' << q1_hat << ','
      << mono << ',' << kernel << ",\n";
  return row.str();
}

}  // namespace

SweepOutcome sweep(const RunConfig& base, const std::string& axis,
                   const std::vector<double>& values) {
  if (axis != "b2" && axis != "R" && axis != "k" && axis != "n_elements")
    throw std::invalid_argument("sweep: axis must be one of b2, R, k, n_elements");
  base.validate();

  SweepOutcome out;
  const std::size_t n = values.size();
  out.reports.assign(n, "");
  out.errors.assign(n, "");

  std::vector<RunConfig> configs(n, base);
  for (std::size_t i = 0; i < n; ++i) {
    RunConfig& cfg = configs[i];
    if (axis == "b2") {
      cfg.b2 = values[i];
    } else if (axis == "R") {
      if (cfg.whole_plane)
        cfg.r_eff = values[i];
      else
        cfg.radius = values[i];
    } else if (axis == "k") {
      cfg.k = static_cast<int>(std::llround(values[i]));
    } else {
      cfg.n_elements = static_cast<int>(std::llround(values[i]));
    }
    if (!base.out.empty()) {
      char sub[32];
      std::snprintf(sub, sizeof(sub), "/run_%03zu", i);
      cfg.out = base.out + sub;
    }
  }

  std::atomic<std::size_t> next{0};
  const int workers = std::max(1, std::min<int>(base.jobs, static_cast<int>(n == 0 ? 1 : n)));
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= n) return;
      try {
        out.reports[i] = run(configs[i]).report_json;
      } catch (const std::exception& e) {
        out.errors[i] = e.what();
      }
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int t = 0; t < workers; ++t) pool.emplace_back(worker);
    for (std::thread& t : pool) t.join();
  }

  std::ostringstream csv;
  csv << "value,status,lambda_min_radial,lambda_min_v1,lambda_min_v2,q1_hat,monotonicity,"
         "kernel_rayleigh,error\n";
  for (std::size_t i = 0; i < n; ++i)
    csv << aggregate_row(values[i], out.reports[i], out.errors[i]);
  out.aggregate_csv = csv.str();
  if (!base.out.empty()) {
    std::filesystem::create_directories(base.out);
    write_text(base.out + "/sweep.csv", out.aggregate_csv);
  }
  return out;
}

std::vector<std::string> validate_report(const std::string& report_json) {
  std::vector<std::string> problems;
  nlohmann::json rep;
  try {
    rep = nlohmann::json::parse(report_json);
  } catch (const nlohmann::json::exception& e) {
    problems.push_back(std::string("parse: ") + e.what());
    return problems;
  }
  const auto need = [&](const char* key, bool ok) {
    if (!ok) problems.push_back(std::string("missing or mistyped '") + key + "'");
  };
  need("schema_version", rep.contains("schema_version") && rep["schema_version"].is_string());
  if (problems.empty() && rep["schema_version"] != kReportSchemaVersion)
    problems.push_back("schema_version mismatch: " + rep["schema_version"].get<std::string>());
  need("config", rep.contains("config") && rep["config"].is_object());
  need("constants", rep.contains("constants") && rep["constants"].is_object());
  need("profile", rep.contains("profile") && rep["profile"].is_object());
  need("identity_checks", rep.contains("identity_checks") && rep["identity_checks"].is_array());
  need("verdicts", rep.contains("verdicts") && rep["verdicts"].is_object());
  need("timings", rep.contains("timings") && rep["timings"].is_object());
  if (!problems.empty()) return problems;

  try {
    parse_config_json(rep["config"].dump()).validate();
  } catch (const std::exception& e) {
    problems.push_back(std::string("config echo: ") + e.what());
  }
  for (const char* key : {"s_plus", "u_star", "v_star", "scale"})
    if (!rep["constants"].contains(key) || !rep["constants"][key].is_number())
      problems.push_back(std::string("constants missing '") + key + "'");
  if (!rep["constants"].contains("regime") || !rep["constants"]["regime"].is_string())
    problems.push_back("constants missing 'regime'");

  for (const auto& [name, v] : rep["verdicts"].items()) {
    if (!v.is_object() || !v.contains("ok") || !v["ok"].is_boolean() ||
        !v.contains("operation") || !v["operation"].is_string() || !v.contains("tolerance") ||
        !v["tolerance"].is_number() || !v.contains("value") || !v["value"].is_number())
      problems.push_back("verdict '" + name + "' lacks ok/operation/tolerance/value");
  }
  for (const auto& e : rep["identity_checks"]) {
    if (!e.is_object() || !e.contains("name") || !e.contains("operation") ||
        !e.contains("tolerance") || !e.contains("max_discrepancy") || !e.contains("ok")) {
      problems.push_back("identity check entry lacks name/operation/tolerance/discrepancy/ok");
      break;
    }
  }

  const auto analyses = rep["config"]["analyses"].get<std::vector<std::string>>();
  const auto has_analysis = [&](const char* a) {
    return std::find(analyses.begin(), analyses.end(), a) != analyses.end();
  };
  if (has_analysis("diagnose") && !rep.contains("diagnostics"))
    problems.push_back("diagnose requested but no diagnostics section");
  if (has_analysis("stability") &&
      (!rep.contains("spectra") || !rep["spectra"].contains("radial")))
    problems.push_back("stability requested but no radial spectrum");
  if (has_analysis("modes") && (!rep.contains("spectra") || !rep["spectra"].contains("scan")))
    problems.push_back("modes requested but no scan section");
  if (has_analysis("check2d") && !rep.contains("check2d"))
    problems.push_back("check2d requested but no check2d section");
  if (has_analysis("uniqueness") && !rep.contains("uniqueness"))
    problems.push_back("uniqueness requested but no uniqueness section");
  return problems;
}

}  // namespace defectlab
