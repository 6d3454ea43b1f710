#include <array>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "defectlab/errors.hpp"
#include "defectlab/report.hpp"

namespace {

using defectlab::RunConfig;

struct CommonOpts {
  double a2 = 0.0, b2 = 0.0, c2 = 0.0, r_eff = 0.0, grading_ratio = 0.0, tol = 0.0;
  int k = 0, n_elements = 0, jobs = 0;
  std::uint64_t seed = 0;
  std::string radius_text, grading, analyses_csv, out, config_path;

  CLI::Option* o_a2 = nullptr;
  CLI::Option* o_b2 = nullptr;
  CLI::Option* o_c2 = nullptr;
  CLI::Option* o_k = nullptr;
  CLI::Option* o_radius = nullptr;
  CLI::Option* o_r_eff = nullptr;
  CLI::Option* o_n_elements = nullptr;
  CLI::Option* o_grading = nullptr;
  CLI::Option* o_grading_ratio = nullptr;
  CLI::Option* o_tol = nullptr;
  CLI::Option* o_analyses = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_seed = nullptr;
  CLI::Option* o_jobs = nullptr;
  CLI::Option* o_config = nullptr;
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  o.o_config = cmd->add_option("--config", o.config_path, "JSON config file; flags override it");
  o.o_a2 = cmd->add_option("--a2", o.a2, "thermotropic coefficient a^2");
  o.o_b2 = cmd->add_option("--b2", o.b2, "cubic coupling b^2");
  o.o_c2 = cmd->add_option("--c2", o.c2, "quartic coupling c^2");
  o.o_k = cmd->add_option("--k", o.k, "winding number");
  o.o_radius = cmd->add_option("--radius", o.radius_text, "disk radius, or 'inf' for the plane");
  o.o_r_eff = cmd->add_option("--r-eff", o.r_eff, "truncation radius for --radius inf");
  o.o_n_elements = cmd->add_option("--n-elements", o.n_elements, "radial element count");
  o.o_grading = cmd->add_option("--grading", o.grading, "mesh grading: uniform or geometric");
  o.o_grading_ratio = cmd->add_option("--grading-ratio", o.grading_ratio,
                                      "geometric element growth ratio");
  o.o_tol = cmd->add_option("--tol", o.tol, "nonlinear solve tolerance");
  o.o_analyses = cmd->add_option("--analyses", o.analyses_csv,
                                 "comma-separated analyses (overrides the subcommand default)");
  o.o_out = cmd->add_option("--out", o.out, "artifact directory");
  o.o_seed = cmd->add_option("--seed", o.seed, "seed for randomized probes");
  o.o_jobs = cmd->add_option("--jobs", o.jobs, "concurrent runs in a sweep");
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::vector<std::string> split_csv(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string tok;
  while (std::getline(ss, tok, ','))
    if (!tok.empty()) parts.push_back(tok);
  return parts;
}

void apply_radius(RunConfig& cfg, const std::string& text) {
  if (text == "inf") {
    cfg.whole_plane = true;
    return;
  }
  std::size_t used = 0;
  double r = 0.0;
  try {
    r = std::stod(text, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("bad --radius value '" + text + "'");
  }
  if (used != text.size()) throw std::invalid_argument("bad --radius value '" + text + "'");
  cfg.whole_plane = false;
  cfg.radius = r;
}

RunConfig build_config(const CommonOpts& o, const std::string& default_analysis, bool is_sweep) {
  RunConfig cfg;
  if (o.o_config->count()) cfg = defectlab::parse_config_json(read_file(o.config_path));
  if (!is_sweep) {
    cfg.analyses.clear();
    if (!default_analysis.empty()) cfg.analyses = {default_analysis};
  }
  if (o.o_a2->count()) cfg.a2 = o.a2;
  if (o.o_b2->count()) cfg.b2 = o.b2;
  if (o.o_c2->count()) cfg.c2 = o.c2;
  if (o.o_k->count()) cfg.k = o.k;
  if (o.o_radius->count()) apply_radius(cfg, o.radius_text);
  if (o.o_r_eff->count()) cfg.r_eff = o.r_eff;
  if (o.o_n_elements->count()) cfg.n_elements = o.n_elements;
  if (o.o_grading->count()) cfg.grading = o.grading;
  if (o.o_grading_ratio->count()) cfg.grading_ratio = o.grading_ratio;
  if (o.o_tol->count()) cfg.tol = o.tol;
  if (o.o_analyses->count()) cfg.analyses = split_csv(o.analyses_csv);
  if (o.o_out->count()) cfg.out = o.out;
  if (o.o_seed->count()) cfg.seed = o.seed;
  if (o.o_jobs->count()) cfg.jobs = o.jobs;
  return cfg;
}

int dispatch(const RunConfig& cfg, bool is_sweep, const std::string& axis,
             const std::vector<double>& values) {
  if (is_sweep) {
    const defectlab::SweepOutcome outcome = defectlab::sweep(cfg, axis, values);
    std::cout << outcome.aggregate_csv;
    for (std::size_t i = 0; i < outcome.errors.size(); ++i)
      if (!outcome.errors[i].empty())
        std::cerr << "run " << i << " failed: " << outcome.errors[i] << "\n";
    return 0;
  }
  const defectlab::RunOutcome outcome = defectlab::run(cfg);
  std::cout << outcome.report_json;
  if (!outcome.all_verdicts_ok) std::cerr << "verdict: fail (see report)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radially symmetric nematic defect profiles: solve, diagnose, and stability checks"};
  app.require_subcommand(1);

  std::string axis;
  std::vector<double> values;

  struct Sub {
    const char* name;
    const char* help;
    const char* analysis;  // empty = plain solve
  };
  const Sub subs[] = {
      {"solve", "solve the radial profile and report it", ""},
      {"diagnose", "solve plus qualitative profile checks", "diagnose"},
      {"stability", "solve plus the radial second-variation spectrum", "stability"},
      {"modes", "solve plus the azimuthal mode scan", "modes"},
      {"check2d", "solve plus the 2-D reconstruction cross checks", "check2d"},
      {"uniqueness", "solve from multiple starts and cluster the results", "uniqueness"},
  };
  std::array<CommonOpts, 7> all_opts;
  std::array<CLI::App*, 7> cmds{};
  for (std::size_t i = 0; i < 6; ++i) {
    cmds[i] = app.add_subcommand(subs[i].name, subs[i].help);
    add_common(cmds[i], all_opts[i]);
  }

  CLI::App* sweep_cmd = app.add_subcommand("sweep", "independent runs along one parameter axis");
  cmds[6] = sweep_cmd;
  add_common(sweep_cmd, all_opts[6]);
  sweep_cmd->add_option("--axis", axis, "one of b2, R, k, n_elements")->required();
  sweep_cmd->add_option("--values", values, "axis values")->delimiter(',');

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    const CLI::App* active = app.get_subcommands().front();
    std::size_t idx = 6;
    std::string default_analysis;
    for (std::size_t i = 0; i < 6; ++i)
      if (active == cmds[i]) {
        idx = i;
        default_analysis = subs[i].analysis;
      }
    const bool is_sweep = active == sweep_cmd;
    const RunConfig cfg = build_config(all_opts[idx], default_analysis, is_sweep);
    return dispatch(cfg, is_sweep, axis, values);
  } catch (const defectlab::NonConvergenceError& e) {
    std::cerr << "non-convergence: " << e.what() << "\n";
    return 3;
  } catch (const defectlab::CriticalRegimeError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 4;
  }
}
