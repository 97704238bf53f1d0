// SPDX-License-Identifier: Apache-2.0
#include "molspec/cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <limits>
#include <fstream>
#include <iostream>
#include <sstream>

#include "molspec/report_io.hpp"
#include "molspec/separable_robin.hpp"

namespace molspec {

namespace {

SigmaProfile parse_sigma(const std::string& text) {
  if (text == "inf" || text == "INF" || text == "infinite") return SigmaProfile::infinite();
  if (text.rfind("pw:", 0) == 0) {
    // pw:v0@b0,v1@b1,...,vn  (value applies below its breakpoint; last has none)
    std::vector<double> values, breakpoints;
    std::stringstream ss(text.substr(3));
    std::string item;
    while (std::getline(ss, item, ',')) {
      const auto at = item.find('@');
      values.push_back(std::stod(item.substr(0, at)));
      if (at != std::string::npos) breakpoints.push_back(std::stod(item.substr(at + 1)));
    }
    return SigmaProfile::piecewise(std::move(breakpoints), std::move(values));
  }
  return SigmaProfile::constant(std::stod(text));
}

std::vector<double> parse_doubles(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.push_back(std::stod(item));
  return out;
}

std::vector<int> parse_ints(const std::string& text) {
  std::vector<int> out;
  for (double v : parse_doubles(text)) out.push_back(static_cast<int>(v));
  return out;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (path != "-") {
      file_.open(path);
      if (!file_) throw std::invalid_argument("cannot open output file: " + path);
    }
  }
  std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

void emit(Output& out, const Json& report) { out.stream() << report.dump() << '\n'; }

class StopWatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

struct CommonStrip {
  double d = 1.0;
  double L = 8.0;
  int M = 32;
  std::string sigma = "0";
  double tau = -1;
};

void add_strip_options(CLI::App* cmd, CommonStrip& s) {
  cmd->add_option("--d", s.d, "molecule width");
  cmd->add_option("--L", s.L, "truncation length");
  cmd->add_option("--M", s.M, "cells across the strip width (pitch d/M)");
  cmd->add_option("--sigma", s.sigma, "interaction strength: number, 'inf', or pw:v0@b0,...,vn");
  cmd->add_option("--tau", s.tau, "classification safety margin (default 5% of the bottom)");
}

AtomConfiguration resolve_atoms(const std::string& atoms, double nu, double horizon,
                                std::uint64_t seed, std::uint64_t stream) {
  if (!atoms.empty()) return AtomConfiguration::explicit_atoms(parse_doubles(atoms));
  if (nu > 0) return sample_configuration(nu, horizon, seed, stream);
  return AtomConfiguration::explicit_atoms({});
}

int run_replay(const std::string& path, int jobs);

}  // namespace

int cli_main(int argc, const char* const* argv) {
  CLI::App app{"molspec: spectral laboratory for a two-particle molecule with random contact lines"};
  app.require_subcommand(1);
  app.set_config("--config", "", "flat key-value defaults, overridden by flags");
  app.allow_config_extras(false);

  // ---- sample ----
  auto* sample = app.add_subcommand("sample", "draw one atom configuration");
  struct {
    double nu = 1.0, horizon = 0, d = 1.0, L = 8.0;
    std::uint64_t seed = 0, stream = 0;
    std::string out = "-";
  } smp;
  sample->add_option("--nu", smp.nu, "Poisson intensity")->required();
  sample->add_option("--horizon", smp.horizon, "sampling horizon (default L + d)");
  sample->add_option("--d", smp.d, "molecule width");
  sample->add_option("--L", smp.L, "truncation length");
  sample->add_option("--seed", smp.seed, "master seed");
  sample->add_option("--stream", smp.stream, "stream index");
  sample->add_option("--out", smp.out, "output path ('-' for stdout)");

  // ---- solve ----
  auto* solve = app.add_subcommand("solve", "one ground-state run");
  struct {
    CommonStrip strip;
    std::string atoms;
    double nu = 0;
    std::uint64_t seed = 0, stream = 0;
    int m = 1;
    double tol = 1e-10;
    std::string out = "-", csv, dump_matrices, dump_mesh;
  } slv;
  add_strip_options(solve, slv.strip);
  solve->add_option("--atoms", slv.atoms, "explicit atom positions a1,a2,...");
  solve->add_option("--nu", slv.nu, "sample atoms from a Poisson process instead");
  solve->add_option("--seed", slv.seed, "master seed");
  solve->add_option("--stream", slv.stream, "stream index");
  solve->add_option("--m", slv.m, "number of eigenpairs");
  solve->add_option("--tol", slv.tol, "residual tolerance");
  solve->add_option("--out", slv.out, "output path");
  solve->add_option("--csv", slv.csv, "also write a summary CSV");
  solve->add_option("--dump-matrices", slv.dump_matrices, "write K/M/T in coordinate format");
  solve->add_option("--dump-mesh", slv.dump_mesh, "write the mesh as JSON");

  // ---- mc ----
  auto* mc = app.add_subcommand("mc", "Monte-Carlo classification of the discrete spectrum");
  struct {
    CommonStrip strip{1.0, 6.0, 16, "0", -1};
    double nu = 1.0;
    int n = 200, jobs = 1;
    std::uint64_t seed = 0;
    std::string out = "-", csv;
  } mcp;
  add_strip_options(mc, mcp.strip);
  mc->add_option("--nu", mcp.nu, "Poisson intensity")->required();
  mc->add_option("--n", mcp.n, "number of samples");
  mc->add_option("--seed", mcp.seed, "master seed");
  mc->add_option("--jobs", mcp.jobs, "worker threads (output independent of this)");
  mc->add_option("--out", mcp.out, "output path");
  mc->add_option("--csv", mcp.csv, "also write a summary CSV");

  // ---- converge ----
  auto* conv = app.add_subcommand("converge", "truncation/refinement convergence study");
  struct {
    double d = 1.0;
    std::string sigma = "0", atoms, L_list = "4,6,8", M_list = "8,16,32";
    double nu = 0, eps = 0.5;
    std::uint64_t seed = 0, stream = 0;
    std::string out = "-";
  } cvg;
  conv->add_option("--d", cvg.d, "molecule width");
  conv->add_option("--sigma", cvg.sigma, "interaction strength");
  conv->add_option("--atoms", cvg.atoms, "explicit atom positions");
  conv->add_option("--nu", cvg.nu, "sample atoms instead");
  conv->add_option("--seed", cvg.seed, "master seed");
  conv->add_option("--stream", cvg.stream, "stream index");
  conv->add_option("--L-list", cvg.L_list, "truncation lengths");
  conv->add_option("--M-list", cvg.M_list, "refinements");
  conv->add_option("--eps", cvg.eps, "half-width for the eigenvalue counts");
  conv->add_option("--out", cvg.out, "output path");

  // ---- gamma ----
  auto* gamma = app.add_subcommand("gamma", "destruction threshold estimate");
  struct {
    double d = 1.0, eta = 1.05, delta = -1;
    int na = 9, tri_cells = 24;
    std::string out = "-";
  } gam;
  gamma->add_option("--d", gam.d, "molecule width");
  gamma->add_option("--eta", gam.eta, "window shape parameter (> 1)");
  gamma->add_option("--delta", gam.delta, "window offset (default 0.02 d)");
  gamma->add_option("--na", gam.na, "atom-window grid points");
  gamma->add_option("--tri-cells", gam.tri_cells, "triangle mesh cells per leg");
  gamma->add_option("--out", gam.out, "output path");

  // ---- appendix ----
  auto* appendix = app.add_subcommand("appendix", "rectangle-scaling property harness");
  struct {
    int trials = 1000;
    std::uint64_t seed = 7;
    bool mu_table = false;
    double d = 1.0, eta = 1.05, delta = -1;
    std::string out = "-";
  } apx;
  appendix->add_option("--trials", apx.trials, "randomized trials per property");
  appendix->add_option("--seed", apx.seed, "trial seed");
  appendix->add_flag("--mu-table", apx.mu_table, "also print the closed-form anchor table");
  appendix->add_option("--d", apx.d, "molecule width for the anchor table");
  appendix->add_option("--eta", apx.eta, "anchor table eta");
  appendix->add_option("--delta", apx.delta, "anchor table delta (default 0.02 d)");
  appendix->add_option("--out", apx.out, "output path");

  // ---- mesh-dump ----
  auto* meshdump = app.add_subcommand("mesh-dump", "debug export of a mesh as JSON");
  struct {
    std::string domain = "strip";
    double d = 1.0, L = 4.0, a = 0.25, gamma = 1.0;
    int M = 8, cells = 8;
    std::string atoms, out = "-";
  } msh;
  meshdump->add_option("--domain", msh.domain, "strip|square|triangle|trapezoid|halfcross");
  meshdump->add_option("--d", msh.d, "molecule width");
  meshdump->add_option("--L", msh.L, "truncation length (strip)");
  meshdump->add_option("--M", msh.M, "cells across the width (strip)");
  meshdump->add_option("--atoms", msh.atoms, "atom positions (strip)");
  meshdump->add_option("--a", msh.a, "dissection parameter (comparison domains)");
  meshdump->add_option("--gamma", msh.gamma, "Robin constant (comparison domains)");
  meshdump->add_option("--cells", msh.cells, "cells along the short feature");
  meshdump->add_option("--out", msh.out, "output path");

  // ---- replay ----
  auto* replay = app.add_subcommand("replay", "re-run reports and compare bit-for-bit");
  struct {
    std::string path;
    int jobs = 1;
  } rpl;
  replay->add_option("file", rpl.path, "JSON-lines report file")->required();
  replay->add_option("--jobs", rpl.jobs, "worker threads for mc summaries");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*sample) {
      const double horizon = smp.horizon > 0 ? smp.horizon : smp.L + smp.d;
      const AtomConfiguration cfg = sample_configuration(smp.nu, horizon, smp.seed, smp.stream);
      Output out(smp.out);
      Json j = to_json(cfg);
      j["schema"] = kReportSchemaVersion;
      j["experiment"] = "sample";
      j["stream_seed"] = derive_stream(smp.seed, smp.stream);
      emit(out, j);
      return 0;
    }

    if (*solve) {
      StopWatch watch;
      const StripSpec spec(slv.strip.d, slv.strip.L, slv.strip.M);
      const AtomConfiguration cfg =
          resolve_atoms(slv.atoms, slv.nu, slv.strip.L + slv.strip.d, slv.seed, slv.stream);
      const SigmaAssignment sigma = SigmaAssignment::uniform(parse_sigma(slv.strip.sigma));
      SolveOptions opt;
      opt.m = slv.m;
      opt.tol = slv.tol;
      const double tau = slv.strip.tau >= 0 ? slv.strip.tau : default_tau(slv.strip.d);

      const SnapResult snap = snap_atoms(cfg.atoms, spec.pitch());
      const TriMesh mesh = build_strip_mesh(spec, snap.atoms);
      if (!slv.dump_mesh.empty()) {
        Output mout(slv.dump_mesh);
        emit(mout, mesh_report(mesh));
      }
      if (!slv.dump_matrices.empty()) {
        const AssembledForms forms =
            assemble_hamiltonian(mesh, sigma.merged(snap.merged_index, snap.atoms.size()));
        auto dump = [&](const std::string& name, const SparseMat& A) {
          std::ofstream os(slv.dump_matrices + "." + name + ".mtx");
          write_matrix_market(os, A);
        };
        dump("K", forms.K);
        dump("M", forms.M);
        for (std::size_t i = 0; i < forms.T.size(); ++i) dump("T" + std::to_string(i), forms.T[i]);
      }

      const GroundStateResult gs = ground_state(spec, cfg, sigma, opt);
      const Json report = solve_report(gs, sigma, tau, watch.seconds());
      Output out(slv.out);
      emit(out, report);
      if (!slv.csv.empty()) {
        std::ofstream csv(slv.csv);
        csv << csv_header() << '\n' << csv_row(report) << '\n';
      }
      std::cerr << "# solve: E0=" << gs.e0() << " n_dof=" << gs.spectral.n_dof << " ("
                << watch.seconds() << " s)\n";
      return 0;
    }

    if (*mc) {
      StopWatch watch;
      McParams params;
      params.nu = mcp.nu;
      params.d = mcp.strip.d;
      params.L = mcp.strip.L;
      params.M = mcp.strip.M;
      params.n_samples = mcp.n;
      params.master_seed = mcp.seed;
      params.tau = mcp.strip.tau;
      params.jobs = mcp.jobs;
      const SigmaAssignment sigma = SigmaAssignment::uniform(parse_sigma(mcp.strip.sigma));
      const McResult result = mc_probability(params, sigma);

      Output out(mcp.out);
      for (const auto& s : result.samples) emit(out, mc_sample_report(result, s));
      const Json summary = mc_summary_report(result);
      emit(out, summary);
      if (!mcp.csv.empty()) {
        std::ofstream csv(mcp.csv);
        csv << csv_header() << '\n';
        for (const auto& s : result.samples) csv << csv_row(mc_sample_report(result, s)) << '\n';
        csv << csv_row(summary) << '\n';
      }
      std::cerr << "# mc: NONEMPTY=" << result.n_nonempty << " EMPTY=" << result.n_empty
                << " UNDECIDED=" << result.n_undecided << " (" << watch.seconds() << " s)\n";
      return 0;
    }

    if (*conv) {
      const AtomConfiguration cfg = resolve_atoms(
          cvg.atoms, cvg.nu, parse_doubles(cvg.L_list).back() + cvg.d, cvg.seed, cvg.stream);
      const SigmaAssignment sigma = SigmaAssignment::uniform(parse_sigma(cvg.sigma));
      const ConvergenceStudy study = convergence_study(cvg.d, cfg, sigma, parse_doubles(cvg.L_list),
                                                       parse_ints(cvg.M_list), cvg.eps);
      Output out(cvg.out);
      emit(out, convergence_report(cvg.d, study, sigma));
      return 0;
    }

    if (*gamma) {
      const ThresholdEstimate est =
          estimate_gamma(gam.d, gam.eta, gam.delta, gam.na, gam.tri_cells);
      Output out(gam.out);
      emit(out, threshold_report(est));
      return 0;
    }

    if (*appendix) {
      const PropertyCheck up = check_prop_scaling_up(apx.trials, apx.seed);
      const PropertyCheck mixed = check_prop_scaling_mixed(apx.trials, apx.seed);
      Output out(apx.out);
      emit(out, appendix_report(up, mixed, apx.seed));
      if (apx.mu_table) {
        const double d = apx.d;
        const double delta = apx.delta > 0 ? apx.delta : 0.02 * d;
        const double inf = std::numeric_limits<double>::infinity();
        emit(out, Json{{"schema", kReportSchemaVersion},
                       {"experiment", "mu_table"},
                       {"d", d},
                       {"eta", apx.eta},
                       {"delta", delta},
                       {"mu1_square_dirichlet", mu_square(d / 2, inf)},
                       {"mu_hat3_dirichlet", mu_hat3(d / 2 - delta, inf, d)},
                       {"mu2_triangle_dirichlet", mu_triangle_dirichlet_limit(apx.eta, delta, d)},
                       {"essential_bottom", essential_bottom(d)}});
      }
      std::cerr << "# appendix: scaling-up violations: " << up.violations
                << ", mixed violations: " << mixed.violations << "\n";
      return up.violations == 0 && mixed.violations == 0 ? 0 : 3;
    }

    if (*meshdump) {
      TriMesh mesh;
      if (msh.domain == "strip") {
        const StripSpec spec(msh.d, msh.L, msh.M);
        const SnapResult snap = snap_atoms(parse_doubles(msh.atoms), spec.pitch());
        mesh = build_strip_mesh(spec, snap.atoms);
      } else if (msh.domain == "square") {
        mesh = build_polygon_mesh(make_square_robin(msh.a, msh.gamma, msh.a / msh.cells));
      } else if (msh.domain == "triangle") {
        const double legs = msh.d - 2 * msh.a;
        mesh = build_polygon_mesh(make_corner_triangle(legs, msh.gamma, legs / msh.cells));
      } else if (msh.domain == "trapezoid") {
        mesh = build_polygon_mesh(make_trapezoid(msh.d, msh.a, msh.gamma, msh.a / msh.cells));
      } else if (msh.domain == "halfcross") {
        mesh = build_polygon_mesh(make_half_cross(msh.d, msh.a, msh.gamma, msh.a / msh.cells));
      } else {
        throw std::invalid_argument("mesh-dump: unknown domain " + msh.domain);
      }
      Output out(msh.out);
      emit(out, mesh_report(mesh));
      return 0;
    }

    if (*replay) return run_replay(rpl.path, rpl.jobs);
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}

namespace {

AtomConfiguration config_from_json(const Json& j) {
  AtomConfiguration cfg;
  cfg.nu = j.at("nu").get<double>();
  cfg.horizon = j.at("horizon").get<double>();
  cfg.master_seed = j.at("master_seed").get<std::uint64_t>();
  cfg.stream_index = j.at("stream_index").get<std::uint64_t>();
  cfg.atoms = j.at("atoms").get<std::vector<double>>();
  return cfg;
}

SigmaAssignment assignment_from_json(const Json& j) {
  if (j.at("kind") == "list") {
    std::vector<SigmaProfile> profiles;
    for (const auto& p : j.at("profiles")) profiles.push_back(sigma_profile_from_json(p));
    return SigmaAssignment::list(std::move(profiles));
  }
  return SigmaAssignment::uniform(sigma_profile_from_json(j));
}

// bit-for-bit comparison through the shortest-round-trip serialization
bool same_numbers(const Json& a, const Json& b) { return a.dump() == b.dump(); }

bool replay_line(const Json& j, int jobs, std::ostream& log) {
  const std::string kind = j.at("experiment").get<std::string>();
  if (kind == "solve") {
    const StripSpec spec(j.at("d").get<double>(), j.at("L").get<double>(), j.at("M").get<int>());
    AtomConfiguration cfg = config_from_json(j.at("config"));
    if (cfg.nu > 0)
      cfg = sample_configuration(cfg.nu, cfg.horizon, cfg.master_seed, cfg.stream_index);
    SolveOptions opt;
    opt.m = static_cast<int>(j.at("eigenvalues").size());
    const GroundStateResult gs = ground_state(spec, cfg, assignment_from_json(j.at("sigma")), opt);
    const Json fresh = solve_report(gs, assignment_from_json(j.at("sigma")),
                                    j.at("tau").get<double>());
    const bool ok = same_numbers(fresh.at("eigenvalues"), j.at("eigenvalues"));
    log << "replay solve: " << (ok ? "match" : "MISMATCH") << '\n';
    return ok;
  }
  if (kind == "mc_sample") {
    const StripSpec spec(j.at("d").get<double>(), j.at("L").get<double>(), j.at("M").get<int>());
    const AtomConfiguration cfg =
        sample_configuration(j.at("nu").get<double>(), j.at("horizon").get<double>(),
                             j.at("master_seed").get<std::uint64_t>(),
                             j.at("stream_index").get<std::uint64_t>());
    const GroundStateResult gs = ground_state(spec, cfg, assignment_from_json(j.at("sigma")), {});
    const bool ok = same_numbers(Json(gs.e0()), j.at("e0"));
    log << "replay mc_sample " << j.at("index") << ": " << (ok ? "match" : "MISMATCH") << '\n';
    return ok;
  }
  if (kind == "mc_summary") {
    McParams params;
    params.nu = j.at("nu").get<double>();
    params.d = j.at("d").get<double>();
    params.L = j.at("L").get<double>();
    params.M = j.at("M").get<int>();
    params.n_samples = j.at("n").get<int>();
    params.master_seed = j.at("master_seed").get<std::uint64_t>();
    params.tau = j.at("tau").get<double>();
    params.jobs = jobs;
    const McResult result = mc_probability(params, assignment_from_json(j.at("sigma")));
    const bool ok = same_numbers(mc_summary_report(result), j);
    log << "replay mc_summary: " << (ok ? "match" : "MISMATCH") << '\n';
    return ok;
  }
  log << "replay: skipping '" << kind << "' (no replayable inputs)\n";
  return true;
}

int run_replay(const std::string& path, int jobs) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open replay file: " + path);
  std::string line;
  bool all_ok = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    all_ok = replay_line(Json::parse(line), jobs, std::cerr) && all_ok;
  }
  if (!all_ok) {
    std::cerr << "replay: at least one report failed to reproduce\n";
    return 3;
  }
  return 0;
}

}  // namespace

}  // namespace molspec
