// SPDX-License-Identifier: Apache-2.0
#include "molspec/report_io.hpp"

#include <sstream>

namespace molspec {

Json to_json(const SigmaProfile& profile) {
  switch (profile.kind) {
    case SigmaProfile::Kind::Constant:
      return Json{{"kind", "constant"}, {"value", profile.value}};
    case SigmaProfile::Kind::Piecewise:
      return Json{{"kind", "piecewise"},
                  {"breakpoints", profile.breakpoints},
                  {"values", profile.values}};
    case SigmaProfile::Kind::Infinite:
      return Json{{"kind", "infinite"}};
  }
  return {};
}

SigmaProfile sigma_profile_from_json(const Json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "constant") return SigmaProfile::constant(j.at("value").get<double>());
  if (kind == "piecewise")
    return SigmaProfile::piecewise(j.at("breakpoints").get<std::vector<double>>(),
                                   j.at("values").get<std::vector<double>>());
  if (kind == "infinite") return SigmaProfile::infinite();
  throw std::invalid_argument("unknown sigma kind: " + kind);
}

std::string sigma_label(const SigmaProfile& profile) {
  switch (profile.kind) {
    case SigmaProfile::Kind::Constant: {
      std::ostringstream os;
      os << profile.value;
      return os.str();
    }
    case SigmaProfile::Kind::Piecewise: {
      std::ostringstream os;
      os << "pw";
      for (std::size_t i = 0; i < profile.values.size(); ++i) {
        os << (i ? "," : ":") << profile.values[i];
        if (i < profile.breakpoints.size()) os << "@" << profile.breakpoints[i];
      }
      return os.str();
    }
    case SigmaProfile::Kind::Infinite: return "inf";
  }
  return "?";
}

Json to_json(const AtomConfiguration& config) {
  return Json{{"nu", config.nu},
              {"horizon", config.horizon},
              {"master_seed", config.master_seed},
              {"stream_index", config.stream_index},
              {"atoms", config.atoms}};
}

namespace {

Json sigma_json(const SigmaAssignment& sigma) {
  if (sigma.per_atom.empty()) return to_json(sigma.common);
  Json list = Json::array();
  for (const auto& p : sigma.per_atom) list.push_back(to_json(p));
  return Json{{"kind", "list"}, {"profiles", list}};
}

}  // namespace

Json solve_report(const GroundStateResult& gs, const SigmaAssignment& sigma, double tau,
                  double wall_seconds) {
  const SpectrumClass cls = classify_discrete(gs.e0(), gs.error_bar, gs.spec.d, tau);
  Json j{{"schema", kReportSchemaVersion},
         {"experiment", "solve"},
         {"d", gs.spec.d},
         {"L", gs.spec.L},
         {"M", gs.spec.M},
         {"sigma", sigma_json(sigma)},
         {"config", to_json(gs.config)},
         {"snapped_atoms", gs.snapped_atoms},
         {"snap_error", gs.snap_error},
         {"tau", tau},
         {"method", to_string(gs.spectral.method)},
         {"iterations", gs.spectral.iterations},
         {"n_dof", gs.spectral.n_dof},
         {"eigenvalues", gs.spectral.eigenvalues},
         {"residuals", gs.spectral.residuals},
         {"error_bounds", gs.spectral.value_error_bounds},
         {"e0", gs.e0()},
         {"error_bar", gs.error_bar},
         {"essential_bottom", essential_bottom(gs.spec.d)},
         {"classification", to_string(cls)}};
  if (cls == SpectrumClass::Empty)
    j["caveat"] = "computed eigenvalues are upper bounds under Dirichlet truncation; "
                  "EMPTY is advisory, not a certificate";
  if (wall_seconds >= 0) j["wall_seconds"] = wall_seconds;
  return j;
}

Json mc_sample_report(const McResult& mc, const McSample& sample) {
  Json j{{"schema", kReportSchemaVersion},
         {"experiment", "mc_sample"},
         {"index", sample.index},
         {"master_seed", mc.params.master_seed},
         {"stream_index", sample.index},
         {"stream_seed", sample.stream_seed},
         {"nu", mc.params.nu},
         {"d", mc.params.d},
         {"L", mc.params.L},
         {"M", mc.params.M},
         {"horizon", mc.params.L + mc.params.d},
         {"sigma", sigma_json(mc.sigma)},
         {"tau", mc.params.tau},
         {"atoms", sample.atoms},
         {"snapped_atoms", sample.snapped_atoms},
         {"e0", sample.e0},
         {"error_bar", sample.error_bar},
         {"n_dof", sample.n_dof},
         {"iterations", sample.iterations},
         {"classification", to_string(sample.classification)},
         {"solver_failed", sample.solver_failed}};
  if (sample.solver_failed) j["failure"] = sample.failure;
  return j;
}

Json mc_summary_report(const McResult& mc) {
  const int n = mc.params.n_samples;
  auto ci = [](const WilsonInterval& w) { return Json::array({w.lo, w.hi}); };
  return Json{{"schema", kReportSchemaVersion},
              {"experiment", "mc_summary"},
              {"nu", mc.params.nu},
              {"d", mc.params.d},
              {"L", mc.params.L},
              {"M", mc.params.M},
              {"sigma", sigma_json(mc.sigma)},
              {"tau", mc.params.tau},
              {"n", n},
              {"master_seed", mc.params.master_seed},
              {"counts",
               {{"NONEMPTY", mc.n_nonempty}, {"EMPTY", mc.n_empty}, {"UNDECIDED", mc.n_undecided}}},
              {"p_hat",
               {{"NONEMPTY", double(mc.n_nonempty) / n},
                {"EMPTY", double(mc.n_empty) / n},
                {"UNDECIDED", double(mc.n_undecided) / n}}},
              {"wilson_ci",
               {{"NONEMPTY", ci(mc.ci_nonempty)},
                {"EMPTY", ci(mc.ci_empty)},
                {"UNDECIDED", ci(mc.ci_undecided)}}},
              {"z", 1.959963984540054}};
}

Json convergence_report(double d, const ConvergenceStudy& study, const SigmaAssignment& sigma) {
  Json rows = Json::array();
  for (const auto& r : study.rows)
    rows.push_back(Json{{"L", r.L},
                        {"M", r.M},
                        {"e0", r.e0},
                        {"count_below_lo", r.count_below_lo},
                        {"count_below_hi", r.count_below_hi}});
  return Json{{"schema", kReportSchemaVersion},
              {"experiment", "converge"},
              {"d", d},
              {"sigma", sigma_json(sigma)},
              {"L_list", study.L_list},
              {"M_list", study.M_list},
              {"count_epsilon", study.count_epsilon},
              {"rows", rows},
              {"extrapolated", study.extrapolated},
              {"error_bar", study.error_bar},
              {"slope", study.slope},
              {"monotone_in_L", study.monotone_in_L},
              {"monotone_in_M", study.monotone_in_M},
              {"essential_bottom", essential_bottom(d)}};
}

Json threshold_report(const ThresholdEstimate& est) {
  return Json{{"schema", kReportSchemaVersion},
              {"experiment", "gamma"},
              {"d", est.d},
              {"eta", est.eta},
              {"delta", est.delta},
              {"a_grid", est.a_grid},
              {"gamma_hat", est.gamma_hat},
              {"margins", est.margins},
              {"margins_at_half", est.margins_at_half},
              {"essential_bottom", essential_bottom(est.d)}};
}

Json appendix_report(const PropertyCheck& up, const PropertyCheck& mixed, std::uint64_t seed) {
  return Json{{"schema", kReportSchemaVersion},
              {"experiment", "appendix"},
              {"seed", seed},
              {"scaling_up",
               {{"trials", up.trials}, {"violations", up.violations}, {"max_violation", up.max_violation}}},
              {"scaling_mixed",
               {{"trials", mixed.trials},
                {"violations", mixed.violations},
                {"max_violation", mixed.max_violation}}}};
}

Json mesh_report(const TriMesh& mesh) {
  Json nodes = Json::array();
  for (const auto& p : mesh.nodes) nodes.push_back(Json::array({p.x, p.y}));
  Json tris = Json::array();
  for (const auto& t : mesh.triangles) tris.push_back(Json::array({t[0], t[1], t[2]}));
  Json groups = Json::array();
  for (const auto& g : mesh.groups) {
    Json chains = Json::array();
    for (const auto& chain : g.chains) {
      Json edges = Json::array();
      for (const auto& e : chain) edges.push_back(Json::array({e[0], e[1]}));
      chains.push_back(edges);
    }
    Json jg{{"tag", to_string(g.kind)}, {"index", g.index}, {"chains", chains}};
    if (g.kind == BoundaryKind::Robin) jg["robin_gamma"] = g.robin_gamma;
    groups.push_back(jg);
  }
  return Json{{"schema", kReportSchemaVersion},
              {"experiment", "mesh"},
              {"pitch", mesh.pitch},
              {"nodes", nodes},
              {"triangles", tris},
              {"groups", groups}};
}

std::string csv_header() { return "experiment,d,nu,sigma,E0,class,ci_lo,ci_hi,seed"; }

namespace {

std::string num(const Json& j, const char* key) {
  if (!j.contains(key)) return "";
  return Json(j.at(key)).dump();
}

std::string sigma_field(const Json& j) {
  if (!j.contains("sigma")) return "";
  const Json& s = j.at("sigma");
  if (s.at("kind") == "list") return "list";
  return sigma_label(sigma_profile_from_json(s));
}

}  // namespace

std::string csv_row(const Json& report) {
  const std::string kind = report.at("experiment").get<std::string>();
  std::ostringstream os;
  if (kind == "solve" || kind == "mc_sample") {
    const std::string seed = kind == "solve" ? num(report.at("config"), "master_seed")
                                             : num(report, "stream_seed");
    os << kind << ',' << num(report, "d") << ','
       << (kind == "solve" ? num(report.at("config"), "nu") : num(report, "nu")) << ','
       << sigma_field(report) << ',' << num(report, "e0") << ','
       << report.at("classification").get<std::string>() << ",,," << seed;
  } else if (kind == "mc_summary") {
    // one row per class, p-hat in the E0 column's place left blank
    const char* classes[] = {"NONEMPTY", "EMPTY", "UNDECIDED"};
    bool first = true;
    for (const char* cls : classes) {
      if (!first) os << '\n';
      first = false;
      const Json& ci = report.at("wilson_ci").at(cls);
      os << "mc_summary," << num(report, "d") << ',' << num(report, "nu") << ','
         << sigma_field(report) << ",," << cls << ',' << Json(ci.at(0)).dump() << ','
         << Json(ci.at(1)).dump() << ',' << num(report, "master_seed");
    }
  } else {
    throw std::invalid_argument("csv_row: no CSV form for experiment '" + kind + "'");
  }
  return os.str();
}

void write_matrix_market(std::ostream& os, const SparseMat& A) {
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  std::vector<std::array<double, 3>> entries;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SparseMat::InnerIterator it(A, k); it; ++it)
      if (it.row() >= it.col())
        entries.push_back({double(it.row() + 1), double(it.col() + 1), it.value()});
  os << A.rows() << ' ' << A.cols() << ' ' << entries.size() << '\n';
  os.precision(17);
  for (const auto& e : entries)
    os << long(e[0]) << ' ' << long(e[1]) << ' ' << e[2] << '\n';
}

}  // namespace molspec
