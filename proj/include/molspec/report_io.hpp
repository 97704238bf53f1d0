// report_io.hpp
// Serializable experiment records: JSON-lines reports, the summary CSV, and
// the debugging exports (mesh JSON, matrices in coordinate text format).
// Reports carry every input needed to reproduce their outputs bit-for-bit;
// volatile data (timings) stays out of the serialized form.
//
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <json.hpp>
#include <ostream>
#include <string>

#include "molspec/experiments.hpp"

namespace molspec {

using Json = nlohmann::ordered_json;

inline constexpr int kReportSchemaVersion = 1;

Json to_json(const SigmaProfile& profile);
SigmaProfile sigma_profile_from_json(const Json& j);
std::string sigma_label(const SigmaProfile& profile);  // compact CSV form

Json to_json(const AtomConfiguration& config);

// `solve` report: one ground-state run with classification; wall_seconds
// is volatile and only attached when nonnegative (kept out of replays)
Json solve_report(const GroundStateResult& gs, const SigmaAssignment& sigma, double tau,
                  double wall_seconds = -1);

Json mc_sample_report(const McResult& mc, const McSample& sample);
Json mc_summary_report(const McResult& mc);
Json convergence_report(double d, const ConvergenceStudy& study, const SigmaAssignment& sigma);
Json threshold_report(const ThresholdEstimate& est);
Json appendix_report(const PropertyCheck& up, const PropertyCheck& mixed, std::uint64_t seed);
Json mesh_report(const TriMesh& mesh);

std::string csv_header();
std::string csv_row(const Json& report);  // solve / mc_sample / mc_summary rows

void write_matrix_market(std::ostream& os, const SparseMat& A);

}  // namespace molspec
