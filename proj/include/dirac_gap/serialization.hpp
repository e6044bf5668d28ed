#pragma once

#include "dirac_gap/convergence.hpp"
#include "dirac_gap/minmax_solver.hpp"
#include "dirac_gap/shooting_oracle.hpp"
#include "dirac_gap/verification.hpp"

#include <json.hpp>

#include <iosfwd>
#include <string>
#include <vector>

namespace dirac_gap {

using Json = nlohmann::ordered_json;

/// Shortest decimal that reads back to the same double ("inf", "-inf", "nan" for non-finite).
std::string format_double(double x);
double parse_double(const std::string& text);

Json potential_to_json(const PotentialSpec& spec);
/// Throws std::invalid_argument naming the offending field.
PotentialSpec potential_from_json(const Json& j);

Json mesh_to_json(const MeshParams& mesh);
MeshParams mesh_from_json(const Json& j);

/// Level vectors u, v are not serialized.
Json report_to_json(const SpectrumReport& report);
SpectrumReport report_from_json(const Json& j);

/// One row per expanded level: E,kappa,k,copy.
void write_spectrum_csv(std::ostream& os, const SpectrumReport& report);
std::vector<ExpandedLevel> read_spectrum_csv(std::istream& is);

Json oracle_to_json(SpaceDim dim, double nu, const std::vector<OracleLevel>& levels);
std::vector<OracleLevel> oracle_from_json(const Json& j);

Json truncation_to_json(const TruncationTable& table);
TruncationTable truncation_from_json(const Json& j);
/// eps,lambda1,gap_to_untruncated; a final "inf" row holds the untruncated level.
void write_truncation_csv(std::ostream& os, const TruncationTable& table);
TruncationTable read_truncation_csv(std::istream& is);

Json mesh_convergence_to_json(const MeshConvergence& conv);
MeshConvergence mesh_convergence_from_json(const Json& j);
/// dof,lambda,decrement
void write_mesh_convergence_csv(std::ostream& os, const MeshConvergence& conv);
std::vector<MeshConvergenceRow> read_mesh_convergence_csv(std::istream& is);

Json pollution_to_json(const PollutionReport& rep);
PollutionReport pollution_from_json(const Json& j);
/// set,E with set in {naive, oracle, spurious, minmax}
void write_pollution_csv(std::ostream& os, const PollutionReport& rep);
PollutionReport read_pollution_csv(std::istream& is);

Json verdict_to_json(const std::vector<CheckResult>& checks);
std::vector<CheckResult> verdict_from_json(const Json& j);
/// name,pass,worst
void write_verdict_csv(std::ostream& os, const std::vector<CheckResult>& checks);
std::vector<CheckResult> read_verdict_csv(std::istream& is);

}  // namespace dirac_gap
