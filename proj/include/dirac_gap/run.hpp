#pragma once

#include "dirac_gap/operator_model.hpp"
#include "dirac_gap/radial_mesh.hpp"
#include "dirac_gap/serialization.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dirac_gap {

enum class Command { Spectrum, Oracle, Verify, ConvergeEps, ConvergeMesh, PollutionDemo };
enum class OutputFormat { Json, Csv };

const char* to_string(Command c);
Command command_from_string(const std::string& s);

namespace exit_code {
constexpr int ok = 0;
constexpr int computation = 1;
constexpr int config = 2;
constexpr int verification = 3;
}  // namespace exit_code

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct RunConfig {
  Command command = Command::Spectrum;
  PotentialSpec spec = PotentialSpec::coulomb(0.5);
  /// Empty: the command's default mesh. converge-mesh needs a nested ladder of >= 3.
  std::vector<MeshParams> meshes;
  double coupling_max = 1.0;
  int k_max = 1;
  double tol = 1e-10;
  std::string output_path;  // empty: artifact to stdout
  OutputFormat format = OutputFormat::Json;
  std::uint64_t seed = 7;
  int threads = 1;
  int gauss = 6;
  std::vector<double> eps_ladder;  // converge-eps
  std::optional<double> kappa;     // single sector (oracle, converge-mesh, pollution-demo)
  int k = 1;                       // level index for converge-mesh
  int count = 3;                   // oracle levels per sector
  double r0 = 1e-10;               // oracle inner radius
  int dof = 200;                   // pollution-demo
  double threshold = 0.05;         // pollution-demo
  bool reproducible = false;       // zero the wall time so reports are byte-stable
};

Json run_config_to_json(const RunConfig& cfg);
RunConfig run_config_from_json(const Json& j);

/// Throws ConfigError naming the violated field.
void validate(const RunConfig& cfg);

/// Meshes the command will actually use.
std::vector<MeshParams> effective_meshes(const RunConfig& cfg);

/// Dispatches a validated config. Writes the artifact to the output path (or
/// `out` when none is set) and the summary table to `out` (or `log`).
int run(const RunConfig& cfg, std::ostream& out, std::ostream& log);

/// Full command line entry: parse, validate, run. Returns the exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& log);

}  // namespace dirac_gap
