#ifndef PFS_CONFIG_HPP
#define PFS_CONFIG_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "pfs/dynamics.hpp"
#include "pfs/orbit.hpp"

namespace pfs {

/// Full experiment description, parsed from JSON. See configs/ for examples.
struct ExperimentConfig {
  // system
  int dim = 2;
  std::string q_kind = "sphere";  // "sphere" | "flat_torus"
  double q_radius = 1.0;
  std::vector<double> q_center;
  std::vector<int> q_axes;
  std::vector<double> q_fixed;
  std::vector<double> q_seed;  // optional orbit seed point (retracted onto Q)
  double period = 1.0;
  int k = 8;
  int time_modes = 16;  // M
  int nt = 64;
  double bump_rho0 = 1.0;
  double bump_alpha = 1.0;
  std::string coupling_id = "linear";
  double epsilon = 0.0;
  double gamma = 0.0;
  std::vector<PotentialTerm> potential;
  double c0 = 0.5, c1 = 0.0, c2 = 1.0;
  // solver
  double tol = 1e-8;
  int max_iter = 30;
  double relaxation = 0.7;
  int continuation_steps = 8;
  double r1 = 10.0, r2 = 3.0;
  double newton_tol = 1e-10;
  int shoot_substeps = 4096;
  double descent_ds = 0.5;
  int descent_steps = 20000;
  int dt_per_period = 2048;
  // output
  std::string out_dir;
  std::vector<std::string> formats = {"csv", "json"};
  // misc
  std::uint64_t seed = 1;
  bool allow_resonant = false;

  HamiltonianSpec hamiltonian() const;
  Submanifold manifold() const;
  OrbitSolverOptions solver_options() const;
  CutoffParams cutoffs() const { return {r1, r2}; }
  double sigma() const;
};

struct ConfigError {
  std::string path;  // JSON pointer-ish field path
  std::string message;
};

/// Parses and validates; on any violation throws ConfigParseError carrying
/// *all* violations, not just the first.
class ConfigParseError : public std::runtime_error {
 public:
  explicit ConfigParseError(std::vector<ConfigError> errors);
  std::vector<ConfigError> errors;
};

ExperimentConfig parse_config(const std::string& text);

/// Validation only (schema already parsed); returns every violation.
std::vector<ConfigError> validate_config(const ExperimentConfig& cfg);

}  // namespace pfs

#endif
