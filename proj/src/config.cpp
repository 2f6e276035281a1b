#include "pfs/config.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "pfs/fft.hpp"
#include "pfs/smalldiv.hpp"

namespace pfs {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

ConfigParseError::ConfigParseError(std::vector<ConfigError> errs)
    : std::runtime_error([&errs] {
        std::ostringstream os;
        os << "invalid config:";
        for (const auto& e : errs) os << "\n  " << e.path << ": " << e.message;
        return os.str();
      }()),
      errors(std::move(errs)) {}

double ExperimentConfig::sigma() const { return (period / kTwoPi) * (period / kTwoPi); }

Submanifold ExperimentConfig::manifold() const {
  if (q_kind == "sphere") return Submanifold::sphere(dim, q_radius, q_center);
  return Submanifold::flat_torus(dim, q_axes, q_fixed);
}

HamiltonianSpec ExperimentConfig::hamiltonian() const {
  HamiltonianSpec spec;
  spec.dim = dim;
  spec.manifold = manifold();
  spec.period = period;
  spec.bump = BumpProfile::exponential(dim, k, bump_rho0, bump_alpha);
  spec.epsilon = epsilon;
  spec.coupling = coupling_id == "linear" ? CouplingId::Linear : CouplingId::SineLinear;
  spec.gamma = gamma;
  spec.potential = potential;
  spec.c0 = c0;
  spec.c1 = c1;
  spec.c2 = c2;
  return spec;
}

OrbitSolverOptions ExperimentConfig::solver_options() const {
  OrbitSolverOptions opt;
  opt.tol = tol;
  opt.max_iter = max_iter;
  opt.relaxation = relaxation;
  opt.time_modes = time_modes;
  opt.shoot_substeps = shoot_substeps;
  opt.newton_tol = newton_tol;
  opt.continuation_steps = continuation_steps;
  return opt;
}

std::vector<ConfigError> validate_config(const ExperimentConfig& cfg) {
  std::vector<ConfigError> errs;
  auto bad = [&errs](std::string path, std::string msg) {
    errs.push_back({std::move(path), std::move(msg)});
  };
  if (cfg.dim < 1 || cfg.dim > 3) bad("system.d", "dimension must be 1..3");
  if (cfg.q_kind != "sphere" && cfg.q_kind != "flat_torus")
    bad("system.Q.kind", "must be 'sphere' or 'flat_torus'");
  if (cfg.q_kind == "sphere") {
    if (!(cfg.q_radius > 0.0 && cfg.q_radius < std::numbers::pi))
      bad("system.Q.radius", "sphere radius must lie in (0, pi)");
    if (static_cast<int>(cfg.q_center.size()) != cfg.dim)
      bad("system.Q.center", "center must have d components");
  } else {
    if (cfg.q_axes.empty()) bad("system.Q.axes", "need at least one axis");
    if (static_cast<int>(cfg.q_fixed.size()) != cfg.dim)
      bad("system.Q.fixed", "fixed values must have d components");
  }
  if (!(cfg.period > 0.0)) bad("system.T", "period must be positive");
  if (cfg.k < 0) bad("system.k", "k must be >= 0");
  if (cfg.time_modes < 0) bad("system.M", "M must be >= 0");
  if (cfg.nt < 16 || !is_power_of_two(cfg.nt)) bad("system.Nt", "Nt must be a power of two >= 16");
  if (cfg.nt < 2 * cfg.time_modes + 2) bad("system.Nt", "Nt must be >= 2M+2 (Nyquist)");
  if (cfg.epsilon < 0.0) bad("system.coupling.epsilon", "epsilon must be >= 0");
  if (cfg.coupling_id != "linear" && cfg.coupling_id != "sine_linear")
    bad("system.coupling.id", "unknown catalog entry (linear | sine_linear)");
  if (!(cfg.bump_rho0 != 0.0)) bad("system.bump.rho0", "rho0 must be nonzero");
  if (!(cfg.bump_alpha > 0.0)) bad("system.bump.alpha", "alpha must be positive");
  if (!(cfg.tol > 0.0)) bad("solver.tol", "tolerance must be positive");
  if (!(cfg.newton_tol > 0.0)) bad("solver.newton_tol", "tolerance must be positive");
  if (cfg.max_iter < 1) bad("solver.max_iter", "max_iter must be >= 1");
  if (!(cfg.relaxation > 0.0 && cfg.relaxation <= 1.0))
    bad("solver.relaxation", "relaxation must lie in (0, 1]");
  if (!(cfg.r1 > 0.0)) bad("solver.R1", "R1 must be positive");
  if (!(cfg.r2 > 0.0)) bad("solver.R2", "R2 must be positive");
  if (cfg.dt_per_period < 2 || !is_power_of_two(cfg.dt_per_period))
    bad("solver.dt_per_period", "must be a power of two >= 2");

  if (cfg.period > 0.0 && !cfg.allow_resonant) {
    try {
      diophantine_constants(cfg.sigma(), 2000, 2.0);
    } catch (const ResonanceError&) {
      bad("system.T", "sigma = T^2/(2 pi)^2 fails the Diophantine scan (rational within "
                      "precision); pass --allow-resonant to override");
    }
  }
  return errs;
}

ExperimentConfig parse_config(const std::string& text) {
  std::vector<ConfigError> errs;
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const std::exception& e) {
    throw ConfigParseError({{"", std::string("JSON parse failure: ") + e.what()}});
  }
  ExperimentConfig cfg;
  try {
    const auto& sys = j.at("system");
    cfg.dim = sys.value("d", 2);
    if (sys.contains("Q")) {
      const auto& q = sys.at("Q");
      cfg.q_kind = q.value("kind", "sphere");
      cfg.q_radius = q.value("radius", 1.0);
      if (q.contains("center")) cfg.q_center = q.at("center").get<std::vector<double>>();
      if (q.contains("axes")) cfg.q_axes = q.at("axes").get<std::vector<int>>();
      if (q.contains("fixed")) cfg.q_fixed = q.at("fixed").get<std::vector<double>>();
      if (q.contains("seed")) cfg.q_seed = q.at("seed").get<std::vector<double>>();
    }
    cfg.period = sys.value("T", 1.0);
    cfg.k = sys.value("k", 8);
    cfg.time_modes = sys.value("M", 16);
    cfg.nt = sys.value("Nt", 64);
    if (sys.contains("bump")) {
      cfg.bump_rho0 = sys.at("bump").value("rho0", 1.0);
      cfg.bump_alpha = sys.at("bump").value("alpha", 1.0);
    }
    if (sys.contains("coupling")) {
      cfg.coupling_id = sys.at("coupling").value("id", "linear");
      cfg.epsilon = sys.at("coupling").value("epsilon", 0.0);
      cfg.gamma = sys.at("coupling").value("gamma", 0.0);
    }
    if (sys.contains("potential")) {
      for (const auto& term : sys.at("potential")) {
        PotentialTerm pt;
        const auto nv = term.at("n").get<std::vector<int>>();
        for (std::size_t i = 0; i < nv.size() && i < 3; ++i) pt.n[i] = nv[i];
        pt.m = term.value("m", 0);
        pt.amplitude = term.value("amplitude", 0.0);
        pt.phase = term.value("phase", 0.0);
        cfg.potential.push_back(pt);
      }
    }
    if (sys.contains("constants")) {
      cfg.c0 = sys.at("constants").value("c0", 0.5);
      cfg.c1 = sys.at("constants").value("c1", 0.0);
      cfg.c2 = sys.at("constants").value("c2", 1.0);
    }
    if (j.contains("solver")) {
      const auto& sol = j.at("solver");
      cfg.tol = sol.value("tol", 1e-8);
      cfg.max_iter = sol.value("max_iter", 30);
      cfg.relaxation = sol.value("relaxation", 0.7);
      cfg.continuation_steps = sol.value("continuation_steps", 8);
      cfg.r1 = sol.value("R1", 10.0);
      cfg.r2 = sol.value("R2", 3.0);
      cfg.newton_tol = sol.value("newton_tol", 1e-10);
      cfg.shoot_substeps = sol.value("shoot_substeps", 4096);
      cfg.descent_ds = sol.value("descent_ds", 0.5);
      cfg.descent_steps = sol.value("descent_steps", 20000);
      cfg.dt_per_period = sol.value("dt_per_period", 2048);
    }
    if (j.contains("output")) {
      cfg.out_dir = j.at("output").value("directory", "");
      if (j.at("output").contains("formats"))
        cfg.formats = j.at("output").at("formats").get<std::vector<std::string>>();
    }
    cfg.seed = j.value("seed", 1);
    cfg.allow_resonant = j.value("allow_resonant", false);
  } catch (const ConfigParseError&) {
    throw;
  } catch (const std::exception& e) {
    errs.push_back({"", std::string("schema violation: ") + e.what()});
    throw ConfigParseError(std::move(errs));
  }
  auto verrs = validate_config(cfg);
  if (!verrs.empty()) throw ConfigParseError(std::move(verrs));
  return cfg;
}

}  // namespace pfs
