// pflab: spectral laboratory for time-periodic particle-field systems on tori.
//
// Subcommands: simulate, find-orbit, floer-flow, spectrum, diophantine,
// probe-galerkin. Exit codes: 0 ok, 2 invalid config, 3 resonance,
// 4 no convergence.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "pfs/config.hpp"
#include "pfs/io.hpp"

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read config file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

std::string output_dir(const pfs::ExperimentConfig& cfg, const std::string& cli_out,
                       const std::string& sub) {
  if (!cli_out.empty()) return cli_out;
  if (!cfg.out_dir.empty()) return cfg.out_dir;
  const char* root = std::getenv("PFLAB_OUT");
  return (root ? std::string(root) : std::string("pflab_out")) + "/" + sub;
}

struct RunContext {
  pfs::ExperimentConfig cfg;
  std::string config_echo;
  std::string dir;
  std::vector<std::string> outputs;

  void emit(const std::string& name, const std::string& content) {
    pfs::write_text_file(dir + "/" + name, content);
    outputs.push_back(name);
  }
};

/// Orbit seed point: explicit config value, else a point where the default
/// potentials act tangentially (center + r e_1 for spheres).
std::vector<double> seed_point(const pfs::ExperimentConfig& cfg, const pfs::Submanifold& man) {
  if (!cfg.q_seed.empty()) return man.retract(cfg.q_seed);
  if (man.kind() == pfs::Submanifold::Kind::Sphere) {
    auto b = man.center();
    b[man.ambient_dim() >= 2 ? 1 : 0] += man.radius();
    return b;
  }
  return man.retract(std::vector<double>(man.ambient_dim(), 0.0));
}

int run_simulate(RunContext& ctx) {
  const auto spec = ctx.cfg.hamiltonian();
  const double T = ctx.cfg.period;
  // Initial state: rest at a potential sample point plus a small smooth field.
  pfs::FullState s0;
  std::mt19937_64 rng(ctx.cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::vector<double> base = seed_point(ctx.cfg, spec.manifold);
  s0.particle.q = base;
  s0.particle.p.assign(spec.manifold.ambient_dim(), 0.0);
  {
    const auto frame = spec.manifold.tangent_basis(base);
    for (const auto& e : frame)
      for (std::size_t i = 0; i < e.size(); ++i) s0.particle.p[i] += 0.2 * gauss(rng) * e[i];
    s0.particle.p = spec.manifold.tangent_project(s0.particle.q, s0.particle.p);
  }
  s0.field = pfs::FieldState(ctx.cfg.dim, ctx.cfg.k);
  const pfs::ModeBall& ball = s0.field.ball();
  for (int i = 0; i < s0.field.size(); ++i) {
    const double decay = std::exp(-0.7 * std::sqrt(static_cast<double>(ball.n_squared(i))));
    s0.field.coeff(i) = 0.05 * decay * std::complex<double>(gauss(rng), gauss(rng));
  }
  const double dt = T / ctx.cfg.dt_per_period;
  const auto tr = pfs::integrate(s0, 0.0, T, dt, spec);
  ctx.emit("trajectory.csv", pfs::trajectory_csv(tr));
  double drift = 0.0;
  const double h0 = tr.energies.front();
  for (double e : tr.energies) drift = std::max(drift, std::abs(e - h0));
  std::ostringstream os;
  os << "{\n  \"energy_initial\": " << pfs::format_double(h0)
     << ",\n  \"max_abs_drift\": " << pfs::format_double(drift)
     << ",\n  \"relative_drift\": "
     << pfs::format_double(std::abs(h0) > 0 ? drift / std::abs(h0) : drift) << "\n}\n";
  ctx.emit("energy.json", os.str());
  ctx.emit("final_field.json", pfs::field_to_json(tr.states.back().field));
  return 0;
}

int run_find_orbit(RunContext& ctx) {
  const auto spec = ctx.cfg.hamiltonian();
  const double T = ctx.cfg.period;
  const std::vector<double> base = seed_point(ctx.cfg, spec.manifold);
  std::vector<std::vector<double>> q0(ctx.cfg.nt, base);
  const auto orbit = pfs::alternating_fixed_point(q0, spec, T, ctx.cfg.solver_options());
  ctx.emit("loop.csv", pfs::loop_csv(orbit.loop, spec));
  ctx.emit("orbit.json", pfs::orbit_json(orbit, "loop.csv", ctx.config_echo));
  return 0;
}

int run_floer_flow(RunContext& ctx) {
  const auto spec = ctx.cfg.hamiltonian();
  const double T = ctx.cfg.period;
  const std::vector<double> base = seed_point(ctx.cfg, spec.manifold);
  pfs::LoopState u0;
  u0.period = T;
  u0.twisted = true;
  u0.samples.resize(ctx.cfg.nt);
  for (int j = 0; j < ctx.cfg.nt; ++j) {
    u0.samples[j].particle.q = base;
    u0.samples[j].particle.p.assign(spec.manifold.ambient_dim(), 0.0);
    u0.samples[j].field = pfs::FieldState(ctx.cfg.dim, ctx.cfg.k);
  }
  pfs::DescentOptions dopt;
  dopt.ds = ctx.cfg.descent_ds;
  dopt.max_steps = ctx.cfg.descent_steps;
  dopt.stationary_tol = ctx.cfg.tol;
  auto [loop, trace] = pfs::floer_descent(u0, ctx.cfg.cutoffs(), spec, dopt);
  ctx.emit("descent.csv", pfs::descent_csv(trace));
  std::ostringstream os;
  os << "{\n  \"converged\": " << (trace.converged ? "true" : "false")
     << ",\n  \"steps_accepted\": " << trace.steps_accepted
     << ",\n  \"steps_rejected\": " << trace.steps_rejected
     << ",\n  \"energy\": " << pfs::format_double(trace.energy)
     << ",\n  \"terminal_grad_norm\": " << pfs::format_double(trace.terminal_grad_norm)
     << ",\n  \"terminal_residual\": " << pfs::format_double(trace.terminal_residual) << "\n}\n";
  ctx.emit("descent.json", os.str());
  ctx.emit("loop.csv", pfs::loop_csv(loop, spec));
  if (!trace.converged) return 4;
  return 0;
}

int run_spectrum(RunContext& ctx) {
  const auto spec = pfs::lambda_spectrum(ctx.cfg.period, ctx.cfg.k, ctx.cfg.time_modes,
                                         ctx.cfg.dim);
  ctx.emit("spectrum.csv", pfs::lambda_csv(spec, ctx.cfg.period));
  std::ostringstream os;
  os << "{\n  \"min_abs_lambda\": " << pfs::format_double(spec.min_abs)
     << ",\n  \"argmin_m\": " << spec.argmin.m << ",\n  \"argmin_n_sq\": " << spec.argmin.n_sq
     << ",\n  \"record_fit_exponent\": " << pfs::format_double(spec.record_fit_exponent)
     << "\n}\n";
  ctx.emit("spectrum.json", os.str());
  return 0;
}

int run_diophantine(RunContext& ctx) {
  const auto rep = pfs::diophantine_scan_fit(ctx.cfg.sigma(), 10000);
  ctx.emit("diophantine.json", pfs::diophantine_json(rep));
  return 0;
}

int run_probe_galerkin(RunContext& ctx) {
  const auto spec = ctx.cfg.hamiltonian();
  std::vector<int> usable;
  for (int k : {ctx.cfg.k / 8, ctx.cfg.k / 4, ctx.cfg.k / 2, 3 * ctx.cfg.k / 4})
    if (k >= 2 && (usable.empty() || k > usable.back())) usable.push_back(k);
  const auto rows = pfs::galerkin_convergence_probe(spec, ctx.cfg.cutoffs(), usable, ctx.cfg.k, 16,
                                                    ctx.cfg.seed);
  ctx.emit("galerkin.csv", pfs::galerkin_csv(rows));
  std::ostringstream os;
  os << "{\n  \"fit_rate\": " << pfs::format_double(pfs::galerkin_fit_rate(rows)) << "\n}\n";
  ctx.emit("galerkin.json", os.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pflab: spectral particle-field laboratory on T^d"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::uint64_t seed = 0;
  bool have_seed = false, allow_resonant = false;
  double tol = 0.0;
  bool have_tol = false;

  app.add_option("--config", config_path, "experiment config (JSON)")->required();
  app.add_option("--out", out_dir, "output directory (overrides config)");
  auto* seed_opt = app.add_option("--seed", seed, "seed override");
  app.add_flag("--allow-resonant", allow_resonant, "accept resonant periods");
  auto* tol_opt = app.add_option("--tol", tol, "tolerance override");

  for (const char* name : {"simulate", "find-orbit", "floer-flow", "spectrum", "diophantine",
                           "probe-galerkin"})
    app.add_subcommand(name);

  CLI11_PARSE(app, argc, argv);
  have_seed = seed_opt->count() > 0;
  have_tol = tol_opt->count() > 0;
  const std::string sub = app.get_subcommands().front()->get_name();

  const auto t_start = std::chrono::steady_clock::now();
  RunContext ctx;
  int status_code = 0;
  std::string status = "ok";
  try {
    ctx.config_echo = read_file(config_path);
    {
      // Apply CLI overrides before validation so --allow-resonant can save
      // a resonant period.
      nlohmann::json j = nlohmann::json::parse(ctx.config_echo);
      if (allow_resonant) j["allow_resonant"] = true;
      if (have_seed) j["seed"] = seed;
      if (have_tol) j["solver"]["tol"] = tol;
      ctx.config_echo = j.dump(2);
    }
    ctx.cfg = pfs::parse_config(ctx.config_echo);
    ctx.dir = output_dir(ctx.cfg, out_dir, sub);
    std::filesystem::create_directories(ctx.dir);

    if (sub == "simulate") status_code = run_simulate(ctx);
    else if (sub == "find-orbit") status_code = run_find_orbit(ctx);
    else if (sub == "floer-flow") status_code = run_floer_flow(ctx);
    else if (sub == "spectrum") status_code = run_spectrum(ctx);
    else if (sub == "diophantine") status_code = run_diophantine(ctx);
    else if (sub == "probe-galerkin") status_code = run_probe_galerkin(ctx);
  } catch (const pfs::ConfigParseError& e) {
    std::cerr << e.what() << "\n";
    status = "invalid-config";
    status_code = 2;
  } catch (const pfs::ResonanceError& e) {
    std::cerr << "resonance: " << e.what() << " (divisor " << e.divisor << ", m " << e.m
              << ", n^2 " << e.n_sq << ")\n";
    status = "resonance";
    status_code = 3;
  } catch (const pfs::NoConvergence& e) {
    std::cerr << "no convergence: " << e.what() << "\n";
    status = "no-convergence";
    status_code = 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    status = "error";
    status_code = 2;
  }

  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
  if (!ctx.dir.empty()) {
    try {
      pfs::write_text_file(ctx.dir + "/manifest.json",
                           pfs::manifest_json(sub, ctx.config_echo, ctx.cfg.seed, wall,
                                              ctx.outputs, status));
    } catch (...) {
    }
  }
  if (status_code != 0 && status == "ok") status = "error";
  return status_code;
}
