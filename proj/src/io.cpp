#include "pfs/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pfs {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

void append_state_columns(std::ostringstream& os, const FullState& s) {
  for (double v : s.particle.q) os << "," << format_double(v);
  for (double v : s.particle.p) os << "," << format_double(v);
  os << "," << format_double(scale_norm(s.field, {0.0}));
  os << "," << format_double(scale_norm(s.field, {1.0}));
}

std::string state_header(int d) {
  std::ostringstream os;
  os << "t";
  for (int i = 0; i < d; ++i) os << ",q" << i;
  for (int i = 0; i < d; ++i) os << ",p" << i;
  os << ",field_h0,field_h1";
  return os.str();
}

}  // namespace

std::string trajectory_csv(const Trajectory& tr) {
  if (tr.states.empty()) return "";
  std::ostringstream os;
  os << state_header(static_cast<int>(tr.states[0].particle.q.size())) << ",energy\n";
  for (std::size_t i = 0; i < tr.states.size(); ++i) {
    os << format_double(tr.times[i]);
    append_state_columns(os, tr.states[i]);
    os << "," << format_double(tr.energies[i]) << "\n";
  }
  return os.str();
}

std::string loop_csv(const LoopState& loop, const HamiltonianSpec& spec) {
  const LoopState u = loop.twisted ? gauge_transform(loop, GaugeDirection::Backward) : loop;
  const int nt = static_cast<int>(u.samples.size());
  std::ostringstream os;
  os << state_header(static_cast<int>(u.samples[0].particle.q.size()))
     << ",energy,action_density\n";
  // Action density: p.q_dot - H + <pi, d_t phi> - H_field per sample; assembled
  // from a single-sample action quadrature difference is circular, so emit the
  // integrand pieces directly.
  for (int j = 0; j < nt; ++j) {
    const double t = u.period * j / nt;
    const FullState& s = u.samples[j];
    os << format_double(t);
    append_state_columns(os, s);
    const double h = hamiltonian_total(s, t, spec);
    // q_dot and d_t phi by one-sided spectral evaluation would need the whole
    // loop; use vector_field (equal for converged loops, diagnostic otherwise).
    const FullState vf = vector_field(s, t, spec);
    double pq = 0.0;
    for (std::size_t a = 0; a < s.particle.p.size(); ++a)
      pq += s.particle.p[a] * vf.particle.q[a];
    double field_term = 0.0;
    {
      const FieldState phi = phi_part(s.field);
      const FieldState pi = pi_part(s.field);
      const FieldState phidot = phi_part(vf.field);
      field_term = inner_h_half(pi, phidot);
      const double nf = scale_norm(s.field, {0.5});
      field_term -= 0.5 * nf * nf;
    }
    os << "," << format_double(h) << "," << format_double(pq - h + field_term) << "\n";
  }
  return os.str();
}

std::string lambda_csv(const LambdaSpectrum& spectrum, double T) {
  const double sigma = (T / (2.0 * 3.141592653589793238462643)) *
                       (T / (2.0 * 3.141592653589793238462643));
  std::ostringstream os;
  os << "m,n_sq,lambda,divisor,gain\n";
  for (const auto& e : spectrum.entries) {
    const double np1 = e.n_sq + 1.0;
    const double divisor = sigma - static_cast<double>(e.m) * e.m / np1;
    const double gain = divisor != 0.0 ? sigma / (np1 * std::abs(divisor)) : 0.0;
    os << e.m << "," << e.n_sq << "," << format_double(e.lambda) << "," << format_double(divisor)
       << "," << format_double(gain) << "\n";
  }
  return os.str();
}

std::string diophantine_json(const DiophantineReport& rep) {
  nlohmann::ordered_json j;
  j["sigma"] = rep.sigma;
  j["best_c"] = rep.best_c;
  j["fitted_r"] = rep.fitted_r;
  j["witness_n"] = rep.witness_n;
  j["scan_limit"] = rep.scan_limit;
  return j.dump(2);
}

std::string orbit_json(const PeriodicOrbit& orbit, const std::string& loop_csv_name,
                       const std::string& config_echo) {
  nlohmann::ordered_json j;
  if (!config_echo.empty()) {
    try {
      j["config"] = nlohmann::json::parse(config_echo);
    } catch (...) {
      j["config"] = config_echo;
    }
  }
  j["residual"] = orbit.residual;
  j["action"] = orbit.action_value;
  j["iterations"] = orbit.iterations;
  j["field_decay"] = {{"C", orbit.field_decay.c},
                      {"alpha", orbit.field_decay.alpha},
                      {"residual", orbit.field_decay.residual}};
  j["iterate_distances"] = orbit.iterate_distances;
  j["loop_samples"] = loop_csv_name;
  j["Nt"] = orbit.loop.samples.size();
  j["period"] = orbit.loop.period;
  return j.dump(2);
}

std::string galerkin_csv(const std::vector<GalerkinProbeRow>& rows) {
  std::ostringstream os;
  os << "k,gap\n";
  for (const auto& r : rows) os << r.k << "," << format_double(r.gap) << "\n";
  return os.str();
}

std::string descent_csv(const DescentTrace& trace) {
  std::ostringstream os;
  os << "step,action\n";
  for (std::size_t i = 0; i < trace.actions.size(); ++i)
    os << i << "," << format_double(trace.actions[i]) << "\n";
  return os.str();
}

std::string manifest_json(const std::string& subcommand, const std::string& config_echo,
                          std::uint64_t seed, double wall_seconds,
                          const std::vector<std::string>& outputs, const std::string& status) {
  nlohmann::ordered_json j;
  j["tool"] = "pflab";
  j["version"] = "0.1.0";
  j["subcommand"] = subcommand;
  j["seed"] = seed;
  j["status"] = status;
  j["wall_seconds"] = wall_seconds;
  j["outputs"] = outputs;
  try {
    j["config"] = nlohmann::json::parse(config_echo);
  } catch (...) {
    j["config"] = config_echo;
  }
  return j.dump(2);
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
}

}  // namespace pfs
