#ifndef PFS_IO_HPP
#define PFS_IO_HPP

#include <string>
#include <vector>

#include "pfs/config.hpp"
#include "pfs/dynamics.hpp"
#include "pfs/orbit.hpp"
#include "pfs/smalldiv.hpp"

namespace pfs {

/// Full-precision decimal formatting (17 significant digits, '.' decimal).
std::string format_double(double v);

/// Trajectory CSV: t, q..., p..., field H0/H1 norms, energy.
std::string trajectory_csv(const Trajectory& tr);

/// Loop CSV: t, q..., p..., field H0/H1 norms, energy, action density.
std::string loop_csv(const LoopState& loop, const HamiltonianSpec& spec);

/// Resonance spectrum CSV: m, n_sq, lambda, divisor, gain.
std::string lambda_csv(const LambdaSpectrum& spectrum, double T);

std::string diophantine_json(const DiophantineReport& rep);

std::string orbit_json(const PeriodicOrbit& orbit, const std::string& loop_csv_name,
                       const std::string& config_echo = "");

std::string galerkin_csv(const std::vector<GalerkinProbeRow>& rows);

std::string descent_csv(const DescentTrace& trace);

/// Manifest with the inputs echo; wall time lives only here so the numeric
/// artifacts stay byte-identical across reruns.
std::string manifest_json(const std::string& subcommand, const std::string& config_echo,
                          std::uint64_t seed, double wall_seconds,
                          const std::vector<std::string>& outputs, const std::string& status);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace pfs

#endif
