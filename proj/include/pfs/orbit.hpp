#ifndef PFS_ORBIT_HPP
#define PFS_ORBIT_HPP

#include <cstdint>
#include <utility>
#include <vector>

#include "pfs/dynamics.hpp"
#include "pfs/smalldiv.hpp"

namespace pfs {

// --- forcing synthesis --------------------------------------------------------

/// Space-time spectrum of f(t,x) = rho(q(t) - x) for a T-periodic particle
/// loop sampled at Nt >= 2M+2 points: space modes e^{-i n.q(t)} conj(rho_hat(n)),
/// time modes by DFT over the samples. Hermitian by construction.
SpaceTimeSpectrum sample_forcing(const std::vector<std::vector<double>>& q_loop,
                                 const BumpProfile& bump, double T, int M, int k);

/// Momentum field of the second-order solve: pi = B^{-1} d_t phi, packed with
/// phi into pair coordinates W(m,n) = phi_hat(m,n) (1 + mu_m / omega_n).
SpaceTimeSpectrum pair_spectrum_from_phi(const SpaceTimeSpectrum& phi);

/// Time-DFT of a loop's field samples (untwisted representation),
/// all bins |m| <= Nt/2 - 1.
SpaceTimeSpectrum loop_field_spectrum(const LoopState& loop);

/// Loop with particle samples given explicitly and field slices synthesized
/// from a pair spectrum.
LoopState assemble_loop(const std::vector<ParticleState>& particle_samples,
                        const SpaceTimeSpectrum& w_pair, double T);

// --- particle shooting ----------------------------------------------------------

struct ShootOptions {
  double tol = 1e-10;
  int max_iter = 50;
  int substeps = 4096;   // 4th-order composite steps per period
  double fd_step = 1e-6; // monodromy finite-difference step
};

/// Newton on the time-T return map of the particle subsystem under a frozen
/// T-periodic field (pair spectrum). Throws NoConvergence / DegenerateOrbit.
ParticleState particle_shoot(const SpaceTimeSpectrum& frozen_field, const ParticleState& guess,
                             double T, const HamiltonianSpec& spec, const ShootOptions& opt);

/// Convenience overload: frozen field supplied as a loop's field part.
ParticleState particle_shoot(const LoopState& field_loop, const ParticleState& guess, double T,
                             const HamiltonianSpec& spec, double tol);

/// Particle-only trajectory under a frozen field, 4th-order composition of
/// the symmetric split step; samples returned at Nt uniform times.
std::vector<ParticleState> particle_trajectory(const SpaceTimeSpectrum& frozen_field,
                                               const ParticleState& s0, double T, int nt,
                                               const HamiltonianSpec& spec, int substeps);

// --- residual certification ------------------------------------------------------

struct ResidualReport {
  double total = 0.0;
  double q = 0.0;
  double p = 0.0;
  double field = 0.0;
};

/// Max over the time grid of |d_t(sample) - vector_field(sample)| with d_t
/// spectral in time (winding-aware lift for the positions), per component.
ResidualReport orbit_residual(const LoopState& loop, const HamiltonianSpec& spec);

// --- alternating fixed point -------------------------------------------------------

struct PeriodicOrbit {
  LoopState loop;
  double residual = 0.0;
  double action_value = 0.0;
  DecayFit field_decay;
  int iterations = 0;
  std::vector<double> iterate_distances;
};

struct OrbitSolverOptions {
  double tol = 1e-8;
  int max_iter = 30;
  double relaxation = 0.7;  // damping of the field update
  int time_modes = 16;      // M
  int shoot_substeps = 4096;
  double newton_tol = 1e-10;
  int continuation_steps = 8;  // geometric coupling ramp when direct iteration stalls
};

/// Alternate (1) resolvent solve of the field for the current particle loop
/// and (2) particle shooting under the frozen field, from a seed position
/// loop (Nt samples on Q). Requires the linear coupling catalog entry.
PeriodicOrbit alternating_fixed_point(const std::vector<std::vector<double>>& q0_loop,
                                      const HamiltonianSpec& spec, double T,
                                      const OrbitSolverOptions& opt);

// --- loop-space descent ---------------------------------------------------------------

struct DescentOptions {
  double ds = 0.5;
  int max_steps = 20000;
  double stationary_tol = 1e-8;  // on the L2 gradient norm
  int max_rejects = 60;
  double grow = 1.25;
  double ds_max = 4.0;
};

struct DescentTrace {
  std::vector<double> actions;  // per accepted step, starting value included
  double energy = 0.0;          // accumulated int ||d_s u||^2 ds
  double terminal_residual = 0.0;
  double terminal_grad_norm = 0.0;
  int steps_accepted = 0;
  int steps_rejected = 0;
  bool converged = false;
};

/// Semi-implicit descent on the Galerkin loop space for the cutoff
/// Hamiltonian: per time-Fourier mode the stiff linear part (divisors
/// lambda_{m,n}, particle kinetic-block eigenvalues) is integrated exactly
/// and orientation-adapted so every mode contracts; the interaction gradient
/// is explicit. Stationary limits solve the discrete orbit equations.
std::pair<LoopState, DescentTrace> floer_descent(const LoopState& u0, const CutoffParams& cut,
                                                 const HamiltonianSpec& spec,
                                                 const DescentOptions& opt);

/// L2-metric gradient of the loop action (untwisted samples); exposed for
/// the finite-difference consistency tests and the descent itself.
struct LoopGradient {
  std::vector<std::vector<double>> q;  // [sample][axis], tangentially projected
  std::vector<std::vector<double>> p;
  std::vector<FieldState> field;       // H-metric complex gradient per sample
};
LoopGradient action_gradient(const LoopState& u, const HamiltonianSpec& spec,
                             const CutoffParams& cut);

// --- Galerkin convergence probe -----------------------------------------------------------

struct GalerkinProbeRow {
  int k = 0;
  double gap = 0.0;  // sup over the ensemble of ||grad G^k - grad G^K||
};

std::vector<GalerkinProbeRow> galerkin_convergence_probe(const HamiltonianSpec& spec,
                                                         const CutoffParams& cut,
                                                         const std::vector<int>& k_list,
                                                         int reference_k, int ensemble,
                                                         std::uint64_t seed);

/// Least-squares exponential rate of gap(k) ~ C e^{-rate k}.
double galerkin_fit_rate(const std::vector<GalerkinProbeRow>& rows);

// --- orbit cataloguing ------------------------------------------------------------

/// Sup distance between loops minimized over grid time shifts; the
/// deduplication metric for catalogued orbits.
double loop_distance_mod_shift(const LoopState& a, const LoopState& b);

/// Orbits are considered the same when their loops are closer than tol
/// modulo time shift (default 1e-4).
bool orbits_equivalent(const PeriodicOrbit& a, const PeriodicOrbit& b, double tol = 1e-4);

}  // namespace pfs

#endif
