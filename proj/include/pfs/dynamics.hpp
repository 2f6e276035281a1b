#ifndef PFS_DYNAMICS_HPP
#define PFS_DYNAMICS_HPP

#include <functional>
#include <optional>
#include <vector>

#include "pfs/field.hpp"
#include "pfs/geometry.hpp"

namespace pfs {

/// One cosine term of the external potential:
///   amplitude * cos(n.x + m 2pi t / T + phase).
/// Sums of these are real, smooth and T-periodic by construction.
struct PotentialTerm {
  Mode n = {0, 0, 0};
  int m = 0;
  double amplitude = 0.0;
  double phase = 0.0;
};

/// Coupling catalog: every entry has analytically known, bounded first
/// derivatives so the admissibility conditions are certifiable.
///   Linear:      f_t(a, b) = a
///   SineLinear:  f_t(a, b) = sin(a) + gamma cos(2 pi t / T) b
enum class CouplingId { Linear, SineLinear };

struct HamiltonianSpec {
  int dim = 2;
  Submanifold manifold = Submanifold::sphere(2, 1.0, {3.141592653589793, 3.141592653589793});
  double period = 1.0;
  BumpProfile bump = BumpProfile::exponential(2, 0, 1.0, 1.0);
  double epsilon = 0.0;  // interaction strength multiplying f_t
  CouplingId coupling = CouplingId::Linear;
  double gamma = 0.0;  // SineLinear's b-coefficient amplitude
  std::vector<PotentialTerm> potential;
  // Declared admissibility constants, checked by check_f_conditions.
  double c0 = 0.5;
  double c1 = 0.0;
  double c2 = 1.0;
};

struct FullState {
  ParticleState particle;
  FieldState field;  // pair (phi, pi) in z-coordinates, w = phi - i pi
};

/// Cutoff levels: R1 caps the field-smoothness majorant, R2 caps ln|p|.
struct CutoffParams {
  double r1 = 1.0;
  double r2 = 1.0;
};

/// Discretized T-periodic (or phi^A_T-twisted-periodic) trajectory on a
/// uniform grid t_j = j T / Nt, Nt a power of two >= 16.
struct LoopState {
  std::vector<FullState> samples;
  double period = 1.0;
  bool twisted = false;
};

void validate_loop(const LoopState& loop);

enum class GaugeDirection { Forward, Backward };

// --- potential and coupling -------------------------------------------------

double potential_value(const HamiltonianSpec& spec, double t, std::span<const double> q);
std::vector<double> potential_gradient(const HamiltonianSpec& spec, double t,
                                       std::span<const double> q);
/// max_t,x |V| estimated from the term amplitudes (used for c1 defaults).
double potential_sup(const HamiltonianSpec& spec);

struct CouplingEval {
  double f = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};
CouplingEval coupling_eval(const HamiltonianSpec& spec, double t, double a, double b);

/// Convolution arguments a = (phi*rho)(q), b = (pi*rho)(q) from the pair state.
std::pair<double, double> interaction_arguments(const FullState& s, const HamiltonianSpec& spec);

// --- Hamiltonians and gradients ----------------------------------------------

/// H = |p|^2/2 + V_t(q) + H_field + eps f_t((phi*rho)(q), (pi*rho)(q)),
/// H_field = 1/2 <phi, B phi> + 1/2 <pi, B pi> = 1/2 sum (n^2+1)|w_n|^2.
double hamiltonian_total(const FullState& s, double t, const HamiltonianSpec& spec);

/// Time derivative of the ambient coordinates along the flow (the normal
/// centripetal term of dp/dt included, so spectral-in-time loop residuals
/// can compare directly against it).
FullState vector_field(const FullState& s, double t, const HamiltonianSpec& spec);

/// Metric gradient of H: tangential dH/dq, dH/dp, and the field-slot gradient
/// with respect to the H^{1/2} pair metric. The flow satisfies
/// dq/dt = grad_p, P_q dp/dt = -grad_q, dw/dt = +i grad_w.
FullState grad_hamiltonian(const FullState& s, double t, const HamiltonianSpec& spec);

/// Twisted-frame Hamiltonian G = F_part + chi_{R2}(ln|p|) chi_{R1}(N3) F_inter
/// (no free-field term; the gauge transform absorbs it). Exactly equal to the
/// unmodified F_part + F_inter inside both cutoffs.
double modified_hamiltonian_g(const FullState& s, double t, const HamiltonianSpec& spec,
                              const CutoffParams& cut);
FullState grad_modified_g(const FullState& s, double t, const HamiltonianSpec& spec,
                          const CutoffParams& cut);

/// Unmodified twisted-frame Hamiltonian F_part + F_inter and gradient
/// (the cut == nullptr case of the pair above).
double hamiltonian_g(const FullState& s, double t, const HamiltonianSpec& spec);
FullState grad_g(const FullState& s, double t, const HamiltonianSpec& spec);

// --- smooth cutoff ------------------------------------------------------------

/// C^infty step: 1 on (-inf, R], 0 on [R+1, inf), symmetric about R+1/2,
/// |chi'| <= 2. chi_R(r) = g(R+1-r) / (g(R+1-r) + g(r-R)), g(x) = e^{-1/x}.
double cutoff_chi(double r, double R);
double cutoff_chi_prime(double r, double R);

// --- integration ---------------------------------------------------------------

/// Symmetric Strang step: half kick (V + interaction; exact for the catalog),
/// full drift (exact geodesic x exact free field rotation), half kick.
FullState strang_step(const FullState& s, double t, double dt, const HamiltonianSpec& spec);

struct Trajectory {
  std::vector<FullState> states;  // includes both endpoints
  std::vector<double> times;
  std::vector<double> energies;  // hamiltonian_total at each state
};

Trajectory integrate(const FullState& s0, double t0, double t1, double dt,
                     const HamiltonianSpec& spec);

/// Strang step of the gauge-transformed system (kicks conjugated through the
/// free flow, drift = geodesic only). Used by the equivalence checks.
FullState strang_step_gauge(const FullState& s, double t, double dt,
                            const HamiltonianSpec& spec);
Trajectory integrate_gauge(const FullState& s0, double t0, double t1, double dt,
                           const HamiltonianSpec& spec);

// --- gauge transform and action -------------------------------------------------

/// Forward: u(t) -> phi^A_{-t} u(t) (plain-periodic to twisted);
/// backward undoes it. Sample-wise exact rotation; toggles the twist flag.
LoopState gauge_transform(const LoopState& u, GaugeDirection dir);

/// Symplectic action of a loop (untwisted representation; twisted input is
/// untwisted internally):
///   A = int p.q_dot - F_t(u) dt + int <pi, d_t phi> - H_field dt,
/// time derivatives spectral, winding handled through a linear ramp.
/// With `cut` the interaction term in F is the cutoff-modified one.
double action(const LoopState& u, const HamiltonianSpec& spec,
              const std::optional<CutoffParams>& cut = std::nullopt);

// --- admissibility check ----------------------------------------------------------

struct FConditionReport {
  bool f1_ok = false;
  bool f2_ok = false;
  double worst_f1_margin = 0.0;  // min over samples of dF.p d/dp - F - (c0 |p|^2 - c1)
  double worst_f2_margin = 0.0;  // min over samples of c2 - |second derivative|
  double witness_f1_p = 0.0;
  double witness_f2_p = 0.0;
};

/// Samples (q, p, t) with |p| up to 1e3 and verifies the asymptotic
/// quadraticity inequalities for the configured particle Hamiltonian.
FConditionReport check_f_conditions(const HamiltonianSpec& spec);

/// Generic sampler for an arbitrary particle Hamiltonian F(t, q, p)
/// (finite-difference derivatives); used to exhibit violating examples.
FConditionReport check_f_conditions_for(
    const HamiltonianSpec& spec,
    const std::function<double(double, std::span<const double>, std::span<const double>)>& f_part,
    double c0, double c1, double c2);

/// Floer-energy budget (a - b_low) + 4 T sup|G_inter| with the sup estimated
/// from the cutoff support; diagnostic only.
double descent_energy_budget(double action_bound, double action_lower, const HamiltonianSpec& spec,
                             const CutoffParams& cut);

}  // namespace pfs

#endif
