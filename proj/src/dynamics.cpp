#include "pfs/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "pfs/fft.hpp"

namespace pfs {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double two_pi_pow(int d) {
  double v = 1.0;
  for (int i = 0; i < d; ++i) v *= kTwoPi;
  return v;
}

double sinc(double x) { return std::abs(x) < 1e-8 ? 1.0 - x * x / 6.0 : std::sin(x) / x; }

double norm_sq(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}
}  // namespace

void validate_loop(const LoopState& loop) {
  const int nt = static_cast<int>(loop.samples.size());
  if (nt < 16 || !is_power_of_two(nt))
    throw std::invalid_argument("LoopState: sample count must be a power of two >= 16");
  if (loop.period <= 0.0) throw std::invalid_argument("LoopState: period must be positive");
}

double potential_value(const HamiltonianSpec& spec, double t, std::span<const double> q) {
  double v = 0.0;
  for (const auto& term : spec.potential)
    v += term.amplitude *
         std::cos(dot_mode(term.n, q) + term.m * kTwoPi * t / spec.period + term.phase);
  return v;
}

std::vector<double> potential_gradient(const HamiltonianSpec& spec, double t,
                                       std::span<const double> q) {
  std::vector<double> g(q.size(), 0.0);
  for (const auto& term : spec.potential) {
    const double s = -term.amplitude *
                     std::sin(dot_mode(term.n, q) + term.m * kTwoPi * t / spec.period + term.phase);
    for (std::size_t i = 0; i < q.size(); ++i) g[i] += s * term.n[i];
  }
  return g;
}

double potential_sup(const HamiltonianSpec& spec) {
  double s = 0.0;
  for (const auto& term : spec.potential) s += std::abs(term.amplitude);
  return s;
}

CouplingEval coupling_eval(const HamiltonianSpec& spec, double t, double a, double b) {
  CouplingEval e;
  switch (spec.coupling) {
    case CouplingId::Linear:
      e.f = a;
      e.d1 = 1.0;
      e.d2 = 0.0;
      break;
    case CouplingId::SineLinear: {
      const double c = spec.gamma * std::cos(kTwoPi * t / spec.period);
      e.f = std::sin(a) + c * b;
      e.d1 = std::cos(a);
      e.d2 = c;
      break;
    }
  }
  return e;
}

/// Coefficients of x -> rho(q - x) on the dim/k ball: g_hat(n) = e^{-i n.q} conj(rho_hat(n)).
static FieldState bump_translate(const BumpProfile& bump, int dim, int k,
                                 std::span<const double> q) {
  FieldState g(dim, k);
  const ModeBall& bf = g.ball();
  const ModeBall& bb = bump.ball();
  for (int i = 0; i < g.size(); ++i) {
    const double th = -dot_mode(bf.mode(i), q);
    g.coeff(i) = std::complex<double>(std::cos(th), std::sin(th)) *
                 std::conj(bump.coeff(bb.index_of(bf.mode(i))));
  }
  return g;
}

std::pair<double, double> interaction_arguments(const FullState& s, const HamiltonianSpec& spec) {
  const std::complex<double> c = convolve_eval_complex(s.field, spec.bump, s.particle.q);
  return {c.real(), -c.imag()};  // w = phi - i pi
}

double hamiltonian_total(const FullState& s, double t, const HamiltonianSpec& spec) {
  const double kinetic = 0.5 * norm_sq(s.particle.p);
  const double v = potential_value(spec, t, s.particle.q);
  const double nf = scale_norm(s.field, {0.5});
  const double field = 0.5 * nf * nf;
  const auto [a, b] = interaction_arguments(s, spec);
  const double inter = spec.epsilon * coupling_eval(spec, t, a, b).f;
  return kinetic + v + field + inter;
}

FullState grad_hamiltonian(const FullState& s, double t, const HamiltonianSpec& spec) {
  FullState g;
  g.particle.p = s.particle.p;  // grad_p of |p|^2/2
  const auto [a, b] = interaction_arguments(s, spec);
  const CouplingEval ce = coupling_eval(spec, t, a, b);
  const auto gc = convolve_grad_complex(s.field, spec.bump, s.particle.q);
  std::vector<double> gq = potential_gradient(spec, t, s.particle.q);
  for (std::size_t i = 0; i < gq.size(); ++i)
    gq[i] += spec.epsilon * (ce.d1 * gc[i].real() + ce.d2 * (-gc[i].imag()));
  g.particle.q = spec.manifold.force_pullback(s.particle.q, gq);

  g.field = FieldState(s.field.dim(), s.field.truncation());
  const ModeBall& ball = g.field.ball();
  const FieldState gshift = bump_translate(spec.bump, s.field.dim(), s.field.truncation(),
                                           s.particle.q);
  const double vol = two_pi_pow(s.field.dim());
  const std::complex<double> fac =
      spec.epsilon * std::complex<double>(ce.d1, -ce.d2) * vol;
  for (int i = 0; i < g.field.size(); ++i) {
    const double w = ball.omega(i);
    g.field.coeff(i) = w * s.field.coeff(i) + fac * gshift.coeff(i) / w;
  }
  return g;
}

FullState vector_field(const FullState& s, double t, const HamiltonianSpec& spec) {
  FullState out;
  out.particle.q = s.particle.p;  // dq/dt (tangent already)

  const auto [a, b] = interaction_arguments(s, spec);
  const CouplingEval ce = coupling_eval(spec, t, a, b);
  const auto gc = convolve_grad_complex(s.field, spec.bump, s.particle.q);
  std::vector<double> force = potential_gradient(spec, t, s.particle.q);
  for (std::size_t i = 0; i < force.size(); ++i) {
    force[i] = -force[i] - spec.epsilon * (ce.d1 * gc[i].real() + ce.d2 * (-gc[i].imag()));
  }
  out.particle.p = spec.manifold.force_pullback(s.particle.q, force);
  if (spec.manifold.kind() == Submanifold::Kind::Sphere) {
    // Normal component keeping dp/dt consistent with a constrained trajectory.
    const double r = spec.manifold.radius();
    const double c = norm_sq(s.particle.p) / (r * r);
    for (std::size_t i = 0; i < out.particle.p.size(); ++i)
      out.particle.p[i] -= c * (s.particle.q[i] - spec.manifold.center()[i]);
  }

  out.field = FieldState(s.field.dim(), s.field.truncation());
  const ModeBall& ball = out.field.ball();
  const FieldState gshift = bump_translate(spec.bump, s.field.dim(), s.field.truncation(),
                                           s.particle.q);
  const double vol = two_pi_pow(s.field.dim());
  const std::complex<double> fac =
      spec.epsilon * std::complex<double>(ce.d2, ce.d1) * vol;
  for (int i = 0; i < out.field.size(); ++i) {
    const double w = ball.omega(i);
    out.field.coeff(i) =
        std::complex<double>(0.0, w) * s.field.coeff(i) + fac * gshift.coeff(i) / w;
  }
  return out;
}

double cutoff_chi(double r, double R) {
  if (R <= 0.0) throw std::invalid_argument("cutoff_chi: R must be positive");
  if (r <= R) return 1.0;
  if (r >= R + 1.0) return 0.0;
  const double gb = std::exp(-1.0 / (R + 1.0 - r));
  const double ga = std::exp(-1.0 / (r - R));
  return gb / (gb + ga);
}

double cutoff_chi_prime(double r, double R) {
  if (R <= 0.0) throw std::invalid_argument("cutoff_chi: R must be positive");
  if (r <= R || r >= R + 1.0) return 0.0;
  const double b = R + 1.0 - r, a = r - R;
  const double gb = std::exp(-1.0 / b), ga = std::exp(-1.0 / a);
  const double dgb = gb / (b * b), dga = ga / (a * a);
  const double den = gb + ga;
  return (-dgb * den - gb * (-dgb + dga)) / (den * den);
}

namespace {

struct CutoffState {
  double chi1 = 1.0, chi2 = 1.0;
  double dchi1 = 0.0, dchi2 = 0.0;
  double n3 = 0.0;
  double pnorm = 0.0;
};

CutoffState eval_cutoffs(const FullState& s, const HamiltonianSpec& spec,
                         const CutoffParams& cut) {
  CutoffState c;
  c.n3 = c3_majorant(s.field, spec.bump);
  c.chi1 = cutoff_chi(c.n3, cut.r1);
  c.dchi1 = cutoff_chi_prime(c.n3, cut.r1);
  c.pnorm = std::sqrt(norm_sq(s.particle.p));
  if (c.pnorm == 0.0) {
    c.chi2 = 1.0;  // ln|p| -> -inf: inside the cutoff with room to spare
    c.dchi2 = 0.0;
  } else {
    const double lp = std::log(c.pnorm);
    c.chi2 = cutoff_chi(lp, cut.r2);
    c.dchi2 = cutoff_chi_prime(lp, cut.r2);
  }
  return c;
}

}  // namespace

double hamiltonian_g(const FullState& s, double t, const HamiltonianSpec& spec) {
  const double kinetic = 0.5 * norm_sq(s.particle.p);
  const double v = potential_value(spec, t, s.particle.q);
  const auto [a, b] = interaction_arguments(s, spec);
  return kinetic + v + spec.epsilon * coupling_eval(spec, t, a, b).f;
}

FullState grad_g(const FullState& s, double t, const HamiltonianSpec& spec) {
  FullState g = grad_hamiltonian(s, t, spec);
  // Remove the free-field part: the twisted frame absorbs H^A.
  const ModeBall& ball = g.field.ball();
  for (int i = 0; i < g.field.size(); ++i)
    g.field.coeff(i) -= ball.omega(i) * s.field.coeff(i);
  return g;
}

double modified_hamiltonian_g(const FullState& s, double t, const HamiltonianSpec& spec,
                              const CutoffParams& cut) {
  const CutoffState c = eval_cutoffs(s, spec, cut);
  if (c.chi1 == 1.0 && c.chi2 == 1.0) return hamiltonian_g(s, t, spec);
  const double kinetic = 0.5 * norm_sq(s.particle.p);
  const double v = potential_value(spec, t, s.particle.q);
  if (c.chi1 == 0.0 || c.chi2 == 0.0) return kinetic + v;
  const auto [a, b] = interaction_arguments(s, spec);
  return kinetic + v + c.chi1 * c.chi2 * spec.epsilon * coupling_eval(spec, t, a, b).f;
}

FullState grad_modified_g(const FullState& s, double t, const HamiltonianSpec& spec,
                          const CutoffParams& cut) {
  const CutoffState c = eval_cutoffs(s, spec, cut);
  if (c.chi1 == 1.0 && c.chi2 == 1.0) return grad_g(s, t, spec);

  FullState g;
  g.field = FieldState(s.field.dim(), s.field.truncation());
  const double chi = c.chi1 * c.chi2;
  const auto [a, b] = interaction_arguments(s, spec);
  const CouplingEval ce = coupling_eval(spec, t, a, b);
  const double fval = spec.epsilon * ce.f;

  // q slot
  const auto gc = convolve_grad_complex(s.field, spec.bump, s.particle.q);
  std::vector<double> gq = potential_gradient(spec, t, s.particle.q);
  for (std::size_t i = 0; i < gq.size(); ++i)
    gq[i] += chi * spec.epsilon * (ce.d1 * gc[i].real() + ce.d2 * (-gc[i].imag()));
  g.particle.q = spec.manifold.force_pullback(s.particle.q, gq);

  // p slot: kinetic plus the log-momentum cutoff derivative.
  g.particle.p = s.particle.p;
  if (c.dchi2 != 0.0 && c.pnorm > 0.0) {
    const double coef = c.dchi2 / (c.pnorm * c.pnorm) * c.chi1 * fval;
    for (std::size_t i = 0; i < g.particle.p.size(); ++i)
      g.particle.p[i] += coef * s.particle.p[i];
  }

  // field slot: chi2 [ chi1  grad F_inter + F_inter chi1'(N3) grad N3 ].
  const ModeBall& ball = g.field.ball();
  if (chi != 0.0) {
    const FieldState gshift = bump_translate(spec.bump, s.field.dim(), s.field.truncation(),
                                             s.particle.q);
    const double vol = two_pi_pow(s.field.dim());
    const std::complex<double> fac =
        chi * spec.epsilon * std::complex<double>(ce.d1, -ce.d2) * vol;
    for (int i = 0; i < g.field.size(); ++i)
      g.field.coeff(i) += fac * gshift.coeff(i) / ball.omega(i);
  }
  if (c.dchi1 != 0.0 && c.chi2 != 0.0 && c.n3 > 0.0) {
    // N3^2 = cs * sum c_n |w_n|^2, H-metric gradient (cs c_n / (N3 w)) w_n.
    const ModeBall& bb = spec.bump.ball();
    const double sexp = 0.5 * s.field.dim() + 0.5;
    const double vol2 = std::pow(two_pi_pow(s.field.dim()), 2);
    double cs = 0.0;
    for (int i = 0; i < g.field.size(); ++i)
      cs += std::pow(static_cast<double>(ball.n_squared(i)) + 1.0, -sexp);
    const double coef = c.chi2 * c.dchi1 * fval / c.n3;
    for (int i = 0; i < g.field.size(); ++i) {
      const double np1 = static_cast<double>(ball.n_squared(i)) + 1.0;
      const double cn =
          std::pow(np1, 3.0 + sexp) * std::norm(spec.bump.coeff(bb.index_of(ball.mode(i)))) * vol2;
      g.field.coeff(i) += coef * cs * cn / ball.omega(i) * s.field.coeff(i);
    }
  }
  return g;
}

namespace {

/// Exact flow of the kick Hamiltonian V_t(q) + eps f_t((phi*rho)(q), (pi*rho)(q))
/// for duration h with frozen time label t. q is fixed; the interaction
/// gradients are constant along the kick (translation-invariance of the
/// rho-autocorrelation), so the update is closed-form for the whole catalog.
FullState kick(const FullState& s, double t, double h, const HamiltonianSpec& spec) {
  FullState out = s;
  const std::vector<double> gv = potential_gradient(spec, t, s.particle.q);

  double i1 = 0.0, i2 = 0.0;  // int_0^h eps d1 ds, int_0^h eps d2 ds
  const double vol = two_pi_pow(s.field.dim());
  if (spec.epsilon != 0.0) {
    const auto [a0, b0] = interaction_arguments(s, spec);
    switch (spec.coupling) {
      case CouplingId::Linear:
        i1 = spec.epsilon * h;
        i2 = 0.0;
        break;
      case CouplingId::SineLinear: {
        const double ct = spec.gamma * std::cos(kTwoPi * t / spec.period);
        // a(s) = a0 + eps c_rho ct s with the rho-autocorrelation constant.
        const ModeBall& ball = s.field.ball();
        const ModeBall& bb = spec.bump.ball();
        double c_rho = 0.0;
        for (int i = 0; i < s.field.size(); ++i)
          c_rho += std::norm(spec.bump.coeff(bb.index_of(ball.mode(i)))) / ball.omega(i);
        c_rho *= vol * vol;
        const double x = spec.epsilon * c_rho * ct * h;
        i1 = spec.epsilon * h * std::cos(a0 + 0.5 * x) * sinc(0.5 * x);
        i2 = spec.epsilon * ct * h;
        break;
      }
    }
    // Momentum kick from the interaction (gradients frozen at s=0).
    const auto gc = convolve_grad_complex(s.field, spec.bump, s.particle.q);
    std::vector<double> force(s.particle.q.size());
    for (std::size_t i = 0; i < force.size(); ++i)
      force[i] = -h * gv[i] - i1 * gc[i].real() - i2 * (-gc[i].imag());
    const auto dp = spec.manifold.force_pullback(s.particle.q, force);
    for (std::size_t i = 0; i < dp.size(); ++i) out.particle.p[i] += dp[i];
    // Field kick: w += (i2 + i i1) (2 pi)^d g_hat(n) / omega_n.
    const FieldState gshift =
        bump_translate(spec.bump, s.field.dim(), s.field.truncation(), s.particle.q);
    const std::complex<double> fac = std::complex<double>(i2, i1) * vol;
    const ModeBall& ball = out.field.ball();
    for (int i = 0; i < out.field.size(); ++i)
      out.field.coeff(i) += fac * gshift.coeff(i) / ball.omega(i);
  } else {
    std::vector<double> force(s.particle.q.size());
    for (std::size_t i = 0; i < force.size(); ++i) force[i] = -h * gv[i];
    const auto dp = spec.manifold.force_pullback(s.particle.q, force);
    for (std::size_t i = 0; i < dp.size(); ++i) out.particle.p[i] += dp[i];
  }
  return out;
}

}  // namespace

FullState strang_step(const FullState& s, double t, double dt, const HamiltonianSpec& spec) {
  FullState u = kick(s, t, 0.5 * dt, spec);
  u.particle = spec.manifold.geodesic_step(u.particle, dt);
  u.field = free_flow(u.field, dt);
  return kick(u, t + dt, 0.5 * dt, spec);
}

FullState strang_step_gauge(const FullState& s, double t, double dt, const HamiltonianSpec& spec) {
  auto twisted_kick = [&spec](const FullState& u, double tau, double h) {
    FullState v = u;
    v.field = free_flow(u.field, tau);
    v = kick(v, tau, h, spec);
    v.field = free_flow(v.field, -tau);
    return v;
  };
  FullState u = twisted_kick(s, t, 0.5 * dt);
  u.particle = spec.manifold.geodesic_step(u.particle, dt);
  return twisted_kick(u, t + dt, 0.5 * dt);
}

Trajectory integrate(const FullState& s0, double t0, double t1, double dt,
                     const HamiltonianSpec& spec) {
  if (t1 < t0) throw std::invalid_argument("integrate: t1 must be >= t0");
  Trajectory tr;
  tr.states.push_back(s0);
  tr.times.push_back(t0);
  tr.energies.push_back(hamiltonian_total(s0, t0, spec));
  if (t1 == t0) return tr;
  const double steps_real = (t1 - t0) / dt;
  const long long steps = std::llround(steps_real);
  if (std::abs(steps_real - steps) > 1e-9)
    throw std::invalid_argument("integrate: dt must divide t1 - t0");
  FullState s = s0;
  for (long long i = 0; i < steps; ++i) {
    const double t = t0 + i * dt;
    s = strang_step(s, t, dt, spec);
    tr.states.push_back(s);
    tr.times.push_back(t + dt);
    tr.energies.push_back(hamiltonian_total(s, t + dt, spec));
  }
  return tr;
}

Trajectory integrate_gauge(const FullState& s0, double t0, double t1, double dt,
                           const HamiltonianSpec& spec) {
  if (t1 < t0) throw std::invalid_argument("integrate: t1 must be >= t0");
  Trajectory tr;
  tr.states.push_back(s0);
  tr.times.push_back(t0);
  tr.energies.push_back(0.0);
  if (t1 == t0) return tr;
  const long long steps = std::llround((t1 - t0) / dt);
  FullState s = s0;
  for (long long i = 0; i < steps; ++i) {
    const double t = t0 + i * dt;
    s = strang_step_gauge(s, t, dt, spec);
    tr.states.push_back(s);
    tr.times.push_back(t + dt);
    tr.energies.push_back(0.0);
  }
  return tr;
}

LoopState gauge_transform(const LoopState& u, GaugeDirection dir) {
  validate_loop(u);
  if (dir == GaugeDirection::Forward && u.twisted)
    throw std::invalid_argument("gauge_transform: loop is already twisted");
  if (dir == GaugeDirection::Backward && !u.twisted)
    throw std::invalid_argument("gauge_transform: loop is not twisted");
  LoopState out = u;
  const int nt = static_cast<int>(u.samples.size());
  const double sign = dir == GaugeDirection::Forward ? -1.0 : 1.0;
  for (int j = 0; j < nt; ++j) {
    const double t = u.period * j / nt;
    out.samples[j].field = free_flow(u.samples[j].field, sign * t);
  }
  out.twisted = !u.twisted;
  return out;
}

double action(const LoopState& u_in, const HamiltonianSpec& spec,
              const std::optional<CutoffParams>& cut) {
  const LoopState u = u_in.twisted ? gauge_transform(u_in, GaugeDirection::Backward) : u_in;
  validate_loop(u);
  const int nt = static_cast<int>(u.samples.size());
  const double T = u.period;
  const double dt = T / nt;
  const int d = static_cast<int>(u.samples[0].particle.q.size());

  // Continuous lift of the particle coordinates; winding handled as a ramp.
  std::vector<std::vector<double>> qlift(d, std::vector<double>(nt));
  std::vector<double> ramp(d, 0.0);
  const bool wraps = spec.manifold.kind() == Submanifold::Kind::FlatTorus;
  for (int a = 0; a < d; ++a) {
    qlift[a][0] = u.samples[0].particle.q[a];
    for (int j = 1; j < nt; ++j) {
      const double step = u.samples[j].particle.q[a] - u.samples[j - 1].particle.q[a];
      qlift[a][j] = qlift[a][j - 1] + (wraps ? wrap_angle(step) : step);
    }
    if (wraps) {
      const double closing =
          wrap_angle(u.samples[0].particle.q[a] - u.samples[nt - 1].particle.q[a]);
      ramp[a] = (qlift[a][nt - 1] + closing - qlift[a][0]) / T;
    }
  }

  // Spectral q_dot on the periodic part, ramp added back.
  std::vector<std::vector<double>> qdot(d);
  for (int a = 0; a < d; ++a) {
    std::vector<double> periodic(nt);
    for (int j = 0; j < nt; ++j) periodic[j] = qlift[a][j] - ramp[a] * (dt * j);
    qdot[a] = spectral_derivative_real(periodic, T);
    for (int j = 0; j < nt; ++j) qdot[a][j] += ramp[a];
  }

  double a_particle = 0.0;
  for (int j = 0; j < nt; ++j) {
    const FullState& s = u.samples[j];
    const double t = dt * j;
    double pqdot = 0.0;
    for (int a = 0; a < d; ++a) pqdot += s.particle.p[a] * qdot[a][j];
    double h = 0.5 * norm_sq(s.particle.p) + potential_value(spec, t, s.particle.q);
    const auto [ia, ib] = interaction_arguments(s, spec);
    double inter = spec.epsilon * coupling_eval(spec, t, ia, ib).f;
    if (cut) {
      const CutoffState c = eval_cutoffs(s, spec, *cut);
      inter *= c.chi1 * c.chi2;
    }
    a_particle += dt * (pqdot - h - inter);
  }

  // Field part: sum_n -(w_n/2) Im(w conj(w_dot)) - (w_n^2/2)|w|^2 per sample.
  const FieldState& f0 = u.samples[0].field;
  const ModeBall& ball = f0.ball();
  double a_field = 0.0;
  std::vector<std::complex<double>> series(nt);
  for (int i = 0; i < f0.size(); ++i) {
    for (int j = 0; j < nt; ++j) series[j] = u.samples[j].field.coeff(i);
    const auto deriv = spectral_derivative(series, T);
    const double w = ball.omega(i);
    for (int j = 0; j < nt; ++j) {
      a_field += dt * (-0.5 * w * (series[j] * std::conj(deriv[j])).imag() -
                       0.5 * w * w * std::norm(series[j]));
    }
  }
  return a_particle + a_field;
}

FConditionReport check_f_conditions_for(
    const HamiltonianSpec& spec,
    const std::function<double(double, std::span<const double>, std::span<const double>)>& f_part,
    double c0, double c1, double c2) {
  FConditionReport rep;
  rep.worst_f1_margin = std::numeric_limits<double>::max();
  rep.worst_f2_margin = std::numeric_limits<double>::max();
  const int d = spec.manifold.ambient_dim();
  const double pmags[] = {0.0, 0.1, 1.0, 10.0, 100.0, 1000.0};
  // Deterministic sample points: geodesic sweeps from a base point.
  std::vector<std::vector<double>> qs;
  {
    std::vector<double> base(d, 0.0);
    if (spec.manifold.kind() == Submanifold::Kind::Sphere) {
      base = spec.manifold.center();
      base[0] += spec.manifold.radius();
    } else {
      base = spec.manifold.retract(base);
    }
    const auto frame = spec.manifold.tangent_basis(base);
    qs.push_back(base);
    for (const auto& e : frame)
      for (double step : {0.7, 1.9, 3.1}) {
        ParticleState ps{base, e};
        qs.push_back(spec.manifold.geodesic_step(ps, step).q);
      }
  }
  for (double t : {0.0, 0.25 * spec.period, 0.5 * spec.period, 0.75 * spec.period}) {
    for (const auto& q : qs) {
      const auto frame = spec.manifold.tangent_basis(q);
      for (const auto& e : frame) {
        for (double pm : pmags) {
          std::vector<double> p(d);
          for (int i = 0; i < d; ++i) p[i] = pm * e[i];
          // (F1): dF . p d/dp - F >= c0 |p|^2 - c1, radial derivative by FD.
          const double h = 1e-5 * std::max(1.0, pm);
          std::vector<double> pp(d), pmn(d);
          for (int i = 0; i < d; ++i) {
            pp[i] = p[i] * (pm > 0.0 ? (1.0 + h / pm) : 0.0) + (pm == 0.0 ? h * e[i] : 0.0);
            pmn[i] = p[i] * (pm > 0.0 ? (1.0 - h / pm) : 0.0) - (pm == 0.0 ? h * e[i] : 0.0);
          }
          const double df_radial =
              pm == 0.0 ? 0.0
                        : pm * (f_part(t, q, pp) - f_part(t, q, pmn)) / (2.0 * h);
          const double f1 = df_radial - f_part(t, q, p) - (c0 * pm * pm - c1);
          if (f1 < rep.worst_f1_margin) {
            rep.worst_f1_margin = f1;
            rep.witness_f1_p = pm;
          }
          // (F2): |d2F/dp dp|, |d2F/dp dq| < c2 at moderate |p| (second
          // derivatives by central differences).
          if (pm <= 10.0) {
            const double hh = 1e-3 * std::max(1.0, pm);
            for (int i = 0; i < d; ++i) {
              std::vector<double> pa = p, pb = p;
              pa[i] += hh;
              pb[i] -= hh;
              const double dpp =
                  (f_part(t, q, pa) - 2.0 * f_part(t, q, p) + f_part(t, q, pb)) / (hh * hh);
              const double m2 = c2 - std::abs(dpp);
              if (m2 < rep.worst_f2_margin) {
                rep.worst_f2_margin = m2;
                rep.witness_f2_p = pm;
              }
              for (int jx = 0; jx < d; ++jx) {
                std::vector<double> qa(q.begin(), q.end()), qb(q.begin(), q.end());
                qa[jx] += hh;
                qb[jx] -= hh;
                const double dpq = (f_part(t, qa, pa) - f_part(t, qb, pa) - f_part(t, qa, pb) +
                                    f_part(t, qb, pb)) /
                                   (4.0 * hh * hh);
                const double m3 = c2 - std::abs(dpq);
                if (m3 < rep.worst_f2_margin) {
                  rep.worst_f2_margin = m3;
                  rep.witness_f2_p = pm;
                }
              }
            }
          }
        }
      }
    }
  }
  rep.f1_ok = rep.worst_f1_margin >= -1e-6;
  rep.f2_ok = rep.worst_f2_margin >= -1e-3;  // finite-difference slack on the Hessian
  return rep;
}

FConditionReport check_f_conditions(const HamiltonianSpec& spec) {
  auto quadratic = [&spec](double t, std::span<const double> q, std::span<const double> p) {
    double k = 0.0;
    for (double x : p) k += x * x;
    return 0.5 * k + potential_value(spec, t, q);
  };
  return check_f_conditions_for(spec, quadratic, spec.c0, spec.c1, spec.c2);
}

double descent_energy_budget(double action_bound, double action_lower, const HamiltonianSpec& spec,
                             const CutoffParams& cut) {
  // |(u*rho)(q)| <= N3 S2 / sqrt(CS) <= (R1+1) S2 / sqrt(CS) on supp chi1.
  const ModeBall& ball = spec.bump.ball();
  const double sexp = 0.5 * spec.dim + 0.5;
  double cs = 0.0, s2 = 0.0;
  for (int i = 0; i < ball.size(); ++i) {
    const double np1 = static_cast<double>(ball.n_squared(i)) + 1.0;
    cs += std::pow(np1, -sexp);
    s2 += std::pow(np1, -(3.0 + sexp));
  }
  const double amp = (cut.r1 + 1.0) * std::sqrt(s2) / std::sqrt(cs);
  double fsup = 0.0;
  switch (spec.coupling) {
    case CouplingId::Linear:
      fsup = amp;
      break;
    case CouplingId::SineLinear:
      fsup = 1.0 + std::abs(spec.gamma) * amp;
      break;
  }
  return (action_bound - action_lower) + 4.0 * spec.period * spec.epsilon * fsup;
}

}  // namespace pfs
