#include "pfs/orbit.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>
#include <unordered_map>

#include "pfs/fft.hpp"

namespace pfs {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double two_pi_pow(int d) {
  double v = 1.0;
  for (int i = 0; i < d; ++i) v *= kTwoPi;
  return v;
}

double phi1(double x) {  // (1 - e^{-x}) / x, phi1(0) = 1
  return x < 1e-8 ? 1.0 - 0.5 * x : -std::expm1(-x) / x;
}

double phi2(double x) {  // (1 - e^{-2x}) / (2x), phi2(0) = 1
  return x < 1e-8 ? 1.0 - x : -std::expm1(-2.0 * x) / (2.0 * x);
}

/// Gaussian elimination with partial pivoting; returns false when the pivot
/// collapses (singular system). A is n x n row-major, b overwritten with x.
bool solve_dense(std::vector<double>& a, std::vector<double>& b, int n) {
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
    if (std::abs(a[piv * n + col]) < 1e-300) return false;
    if (piv != col) {
      for (int c = 0; c < n; ++c) std::swap(a[col * n + c], a[piv * n + c]);
      std::swap(b[col], b[piv]);
    }
    for (int r = col + 1; r < n; ++r) {
      const double f = a[r * n + col] / a[col * n + col];
      for (int c = col; c < n; ++c) a[r * n + c] -= f * a[col * n + c];
      b[r] -= f * b[col];
    }
  }
  for (int r = n - 1; r >= 0; --r) {
    double s = b[r];
    for (int c = r + 1; c < n; ++c) s -= a[r * n + c] * b[c];
    b[r] = s / a[r * n + r];
  }
  return true;
}

}  // namespace

SpaceTimeSpectrum sample_forcing(const std::vector<std::vector<double>>& q_loop,
                                 const BumpProfile& bump, double T, int M, int k) {
  const int nt = static_cast<int>(q_loop.size());
  if (nt < 2 * M + 2)
    throw std::invalid_argument("sample_forcing: need Nt >= 2M+2 samples (Nyquist)");
  if (!is_power_of_two(nt))
    throw std::invalid_argument("sample_forcing: sample count must be a power of two");
  const int dim = static_cast<int>(q_loop[0].size());
  SpaceTimeSpectrum out(dim, k, M, T);
  const ModeBall& ball = out.ball();
  const ModeBall& bb = bump.ball();
  std::vector<std::complex<double>> series(nt);
  for (int i = 0; i < ball.size(); ++i) {
    const std::complex<double> rho = std::conj(bump.coeff(bb.index_of(ball.mode(i))));
    for (int j = 0; j < nt; ++j) {
      const double th = -dot_mode(ball.mode(i), q_loop[j]);
      series[j] = rho * std::complex<double>(std::cos(th), std::sin(th));
    }
    const auto coeffs = dft_coeffs(series);
    for (int m = -M; m <= M; ++m) out.at(m, i) = coeffs[(m + nt) % nt];
  }
  return out;
}

SpaceTimeSpectrum pair_spectrum_from_phi(const SpaceTimeSpectrum& phi) {
  SpaceTimeSpectrum w(phi.dim(), phi.space_truncation(), phi.time_truncation(), phi.period());
  const ModeBall& ball = phi.ball();
  const double base = kTwoPi / phi.period();
  for (int m = -phi.time_truncation(); m <= phi.time_truncation(); ++m)
    for (int i = 0; i < phi.space_size(); ++i)
      w.at(m, i) = phi.at(m, i) * (1.0 + base * m / ball.omega(i));
  return w;
}

SpaceTimeSpectrum loop_field_spectrum(const LoopState& loop) {
  validate_loop(loop);
  if (loop.twisted) throw std::invalid_argument("loop_field_spectrum: untwist the loop first");
  const int nt = static_cast<int>(loop.samples.size());
  const FieldState& f0 = loop.samples[0].field;
  SpaceTimeSpectrum out(f0.dim(), f0.truncation(), nt / 2 - 1, loop.period);
  std::vector<std::complex<double>> series(nt);
  for (int i = 0; i < f0.size(); ++i) {
    for (int j = 0; j < nt; ++j) series[j] = loop.samples[j].field.coeff(i);
    const auto coeffs = dft_coeffs(series);
    for (int m = -(nt / 2 - 1); m <= nt / 2 - 1; ++m) out.at(m, i) = coeffs[(m + nt) % nt];
  }
  return out;
}

LoopState assemble_loop(const std::vector<ParticleState>& particle_samples,
                        const SpaceTimeSpectrum& w_pair, double T) {
  LoopState loop;
  loop.period = T;
  loop.twisted = false;
  const int nt = static_cast<int>(particle_samples.size());
  loop.samples.resize(nt);
  for (int j = 0; j < nt; ++j) {
    loop.samples[j].particle = particle_samples[j];
    loop.samples[j].field = w_pair.slice_at(T * j / nt);
  }
  validate_loop(loop);
  return loop;
}

// --- frozen-field particle integrator ------------------------------------------

namespace {

class FrozenFieldCache {
 public:
  /// capacity must cover every stage time of the integration grid or the
  /// cache degrades to recomputing slices.
  explicit FrozenFieldCache(const SpaceTimeSpectrum& w, std::size_t capacity)
      : w_(&w), capacity_(capacity) {
    cache_.reserve(capacity);
  }
  const FieldState& at(double t) {
    long long key = 0;
    std::memcpy(&key, &t, sizeof(key));
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    if (cache_.size() > capacity_) cache_.clear();
    return cache_.emplace(key, w_->slice_at(t)).first->second;
  }

 private:
  const SpaceTimeSpectrum* w_;
  std::size_t capacity_;
  std::unordered_map<long long, FieldState> cache_;
};

ParticleState frozen_kick(const ParticleState& s, double t, double h, const HamiltonianSpec& spec,
                          const FieldState& slice) {
  ParticleState out = s;
  std::vector<double> force = potential_gradient(spec, t, s.q);
  for (auto& f : force) f = -h * f;
  if (spec.epsilon != 0.0) {
    const std::complex<double> c = convolve_eval_complex(slice, spec.bump, s.q);
    const CouplingEval ce = coupling_eval(spec, t, c.real(), -c.imag());
    const auto gc = convolve_grad_complex(slice, spec.bump, s.q);
    for (std::size_t i = 0; i < force.size(); ++i)
      force[i] -= h * spec.epsilon * (ce.d1 * gc[i].real() + ce.d2 * (-gc[i].imag()));
  }
  const auto dp = spec.manifold.force_pullback(s.q, force);
  for (std::size_t i = 0; i < dp.size(); ++i) out.p[i] += dp[i];
  return out;
}

ParticleState frozen_strang(const ParticleState& s, double t, double h, const HamiltonianSpec& spec,
                            FrozenFieldCache& cache) {
  ParticleState u = frozen_kick(s, t, 0.5 * h, spec, cache.at(t));
  u = spec.manifold.geodesic_step(u, h);
  return frozen_kick(u, t + h, 0.5 * h, spec, cache.at(t + h));
}

/// Triple-jump 4th-order composition of the symmetric split step.
ParticleState frozen_step4(const ParticleState& s, double t, double h, const HamiltonianSpec& spec,
                           FrozenFieldCache& cache) {
  static const double g1 = 1.0 / (2.0 - std::cbrt(2.0));
  static const double g2 = 1.0 - 2.0 * g1;
  ParticleState u = frozen_strang(s, t, g1 * h, spec, cache);
  u = frozen_strang(u, t + g1 * h, g2 * h, spec, cache);
  return frozen_strang(u, t + (g1 + g2) * h, g1 * h, spec, cache);
}

ParticleState frozen_flow(const ParticleState& s0, double T, const HamiltonianSpec& spec,
                          FrozenFieldCache& cache, int substeps) {
  ParticleState s = s0;
  const double h = T / substeps;
  for (int i = 0; i < substeps; ++i) s = frozen_step4(s, i * h, h, spec, cache);
  return s;
}

}  // namespace

std::vector<ParticleState> particle_trajectory(const SpaceTimeSpectrum& frozen_field,
                                               const ParticleState& s0, double T, int nt,
                                               const HamiltonianSpec& spec, int substeps) {
  if (substeps % nt != 0)
    throw std::invalid_argument("particle_trajectory: substeps must be a multiple of Nt");
  FrozenFieldCache cache(frozen_field, 4 * static_cast<std::size_t>(substeps) + 16);
  std::vector<ParticleState> out;
  out.reserve(nt);
  ParticleState s = s0;
  const double h = T / substeps;
  const int stride = substeps / nt;
  for (int i = 0; i < substeps; ++i) {
    if (i % stride == 0) out.push_back(s);
    s = frozen_step4(s, i * h, h, spec, cache);
  }
  return out;
}

ParticleState particle_shoot(const SpaceTimeSpectrum& frozen_field, const ParticleState& guess,
                             double T, const HamiltonianSpec& spec, const ShootOptions& opt) {
  if (opt.tol <= 0.0) throw std::invalid_argument("particle_shoot: tol must be positive");
  FrozenFieldCache cache(frozen_field, 4 * static_cast<std::size_t>(opt.substeps) + 16);
  const Submanifold& man = spec.manifold;
  const int d = man.ambient_dim();
  const int j = man.intrinsic_dim();
  const int n = 2 * j;
  const bool wraps = man.kind() == Submanifold::Kind::FlatTorus;

  ParticleState base;
  base.q = man.retract(guess.q);
  base.p = man.tangent_project(base.q, guess.p);

  auto residual_of = [&](const ParticleState& s, const std::vector<std::vector<double>>& frame) {
    const ParticleState sT = frozen_flow(s, T, spec, cache, opt.substeps);
    std::vector<double> dq(d), dp(d);
    for (int i = 0; i < d; ++i) {
      const double raw = sT.q[i] - s.q[i];
      dq[i] = wraps ? wrap_angle(raw) : raw;
      dp[i] = sT.p[i] - s.p[i];
    }
    std::vector<double> r(n, 0.0);
    for (int a = 0; a < j; ++a)
      for (int i = 0; i < d; ++i) {
        r[a] += frame[a][i] * dq[i];
        r[j + a] += frame[a][i] * dp[i];
      }
    return r;
  };

  auto candidate = [&](const ParticleState& c, const std::vector<std::vector<double>>& frame,
                       const std::vector<double>& u) {
    ParticleState s;
    s.q = std::vector<double>(c.q.begin(), c.q.end());
    std::vector<double> p(c.p.begin(), c.p.end());
    for (int a = 0; a < j; ++a)
      for (int i = 0; i < d; ++i) {
        s.q[i] += u[a] * frame[a][i];
        p[i] += u[j + a] * frame[a][i];
      }
    s.q = man.retract(s.q);
    s.p = man.tangent_project(s.q, p);
    return s;
  };

  std::vector<double> trace;
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    const auto frame = man.tangent_basis(base.q);
    const auto r0 = residual_of(base, frame);
    double rn = 0.0;
    for (double v : r0) rn = std::max(rn, std::abs(v));
    trace.push_back(rn);
    if (rn <= opt.tol) return base;

    // Monodromy by finite differences.
    std::vector<double> jac(n * n, 0.0);
    for (int col = 0; col < n; ++col) {
      std::vector<double> u(n, 0.0);
      u[col] = opt.fd_step;
      const auto rc = residual_of(candidate(base, frame, u), frame);
      for (int row = 0; row < n; ++row) jac[row * n + col] = (rc[row] - r0[row]) / opt.fd_step;
    }
    // Newton step, ridge-regularized least squares when the monodromy is singular.
    std::vector<double> step(r0.begin(), r0.end());
    for (auto& v : step) v = -v;
    std::vector<double> a = jac;
    std::vector<double> rhs = step;
    if (!solve_dense(a, rhs, n)) {
      double scale = 0.0;
      for (double v : jac) scale = std::max(scale, std::abs(v));
      if (scale < 1e-12) throw DegenerateOrbit("particle_shoot: vanishing monodromy");
      std::vector<double> ata(n * n, 0.0), atb(n, 0.0);
      for (int rr = 0; rr < n; ++rr)
        for (int cc = 0; cc < n; ++cc) {
          for (int kk = 0; kk < n; ++kk) ata[rr * n + cc] += jac[kk * n + rr] * jac[kk * n + cc];
        }
      for (int rr = 0; rr < n; ++rr) {
        ata[rr * n + rr] += 1e-10 * scale * scale;
        for (int kk = 0; kk < n; ++kk) atb[rr] += jac[kk * n + rr] * step[kk];
      }
      rhs = atb;
      if (!solve_dense(ata, rhs, n))
        throw DegenerateOrbit("particle_shoot: singular monodromy");
    }
    // Damped update.
    double lambda = 1.0;
    bool accepted = false;
    for (int back = 0; back < 8; ++back) {
      std::vector<double> u(n);
      for (int i = 0; i < n; ++i) u[i] = lambda * rhs[i];
      const ParticleState trial = candidate(base, frame, u);
      const auto rt = residual_of(trial, man.tangent_basis(trial.q));
      double rtn = 0.0;
      for (double v : rt) rtn = std::max(rtn, std::abs(v));
      if (rtn < rn || rtn <= opt.tol) {
        base = trial;
        accepted = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!accepted) throw NoConvergence("particle_shoot: Newton stalled", trace);
  }
  throw NoConvergence("particle_shoot: iteration budget exhausted", trace);
}

ParticleState particle_shoot(const LoopState& field_loop, const ParticleState& guess, double T,
                             const HamiltonianSpec& spec, double tol) {
  const LoopState u =
      field_loop.twisted ? gauge_transform(field_loop, GaugeDirection::Backward) : field_loop;
  ShootOptions opt;
  opt.tol = tol;
  return particle_shoot(loop_field_spectrum(u), guess, T, spec, opt);
}

// --- residual --------------------------------------------------------------------

namespace {

struct LoopKinematics {
  std::vector<std::vector<double>> qlift;  // [axis][sample]
  std::vector<double> ramp;                // per axis
  std::vector<std::vector<double>> qdot;   // [axis][sample]
  std::vector<std::vector<double>> pdot;   // [axis][sample]
};

LoopKinematics loop_kinematics(const LoopState& u, const HamiltonianSpec& spec) {
  const int nt = static_cast<int>(u.samples.size());
  const double T = u.period;
  const double dt = T / nt;
  const int d = static_cast<int>(u.samples[0].particle.q.size());
  const bool wraps = spec.manifold.kind() == Submanifold::Kind::FlatTorus;
  LoopKinematics kin;
  kin.qlift.assign(d, std::vector<double>(nt));
  kin.ramp.assign(d, 0.0);
  kin.qdot.resize(d);
  kin.pdot.resize(d);
  for (int a = 0; a < d; ++a) {
    kin.qlift[a][0] = u.samples[0].particle.q[a];
    for (int jj = 1; jj < nt; ++jj) {
      const double step = u.samples[jj].particle.q[a] - u.samples[jj - 1].particle.q[a];
      kin.qlift[a][jj] = kin.qlift[a][jj - 1] + (wraps ? wrap_angle(step) : step);
    }
    if (wraps) {
      const double closing =
          wrap_angle(u.samples[0].particle.q[a] - u.samples[nt - 1].particle.q[a]);
      kin.ramp[a] = (kin.qlift[a][nt - 1] + closing - kin.qlift[a][0]) / T;
    }
    std::vector<double> periodic(nt), ps(nt);
    for (int jj = 0; jj < nt; ++jj) {
      periodic[jj] = kin.qlift[a][jj] - kin.ramp[a] * (dt * jj);
      ps[jj] = u.samples[jj].particle.p[a];
    }
    kin.qdot[a] = spectral_derivative_real(periodic, T);
    for (int jj = 0; jj < nt; ++jj) kin.qdot[a][jj] += kin.ramp[a];
    kin.pdot[a] = spectral_derivative_real(ps, T);
  }
  return kin;
}

}  // namespace

ResidualReport orbit_residual(const LoopState& loop, const HamiltonianSpec& spec) {
  const LoopState u = loop.twisted ? gauge_transform(loop, GaugeDirection::Backward) : loop;
  validate_loop(u);
  const int nt = static_cast<int>(u.samples.size());
  const double T = u.period;
  const int d = static_cast<int>(u.samples[0].particle.q.size());
  const LoopKinematics kin = loop_kinematics(u, spec);

  // Field derivative per mode.
  const FieldState& f0 = u.samples[0].field;
  std::vector<std::vector<std::complex<double>>> wdot(
      f0.size(), std::vector<std::complex<double>>(nt));
  {
    std::vector<std::complex<double>> series(nt);
    for (int i = 0; i < f0.size(); ++i) {
      for (int jj = 0; jj < nt; ++jj) series[jj] = u.samples[jj].field.coeff(i);
      wdot[i] = spectral_derivative(series, T);
    }
  }

  ResidualReport rep;
  for (int jj = 0; jj < nt; ++jj) {
    const double t = T * jj / nt;
    const FullState vf = vector_field(u.samples[jj], t, spec);
    for (int a = 0; a < d; ++a) {
      rep.q = std::max(rep.q, std::abs(kin.qdot[a][jj] - vf.particle.q[a]));
      rep.p = std::max(rep.p, std::abs(kin.pdot[a][jj] - vf.particle.p[a]));
    }
    FieldState diff(f0.dim(), f0.truncation());
    for (int i = 0; i < f0.size(); ++i) diff.coeff(i) = wdot[i][jj] - vf.field.coeff(i);
    rep.field = std::max(rep.field, scale_norm(diff, {0.0}));
  }
  rep.total = std::max({rep.q, rep.p, rep.field});
  return rep;
}

// --- alternating fixed point ---------------------------------------------------------

namespace {

struct SweepState {
  std::vector<ParticleState> particle;
  SpaceTimeSpectrum phi;
  bool have_field = false;
};

double particle_distance(const std::vector<ParticleState>& a, const std::vector<ParticleState>& b,
                         bool wraps) {
  double worst = 0.0;
  for (std::size_t jj = 0; jj < a.size(); ++jj)
    for (std::size_t i = 0; i < a[jj].q.size(); ++i) {
      const double dq = wraps ? wrap_angle(b[jj].q[i] - a[jj].q[i]) : b[jj].q[i] - a[jj].q[i];
      worst = std::max(worst, std::abs(dq));
      worst = std::max(worst, std::abs(b[jj].p[i] - a[jj].p[i]));
    }
  return worst;
}

double spectrum_distance(const SpaceTimeSpectrum& a, const SpaceTimeSpectrum& b) {
  double worst = 0.0;
  for (int m = -a.time_truncation(); m <= a.time_truncation(); ++m)
    for (int i = 0; i < a.space_size(); ++i)
      worst = std::max(worst, std::abs(a.at(m, i) - b.at(m, i)));
  return worst;
}

PeriodicOrbit run_alternating(const std::vector<std::vector<double>>& q0_loop,
                              const HamiltonianSpec& spec, double T,
                              const OrbitSolverOptions& opt, SweepState& st,
                              std::vector<double>& distances) {
  const int nt = static_cast<int>(q0_loop.size());
  const int k = spec.bump.truncation();
  const int M = opt.time_modes;
  const bool wraps = spec.manifold.kind() == Submanifold::Kind::FlatTorus;
  const double vol = two_pi_pow(spec.dim);

  if (st.particle.empty()) {
    st.particle.resize(nt);
    for (int jj = 0; jj < nt; ++jj) {
      st.particle[jj].q = spec.manifold.retract(q0_loop[jj]);
      st.particle[jj].p.assign(spec.manifold.ambient_dim(), 0.0);
    }
    st.phi = SpaceTimeSpectrum(spec.dim, k, M, T);
  }

  int iterations = 0;
  for (int it = 0; it < opt.max_iter; ++it) {
    ++iterations;
    // (1) field solve for the current particle loop.
    std::vector<std::vector<double>> qs(nt);
    for (int jj = 0; jj < nt; ++jj) qs[jj] = st.particle[jj].q;
    SpaceTimeSpectrum phi_new(spec.dim, k, M, T);
    if (spec.epsilon != 0.0) {
      SpaceTimeSpectrum forcing = sample_forcing(qs, spec.bump, T, M, k);
      for (int m = -M; m <= M; ++m)
        for (int i = 0; i < forcing.space_size(); ++i)
          forcing.at(m, i) *= spec.epsilon * vol;
      phi_new = resolvent_solve(forcing, T).first;
    }
    const double theta = st.have_field ? opt.relaxation : 1.0;
    SpaceTimeSpectrum phi_mix = st.phi;
    for (int m = -M; m <= M; ++m)
      for (int i = 0; i < phi_mix.space_size(); ++i)
        phi_mix.at(m, i) = (1.0 - theta) * st.phi.at(m, i) + theta * phi_new.at(m, i);
    const double field_dist = spectrum_distance(st.phi, phi_mix);
    st.phi = phi_mix;
    st.have_field = true;

    // (2) particle solve under the frozen field.
    const SpaceTimeSpectrum w = pair_spectrum_from_phi(st.phi);
    ShootOptions sopt;
    sopt.tol = opt.newton_tol;
    sopt.substeps = opt.shoot_substeps;
    const ParticleState s0 = particle_shoot(w, st.particle[0], T, spec, sopt);
    const auto traj = particle_trajectory(w, s0, T, nt, spec, opt.shoot_substeps);
    const double pdist = particle_distance(st.particle, traj, wraps);
    st.particle = traj;

    const double dist = pdist + field_dist;
    distances.push_back(dist);
    if (it >= 1 && dist < 0.2 * opt.tol) break;
    // Stalled at the iteration's floor: more sweeps cannot help.
    if (it >= 2 && dist > 0.9 * distances[distances.size() - 2]) break;
  }

  const SpaceTimeSpectrum w = pair_spectrum_from_phi(st.phi);
  PeriodicOrbit orbit;
  orbit.loop = assemble_loop(st.particle, w, T);
  orbit.residual = orbit_residual(orbit.loop, spec).total;
  orbit.action_value = action(orbit.loop, spec);
  orbit.iterations = iterations;
  orbit.iterate_distances = distances;
  if (spec.epsilon != 0.0) {
    orbit.field_decay = decay_fit(st.phi);
  }
  return orbit;
}

}  // namespace

PeriodicOrbit alternating_fixed_point(const std::vector<std::vector<double>>& q0_loop,
                                      const HamiltonianSpec& spec, double T,
                                      const OrbitSolverOptions& opt) {
  if (spec.coupling != CouplingId::Linear)
    throw std::invalid_argument(
        "alternating_fixed_point: resolvent sweep requires the linear coupling entry");
  const int nt = static_cast<int>(q0_loop.size());
  if (nt < 16 || !is_power_of_two(nt))
    throw std::invalid_argument("alternating_fixed_point: Nt must be a power of two >= 16");
  if (nt < 2 * opt.time_modes + 2)
    throw std::invalid_argument("alternating_fixed_point: Nt must be >= 2M+2");

  std::vector<double> distances;
  SweepState st;
  try {
    PeriodicOrbit orbit = run_alternating(q0_loop, spec, T, opt, st, distances);
    if (orbit.residual <= opt.tol) return orbit;
  } catch (const NoConvergence&) {
    // fall through to continuation
  }

  // Continuation: geometric coupling ramp from eps / 2^(steps-1), warm starts.
  std::vector<double> cont_trace = distances;
  SweepState warm;
  for (int stage = 0; stage < opt.continuation_steps; ++stage) {
    HamiltonianSpec staged = spec;
    staged.epsilon =
        spec.epsilon * std::pow(2.0, -(opt.continuation_steps - 1 - stage));
    std::vector<double> stage_trace;
    try {
      PeriodicOrbit orbit = run_alternating(q0_loop, staged, T, opt, warm, stage_trace);
      cont_trace.insert(cont_trace.end(), stage_trace.begin(), stage_trace.end());
      if (stage == opt.continuation_steps - 1 && orbit.residual <= opt.tol) {
        orbit.iterate_distances = cont_trace;
        return orbit;
      }
      if (stage == opt.continuation_steps - 1)
        throw NoConvergence("alternating_fixed_point: residual above tolerance", cont_trace);
    } catch (const NoConvergence&) {
      if (stage == opt.continuation_steps - 1) throw;
    }
  }
  throw NoConvergence("alternating_fixed_point: continuation failed", cont_trace);
}

// --- action gradient and descent ----------------------------------------------------

LoopGradient action_gradient(const LoopState& u, const HamiltonianSpec& spec,
                             const CutoffParams& cut) {
  if (u.twisted) throw std::invalid_argument("action_gradient: untwist the loop first");
  validate_loop(u);
  const int nt = static_cast<int>(u.samples.size());
  const double T = u.period;
  const int d = static_cast<int>(u.samples[0].particle.q.size());
  const LoopKinematics kin = loop_kinematics(u, spec);

  LoopGradient g;
  g.q.assign(nt, std::vector<double>(d, 0.0));
  g.p.assign(nt, std::vector<double>(d, 0.0));
  g.field.assign(nt, FieldState(u.samples[0].field.dim(), u.samples[0].field.truncation()));

  // Field time derivative per mode.
  const FieldState& f0 = u.samples[0].field;
  const ModeBall& ball = f0.ball();
  std::vector<std::vector<std::complex<double>>> wdot(
      f0.size(), std::vector<std::complex<double>>(nt));
  {
    std::vector<std::complex<double>> series(nt);
    for (int i = 0; i < f0.size(); ++i) {
      for (int jj = 0; jj < nt; ++jj) series[jj] = u.samples[jj].field.coeff(i);
      wdot[i] = spectral_derivative(series, T);
    }
  }

  for (int jj = 0; jj < nt; ++jj) {
    const double t = T * jj / nt;
    const FullState& s = u.samples[jj];
    const FullState gg = grad_modified_g(s, t, spec, cut);
    std::vector<double> gq(d), gp(d);
    for (int a = 0; a < d; ++a) {
      gq[a] = -kin.pdot[a][jj] - gg.particle.q[a];
      gp[a] = kin.qdot[a][jj] - gg.particle.p[a];
    }
    g.q[jj] = spec.manifold.tangent_project(s.particle.q, gq);
    g.p[jj] = spec.manifold.tangent_project(s.particle.q, gp);
    for (int i = 0; i < f0.size(); ++i) {
      g.field[jj].coeff(i) = std::complex<double>(0.0, -1.0) * wdot[i][jj] -
                             ball.omega(i) * s.field.coeff(i) - gg.field.coeff(i);
    }
  }
  return g;
}

namespace {

double gradient_norm_sq(const LoopGradient& g, const LoopState& u) {
  const int nt = static_cast<int>(u.samples.size());
  const double dt = u.period / nt;
  const ModeBall& ball = u.samples[0].field.ball();
  double s = 0.0;
  for (int jj = 0; jj < nt; ++jj) {
    for (double v : g.q[jj]) s += dt * v * v;
    for (double v : g.p[jj]) s += dt * v * v;
    for (int i = 0; i < g.field[jj].size(); ++i)
      s += dt * ball.omega(i) * std::norm(g.field[jj].coeff(i));
  }
  return s;
}

/// Frequency of bin b under the antisymmetric spectral-derivative convention
/// (Nyquist maps to zero).
double mu_of_bin(int b, int nt, double T) {
  if (2 * b == nt) return 0.0;
  return kTwoPi / T * bin_frequency(b, nt);
}

}  // namespace

std::pair<LoopState, DescentTrace> floer_descent(const LoopState& u0, const CutoffParams& cut,
                                                 const HamiltonianSpec& spec,
                                                 const DescentOptions& opt) {
  const bool was_twisted = u0.twisted;
  LoopState u = was_twisted ? gauge_transform(u0, GaugeDirection::Backward) : u0;
  validate_loop(u);
  const int nt = static_cast<int>(u.samples.size());
  const double T = u.period;
  const double dt = T / nt;
  const int d = static_cast<int>(u.samples[0].particle.q.size());
  const int field_dim = u.samples[0].field.dim();
  const int field_k = u.samples[0].field.truncation();
  const int nmodes = u.samples[0].field.size();
  const ModeBall& ball = mode_ball(field_dim, field_k);

  DescentTrace trace;
  trace.actions.push_back(action(u, spec, cut));

  double ds = opt.ds;
  int rejects_in_row = 0;

  // Particle kinetic-block eigensystem per bin: K = [[0, -i mu],[i mu, -1]],
  // sigma_pm = (-1 +- sqrt(1+4 mu^2))/2, v = (-i mu, sigma)/|.|.
  struct EigPair {
    double sigma[2];
    std::complex<double> v[2][2];  // [which][component]
  };
  std::vector<EigPair> eig(nt);
  for (int b = 0; b < nt; ++b) {
    const double mu = mu_of_bin(b, nt, T);
    const double root = std::sqrt(1.0 + 4.0 * mu * mu);
    const double sig[2] = {0.5 * (-1.0 + root), 0.5 * (-1.0 - root)};
    for (int which = 0; which < 2; ++which) {
      eig[b].sigma[which] = sig[which];
      std::complex<double> v0(0.0, -mu), v1(sig[which], 0.0);
      if (mu == 0.0) {  // sigma = 0 -> (1,0); sigma = -1 -> (0,1)
        v0 = which == 0 ? 1.0 : 0.0;
        v1 = which == 0 ? 0.0 : 1.0;
      }
      const double len = std::sqrt(std::norm(v0) + std::norm(v1));
      eig[b].v[which][0] = v0 / len;
      eig[b].v[which][1] = v1 / len;
    }
  }

  LoopGradient g = action_gradient(u, spec, cut);
  double phi_merit = gradient_norm_sq(g, u);

  for (int step = 0; step < opt.max_steps; ++step) {
    const double gnorm = std::sqrt(phi_merit);
    if (gnorm <= opt.stationary_tol) {
      trace.converged = true;
      break;
    }

    // Mode-space step from the current gradient.
    const LoopKinematics kin = loop_kinematics(u, spec);
    double step_energy = 0.0;
    LoopState cand = u;

    // Particle axes.
    for (int a = 0; a < d; ++a) {
      std::vector<std::complex<double>> qper(nt), ps(nt), gq(nt), gp(nt);
      for (int jj = 0; jj < nt; ++jj) {
        qper[jj] = kin.qlift[a][jj] - kin.ramp[a] * (dt * jj);
        ps[jj] = u.samples[jj].particle.p[a];
        gq[jj] = g.q[jj][a];
        gp[jj] = g.p[jj][a];
      }
      auto qh = dft_coeffs(qper);
      auto ph = dft_coeffs(ps);
      const auto gqh = dft_coeffs(gq);
      const auto gph = dft_coeffs(gp);
      for (int b = 0; b < nt; ++b) {
        for (int which = 0; which < 2; ++which) {
          const double sig = eig[b].sigma[which];
          const std::complex<double>* v = eig[b].v[which];
          const std::complex<double> c =
              std::conj(v[0]) * gqh[b] + std::conj(v[1]) * gph[b];
          const double rate = std::abs(sig);
          const double sign = sig > 0.0 ? 1.0 : -1.0;
          const double x = rate * ds;
          const std::complex<double> delta = -sign * c * ds * phi1(x);
          qh[b] += delta * v[0];
          ph[b] += delta * v[1];
          step_energy += T * std::norm(c) * ds * phi2(x);
        }
      }
      const auto qnew = dft_synthesize(qh);
      const auto pnew = dft_synthesize(ph);
      for (int jj = 0; jj < nt; ++jj) {
        cand.samples[jj].particle.q[a] = qnew[jj].real() + kin.ramp[a] * (dt * jj);
        cand.samples[jj].particle.p[a] = pnew[jj].real();
      }
    }
    for (int jj = 0; jj < nt; ++jj) {
      cand.samples[jj].particle.q = spec.manifold.retract(cand.samples[jj].particle.q);
      cand.samples[jj].particle.p =
          spec.manifold.tangent_project(cand.samples[jj].particle.q, cand.samples[jj].particle.p);
    }

    // Field modes: lambda(b, n) = mu_b - omega_n.
    {
      std::vector<std::complex<double>> series(nt), gser(nt);
      for (int i = 0; i < nmodes; ++i) {
        for (int jj = 0; jj < nt; ++jj) {
          series[jj] = u.samples[jj].field.coeff(i);
          gser[jj] = g.field[jj].coeff(i);
        }
        auto wh = dft_coeffs(series);
        const auto gh = dft_coeffs(gser);
        const double w = ball.omega(i);
        for (int b = 0; b < nt; ++b) {
          const double lam = mu_of_bin(b, nt, T) - w;
          const double rate = std::abs(lam);
          const double sign = lam > 0.0 ? 1.0 : (lam < 0.0 ? -1.0 : 1.0);
          const double x = rate * ds;
          wh[b] += -sign * gh[b] * ds * phi1(x);
          step_energy += T * w * std::norm(gh[b]) * ds * phi2(x);
        }
        const auto wnew = dft_synthesize(wh);
        for (int jj = 0; jj < nt; ++jj) cand.samples[jj].field.coeff(i) = wnew[jj];
      }
    }

    const LoopGradient gcand = action_gradient(cand, spec, cut);
    const double phi_cand = gradient_norm_sq(gcand, cand);
    if (phi_cand < phi_merit * (1.0 + 1e-12)) {
      u = std::move(cand);
      g = gcand;
      phi_merit = phi_cand;
      trace.energy += step_energy;
      trace.actions.push_back(action(u, spec, cut));
      ++trace.steps_accepted;
      rejects_in_row = 0;
      ds = std::min(ds * opt.grow, opt.ds_max);
    } else {
      ++trace.steps_rejected;
      ++rejects_in_row;
      ds *= 0.5;
      if (rejects_in_row > opt.max_rejects)
        throw NoConvergence("floer_descent: step rejection cascade", trace.actions);
    }
  }
  if (!trace.converged && std::sqrt(phi_merit) <= opt.stationary_tol) trace.converged = true;

  trace.terminal_grad_norm = std::sqrt(phi_merit);
  trace.terminal_residual = orbit_residual(u, spec).total;
  LoopState out = was_twisted ? gauge_transform(u, GaugeDirection::Forward) : u;
  return {std::move(out), trace};
}

// --- Galerkin convergence probe ----------------------------------------------------

namespace {

FieldState embed_field(const FieldState& f, int k_big) {
  FieldState out(f.dim(), k_big);
  const ModeBall& bo = out.ball();
  const ModeBall& bf = f.ball();
  for (int i = 0; i < f.size(); ++i) out.coeff(bo.index_of(bf.mode(i))) = f.coeff(i);
  return out;
}

}  // namespace

std::vector<GalerkinProbeRow> galerkin_convergence_probe(const HamiltonianSpec& spec,
                                                         const CutoffParams& cut,
                                                         const std::vector<int>& k_list,
                                                         int reference_k, int ensemble,
                                                         std::uint64_t seed) {
  for (int k : k_list)
    if (k > reference_k)
      throw std::invalid_argument("galerkin_convergence_probe: reference must exceed k_list");
  if (spec.bump.truncation() < reference_k)
    throw std::invalid_argument("galerkin_convergence_probe: bump must cover the reference");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  // Ensemble of states at the reference truncation.
  std::vector<FullState> states;
  const Submanifold& man = spec.manifold;
  std::vector<double> base(man.ambient_dim(), 0.0);
  if (man.kind() == Submanifold::Kind::Sphere) {
    base = man.center();
    base[0] += man.radius();
  } else {
    base = man.retract(base);
  }
  for (int e = 0; e < ensemble; ++e) {
    FullState s;
    const auto frame = man.tangent_basis(base);
    std::vector<double> dir(man.ambient_dim(), 0.0);
    for (const auto& ev : frame) {
      const double c = gauss(rng);
      for (std::size_t i = 0; i < dir.size(); ++i) dir[i] += c * ev[i];
    }
    double len = 0.0;
    for (double v : dir) len += v * v;
    len = std::sqrt(len);
    ParticleState ps{base, dir};
    if (len > 0.0) {
      for (auto& v : ps.p) v /= len;
      ps = man.geodesic_step(ps, unif(rng) * 3.0);
    }
    for (auto& v : ps.p) v *= unif(rng);
    s.particle = man.kind() == Submanifold::Kind::Sphere
                     ? ParticleState{ps.q, man.tangent_project(ps.q, ps.p)}
                     : ps;
    s.field = FieldState(spec.dim, reference_k);
    const ModeBall& ball = s.field.ball();
    for (int i = 0; i < s.field.size(); ++i) {
      const double decay = std::exp(-0.25 * std::sqrt(static_cast<double>(ball.n_squared(i))));
      s.field.coeff(i) = 0.5 * decay * std::complex<double>(gauss(rng), gauss(rng));
    }
    // Keep the ensemble inside the smoothness cutoff so the probe measures
    // the projection gap of the interaction gradient, not cutoff switching.
    const double n3 = c3_majorant(s.field, spec.bump);
    if (n3 > 0.5 * cut.r1) s.field *= 0.5 * cut.r1 / n3;
    states.push_back(std::move(s));
  }

  std::vector<GalerkinProbeRow> rows;
  for (int k : k_list) {
    double gap = 0.0;
    for (const auto& s : states) {
      const double t = 0.3 * spec.period;
      const FullState gref = grad_modified_g(s, t, spec, cut);
      FullState sk = s;
      sk.field = embed_field(galerkin_project(s.field, k), reference_k);
      FullState gk = grad_modified_g(sk, t, spec, cut);
      gk.field = embed_field(galerkin_project(gk.field, k), reference_k);
      double dq = 0.0;
      for (std::size_t i = 0; i < gref.particle.q.size(); ++i) {
        dq += (gref.particle.q[i] - gk.particle.q[i]) * (gref.particle.q[i] - gk.particle.q[i]);
        dq += (gref.particle.p[i] - gk.particle.p[i]) * (gref.particle.p[i] - gk.particle.p[i]);
      }
      FieldState df = gref.field;
      df -= gk.field;
      gap = std::max(gap, std::sqrt(dq) + scale_norm(df, {0.0}));
    }
    rows.push_back({k, gap});
  }
  return rows;
}

double loop_distance_mod_shift(const LoopState& a, const LoopState& b) {
  if (a.samples.size() != b.samples.size() || a.twisted != b.twisted)
    return std::numeric_limits<double>::max();
  const int nt = static_cast<int>(a.samples.size());
  double best = std::numeric_limits<double>::max();
  for (int shift = 0; shift < nt; ++shift) {
    double d = 0.0;
    for (int j = 0; j < nt && d < best; ++j) {
      const FullState& x = a.samples[j];
      const FullState& y = b.samples[(j + shift) % nt];
      for (std::size_t i = 0; i < x.particle.q.size(); ++i) {
        d = std::max(d, std::abs(x.particle.q[i] - y.particle.q[i]));
        d = std::max(d, std::abs(x.particle.p[i] - y.particle.p[i]));
      }
      FieldState diff = x.field;
      diff -= y.field;
      d = std::max(d, scale_norm(diff, {0.0}));
    }
    best = std::min(best, d);
  }
  return best;
}

bool orbits_equivalent(const PeriodicOrbit& a, const PeriodicOrbit& b, double tol) {
  return loop_distance_mod_shift(a.loop, b.loop) <= tol;
}

double galerkin_fit_rate(const std::vector<GalerkinProbeRow>& rows) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int n = 0;
  for (const auto& r : rows) {
    if (r.gap <= 0.0) continue;
    const double x = r.k;
    const double y = std::log(r.gap);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return 0.0;
  const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return -slope;
}

}  // namespace pfs
