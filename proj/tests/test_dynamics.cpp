#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "pfs/dynamics.hpp"

using namespace pfs;

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;
const double kGoldenPeriod = kTwoPi * std::sqrt(0.5 * (1.0 + std::sqrt(5.0)));

HamiltonianSpec circle_spec(double eps, int k, CouplingId coupling = CouplingId::Linear,
                            double rho0 = 0.05) {
  HamiltonianSpec s;
  s.dim = 2;
  s.manifold = Submanifold::sphere(2, 1.0, {kPi, kPi});
  s.period = kGoldenPeriod;
  s.bump = BumpProfile::exponential(2, k, rho0, 1.0);
  s.epsilon = eps;
  s.coupling = coupling;
  s.gamma = coupling == CouplingId::SineLinear ? 0.5 : 0.0;
  s.potential = {PotentialTerm{{1, 0, 0}, 0, 0.4, 0.0}};
  s.c0 = 0.5;
  s.c1 = 0.4;
  s.c2 = 1.0;
  return s;
}

FullState random_state(const HamiltonianSpec& spec, std::mt19937_64& rng, double field_amp = 0.5) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, kTwoPi);
  FullState s;
  const double th = unif(rng);
  s.particle.q = {kPi + std::cos(th), kPi + std::sin(th)};
  const double pmag = 0.7 * gauss(rng);
  s.particle.p = {-pmag * std::sin(th), pmag * std::cos(th)};
  s.field = oracles::random_pair_field(spec.dim, spec.bump.truncation(), field_amp, 0.4, rng);
  return s;
}

double state_distance(const FullState& a, const FullState& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.particle.q.size(); ++i) {
    d = std::max(d, std::abs(a.particle.q[i] - b.particle.q[i]));
    d = std::max(d, std::abs(a.particle.p[i] - b.particle.p[i]));
  }
  FieldState diff = a.field;
  diff -= b.field;
  return std::max(d, scale_norm(diff, {0.0}));
}

/// Central finite differences of a scalar state function in every coordinate,
/// reported as (ambient q-grad, ambient p-grad, field complex pair grad).
struct FdGrad {
  std::vector<double> q, p;
  std::vector<std::complex<double>> field;  // d/dRe + i d/dIm per mode
};

template <typename F>
FdGrad fd_gradient(const FullState& s, F&& h, double step = 1e-4) {
  FdGrad g;
  const int d = static_cast<int>(s.particle.q.size());
  g.q.resize(d);
  g.p.resize(d);
  for (int i = 0; i < d; ++i) {
    FullState a = s, b = s;
    a.particle.q[i] += step;
    b.particle.q[i] -= step;
    g.q[i] = (h(a) - h(b)) / (2.0 * step);
    a = s;
    b = s;
    a.particle.p[i] += step;
    b.particle.p[i] -= step;
    g.p[i] = (h(a) - h(b)) / (2.0 * step);
  }
  g.field.resize(s.field.size());
  for (int i = 0; i < s.field.size(); ++i) {
    FullState a = s, b = s;
    a.field.coeff(i) += step;
    b.field.coeff(i) -= step;
    const double dre = (h(a) - h(b)) / (2.0 * step);
    a = s;
    b = s;
    a.field.coeff(i) += std::complex<double>(0.0, step);
    b.field.coeff(i) -= std::complex<double>(0.0, step);
    const double dim_ = (h(a) - h(b)) / (2.0 * step);
    g.field[i] = {dre, dim_};
  }
  return g;
}

}  // namespace

TEST_SUITE_BEGIN("dynamics");

TEST_CASE("hamiltonian_total elementary values") {
  HamiltonianSpec spec = circle_spec(1.0, 4, CouplingId::Linear, 1.0);
  spec.potential.clear();

  FullState rest;
  rest.particle.q = {kPi + 1.0, kPi};
  rest.particle.p = {0.0, 0.0};
  rest.field = FieldState(2, 4);
  CHECK(hamiltonian_total(rest, 0.0, spec) == doctest::Approx(0.0).epsilon(1e-15));

  FullState moving = rest;
  moving.particle.p = {0.0, 1.0};
  CHECK(hamiltonian_total(moving, 0.0, spec) == doctest::Approx(0.5).epsilon(1e-15));

  // Single field mode n = 0 with phi_hat(0) = 1, pi = 0, bump with rho0 = 1:
  // H_field = 1/2, H_inter = (2 pi)^2.
  HamiltonianSpec s0 = circle_spec(1.0, 0, CouplingId::Linear, 1.0);
  s0.potential.clear();
  FullState one = rest;
  one.field = FieldState(2, 0);
  one.field.set_coeff({0, 0, 0}, 1.0);
  const double h = hamiltonian_total(one, 0.0, s0);
  CHECK(h == doctest::Approx(0.5 + kTwoPi * kTwoPi).epsilon(1e-13));
  // Against quadrature: interaction = int phi(x) rho(q - x) dx = (2 pi)^2 here.
  const double quad = kTwoPi * kTwoPi *
                      oracles::grid_mean(2, 8, [&](const std::vector<double>&) { return 1.0; });
  CHECK(h - 0.5 == doctest::Approx(quad).epsilon(1e-13));
}

TEST_CASE("grad_hamiltonian matches finite differences") {
  std::mt19937_64 rng(51);
  for (CouplingId cid : {CouplingId::Linear, CouplingId::SineLinear}) {
    HamiltonianSpec spec = circle_spec(0.8, 5, cid);
    for (int trial = 0; trial < 6; ++trial) {
      const FullState s = random_state(spec, rng);
      const double t = 0.3 * spec.period * trial;
      const FullState g = grad_hamiltonian(s, t, spec);
      const FdGrad fd =
          fd_gradient(s, [&](const FullState& u) { return hamiltonian_total(u, t, spec); });
      double gmax = 1.0;
      for (double v : g.particle.q) gmax = std::max(gmax, std::abs(v));
      for (double v : g.particle.p) gmax = std::max(gmax, std::abs(v));
      // q and p slots: tangential projections of the ambient FD gradient.
      const auto pq = spec.manifold.tangent_project(s.particle.q, fd.q);
      const auto pp = spec.manifold.tangent_project(s.particle.q, fd.p);
      for (int i = 0; i < 2; ++i) {
        CHECK(std::abs(g.particle.q[i] - pq[i]) <= 1e-6 * gmax);
        CHECK(std::abs(g.particle.p[i] - pp[i]) <= 1e-6 * gmax);
      }
      const ModeBall& ball = s.field.ball();
      for (int i = 0; i < s.field.size(); ++i) {
        const std::complex<double> expect = fd.field[i] / ball.omega(i);
        CHECK(std::abs(g.field.coeff(i) - expect) <=
              1e-6 * std::max(1.0, std::abs(g.field.coeff(i))));
      }
    }
  }
}

TEST_CASE("vector_field is the symplectic rotation of the gradient") {
  std::mt19937_64 rng(53);
  HamiltonianSpec spec = circle_spec(0.6, 5);
  for (int trial = 0; trial < 8; ++trial) {
    const FullState s = random_state(spec, rng);
    const double t = 0.41 * trial;
    const FullState vf = vector_field(s, t, spec);
    const FullState g = grad_hamiltonian(s, t, spec);
    for (int i = 0; i < 2; ++i)
      CHECK(std::abs(vf.particle.q[i] - g.particle.p[i]) <= 1e-10);
    const auto pdot_tan = spec.manifold.tangent_project(s.particle.q, vf.particle.p);
    for (int i = 0; i < 2; ++i) CHECK(std::abs(pdot_tan[i] + g.particle.q[i]) <= 1e-10);
    for (int i = 0; i < s.field.size(); ++i) {
      const std::complex<double> expect = std::complex<double>(0.0, 1.0) * g.field.coeff(i);
      CHECK(std::abs(vf.field.coeff(i) - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
    }
  }
}

TEST_CASE("vector_field decouples and matches the first-order field system") {
  std::mt19937_64 rng(57);
  HamiltonianSpec spec = circle_spec(1.0, 5);
  const FullState s = random_state(spec, rng);

  // eps = 0: field part is the free generator, particle feels only V.
  HamiltonianSpec dec = spec;
  dec.epsilon = 0.0;
  const FullState vf = vector_field(s, 0.2, dec);
  const ModeBall& ball = s.field.ball();
  for (int i = 0; i < s.field.size(); ++i) {
    const std::complex<double> expect =
        std::complex<double>(0.0, ball.omega(i)) * s.field.coeff(i);
    CHECK(std::abs(vf.field.coeff(i) - expect) <= 1e-13 * std::max(1.0, std::abs(expect)));
  }

  // Linear coupling: d_t phi = B pi exactly; d_t pi = -B phi - eps (2pi)^d B^{-1} rho(q - .).
  const FullState vc = vector_field(s, 0.2, spec);
  const FieldState phidot = phi_part(vc.field);
  const FieldState bpi = apply_b(pi_part(s.field), 1.0);
  for (int i = 0; i < phidot.size(); ++i)
    CHECK(std::abs(phidot.coeff(i) - bpi.coeff(i)) <= 1e-12 * std::max(1.0, std::abs(bpi.coeff(i))));
  const FieldState pidot = pi_part(vc.field);
  const FieldState bphi = apply_b(phi_part(s.field), 1.0);
  const ModeBall& bb = spec.bump.ball();
  for (int i = 0; i < pidot.size(); ++i) {
    const double th = -dot_mode(ball.mode(i), s.particle.q);
    const std::complex<double> src = kTwoPi * kTwoPi *
                                     std::conj(spec.bump.coeff(bb.index_of(ball.mode(i)))) *
                                     std::polar(1.0, th) / ball.omega(i);
    const std::complex<double> expect = -bphi.coeff(i) - spec.epsilon * src;
    CHECK(std::abs(pidot.coeff(i) - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
  }
}

TEST_CASE("cutoff function") {
  CHECK(cutoff_chi(0.5, 1.0) == 1.0);
  CHECK(cutoff_chi(1.0, 1.0) == 1.0);
  CHECK(cutoff_chi(2.0, 1.0) == 0.0);
  CHECK(cutoff_chi(1.5, 1.0) == doctest::Approx(0.5).epsilon(1e-14));
  double worst = 0.0;
  for (int i = 0; i <= 2000; ++i) {
    const double r = 0.9 + 1.2 * i / 2000.0;
    worst = std::max(worst, std::abs(cutoff_chi_prime(r, 1.0)));
    // Derivative consistency.
    const double fd = (cutoff_chi(r + 1e-6, 1.0) - cutoff_chi(r - 1e-6, 1.0)) / 2e-6;
    CHECK(std::abs(fd - cutoff_chi_prime(r, 1.0)) <= 1e-5);
  }
  CHECK(worst <= 4.0);
}

TEST_CASE("modified Hamiltonian: neutrality inside, zero outside, bounded gradient") {
  std::mt19937_64 rng(61);
  HamiltonianSpec spec = circle_spec(0.9, 5);
  const CutoffParams cut{5.0, 2.0};

  // Inside both cutoffs: bitwise identical to the unmodified twisted Hamiltonian.
  FullState small = random_state(spec, rng, 1e-4);
  small.particle.p = {0.0, 0.0};
  REQUIRE(c3_majorant(small.field, spec.bump) < cut.r1);
  CHECK(modified_hamiltonian_g(small, 0.3, spec, cut) == hamiltonian_g(small, 0.3, spec));
  const FullState ga = grad_modified_g(small, 0.3, spec, cut);
  const FullState gb = grad_g(small, 0.3, spec);
  for (int i = 0; i < ga.field.size(); ++i) CHECK(ga.field.coeff(i) == gb.field.coeff(i));
  for (int i = 0; i < 2; ++i) {
    CHECK(ga.particle.q[i] == gb.particle.q[i]);
    CHECK(ga.particle.p[i] == gb.particle.p[i]);
  }

  // Far outside the field cutoff: interaction gone.
  FullState big = random_state(spec, rng, 1.0);
  big.field *= 1e4;
  REQUIRE(c3_majorant(big.field, spec.bump) >= cut.r1 + 1.0);
  FullState nointer = big;
  const double hv = modified_hamiltonian_g(big, 0.1, spec, cut);
  double kin = 0.0;
  for (double v : big.particle.p) kin += 0.5 * v * v;
  CHECK(hv == doctest::Approx(kin + potential_value(spec, 0.1, big.particle.q)).epsilon(1e-15));
  const FullState gbig = grad_modified_g(big, 0.1, spec, cut);
  for (int i = 0; i < gbig.field.size(); ++i) CHECK(std::abs(gbig.field.coeff(i)) == 0.0);

  // Field-slot gradient uniformly bounded across six decades of amplitude.
  double sup_small = 0.0, sup_large = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const double amp = std::pow(10.0, -3.0 + 6.0 * (trial % 10) / 9.0);
    FullState s = random_state(spec, rng, amp);
    const FullState g = grad_modified_g(s, 0.2, spec, cut);
    const double n = scale_norm(g.field, {0.0});
    if (amp <= 1.0)
      sup_small = std::max(sup_small, n);
    else
      sup_large = std::max(sup_large, n);
  }
  CHECK(sup_large <= sup_small + 1e-12);

  // FD consistency of the modified gradient in the transition region.
  for (int trial = 0; trial < 20; ++trial) {
    FullState s = random_state(spec, rng, 0.3);
    const double n3 = c3_majorant(s.field, spec.bump);
    FullState scaled = s;
    scaled.field *= (cut.r1 + 0.5) / n3;  // inside the chi1 transition band
    scaled.particle.p[0] *= 4.0;          // may or may not cross the ln|p| band
    scaled.particle.p = spec.manifold.tangent_project(scaled.particle.q, scaled.particle.p);
    const double t = 0.7;
    const FullState g = grad_modified_g(scaled, t, spec, cut);
    // Smaller step here: the smoothstep's third derivative is large inside
    // the transition band and drives the h^2 truncation term.
    const FdGrad fd = fd_gradient(
        scaled, [&](const FullState& u) { return modified_hamiltonian_g(u, t, spec, cut); },
        2e-5);
    const auto pq = spec.manifold.tangent_project(scaled.particle.q, fd.q);
    const auto pp = spec.manifold.tangent_project(scaled.particle.q, fd.p);
    double gmax = 1.0;
    for (double v : g.particle.q) gmax = std::max(gmax, std::abs(v));
    for (int i = 0; i < 2; ++i) {
      CHECK(std::abs(g.particle.q[i] - pq[i]) <= 2e-6 * gmax);
      CHECK(std::abs(g.particle.p[i] - pp[i]) <= 2e-6 * gmax);
    }
    const ModeBall& ball = scaled.field.ball();
    for (int i = 0; i < scaled.field.size(); ++i) {
      const std::complex<double> expect = fd.field[i] / ball.omega(i);
      CHECK(std::abs(g.field.coeff(i) - expect) <=
            2e-6 * std::max(1.0, std::abs(g.field.coeff(i))));
    }
  }
}

TEST_CASE("strang_step exactness, reversibility, order") {
  std::mt19937_64 rng(67);
  // Decoupled, V = 0: the step is the exact product flow.
  HamiltonianSpec free_spec = circle_spec(0.0, 5);
  free_spec.potential.clear();
  FullState s = random_state(free_spec, rng);
  const double h0 = hamiltonian_total(s, 0.0, free_spec);
  FullState u = s;
  for (int i = 0; i < 64; ++i) u = strang_step(u, 0.1 * i, 0.1, free_spec);
  CHECK(std::abs(hamiltonian_total(u, 6.4, free_spec) - h0) <= 1e-12 * std::max(1.0, h0));

  // Reversibility of the symmetric scheme.
  HamiltonianSpec spec = circle_spec(0.7, 5);
  const FullState a = random_state(spec, rng);
  const FullState fwd = strang_step(a, 0.3, 0.05, spec);
  const FullState back = strang_step(fwd, 0.35, -0.05, spec);
  CHECK(state_distance(back, a) <= 1e-12);

  // Second-order convergence against a fine reference.
  HamiltonianSpec sys = circle_spec(0.5, 8);
  const FullState s0 = random_state(sys, rng, 0.2);
  const double T = sys.period;
  auto propagate = [&](int steps) {
    FullState v = s0;
    const double dt = T / steps;
    for (int i = 0; i < steps; ++i) v = strang_step(v, i * dt, dt, sys);
    return v;
  };
  const FullState ref = propagate(256 * 64);
  const double e1 = state_distance(propagate(256), ref);
  const double e2 = state_distance(propagate(512), ref);
  const double order = std::log2(e1 / e2);
  CHECK(order == doctest::Approx(2.0).epsilon(0.06));
}

TEST_CASE("strang_step kick is exact for the sine catalog entry") {
  // One small step against a high-order integration of the exact vector
  // field: the closed-form kick must reproduce the flow to O(dt^3).
  std::mt19937_64 rng(69);
  HamiltonianSpec spec = circle_spec(0.6, 4, CouplingId::SineLinear);
  const FullState s0 = random_state(spec, rng, 0.4);
  const double t0 = 0.9, dt = 1e-3;

  // RK4 on vector_field with 16 substeps (error ~ (dt/16)^5).
  FullState ref = s0;
  const double h = dt / 16.0;
  auto axpy_state = [](FullState& y, double a, const FullState& k) {
    for (std::size_t i = 0; i < y.particle.q.size(); ++i) {
      y.particle.q[i] += a * k.particle.q[i];
      y.particle.p[i] += a * k.particle.p[i];
    }
    y.field.axpy(a, k.field);
  };
  for (int i = 0; i < 16; ++i) {
    const double t = t0 + i * h;
    const FullState k1 = vector_field(ref, t, spec);
    FullState y2 = ref;
    axpy_state(y2, 0.5 * h, k1);
    y2.particle.q = spec.manifold.retract(y2.particle.q);
    const FullState k2 = vector_field(y2, t + 0.5 * h, spec);
    FullState y3 = ref;
    axpy_state(y3, 0.5 * h, k2);
    y3.particle.q = spec.manifold.retract(y3.particle.q);
    const FullState k3 = vector_field(y3, t + 0.5 * h, spec);
    FullState y4 = ref;
    axpy_state(y4, h, k3);
    y4.particle.q = spec.manifold.retract(y4.particle.q);
    const FullState k4 = vector_field(y4, t + h, spec);
    axpy_state(ref, h / 6.0, k1);
    axpy_state(ref, h / 3.0, k2);
    axpy_state(ref, h / 3.0, k3);
    axpy_state(ref, h / 6.0, k4);
    ref.particle.q = spec.manifold.retract(ref.particle.q);
    ref.particle.p = spec.manifold.tangent_project(ref.particle.q, ref.particle.p);
  }
  const FullState one = strang_step(s0, t0, dt, spec);
  CHECK(state_distance(one, ref) <= 1e-8);

  // Reversibility holds for the nonlinear catalog entry too.
  const FullState back = strang_step(one, t0 + dt, -dt, spec);
  CHECK(state_distance(back, s0) <= 1e-12);
}

TEST_CASE("integrate bookkeeping and energy drift") {
  std::mt19937_64 rng(71);
  HamiltonianSpec spec = circle_spec(0.5, 8);  // autonomous V, the simple system
  const FullState s0 = random_state(spec, rng, 0.2);

  const auto single = integrate(s0, 0.0, 0.0, 0.1, spec);
  CHECK(single.states.size() == 1);

  const double T = spec.period;
  const auto tr = integrate(s0, 0.0, T, T / 2048, spec);
  const double h0 = tr.energies.front();
  double drift = 0.0;
  for (double e : tr.energies) drift = std::max(drift, std::abs(e - h0));
  CHECK(drift <= 1e-6 * std::abs(h0));
}

TEST_CASE("gauge transform round trip and solution correspondence") {
  std::mt19937_64 rng(73);
  HamiltonianSpec spec = circle_spec(0.6, 6);
  const double T = spec.period;
  const int nt = 32;

  LoopState loop;
  loop.period = T;
  loop.twisted = false;
  loop.samples.resize(nt);
  for (int j = 0; j < nt; ++j) {
    const FullState s = random_state(spec, rng);
    loop.samples[j] = s;
  }
  const LoopState tw = gauge_transform(loop, GaugeDirection::Forward);
  CHECK(tw.twisted);
  // t = 0 sample unchanged.
  CHECK(state_distance(tw.samples[0], loop.samples[0]) == 0.0);
  const LoopState back = gauge_transform(tw, GaugeDirection::Backward);
  double worst = 0.0;
  for (int j = 0; j < nt; ++j) worst = std::max(worst, state_distance(back.samples[j], loop.samples[j]));
  CHECK(worst <= 1e-13);

  // Zero-field loop: field part untouched by the twist.
  LoopState zf = loop;
  for (auto& s : zf.samples) s.field = FieldState(2, 6);
  const LoopState zft = gauge_transform(zf, GaugeDirection::Forward);
  for (int j = 0; j < nt; ++j) CHECK(scale_norm(zft.samples[j].field, {0.0}) == 0.0);

  // Integrating the original and the gauge-transformed system from the same
  // initial data agrees at t = T after undoing the twist.
  const FullState s0 = random_state(spec, rng, 0.3);
  const double dt = T / 1024;
  const auto direct = integrate(s0, 0.0, T, dt, spec);
  const auto gauged = integrate_gauge(s0, 0.0, T, dt, spec);
  FullState undone = gauged.states.back();
  undone.field = free_flow(undone.field, T);
  CHECK(state_distance(direct.states.back(), undone) <= 1e-8);
}

TEST_CASE("action on elementary loops") {
  HamiltonianSpec spec = circle_spec(0.0, 4);
  const double T = spec.period;
  const int nt = 32;

  LoopState rest;
  rest.period = T;
  rest.twisted = false;
  rest.samples.resize(nt);
  for (int j = 0; j < nt; ++j) {
    rest.samples[j].particle.q = {kPi + 1.0, kPi};
    rest.samples[j].particle.p = {0.0, 0.0};
    rest.samples[j].field = FieldState(2, 4);
  }
  const double v0 = potential_value(spec, 0.0, rest.samples[0].particle.q);
  CHECK(action(rest, spec) == doctest::Approx(-T * v0).epsilon(1e-12));

  HamiltonianSpec nov = spec;
  nov.potential.clear();
  CHECK(action(rest, nov) == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("admissibility conditions") {
  HamiltonianSpec spec = circle_spec(0.5, 4);
  const auto rep = check_f_conditions(spec);
  CHECK(rep.f1_ok);
  CHECK(rep.f2_ok);

  // F = |p| fails (F1) for large momenta.
  const auto bad = check_f_conditions_for(
      spec,
      [](double, std::span<const double>, std::span<const double> p) {
        double s = 0.0;
        for (double v : p) s += v * v;
        return std::sqrt(s);
      },
      0.5, 0.4, 1.0);
  CHECK_FALSE(bad.f1_ok);
  CHECK(bad.worst_f1_margin < -1.0);
}

TEST_CASE("energy budget diagnostic") {
  HamiltonianSpec spec = circle_spec(0.3, 5);
  const CutoffParams cut{2.0, 1.0};
  const double b1 = descent_energy_budget(5.0, -1.0, spec, cut);
  const double b2 = descent_energy_budget(5.0, -2.0, spec, cut);
  CHECK(b1 > 0.0);
  CHECK(b2 == doctest::Approx(b1 + 1.0).epsilon(1e-12));
}

TEST_SUITE_END();
