#include "pfs/field.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "json.hpp"

namespace pfs {

const char* const kFourierConventionTag =
    "synth u(x)=sum_n c_n e^{i n.x}; c_n=(2pi)^-d int u e^{-i n.x}; conv keeps (2pi)^d";

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double two_pi_pow(int d) {
  double v = 1.0;
  for (int i = 0; i < d; ++i) v *= kTwoPi;
  return v;
}
}  // namespace

FieldState::FieldState(int dim, int truncation) : dim_(dim), k_(truncation) {
  if (truncation < 0) throw std::invalid_argument("FieldState: truncation must be >= 0");
  c_.assign(mode_ball(dim, truncation).size(), {0.0, 0.0});
}

std::complex<double> FieldState::coeff_at(const Mode& n) const {
  const int i = ball().index_of(n);
  return i < 0 ? std::complex<double>{0.0, 0.0} : c_[i];
}

void FieldState::set_coeff(const Mode& n, std::complex<double> v) {
  const int i = ball().index_of(n);
  if (i < 0) throw std::invalid_argument("FieldState::set_coeff: mode outside truncation");
  c_[i] = v;
}

FieldState& FieldState::operator+=(const FieldState& o) {
  axpy({1.0, 0.0}, o);
  return *this;
}

FieldState& FieldState::operator-=(const FieldState& o) {
  axpy({-1.0, 0.0}, o);
  return *this;
}

FieldState& FieldState::operator*=(double s) {
  for (auto& v : c_) v *= s;
  return *this;
}

FieldState& FieldState::operator*=(std::complex<double> s) {
  for (auto& v : c_) v *= s;
  return *this;
}

void FieldState::axpy(std::complex<double> s, const FieldState& o) {
  if (o.dim_ != dim_ || o.k_ != k_)
    throw std::invalid_argument("FieldState::axpy: layout mismatch");
  for (int i = 0; i < size(); ++i) c_[i] += s * o.c_[i];
}

double FieldState::hermitian_defect() const {
  const ModeBall& b = ball();
  double worst = 0.0;
  for (int i = 0; i < size(); ++i)
    worst = std::max(worst, std::abs(c_[i] - std::conj(c_[b.reflect(i)])));
  return worst;
}

BumpProfile::BumpProfile(int dim, int truncation, std::vector<std::complex<double>> coeffs,
                         double decay_rate)
    : dim_(dim), k_(truncation), alpha_(decay_rate), c_(std::move(coeffs)) {
  const ModeBall& b = mode_ball(dim, truncation);
  if (static_cast<int>(c_.size()) != b.size())
    throw std::invalid_argument("BumpProfile: coefficient count does not match ball");
  if (decay_rate <= 0.0) throw std::invalid_argument("BumpProfile: decay rate must be positive");
  for (int i = 0; i < b.size(); ++i) {
    if (std::abs(c_[i]) == 0.0)
      throw std::invalid_argument("BumpProfile: all frequencies must be present");
    if (std::abs(c_[i] - std::conj(c_[b.reflect(i)])) > 1e-12 * std::abs(c_[i]))
      throw std::invalid_argument("BumpProfile: coefficients must be Hermitian (rho real)");
  }
}

BumpProfile BumpProfile::exponential(int dim, int truncation, double rho0, double alpha) {
  const ModeBall& b = mode_ball(dim, truncation);
  std::vector<std::complex<double>> c(b.size());
  for (int i = 0; i < b.size(); ++i)
    c[i] = rho0 * std::exp(-alpha * std::sqrt(static_cast<double>(b.n_squared(i))));
  return BumpProfile(dim, truncation, std::move(c), alpha);
}

std::complex<double> BumpProfile::coeff_at(const Mode& n) const {
  const int i = ball().index_of(n);
  if (i < 0) throw std::invalid_argument("BumpProfile::coeff_at: mode outside truncation");
  return c_[i];
}

FieldState apply_b(const FieldState& f, double power) {
  FieldState out = f;
  const ModeBall& b = f.ball();
  for (int i = 0; i < f.size(); ++i)
    out.coeff(i) *= std::pow(static_cast<double>(b.n_squared(i)) + 1.0, 0.5 * power);
  return out;
}

double scale_norm(const FieldState& f, ScaleIndex h) {
  const ModeBall& b = f.ball();
  double s = 0.0;
  for (int i = 0; i < f.size(); ++i)
    s += std::pow(static_cast<double>(b.n_squared(i)) + 1.0, h.h + 0.5) * std::norm(f.coeff(i));
  return std::sqrt(s);
}

double inner_h_half(const FieldState& f, const FieldState& g) {
  const FieldState& small = f.truncation() <= g.truncation() ? f : g;
  const FieldState& big = f.truncation() <= g.truncation() ? g : f;
  if (f.dim() != g.dim()) throw std::invalid_argument("inner_h_half: dimension mismatch");
  const ModeBall& bs = small.ball();
  const ModeBall& bb = big.ball();
  double s = 0.0;
  for (int i = 0; i < small.size(); ++i) {
    const int j = bb.index_of(bs.mode(i));
    const std::complex<double> fv = (&small == &f) ? small.coeff(i) : big.coeff(j);
    const std::complex<double> gv = (&small == &f) ? big.coeff(j) : small.coeff(i);
    s += bs.omega(i) * (fv * std::conj(gv)).real();
  }
  return s;
}

FieldState free_flow(const FieldState& f, double t) {
  FieldState out = f;
  const ModeBall& b = f.ball();
  for (int i = 0; i < f.size(); ++i) {
    const double th = b.omega(i) * t;
    out.coeff(i) *= std::complex<double>(std::cos(th), std::sin(th));
  }
  return out;
}

std::complex<double> evaluate_point_complex(const FieldState& f, std::span<const double> x) {
  if (static_cast<int>(x.size()) != f.dim())
    throw std::invalid_argument("evaluate_point: wrong point dimension");
  const ModeBall& b = f.ball();
  std::complex<double> s = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    const double th = dot_mode(b.mode(i), x);
    s += f.coeff(i) * std::complex<double>(std::cos(th), std::sin(th));
  }
  return s;
}

double evaluate_point(const FieldState& f, std::span<const double> x) {
  return evaluate_point_complex(f, x).real();
}

std::complex<double> convolve_eval_complex(const FieldState& f, const BumpProfile& bump,
                                           std::span<const double> q) {
  if (f.dim() != bump.dim()) throw std::invalid_argument("convolve: dimension mismatch");
  if (f.truncation() > bump.truncation())
    throw std::invalid_argument("convolve: bump truncation must cover the field");
  const ModeBall& bf = f.ball();
  const ModeBall& bb = bump.ball();
  const double vol = two_pi_pow(f.dim());
  std::complex<double> s = 0.0;
  for (int i = 0; i < f.size(); ++i) {
    const std::complex<double> rho = bump.coeff(bb.index_of(bf.mode(i)));
    const double th = dot_mode(bf.mode(i), q);
    s += f.coeff(i) * rho * std::complex<double>(std::cos(th), std::sin(th));
  }
  return vol * s;
}

double convolve_eval(const FieldState& f, const BumpProfile& bump, std::span<const double> q) {
  return convolve_eval_complex(f, bump, q).real();
}

std::vector<std::complex<double>> convolve_grad_complex(const FieldState& f,
                                                        const BumpProfile& bump,
                                                        std::span<const double> q) {
  if (f.dim() != bump.dim()) throw std::invalid_argument("convolve: dimension mismatch");
  if (f.truncation() > bump.truncation())
    throw std::invalid_argument("convolve: bump truncation must cover the field");
  const ModeBall& bf = f.ball();
  const ModeBall& bb = bump.ball();
  const double vol = two_pi_pow(f.dim());
  std::vector<std::complex<double>> g(f.dim(), {0.0, 0.0});
  for (int i = 0; i < f.size(); ++i) {
    const Mode& n = bf.mode(i);
    const std::complex<double> rho = bump.coeff(bb.index_of(n));
    const double th = dot_mode(n, q);
    const std::complex<double> term =
        f.coeff(i) * rho * std::complex<double>(std::cos(th), std::sin(th)) *
        std::complex<double>(0.0, 1.0);
    for (int a = 0; a < f.dim(); ++a) g[a] += vol * static_cast<double>(n[a]) * term;
  }
  return g;
}

std::vector<double> convolve_grad(const FieldState& f, const BumpProfile& bump,
                                  std::span<const double> q) {
  auto gc = convolve_grad_complex(f, bump, q);
  std::vector<double> g(gc.size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = gc[i].real();
  return g;
}

double c3_majorant(const FieldState& f, const BumpProfile& bump) {
  if (f.dim() != bump.dim()) throw std::invalid_argument("c3_majorant: dimension mismatch");
  if (f.truncation() > bump.truncation())
    throw std::invalid_argument("c3_majorant: bump truncation must cover the field");
  const ModeBall& bf = f.ball();
  const ModeBall& bb = bump.ball();
  const double s = 0.5 * f.dim() + 0.5;
  const double vol = two_pi_pow(f.dim());
  double sum = 0.0;
  double cs = 0.0;  // truncated Sobolev constant, over the field's ball
  for (int i = 0; i < f.size(); ++i) {
    const double np1 = static_cast<double>(bf.n_squared(i)) + 1.0;
    const std::complex<double> rho = bump.coeff(bb.index_of(bf.mode(i)));
    sum += std::pow(np1, 3.0 + s) * std::norm(f.coeff(i) * rho) * vol * vol;
    cs += std::pow(np1, -s);
  }
  return std::sqrt(cs) * std::sqrt(sum);
}

FieldState galerkin_project(const FieldState& f, int k_new) {
  if (k_new < 0) throw std::invalid_argument("galerkin_project: negative truncation");
  const int k = std::min(k_new, f.truncation());
  FieldState out(f.dim(), k);
  const ModeBall& bo = out.ball();
  const ModeBall& bf = f.ball();
  for (int i = 0; i < out.size(); ++i) out.coeff(i) = f.coeff(bf.index_of(bo.mode(i)));
  return out;
}

FieldState pair_from_parts(const FieldState& phi, const FieldState& pi) {
  if (phi.dim() != pi.dim() || phi.truncation() != pi.truncation())
    throw std::invalid_argument("pair_from_parts: layout mismatch");
  FieldState w(phi.dim(), phi.truncation());
  for (int i = 0; i < w.size(); ++i)
    w.coeff(i) = phi.coeff(i) - std::complex<double>(0.0, 1.0) * pi.coeff(i);
  return w;
}

FieldState phi_part(const FieldState& w) {
  FieldState out(w.dim(), w.truncation());
  const ModeBall& b = w.ball();
  for (int i = 0; i < w.size(); ++i)
    out.coeff(i) = 0.5 * (w.coeff(i) + std::conj(w.coeff(b.reflect(i))));
  return out;
}

FieldState pi_part(const FieldState& w) {
  FieldState out(w.dim(), w.truncation());
  const ModeBall& b = w.ball();
  for (int i = 0; i < w.size(); ++i)
    out.coeff(i) =
        std::complex<double>(0.0, 0.5) * (w.coeff(i) - std::conj(w.coeff(b.reflect(i))));
  return out;
}

double pair_reality_defect(const FieldState& w) {
  const double norm = scale_norm(w, {0.0});
  if (norm == 0.0) return 0.0;
  const FieldState phi = phi_part(w);
  const FieldState pi = pi_part(w);
  const int n = 2 * w.truncation() + 2;
  std::vector<double> x(w.dim(), 0.0);
  double worst = 0.0;
  // Sample along each axis and one diagonal sweep; reality is mode-wise so
  // axis grids already expose any Hermitian defect.
  for (int axis = 0; axis < w.dim(); ++axis) {
    std::fill(x.begin(), x.end(), 0.0);
    for (int j = 0; j < n; ++j) {
      x[axis] = kTwoPi * j / n;
      worst = std::max(worst, std::abs(evaluate_point_complex(phi, x).imag()));
      worst = std::max(worst, std::abs(evaluate_point_complex(pi, x).imag()));
    }
  }
  for (int j = 0; j < n; ++j) {
    std::fill(x.begin(), x.end(), kTwoPi * j / n);
    worst = std::max(worst, std::abs(evaluate_point_complex(phi, x).imag()));
    worst = std::max(worst, std::abs(evaluate_point_complex(pi, x).imag()));
  }
  return worst / norm;
}

std::string field_to_json(const FieldState& f) {
  nlohmann::ordered_json j;
  j["d"] = f.dim();
  j["k"] = f.truncation();
  j["convention_tag"] = kFourierConventionTag;
  nlohmann::ordered_json modes = nlohmann::ordered_json::array();
  const ModeBall& b = f.ball();
  for (int i = 0; i < f.size(); ++i) {
    nlohmann::ordered_json m;
    std::vector<int> n(b.mode(i).begin(), b.mode(i).begin() + f.dim());
    m["n"] = n;
    m["re"] = f.coeff(i).real();
    m["im"] = f.coeff(i).imag();
    modes.push_back(std::move(m));
  }
  j["modes"] = std::move(modes);
  return j.dump(2);
}

FieldState field_from_json(const std::string& text) {
  const auto j = nlohmann::json::parse(text);
  FieldState f(j.at("d").get<int>(), j.at("k").get<int>());
  for (const auto& m : j.at("modes")) {
    Mode n = {0, 0, 0};
    const auto& nv = m.at("n");
    for (std::size_t i = 0; i < nv.size() && i < 3; ++i) n[i] = nv[i].get<int>();
    f.set_coeff(n, {m.at("re").get<double>(), m.at("im").get<double>()});
  }
  return f;
}

}  // namespace pfs
