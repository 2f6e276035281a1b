#include "pfs/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pfs {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm(std::span<const double> a) { return std::sqrt(dot(a, a)); }
}  // namespace

double wrap_angle(double a) {
  a = std::fmod(a, kTwoPi);
  if (a > kPi) a -= kTwoPi;
  if (a <= -kPi) a += kTwoPi;
  return a;
}

Submanifold Submanifold::flat_torus(int ambient_dim, std::vector<int> axes,
                                    std::vector<double> fixed_values) {
  if (ambient_dim < 1 || ambient_dim > 3)
    throw std::invalid_argument("Submanifold: ambient dim must be 1..3");
  if (axes.empty() || static_cast<int>(axes.size()) > ambient_dim)
    throw std::invalid_argument("Submanifold: need 1..d distinct axes");
  std::vector<bool> seen(ambient_dim, false);
  for (int a : axes) {
    if (a < 0 || a >= ambient_dim || seen[a])
      throw std::invalid_argument("Submanifold: axes must be distinct and in range");
    seen[a] = true;
  }
  if (static_cast<int>(fixed_values.size()) != ambient_dim)
    throw std::invalid_argument("Submanifold: fixed_values must have ambient dimension");
  Submanifold m;
  m.kind_ = Kind::FlatTorus;
  m.d_ = ambient_dim;
  m.axes_ = std::move(axes);
  std::sort(m.axes_.begin(), m.axes_.end());
  m.is_axis_.assign(ambient_dim, false);
  for (int a : m.axes_) m.is_axis_[a] = true;
  m.fixed_ = std::move(fixed_values);
  return m;
}

Submanifold Submanifold::sphere(int ambient_dim, double radius, std::vector<double> center) {
  if (ambient_dim < 2 || ambient_dim > 3)
    throw std::invalid_argument("Submanifold: sphere needs ambient dim 2 or 3");
  if (!(radius > 0.0 && radius < kPi))
    throw std::invalid_argument("Submanifold: sphere radius must lie in (0, pi)");
  if (static_cast<int>(center.size()) != ambient_dim)
    throw std::invalid_argument("Submanifold: center must have ambient dimension");
  for (double c : center)
    if (c < 0.0 || c >= kTwoPi)
      throw std::invalid_argument("Submanifold: center components must lie in [0, 2 pi)");
  Submanifold m;
  m.kind_ = Kind::Sphere;
  m.d_ = ambient_dim;
  m.r_ = radius;
  m.center_ = std::move(center);
  return m;
}

int Submanifold::intrinsic_dim() const {
  return kind_ == Kind::FlatTorus ? static_cast<int>(axes_.size()) : d_ - 1;
}

double Submanifold::constraint_residual(std::span<const double> q) const {
  if (static_cast<int>(q.size()) != d_)
    throw std::invalid_argument("Submanifold: point has wrong dimension");
  if (kind_ == Kind::Sphere) {
    double s = 0.0;
    for (int i = 0; i < d_; ++i) s += (q[i] - center_[i]) * (q[i] - center_[i]);
    return std::abs(std::sqrt(s) - r_);
  }
  double worst = 0.0;
  for (int i = 0; i < d_; ++i)
    if (!is_axis_[i]) worst = std::max(worst, std::abs(wrap_angle(q[i] - fixed_[i])));
  return worst;
}

void Submanifold::check_on_manifold(std::span<const double> q, double tol) const {
  if (constraint_residual(q) > tol)
    throw ConstraintViolation("point is off the constraint submanifold");
}

std::vector<double> Submanifold::tangent_project(std::span<const double> q,
                                                 std::span<const double> v) const {
  check_on_manifold(q);
  std::vector<double> out(v.begin(), v.end());
  if (kind_ == Kind::FlatTorus) {
    for (int i = 0; i < d_; ++i)
      if (!is_axis_[i]) out[i] = 0.0;
    return out;
  }
  std::vector<double> u(d_);
  for (int i = 0; i < d_; ++i) u[i] = q[i] - center_[i];
  const double c = dot(u, v) / dot(u, u);
  for (int i = 0; i < d_; ++i) out[i] -= c * u[i];
  return out;
}

ParticleState Submanifold::geodesic_step(const ParticleState& s, double dt) const {
  validate_state(s);
  ParticleState out = s;
  if (kind_ == Kind::FlatTorus) {
    for (int a : axes_) out.q[a] += s.p[a] * dt;
    return out;
  }
  const double speed = norm(s.p);
  if (speed == 0.0) return out;
  const double ang = speed / r_ * dt;
  const double ca = std::cos(ang), sa = std::sin(ang);
  for (int i = 0; i < d_; ++i) {
    const double u = s.q[i] - center_[i];
    const double vhat = s.p[i] / speed;
    out.q[i] = center_[i] + u * ca + r_ * vhat * sa;
    out.p[i] = speed * vhat * ca - (speed / r_) * u * sa;
  }
  return out;
}

std::vector<double> Submanifold::force_pullback(std::span<const double> q,
                                                std::span<const double> g) const {
  return tangent_project(q, g);
}

std::vector<int> Submanifold::loop_winding(const std::vector<std::vector<double>>& qs) const {
  if (qs.empty()) return std::vector<int>(intrinsic_dim(), 0);
  if (kind_ == Kind::Sphere) {
    if (d_ >= 3) return {0, 0};  // S^2 is simply connected
    // Circle: winding of the angle about the center.
    double total = 0.0;
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const auto& a = qs[i];
      const auto& b = qs[(i + 1) % qs.size()];
      const double ta = std::atan2(a[1] - center_[1], a[0] - center_[0]);
      const double tb = std::atan2(b[1] - center_[1], b[0] - center_[0]);
      const double inc = wrap_angle(tb - ta);
      if (std::abs(inc) >= kPi / 2.0)
        throw AmbiguousLift("loop samples too widely spaced to lift");
      total += inc;
    }
    return {static_cast<int>(std::lround(total / kTwoPi))};
  }
  std::vector<int> w(axes_.size(), 0);
  for (std::size_t ai = 0; ai < axes_.size(); ++ai) {
    const int axis = axes_[ai];
    double total = 0.0;
    for (std::size_t i = 0; i < qs.size(); ++i) {
      const double inc = wrap_angle(qs[(i + 1) % qs.size()][axis] - qs[i][axis]);
      if (std::abs(inc) >= kPi / 2.0)
        throw AmbiguousLift("loop samples too widely spaced to lift");
      total += inc;
    }
    w[ai] = static_cast<int>(std::lround(total / kTwoPi));
  }
  return w;
}

bool Submanifold::loop_contractible(const std::vector<std::vector<double>>& qs) const {
  const auto w = loop_winding(qs);
  return std::all_of(w.begin(), w.end(), [](int x) { return x == 0; });
}

std::vector<double> Submanifold::retract(std::span<const double> q) const {
  std::vector<double> out(q.begin(), q.end());
  if (kind_ == Kind::FlatTorus) {
    for (int i = 0; i < d_; ++i)
      if (!is_axis_[i]) out[i] = fixed_[i];
    return out;
  }
  double s = 0.0;
  for (int i = 0; i < d_; ++i) s += (q[i] - center_[i]) * (q[i] - center_[i]);
  s = std::sqrt(s);
  if (s == 0.0) throw ConstraintViolation("cannot retract the sphere center");
  for (int i = 0; i < d_; ++i) out[i] = center_[i] + (q[i] - center_[i]) * (r_ / s);
  return out;
}

std::vector<std::vector<double>> Submanifold::tangent_basis(std::span<const double> q) const {
  check_on_manifold(q);
  std::vector<std::vector<double>> basis;
  if (kind_ == Kind::FlatTorus) {
    for (int a : axes_) {
      std::vector<double> e(d_, 0.0);
      e[a] = 1.0;
      basis.push_back(std::move(e));
    }
    return basis;
  }
  // Gram-Schmidt the coordinate directions against the radial normal.
  std::vector<double> u(d_);
  for (int i = 0; i < d_; ++i) u[i] = (q[i] - center_[i]) / r_;
  for (int a = 0; a < d_ && static_cast<int>(basis.size()) < intrinsic_dim(); ++a) {
    std::vector<double> e(d_, 0.0);
    e[a] = 1.0;
    double c = dot(e, u);
    for (int i = 0; i < d_; ++i) e[i] -= c * u[i];
    for (const auto& b : basis) {
      c = dot(e, b);
      for (int i = 0; i < d_; ++i) e[i] -= c * b[i];
    }
    const double len = norm(e);
    if (len < 1e-10) continue;
    for (auto& v : e) v /= len;
    basis.push_back(std::move(e));
  }
  if (static_cast<int>(basis.size()) != intrinsic_dim())
    throw std::logic_error("tangent_basis: incomplete frame");
  return basis;
}

void Submanifold::validate_state(const ParticleState& s, double tol) const {
  check_on_manifold(s.q, tol);
  if (static_cast<int>(s.p.size()) != d_)
    throw std::invalid_argument("ParticleState: momentum has wrong dimension");
  const auto proj = tangent_project(s.q, s.p);
  double defect = 0.0;
  for (int i = 0; i < d_; ++i) defect = std::max(defect, std::abs(proj[i] - s.p[i]));
  if (defect > tol) throw ConstraintViolation("momentum is not tangent to Q");
}

}  // namespace pfs
