#ifndef PFS_GEOMETRY_HPP
#define PFS_GEOMETRY_HPP

#include <span>
#include <vector>

#include "pfs/errors.hpp"

namespace pfs {

/// Particle position on Q (ambient torus angles) and cotangent momentum,
/// stored as an ambient covector (the induced metric is the flat one, so
/// tangent vectors and covectors share components).
struct ParticleState {
  std::vector<double> q;
  std::vector<double> p;
};

/// Constraint submanifold Q inside T^d: a flat sub-torus (free axes, the
/// rest pinned) or a round sphere contained in one fundamental domain.
/// Geodesic flow is exact for both, which the splitting integrator relies on.
class Submanifold {
 public:
  enum class Kind { FlatTorus, Sphere };

  static Submanifold flat_torus(int ambient_dim, std::vector<int> axes,
                                std::vector<double> fixed_values);
  /// 0 < radius < pi, center components in [0, 2 pi).
  static Submanifold sphere(int ambient_dim, double radius, std::vector<double> center);

  Kind kind() const { return kind_; }
  int ambient_dim() const { return d_; }
  /// dim Q: the axis count for a sub-torus, d-1 for the sphere.
  int intrinsic_dim() const;
  double radius() const { return r_; }
  const std::vector<double>& center() const { return center_; }
  const std::vector<int>& axes() const { return axes_; }

  /// |constraint(q)|: | |q-c| - r | for the sphere, max off-axis deviation
  /// for a sub-torus.
  double constraint_residual(std::span<const double> q) const;
  void check_on_manifold(std::span<const double> q, double tol = 1e-8) const;

  /// Orthogonal projection of an ambient vector onto T_q Q.
  std::vector<double> tangent_project(std::span<const double> q,
                                      std::span<const double> v) const;

  /// Exact geodesic flow for time dt (straight line / great circle).
  ParticleState geodesic_step(const ParticleState& s, double dt) const;

  /// Restriction of an ambient gradient to Q (tangential projection; the
  /// flat metric makes the metric dual trivial).
  std::vector<double> force_pullback(std::span<const double> q,
                                     std::span<const double> g) const;

  /// Homotopy class check for a sampled loop. Throws AmbiguousLift when
  /// consecutive samples are further apart than the pi/2 guard.
  bool loop_contractible(const std::vector<std::vector<double>>& qs) const;

  /// Per-axis winding numbers of a sampled loop (zero vector for spheres of
  /// dimension >= 2; the circle reports its single winding in slot 0).
  std::vector<int> loop_winding(const std::vector<std::vector<double>>& qs) const;

  /// Nearest point on Q.
  std::vector<double> retract(std::span<const double> q) const;

  /// Orthonormal basis of T_q Q (intrinsic_dim vectors).
  std::vector<std::vector<double>> tangent_basis(std::span<const double> q) const;

  /// Checks both constraints of a ParticleState (q on Q, p tangent).
  void validate_state(const ParticleState& s, double tol = 1e-8) const;

 private:
  Submanifold() = default;
  Kind kind_ = Kind::FlatTorus;
  int d_ = 1;
  double r_ = 0.0;
  std::vector<double> center_;
  std::vector<int> axes_;
  std::vector<bool> is_axis_;
  std::vector<double> fixed_;
};

/// Angle difference wrapped to (-pi, pi].
double wrap_angle(double a);

}  // namespace pfs

#endif
