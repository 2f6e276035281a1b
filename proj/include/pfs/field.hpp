#ifndef PFS_FIELD_HPP
#define PFS_FIELD_HPP

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "pfs/modes.hpp"

namespace pfs {

/// Fourier convention used everywhere in this library:
///   synthesis  u(x) = sum_n u_hat(n) e^{i n.x}
///   analysis   u_hat(n) = (2 pi)^{-d} int u(x) e^{-i n.x} dx
/// Inner products on the field scale are normalized (mean) integrals; the
/// convolution (u*rho)(q) = int u(x) rho(q-x) dx keeps the full volume factor,
/// so (u*rho)^hat(n) = (2 pi)^d u_hat(n) rho_hat(n).
extern const char* const kFourierConventionTag;

/// Index h into the Hilbert scale; the norm at level h weights mode n by
/// (n^2+1)^{h+1/2} inside the squared sum (the H^{1/2+h} Sobolev norm).
struct ScaleIndex {
  double h = 0.0;
};

/// Truncated complex spectrum over the mode ball |n|_2 <= k.
///
/// Interpreted either as a single scalar field's coefficients (Hermitian data
/// when the field is real) or as the z_n-coordinates of a real pair (phi, pi)
/// via w = phi - i.pi, under which the free evolution is the diagonal phase
/// rotation e^{+i sqrt(n^2+1) t} per mode.
class FieldState {
 public:
  FieldState() = default;
  FieldState(int dim, int truncation);

  int dim() const { return dim_; }
  int truncation() const { return k_; }
  const ModeBall& ball() const { return mode_ball(dim_, k_); }
  int size() const { return static_cast<int>(c_.size()); }

  std::complex<double> coeff(int i) const { return c_[i]; }
  std::complex<double>& coeff(int i) { return c_[i]; }
  const std::vector<std::complex<double>>& coeffs() const { return c_; }
  std::vector<std::complex<double>>& coeffs() { return c_; }

  /// Coefficient at mode n; zero outside the ball.
  std::complex<double> coeff_at(const Mode& n) const;
  void set_coeff(const Mode& n, std::complex<double> v);

  FieldState& operator+=(const FieldState& o);
  FieldState& operator-=(const FieldState& o);
  FieldState& operator*=(double s);
  FieldState& operator*=(std::complex<double> s);
  /// this += s * o (equal layout required).
  void axpy(std::complex<double> s, const FieldState& o);

  /// Hermitian defect max_n |c(n) - conj(c(-n))|; zero for real scalar data.
  double hermitian_defect() const;

 private:
  int dim_ = 1;
  int k_ = 0;
  std::vector<std::complex<double>> c_;
};

/// Smooth interaction bump rho: all stored coefficients nonzero, Hermitian
/// (rho real), |rho_hat(n)| <= C e^{-alpha |n|}.
class BumpProfile {
 public:
  /// rho_hat(n) = rho0 e^{-alpha |n|_2}; real and even, all modes present.
  static BumpProfile exponential(int dim, int truncation, double rho0, double alpha);
  /// Validates the standing assumptions (nonzero everywhere, Hermitian).
  BumpProfile(int dim, int truncation, std::vector<std::complex<double>> coeffs,
              double decay_rate);

  int dim() const { return dim_; }
  int truncation() const { return k_; }
  double decay_rate() const { return alpha_; }
  const ModeBall& ball() const { return mode_ball(dim_, k_); }
  std::complex<double> coeff(int i) const { return c_[i]; }
  std::complex<double> coeff_at(const Mode& n) const;

 private:
  int dim_;
  int k_;
  double alpha_;
  std::vector<std::complex<double>> c_;
};

// --- operations -----------------------------------------------------------

/// Multiply mode n by (n^2+1)^{power/2}: power=+1 is B = sqrt(1-Delta),
/// power=-1 is B^{-1}.
FieldState apply_b(const FieldState& f, double power);

/// ( sum_n (n^2+1)^{h+1/2} |u_hat(n)|^2 )^{1/2}.
double scale_norm(const FieldState& f, ScaleIndex h);

/// Re sum_n sqrt(n^2+1) f_hat(n) conj(g_hat(n)); equals the normalized
/// quadrature (2 pi)^{-d} int f (Bg) dx for real fields. Truncations may
/// differ (the smaller embeds).
double inner_h_half(const FieldState& f, const FieldState& g);

/// Diagonal rotation e^{+i sqrt(n^2+1) t} per mode (unitary on every level).
FieldState free_flow(const FieldState& f, double t);

/// Real part of the synthesized series at x (d angles).
double evaluate_point(const FieldState& f, std::span<const double> x);
std::complex<double> evaluate_point_complex(const FieldState& f, std::span<const double> x);

/// (f*rho)(q) = int f(x) rho(q-x) dx = sum_n (2 pi)^d f_hat(n) rho_hat(n) e^{i n.q},
/// real part. Requires f.truncation() <= bump.truncation().
double convolve_eval(const FieldState& f, const BumpProfile& bump, std::span<const double> q);
std::complex<double> convolve_eval_complex(const FieldState& f, const BumpProfile& bump,
                                           std::span<const double> q);

/// Ambient gradient of x -> (f*rho)(x) at q.
std::vector<double> convolve_grad(const FieldState& f, const BumpProfile& bump,
                                  std::span<const double> q);
std::vector<std::complex<double>> convolve_grad_complex(const FieldState& f,
                                                        const BumpProfile& bump,
                                                        std::span<const double> q);

/// Smooth majorant N3(u) >= sup_x |d^a (u*rho)(x)| for all |a| <= 3
/// (both pair components when u encodes (phi,pi)):
///   N3 = C_s(k) ( sum_n (n^2+1)^{3+s} (2pi)^{2d} |u_hat rho_hat|^2 )^{1/2},
/// s = d/2 + 1/2, C_s(k) = ( sum_{|n|<=k} (n^2+1)^{-s} )^{1/2}.
double c3_majorant(const FieldState& f, const BumpProfile& bump);

/// Drop modes with |n|_2 > k_new. Throws std::invalid_argument for k_new < 0.
FieldState galerkin_project(const FieldState& f, int k_new);

// --- real pair (phi, pi) helpers -------------------------------------------

/// z-coordinates w = phi - i.pi from Hermitian phi/pi spectra.
FieldState pair_from_parts(const FieldState& phi, const FieldState& pi);
/// Hermitian spectrum of phi: phi_hat(n) = (w(n) + conj(w(-n)))/2.
FieldState phi_part(const FieldState& w);
/// Hermitian spectrum of pi: pi_hat(n) = i(w(n) - conj(w(-n)))/2.
FieldState pi_part(const FieldState& w);

/// Max |Im| of the synthesized phi/pi values on a (2k+2)-per-axis grid,
/// relative to the H_0 norm; the reality-condition diagnostic.
double pair_reality_defect(const FieldState& w);

// --- serialization ----------------------------------------------------------

/// {d, k, convention_tag, modes:[{n, re, im}]}.
std::string field_to_json(const FieldState& f);
FieldState field_from_json(const std::string& text);

}  // namespace pfs

#endif
