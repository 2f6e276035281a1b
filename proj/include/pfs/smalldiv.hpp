#ifndef PFS_SMALLDIV_HPP
#define PFS_SMALLDIV_HPP

#include <complex>
#include <cstdint>
#include <vector>

#include "pfs/errors.hpp"
#include "pfs/field.hpp"
#include "pfs/modes.hpp"

namespace pfs {

// --- continued fractions ----------------------------------------------------

struct ContinuedFraction {
  std::vector<long long> quotients;                          // partial quotients a_i
  std::vector<std::pair<long long, long long>> convergents;  // p_i / q_i
  bool truncated = false;  // stopped early: float precision or overflow
};

/// Partial quotients and convergents of sigma, depth <= 40. Computed in long
/// double; sets `truncated` once the remainder falls below representable
/// accuracy or the convergent recurrence would overflow.
ContinuedFraction continued_fraction(double sigma, int depth);

// --- Diophantine scan --------------------------------------------------------

struct DiophantineReport {
  double sigma = 0.0;
  double best_c = 0.0;   // min_n (n^2+1)^{r/2} inf_m |sigma - m/n|
  double fitted_r = 0.0; // smallest r in the scan grid with a flat windowed trend
  long long witness_n = 0;
  long long scan_limit = 0;
};

/// Scan n = 1..N. The weight (n^2+1)^{r/2} matches the small-divisor bound
/// the resonance analysis actually uses (see lambda_spectrum). Throws
/// ResonanceError when sigma is within 1e-12 of a rational with denominator
/// <= N.
DiophantineReport diophantine_constants(double sigma, long long N, double r);

/// Same scan, also selecting fitted_r from {1.5, 2, 2.5, 3} as the smallest
/// exponent whose windowed minima do not decay.
DiophantineReport diophantine_scan_fit(double sigma, long long N);

// --- resonance spectrum -------------------------------------------------------

struct LambdaSpectrum {
  struct Entry {
    int m;
    int n_sq;      // |n|^2 for a representable n in Z^dim
    double lambda; // m 2pi/T - sqrt(n^2+1)
  };
  std::vector<Entry> entries;
  double min_abs = 0.0;
  Entry argmin = {0, 0, 0.0};
  /// Least-squares slope of log(record minima of min_m |lambda|) against
  /// log sqrt(n^2+1); NaN when fewer than 3 records.
  double record_fit_exponent = 0.0;
};

/// Enumerates lambda_{m,n} over |m| <= M and all |n|_2 <= k realizable in
/// Z^dim (lambda depends on n only through n^2).
LambdaSpectrum lambda_spectrum(double T, int k, int M, int dim);

// --- space-time spectra and the resolvent ------------------------------------

/// Doubly indexed coefficients u_hat(m, n), |m| <= M, |n|_2 <= k, for
/// T-periodic space-time functions u(t,x) = sum u_hat(m,n) e^{i m 2pi t/T} e^{i n.x}.
class SpaceTimeSpectrum {
 public:
  SpaceTimeSpectrum() = default;
  SpaceTimeSpectrum(int dim, int k, int M, double period);

  int dim() const { return dim_; }
  int space_truncation() const { return k_; }
  int time_truncation() const { return m_; }
  double period() const { return period_; }
  const ModeBall& ball() const { return mode_ball(dim_, k_); }
  int space_size() const { return ball().size(); }
  int time_size() const { return 2 * m_ + 1; }

  std::complex<double>& at(int m, int ball_index) { return c_[idx(m, ball_index)]; }
  std::complex<double> at(int m, int ball_index) const { return c_[idx(m, ball_index)]; }

  double hermitian_defect() const;
  void enforce_hermitian();

  /// Spatial FieldState at time t (sums the time modes).
  FieldState slice_at(double t) const;

  double max_abs() const;
  double frobenius() const;

 private:
  int idx(int m, int b) const { return (m + m_) * space_size() + b; }
  int dim_ = 1, k_ = 0, m_ = 0;
  double period_ = 1.0;
  std::vector<std::complex<double>> c_;
};

struct ResolventReport {
  double min_divisor = 0.0;  // min |sigma - m^2/(n^2+1)|
  int witness_m = 0;
  int witness_n_sq = 0;
  double min_lambda = 0.0;  // min |m 2pi/T - sqrt(n^2+1)|
  double max_gain = 0.0;    // max |phi_hat| / |f_hat|
};

/// Mode-by-mode solve of the T-periodic forced problem
///   d_t^2 phi = Delta phi - phi - f,
/// i.e. (sigma - m^2/(n^2+1)) phi_hat = -sigma/(n^2+1) f_hat with
/// sigma = (T/2pi)^2. Refuses (ResonanceError) when any enumerated divisor
/// |sigma - m^2/(n^2+1)| falls below 1e-10.
std::pair<SpaceTimeSpectrum, ResolventReport> resolvent_solve(const SpaceTimeSpectrum& forcing,
                                                              double T);

/// c''(k) = min_{|n|<=k} |e^{i T sqrt(n^2+1)} - 1| (n^2+1)^{h0/2}; the flow
/// separation estimate is h-independent, h is accepted for interface
/// symmetry with the scale norms.
double flow_separation_bound(double T, int k, double h, double h0, int dim = 1);

struct DecayFit {
  double c = 0.0;         // fitted prefactor C
  double alpha = 0.0;     // fitted rate in log|u| ~ log C - alpha (|m| + |n|)
  double residual = 0.0;  // RMS log-misfit
};

/// Least squares of log|u_hat(m,n)| against -alpha (|m|+|n|) + log C over
/// modes above the 1e-14 noise floor. Throws InsufficientData below 8 modes.
DecayFit decay_fit(const SpaceTimeSpectrum& spec);

/// sqrt(n^2+1) from the exact integer n^2 (n^2+1 is exact in double far
/// beyond any truncation used here, so the root is correctly rounded).
double omega_of_nsq(double n_sq);

}  // namespace pfs

#endif
