#include "pfs/smalldiv.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>
#include <stdexcept>

namespace pfs {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
}

double omega_of_nsq(double n_sq) { return std::sqrt(n_sq + 1.0); }

ContinuedFraction continued_fraction(double sigma, int depth) {
  if (depth < 1 || depth > 40)
    throw std::invalid_argument("continued_fraction: depth must be 1..40");
  ContinuedFraction cf;
  long double x = sigma;
  long long p_prev = 0, q_prev = 1;  // p_{-2}/q_{-2}
  long long p = 1, q = 0;            // p_{-1}/q_{-1}
  for (int i = 0; i < depth; ++i) {
    const long double fl = std::floor(x);
    if (fl > 4.0e18L || fl < -4.0e18L) {
      cf.truncated = true;
      break;
    }
    const long long a = static_cast<long long>(fl);
    // Convergent recurrence p_i = a p_{i-1} + p_{i-2}, overflow-checked.
    if (std::abs(a) > 0 &&
        (std::abs(p) > (std::numeric_limits<long long>::max() - std::abs(p_prev)) / std::abs(a) ||
         std::abs(q) > (std::numeric_limits<long long>::max() - std::abs(q_prev)) / std::abs(a))) {
      cf.truncated = true;
      break;
    }
    const long long pn = a * p + p_prev;
    const long long qn = a * q + q_prev;
    cf.quotients.push_back(a);
    p_prev = p;
    q_prev = q;
    p = pn;
    q = qn;
    cf.convergents.emplace_back(p, q);
    const long double rem = x - fl;
    // Below the resolution of the input double the tail is noise.
    if (rem < 1e-15L * std::max<long double>(1.0L, std::abs((long double)sigma)) * q * q) {
      if (rem > 0.0L && static_cast<int>(cf.quotients.size()) < depth) cf.truncated = true;
      break;
    }
    x = 1.0L / rem;
  }
  return cf;
}

namespace {

long double dist_to_integer(long double x) {
  const long double r = std::abs(x - std::floor(x + 0.5L));
  return r;
}

struct ScanResult {
  double best = 0.0;
  long long witness = 0;
  std::vector<double> window_minima;  // minima over decade windows of n
};

ScanResult weighted_scan(double sigma, long long N, double r) {
  ScanResult out;
  long double best = std::numeric_limits<long double>::max();
  long long witness = 1;
  long double window_best = std::numeric_limits<long double>::max();
  long long window_hi = 10;
  const long double s = sigma;
  for (long long n = 1; n <= N; ++n) {
    const long double d = dist_to_integer(s * n) / n;  // inf_m |sigma - m/n|
    if (d <= 1e-12L)
      throw ResonanceError("sigma is rational within scan precision", static_cast<double>(d), 0,
                           static_cast<double>(n));
    const long double w =
        std::pow(static_cast<long double>(n) * n + 1.0L, static_cast<long double>(r) / 2.0L) * d;
    if (w < best) {
      best = w;
      witness = n;
    }
    window_best = std::min(window_best, w);
    if (n == window_hi || n == N) {
      out.window_minima.push_back(static_cast<double>(window_best));
      window_best = std::numeric_limits<long double>::max();
      window_hi = std::min(window_hi * 10, N);
    }
  }
  out.best = static_cast<double>(best);
  out.witness = witness;
  return out;
}

}  // namespace

DiophantineReport diophantine_constants(double sigma, long long N, double r) {
  if (N < 2) throw std::invalid_argument("diophantine_constants: N must be >= 2");
  const ScanResult sc = weighted_scan(sigma, N, r);
  DiophantineReport rep;
  rep.sigma = sigma;
  rep.best_c = sc.best;
  rep.fitted_r = r;
  rep.witness_n = sc.witness;
  rep.scan_limit = N;
  return rep;
}

DiophantineReport diophantine_scan_fit(double sigma, long long N) {
  const double grid[] = {1.5, 2.0, 2.5, 3.0};
  DiophantineReport selected;
  bool have = false;
  for (double r : grid) {
    const ScanResult sc = weighted_scan(sigma, N, r);
    // Flat trend: no window minimum falls below 60% of the first window's.
    bool flat = true;
    for (std::size_t i = 1; i < sc.window_minima.size(); ++i)
      if (sc.window_minima[i] < 0.6 * sc.window_minima.front()) flat = false;
    if (flat && !have) {
      selected.sigma = sigma;
      selected.best_c = sc.best;
      selected.fitted_r = r;
      selected.witness_n = sc.witness;
      selected.scan_limit = N;
      have = true;
    }
  }
  if (!have) {
    // Nothing flat in the grid: report the steepest exponent scanned.
    const ScanResult sc = weighted_scan(sigma, N, grid[3]);
    selected.sigma = sigma;
    selected.best_c = sc.best;
    selected.fitted_r = grid[3];
    selected.witness_n = sc.witness;
    selected.scan_limit = N;
  }
  return selected;
}

LambdaSpectrum lambda_spectrum(double T, int k, int M, int dim) {
  if (k < 0 || M < 0) throw std::invalid_argument("lambda_spectrum: k, M must be >= 0");
  if (T <= 0.0) throw std::invalid_argument("lambda_spectrum: T must be positive");
  // Realizable |n|^2 values in Z^dim.
  std::set<int> nsq_set;
  const ModeBall& ball = mode_ball(dim, k);
  for (int i = 0; i < ball.size(); ++i) nsq_set.insert(ball.n_squared(i));

  LambdaSpectrum out;
  out.min_abs = std::numeric_limits<double>::max();
  const double base = kTwoPi / T;
  // Record minima of e(n) = min_m |lambda_{m,n}| for the decay fit.
  std::vector<std::pair<double, double>> records;  // (log sqrt(n^2+1), log e)
  double running_min = std::numeric_limits<double>::max();
  for (int nsq : nsq_set) {
    const double w = omega_of_nsq(nsq);
    double e_n = std::numeric_limits<double>::max();
    for (int m = -M; m <= M; ++m) {
      const double lam = base * m - w;
      out.entries.push_back({m, nsq, lam});
      const double a = std::abs(lam);
      e_n = std::min(e_n, a);
      if (a < out.min_abs) {
        out.min_abs = a;
        out.argmin = {m, nsq, lam};
      }
    }
    if (e_n < running_min) {
      running_min = e_n;
      if (e_n > 0.0) records.emplace_back(0.5 * std::log(nsq + 1.0), std::log(e_n));
    }
  }
  if (records.size() >= 3) {
    double mx = 0.0, my = 0.0;
    for (auto& [x, y] : records) {
      mx += x;
      my += y;
    }
    mx /= records.size();
    my /= records.size();
    double sxx = 0.0, sxy = 0.0;
    for (auto& [x, y] : records) {
      sxx += (x - mx) * (x - mx);
      sxy += (x - mx) * (y - my);
    }
    out.record_fit_exponent = sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
  } else {
    out.record_fit_exponent = std::numeric_limits<double>::quiet_NaN();
  }
  return out;
}

SpaceTimeSpectrum::SpaceTimeSpectrum(int dim, int k, int M, double period)
    : dim_(dim), k_(k), m_(M), period_(period) {
  if (M < 0) throw std::invalid_argument("SpaceTimeSpectrum: M must be >= 0");
  if (period <= 0.0) throw std::invalid_argument("SpaceTimeSpectrum: period must be positive");
  c_.assign(static_cast<std::size_t>(time_size()) * mode_ball(dim, k).size(), {0.0, 0.0});
}

double SpaceTimeSpectrum::hermitian_defect() const {
  const ModeBall& b = ball();
  double worst = 0.0;
  for (int m = -m_; m <= m_; ++m)
    for (int i = 0; i < b.size(); ++i)
      worst = std::max(worst, std::abs(at(m, i) - std::conj(at(-m, b.reflect(i)))));
  return worst;
}

void SpaceTimeSpectrum::enforce_hermitian() {
  const ModeBall& b = ball();
  for (int m = -m_; m <= m_; ++m)
    for (int i = 0; i < b.size(); ++i) {
      const auto sym = 0.5 * (at(m, i) + std::conj(at(-m, b.reflect(i))));
      at(m, i) = sym;
      at(-m, b.reflect(i)) = std::conj(sym);
    }
}

FieldState SpaceTimeSpectrum::slice_at(double t) const {
  FieldState f(dim_, k_);
  const double base = kTwoPi / period_;
  for (int m = -m_; m <= m_; ++m) {
    const double th = base * m * t;
    const std::complex<double> ph(std::cos(th), std::sin(th));
    for (int i = 0; i < space_size(); ++i) f.coeff(i) += at(m, i) * ph;
  }
  return f;
}

double SpaceTimeSpectrum::max_abs() const {
  double v = 0.0;
  for (const auto& z : c_) v = std::max(v, std::abs(z));
  return v;
}

double SpaceTimeSpectrum::frobenius() const {
  double v = 0.0;
  for (const auto& z : c_) v += std::norm(z);
  return std::sqrt(v);
}

std::pair<SpaceTimeSpectrum, ResolventReport> resolvent_solve(const SpaceTimeSpectrum& forcing,
                                                              double T) {
  if (std::abs(forcing.period() - T) > 1e-12 * T)
    throw std::invalid_argument("resolvent_solve: period mismatch");
  const double sigma = (T / kTwoPi) * (T / kTwoPi);
  const ModeBall& ball = forcing.ball();
  SpaceTimeSpectrum phi(forcing.dim(), forcing.space_truncation(), forcing.time_truncation(), T);
  ResolventReport rep;
  rep.min_divisor = std::numeric_limits<double>::max();
  rep.min_lambda = std::numeric_limits<double>::max();
  for (int m = -forcing.time_truncation(); m <= forcing.time_truncation(); ++m) {
    for (int i = 0; i < ball.size(); ++i) {
      const double np1 = static_cast<double>(ball.n_squared(i)) + 1.0;
      const double divisor = sigma - static_cast<double>(m) * m / np1;
      const double lam = kTwoPi / T * m - omega_of_nsq(ball.n_squared(i));
      if (std::abs(divisor) < 1e-10)
        throw ResonanceError("resolvent_solve: near-resonant divisor", divisor, m,
                             static_cast<double>(ball.n_squared(i)));
      if (std::abs(divisor) < rep.min_divisor) {
        rep.min_divisor = std::abs(divisor);
        rep.witness_m = m;
        rep.witness_n_sq = ball.n_squared(i);
      }
      rep.min_lambda = std::min(rep.min_lambda, std::abs(lam));
      phi.at(m, i) = -sigma / (np1 * divisor) * forcing.at(m, i);
      const double fa = std::abs(forcing.at(m, i));
      if (fa > 0.0) rep.max_gain = std::max(rep.max_gain, std::abs(phi.at(m, i)) / fa);
    }
  }
  return {std::move(phi), rep};
}

double flow_separation_bound(double T, int k, double /*h*/, double h0, int dim) {
  std::set<int> nsq_set;
  const ModeBall& ball = mode_ball(dim, k);
  for (int i = 0; i < ball.size(); ++i) nsq_set.insert(ball.n_squared(i));
  double best = std::numeric_limits<double>::max();
  for (int nsq : nsq_set) {
    const double w = omega_of_nsq(nsq);
    // |e^{i T w} - 1| = 2 |sin(T w / 2)|
    const double sep = 2.0 * std::abs(std::sin(0.5 * T * w));
    best = std::min(best, sep * std::pow(nsq + 1.0, 0.5 * h0));
  }
  return best;
}

DecayFit decay_fit(const SpaceTimeSpectrum& spec) {
  const ModeBall& ball = spec.ball();
  // Fit log|u| = log C - alpha (|m| + |n|) over significant modes.
  double s1 = 0.0, sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  int count = 0;
  for (int m = -spec.time_truncation(); m <= spec.time_truncation(); ++m)
    for (int i = 0; i < spec.space_size(); ++i) {
      const double a = std::abs(spec.at(m, i));
      if (a <= 1e-14) continue;
      const double x = std::abs(m) + std::sqrt(static_cast<double>(ball.n_squared(i)));
      const double y = std::log(a);
      s1 += 1.0;
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
      ++count;
    }
  if (count < 8) throw InsufficientData("decay_fit: fewer than 8 modes above the noise floor");
  const double det = s1 * sxx - sx * sx;
  if (std::abs(det) < 1e-300) throw InsufficientData("decay_fit: degenerate mode layout");
  const double logc = (sy * sxx - sx * sxy) / det;
  const double slope = (s1 * sxy - sx * sy) / det;
  DecayFit fit;
  fit.c = std::exp(logc);
  fit.alpha = -slope;
  double rss = 0.0;
  for (int m = -spec.time_truncation(); m <= spec.time_truncation(); ++m)
    for (int i = 0; i < spec.space_size(); ++i) {
      const double a = std::abs(spec.at(m, i));
      if (a <= 1e-14) continue;
      const double x = std::abs(m) + std::sqrt(static_cast<double>(ball.n_squared(i)));
      const double e = std::log(a) - (logc + slope * x);
      rss += e * e;
    }
  fit.residual = std::sqrt(rss / count);
  return fit;
}

}  // namespace pfs
