#include "pfs/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pfs {

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

void fft_inplace(std::vector<std::complex<double>>& a, bool inverse) {
  const int n = static_cast<int>(a.size());
  if (!is_power_of_two(n)) throw std::invalid_argument("fft: length must be a power of two");
  for (int i = 1, j = 0; i < n; ++i) {
    int bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (int len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / len * (inverse ? 1.0 : -1.0);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (int i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (int j = 0; j < len / 2; ++j) {
        const std::complex<double> u = a[i + j];
        const std::complex<double> v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

std::vector<std::complex<double>> dft_coeffs(const std::vector<std::complex<double>>& samples) {
  auto a = samples;
  fft_inplace(a, false);
  const double inv = 1.0 / static_cast<double>(a.size());
  for (auto& v : a) v *= inv;
  return a;
}

std::vector<std::complex<double>> dft_synthesize(const std::vector<std::complex<double>>& coeffs) {
  auto a = coeffs;
  fft_inplace(a, true);
  return a;
}

std::vector<std::complex<double>> spectral_derivative(
    const std::vector<std::complex<double>>& samples, double period) {
  const int n = static_cast<int>(samples.size());
  auto c = dft_coeffs(samples);
  const double base = 2.0 * std::numbers::pi / period;
  for (int b = 0; b < n; ++b) {
    const int m = bin_frequency(b, n);
    if (2 * b == n) {
      c[b] = 0.0;  // Nyquist
    } else {
      c[b] *= std::complex<double>(0.0, base * m);
    }
  }
  return dft_synthesize(c);
}

std::vector<double> spectral_derivative_real(const std::vector<double>& samples, double period) {
  std::vector<std::complex<double>> z(samples.begin(), samples.end());
  auto d = spectral_derivative(z, period);
  std::vector<double> out(samples.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = d[i].real();
  return out;
}

}  // namespace pfs
