#ifndef PFS_FFT_HPP
#define PFS_FFT_HPP

#include <complex>
#include <vector>

namespace pfs {

/// In-place radix-2 FFT, length must be a power of two.
/// forward: X[b] = sum_j x[j] e^{-2 pi i b j / N}  (no 1/N)
/// inverse: x[j] = sum_b X[b] e^{+2 pi i b j / N}  (no 1/N)
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse);

/// Fourier coefficients of N uniform samples over one period:
/// c(m) = (1/N) sum_j a_j e^{-2 pi i m j / N}, bins reported for
/// m = 0..N-1 (interpret m > N/2 as m - N).
std::vector<std::complex<double>> dft_coeffs(const std::vector<std::complex<double>>& samples);

/// Synthesis inverse of dft_coeffs.
std::vector<std::complex<double>> dft_synthesize(const std::vector<std::complex<double>>& coeffs);

/// Signed frequency index of bin b for length N: b <= N/2 ? b : b - N.
inline int bin_frequency(int b, int n) { return b <= n / 2 ? b : b - n; }

/// Spectral derivative of periodic samples (period T); the Nyquist bin is
/// zeroed so the operator is antisymmetric.
std::vector<std::complex<double>> spectral_derivative(
    const std::vector<std::complex<double>>& samples, double period);

std::vector<double> spectral_derivative_real(const std::vector<double>& samples, double period);

bool is_power_of_two(int n);

}  // namespace pfs

#endif
