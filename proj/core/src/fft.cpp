#include "bsbench/fft.hpp"

#include <cmath>

namespace bsb {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// iterative Cooley-Tukey, n must be a power of two
void fft_pow2(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return;

  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }

  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = (inverse ? 2.0 : -2.0) * kPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// Bluestein chirp transform for arbitrary n, built on the pow2 kernel.
void fft_bluestein(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  const double sign = inverse ? 1.0 : -1.0;

  std::vector<std::complex<double>> chirp(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the angle argument small
    const std::size_t k2 = (k * k) % (2 * n);
    const double ang = sign * kPi * static_cast<double>(k2) / n;
    chirp[k] = {std::cos(ang), std::sin(ang)};
  }

  const std::size_t m = next_pow2(2 * n - 1);
  std::vector<std::complex<double>> p(m, {0.0, 0.0});
  std::vector<std::complex<double>> q(m, {0.0, 0.0});
  for (std::size_t k = 0; k < n; ++k) p[k] = a[k] * chirp[k];
  for (std::size_t k = 0; k < n; ++k) {
    q[k] = std::conj(chirp[k]);
    if (k != 0) q[m - k] = std::conj(chirp[k]);
  }
  fft_pow2(p, false);
  fft_pow2(q, false);
  for (std::size_t k = 0; k < m; ++k) p[k] *= q[k];
  fft_pow2(p, true);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = p[k] * scale * chirp[k];
}

}  // namespace

void fft(std::vector<std::complex<double>>& a, bool inverse) {
  const std::size_t n = a.size();
  if (n <= 1) return;
  if (is_pow2(n)) {
    fft_pow2(a, inverse);
  } else {
    fft_bluestein(a, inverse);
  }
  if (inverse) {
    const double scale = 1.0 / static_cast<double>(n);
    for (auto& v : a) v *= scale;
  }
}

std::vector<std::complex<double>> fft_real(const std::vector<double>& x) {
  std::vector<std::complex<double>> a(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) a[i] = {x[i], 0.0};
  fft(a);
  return a;
}

std::vector<std::complex<double>> rfft_onesided(const double* x,
                                                std::size_t n) {
  if (n == 0) return {};
  if (n % 2 != 0 || !is_pow2(n)) {
    std::vector<std::complex<double>> a(n);
    for (std::size_t i = 0; i < n; ++i) a[i] = {x[i], 0.0};
    fft(a);
    a.resize(n / 2 + 1);
    return a;
  }

  // pack even/odd samples into a half-size complex transform
  const std::size_t m = n / 2;
  std::vector<std::complex<double>> z(m);
  for (std::size_t k = 0; k < m; ++k) z[k] = {x[2 * k], x[2 * k + 1]};
  fft_pow2(z, false);

  std::vector<std::complex<double>> out(m + 1);
  const std::complex<double> i_unit(0.0, 1.0);
  for (std::size_t k = 0; k <= m; ++k) {
    const std::complex<double> zk = k == m ? z[0] : z[k];
    const std::complex<double> zmk = std::conj(z[(m - k) % m]);
    const std::complex<double> even = 0.5 * (zk + zmk);
    const std::complex<double> odd = -0.5 * i_unit * (zk - zmk);
    const double ang = -2.0 * kPi * static_cast<double>(k) / n;
    out[k] = even + std::complex<double>(std::cos(ang), std::sin(ang)) * odd;
  }
  return out;
}

std::vector<double> autocorrelation(const double* x, std::size_t n,
                                    std::size_t max_lag) {
  if (n == 0) return std::vector<double>(max_lag + 1, 0.0);
  const std::size_t m = next_pow2(2 * n);
  std::vector<std::complex<double>> a(m, {0.0, 0.0});
  for (std::size_t i = 0; i < n; ++i) a[i] = {x[i], 0.0};
  fft(a);
  for (auto& v : a) v = {std::norm(v), 0.0};
  fft(a, true);
  std::vector<double> r(max_lag + 1, 0.0);
  const std::size_t lags = std::min(max_lag, n - 1);
  for (std::size_t k = 0; k <= lags; ++k) r[k] = a[k].real();
  return r;
}

}  // namespace bsb
