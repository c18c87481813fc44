#include <doctest.h>

#include <cmath>
#include <complex>

#include "bsbench/fft.hpp"
#include "bsbench/rng.hpp"

using namespace bsb;

TEST_SUITE_BEGIN("core");

TEST_CASE("rng streams are reproducible and derived streams differ") {
  Rng a(42), b(42), c(43);
  bool all_equal = true, any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const std::uint64_t va = a.next_u64();
    all_equal = all_equal && va == b.next_u64();
    any_diff = any_diff || va != c.next_u64();
  }
  CHECK(all_equal);
  CHECK(any_diff);
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("uniform and normal moments are sane") {
  Rng rng(7);
  double sum = 0.0, sumsq = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    sum += u;
    sumsq += u * u;
  }
  CHECK(std::abs(sum / n - 0.5) < 0.005);

  double nsum = 0.0, nsumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    nsum += z;
    nsumsq += z * z;
  }
  CHECK(std::abs(nsum / n) < 0.01);
  CHECK(std::abs(nsumsq / n - 1.0) < 0.02);
}

TEST_CASE("poisson mean matches, including the chunked large-mean path") {
  Rng rng(11);
  for (double mean : {0.5, 4.0, 20.0, 75.0}) {
    double sum = 0.0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) sum += rng.poisson(mean);
    CHECK(std::abs(sum / n - mean) < 0.05 * mean + 0.05);
  }
  CHECK(rng.poisson(0.0) == 0);
}

TEST_CASE("uniform_int covers inclusive bounds") {
  Rng rng(3);
  bool saw_lo = false, saw_hi = false;
  for (int i = 0; i < 1000; ++i) {
    const int v = rng.uniform_int(2, 5);
    CHECK(v >= 2);
    CHECK(v <= 5);
    saw_lo = saw_lo || v == 2;
    saw_hi = saw_hi || v == 5;
  }
  CHECK(saw_lo);
  CHECK(saw_hi);
}

namespace {

// O(n^2) reference DFT
std::vector<std::complex<double>> naive_dft(
    const std::vector<std::complex<double>>& x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    std::complex<double> acc(0.0, 0.0);
    for (std::size_t t = 0; t < n; ++t) {
      const double ang = -2.0 * M_PI * static_cast<double>(k * t) / n;
      acc += x[t] * std::complex<double>(std::cos(ang), std::sin(ang));
    }
    out[k] = acc;
  }
  return out;
}

}  // namespace

TEST_CASE("fft matches the naive DFT for pow2 and non-pow2 sizes") {
  Rng rng(5);
  for (std::size_t n : {8u, 16u, 37u, 128u, 100u}) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    const auto expected = naive_dft(x);
    auto got = x;
    fft(got);
    double scale = 0.0;
    for (const auto& v : expected) scale = std::max(scale, std::abs(v));
    for (std::size_t k = 0; k < n; ++k)
      CHECK(std::abs(got[k] - expected[k]) <= 1e-9 * scale);
  }
}

TEST_CASE("inverse fft undoes the forward transform") {
  Rng rng(9);
  for (std::size_t n : {64u, 48u}) {
    std::vector<std::complex<double>> x(n);
    for (auto& v : x) v = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
    auto y = x;
    fft(y);
    fft(y, true);
    for (std::size_t i = 0; i < n; ++i)
      CHECK(std::abs(y[i] - x[i]) < 1e-12);
  }
}

TEST_CASE("rfft_onesided equals the full transform's lower bins") {
  Rng rng(13);
  for (std::size_t n : {16u, 2048u}) {
    std::vector<double> x(n);
    for (double& v : x) v = rng.uniform(-1, 1);
    const auto full = fft_real(x);
    const auto half = rfft_onesided(x.data(), n);
    REQUIRE(half.size() == n / 2 + 1);
    for (std::size_t k = 0; k <= n / 2; ++k)
      CHECK(std::abs(half[k] - full[k]) < 1e-9);
  }
}

TEST_CASE("autocorrelation matches the direct lag sums") {
  Rng rng(17);
  std::vector<double> x(300);
  for (double& v : x) v = rng.uniform(-1, 1);
  const std::size_t max_lag = 50;
  const auto r = autocorrelation(x.data(), x.size(), max_lag);
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double expected = 0.0;
    for (std::size_t i = 0; i + lag < x.size(); ++i)
      expected += x[i] * x[i + lag];
    CHECK(r[lag] == doctest::Approx(expected).epsilon(1e-10));
  }
}

TEST_SUITE_END();
