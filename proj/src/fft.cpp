#include "rigidreg/fft.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rigidreg {

static bool is_pow2(std::size_t n) { return n != 0 && (n & (n - 1)) == 0; }

static std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

// Iterative Cooley-Tukey, n a power of two.
static void fft_pow2(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const cplx wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      cplx w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// Bluestein chirp-z: X_k = conj(w_k) * sum_n (x_n conj(w_n)) w_{k-n},
// with w_m = e^{i pi m^2 / N} (sign flipped for inverse).
static void fft_bluestein(std::vector<cplx>& a, bool inverse) {
  const std::size_t n = a.size();
  const std::size_t m = next_pow2(2 * n - 1);
  const double sgn = inverse ? 1.0 : -1.0;
  std::vector<cplx> w(n);
  for (std::size_t k = 0; k < n; ++k) {
    // k^2 mod 2n keeps the chirp phase argument small and exact.
    const std::size_t k2 = (k * k) % (2 * n);
    const double ang = sgn * std::numbers::pi * static_cast<double>(k2) / static_cast<double>(n);
    w[k] = cplx(std::cos(ang), std::sin(ang));
  }
  std::vector<cplx> x(m, cplx(0, 0)), y(m, cplx(0, 0));
  for (std::size_t k = 0; k < n; ++k) x[k] = a[k] * w[k];
  y[0] = std::conj(w[0]);
  for (std::size_t k = 1; k < n; ++k) y[k] = y[m - k] = std::conj(w[k]);
  fft_pow2(x, false);
  fft_pow2(y, false);
  for (std::size_t k = 0; k < m; ++k) x[k] *= y[k];
  fft_pow2(x, true);
  const double scale = 1.0 / static_cast<double>(m);
  for (std::size_t k = 0; k < n; ++k) a[k] = x[k] * w[k] * scale;
}

void fft(std::vector<cplx>& a, bool inverse) {
  if (a.size() <= 1) return;
  if (is_pow2(a.size()))
    fft_pow2(a, inverse);
  else
    fft_bluestein(a, inverse);
}

void fft_axis(std::vector<cplx>& data, const std::vector<int>& extents, int axis, bool inverse) {
  const int d = static_cast<int>(extents.size());
  if (axis < 0 || axis >= d) throw std::invalid_argument("fft_axis: bad axis");
  std::size_t stride = 1;
  for (int a = 0; a < axis; ++a) stride *= static_cast<std::size_t>(extents[a]);
  const std::size_t n = static_cast<std::size_t>(extents[axis]);
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= static_cast<std::size_t>(extents[a]);
  const std::size_t block = stride * n;
  std::vector<cplx> line(n);
  for (std::size_t base = 0; base < total; base += block) {
    for (std::size_t off = 0; off < stride; ++off) {
      for (std::size_t k = 0; k < n; ++k) line[k] = data[base + off + k * stride];
      fft(line, inverse);
      for (std::size_t k = 0; k < n; ++k) data[base + off + k * stride] = line[k];
    }
  }
}

void fft_nd(std::vector<cplx>& data, const std::vector<int>& extents, bool inverse) {
  for (int a = 0; a < static_cast<int>(extents.size()); ++a) fft_axis(data, extents, a, inverse);
}

}  // namespace rigidreg
