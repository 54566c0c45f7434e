#include "rigidreg/phi.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "rigidreg/image.hpp"

namespace rigidreg {

// Recurrence up to x >= 20, then the asymptotic Bernoulli series.
double polygamma(int order, double x) {
  if (!(x > 0)) throw std::domain_error("polygamma: x must be > 0");
  if (order != 1 && order != 3) throw std::domain_error("polygamma: only orders 1 and 3");
  double acc = 0.0;
  while (x < 20.0) {
    acc += (order == 1) ? 1.0 / (x * x) : 6.0 / (x * x * x * x);
    x += 1.0;
  }
  static const double bern[] = {1.0 / 6, -1.0 / 30, 1.0 / 42, -1.0 / 30, 5.0 / 66, -691.0 / 2730};
  const double inv = 1.0 / x;
  double s;
  if (order == 1) {
    // psi_1(x) ~ 1/x + 1/(2x^2) + sum B_2k / x^(2k+1)
    s = inv + 0.5 * inv * inv;
    double p = inv * inv * inv;
    for (double b : bern) {
      s += b * p;
      p *= inv * inv;
    }
  } else {
    // psi_3(x) ~ 2/x^3 + 3/x^4 + sum B_2k (2k+1)(2k+2) / x^(2k+3)
    s = 2.0 * inv * inv * inv + 3.0 * inv * inv * inv * inv;
    double p = inv * inv * inv * inv * inv;
    int k = 1;
    for (double b : bern) {
      s += b * (2 * k + 1) * (2 * k + 2) * p;
      p *= inv * inv;
      ++k;
    }
  }
  return acc + s;
}

double phi_alpha(double z, int alpha) {
  if (std::abs(z) > 0.5 + 1e-12) throw std::domain_error("phi_alpha: |z| must be <= 1/2");
  if (alpha != 1 && alpha != 2) throw std::domain_error("phi_alpha: alpha must be 1 or 2");
  z = std::clamp(z, -0.5, 0.5);
  if (alpha == 1) return 1.0;  // partition identity: sum_i sinc^2(z+i) = 1
  if (z == 0.0) return 1.0;
  // Phi_2(z) = sinc^4(z) + (sin(pi z)/pi)^4 * (psi_3(1+z) + psi_3(1-z)) / 3!
  const double s = sinc(z);
  const double s4 = s * s * s * s;
  const double sp = std::sin(std::numbers::pi * z) / std::numbers::pi;
  const double tail = (polygamma(3, 1.0 + z) + polygamma(3, 1.0 - z)) / 6.0;
  return s4 + sp * sp * sp * sp * tail;
}

double phi_alpha(std::span<const double> z, int alpha, int dims) {
  double v = 1.0;
  for (int a = 0; a < dims; ++a) v *= phi_alpha(z[a], alpha);
  return v;
}

PhiTable::PhiTable(int alpha, int samples) : alpha_(alpha) {
  values_.resize(samples + 1);
  for (int i = 0; i <= samples; ++i) values_[i] = phi_alpha(-0.5 + 1.0 * i / samples, alpha);
}

double PhiTable::operator()(double z) const {
  const int n = static_cast<int>(values_.size()) - 1;
  double u = (std::clamp(z, -0.5, 0.5) + 0.5) * n;
  int i = std::min(static_cast<int>(u), n - 1);
  const double f = u - i;
  return values_[i] * (1.0 - f) + values_[i + 1] * f;
}

}  // namespace rigidreg
