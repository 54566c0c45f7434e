#pragma once

#include <span>
#include <vector>

namespace rigidreg {

// Polygamma psi_n for n in {1, 3}, x > 0.
double polygamma(int order, double x);

// Periodized squared kernel spectrum: Phi_alpha(z) = sum_i sinc^{2a}(z+i),
// closed form via polygamma; requires |z| <= 1/2, alpha in {1,2}.
// Multi-dim value is the product over coordinates.
double phi_alpha(double z, int alpha);
double phi_alpha(std::span<const double> z, int alpha, int dims);

// Sampled 1D Phi_alpha on a uniform grid over [-1/2, 1/2] with linear
// interpolation; used inside bound integrals for throughput.
class PhiTable {
 public:
  PhiTable(int alpha, int samples = 4096);
  double operator()(double z) const;
  int alpha() const { return alpha_; }

 private:
  int alpha_;
  std::vector<double> values_;
};

}  // namespace rigidreg
