#pragma once

#include <optional>

#include "rigidreg/geometry.hpp"
#include "rigidreg/image.hpp"
#include "rigidreg/spectrum.hpp"

namespace rigidreg {

enum class TargetMethod { ExactKernel, Discretized, LowHighDiscretized, Frequency };

struct TargetValue {
  double value = 0.0;
  TargetMethod method = TargetMethod::Discretized;
};

// Fold a nonzero rotation center into the canonical x -> R(x + t) form.
RigidMotion canonical(const RigidMotion& motion);

// Kernel-pair weight W(A, c) = integral s(A u + c) s(u) du.
// Box: exact (polygon / polyhedron clipping). Triangular: exact per-cell
// polynomial integration in 2D; composite tensor Gauss-Legendre in 3D
// (gl_nodes per axis and unit cell).
double w_kernel(const Kernel& kernel, const Mat& a_mat, const Vec& c, int dims,
                int gl_nodes = 8);

// Box-kernel weight W_R(d) = integral s_n(R x + d) s_n(x) dx.
double w_box(const Mat& rotation, const Vec& d);

// Exact correlation of the kernel-interpolated pair:
//   Q = T_f^d sum_i f_i sum_j g_j W(a R, c_ij),  a = f.period / g.period.
// f.period must be an integer multiple of g.period. Sinc is not supported on
// this path; use correlation_frequency.
TargetValue correlation_exact(const DiscreteImage& f, const DiscreteImage& g,
                              const Kernel& kernel, const RigidMotion& motion,
                              int gl_nodes = 8);

// Discretized correlation (correlation integral sampled on f's lattice):
//   Q = T^d sum_i f_i ghat(R(x_i + t)),  ghat = kernel-interpolated g.
// For Sinc, pass the upsampled g; the value is then a nearest-bin lookup on
// the upsampled lattice.
TargetValue correlation_discretized(const DiscreteImage& f, const DiscreteImage& g,
                                    const Kernel& kernel, const RigidMotion& motion,
                                    const DiscreteImage* upsampled_g = nullptr);

// Low-to-high-resolution discretized correlation: f_low on the coarse grid
// (period m * g.period), g at full resolution:
//   Q = (mT)^d sum_i f_i ghat(R(x_i + t)).
TargetValue correlation_lowhigh(const DiscreteImage& f_low, const DiscreteImage& g,
                                const Kernel& kernel, const RigidMotion& motion, int m);

// Explicit-transform variants: x -> R(x + t) with any orthogonal R
// (improper reflections included; the symmetry target rides these).
TargetValue correlation_lowhigh_linear(const DiscreteImage& f_low, const DiscreteImage& g,
                                       const Kernel& kernel, const Mat& rot, const Vec& t,
                                       int m);
TargetValue correlation_frequency_linear(const Spectrum& F, const Spectrum& G, const Mat& rot,
                                         const Vec& t);

// Frequency-domain correlation (Riemann sum over F's bins):
//   Q = sum_k conj(F(z_k)) G(R z_k) e^{2pi i t.z_k} cellvol,
// G(R z) by separable Catmull-Rom interpolation on real/imag parts with zero
// extension outside the Nyquist box. Asserts a small imaginary residue.
TargetValue correlation_frequency(const Spectrum& F, const Spectrum& G,
                                  const RigidMotion& motion);

// Interpolated spectrum value (zero outside the Nyquist box); exact at bins.
cplx spectrum_interpolate(const Spectrum& spectrum, const Vec& z);

}  // namespace rigidreg
