#pragma once

#include <vector>

#include "rigidreg/spectrum.hpp"

namespace rigidreg {

// Per-bin frequency-domain Jacobian of G (as a real 2 x d matrix field):
// column k holds dG/dz_k = -2pi i * FT[x_k g](z). Shares G's bin grid.
class JacobianSpectrum {
 public:
  JacobianSpectrum(int dims, Index extents) : dims_(dims), extents_(extents) {
    std::size_t n = 1;
    for (int a = 0; a < dims; ++a) n *= static_cast<std::size_t>(extents_[a]);
    for (int a = dims; a < 3; ++a) extents_[a] = 1;
    for (int a = 0; a < dims; ++a) cols_[a].assign(n, cplx(0, 0));
    spec_norm_.assign(n, 0.0);
  }

  int dims() const { return dims_; }
  const Index& extents() const { return extents_; }
  std::vector<cplx>& col(int axis) { return cols_[axis]; }
  const std::vector<cplx>& col(int axis) const { return cols_[axis]; }
  // Largest singular value of the 2 x d real matrix at each bin.
  std::vector<double>& spec_norm() { return spec_norm_; }
  const std::vector<double>& spec_norm() const { return spec_norm_; }

 private:
  int dims_;
  Index extents_;
  std::array<std::vector<cplx>, 3> cols_;
  std::vector<double> spec_norm_;
};

JacobianSpectrum jacobian_spectrum(const DiscreteImage& g, int pad_factor);

// Parameter ranges a box supplies to the 3D rotation and symmetry bounds.
struct AngleRanges {
  double theta_lo = 0, theta_hi = 0;
  double psi_lo = 0, psi_hi = 0;
  double alpha_lo = 0, alpha_hi = 0;  // plane distance (symmetry)
};

double max_abs_sin_half(double lo, double hi);  // max |sin(t/2)| over [lo, hi]
double max_abs_cos(double lo, double hi);       // max |cos(t)| over [lo, hi]

struct Lip3D {
  double l_theta = 0, l_psi = 0, l_phi = 0;
};

struct LipSymmetry {
  double l_alpha = 0, l_phi = 0, l_psi = 0;
};

// Joint translation constant: 2pi sum_i r_{i+1} sqrt(E_i(F)) sqrt(E_i(G)).
// Bands partition [0, max radius]; `cutoff` restricts all integrals to the
// closed ball (the level-l spectra are the originals zeroed outside it).
double lip_translation(const Spectrum& F, const Spectrum& G,
                       const std::vector<double>& band_edges,
                       double cutoff = -1.0);

// 2D rotation constant: sum_i sqrt(E_i(F)) sqrt(int_i |J_G(z) z_perp|^2).
double lip_rotation_2d(const Spectrum& F, const JacobianSpectrum& J_G,
                       const std::vector<double>& band_edges, double cutoff = -1.0);

// 3D axis-angle constants; theta uses the base sum
// S = sum_i sqrt(E_i(F)) sqrt(int_i ||J_G(z)||^2 ||z||^2), psi and phi scale
// it by the box maxima of 2|sin(theta/2)| and |cos(psi)|.
Lip3D lip_rotation_3d(const Spectrum& F, const JacobianSpectrum& J_G,
                      const std::vector<double>& band_edges, const AngleRanges& box,
                      double cutoff = -1.0);
// The box-independent base sum S (monotone in the cutoff).
double lip_rotation_3d_base(const Spectrum& F, const JacobianSpectrum& J_G,
                            const std::vector<double>& band_edges, double cutoff = -1.0);

// Reflective-symmetry constants (g = f):
//   L_alpha = 4pi sum_i r_{i+1} E_i(F)
//   2D L_phi = 4pi a* sum r E + 2 sum sqrt(E_i) sqrt(int |J z_perp|^2)
//   3D L_phi = |cos psi|* (4pi a* sum r E + 2 sum sqrt(E_i) sqrt(int ||J||^2 ||z||^2))
//   3D L_psi =            4pi a* sum r E + 2 sum sqrt(E_i) sqrt(int ||J||^2 ||z||^2)
// with a* = max |alpha| over the box.
LipSymmetry lip_symmetry(const Spectrum& F, const JacobianSpectrum& J_F,
                         const std::vector<double>& band_edges, const AngleRanges& box,
                         int dims, double cutoff = -1.0);

// Box-independent pieces of the symmetry constants, for per-box assembly.
struct LipSymmetryBase {
  double alpha_sum = 0;  // 4pi sum_i r_{i+1} E_i(F)
  double rot2d = 0;      // 2 sum sqrt(E_i) sqrt(int |J z_perp|^2)
  double rot3d = 0;      // 2 sum sqrt(E_i) sqrt(int ||J||^2 ||z||^2)
};
LipSymmetryBase lip_symmetry_base(const Spectrum& F, const JacobianSpectrum& J_F,
                                  const std::vector<double>& band_edges, int dims,
                                  double cutoff = -1.0);

}  // namespace rigidreg
