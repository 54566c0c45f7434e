#include "rigidreg/lipschitz.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rigidreg {

JacobianSpectrum jacobian_spectrum(const DiscreteImage& g, int pad_factor) {
  const int d = g.dims();
  Index ext{1, 1, 1};
  for (int a = 0; a < d; ++a) ext[a] = g.extent(a) * pad_factor;
  JacobianSpectrum jac(d, ext);
  for (int axis = 0; axis < d; ++axis) {
    DiscreteImage weighted(d, g.extents(), g.period(), g.origin());
    g.for_each([&](const Index& i, std::size_t lin) {
      weighted.samples()[lin] = g.site_position(i)[axis] * g.samples()[lin];
    });
    Spectrum w = forward_dft(weighted, pad_factor);
    auto& col = jac.col(axis);
    const cplx factor(0.0, -2.0 * std::numbers::pi);
    for (std::size_t k = 0; k < w.size(); ++k) col[k] = factor * w.coeffs()[k];
  }
  // Spectral norm of [Re dG; Im dG] per bin (closed form for 2 x d).
  auto& sn = jac.spec_norm();
  for (std::size_t k = 0; k < sn.size(); ++k) {
    double a = 0, b = 0, c = 0;
    for (int axis = 0; axis < d; ++axis) {
      const cplx v = jac.col(axis)[k];
      a += v.real() * v.real();
      b += v.real() * v.imag();
      c += v.imag() * v.imag();
    }
    const double disc = std::sqrt((a - c) * (a - c) + 4 * b * b);
    sn[k] = std::sqrt(std::max(0.0, 0.5 * (a + c + disc)));
  }
  return jac;
}

double max_abs_sin_half(double lo, double hi) {
  if (lo > hi) std::swap(lo, hi);
  // |sin(t/2)| peaks where t/2 = +-pi/2 + k pi, i.e. t = +-pi + 2k pi.
  auto val = [](double t) { return std::abs(std::sin(0.5 * t)); };
  double best = std::max(val(lo), val(hi));
  const double first = std::ceil((lo - std::numbers::pi) / (2 * std::numbers::pi));
  for (double k = first;; k += 1.0) {
    const double t = std::numbers::pi + 2 * std::numbers::pi * k;
    if (t > hi) break;
    if (t >= lo) return 1.0;
  }
  const double nfirst = std::ceil((lo + std::numbers::pi) / (2 * std::numbers::pi));
  for (double k = nfirst;; k += 1.0) {
    const double t = -std::numbers::pi + 2 * std::numbers::pi * k;
    if (t > hi) break;
    if (t >= lo) return 1.0;
  }
  return best;
}

double max_abs_cos(double lo, double hi) {
  if (lo > hi) std::swap(lo, hi);
  auto val = [](double t) { return std::abs(std::cos(t)); };
  double best = std::max(val(lo), val(hi));
  // |cos| peaks at multiples of pi
  const double first = std::ceil(lo / std::numbers::pi);
  for (double k = first;; k += 1.0) {
    const double t = k * std::numbers::pi;
    if (t > hi) break;
    return 1.0;
  }
  return best;
}

namespace {

struct BandSums {
  std::vector<double> ef;   // E_i(F)
  std::vector<double> eg;   // second-factor integrals
};

// Accumulate per-band E(F) and a caller-supplied second integrand over G's
// grid, both restricted to the closed cutoff ball when cutoff > 0.
template <typename SecondFn>
BandSums band_sums(const Spectrum& F, const std::vector<double>& edges, double cutoff,
                   SecondFn&& second) {
  RadialBands bands(edges);
  BandSums out;
  out.ef.assign(bands.count(), 0.0);
  out.eg.assign(bands.count(), 0.0);
  const double c2 = cutoff > 0 ? cutoff * cutoff : -1.0;
  F.for_each([&](const Index&, std::size_t lin, const Vec& z) {
    double r2 = 0;
    for (int a = 0; a < F.dims(); ++a) r2 += z[a] * z[a];
    if (c2 > 0 && r2 > c2) return;
    const int b = bands.band_of(std::sqrt(r2));
    if (b < 0) return;
    out.ef[b] += std::norm(F.coeffs()[lin]);
    out.eg[b] += second(lin, z, r2);
  });
  const double cv = F.cell_volume();
  for (auto& v : out.ef) v *= cv;
  for (auto& v : out.eg) v *= cv;
  return out;
}

void check_grids(const Spectrum& F, const Index& other) {
  for (int a = 0; a < F.dims(); ++a)
    if (F.extents()[a] != other[a])
      throw std::invalid_argument("lipschitz: spectra must share one bin grid");
}

}  // namespace

double lip_translation(const Spectrum& F, const Spectrum& G,
                       const std::vector<double>& band_edges, double cutoff) {
  check_grids(F, G.extents());
  auto sums = band_sums(F, band_edges, cutoff,
                        [&](std::size_t lin, const Vec&, double) {
                          return std::norm(G.coeffs()[lin]);
                        });
  double total = 0;
  for (std::size_t b = 0; b < sums.ef.size(); ++b)
    total += band_edges[b + 1] * std::sqrt(sums.ef[b]) * std::sqrt(sums.eg[b]);
  return 2.0 * std::numbers::pi * total;
}

double lip_rotation_2d(const Spectrum& F, const JacobianSpectrum& J_G,
                       const std::vector<double>& band_edges, double cutoff) {
  check_grids(F, J_G.extents());
  auto sums = band_sums(F, band_edges, cutoff, [&](std::size_t lin, const Vec& z, double) {
    const cplx jzp = J_G.col(0)[lin] * (-z[1]) + J_G.col(1)[lin] * z[0];
    return std::norm(jzp);
  });
  double total = 0;
  for (std::size_t b = 0; b < sums.ef.size(); ++b)
    total += std::sqrt(sums.ef[b]) * std::sqrt(sums.eg[b]);
  return total;
}

double lip_rotation_3d_base(const Spectrum& F, const JacobianSpectrum& J_G,
                            const std::vector<double>& band_edges, double cutoff) {
  check_grids(F, J_G.extents());
  auto sums = band_sums(F, band_edges, cutoff, [&](std::size_t lin, const Vec&, double r2) {
    const double n = J_G.spec_norm()[lin];
    return n * n * r2;
  });
  double total = 0;
  for (std::size_t b = 0; b < sums.ef.size(); ++b)
    total += std::sqrt(sums.ef[b]) * std::sqrt(sums.eg[b]);
  return total;
}

Lip3D lip_rotation_3d(const Spectrum& F, const JacobianSpectrum& J_G,
                      const std::vector<double>& band_edges, const AngleRanges& box,
                      double cutoff) {
  const double base = lip_rotation_3d_base(F, J_G, band_edges, cutoff);
  const double s = max_abs_sin_half(box.theta_lo, box.theta_hi);
  const double c = max_abs_cos(box.psi_lo, box.psi_hi);
  return Lip3D{base, 2.0 * s * base, 2.0 * s * c * base};
}

LipSymmetryBase lip_symmetry_base(const Spectrum& F, const JacobianSpectrum& J_F,
                                  const std::vector<double>& band_edges, int dims,
                                  double cutoff) {
  check_grids(F, J_F.extents());
  LipSymmetryBase out;
  if (dims == 2) {
    auto sums = band_sums(F, band_edges, cutoff, [&](std::size_t lin, const Vec& z, double) {
      const cplx jzp = J_F.col(0)[lin] * (-z[1]) + J_F.col(1)[lin] * z[0];
      return std::norm(jzp);
    });
    for (std::size_t b = 0; b < sums.ef.size(); ++b) {
      out.alpha_sum += band_edges[b + 1] * sums.ef[b];
      out.rot2d += std::sqrt(sums.ef[b]) * std::sqrt(sums.eg[b]);
    }
  } else {
    auto sums = band_sums(F, band_edges, cutoff, [&](std::size_t lin, const Vec&, double r2) {
      const double n = J_F.spec_norm()[lin];
      return n * n * r2;
    });
    for (std::size_t b = 0; b < sums.ef.size(); ++b) {
      out.alpha_sum += band_edges[b + 1] * sums.ef[b];
      out.rot3d += std::sqrt(sums.ef[b]) * std::sqrt(sums.eg[b]);
    }
  }
  out.alpha_sum *= 4.0 * std::numbers::pi;
  out.rot2d *= 2.0;
  out.rot3d *= 2.0;
  return out;
}

LipSymmetry lip_symmetry(const Spectrum& F, const JacobianSpectrum& J_F,
                         const std::vector<double>& band_edges, const AngleRanges& box,
                         int dims, double cutoff) {
  const LipSymmetryBase base = lip_symmetry_base(F, J_F, band_edges, dims, cutoff);
  const double a_max = std::max(std::abs(box.alpha_lo), std::abs(box.alpha_hi));
  LipSymmetry out;
  out.l_alpha = base.alpha_sum;
  if (dims == 2) {
    out.l_phi = a_max * base.alpha_sum + base.rot2d;
  } else {
    const double c = max_abs_cos(box.psi_lo, box.psi_hi);
    out.l_psi = a_max * base.alpha_sum + base.rot3d;
    out.l_phi = c * out.l_psi;
  }
  return out;
}

}  // namespace rigidreg
