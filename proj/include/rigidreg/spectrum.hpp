#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "rigidreg/fft.hpp"
#include "rigidreg/image.hpp"

namespace rigidreg {

// Samples of the continuous Fourier transform F(z) of the sinc-interpolated
// image, on the DFT grid of the (optionally zero-padded) sample array.
// Bin k along an axis with N bins carries the signed frequency
// z = wrap(k)/(N*T), wrap(k) in [-N/2, N/2). Coefficients use the
// continuous-transform normalization F(z) = T^d * e^{2pi i z.x0} * DFT(f)_k,
// so sum |F|^2 * cellvol reproduces the continuous Parseval identity exactly.
class Spectrum {
 public:
  Spectrum(int dims, Index extents, double period, Vec origin);

  int dims() const { return dims_; }
  const Index& extents() const { return extents_; }
  double period() const { return period_; }
  const Vec& origin() const { return origin_; }

  std::vector<cplx>& coeffs() { return coeffs_; }
  const std::vector<cplx>& coeffs() const { return coeffs_; }

  double freq_step(int axis) const { return 1.0 / (extents_[axis] * period_); }
  // Volume of one frequency cell (product of per-axis steps).
  double cell_volume() const;

  int signed_index(int k, int axis) const {
    return k < (extents_[axis] + 1) / 2 ? k : k - extents_[axis];
  }
  Vec frequency(const Index& bin) const;

  std::size_t linear(const Index& bin) const;
  std::size_t size() const { return coeffs_.size(); }

  void for_each(const std::function<void(const Index&, std::size_t, const Vec&)>& fn) const;

  // Largest achievable |z| on this grid (the corner of the Nyquist box).
  double max_radius() const;
  double nyquist_radius(int) const { return 0.5 / period_; }

 private:
  int dims_;
  Index extents_;
  double period_;
  Vec origin_;
  std::vector<cplx> coeffs_;
};

// Frequency-domain region; all radii in cycles per world unit.
// Ball is closed; Annulus is half-open [lo, hi); LinfBall is closed.
class FreqRegion {
 public:
  static FreqRegion ball(double radius);
  static FreqRegion annulus(double r_lo, double r_hi);
  static FreqRegion linf_ball(double radius);
  static FreqRegion difference(FreqRegion a, FreqRegion b);
  static FreqRegion everything();

  bool contains(const Vec& z, int dims) const;

 private:
  enum class Kind { Ball, Annulus, LinfBall, Difference, Everything };
  Kind kind_ = Kind::Everything;
  double r_lo_ = 0.0, r_hi_ = 0.0;
  std::shared_ptr<const FreqRegion> a_, b_;
};

// DFT of the image zero-padded to pad_factor * extents per axis.
Spectrum forward_dft(const DiscreteImage& image, int pad_factor = 1);

// Round-trips forward_dft; throws std::invalid_argument if the spectrum is
// not conjugate-symmetric (not sourced from a real image).
DiscreteImage inverse_dft(const Spectrum& spectrum);

// Keep bins with ||z|| <= cutoff (closed ball), zero the rest.
Spectrum radial_lowpass(const Spectrum& spectrum, double cutoff);
// Complement: zero bins with ||z|| <= cutoff. lowpass + highpass == original bin-wise.
Spectrum highpass_complement(const Spectrum& spectrum, double cutoff);

// Ideal-lowpass at 1/(2mT) via a padded DFT, inverse transform, crop to the
// original extent, then keep every m-th sample starting at the first one.
// Result period is m*T; the image should carry a near-zero margin.
DiscreteImage decimate(const DiscreteImage& image, int m, int pad_factor = 2);

// Exact spectral zero-extension: p x samples per axis at period T/p; the
// corresponding continuous image is unchanged.
DiscreteImage upsample(const DiscreteImage& image, int p);

// Riemann sum of |F|^2 over bins inside the region, times the cell volume.
double band_energy(const Spectrum& spectrum, const FreqRegion& region);

// Monotone radii r_0 < ... < r_P: n_bands equal-width annuli over [0, max_radius].
std::vector<double> radial_band_edges(int n_bands, double max_radius);

// One band per distinct bin radius (midpoint edges); the tightest partition.
std::vector<double> distinct_radius_band_edges(const Spectrum& spectrum);

// Shared banding helper. Bands are (edges[j], edges[j+1]]; the first band
// additionally includes r == edges[0] so edges starting at 0 cover everything.
// Returns -1 for radii at or below edges[0] (when edges[0] > 0) or beyond the
// last edge (beyond a tiny relative tolerance).
struct RadialBands {
  std::vector<double> edges;
  explicit RadialBands(std::vector<double> e);
  int band_of(double r) const;
  int count() const { return static_cast<int>(edges.size()) - 1; }
};

}  // namespace rigidreg
