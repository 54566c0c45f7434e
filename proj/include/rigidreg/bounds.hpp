#pragma once

#include <vector>

#include "rigidreg/spectrum.hpp"

namespace rigidreg {

enum class BoundVariant {
  SincIdeal,
  BoundedSupport,
  DiscretizedOneSinc,
  LowHigh,
  LowHighDiscretized,
  Upsampled,
  RadialBanded,
};

// Provable upper bound on |Q_high - Q_low| between resolution levels.
struct InterResBound {
  BoundVariant variant = BoundVariant::SincIdeal;
  int m = 1;
  int alpha = 0;   // kernel exponent where applicable
  int p = 0;       // upsampling factor (Upsampled)
  int bands = 1;   // band count (RadialBanded)
  double value = 0.0;
};

// Energy integrals of the kernel-interpolated image F' and its decimated
// counterpart, all as weighted Riemann sums over F's DFT bins:
//   e_omega_fp      : energy of F' inside the ball of radius 1/(2mT)
//   e_omega_dfp     : energy of F' - F'^l inside the ball
//   e_omegabar_fp   : energy of F' outside the ball (replica-corrected)
//   e_omegabar_flp  : energy of F'^l outside the ball
struct EnergyTerms {
  double e_omega_fp = 0.0;
  double e_omega_dfp = 0.0;
  double e_omegabar_fp = 0.0;
  double e_omegabar_flp = 0.0;
};

EnergyTerms energy_terms(const Spectrum& F, int m, int alpha);

// ||f^h|| ||g^h|| with the high-pass cutoff 1/(2mT): the sinc-interpolation
// bound. Valid for the exact (frequency-domain) targets.
InterResBound bound_sinc(const Spectrum& F, const Spectrum& G, int m);

// Five-term bounded-support-kernel bound; valid for exact kernel-pair
// targets with both images decimated.
InterResBound bound_bounded_support(const Spectrum& F, const Spectrum& G, int m, int alpha);

// Two-term bound for the discretized target with both images decimated
// (f treated as sinc-interpolated).
InterResBound bound_discretized_one_sinc(const Spectrum& F, const Spectrum& G, int m, int alpha);

// Three-term bound for the exact target when only f is decimated.
InterResBound bound_lowhigh(const Spectrum& F, const Spectrum& G, int m, int alpha);

// One-term bound for the discretized target when only f is decimated.
InterResBound bound_lowhigh_discretized(const Spectrum& F, const Spectrum& G, int m, int alpha);

// One-term bound for the discretized low-to-high target against a p-times
// upsampled g interpolated with the alpha kernel.
InterResBound bound_upsampled(const Spectrum& F, const Spectrum& G, int m, int p, int alpha);

// Radial-band tightening of bound_sinc: per-band Cauchy-Schwarz over a
// partition of the high-frequency region. band_edges[0] must equal 1/(2mT);
// with a single band this reduces to bound_sinc exactly.
InterResBound bound_radial_bands(const Spectrum& F, const Spectrum& G, int m,
                                 const std::vector<double>& band_edges);

// Energy outside the closed ball (Riemann sum), shared by several bounds.
double highband_energy(const Spectrum& F, double cutoff);

}  // namespace rigidreg
