#include "rigidreg/bounds.hpp"

#include <cmath>
#include <stdexcept>

#include "rigidreg/phi.hpp"

namespace rigidreg {

namespace {

inline double sinc_prod(const Vec& v, int dims) {
  double s = 1.0;
  for (int a = 0; a < dims; ++a) s *= sinc(v[a]);
  return s;
}

inline double ipow(double v, int alpha) { return alpha == 1 ? v : v * v; }

const PhiTable& phi_table(int alpha) {
  static const PhiTable t1(1);
  static const PhiTable t2(2);
  return alpha == 1 ? t1 : t2;
}

inline double phi_prod(const PhiTable& table, const Vec& v, int dims) {
  double s = 1.0;
  for (int a = 0; a < dims; ++a) s *= table(v[a]);
  return s;
}

}  // namespace

double highband_energy(const Spectrum& F, double cutoff) {
  double e = 0.0;
  const double c2 = cutoff * cutoff;
  F.for_each([&](const Index&, std::size_t lin, const Vec& z) {
    double r2 = 0;
    for (int a = 0; a < F.dims(); ++a) r2 += z[a] * z[a];
    if (r2 > c2) e += std::norm(F.coeffs()[lin]);
  });
  return e * F.cell_volume();
}

EnergyTerms energy_terms(const Spectrum& F, int m, int alpha) {
  if (m < 1) throw std::invalid_argument("energy_terms: m must be >= 1");
  if (alpha != 1 && alpha != 2) throw std::invalid_argument("energy_terms: alpha must be 1 or 2");
  const int d = F.dims();
  const double T = F.period();
  const double cutoff2 = 1.0 / (4.0 * double(m) * m * T * T);
  const PhiTable& phi = phi_table(alpha);
  EnergyTerms out;
  F.for_each([&](const Index&, std::size_t lin, const Vec& z) {
    const double p2 = std::norm(F.coeffs()[lin]);
    if (p2 == 0.0) return;
    double r2 = 0;
    Vec tz{0, 0, 0}, mtz{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      r2 += z[a] * z[a];
      tz[a] = T * z[a];
      mtz[a] = m * T * z[a];
    }
    const double s_fine = ipow(sinc_prod(tz, d), alpha);
    // Phi - sinc^{2a} >= 0: the series contains the i = 0 term.
    const double rep_fine = std::max(0.0, phi_prod(phi, tz, d) - s_fine * s_fine);
    out.e_omegabar_fp += rep_fine * p2;
    if (r2 <= cutoff2) {
      const double s_coarse = ipow(sinc_prod(mtz, d), alpha);
      out.e_omega_fp += s_fine * s_fine * p2;
      out.e_omega_dfp += (s_fine - s_coarse) * (s_fine - s_coarse) * p2;
      out.e_omegabar_flp +=
          std::max(0.0, phi_prod(phi, mtz, d) - s_coarse * s_coarse) * p2;
    } else {
      out.e_omegabar_fp += s_fine * s_fine * p2;
    }
  });
  const double cv = F.cell_volume();
  out.e_omega_fp *= cv;
  out.e_omega_dfp *= cv;
  out.e_omegabar_fp *= cv;
  out.e_omegabar_flp *= cv;
  return out;
}

InterResBound bound_sinc(const Spectrum& F, const Spectrum& G, int m) {
  const double cutoff = 1.0 / (2.0 * m * F.period());
  const double value = std::sqrt(highband_energy(F, cutoff)) *
                       std::sqrt(highband_energy(G, cutoff));
  return InterResBound{BoundVariant::SincIdeal, m, 0, 0, 1, value};
}

InterResBound bound_bounded_support(const Spectrum& F, const Spectrum& G, int m, int alpha) {
  const EnergyTerms ef = energy_terms(F, m, alpha);
  const EnergyTerms eg = energy_terms(G, m, alpha);
  const double value = std::sqrt(ef.e_omega_fp * eg.e_omega_dfp) +
                       std::sqrt(eg.e_omega_fp * ef.e_omega_dfp) +
                       std::sqrt(ef.e_omega_dfp * eg.e_omega_dfp) +
                       std::sqrt(ef.e_omegabar_fp * eg.e_omegabar_fp) +
                       std::sqrt(ef.e_omegabar_flp * eg.e_omegabar_flp);
  return InterResBound{BoundVariant::BoundedSupport, m, alpha, 0, 1, value};
}

// E over the ball-complement within the sqrt(d)/(2T) ball of the replicated
// kernel-weighted spectrum G':
//   int_{C \ Omega} sinc^{2a}(Tz)|G|^2
//   + sum_{i in {-1,0,1}^d \ 0} int_C [|z + i/T| <= sqrt(d)/(2T)] sinc^{2a}(Tz+i)|G|^2.
static double replicated_outer_energy(const Spectrum& G, int m, int alpha) {
  const int d = G.dims();
  const double T = G.period();
  const double cutoff2 = 1.0 / (4.0 * double(m) * m * T * T);
  const double outer2 = d / (4.0 * T * T);
  double e = 0.0;
  G.for_each([&](const Index&, std::size_t lin, const Vec& z) {
    const double p2 = std::norm(G.coeffs()[lin]);
    if (p2 == 0.0) return;
    double r2 = 0;
    Vec tz{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      r2 += z[a] * z[a];
      tz[a] = T * z[a];
    }
    double w = 0.0;
    if (r2 > cutoff2) {
      const double s = ipow(sinc_prod(tz, d), alpha);
      w += s * s;
    }
    const int lo = -1, hi = 1;
    Index rep{lo, lo, d == 3 ? lo : 0};
    const int z0 = d == 3 ? lo : 0, z1 = d == 3 ? hi : 0;
    for (rep[2] = z0; rep[2] <= z1; ++rep[2])
      for (rep[1] = lo; rep[1] <= hi; ++rep[1])
        for (rep[0] = lo; rep[0] <= hi; ++rep[0]) {
          if (rep[0] == 0 && rep[1] == 0 && rep[2] == 0) continue;
          double rr2 = 0;
          Vec sz = tz;
          for (int a = 0; a < d; ++a) {
            const double za = z[a] + rep[a] / T;
            rr2 += za * za;
            sz[a] = tz[a] + rep[a];
          }
          if (rr2 > outer2 * (1 + 1e-12)) continue;
          const double s = ipow(sinc_prod(sz, d), alpha);
          w += s * s;
        }
    e += w * p2;
  });
  return e * G.cell_volume();
}

InterResBound bound_discretized_one_sinc(const Spectrum& F, const Spectrum& G, int m, int alpha) {
  const double cutoff = 1.0 / (2.0 * m * F.period());
  const EnergyTerms eg = energy_terms(G, m, alpha);
  double e_f_omega = 0.0;
  {
    const double c2 = cutoff * cutoff;
    F.for_each([&](const Index&, std::size_t lin, const Vec& z) {
      double r2 = 0;
      for (int a = 0; a < F.dims(); ++a) r2 += z[a] * z[a];
      if (r2 <= c2) e_f_omega += std::norm(F.coeffs()[lin]);
    });
    e_f_omega *= F.cell_volume();
  }
  const double value = std::sqrt(e_f_omega * eg.e_omega_dfp) +
                       std::sqrt(highband_energy(F, cutoff) * replicated_outer_energy(G, m, alpha));
  return InterResBound{BoundVariant::DiscretizedOneSinc, m, alpha, 0, 1, value};
}

InterResBound bound_lowhigh(const Spectrum& F, const Spectrum& G, int m, int alpha) {
  const EnergyTerms ef = energy_terms(F, m, alpha);
  const EnergyTerms eg = energy_terms(G, m, alpha);
  const double value = std::sqrt(eg.e_omega_fp * ef.e_omega_dfp) +
                       std::sqrt(ef.e_omegabar_fp * eg.e_omegabar_fp) +
                       std::sqrt(ef.e_omegabar_flp * eg.e_omegabar_fp);
  return InterResBound{BoundVariant::LowHigh, m, alpha, 0, 1, value};
}

InterResBound bound_lowhigh_discretized(const Spectrum& F, const Spectrum& G, int m, int alpha) {
  const double cutoff = 1.0 / (2.0 * m * F.period());
  const double value =
      std::sqrt(highband_energy(F, cutoff) * replicated_outer_energy(G, m, alpha));
  return InterResBound{BoundVariant::LowHighDiscretized, m, alpha, 0, 1, value};
}

InterResBound bound_upsampled(const Spectrum& F, const Spectrum& G, int m, int p, int alpha) {
  if (p < 2) throw std::invalid_argument("bound_upsampled: p must be >= 2");
  const int d = F.dims();
  const double T = F.period();
  const double cutoff = 1.0 / (2.0 * m * T);
  const double c2 = cutoff * cutoff;
  double e_gu = 0.0;
  G.for_each([&](const Index&, std::size_t lin, const Vec& z) {
    double r2 = 0;
    Vec tzp{0, 0, 0};
    for (int a = 0; a < d; ++a) {
      r2 += z[a] * z[a];
      tzp[a] = T * z[a] / p;
    }
    if (r2 <= c2) return;
    const double s = ipow(sinc_prod(tzp, d), alpha);
    e_gu += s * s * std::norm(G.coeffs()[lin]);
  });
  e_gu *= G.cell_volume();
  const double value = std::sqrt(highband_energy(F, cutoff) * e_gu);
  return InterResBound{BoundVariant::Upsampled, m, alpha, p, 1, value};
}

InterResBound bound_radial_bands(const Spectrum& F, const Spectrum& G, int m,
                                 const std::vector<double>& band_edges) {
  const double cutoff = 1.0 / (2.0 * m * F.period());
  if (band_edges.size() < 2 || std::abs(band_edges.front() - cutoff) > 1e-12 * cutoff)
    throw std::invalid_argument("bound_radial_bands: edges must start at 1/(2mT)");
  if (band_edges.back() < std::max(F.max_radius(), G.max_radius()) * (1 - 1e-12))
    throw std::invalid_argument("bound_radial_bands: edges must cover the full spectrum");
  RadialBands bands(band_edges);
  const int P = bands.count();
  std::vector<double> ef(P, 0.0), eg(P, 0.0);
  auto accumulate = [&](const Spectrum& S, std::vector<double>& e) {
    S.for_each([&](const Index&, std::size_t lin, const Vec& z) {
      double r2 = 0;
      for (int a = 0; a < S.dims(); ++a) r2 += z[a] * z[a];
      const double r = std::sqrt(r2);
      if (r <= cutoff) return;  // bands partition the strict high-frequency region
      const int b = bands.band_of(r);
      if (b >= 0) e[b] += std::norm(S.coeffs()[lin]);
    });
    for (double& v : e) v *= S.cell_volume();
  };
  accumulate(F, ef);
  accumulate(G, eg);
  double value = 0.0;
  for (int b = 0; b < P; ++b) value += std::sqrt(ef[b] * eg[b]);
  return InterResBound{BoundVariant::RadialBanded, m, 0, 0, P, value};
}

}  // namespace rigidreg
