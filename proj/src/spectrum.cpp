#include "rigidreg/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

namespace rigidreg {

Spectrum::Spectrum(int dims, Index extents, double period, Vec origin)
    : dims_(dims), extents_(extents), period_(period), origin_(origin) {
  std::size_t n = 1;
  for (int a = 0; a < dims; ++a) n *= static_cast<std::size_t>(extents_[a]);
  for (int a = dims; a < 3; ++a) extents_[a] = 1;
  coeffs_.assign(n, cplx(0, 0));
}

double Spectrum::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < dims_; ++a) v *= freq_step(a);
  return v;
}

Vec Spectrum::frequency(const Index& bin) const {
  Vec z{0, 0, 0};
  for (int a = 0; a < dims_; ++a) z[a] = signed_index(bin[a], a) * freq_step(a);
  return z;
}

std::size_t Spectrum::linear(const Index& bin) const {
  std::size_t idx = static_cast<std::size_t>(bin[dims_ - 1]);
  for (int a = dims_ - 2; a >= 0; --a)
    idx = idx * static_cast<std::size_t>(extents_[a]) + static_cast<std::size_t>(bin[a]);
  return idx;
}

void Spectrum::for_each(
    const std::function<void(const Index&, std::size_t, const Vec&)>& fn) const {
  Index b{0, 0, 0};
  std::size_t lin = 0;
  for (b[2] = 0; b[2] < extents_[2]; ++b[2])
    for (b[1] = 0; b[1] < extents_[1]; ++b[1])
      for (b[0] = 0; b[0] < extents_[0]; ++b[0]) fn(b, lin++, frequency(b));
}

double Spectrum::max_radius() const {
  double r2 = 0.0;
  for (int a = 0; a < dims_; ++a) {
    const double m = (extents_[a] / 2) * freq_step(a);
    r2 += m * m;
  }
  return std::sqrt(r2);
}

FreqRegion FreqRegion::ball(double radius) {
  if (radius < 0) throw std::invalid_argument("FreqRegion: radius must be >= 0");
  FreqRegion r;
  r.kind_ = Kind::Ball;
  r.r_hi_ = radius;
  return r;
}

FreqRegion FreqRegion::annulus(double r_lo, double r_hi) {
  if (r_lo < 0 || r_hi < r_lo) throw std::invalid_argument("FreqRegion: bad annulus radii");
  FreqRegion r;
  r.kind_ = Kind::Annulus;
  r.r_lo_ = r_lo;
  r.r_hi_ = r_hi;
  return r;
}

FreqRegion FreqRegion::linf_ball(double radius) {
  if (radius < 0) throw std::invalid_argument("FreqRegion: radius must be >= 0");
  FreqRegion r;
  r.kind_ = Kind::LinfBall;
  r.r_hi_ = radius;
  return r;
}

FreqRegion FreqRegion::difference(FreqRegion a, FreqRegion b) {
  FreqRegion r;
  r.kind_ = Kind::Difference;
  r.a_ = std::make_shared<FreqRegion>(std::move(a));
  r.b_ = std::make_shared<FreqRegion>(std::move(b));
  return r;
}

FreqRegion FreqRegion::everything() { return FreqRegion{}; }

bool FreqRegion::contains(const Vec& z, int dims) const {
  switch (kind_) {
    case Kind::Everything:
      return true;
    case Kind::Ball: {
      double r2 = 0;
      for (int a = 0; a < dims; ++a) r2 += z[a] * z[a];
      return r2 <= r_hi_ * r_hi_;
    }
    case Kind::Annulus: {
      double r2 = 0;
      for (int a = 0; a < dims; ++a) r2 += z[a] * z[a];
      const double r = std::sqrt(r2);
      return r >= r_lo_ && r < r_hi_;
    }
    case Kind::LinfBall: {
      for (int a = 0; a < dims; ++a)
        if (std::abs(z[a]) > r_hi_) return false;
      return true;
    }
    case Kind::Difference:
      return a_->contains(z, dims) && !b_->contains(z, dims);
  }
  return false;
}

Spectrum forward_dft(const DiscreteImage& image, int pad_factor) {
  if (pad_factor < 1) throw std::invalid_argument("forward_dft: pad_factor must be >= 1");
  const int d = image.dims();
  Index ext{1, 1, 1};
  std::vector<int> ev(d);
  for (int a = 0; a < d; ++a) {
    ext[a] = image.extent(a) * pad_factor;
    ev[a] = ext[a];
  }
  Spectrum spec(d, ext, image.period(), image.origin());
  auto& c = spec.coeffs();
  image.for_each([&](const Index& i, std::size_t lin) {
    c[spec.linear(i)] = cplx(image.samples()[lin], 0.0);
  });
  fft_nd(c, ev, /*inverse=*/false);
  const double scale = std::pow(image.period(), d);
  spec.for_each([&](const Index&, std::size_t lin, const Vec& z) {
    double phase = 0.0;
    for (int a = 0; a < d; ++a) phase += z[a] * image.origin()[a];
    c[lin] *= scale * std::polar(1.0, 2.0 * std::numbers::pi * phase);
  });
  return spec;
}

DiscreteImage inverse_dft(const Spectrum& spectrum) {
  const int d = spectrum.dims();
  // Real-image check on the de-phased (raw DFT) grid: bins at a Nyquist
  // index carry the -Nyquist origin phase, so conjugate symmetry only holds
  // after stripping the phases.
  std::vector<cplx> c = spectrum.coeffs();
  const double T = spectrum.period();
  spectrum.for_each([&](const Index&, std::size_t lin, const Vec& z) {
    double phase = 0.0;
    for (int a = 0; a < d; ++a) phase += z[a] * spectrum.origin()[a];
    c[lin] *= std::polar(1.0, -2.0 * std::numbers::pi * phase);
  });
  double max_abs = 0.0;
  for (const cplx& v : c) max_abs = std::max(max_abs, std::abs(v));
  const double tol = 1e-9 * std::max(max_abs, 1e-300);
  double worst = 0.0;
  spectrum.for_each([&](const Index& b, std::size_t lin, const Vec&) {
    Index nb = b;
    for (int a = 0; a < d; ++a) nb[a] = b[a] == 0 ? 0 : spectrum.extents()[a] - b[a];
    worst = std::max(worst, std::abs(c[spectrum.linear(nb)] - std::conj(c[lin])));
  });
  if (worst > tol)
    throw std::invalid_argument("inverse_dft: spectrum is not conjugate-symmetric");
  std::vector<int> ev(d);
  std::size_t n = 1;
  for (int a = 0; a < d; ++a) {
    ev[a] = spectrum.extents()[a];
    n *= static_cast<std::size_t>(ev[a]);
  }
  fft_nd(c, ev, /*inverse=*/true);
  DiscreteImage out(d, spectrum.extents(), T, spectrum.origin());
  const double scale = 1.0 / (static_cast<double>(n) * std::pow(T, d));
  for (std::size_t i = 0; i < n; ++i) out.samples()[i] = c[i].real() * scale;
  return out;
}

static Spectrum filtered(const Spectrum& s, double cutoff, bool keep_inside) {
  Spectrum out = s;
  auto& c = out.coeffs();
  const double c2 = cutoff * cutoff;
  s.for_each([&](const Index&, std::size_t lin, const Vec& z) {
    double r2 = 0;
    for (int a = 0; a < s.dims(); ++a) r2 += z[a] * z[a];
    const bool inside = r2 <= c2;
    if (inside != keep_inside) c[lin] = cplx(0, 0);
  });
  return out;
}

Spectrum radial_lowpass(const Spectrum& spectrum, double cutoff) {
  if (!(cutoff > 0)) throw std::invalid_argument("radial_lowpass: cutoff must be > 0");
  return filtered(spectrum, cutoff, true);
}

Spectrum highpass_complement(const Spectrum& spectrum, double cutoff) {
  return filtered(spectrum, cutoff, false);
}

DiscreteImage decimate(const DiscreteImage& image, int m, int pad_factor) {
  if (m < 2) throw std::invalid_argument("decimate: m must be >= 2");
  const int d = image.dims();
  Spectrum spec = forward_dft(image, pad_factor);
  Spectrum lp = radial_lowpass(spec, 1.0 / (2.0 * m * image.period()));
  DiscreteImage filt = inverse_dft(lp);
  Index ext{1, 1, 1};
  for (int a = 0; a < d; ++a) ext[a] = (image.extent(a) - 1) / m + 1;
  DiscreteImage out(d, ext, m * image.period(), image.origin());
  out.for_each([&](const Index& i, std::size_t lin) {
    Index j{0, 0, 0};
    for (int a = 0; a < d; ++a) j[a] = i[a] * m;
    out.samples()[lin] = filt.at(j);
  });
  return out;
}

DiscreteImage upsample(const DiscreteImage& image, int p) {
  if (p < 2) throw std::invalid_argument("upsample: p must be >= 2");
  const int d = image.dims();

  // Raw DFT of the samples (no continuous-transform scaling or origin phase;
  // the Nyquist split below is an identity of the raw coefficients).
  std::vector<int> ev(d);
  std::size_t n_total = 1;
  for (int a = 0; a < d; ++a) n_total *= static_cast<std::size_t>(ev[a] = image.extent(a));
  std::vector<cplx> base(n_total);
  for (std::size_t i = 0; i < n_total; ++i) base[i] = cplx(image.samples()[i], 0.0);
  fft_nd(base, ev, /*inverse=*/false);

  Index up_ext{1, 1, 1};
  std::vector<int> uev(d);
  std::size_t up_total = 1;
  for (int a = 0; a < d; ++a) up_total *= static_cast<std::size_t>(uev[a] = up_ext[a] = ev[a] * p);
  DiscreteImage out(d, up_ext, image.period() / p, image.origin());

  // Scatter each coefficient to the matching signed frequency of the fine
  // grid. An even-extent Nyquist bin is aliased between +-N/2; splitting it
  // in half keeps the interpolant real and interpolating.
  struct Map {
    int idx;
    double w;
  };
  std::vector<std::vector<std::vector<Map>>> maps(d);
  for (int a = 0; a < d; ++a) {
    const int n = ev[a];
    maps[a].resize(n);
    for (int k = 0; k < n; ++k) {
      const int s = k < (n + 1) / 2 ? k : k - n;
      if (2 * s == -n)
        maps[a][k] = {{-s, 0.5}, {up_ext[a] + s, 0.5}};
      else
        maps[a][k] = {{(up_ext[a] + s) % up_ext[a], 1.0}};
    }
  }
  std::vector<cplx> up(up_total, cplx(0, 0));
  auto up_linear = [&](int x, int y, int z) {
    std::size_t idx = d == 3 ? static_cast<std::size_t>(z) : 0;
    idx = idx * up_ext[1] + y;
    return idx * up_ext[0] + x;
  };
  Index b{0, 0, 0};
  std::size_t lin = 0;
  for (b[2] = 0; b[2] < (d == 3 ? ev[2] : 1); ++b[2])
    for (b[1] = 0; b[1] < ev[1]; ++b[1])
      for (b[0] = 0; b[0] < ev[0]; ++b[0], ++lin) {
        const cplx v = base[lin];
        for (const Map& mx : maps[0][b[0]])
          for (const Map& my : maps[1][b[1]]) {
            if (d == 2)
              up[up_linear(mx.idx, my.idx, 0)] += v * (mx.w * my.w);
            else
              for (const Map& mz : maps[2][b[2]])
                up[up_linear(mx.idx, my.idx, mz.idx)] += v * (mx.w * my.w * mz.w);
          }
      }
  fft_nd(up, uev, /*inverse=*/true);
  const double scale = 1.0 / static_cast<double>(n_total);  // p^d / (p n)^d
  for (std::size_t i = 0; i < up_total; ++i) out.samples()[i] = up[i].real() * scale;
  return out;
}

double band_energy(const Spectrum& spectrum, const FreqRegion& region) {
  double e = 0.0;
  spectrum.for_each([&](const Index&, std::size_t lin, const Vec& z) {
    if (region.contains(z, spectrum.dims())) e += std::norm(spectrum.coeffs()[lin]);
  });
  return e * spectrum.cell_volume();
}

std::vector<double> radial_band_edges(int n_bands, double max_radius) {
  if (n_bands < 1) throw std::invalid_argument("radial_band_edges: n_bands must be >= 1");
  std::vector<double> edges(n_bands + 1);
  for (int i = 0; i <= n_bands; ++i) edges[i] = max_radius * i / n_bands;
  return edges;
}

std::vector<double> distinct_radius_band_edges(const Spectrum& spectrum) {
  std::set<double> radii;
  spectrum.for_each([&](const Index&, std::size_t, const Vec& z) {
    double r2 = 0;
    for (int a = 0; a < spectrum.dims(); ++a) r2 += z[a] * z[a];
    radii.insert(std::sqrt(r2));
  });
  std::vector<double> sorted(radii.begin(), radii.end());
  std::vector<double> edges;
  edges.push_back(0.0);
  for (std::size_t i = 0; i + 1 < sorted.size(); ++i)
    edges.push_back(0.5 * (sorted[i] + sorted[i + 1]));
  edges.push_back(sorted.back() * (1.0 + 1e-12) + 1e-300);
  return edges;
}

RadialBands::RadialBands(std::vector<double> e) : edges(std::move(e)) {
  if (edges.size() < 2) throw std::invalid_argument("RadialBands: need at least 2 edges");
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    if (!(edges[i] < edges[i + 1])) throw std::invalid_argument("RadialBands: edges not increasing");
}

int RadialBands::band_of(double r) const {
  if (r <= edges.front()) return r == edges.front() && edges.front() == 0.0 ? 0 : -1;
  if (r > edges.back() * (1.0 + 1e-12)) return -1;
  if (r > edges.back()) return count() - 1;
  const auto it = std::lower_bound(edges.begin(), edges.end(), r);
  // edges[j-1] < r <= edges[j]  -> band j-1
  return static_cast<int>(it - edges.begin()) - 1;
}

}  // namespace rigidreg
