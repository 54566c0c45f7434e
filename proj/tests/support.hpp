#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <vector>

#include "rigidreg/geometry.hpp"
#include "rigidreg/image.hpp"
#include "rigidreg/spectrum.hpp"
#include "rigidreg/target.hpp"

namespace rigidreg::testing {

// Smooth random image with a dark margin: white noise blurred by a Gaussian,
// tapered to zero over the outer quarter. This is the stock synthetic used
// across the validity and search tests.
inline DiscreteImage make_smooth_image(int dims, int n, unsigned seed, double sigma_px = 1.6,
                                       double period = 1.0, double margin_frac = 0.25) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Index ext{n, n, dims == 3 ? n : 1};
  DiscreteImage img(dims, ext, period);
  std::vector<double> noise(img.size());
  for (double& v : noise) v = gauss(rng);

  // Separable Gaussian blur with reflective reads clipped to zero outside.
  const int r = static_cast<int>(std::ceil(6 * sigma_px));
  std::vector<double> kern(2 * r + 1);
  double ksum = 0;
  for (int k = -r; k <= r; ++k) ksum += kern[k + r] = std::exp(-0.5 * k * k / (sigma_px * sigma_px));
  for (double& v : kern) v /= ksum;

  std::vector<double> tmp(noise);
  for (int axis = 0; axis < dims; ++axis) {
    std::vector<double> next(tmp.size(), 0.0);
    img.for_each([&](const Index& i, std::size_t lin) {
      double acc = 0;
      for (int k = -r; k <= r; ++k) {
        Index j = i;
        j[axis] += k;
        if (j[axis] < 0 || j[axis] >= n) continue;
        acc += kern[k + r] * tmp[img.linear(j)];
      }
      next[lin] = acc;
    });
    tmp.swap(next);
  }

  // Raised-cosine taper to zero over the outer margin.
  const double m = margin_frac * n;
  img.for_each([&](const Index& i, std::size_t lin) {
    double w = 1.0;
    for (int a = 0; a < dims; ++a) {
      const double d = std::min<double>(i[a], n - 1 - i[a]);
      if (d < m) w *= 0.5 - 0.5 * std::cos(std::numbers::pi * d / m);
    }
    img.samples()[lin] = tmp[lin] * w;
  });
  // Center the world origin on the image (rotations act about the centre).
  Vec origin{0, 0, 0};
  for (int a = 0; a < dims; ++a) origin[a] = 0.5 * period * (n - 1);
  img.set_origin(origin);
  return img;
}

// Spectrally clean variant: noise confined to the central block, blurred by a
// wide-support Gaussian, no taper. Spectrum decays like the Gaussian transfer
// function (no window/truncation sidelobes); the margin is only tail-dark.
inline DiscreteImage make_bandlimited_image(int dims, int n, unsigned seed,
                                            double sigma_px = 2.0, double period = 1.0,
                                            double core_frac = 0.5) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Index ext{n, n, dims == 3 ? n : 1};
  DiscreteImage img(dims, ext, period);
  const int lo = static_cast<int>(std::floor(0.5 * (1.0 - core_frac) * n));
  const int hi = n - 1 - lo;
  const int r = std::min(n - 1, static_cast<int>(std::ceil(8 * sigma_px)));
  std::vector<double> kern(2 * r + 1);
  double ksum = 0;
  for (int k = -r; k <= r; ++k) ksum += kern[k + r] = std::exp(-0.5 * k * k / (sigma_px * sigma_px));
  for (double& v : kern) v /= ksum;

  std::vector<double> tmp(img.size(), 0.0);
  img.for_each([&](const Index& i, std::size_t lin) {
    bool core = true;
    for (int a = 0; a < dims; ++a) core = core && i[a] >= lo && i[a] <= hi;
    tmp[lin] = core ? gauss(rng) : 0.0;
  });
  for (int axis = 0; axis < dims; ++axis) {
    std::vector<double> next(tmp.size(), 0.0);
    img.for_each([&](const Index& i, std::size_t lin) {
      double acc = 0;
      for (int k = -r; k <= r; ++k) {
        Index j = i;
        j[axis] += k;
        if (j[axis] < 0 || j[axis] >= n) continue;
        acc += kern[k + r] * tmp[img.linear(j)];
      }
      next[lin] = acc;
    });
    tmp.swap(next);
  }
  for (std::size_t i = 0; i < img.size(); ++i) img.samples()[i] = tmp[i];
  Vec origin{0, 0, 0};
  for (int a = 0; a < dims; ++a) origin[a] = 0.5 * period * (n - 1);
  img.set_origin(origin);
  return img;
}

// Sum of random Gaussian blobs kept well away from the image boundary: the
// underlying continuous scene is numerically bandlimited (Gaussian transfer)
// and the samples are numerically zero at the edges. The cleanest inputs for
// frequency-domain identities.
inline DiscreteImage make_blob_image(int dims, int n, unsigned seed, double sigma_px = 2.0,
                                     double period = 1.0, int n_blobs = 6,
                                     double edge_margin_sigmas = 5.0) {
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uw(-1.0, 1.0);
  const double margin = edge_margin_sigmas * sigma_px;
  std::uniform_real_distribution<double> up(margin, n - 1 - margin);
  Index ext{n, n, dims == 3 ? n : 1};
  DiscreteImage img(dims, ext, period);
  std::vector<std::array<double, 4>> blobs(n_blobs);
  for (auto& b : blobs) b = {up(rng), up(rng), dims == 3 ? up(rng) : 0.0, uw(rng)};
  img.for_each([&](const Index& i, std::size_t lin) {
    double v = 0;
    for (const auto& b : blobs) {
      double r2 = 0;
      for (int a = 0; a < dims; ++a) r2 += (i[a] - b[a]) * (i[a] - b[a]);
      v += b[3] * std::exp(-0.5 * r2 / (sigma_px * sigma_px));
    }
    img.samples()[lin] = v;
  });
  Vec origin{0, 0, 0};
  for (int a = 0; a < dims; ++a) origin[a] = 0.5 * period * (n - 1);
  img.set_origin(origin);
  return img;
}

inline RigidMotion random_motion(int dims, std::mt19937& rng, double max_px_shift = 2.0,
                                 double period = 1.0) {
  std::uniform_real_distribution<double> uang(-std::numbers::pi, std::numbers::pi);
  std::uniform_real_distribution<double> upsi(-std::numbers::pi / 2, std::numbers::pi / 2);
  std::uniform_real_distribution<double> ut(-max_px_shift * period, max_px_shift * period);
  RigidMotion m;
  m.dims = dims;
  m.theta = uang(rng);
  if (dims == 3) {
    m.phi = uang(rng);
    m.psi = upsi(rng);
  }
  for (int a = 0; a < dims; ++a) m.translation[a] = ut(rng);
  return m;
}

// O(n^2) reference DFT matching the Spectrum convention.
inline std::vector<cplx> naive_dft(const DiscreteImage& img, int pad) {
  const int d = img.dims();
  std::vector<int> ext(d);
  std::size_t total = 1;
  for (int a = 0; a < d; ++a) total *= ext[a] = img.extent(a) * pad;
  std::vector<cplx> out(total, cplx(0, 0));
  const double scale = std::pow(img.period(), d);
  std::size_t lin = 0;
  Index b{0, 0, 0};
  for (b[2] = 0; b[2] < (d == 3 ? ext[2] : 1); ++b[2])
    for (b[1] = 0; b[1] < ext[1]; ++b[1])
      for (b[0] = 0; b[0] < ext[0]; ++b[0], ++lin) {
        cplx acc(0, 0);
        img.for_each([&](const Index& i, std::size_t il) {
          double ph = 0;
          for (int a = 0; a < d; ++a) ph += static_cast<double>(b[a]) * i[a] / ext[a];
          acc += img.samples()[il] * std::polar(1.0, -2.0 * std::numbers::pi * ph);
        });
        // origin phase e^{2pi i z.x0}
        double zph = 0;
        for (int a = 0; a < d; ++a) {
          const int s = b[a] < (ext[a] + 1) / 2 ? b[a] : b[a] - ext[a];
          zph += s / (ext[a] * img.period()) * img.origin()[a];
        }
        out[lin] = acc * scale * std::polar(1.0, 2.0 * std::numbers::pi * zph);
      }
  return out;
}

// Evaluate the finite-sample sinc interpolant's transform at an arbitrary
// frequency: F(z) = T^d sum_i f_i e^{-2pi i z.(T i - x0)}.
inline cplx trig_transform(const DiscreteImage& img, const Vec& z) {
  cplx acc(0, 0);
  img.for_each([&](const Index& i, std::size_t lin) {
    const Vec x = img.site_position(i);
    double ph = 0;
    for (int a = 0; a < img.dims(); ++a) ph += z[a] * x[a];
    acc += img.samples()[lin] * std::polar(1.0, -2.0 * std::numbers::pi * ph);
  });
  return acc * std::pow(img.period(), img.dims());
}

// A pair (f, g) sampled from one Gaussian-blob scene such that the
// correlation target peaks at exactly the given ground-truth motion:
// g(u) = scene(R^T u - t), so g(R(x + t)) == scene(x) == f(x).
struct BlobScene {
  std::vector<std::array<double, 4>> blobs;  // center xyz (world), weight
  double sigma;
  int dims;
  double operator()(const Vec& x) const {
    double v = 0;
    for (const auto& b : blobs) {
      double r2 = 0;
      for (int a = 0; a < dims; ++a) r2 += (x[a] - b[a]) * (x[a] - b[a]);
      v += b[3] * std::exp(-0.5 * r2 / (sigma * sigma));
    }
    return v;
  }
};

inline BlobScene make_scene(int dims, double extent_world, unsigned seed, double sigma = 2.0,
                            int n_blobs = 6, double margin_frac = 0.35) {
  std::mt19937 rng(seed);
  const double m = margin_frac * extent_world;
  std::uniform_real_distribution<double> up(-extent_world / 2 + m, extent_world / 2 - m);
  std::uniform_real_distribution<double> uw(0.2, 1.0);
  BlobScene scene;
  scene.dims = dims;
  scene.sigma = sigma;
  for (int k = 0; k < n_blobs; ++k)
    scene.blobs.push_back({up(rng), up(rng), dims == 3 ? up(rng) : 0.0, uw(rng)});
  return scene;
}

inline DiscreteImage sample_scene(const BlobScene& scene, int n, double period,
                                  const RigidMotion& inverse_of) {
  if (inverse_of.dims != scene.dims)
    throw std::invalid_argument("sample_scene: motion dims must match the scene");
  Index ext{n, n, scene.dims == 3 ? n : 1};
  DiscreteImage img(scene.dims, ext, period);
  Vec origin{0, 0, 0};
  for (int a = 0; a < scene.dims; ++a) origin[a] = 0.5 * period * (n - 1);
  img.set_origin(origin);
  const RigidMotion mo = canonical(inverse_of);
  const Mat rt = rotation_matrix(mo).transposed();
  img.for_each([&](const Index& i, std::size_t lin) {
    Vec u = img.site_position(i);
    Vec x = rt.apply(u);
    for (int a = 0; a < scene.dims; ++a) x[a] -= mo.translation[a];
    img.samples()[lin] = scene(x);
  });
  return img;
}

inline DiscreteImage sample_scene(const BlobScene& scene, int n, double period = 1.0) {
  return sample_scene(scene, n, period, RigidMotion::identity(scene.dims));
}

// Natural-image-like synthetic: conjugate-symmetric power-law spectrum with
// random phases and a deterministic high-band attenuation (keeps the
// coarsest pyramid level under the energy rule), tapered margins.
inline DiscreteImage make_power_law_image(int n, unsigned seed, double r0 = 0.02,
                                          double expo = 3.2, double hi_atten = 0.4,
                                          double hi_cut = 1.0 / 32.0) {
  Spectrum spec(2, Index{n, n, 1}, 1.0, Vec{0, 0, 0});
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> uphase(0, 2 * std::numbers::pi);
  auto& c = spec.coeffs();
  spec.for_each([&](const Index&, std::size_t lin, const Vec& z) {
    const double r = std::hypot(z[0], z[1]);
    double amp = 1.0 / std::pow(r0 + r, expo);
    if (r > hi_cut) amp *= hi_atten;
    c[lin] = std::polar(amp, uphase(rng));
  });
  Spectrum sym = spec;
  spec.for_each([&](const Index& b, std::size_t lin, const Vec&) {
    Index nb{b[0] ? n - b[0] : 0, b[1] ? n - b[1] : 0, 0};
    sym.coeffs()[lin] = 0.5 * (c[lin] + std::conj(c[spec.linear(nb)]));
  });
  DiscreteImage img = inverse_dft(sym);
  const double m = 0.25 * n;
  img.for_each([&](const Index& i, std::size_t lin) {
    double w = 1.0;
    for (int a = 0; a < 2; ++a) {
      const double d = std::min<double>(i[a], n - 1 - i[a]);
      if (d < m) w *= 0.5 - 0.5 * std::cos(std::numbers::pi * d / m);
    }
    img.samples()[lin] *= w;
  });
  img.set_origin(Vec{0.5 * (n - 1), 0.5 * (n - 1), 0});
  return img;
}

// Resample an image through the inverse of a rigid motion (bilinear reads of
// the 4x-upsampled source), so that Q(f, out; motion) peaks at `motion`.
inline DiscreteImage resample_through(const DiscreteImage& f, const RigidMotion& motion) {
  auto fup = upsample(f, 4);
  DiscreteImage g(f.dims(), f.extents(), f.period(), f.origin());
  const RigidMotion mo = canonical(motion);
  const Mat rt = rotation_matrix(mo).transposed();
  g.for_each([&](const Index& i, std::size_t lin) {
    Vec u = g.site_position(i);
    Vec x = rt.apply(u);
    for (int a = 0; a < f.dims(); ++a) x[a] -= mo.translation[a];
    g.samples()[lin] = interpolate(fup, Kernel::triangular(), x);
  });
  return g;
}

// Frequency-domain correlation with exact trig-polynomial evaluation of both
// spectra (no interpolation): a slow independent oracle for the production
// Catmull-Rom path and for convention identities.
inline double freq_correlation_oracle(const DiscreteImage& f, const DiscreteImage& g,
                                      const RigidMotion& motion, int pad) {
  const int d = f.dims();
  const RigidMotion mo = canonical(motion);
  const Mat rot = rotation_matrix(mo);
  const double nyq = 0.5 / g.period();
  std::array<std::vector<std::pair<double, double>>, 3> axes;  // (freq, weight)
  for (int a = 0; a < d; ++a) {
    const int n = f.extent(a) * pad;
    const double step = 1.0 / (n * f.period());
    for (int s = -(n / 2); s <= n / 2; ++s) {
      if (2 * std::abs(s) == n)
        axes[a].push_back({s * step, 0.5});
      else if (std::abs(s) <= (n - 1) / 2)
        axes[a].push_back({s * step, 1.0});
    }
  }
  cplx q(0, 0);
  const double cv = std::pow(1.0 / (f.extent(0) * pad * f.period()), 1) *
                    std::pow(1.0 / (f.extent(1) * pad * f.period()), 1) *
                    (d == 3 ? 1.0 / (f.extent(2) * pad * f.period()) : 1.0);
  for (const auto& nz : (d == 3 ? axes[2] : std::vector<std::pair<double, double>>{{0.0, 1.0}}))
    for (const auto& ny : axes[1])
      for (const auto& nx : axes[0]) {
        const Vec z{nx.first, ny.first, nz.first};
        const Vec rz = rot.apply(z);
        bool inside = true;
        for (int a = 0; a < d; ++a) inside = inside && std::abs(rz[a]) <= nyq * (1 + 1e-12);
        if (!inside) continue;
        double ph = 0;
        for (int a = 0; a < d; ++a) ph += mo.translation[a] * z[a];
        q += nx.second * ny.second * nz.second * std::conj(trig_transform(f, z)) *
             trig_transform(g, rz) * std::polar(1.0, 2.0 * std::numbers::pi * ph);
      }
  return (q * cv).real();
}

}  // namespace rigidreg::testing
