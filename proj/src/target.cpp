#include "rigidreg/target.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rigidreg {

RigidMotion canonical(const RigidMotion& motion) {
  bool centered = true;
  for (int a = 0; a < motion.dims; ++a) centered = centered && motion.center[a] == 0.0;
  if (centered) return motion;
  RigidMotion out = about_center(motion, motion.center);
  out.center = Vec{0, 0, 0};
  return out;
}

// ---- kernel-pair weights ----

namespace {

// 1D triangular-cell factor: on cell q (q in {-1,0}) the kernel is linear,
// t(v) = 1 + v for q = -1 and 1 - v for q = 0.
inline double tri_cell(double v, int q) { return q < 0 ? 1.0 + v : 1.0 - v; }

double w_box_2d(const Mat& a_mat, const Vec& c) {
  Poly2 poly{{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}};
  for (int r = 0; r < 2 && !poly.empty(); ++r) {
    const std::array<double, 2> row{a_mat.m[r][0], a_mat.m[r][1]};
    poly = clip_halfplane(poly, row, 0.5 - c[r]);
    if (poly.empty()) break;
    poly = clip_halfplane(poly, {-row[0], -row[1]}, 0.5 + c[r]);
  }
  return poly.size() < 3 ? 0.0 : polygon_area(poly);
}

double w_box_3d(const Mat& a_mat, const Vec& c) {
  Poly3 poly = Poly3::cube(Vec{-0.5, -0.5, -0.5}, Vec{0.5, 0.5, 0.5});
  for (int r = 0; r < 3; ++r) {
    const Vec row{a_mat.m[r][0], a_mat.m[r][1], a_mat.m[r][2]};
    poly = clip_halfspace(poly, row, 0.5 - c[r]);
    if (poly.verts.empty()) return 0.0;
    poly = clip_halfspace(poly, Vec{-row[0], -row[1], -row[2]}, 0.5 + c[r]);
    if (poly.verts.empty()) return 0.0;
  }
  return polyhedron_volume(poly);
}

// Exact 2D triangular weight: per (f-cell, g-cell) pair the integrand is a
// polynomial of degree <= 4 on a clipped convex polygon.
double w_tri_2d(const Mat& a_mat, const Vec& c) {
  double total = 0.0;
  for (int p0 = -1; p0 <= 0; ++p0)
    for (int p1 = -1; p1 <= 0; ++p1) {
      const Poly2 cell{{double(p0), double(p1)},
                       {double(p0 + 1), double(p1)},
                       {double(p0 + 1), double(p1 + 1)},
                       {double(p0), double(p1 + 1)}};
      for (int q0 = -1; q0 <= 0; ++q0)
        for (int q1 = -1; q1 <= 0; ++q1) {
          Poly2 poly = cell;
          const double lo[2] = {double(q0), double(q1)};
          for (int r = 0; r < 2 && poly.size() >= 3; ++r) {
            const std::array<double, 2> row{a_mat.m[r][0], a_mat.m[r][1]};
            poly = clip_halfplane(poly, row, lo[r] + 1.0 - c[r]);
            if (poly.size() < 3) break;
            poly = clip_halfplane(poly, {-row[0], -row[1]}, -(lo[r]) + c[r]);
          }
          if (poly.size() < 3) continue;
          total += integrate_polygon(poly, [&](double x, double y) {
            const double v0 = a_mat.m[0][0] * x + a_mat.m[0][1] * y + c[0];
            const double v1 = a_mat.m[1][0] * x + a_mat.m[1][1] * y + c[1];
            return tri_cell(x, p0) * tri_cell(y, p1) * tri_cell(v0, q0) * tri_cell(v1, q1);
          });
        }
    }
  return total;
}

// 3D triangular weight: composite tensor Gauss-Legendre, gl_nodes per axis,
// over each unit cell of the f kernel intersected with the bounding box of
// the g-support preimage.
double w_tri_3d(const Mat& a_mat, const Vec& c, int gl_nodes) {
  // Gauss-Legendre nodes/weights on [0,1].
  static thread_local int cached_n = 0;
  static thread_local std::vector<double> gx, gw;
  if (cached_n != gl_nodes) {
    gx.assign(gl_nodes, 0.0);
    gw.assign(gl_nodes, 0.0);
    // Newton iteration on Legendre polynomials.
    for (int i = 0; i < gl_nodes; ++i) {
      double x = std::cos(std::numbers::pi * (i + 0.75) / (gl_nodes + 0.5));
      for (int it = 0; it < 100; ++it) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= gl_nodes; ++k) {
          const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
          p0 = p1;
          p1 = p2;
        }
        const double dp = gl_nodes * (x * p1 - p0) / (x * x - 1.0);
        const double dx = p1 / dp;
        x -= dx;
        if (std::abs(dx) < 1e-15) break;
      }
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= gl_nodes; ++k) {
        const double p2 = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double dp = gl_nodes * (x * p1 - p0) / (x * x - 1.0);
      gx[i] = 0.5 * (1.0 + x);
      gw[i] = 1.0 / ((1.0 - x * x) * dp * dp);
    }
    cached_n = gl_nodes;
  }

  // Preimage bounding box of {|A u + c|_inf <= 1}: u = A^{-1}(v - c).
  // A = a R with R orthogonal (possibly improper): A^{-1} = R^T / a.
  Mat inv = a_mat.transposed();
  // normalize rows of A: a^2 = row norm^2 of A
  double a2 = 0;
  for (int j = 0; j < 3; ++j) a2 += a_mat.m[0][j] * a_mat.m[0][j];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) inv.m[i][j] /= a2;
  Vec center{0, 0, 0};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) center[i] -= inv.m[i][j] * c[j];
  double lo[3], hi[3];
  for (int i = 0; i < 3; ++i) {
    double half = 0;
    for (int j = 0; j < 3; ++j) half += std::abs(inv.m[i][j]);
    lo[i] = std::max(-1.0, center[i] - half);
    hi[i] = std::min(1.0, center[i] + half);
    if (lo[i] >= hi[i]) return 0.0;
  }

  auto integrand = [&](double x, double y, double z) {
    const double f = (1.0 - std::abs(x)) * (1.0 - std::abs(y)) * (1.0 - std::abs(z));
    if (f <= 0.0) return 0.0;
    double g = 1.0;
    const double u[3] = {x, y, z};
    for (int r = 0; r < 3; ++r) {
      double v = c[r];
      for (int j = 0; j < 3; ++j) v += a_mat.m[r][j] * u[j];
      const double t = 1.0 - std::abs(v);
      if (t <= 0.0) return 0.0;
      g *= t;
    }
    return f * g;
  };

  // Split each axis range at 0 (the f-kernel kink).
  double total = 0.0;
  for (int s0 = 0; s0 < 2; ++s0)
    for (int s1 = 0; s1 < 2; ++s1)
      for (int s2 = 0; s2 < 2; ++s2) {
        const int sel[3] = {s0, s1, s2};
        double a[3], b[3], vol = 1.0;
        bool empty = false;
        for (int r = 0; r < 3; ++r) {
          a[r] = sel[r] ? std::max(lo[r], 0.0) : lo[r];
          b[r] = sel[r] ? hi[r] : std::min(hi[r], 0.0);
          if (a[r] >= b[r]) empty = true;
          vol *= b[r] - a[r];
        }
        if (empty) continue;
        double acc = 0.0;
        for (int i = 0; i < gl_nodes; ++i)
          for (int j = 0; j < gl_nodes; ++j)
            for (int k = 0; k < gl_nodes; ++k)
              acc += gw[i] * gw[j] * gw[k] *
                     integrand(a[0] + gx[i] * (b[0] - a[0]), a[1] + gx[j] * (b[1] - a[1]),
                               a[2] + gx[k] * (b[2] - a[2]));
        total += acc * vol;
      }
  return total;
}

}  // namespace

double w_kernel(const Kernel& kernel, const Mat& a_mat, const Vec& c, int dims, int gl_nodes) {
  switch (kernel.type) {
    case KernelType::Box:
      return dims == 2 ? w_box_2d(a_mat, c) : w_box_3d(a_mat, c);
    case KernelType::Triangular:
      return dims == 2 ? w_tri_2d(a_mat, c) : w_tri_3d(a_mat, c, gl_nodes);
    case KernelType::Sinc:
      throw std::invalid_argument("w_kernel: sinc has no bounded-support weight");
  }
  return 0.0;
}

double w_box(const Mat& rotation, const Vec& d) {
  return rotation.dims == 2 ? w_box_2d(rotation, d) : w_box_3d(rotation, d);
}

// ---- correlation targets ----

TargetValue correlation_exact(const DiscreteImage& f, const DiscreteImage& g,
                              const Kernel& kernel, const RigidMotion& motion, int gl_nodes) {
  if (kernel.type == KernelType::Sinc)
    throw std::invalid_argument(
        "correlation_exact: sinc kernel unsupported here; use correlation_frequency");
  const int d = f.dims();
  if (d != g.dims()) throw std::invalid_argument("correlation_exact: dimension mismatch");
  const double ratio = f.period() / g.period();
  const int m = static_cast<int>(std::lround(ratio));
  if (m < 1 || std::abs(ratio - m) > 1e-9)
    throw std::invalid_argument("correlation_exact: f.period must be an integer multiple");

  const RigidMotion mo = canonical(motion);
  const Mat rot = rotation_matrix(mo);
  Mat a_mat = rot;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a_mat.m[i][j] *= ratio;

  const double rho = kernel.support_radius();
  const double reach = rho * (1.0 + ratio * std::sqrt(double(d))) + 1e-12;
  const double cell = std::pow(f.period(), d);

  double q = 0.0;
  f.for_each([&](const Index& i, std::size_t lin) {
    const double fi = f.samples()[lin];
    if (fi == 0.0) return;
    Vec x = f.site_position(i);
    for (int a = 0; a < d; ++a) x[a] += mo.translation[a];
    const Vec y = rot.apply(x);
    // g-pixel coordinates of the transformed point
    double ypix[3] = {0, 0, 0};
    int lo[3] = {0, 0, 0}, hi[3] = {0, 0, 0};
    bool empty = false;
    for (int a = 0; a < d; ++a) {
      ypix[a] = (y[a] + g.origin()[a]) / g.period();
      lo[a] = std::max(0, static_cast<int>(std::ceil(ypix[a] - reach)));
      hi[a] = std::min(g.extent(a) - 1, static_cast<int>(std::floor(ypix[a] + reach)));
      empty = empty || lo[a] > hi[a];
    }
    if (empty) return;
    double acc = 0.0;
    Index j{0, 0, 0};
    const int z0 = d == 3 ? lo[2] : 0, z1 = d == 3 ? hi[2] : 0;
    for (j[2] = z0; j[2] <= z1; ++j[2])
      for (j[1] = lo[1]; j[1] <= hi[1]; ++j[1])
        for (j[0] = lo[0]; j[0] <= hi[0]; ++j[0]) {
          const double gj = g.at(j);
          if (gj == 0.0) continue;
          Vec c{0, 0, 0};
          for (int a = 0; a < d; ++a) c[a] = ypix[a] - j[a];
          const double w = w_kernel(kernel, a_mat, c, d, gl_nodes);
          if (w != 0.0) acc += gj * w;
        }
    q += fi * acc;
  });
  return TargetValue{cell * q, TargetMethod::ExactKernel};
}

// Bilinear / trilinear gather at pixel coordinates u (zero outside the grid).
static double linear_read(const DiscreteImage& g, const double* u, int d) {
  int base[3] = {0, 0, 0};
  double fr[3] = {0, 0, 0};
  for (int a = 0; a < d; ++a) {
    const double fl = std::floor(u[a]);
    base[a] = static_cast<int>(fl);
    fr[a] = u[a] - fl;
    if (base[a] < -1 || base[a] > g.extent(a) - 1) return 0.0;
  }
  const auto s = g.samples();
  const int nx = g.extent(0), ny = g.extent(1);
  auto tap = [&](int ix, int iy, int iz) -> double {
    if (ix < 0 || iy < 0 || ix >= nx || iy >= ny) return 0.0;
    std::size_t lin = static_cast<std::size_t>(iz) * ny + iy;
    return s[lin * nx + ix];
  };
  if (d == 2) {
    const double v00 = tap(base[0], base[1], 0), v10 = tap(base[0] + 1, base[1], 0);
    const double v01 = tap(base[0], base[1] + 1, 0), v11 = tap(base[0] + 1, base[1] + 1, 0);
    const double a = v00 + fr[0] * (v10 - v00);
    const double b = v01 + fr[0] * (v11 - v01);
    return a + fr[1] * (b - a);
  }
  const int nz = g.extent(2);
  double acc = 0.0;
  for (int kz = 0; kz < 2; ++kz) {
    const int iz = base[2] + kz;
    if (iz < 0 || iz >= nz) continue;
    const double wz = kz ? fr[2] : 1.0 - fr[2];
    if (wz == 0.0) continue;
    const double v00 = tap(base[0], base[1], iz), v10 = tap(base[0] + 1, base[1], iz);
    const double v01 = tap(base[0], base[1] + 1, iz), v11 = tap(base[0] + 1, base[1] + 1, iz);
    const double a = v00 + fr[0] * (v10 - v00);
    const double b = v01 + fr[0] * (v11 - v01);
    acc += wz * (a + fr[1] * (b - a));
  }
  return acc;
}

static double nearest_read(const DiscreteImage& g, const double* u, int d) {
  Index i{0, 0, 0};
  for (int a = 0; a < d; ++a) {
    i[a] = static_cast<int>(std::lround(u[a]));
    if (i[a] < 0 || i[a] >= g.extent(a)) return 0.0;
  }
  return g.at(i);
}

static TargetValue lattice_sampled_correlation(const DiscreteImage& f, const DiscreteImage& g,
                                               const Kernel& kernel, const Mat& rot,
                                               const Vec& t, const DiscreteImage* upsampled_g,
                                               TargetMethod method) {
  const int d = f.dims();
  if (d != g.dims()) throw std::invalid_argument("correlation: dimension mismatch");
  const DiscreteImage& gg = upsampled_g ? *upsampled_g : g;
  const Kernel read_kernel = upsampled_g && kernel.type == KernelType::Sinc
                                 ? Kernel::box()  // nearest-bin lookup on the upsampled lattice
                                 : kernel;
  const double cell = std::pow(f.period(), d);

  // Hot path for the search: iterate lattice rows, advancing the transformed
  // point incrementally, with direct linear/nearest gathers.
  if (read_kernel.type != KernelType::Sinc) {
    const bool nearest = read_kernel.type == KernelType::Box;
    const double inv_tg = 1.0 / gg.period();
    // pixel-space transform: u = (rot (x + t) + origin_g) / T_g
    double step_x[3] = {0, 0, 0};  // du per +1 f-index along x
    for (int r = 0; r < d; ++r) step_x[r] = rot.m[r][0] * f.period() * inv_tg;
    const auto fs = f.samples();
    const int nx = f.extent(0), ny = f.extent(1), nz = d == 3 ? f.extent(2) : 1;
    double q = 0.0;
    std::size_t lin = 0;
    for (int iz = 0; iz < nz; ++iz)
      for (int iy = 0; iy < ny; ++iy) {
        Vec x0{-f.origin()[0] + t[0], iy * f.period() - f.origin()[1] + t[1],
               d == 3 ? iz * f.period() - f.origin()[2] + t[2] : 0.0};
        const Vec y0 = rot.apply(x0);
        double u[3] = {0, 0, 0};
        for (int r = 0; r < d; ++r) u[r] = (y0[r] + gg.origin()[r]) * inv_tg;
        for (int ix = 0; ix < nx; ++ix, ++lin) {
          const double fi = fs[lin];
          if (fi != 0.0) {
            const double v = nearest ? nearest_read(gg, u, d) : linear_read(gg, u, d);
            q += fi * v;
          }
          for (int r = 0; r < d; ++r) u[r] += step_x[r];
        }
      }
    return TargetValue{cell * q, method};
  }

  double q = 0.0;
  f.for_each([&](const Index& i, std::size_t lin) {
    const double fi = f.samples()[lin];
    if (fi == 0.0) return;
    Vec x = f.site_position(i);
    for (int a = 0; a < d; ++a) x[a] += t[a];
    const Vec y = rot.apply(x);
    q += fi * interpolate(gg, read_kernel, y);
  });
  return TargetValue{cell * q, method};
}

TargetValue correlation_discretized(const DiscreteImage& f, const DiscreteImage& g,
                                    const Kernel& kernel, const RigidMotion& motion,
                                    const DiscreteImage* upsampled_g) {
  const RigidMotion mo = canonical(motion);
  return lattice_sampled_correlation(f, g, kernel, rotation_matrix(mo), mo.translation,
                                     upsampled_g, TargetMethod::Discretized);
}

TargetValue correlation_lowhigh(const DiscreteImage& f_low, const DiscreteImage& g,
                                const Kernel& kernel, const RigidMotion& motion, int m) {
  const RigidMotion mo = canonical(motion);
  return correlation_lowhigh_linear(f_low, g, kernel, rotation_matrix(mo), mo.translation, m);
}

TargetValue correlation_lowhigh_linear(const DiscreteImage& f_low, const DiscreteImage& g,
                                       const Kernel& kernel, const Mat& rot, const Vec& t,
                                       int m) {
  if (m < 1) throw std::invalid_argument("correlation_lowhigh: m must be >= 1");
  if (std::abs(f_low.period() - m * g.period()) > 1e-9 * f_low.period())
    throw std::invalid_argument("correlation_lowhigh: period mismatch (f.period != m*g.period)");
  return lattice_sampled_correlation(f_low, g, kernel, rot, t, nullptr,
                                     TargetMethod::LowHighDiscretized);
}

// Catmull-Rom weights for fractional offset u in [0,1).
static inline void catmull_rom(double u, double w[4]) {
  const double u2 = u * u, u3 = u2 * u;
  w[0] = 0.5 * (-u3 + 2 * u2 - u);
  w[1] = 0.5 * (3 * u3 - 5 * u2 + 2);
  w[2] = 0.5 * (-3 * u3 + 4 * u2 + u);
  w[3] = 0.5 * (u3 - u2);
}

cplx spectrum_interpolate(const Spectrum& spectrum, const Vec& z) {
  const int d = spectrum.dims();
  int base[3] = {0, 0, 0};
  double wts[3][4];
  for (int a = 0; a < d; ++a) {
    const double q = z[a] / spectrum.freq_step(a);  // signed index space
    const double fq = std::floor(q);
    base[a] = static_cast<int>(fq) - 1;
    catmull_rom(q - fq, wts[a]);
  }
  // Signed index -> (storage index, phase) on the closed Nyquist box with
  // zero extension outside. s = +n/2 aliases onto the stored -n/2 plane; the
  // stored origin phase belongs to z = -1/(2T), so the alias carries the
  // correction e^{2pi i x0/T}. The corrected extension is exactly the trig
  // polynomial, hence Hermitian.
  struct Read {
    int idx;
    cplx phase;
  };
  auto coeff = [&](int s, int axis) -> Read {
    const int n = spectrum.extents()[axis];
    if (s < -(n / 2) || s > n / 2) return {-1, cplx(0, 0)};
    if (2 * s == n) {
      const double ph = spectrum.origin()[axis] / spectrum.period();
      return {n / 2, std::polar(1.0, 2.0 * std::numbers::pi * ph)};
    }
    return {((s % n) + n) % n, cplx(1, 0)};
  };
  cplx acc(0, 0);
  for (int i = 0; i < 4; ++i) {
    const Read r0 = coeff(base[0] + i, 0);
    if (r0.idx < 0 || wts[0][i] == 0.0) continue;
    for (int j = 0; j < 4; ++j) {
      const Read r1 = coeff(base[1] + j, 1);
      if (r1.idx < 0 || wts[1][j] == 0.0) continue;
      if (d == 2) {
        acc += wts[0][i] * wts[1][j] * r0.phase * r1.phase *
               spectrum.coeffs()[spectrum.linear(Index{r0.idx, r1.idx, 0})];
      } else {
        for (int k = 0; k < 4; ++k) {
          const Read r2 = coeff(base[2] + k, 2);
          if (r2.idx < 0 || wts[2][k] == 0.0) continue;
          acc += wts[0][i] * wts[1][j] * wts[2][k] * r0.phase * r1.phase * r2.phase *
                 spectrum.coeffs()[spectrum.linear(Index{r0.idx, r1.idx, r2.idx})];
        }
      }
    }
  }
  return acc;
}

TargetValue correlation_frequency(const Spectrum& F, const Spectrum& G,
                                  const RigidMotion& motion) {
  const RigidMotion mo = canonical(motion);
  return correlation_frequency_linear(F, G, rotation_matrix(mo), mo.translation);
}

TargetValue correlation_frequency_linear(const Spectrum& F, const Spectrum& G, const Mat& rot,
                                         const Vec& t) {
  const int d = F.dims();
  if (d != G.dims()) throw std::invalid_argument("correlation_frequency: dimension mismatch");

  // Trapezoid sum over the closed Nyquist box: even-extent axes carry
  // half-weight +-Nyquist planes (aliases of the same stored bin), so every
  // term has its Hermitian mirror in the sum and Q is real to rounding.
  struct Node {
    int stored;
    double freq, weight;
    cplx phase;  // +Nyquist alias correction, as in spectrum_interpolate
  };
  std::array<std::vector<Node>, 3> axes;
  for (int a = 0; a < d; ++a) {
    const int n = F.extents()[a];
    const double step = F.freq_step(a);
    for (int s = -(n / 2); s <= n / 2; ++s) {
      if (2 * std::abs(s) == n) {
        cplx phase(1, 0);
        if (s > 0)
          phase = std::polar(1.0, 2.0 * std::numbers::pi * F.origin()[a] / F.period());
        axes[a].push_back({((s % n) + n) % n, s * step, 0.5, phase});
      } else if (std::abs(s) <= (n - 1) / 2) {
        axes[a].push_back({((s % n) + n) % n, s * step, 1.0, cplx(1, 0)});
      }
    }
  }
  cplx q(0, 0);
  double mag = 0.0;
  const auto& coeffs = F.coeffs();
  const int n0 = F.extents()[0], n1 = F.extents()[1];
  for (const Node& nz : (d == 3 ? axes[2] : std::vector<Node>{{0, 0.0, 1.0, cplx(1, 0)}}))
    for (const Node& ny : axes[1])
      for (const Node& nx : axes[0]) {
        const std::size_t lin =
            (static_cast<std::size_t>(nz.stored) * n1 + ny.stored) * n0 + nx.stored;
        const cplx fv = coeffs[lin] * nx.phase * ny.phase * nz.phase;
        if (fv == cplx(0, 0)) continue;
        const Vec z{nx.freq, ny.freq, nz.freq};
        const cplx gv = spectrum_interpolate(G, rot.apply(z));
        if (gv == cplx(0, 0)) continue;
        double ph = 0;
        for (int a = 0; a < d; ++a) ph += t[a] * z[a];
        const double w = nx.weight * ny.weight * nz.weight;
        const cplx term =
            w * std::conj(fv) * gv * std::polar(1.0, 2.0 * std::numbers::pi * ph);
        q += term;
        mag += std::abs(term);
      }
  const double cv = F.cell_volume();
  q *= cv;
  mag *= cv;
  if (std::abs(q.imag()) > 1e-9 * std::max(mag, 1e-30) + 1e-15)
    throw std::runtime_error("correlation_frequency: imaginary residue too large");
  return TargetValue{q.real(), TargetMethod::Frequency};
}

}  // namespace rigidreg
