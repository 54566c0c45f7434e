#include "rigidreg/image.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace rigidreg {

DiscreteImage::DiscreteImage(int dims, Index extents, double period, Vec origin)
    : dims_(dims), extents_(extents), period_(period), origin_(origin) {
  if (dims != 2 && dims != 3) throw std::invalid_argument("image dims must be 2 or 3");
  if (!(period > 0.0)) throw std::invalid_argument("sampling period must be > 0");
  std::size_t n = 1;
  for (int a = 0; a < dims; ++a) {
    if (extents_[a] < 1) throw std::invalid_argument("image extents must be >= 1");
    n *= static_cast<std::size_t>(extents_[a]);
  }
  for (int a = dims; a < 3; ++a) {
    extents_[a] = 1;
    origin_[a] = 0.0;
  }
  samples_.assign(n, 0.0);
}

std::size_t DiscreteImage::linear(const Index& i) const {
  std::size_t idx = static_cast<std::size_t>(i[dims_ - 1]);
  for (int a = dims_ - 2; a >= 0; --a)
    idx = idx * static_cast<std::size_t>(extents_[a]) + static_cast<std::size_t>(i[a]);
  return idx;
}

double DiscreteImage::sample_or_zero(const Index& i) const {
  for (int a = 0; a < dims_; ++a)
    if (i[a] < 0 || i[a] >= extents_[a]) return 0.0;
  return samples_[linear(i)];
}

Vec DiscreteImage::site_position(const Index& i) const {
  Vec p{0, 0, 0};
  for (int a = 0; a < dims_; ++a) p[a] = period_ * i[a] - origin_[a];
  return p;
}

void DiscreteImage::for_each(const std::function<void(const Index&, std::size_t)>& fn) const {
  Index i{0, 0, 0};
  std::size_t lin = 0;
  const int nz = extents_[2], ny = extents_[1], nx = extents_[0];
  for (i[2] = 0; i[2] < nz; ++i[2])
    for (i[1] = 0; i[1] < ny; ++i[1])
      for (i[0] = 0; i[0] < nx; ++i[0]) fn(i, lin++);
}

double sinc(double x) {
  if (x == 0.0) return 1.0;
  const double px = std::numbers::pi * x;
  return std::sin(px) / px;
}

static double kernel_eval_1d(const Kernel& kernel, double x) {
  switch (kernel.type) {
    case KernelType::Sinc:
      return std::abs(x) <= kernel.sinc_truncation_radius ? sinc(x) : 0.0;
    case KernelType::Box:
      return std::abs(x) <= 0.5 ? 1.0 : 0.0;
    case KernelType::Triangular: {
      const double v = 1.0 - std::abs(x);
      return v > 0.0 ? v : 0.0;
    }
  }
  return 0.0;
}

double kernel_eval(const Kernel& kernel, std::span<const double> offset, int dims) {
  if (static_cast<int>(offset.size()) != dims)
    throw std::invalid_argument("kernel_eval: offset length != dims");
  double v = 1.0;
  for (int a = 0; a < dims; ++a) {
    v *= kernel_eval_1d(kernel, offset[a]);
    if (v == 0.0) return 0.0;
  }
  return v;
}

double interpolate(const DiscreteImage& image, const Kernel& kernel, const Vec& point) {
  const int d = image.dims();
  const double inv_t = 1.0 / image.period();
  // Lattice coordinates of the query point: u = (point + origin)/T.
  double u[3];
  int lo[3], hi[3];
  const double r = kernel.support_radius();
  for (int a = 0; a < d; ++a) {
    u[a] = (point[a] + image.origin()[a]) * inv_t;
    lo[a] = std::max(0, static_cast<int>(std::ceil(u[a] - r)));
    hi[a] = std::min(image.extent(a) - 1, static_cast<int>(std::floor(u[a] + r)));
    if (lo[a] > hi[a]) return 0.0;
  }
  double acc = 0.0;
  Index i{0, 0, 0};
  const int z0 = (d == 3) ? lo[2] : 0, z1 = (d == 3) ? hi[2] : 0;
  for (i[2] = z0; i[2] <= z1; ++i[2]) {
    const double wz = (d == 3) ? kernel_eval_1d(kernel, u[2] - i[2]) : 1.0;
    if (wz == 0.0) continue;
    for (i[1] = lo[1]; i[1] <= hi[1]; ++i[1]) {
      const double wy = kernel_eval_1d(kernel, u[1] - i[1]);
      if (wy == 0.0) continue;
      double row = 0.0;
      for (i[0] = lo[0]; i[0] <= hi[0]; ++i[0]) {
        const double wx = kernel_eval_1d(kernel, u[0] - i[0]);
        if (wx != 0.0) row += wx * image.at(i);
      }
      acc += wz * wy * row;
    }
  }
  return acc;
}

double l2_norm(const DiscreteImage& image) {
  double s2 = 0.0;
  for (double v : image.samples()) s2 += v * v;
  return std::sqrt(std::pow(image.period(), image.dims()) * s2);
}

DiscreteImage zero_pad(const DiscreteImage& image, const Index& margin) {
  const int d = image.dims();
  Index ext = image.extents();
  Vec origin = image.origin();
  for (int a = 0; a < d; ++a) {
    if (margin[a] < 0) throw std::invalid_argument("zero_pad: margin must be >= 0");
    ext[a] += 2 * margin[a];
    origin[a] += image.period() * margin[a];
  }
  DiscreteImage out(d, ext, image.period(), origin);
  image.for_each([&](const Index& i, std::size_t) {
    Index j = i;
    for (int a = 0; a < d; ++a) j[a] += margin[a];
    out.at(j) = image.at(i);
  });
  return out;
}

}  // namespace rigidreg
