#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

namespace rigidreg {

using Vec = std::array<double, 3>;   // world-space vector, entries beyond dims are 0
using Index = std::array<int, 3>;    // lattice index, entries beyond dims are 0

// Real-valued sample grid on a 2D/3D lattice. Sample i lives at world
// position T*i - origin; reads outside the stored grid are 0.
// Storage is row-major with x fastest: linear = x + nx*(y + ny*z).
class DiscreteImage {
 public:
  DiscreteImage(int dims, Index extents, double period, Vec origin = {0, 0, 0});

  int dims() const { return dims_; }
  const Index& extents() const { return extents_; }
  int extent(int axis) const { return extents_[axis]; }
  double period() const { return period_; }
  const Vec& origin() const { return origin_; }
  void set_origin(const Vec& o) { origin_ = o; }

  std::size_t size() const { return samples_.size(); }
  std::span<const double> samples() const { return samples_; }
  std::span<double> samples() { return samples_; }

  double& at(const Index& i) { return samples_[linear(i)]; }
  double at(const Index& i) const { return samples_[linear(i)]; }

  // Zero-extended read: any index outside the grid yields 0.
  double sample_or_zero(const Index& i) const;

  std::size_t linear(const Index& i) const;

  // World position of lattice site i:  T*i - origin.
  Vec site_position(const Index& i) const;

  void for_each(const std::function<void(const Index&, std::size_t)>& fn) const;

 private:
  int dims_;
  Index extents_;
  double period_;
  Vec origin_;
  std::vector<double> samples_;
};

enum class KernelType { Sinc, Box, Triangular };

// Separable interpolation kernel; 1 at the origin, 0 at other lattice sites.
struct Kernel {
  KernelType type = KernelType::Triangular;
  // Pixel radius used when Sinc is evaluated numerically; Box/Triangular
  // have their natural supports (1/2 and 1).
  double sinc_truncation_radius = 16.0;

  static Kernel sinc(double truncation_radius = 16.0) {
    return Kernel{KernelType::Sinc, truncation_radius};
  }
  static Kernel box() { return Kernel{KernelType::Box}; }
  static Kernel triangular() { return Kernel{KernelType::Triangular}; }

  int alpha() const { return type == KernelType::Triangular ? 2 : 1; }
  double support_radius() const {
    switch (type) {
      case KernelType::Box: return 0.5;
      case KernelType::Triangular: return 1.0;
      case KernelType::Sinc: return sinc_truncation_radius;
    }
    return 0.0;
  }
};

double sinc(double x);

// Separable product of 1D kernel values at a pixel-space offset.
double kernel_eval(const Kernel& kernel, std::span<const double> offset, int dims);

// Continuous-domain evaluation of the kernel-interpolated image at a world point.
double interpolate(const DiscreteImage& image, const Kernel& kernel, const Vec& point);

// L2 norm of the sinc-interpolated continuous image: sqrt(T^d * sum f_i^2).
double l2_norm(const DiscreteImage& image);

// Enlarge with `margin[axis]` zero samples on each side per axis; world
// coordinates of the original samples are unchanged.
DiscreteImage zero_pad(const DiscreteImage& image, const Index& margin);

}  // namespace rigidreg
