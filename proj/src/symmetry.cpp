#include "rigidreg/symmetry.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace rigidreg {

Vec ReflectionParams::normal() const {
  return dims == 2 ? Vec{std::cos(phi), std::sin(phi), 0} : axis_from_angles(phi, psi);
}

Vec reflect_point(const ReflectionParams& params, const Vec& x) {
  const Vec u = params.normal();
  const int d = params.dims;
  Vec shifted{0, 0, 0};
  for (int a = 0; a < d; ++a) shifted[a] = x[a] - 2.0 * params.alpha_plane * u[a];
  return Mat::reflection(u, d).apply(shifted);
}

namespace {

void reflection_transform(const ReflectionParams& params, Mat& rot, Vec& t) {
  const Vec u = params.normal();
  rot = Mat::reflection(u, params.dims);
  t = Vec{0, 0, 0};
  for (int a = 0; a < params.dims; ++a) t[a] = -2.0 * params.alpha_plane * u[a];
}

}  // namespace

TargetValue symmetry_target(const Spectrum& F, const ReflectionParams& params) {
  Mat rot;
  Vec t;
  reflection_transform(params, rot, t);
  return correlation_frequency_linear(F, F, rot, t);
}

TargetValue symmetry_target(const DiscreteImage& f, const ReflectionParams& params,
                            TargetMethod method, int pad_factor) {
  Mat rot;
  Vec t;
  reflection_transform(params, rot, t);
  switch (method) {
    case TargetMethod::Frequency: {
      const Spectrum F = forward_dft(f, pad_factor);
      return correlation_frequency_linear(F, F, rot, t);
    }
    case TargetMethod::Discretized:
      return correlation_lowhigh_linear(f, f, Kernel::triangular(), rot, t, 1);
    default:
      throw std::invalid_argument("symmetry_target: unsupported method");
  }
}

SymmetryResult detect_symmetry(const DiscreteImage& f, const SearchConfig& config) {
  ResolutionPyramid pyr = build_pyramid(f, f, config, /*symmetry=*/true);
  SymmetryProblem problem(pyr);
  const ParamBox box = problem.default_box();

  // Seed Q* from a coarse deterministic scan (the algorithm's optional
  // initial solution): argmax of the coarsest-level target over a small
  // grid, evaluated once at full resolution inside branch_and_bound.
  const int l_top = pyr.l_max();
  std::vector<double> seed;
  double seed_q = -std::numeric_limits<double>::infinity();
  const int n_phi = 12, n_psi = f.dims() == 3 ? 7 : 1, n_alpha = 9;
  for (int ip = 0; ip < n_phi; ++ip)
    for (int is = 0; is < n_psi; ++is)
      for (int ia = 0; ia < n_alpha; ++ia) {
        std::vector<double> p;
        p.push_back(box.lo[0] + (box.hi[0] - box.lo[0]) * (ip + 0.5) / n_phi);
        if (f.dims() == 3)
          p.push_back(box.lo[1] + (box.hi[1] - box.lo[1]) * (is + 0.5) / n_psi);
        const int ai = f.dims() == 2 ? 1 : 2;
        p.push_back(box.lo[ai] + (box.hi[ai] - box.lo[ai]) * (ia + 0.5) / n_alpha);
        const double q = problem.eval(l_top, p);
        if (q > seed_q) {
          seed_q = q;
          seed = p;
        }
      }

  const BnbResult bnb = branch_and_bound(problem, box, seed);

  SymmetryResult out;
  out.params.dims = f.dims();
  out.params.phi = bnb.params[0];
  if (f.dims() == 3) out.params.psi = bnb.params[1];
  out.params.alpha_plane = bnb.params[f.dims() == 2 ? 1 : 2];
  out.q_star = bnb.q_star;
  out.q_up = bnb.q_up;
  out.complete = bnb.complete;
  out.stats = bnb.stats;
  return out;
}

}  // namespace rigidreg
