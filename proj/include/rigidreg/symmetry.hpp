#pragma once

#include "rigidreg/search.hpp"

namespace rigidreg {

// Reflection plane (line in 2D): unit normal u(phi[, psi]) and signed
// distance alpha from the world origin.
struct ReflectionParams {
  int dims = 2;
  double phi = 0.0;
  double psi = 0.0;          // 3D only
  double alpha_plane = 0.0;  // world units

  Vec normal() const;
};

// x' = (I - 2 u u^T)(x - 2 alpha u); an involution.
Vec reflect_point(const ReflectionParams& params, const Vec& x);

// Correlation of f with its mirror image: reuses the rigid-target machinery
// with R = I - 2 u u^T (improper) and t = -2 alpha u.
TargetValue symmetry_target(const DiscreteImage& f, const ReflectionParams& params,
                            TargetMethod method = TargetMethod::Frequency,
                            int pad_factor = 2);
TargetValue symmetry_target(const Spectrum& F, const ReflectionParams& params);

struct SymmetryResult {
  ReflectionParams params;
  double q_star = 0.0;
  double q_up = 0.0;
  bool complete = true;
  SearchStats stats;
};

// Branch-and-bound search for the best reflection axis (2D) / plane (3D)
// over (phi[, psi], alpha). Normals are canonicalized to a hemisphere.
SymmetryResult detect_symmetry(const DiscreteImage& f, const SearchConfig& config);

}  // namespace rigidreg
