#pragma once

#include <array>
#include <functional>
#include <vector>

#include "rigidreg/image.hpp"

namespace rigidreg {

// Row-major d x d matrix, d <= 3.
struct Mat {
  int dims = 2;
  std::array<std::array<double, 3>, 3> m{};

  static Mat identity(int dims);
  static Mat rotation_2d(double theta);
  // Axis-angle form: R z = cos t (I - w w^T) z + sin t (w x z) + w w^T z,
  // with axis w(phi, psi) = (cos phi cos psi, sin phi cos psi, sin psi).
  static Mat rotation_3d(double phi, double psi, double theta);
  // Reflection through the plane with unit normal u: I - 2 u u^T (det -1).
  static Mat reflection(const Vec& u, int dims);

  Vec apply(const Vec& v) const;
  Mat transposed() const;
  Mat times(const Mat& other) const;
  double det() const;
};

Vec axis_from_angles(double phi, double psi);

// Rotation parameters (angle in 2D, axis-angle in 3D) plus a world-space
// translation. With center == 0 the transform is x -> R(x + t) about the
// world origin; a nonzero center means "rotate about c", which evaluators
// fold into the origin form via t_eq = R^T(c + t) - c.
struct RigidMotion {
  int dims = 2;
  double theta = 0.0;           // rotation angle (2D and 3D)
  double phi = 0.0, psi = 0.0;  // 3D axis direction angles
  Vec translation{0, 0, 0};
  Vec center{0, 0, 0};

  static RigidMotion identity(int dims) { return RigidMotion{dims}; }
  static RigidMotion planar(double theta, double tx = 0, double ty = 0) {
    return RigidMotion{2, theta, 0, 0, Vec{tx, ty, 0}};
  }
  static RigidMotion spatial(double phi, double psi, double theta, Vec t = {0, 0, 0}) {
    return RigidMotion{3, theta, phi, psi, t};
  }
};

Mat rotation_matrix(const RigidMotion& motion);

// Canonicalize "rotate about center c with translation t_user" into the
// origin form x -> R(x + t).
RigidMotion about_center(const RigidMotion& user_motion, const Vec& center);

// ---- Convex clipping (exact kernel-pair weights) ----

using Poly2 = std::vector<std::array<double, 2>>;

// Clip a convex polygon by the half-plane n.x <= c.
Poly2 clip_halfplane(const Poly2& poly, const std::array<double, 2>& n, double c);
double polygon_area(const Poly2& poly);

// Integrate a polynomial callback over a convex polygon with a degree-5
// exact triangle rule (fan triangulation).
double integrate_polygon(const Poly2& poly,
                         const std::function<double(double, double)>& f);

// Convex polyhedron as vertex loops per face (outward-consistent orientation).
struct Poly3 {
  std::vector<std::array<double, 3>> verts;
  std::vector<std::vector<int>> faces;

  static Poly3 cube(const Vec& lo, const Vec& hi);
};

// Clip by the half-space n.x <= c.
Poly3 clip_halfspace(const Poly3& poly, const Vec& n, double c);
double polyhedron_volume(const Poly3& poly);

}  // namespace rigidreg
