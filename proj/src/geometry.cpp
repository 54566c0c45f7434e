#include "rigidreg/geometry.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>

namespace rigidreg {

Mat Mat::identity(int dims) {
  Mat r;
  r.dims = dims;
  for (int i = 0; i < dims; ++i) r.m[i][i] = 1.0;
  return r;
}

Mat Mat::rotation_2d(double theta) {
  Mat r;
  r.dims = 2;
  const double c = std::cos(theta), s = std::sin(theta);
  r.m[0][0] = c;
  r.m[0][1] = -s;
  r.m[1][0] = s;
  r.m[1][1] = c;
  return r;
}

Vec axis_from_angles(double phi, double psi) {
  return Vec{std::cos(phi) * std::cos(psi), std::sin(phi) * std::cos(psi), std::sin(psi)};
}

Mat Mat::rotation_3d(double phi, double psi, double theta) {
  const Vec w = axis_from_angles(phi, psi);
  const double c = std::cos(theta), s = std::sin(theta);
  Mat r;
  r.dims = 3;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      const double wwt = w[i] * w[j];
      const double eye = i == j ? 1.0 : 0.0;
      r.m[i][j] = c * (eye - wwt) + wwt;
    }
  // + sin(theta) [w]_x
  r.m[0][1] += -s * w[2];
  r.m[0][2] += s * w[1];
  r.m[1][0] += s * w[2];
  r.m[1][2] += -s * w[0];
  r.m[2][0] += -s * w[1];
  r.m[2][1] += s * w[0];
  return r;
}

Mat Mat::reflection(const Vec& u, int dims) {
  Mat r = identity(dims);
  for (int i = 0; i < dims; ++i)
    for (int j = 0; j < dims; ++j) r.m[i][j] -= 2.0 * u[i] * u[j];
  return r;
}

Vec Mat::apply(const Vec& v) const {
  Vec out{0, 0, 0};
  for (int i = 0; i < dims; ++i)
    for (int j = 0; j < dims; ++j) out[i] += m[i][j] * v[j];
  return out;
}

Mat Mat::transposed() const {
  Mat r;
  r.dims = dims;
  for (int i = 0; i < dims; ++i)
    for (int j = 0; j < dims; ++j) r.m[i][j] = m[j][i];
  return r;
}

Mat Mat::times(const Mat& o) const {
  Mat r;
  r.dims = dims;
  for (int i = 0; i < dims; ++i)
    for (int j = 0; j < dims; ++j) {
      double s = 0;
      for (int k = 0; k < dims; ++k) s += m[i][k] * o.m[k][j];
      r.m[i][j] = s;
    }
  return r;
}

double Mat::det() const {
  if (dims == 2) return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
         m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

Mat rotation_matrix(const RigidMotion& motion) {
  return motion.dims == 2 ? Mat::rotation_2d(motion.theta)
                          : Mat::rotation_3d(motion.phi, motion.psi, motion.theta);
}

RigidMotion about_center(const RigidMotion& user_motion, const Vec& center) {
  RigidMotion out = user_motion;
  const Mat rt = rotation_matrix(user_motion).transposed();
  Vec shifted{0, 0, 0};
  for (int a = 0; a < user_motion.dims; ++a)
    shifted[a] = center[a] + user_motion.translation[a];
  const Vec rts = rt.apply(shifted);
  for (int a = 0; a < user_motion.dims; ++a) out.translation[a] = rts[a] - center[a];
  return out;
}

// ---- 2D clipping ----

Poly2 clip_halfplane(const Poly2& poly, const std::array<double, 2>& n, double c) {
  Poly2 out;
  const std::size_t k = poly.size();
  if (k == 0) return out;
  out.reserve(k + 1);
  for (std::size_t i = 0; i < k; ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % k];
    const double dp = n[0] * p[0] + n[1] * p[1] - c;
    const double dq = n[0] * q[0] + n[1] * q[1] - c;
    if (dp <= 0) out.push_back(p);
    if ((dp < 0 && dq > 0) || (dp > 0 && dq < 0)) {
      const double t = dp / (dp - dq);
      out.push_back({p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])});
    }
  }
  return out;
}

double polygon_area(const Poly2& poly) {
  double a = 0;
  const std::size_t k = poly.size();
  for (std::size_t i = 0; i < k; ++i) {
    const auto& p = poly[i];
    const auto& q = poly[(i + 1) % k];
    a += p[0] * q[1] - q[0] * p[1];
  }
  return 0.5 * std::abs(a);
}

double integrate_polygon(const Poly2& poly, const std::function<double(double, double)>& f) {
  if (poly.size() < 3) return 0.0;
  // Degree-5 exact 7-point rule on each fan triangle.
  static const double w0 = 9.0 / 40.0;
  static const double a1 = 0.059715871789770, b1 = 0.470142064105115, w1 = 0.132394152788506;
  static const double a2 = 0.797426985353087, b2 = 0.101286507323456, w2 = 0.125939180544827;
  static const double bary[7][3] = {
      {1.0 / 3, 1.0 / 3, 1.0 / 3}, {a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1},
      {a2, b2, b2},                {b2, a2, b2}, {b2, b2, a2}};
  static const double wts[7] = {w0, w1, w1, w1, w2, w2, w2};
  double total = 0;
  const auto& v0 = poly[0];
  for (std::size_t i = 1; i + 1 < poly.size(); ++i) {
    const auto& v1 = poly[i];
    const auto& v2 = poly[i + 1];
    const double area2 = (v1[0] - v0[0]) * (v2[1] - v0[1]) - (v2[0] - v0[0]) * (v1[1] - v0[1]);
    const double area = 0.5 * area2;
    double acc = 0;
    for (int q = 0; q < 7; ++q) {
      const double x = bary[q][0] * v0[0] + bary[q][1] * v1[0] + bary[q][2] * v2[0];
      const double y = bary[q][0] * v0[1] + bary[q][1] * v1[1] + bary[q][2] * v2[1];
      acc += wts[q] * f(x, y);
    }
    total += acc * area;
  }
  return total;
}

// ---- 3D clipping ----

Poly3 Poly3::cube(const Vec& lo, const Vec& hi) {
  Poly3 p;
  p.verts = {{lo[0], lo[1], lo[2]}, {hi[0], lo[1], lo[2]}, {hi[0], hi[1], lo[2]},
             {lo[0], hi[1], lo[2]}, {lo[0], lo[1], hi[2]}, {hi[0], lo[1], hi[2]},
             {hi[0], hi[1], hi[2]}, {lo[0], hi[1], hi[2]}};
  p.faces = {{0, 3, 2, 1}, {4, 5, 6, 7}, {0, 1, 5, 4}, {2, 3, 7, 6}, {1, 2, 6, 5}, {0, 4, 7, 3}};
  return p;
}

Poly3 clip_halfspace(const Poly3& poly, const Vec& n, double c) {
  const double eps = 1e-12;
  std::vector<double> dist(poly.verts.size());
  bool any_in = false, any_out = false;
  for (std::size_t i = 0; i < poly.verts.size(); ++i) {
    const auto& v = poly.verts[i];
    dist[i] = n[0] * v[0] + n[1] * v[1] + n[2] * v[2] - c;
    (dist[i] <= eps ? any_in : any_out) = true;
  }
  if (!any_out) return poly;
  if (!any_in) return Poly3{};

  Poly3 out;
  std::map<std::pair<int, int>, int> edge_cut;  // original edge -> new vertex
  std::vector<int> remap(poly.verts.size(), -1);
  auto keep_vertex = [&](int i) {
    if (remap[i] < 0) {
      remap[i] = static_cast<int>(out.verts.size());
      out.verts.push_back(poly.verts[i]);
    }
    return remap[i];
  };
  auto cut_vertex = [&](int i, int j) {
    const auto key = std::minmax(i, j);
    auto it = edge_cut.find(key);
    if (it != edge_cut.end()) return it->second;
    const double t = dist[i] / (dist[i] - dist[j]);
    std::array<double, 3> v;
    for (int a = 0; a < 3; ++a) v[a] = poly.verts[i][a] + t * (poly.verts[j][a] - poly.verts[i][a]);
    const int idx = static_cast<int>(out.verts.size());
    out.verts.push_back(v);
    edge_cut.emplace(key, idx);
    return idx;
  };

  for (const auto& face : poly.faces) {
    std::vector<int> nf;
    const std::size_t k = face.size();
    for (std::size_t e = 0; e < k; ++e) {
      const int i = face[e], j = face[(e + 1) % k];
      const bool in_i = dist[i] <= eps, in_j = dist[j] <= eps;
      if (in_i) nf.push_back(keep_vertex(i));
      if (in_i != in_j && std::abs(dist[i]) > eps && std::abs(dist[j]) > eps)
        nf.push_back(cut_vertex(i, j));
    }
    if (nf.size() >= 3) out.faces.push_back(nf);
  }
  // Close the cap. Boundary edges are directed edges whose reverse is absent;
  // the cap walks them reversed. This stays correct when the plane passes
  // exactly through vertices.
  std::map<std::pair<int, int>, int> edge_use;
  for (const auto& face : out.faces)
    for (std::size_t e = 0; e < face.size(); ++e)
      edge_use[{face[e], face[(e + 1) % face.size()]}]++;
  std::map<int, int> next;
  for (const auto& [edge, uses] : edge_use) {
    (void)uses;
    if (!edge_use.count({edge.second, edge.first})) next[edge.second] = edge.first;
  }
  if (next.size() >= 3) {
    std::vector<int> cap;
    const int start = next.begin()->first;
    int cur = start;
    do {
      cap.push_back(cur);
      auto it = next.find(cur);
      if (it == next.end()) break;
      cur = it->second;
    } while (cur != start && cap.size() <= next.size() + 1);
    if (cap.size() >= 3 && cur == start) out.faces.push_back(cap);
  }
  return out;
}

double polyhedron_volume(const Poly3& poly) {
  double v6 = 0;
  for (const auto& face : poly.faces) {
    const auto& a = poly.verts[face[0]];
    for (std::size_t i = 1; i + 1 < face.size(); ++i) {
      const auto& b = poly.verts[face[i]];
      const auto& c = poly.verts[face[i + 1]];
      v6 += a[0] * (b[1] * c[2] - b[2] * c[1]) - a[1] * (b[0] * c[2] - b[2] * c[0]) +
            a[2] * (b[0] * c[1] - b[1] * c[0]);
    }
  }
  return std::abs(v6) / 6.0;
}

}  // namespace rigidreg
