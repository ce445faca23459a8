#ifndef DUALSHAPES_REFELEM_HPP
#define DUALSHAPES_REFELEM_HPP

#include <array>
#include <stdexcept>
#include <vector>

#include "dualshapes/orthopoly.hpp"

namespace dualshapes {

/// Cartesian coordinates; the third component is ignored on 2D elements.
using Point3 = std::array<double, 3>;

enum class ElementKind { quad, hex, triangle, tetrahedron };

inline int element_dim(ElementKind kind) {
  return (kind == ElementKind::quad || kind == ElementKind::triangle) ? 2 : 3;
}

/// Measure (area/volume) of the reference element.
inline double element_measure(ElementKind kind) {
  switch (kind) {
    case ElementKind::quad: return 4.0;
    case ElementKind::hex: return 8.0;
    case ElementKind::triangle: return 2.0;
    case ElementKind::tetrahedron: return 4.0 / 3.0;
  }
  throw std::invalid_argument("unknown element kind");
}

/// Reference element with its fixed vertex convention:
/// quad/hex are [-1,1]^d, the triangle has vertices (-1,-1),(1,-1),(0,1)
/// and the tetrahedron (-1,-1,-1),(1,-1,-1),(0,1,-1),(0,0,1).
struct ReferenceElement {
  ElementKind kind = ElementKind::quad;
  std::vector<Point3> vertices;
};

inline ReferenceElement reference_element(ElementKind kind) {
  ReferenceElement el;
  el.kind = kind;
  switch (kind) {
    case ElementKind::quad:
      el.vertices = {{-1, -1, 0}, {1, -1, 0}, {1, 1, 0}, {-1, 1, 0}};
      break;
    case ElementKind::hex:
      el.vertices = {{-1, -1, -1}, {1, -1, -1}, {1, 1, -1}, {-1, 1, -1},
                     {-1, -1, 1},  {1, -1, 1},  {1, 1, 1},  {-1, 1, 1}};
      break;
    case ElementKind::triangle:
      el.vertices = {{-1, -1, 0}, {1, -1, 0}, {0, 1, 0}};
      break;
    case ElementKind::tetrahedron:
      el.vertices = {{-1, -1, -1}, {1, -1, -1}, {0, 1, -1}, {0, 0, 1}};
      break;
  }
  return el;
}

/// Collapsed (Duffy) coordinates.  On the triangle eta = 2x/(1-y); on the
/// tetrahedron eta = 4x/(1-2y-z) and chi = 2y/(1-z).  z_or_y holds the last
/// Cartesian coordinate, which the collapse leaves unchanged.  On quad/hex
/// the collapsed and Cartesian coordinates coincide.
struct CollapsedPoint {
  double eta = 0.0;
  double chi = 0.0;
  double z_or_y = 0.0;
};

/// Map collapsed coordinates to Cartesian ones.
inline Point3 duffy_to_cartesian(ElementKind kind, const CollapsedPoint& p) {
  switch (kind) {
    case ElementKind::quad:
      return {p.eta, p.z_or_y, 0.0};
    case ElementKind::hex:
      return {p.eta, p.chi, p.z_or_y};
    case ElementKind::triangle:
      return {p.eta * (1.0 - p.z_or_y) / 2.0, p.z_or_y, 0.0};
    case ElementKind::tetrahedron: {
      const double fz = (1.0 - p.z_or_y) / 2.0;
      const double fc = (1.0 - p.chi) / 2.0;
      return {p.eta * fc * fz, p.chi * fz, p.z_or_y};
    }
  }
  throw std::invalid_argument("unknown element kind");
}

/// Map Cartesian coordinates to collapsed ones.  On a collapse line
/// (y = 1 on the triangle; z = 1 or 2y + z = 1 on the tetrahedron) the
/// singular ratio is replaced by 0; every shape function below carries a
/// positive power of the vanishing factor, so the product is unaffected.
inline CollapsedPoint cartesian_to_duffy(ElementKind kind, const Point3& pt) {
  CollapsedPoint p;
  switch (kind) {
    case ElementKind::quad:
      p.eta = pt[0];
      p.z_or_y = pt[1];
      return p;
    case ElementKind::hex:
      p.eta = pt[0];
      p.chi = pt[1];
      p.z_or_y = pt[2];
      return p;
    case ElementKind::triangle: {
      const double den = 1.0 - pt[1];
      p.eta = (den == 0.0) ? 0.0 : 2.0 * pt[0] / den;
      p.z_or_y = pt[1];
      return p;
    }
    case ElementKind::tetrahedron: {
      const double den_eta = 1.0 - 2.0 * pt[1] - pt[2];
      const double den_chi = 1.0 - pt[2];
      p.eta = (den_eta == 0.0) ? 0.0 : 4.0 * pt[0] / den_eta;
      p.chi = (den_chi == 0.0) ? 0.0 : 2.0 * pt[1] / den_chi;
      p.z_or_y = pt[2];
      return p;
    }
  }
  throw std::invalid_argument("unknown element kind");
}

/// Jacobian of the Duffy map: (1-y)/2 on the triangle,
/// ((1-chi)/2)((1-z)/2)^2 on the tetrahedron, 1 on quad/hex.
inline double duffy_volume_factor(ElementKind kind, const CollapsedPoint& p) {
  switch (kind) {
    case ElementKind::quad:
    case ElementKind::hex:
      return 1.0;
    case ElementKind::triangle:
      return (1.0 - p.z_or_y) / 2.0;
    case ElementKind::tetrahedron: {
      const double fz = (1.0 - p.z_or_y) / 2.0;
      return (1.0 - p.chi) / 2.0 * fz * fz;
    }
  }
  throw std::invalid_argument("unknown element kind");
}

/// Quadrature rule over one element: Cartesian points, weights with the
/// Duffy volume factor already folded in.  exactness_degree is a total
/// degree on simplices and a per-direction degree on quad/hex.
struct ElementQuadrature {
  std::vector<Point3> points;
  std::vector<double> weights;
  int exactness_degree = -1;
};

/// Tensor Gauss rule in collapsed coordinates, exact for polynomials of
/// degree <= target_degree on the element.  The per-direction node count
/// adds headroom for the volume-factor degree (1 on the triangle, 3 on the
/// tetrahedron) plus one guard point.
inline ElementQuadrature element_quadrature(ElementKind kind, int target_degree) {
  if (target_degree < 0) throw std::invalid_argument("target_degree must be >= 0");
  int voldeg = 0;
  if (kind == ElementKind::triangle) voldeg = 1;
  if (kind == ElementKind::tetrahedron) voldeg = 3;
  const int npts = (target_degree + voldeg + 1) / 2 + 1;
  const QuadratureRule1D line = gauss_rule(npts);

  ElementQuadrature quad;
  quad.exactness_degree = target_degree;
  const int dim = element_dim(kind);
  const int nz = (dim == 3) ? npts : 1;
  for (int iz = 0; iz < nz; ++iz)
    for (int iy = 0; iy < npts; ++iy)
      for (int ix = 0; ix < npts; ++ix) {
        CollapsedPoint p;
        p.eta = line.points[ix];
        if (dim == 2) {
          p.z_or_y = line.points[iy];
        } else {
          p.chi = line.points[iy];
          p.z_or_y = line.points[iz];
        }
        double w = line.weights[ix] * line.weights[iy];
        if (dim == 3) w *= line.weights[iz];
        quad.points.push_back(duffy_to_cartesian(kind, p));
        quad.weights.push_back(w * duffy_volume_factor(kind, p));
      }
  return quad;
}

}  // namespace dualshapes

#endif  // DUALSHAPES_REFELEM_HPP
