#ifndef DUALSHAPES_H1_HPP
#define DUALSHAPES_H1_HPP

#include <stdexcept>
#include <string>
#include <vector>

#include "dualshapes/orthopoly.hpp"
#include "dualshapes/refelem.hpp"

namespace dualshapes {

/// Index of one interior H1 bubble (or its dual).  Ranges:
///   quad/hex:     2 <= i, j(, k) <= p
///   triangle:     i >= 2, j >= 1, i + j <= p
///   tetrahedron:  i >= 2, j, k >= 1, i + j + k <= p
/// The third component is 0 on 2D elements.
struct H1Index {
  ElementKind element = ElementKind::quad;
  int i = 0;
  int j = 0;
  int k = 0;
};

namespace detail {

inline std::string h1_index_str(const H1Index& idx) {
  std::string s = std::to_string(idx.i) + "," + std::to_string(idx.j);
  if (element_dim(idx.element) == 3) s += "," + std::to_string(idx.k);
  return s;
}

inline void h1_check_index(const H1Index& idx) {
  bool ok = true;
  switch (idx.element) {
    case ElementKind::quad: ok = idx.i >= 2 && idx.j >= 2; break;
    case ElementKind::hex: ok = idx.i >= 2 && idx.j >= 2 && idx.k >= 2; break;
    case ElementKind::triangle: ok = idx.i >= 2 && idx.j >= 1; break;
    case ElementKind::tetrahedron:
      ok = idx.i >= 2 && idx.j >= 1 && idx.k >= 1;
      break;
  }
  if (!ok)
    throw std::invalid_argument("H1 index out of range: " + h1_index_str(idx));
}

}  // namespace detail

/// All valid H1 interior indices for degree p, in lexicographic (i,j,k) order.
inline std::vector<H1Index> h1_indices(ElementKind element, int p) {
  std::vector<H1Index> out;
  switch (element) {
    case ElementKind::quad:
      for (int i = 2; i <= p; ++i)
        for (int j = 2; j <= p; ++j) out.push_back({element, i, j, 0});
      break;
    case ElementKind::hex:
      for (int i = 2; i <= p; ++i)
        for (int j = 2; j <= p; ++j)
          for (int k = 2; k <= p; ++k) out.push_back({element, i, j, k});
      break;
    case ElementKind::triangle:
      for (int i = 2; i <= p; ++i)
        for (int j = 1; i + j <= p; ++j) out.push_back({element, i, j, 0});
      break;
    case ElementKind::tetrahedron:
      for (int i = 2; i <= p; ++i)
        for (int j = 1; i + j <= p; ++j)
          for (int k = 1; i + j + k <= p; ++k) out.push_back({element, i, j, k});
      break;
  }
  return out;
}

/// Interior bubble in collapsed coordinates.  Tensor products of
/// integrated Legendre polynomials on quad/hex; on the simplices each
/// collapsed direction carries the matching power of the vanishing factor:
///   triangle: Lhat_i(eta) ((1-y)/2)^i Phat_j^{2i}(y),
///   tet:      Lhat_i(eta) ((1-chi)/2)^i ((1-z)/2)^i Phat_j^{2i}(chi)
///             ((1-z)/2)^j Phat_k^{2i+2j}(z),
/// where Lhat/Phat are the antiderivatives vanishing at -1 (so every
/// factor vanishes on the element boundary).
inline double h1_primal_eval_collapsed(const H1Index& idx, const CollapsedPoint& p) {
  detail::h1_check_index(idx);
  const auto lhat = [](int n, double x) { return integrated_jacobi_integral(n, 0.0, x); };
  switch (idx.element) {
    case ElementKind::quad:
      return lhat(idx.i, p.eta) * lhat(idx.j, p.z_or_y);
    case ElementKind::hex:
      return lhat(idx.i, p.eta) * lhat(idx.j, p.chi) * lhat(idx.k, p.z_or_y);
    case ElementKind::triangle: {
      const double fy = (1.0 - p.z_or_y) / 2.0;
      return lhat(idx.i, p.eta) * std::pow(fy, idx.i) *
             integrated_jacobi_integral(idx.j, 2.0 * idx.i, p.z_or_y);
    }
    case ElementKind::tetrahedron: {
      const double fc = (1.0 - p.chi) / 2.0;
      const double fz = (1.0 - p.z_or_y) / 2.0;
      return lhat(idx.i, p.eta) * std::pow(fc, idx.i) * std::pow(fz, idx.i) *
             integrated_jacobi_integral(idx.j, 2.0 * idx.i, p.chi) *
             std::pow(fz, idx.j) *
             integrated_jacobi_integral(idx.k, 2.0 * (idx.i + idx.j), p.z_or_y);
    }
  }
  throw std::invalid_argument("unknown element kind");
}

inline double h1_primal_eval(const H1Index& idx, const Point3& pt) {
  return h1_primal_eval_collapsed(idx, cartesian_to_duffy(idx.element, pt));
}

/// Dual function of the bubble with the same index, unnormalized (unit
/// leading constant).  Tensor products of P^{(1,1)}_{k-2} on quad/hex; on
/// the simplices the Jacobi weight exponents grow with the accumulated
/// index so that each collapsed 1-D integral is a pure weighted
/// orthogonality relation:
///   triangle: P^{(1,1)}_{k-2}(eta) ((1-y)/2)^{k-2} P^{(2k-1,1)}_{l-1}(y),
///   tet:      P^{(1,1)}_{l-2}(eta) ((1-chi)/2)^{l-2} P^{(2l-1,1)}_{m-1}(chi)
///             ((1-z)/2)^{l+m-3} P^{(2l+2m-1,1)}_{n-1}(z).
inline double h1_dual_eval_collapsed(const H1Index& idx, const CollapsedPoint& p) {
  detail::h1_check_index(idx);
  switch (idx.element) {
    case ElementKind::quad:
      return jacobi_eval(idx.i - 2, 1.0, 1.0, p.eta) *
             jacobi_eval(idx.j - 2, 1.0, 1.0, p.z_or_y);
    case ElementKind::hex:
      return jacobi_eval(idx.i - 2, 1.0, 1.0, p.eta) *
             jacobi_eval(idx.j - 2, 1.0, 1.0, p.chi) *
             jacobi_eval(idx.k - 2, 1.0, 1.0, p.z_or_y);
    case ElementKind::triangle: {
      const double fy = (1.0 - p.z_or_y) / 2.0;
      return jacobi_eval(idx.i - 2, 1.0, 1.0, p.eta) * std::pow(fy, idx.i - 2) *
             jacobi_eval(idx.j - 1, 2.0 * idx.i - 1.0, 1.0, p.z_or_y);
    }
    case ElementKind::tetrahedron: {
      const double fc = (1.0 - p.chi) / 2.0;
      const double fz = (1.0 - p.z_or_y) / 2.0;
      return jacobi_eval(idx.i - 2, 1.0, 1.0, p.eta) * std::pow(fc, idx.i - 2) *
             jacobi_eval(idx.j - 1, 2.0 * idx.i - 1.0, 1.0, p.chi) *
             std::pow(fz, idx.i + idx.j - 3) *
             jacobi_eval(idx.k - 1, 2.0 * (idx.i + idx.j) - 1.0, 1.0, p.z_or_y);
    }
  }
  throw std::invalid_argument("unknown element kind");
}

inline double h1_dual_eval(const H1Index& idx, const Point3& pt) {
  return h1_dual_eval_collapsed(idx, cartesian_to_duffy(idx.element, pt));
}

/// Gram diagonal <u_idx, b_idx> measured by quadrature.  Some diagonals are
/// negative (the bubbles carry (x^2-1)-type factors), so normalization must
/// divide by this signed value rather than assume positivity.
inline double h1_measured_diagonal(const H1Index& idx) {
  detail::h1_check_index(idx);
  const int deg = 2 * (idx.i + idx.j + idx.k) + 4;
  const ElementQuadrature quad = element_quadrature(idx.element, deg);
  double acc = 0.0;
  for (std::size_t q = 0; q < quad.points.size(); ++q)
    acc += quad.weights[q] * h1_primal_eval(idx, quad.points[q]) *
           h1_dual_eval(idx, quad.points[q]);
  return acc;
}

/// Closed rational form of the same diagonal.  Agrees with the measured
/// value to quadrature accuracy; kept separate so callers can cross-check
/// one against the other.
inline double h1_closed_diagonal(const H1Index& idx) {
  detail::h1_check_index(idx);
  const double i = idx.i;
  const double j = idx.j;
  const double k = idx.k;
  switch (idx.element) {
    case ElementKind::quad:
      return 16.0 / ((2.0 * i - 1.0) * i * (2.0 * j - 1.0) * j);
    case ElementKind::hex:
      return -64.0 / ((2.0 * i - 1.0) * i * (2.0 * j - 1.0) * j *
                      (2.0 * k - 1.0) * k);
    case ElementKind::triangle:
      return -16.0 / ((2.0 * i - 1.0) * i * (2.0 * j + 2.0 * i - 1.0) *
                      (j + 2.0 * i - 1.0));
    case ElementKind::tetrahedron:
      return -64.0 / (i * (2.0 * i - 1.0) * (2.0 * j + 2.0 * i - 1.0) *
                      (j + 2.0 * i - 1.0) * (2.0 * k + 2.0 * i + 2.0 * j - 1.0) *
                      (k + 2.0 * i + 2.0 * j - 1.0));
  }
  throw std::invalid_argument("h1_closed_diagonal: unknown element");
}

}  // namespace dualshapes

#endif  // DUALSHAPES_H1_HPP
