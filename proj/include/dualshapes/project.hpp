#ifndef DUALSHAPES_PROJECT_HPP
#define DUALSHAPES_PROJECT_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualshapes/biorth.hpp"

namespace dualshapes {

/// Black-box integrand: Cartesian point to value.  Scalar spaces read
/// component 0; components beyond the family's value dimension are
/// ignored.
using FieldFunction = std::function<VectorValue(const Point3&)>;

/// Family selector for projection: element, space, and degree.
struct FamilySpec {
  ElementKind element = ElementKind::quad;
  SpaceKind space = SpaceKind::h1;
  int p = 2;
};

/// Dual coefficients g_i of one projection, ordered like the primal
/// family (labels identify the indices), plus quadrature error norms of
/// the reconstruction: l2_error over the element, linf_error_sampled the
/// largest componentwise deviation at the quadrature points.
struct ProjectionResult {
  std::vector<std::string> labels;
  std::vector<double> coefficients;
  double l2_error = 0.0;
  double linf_error_sampled = 0.0;
};

/// Projects u onto the interior span: g_i = integral of u against the
/// normalized dual psi_i, reconstruction Pu = sum of g_i times the primal
/// functions.  One quadrature rule of degree 2p + quad_margin does the
/// moments and the error norms, so both are exact only for polynomial u.
inline ProjectionResult project(const FieldFunction& u,
                                const FamilySpec& family,
                                int quad_margin = 6) {
  if (family.p < 2)
    throw std::invalid_argument("project: p must be >= 2");
  if (quad_margin < 0)
    throw std::invalid_argument("project: negative quadrature margin");
  const ShapeFamily primal =
      primal_family(family.element, family.space, family.p);
  const ShapeFamily dual =
      dual_family(family.element, family.space, family.p, DualMode::oracle);

  const int degree = 2 * family.p + quad_margin;
  const ElementQuadrature rule = element_quadrature(family.element, degree);
  const std::size_t np = rule.points.size();
  std::vector<CollapsedPoint> cps(np);
  std::vector<VectorValue> uval(np);
  for (std::size_t q = 0; q < np; ++q) {
    cps[q] = cartesian_to_duffy(family.element, rule.points[q]);
    uval[q] = u(rule.points[q]);
  }

  const std::size_t n = primal.size();
  ProjectionResult result;
  result.labels = primal.labels;
  result.coefficients.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double acc = 0.0;
    for (std::size_t q = 0; q < np; ++q)
      acc += rule.weights[q] * dot(uval[q], dual.eval(i, cps[q]));
    result.coefficients[i] = acc;
  }

  const int dim = primal.value_dim;
  double l2sq = 0.0, linf = 0.0;
  for (std::size_t q = 0; q < np; ++q) {
    VectorValue pu;
    pu.dim = dim;
    for (std::size_t i = 0; i < n; ++i)
      pu = pu + result.coefficients[i] * primal.eval(i, cps[q]);
    double normsq = 0.0;
    for (int d = 0; d < dim; ++d) {
      const double diff = uval[q].comp[d] - pu.comp[d];
      normsq += diff * diff;
      linf = std::max(linf, std::abs(diff));
    }
    l2sq += rule.weights[q] * normsq;
  }
  result.l2_error = std::sqrt(std::max(0.0, l2sq));
  result.linf_error_sampled = linf;
  return result;
}

/// Reconstruction sum of g_i times the primal functions as a black-box
/// field, suitable for re-projection.
inline FieldFunction reconstruct(const ProjectionResult& result,
                                 const FamilySpec& family) {
  auto primal = std::make_shared<ShapeFamily>(
      primal_family(family.element, family.space, family.p));
  if (result.coefficients.size() != primal->size())
    throw std::invalid_argument(
        "reconstruct: coefficient count does not match the family");
  auto coeffs = std::make_shared<std::vector<double>>(result.coefficients);
  const ElementKind element = family.element;
  return [primal, coeffs, element](const Point3& pt) {
    const CollapsedPoint cp = cartesian_to_duffy(element, pt);
    VectorValue out;
    out.dim = primal->value_dim;
    for (std::size_t i = 0; i < coeffs->size(); ++i)
      out = out + (*coeffs)[i] * primal->eval(i, cp);
    return out;
  };
}

/// Assembles the primal/dual Gram of the family and verifies it is the
/// identity (the diagonal-system property the projection relies on).
/// Passing DualMode::paper shows what the printed coefficients give
/// instead; for H1 that is the unnormalized diagonal, which fails the
/// unit-diagonal check.
inline BiorthReport projection_matrix_diagnostic(const FamilySpec& family,
                                                 int quad_margin = 6,
                                                 double tol = 1e-10,
                                                 DualMode mode = DualMode::oracle) {
  const ShapeFamily primal =
      primal_family(family.element, family.space, family.p);
  const ShapeFamily dual =
      dual_family(family.element, family.space, family.p, mode);
  const GramMatrix g = assemble_gram(primal, dual, family.p, quad_margin);
  return verify_biorthogonality(g, tol, true);
}

/// JSON form {family, coefficients:[{index, value}], l2_error,
/// linf_error_sampled}.
inline void write_projection_json(const ProjectionResult& result,
                                  const FamilySpec& family,
                                  std::ostream& os) {
  os << "{\n";
  os << "  \"family\": {\"element\": \"" << element_name(family.element)
     << "\", \"space\": \"" << space_name(family.space)
     << "\", \"p\": " << family.p << "},\n";
  os << "  \"coefficients\": [\n";
  for (std::size_t i = 0; i < result.coefficients.size(); ++i) {
    os << "    {\"index\": \"" << result.labels[i] << "\", \"value\": "
       << format_real(result.coefficients[i]) << "}";
    os << (i + 1 < result.coefficients.size() ? ",\n" : "\n");
  }
  os << "  ],\n";
  os << "  \"l2_error\": " << format_real(result.l2_error) << ",\n";
  os << "  \"linf_error_sampled\": " << format_real(result.linf_error_sampled)
     << "\n";
  os << "}\n";
}

}  // namespace dualshapes

#endif  // DUALSHAPES_PROJECT_HPP
