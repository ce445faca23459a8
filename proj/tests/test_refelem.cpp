#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <utility>
#include <vector>

#include "dualshapes/refelem.hpp"
#include "oracle_helpers.hpp"

using Catch::Approx;
using namespace dualshapes;

namespace {

/// Per-point monomial power tables, so the exactness sweep is a pure
/// multiply-accumulate.
struct MonomialTable {
  explicit MonomialTable(ElementQuadrature q, int maxdeg) : quad(std::move(q)) {
    const std::size_t n = quad.points.size();
    stride = maxdeg + 1;
    px.resize(n * stride);
    py.resize(n * stride);
    pz.resize(n * stride);
    for (std::size_t i = 0; i < n; ++i)
      for (int d = 0; d <= maxdeg; ++d) {
        px[i * stride + d] = std::pow(quad.points[i][0], d);
        py[i * stride + d] = std::pow(quad.points[i][1], d);
        pz[i * stride + d] = std::pow(quad.points[i][2], d);
      }
  }

  /// Returns {integral, sum of |weight * integrand|}.
  std::pair<double, double> integrate(int a, int b, int c) const {
    double acc = 0.0, mag = 0.0;
    for (std::size_t i = 0; i < quad.points.size(); ++i) {
      const double term = quad.weights[i] * px[i * stride + a] *
                          py[i * stride + b] * pz[i * stride + c];
      acc += term;
      mag += std::abs(term);
    }
    return {acc, mag};
  }

  ElementQuadrature quad;
  std::size_t stride = 0;
  std::vector<double> px, py, pz;
};

void check_monomial(const MonomialTable& table, int a, int b, int c, double exact) {
  const auto [num, mag] = table.integrate(a, b, c);
  const double tol = std::max(1e-12 * std::abs(exact), 1e-13 * std::max(mag, 1.0));
  INFO("monomial x^" << a << " y^" << b << " z^" << c << " exact=" << exact
                     << " num=" << num);
  CHECK(std::abs(num - exact) <= tol);
}

}  // namespace

TEST_CASE("vertex conventions") {
  const auto tri = reference_element(ElementKind::triangle);
  REQUIRE(tri.vertices.size() == 3);
  CHECK(tri.vertices[0] == Point3{-1, -1, 0});
  CHECK(tri.vertices[1] == Point3{1, -1, 0});
  CHECK(tri.vertices[2] == Point3{0, 1, 0});
  const auto tet = reference_element(ElementKind::tetrahedron);
  REQUIRE(tet.vertices.size() == 4);
  CHECK(tet.vertices[0] == Point3{-1, -1, -1});
  CHECK(tet.vertices[1] == Point3{1, -1, -1});
  CHECK(tet.vertices[2] == Point3{0, 1, -1});
  CHECK(tet.vertices[3] == Point3{0, 0, 1});
  CHECK(reference_element(ElementKind::quad).vertices.size() == 4);
  CHECK(reference_element(ElementKind::hex).vertices.size() == 8);
  CHECK(element_dim(ElementKind::quad) == 2);
  CHECK(element_dim(ElementKind::triangle) == 2);
  CHECK(element_dim(ElementKind::hex) == 3);
  CHECK(element_dim(ElementKind::tetrahedron) == 3);
  CHECK(element_measure(ElementKind::quad) == Approx(4.0));
  CHECK(element_measure(ElementKind::hex) == Approx(8.0));
  CHECK(element_measure(ElementKind::triangle) == Approx(2.0));
  CHECK(element_measure(ElementKind::tetrahedron) == Approx(4.0 / 3.0));
}

TEST_CASE("duffy map frozen values") {
  CollapsedPoint p;
  p.eta = 0.0;
  p.z_or_y = -1.0;
  CHECK(duffy_to_cartesian(ElementKind::triangle, p) == Point3{0, -1, 0});
  p.eta = 1.0;
  CHECK(duffy_to_cartesian(ElementKind::triangle, p) == Point3{1, -1, 0});
  p.eta = 0.0;
  p.chi = 0.0;
  p.z_or_y = 1.0;
  CHECK(duffy_to_cartesian(ElementKind::tetrahedron, p) == Point3{0, 0, 1});

  p = CollapsedPoint{};
  p.z_or_y = -1.0;
  CHECK(duffy_volume_factor(ElementKind::triangle, p) == Approx(1.0));
  p.chi = -1.0;
  CHECK(duffy_volume_factor(ElementKind::tetrahedron, p) == Approx(1.0));
}

TEST_CASE("collapse-line convention maps singular ratios to zero") {
  auto c = cartesian_to_duffy(ElementKind::triangle, {0.3, 1.0, 0.0});
  CHECK(c.eta == 0.0);
  CHECK(c.z_or_y == 1.0);
  c = cartesian_to_duffy(ElementKind::tetrahedron, {0.0, 0.0, 1.0});
  CHECK(c.eta == 0.0);
  CHECK(c.chi == 0.0);
  // The eta collapse line 2y + z = 1 away from the apex.
  c = cartesian_to_duffy(ElementKind::tetrahedron, {0.0, 0.25, 0.5});
  CHECK(c.eta == 0.0);
  CHECK(c.chi == Approx(1.0));
}

TEST_CASE("round trip cartesian -> collapsed -> cartesian") {
  oracle::Uniform rng(20240817);
  for (ElementKind kind : {ElementKind::quad, ElementKind::hex,
                           ElementKind::triangle, ElementKind::tetrahedron}) {
    for (int trial = 0; trial < 1000; ++trial) {
      // Sample interior points through the collapsed square/cube.
      CollapsedPoint sample;
      sample.eta = rng(-0.999, 0.999);
      if (element_dim(kind) == 3) sample.chi = rng(-0.999, 0.999);
      sample.z_or_y = rng(-0.999, 0.999);
      const Point3 pt = duffy_to_cartesian(kind, sample);
      const Point3 back = duffy_to_cartesian(kind, cartesian_to_duffy(kind, pt));
      for (int d = 0; d < 3; ++d) {
        INFO("kind=" << static_cast<int>(kind) << " trial=" << trial << " d=" << d);
        CHECK(std::abs(back[d] - pt[d]) <= 1e-13);
      }
    }
  }
}

TEST_CASE("volume factor positive on the open element") {
  oracle::Uniform rng(77);
  for (ElementKind kind : {ElementKind::triangle, ElementKind::tetrahedron}) {
    for (int trial = 0; trial < 200; ++trial) {
      CollapsedPoint p;
      p.eta = rng(-0.999, 0.999);
      p.chi = rng(-0.999, 0.999);
      p.z_or_y = rng(-0.999, 0.999);
      CHECK(duffy_volume_factor(kind, p) > 0.0);
    }
  }
}

TEST_CASE("quadrature frozen values") {
  {
    const auto q = element_quadrature(ElementKind::triangle, 0);
    double acc = 0.0;
    for (double w : q.weights) acc += w;
    CHECK(acc == Approx(2.0));
  }
  {
    const auto q = element_quadrature(ElementKind::tetrahedron, 0);
    double acc = 0.0;
    for (double w : q.weights) acc += w;
    CHECK(acc == Approx(4.0 / 3.0));
  }
  {
    const auto q = element_quadrature(ElementKind::triangle, 4);
    double acc = 0.0;
    for (std::size_t i = 0; i < q.points.size(); ++i)
      acc += q.weights[i] * q.points[i][0] * q.points[i][0] * q.points[i][1] *
             q.points[i][1];
    CHECK(acc == Approx(oracle::mono_tri(2, 2)));
  }
}

TEST_CASE("weights sum to the element measure") {
  for (ElementKind kind : {ElementKind::quad, ElementKind::hex,
                           ElementKind::triangle, ElementKind::tetrahedron})
    for (int deg : {0, 3, 10, 24}) {
      const auto q = element_quadrature(kind, deg);
      // Kahan summation: the invariant is about the weights themselves, not
      // about naive-accumulation roundoff over thousands of terms.
      double acc = 0.0, comp = 0.0;
      for (double w : q.weights) {
        const double t = w - comp;
        const double s = acc + t;
        comp = (s - acc) - t;
        acc = s;
      }
      INFO("kind=" << static_cast<int>(kind) << " deg=" << deg);
      CHECK(std::abs(acc - element_measure(kind)) <= 1e-13);
      for (double w : q.weights) REQUIRE(w > 0.0);
    }
}

TEST_CASE("quadrature exact for monomials, tensor degree on quad") {
  for (int deg : {0, 1, 2, 3, 5, 8, 13, 24}) {
    const MonomialTable table(element_quadrature(ElementKind::quad, deg), deg);
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; b <= deg; ++b)
        check_monomial(table, a, b, 0, oracle::mono_quad(a, b));
  }
}

TEST_CASE("quadrature exact for monomials, tensor degree on hex") {
  for (int deg : {0, 1, 2, 3, 5, 8, 24}) {
    const MonomialTable table(element_quadrature(ElementKind::hex, deg), deg);
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; b <= deg; ++b)
        for (int c = 0; c <= deg; ++c)
          check_monomial(table, a, b, c, oracle::mono_hex(a, b, c));
  }
}

TEST_CASE("quadrature exact for monomials, total degree on triangle") {
  for (int deg : {0, 1, 2, 3, 5, 8, 13, 24}) {
    const MonomialTable table(element_quadrature(ElementKind::triangle, deg), deg);
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b)
        check_monomial(table, a, b, 0, oracle::mono_tri(a, b));
  }
}

TEST_CASE("quadrature exact for monomials, total degree on tetrahedron") {
  for (int deg : {0, 1, 2, 3, 5, 8, 24}) {
    const MonomialTable table(element_quadrature(ElementKind::tetrahedron, deg), deg);
    for (int a = 0; a <= deg; ++a)
      for (int b = 0; a + b <= deg; ++b)
        for (int c = 0; a + b + c <= deg; ++c)
          check_monomial(table, a, b, c, oracle::mono_tet(a, b, c));
  }
}

TEST_CASE("quadrature points are interior") {
  for (ElementKind kind : {ElementKind::quad, ElementKind::hex,
                           ElementKind::triangle, ElementKind::tetrahedron}) {
    const auto q = element_quadrature(kind, 6);
    for (const Point3& pt : q.points) {
      const auto c = cartesian_to_duffy(kind, pt);
      CHECK(std::abs(c.eta) < 1.0);
      CHECK(std::abs(c.z_or_y) < 1.0);
      if (element_dim(kind) == 3) CHECK(std::abs(c.chi) < 1.0);
    }
  }
}
