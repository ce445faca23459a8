#ifndef DUALSHAPES_ORTHOPOLY_HPP
#define DUALSHAPES_ORTHOPOLY_HPP

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace dualshapes {

/// Families of univariate polynomials handled by this module.
enum class PolyFamily { jacobi, integrated_jacobi, legendre, integrated_legendre };

/// Identifies one univariate polynomial: family, degree and weight
/// exponents.  Weight exponents must stay integrable (> -1); the
/// integrated families fix beta = 0 and require degree >= 1.
struct PolynomialSpec {
  PolyFamily family = PolyFamily::legendre;
  int degree = 0;
  double alpha = 0.0;
  double beta = 0.0;
};

namespace detail {

inline void check_weights(double alpha, double beta) {
  if (!(alpha > -1.0) || !(beta > -1.0))
    throw std::invalid_argument("weight exponents must be > -1, got alpha=" +
                                std::to_string(alpha) + " beta=" + std::to_string(beta));
}

}  // namespace detail

/// Value of the Jacobi polynomial P_n^{(alpha,beta)} at x, orthogonal on
/// [-1,1] under the weight (1-x)^alpha (1+x)^beta.  Evaluated by the
/// three-term recurrence in n; stable at the endpoints.
inline double jacobi_eval(int n, double alpha, double beta, double x) {
  detail::check_weights(alpha, beta);
  if (n < 0) throw std::invalid_argument("polynomial degree must be >= 0");
  if (n == 0) return 1.0;
  const double a = alpha, b = beta;
  double pm1 = 1.0;
  double p = 0.5 * (a + b + 2.0) * x + 0.5 * (a - b);
  for (int k = 2; k <= n; ++k) {
    const double s = 2.0 * k + a + b;
    const double c0 = 2.0 * k * (k + a + b) * (s - 2.0);
    const double c1 = (s - 1.0) * (a * a - b * b);
    const double c2 = (s - 1.0) * s * (s - 2.0);
    const double c3 = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
    const double next = ((c1 + c2 * x) * p - c3 * pm1) / c0;
    pm1 = p;
    p = next;
  }
  return p;
}

/// Legendre polynomial L_n(x) = P_n^{(0,0)}(x).
inline double legendre_eval(int n, double x) { return jacobi_eval(n, 0.0, 0.0, x); }

/// Antiderivative of P_{n-1}^{(alpha,0)} vanishing at x = -1, i.e. the
/// integral from -1 to x.  Requires n >= 1 and alpha >= 0.  Computed through
/// the closed identities
///   alpha  > 0:  (1+x)/n * P_{n-1}^{(alpha-1,1)}(x),
///   alpha == 0:  (x^2-1)/(2(n-1)) * P_{n-2}^{(1,1)}(x)  (n >= 2),
/// which avoid numeric integration; the n = 1 value is 1 + x for every alpha.
inline double integrated_jacobi_integral(int n, double alpha, double x) {
  if (n < 1) throw std::invalid_argument("integrated polynomial needs degree >= 1");
  if (alpha < 0.0)
    throw std::invalid_argument("integrated family defined for alpha >= 0");
  if (n == 1) return 1.0 + x;
  if (alpha == 0.0)
    return (x * x - 1.0) / (2.0 * (n - 1)) * jacobi_eval(n - 2, 1.0, 1.0, x);
  return (1.0 + x) / n * jacobi_eval(n - 1, alpha - 1.0, 1.0, x);
}

/// Integrated Jacobi polynomial of degree n with weight exponent alpha
/// (beta fixed to 0).  Coincides with integrated_jacobi_integral for
/// n >= 2; the first member is the constant 1 by convention.
inline double integrated_jacobi_eval(int n, double alpha, double x) {
  if (n < 1) throw std::invalid_argument("integrated polynomial needs degree >= 1");
  if (n == 1) return 1.0;
  return integrated_jacobi_integral(n, alpha, x);
}

/// Squared weighted L2 norm of P_n^{(alpha,beta)} for beta in {0,1}:
///   beta = 0:  2^{alpha+1} / (2n+alpha+1),
///   beta = 1:  2^{alpha+2} / (2n+alpha+2) * (n+1)/(n+alpha+1).
inline double jacobi_norm(int n, double alpha, int beta) {
  detail::check_weights(alpha, static_cast<double>(beta));
  if (n < 0) throw std::invalid_argument("polynomial degree must be >= 0");
  if (beta == 0) return std::pow(2.0, alpha + 1.0) / (2.0 * n + alpha + 1.0);
  if (beta == 1)
    return std::pow(2.0, alpha + 2.0) / (2.0 * n + alpha + 2.0) * (n + 1.0) /
           (n + alpha + 1.0);
  throw std::invalid_argument("closed-form norm provided for beta in {0,1} only");
}

/// Integral of L_i(x) * P_k^{(1,1)}(x) over [-1,1]:
/// 4/(2+k) when k >= i and k-i is even, otherwise 0.
inline double mixed_legendre_jacobi_integral(int i, int k) {
  if (i < 0 || k < 0) throw std::invalid_argument("degrees must be >= 0");
  if (k < i || (k - i) % 2 != 0) return 0.0;
  return 4.0 / (2.0 + k);
}

/// Gauss-Legendre rule on [-1,1].  Node set is symmetric about 0; the rule
/// integrates polynomials of degree <= exactness_degree exactly.
struct QuadratureRule1D {
  std::vector<double> points;
  std::vector<double> weights;
  int exactness_degree = -1;
};

/// Gauss-Legendre rule with npts nodes, exact through degree 2*npts-1.
/// Roots by Newton iteration on L_npts with Chebyshev-based starting
/// guesses, converged to 1e-15; each half of the node set is the mirror
/// image of the other by construction.
inline QuadratureRule1D gauss_rule(int npts) {
  if (npts < 1) throw std::invalid_argument("quadrature rule needs npts >= 1");
  QuadratureRule1D rule;
  rule.points.assign(npts, 0.0);
  rule.weights.assign(npts, 0.0);
  rule.exactness_degree = 2 * npts - 1;
  const int half = (npts + 1) / 2;
  const double pi = 3.14159265358979323846;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(pi * (i + 0.75) / (npts + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      // Legendre recurrence for L_npts(x) and the previous degree.
      double p = x, pm1 = 1.0;
      for (int k = 2; k <= npts; ++k) {
        const double next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * pm1) / k;
        pm1 = p;
        p = next;
      }
      dp = npts * (x * p - pm1) / (x * x - 1.0);
      const double dx = p / dp;
      x -= dx;
      if (std::abs(dx) <= 1e-15) break;
    }
    if (2 * i + 1 == npts) x = 0.0;  // middle node of an odd rule
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.points[i] = -x;
    rule.points[npts - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[npts - 1 - i] = w;
  }
  return rule;
}

/// Evaluate the polynomial described by spec at x.
inline double eval_polynomial(const PolynomialSpec& spec, double x) {
  switch (spec.family) {
    case PolyFamily::jacobi:
      return jacobi_eval(spec.degree, spec.alpha, spec.beta, x);
    case PolyFamily::legendre:
      return legendre_eval(spec.degree, x);
    case PolyFamily::integrated_jacobi:
      return integrated_jacobi_eval(spec.degree, spec.alpha, x);
    case PolyFamily::integrated_legendre:
      return integrated_jacobi_eval(spec.degree, 0.0, x);
  }
  throw std::invalid_argument("unknown polynomial family");
}

}  // namespace dualshapes

#endif  // DUALSHAPES_ORTHOPOLY_HPP
