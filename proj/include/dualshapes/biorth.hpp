#ifndef DUALSHAPES_BIORTH_HPP
#define DUALSHAPES_BIORTH_HPP

#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dualshapes/h1.hpp"
#include "dualshapes/hcurl.hpp"
#include "dualshapes/refelem.hpp"

namespace dualshapes {

/// Short element names used in index labels and serialized reports.
inline const char* element_name(ElementKind kind) {
  switch (kind) {
    case ElementKind::quad: return "quad";
    case ElementKind::hex: return "hex";
    case ElementKind::triangle: return "tri";
    case ElementKind::tetrahedron: return "tet";
  }
  throw std::invalid_argument("unknown element kind");
}

/// Function space selector shared by the family factories and the CLI.
enum class SpaceKind { h1, hcurl };

inline const char* space_name(SpaceKind space) {
  return space == SpaceKind::h1 ? "h1" : "hcurl";
}

/// Decimal formatting used by every writer: 17 significant digits
/// round-trip any finite double exactly.
inline std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return std::string(buf);
}

// ---------------------------------------------------------------------------
// Shape-function families.

/// One side of a Gram pairing: an ordered family of shape functions on a
/// single element with a positional evaluator in collapsed coordinates.
/// Scalar families use value_dim 1 and component 0 of the returned value.
/// The evaluator receives the family position, not the index, so factories
/// can precompute per-function data (normalization, dual combinations).
struct ShapeFamily {
  ElementKind element = ElementKind::quad;
  std::string space;
  int value_dim = 1;
  std::vector<std::string> labels;
  std::function<VectorValue(std::size_t, const CollapsedPoint&)> eval;
  std::size_t size() const { return labels.size(); }
};

namespace detail {

inline std::string h1_label(const H1Index& idx) {
  return std::string(element_name(idx.element)) + "/h1/" + h1_index_str(idx);
}

inline std::string curl_label(const CurlIndex& idx, int p) {
  return std::string(element_name(idx.element)) + "/" + curl_tag_name(idx.tag) +
         "/" + curl_index_label(idx, p);
}

}  // namespace detail

inline ShapeFamily h1_primal_family(ElementKind element, int p) {
  auto indices = std::make_shared<std::vector<H1Index>>(h1_indices(element, p));
  ShapeFamily fam;
  fam.element = element;
  fam.space = "h1";
  fam.value_dim = 1;
  for (const H1Index& idx : *indices)
    fam.labels.push_back(detail::h1_label(idx));
  fam.eval = [indices](std::size_t pos, const CollapsedPoint& pt) {
    VectorValue v;
    v.dim = 1;
    v.comp[0] = h1_primal_eval_collapsed((*indices)[pos], pt);
    return v;
  };
  return fam;
}

/// H1 dual family.  Normalized duals divide by the measured Gram diagonal
/// (signed: several diagonals are negative), computed once per function at
/// construction, so the primal/dual Gram becomes the identity.
inline ShapeFamily h1_dual_family(ElementKind element, int p, bool normalized) {
  auto indices = std::make_shared<std::vector<H1Index>>(h1_indices(element, p));
  auto scale = std::make_shared<std::vector<double>>(indices->size(), 1.0);
  if (normalized)
    for (std::size_t pos = 0; pos < indices->size(); ++pos)
      (*scale)[pos] = 1.0 / h1_measured_diagonal((*indices)[pos]);
  ShapeFamily fam;
  fam.element = element;
  fam.space = "h1";
  fam.value_dim = 1;
  for (const H1Index& idx : *indices)
    fam.labels.push_back(detail::h1_label(idx));
  fam.eval = [indices, scale](std::size_t pos, const CollapsedPoint& pt) {
    VectorValue v;
    v.dim = 1;
    v.comp[0] = (*scale)[pos] * h1_dual_eval_collapsed((*indices)[pos], pt);
    return v;
  };
  return fam;
}

inline ShapeFamily hcurl_primal_family(ElementKind element, int p) {
  auto indices =
      std::make_shared<std::vector<CurlIndex>>(hcurl_primal_indices(element, p));
  ShapeFamily fam;
  fam.element = element;
  fam.space = "hcurl";
  fam.value_dim = element_dim(element);
  for (const CurlIndex& idx : *indices)
    fam.labels.push_back(detail::curl_label(idx, p));
  fam.eval = [indices](std::size_t pos, const CollapsedPoint& pt) {
    return hcurl_primal_eval_collapsed((*indices)[pos], pt);
  };
  return fam;
}

inline ShapeFamily hcurl_aux_family(ElementKind element, int p) {
  auto indices =
      std::make_shared<std::vector<CurlIndex>>(hcurl_aux_indices(element, p));
  ShapeFamily fam;
  fam.element = element;
  fam.space = "hcurl";
  fam.value_dim = element_dim(element);
  for (const CurlIndex& idx : *indices)
    fam.labels.push_back(detail::curl_label(idx, p));
  fam.eval = [indices](std::size_t pos, const CollapsedPoint& pt) {
    return hcurl_aux_eval_collapsed((*indices)[pos], pt);
  };
  return fam;
}

/// Raw aux-dual family B, C(, D).  With extended = false the columns align
/// positionally with hcurl_aux_family.  With extended = true the B block
/// gains the first-index-1 members that pair with the type III (triangle)
/// and type IV (tet) fields, which makes the family positionally square
/// against hcurl_primal_family; on the quad those members are already part
/// of the aligned ranges and the flag changes nothing.
inline ShapeFamily hcurl_dual_aux_family(ElementKind element, int p,
                                         bool extended = false) {
  auto indices = std::make_shared<std::vector<CurlIndex>>();
  if (extended) {
    if (element == ElementKind::triangle)
      for (int l = 1; 1 + l <= p; ++l)
        indices->push_back({element, CurlTag::B, 1, l, 0});
    if (element == ElementKind::tetrahedron)
      for (int m = 1; 1 + m < p; ++m)
        for (int n = 1; 1 + m + n <= p; ++n)
          indices->push_back({element, CurlTag::B, 1, m, n});
  }
  const std::vector<CurlIndex> aligned = hcurl_dual_aux_indices(element, p);
  indices->insert(indices->end(), aligned.begin(), aligned.end());
  ShapeFamily fam;
  fam.element = element;
  fam.space = "hcurl";
  fam.value_dim = element_dim(element);
  for (const CurlIndex& idx : *indices)
    fam.labels.push_back(detail::curl_label(idx, p));
  fam.eval = [indices](std::size_t pos, const CollapsedPoint& pt) {
    return hcurl_dual_aux_eval_collapsed((*indices)[pos], pt);
  };
  return fam;
}

/// Recombined dual family, positionally aligned with hcurl_primal_family.
/// The per-function combination coefficients are computed once here; in
/// oracle mode that is where the measured-diagonal quadrature happens, so
/// evaluation stays cheap afterwards.
inline ShapeFamily hcurl_dual_family(ElementKind element, int p, DualMode mode) {
  const std::vector<CurlIndex> indices = hcurl_primal_indices(element, p);
  auto terms = std::make_shared<std::vector<std::vector<DualTerm>>>();
  terms->reserve(indices.size());
  for (const CurlIndex& idx : indices)
    terms->push_back(hcurl_dual_terms(idx, mode));
  ShapeFamily fam;
  fam.element = element;
  fam.space = "hcurl";
  fam.value_dim = element_dim(element);
  for (const CurlIndex& idx : indices)
    fam.labels.push_back(detail::curl_label(idx, p));
  const int dim = element_dim(element);
  fam.eval = [terms, dim](std::size_t pos, const CollapsedPoint& pt) {
    VectorValue out;
    out.dim = dim;
    for (const DualTerm& term : (*terms)[pos])
      out = out + hcurl_dual_term_eval(term, pt);
    return out;
  };
  return fam;
}

inline ShapeFamily primal_family(ElementKind element, SpaceKind space, int p) {
  return space == SpaceKind::h1 ? h1_primal_family(element, p)
                                : hcurl_primal_family(element, p);
}

/// Dual family for either space; `paper` keeps the printed coefficients
/// (H1: unnormalized tensor duals), `oracle` normalizes against measured
/// diagonals so the combined Gram is the identity.
inline ShapeFamily dual_family(ElementKind element, SpaceKind space, int p,
                               DualMode mode) {
  return space == SpaceKind::h1
             ? h1_dual_family(element, p, mode == DualMode::oracle)
             : hcurl_dual_family(element, p, mode);
}

// ---------------------------------------------------------------------------
// Gram assembly.

/// Dense matrix of pairings <primal_r, dual_c> with the index labels of
/// both sides; values are row-major.
struct GramMatrix {
  std::vector<std::string> row_labels;
  std::vector<std::string> col_labels;
  std::vector<double> values;
  int quadrature_degree = 0;
  std::size_t rows() const { return row_labels.size(); }
  std::size_t cols() const { return col_labels.size(); }
  double operator()(std::size_t r, std::size_t c) const {
    return values[r * cols() + c];
  }
};

/// Integrates every pairing <primal_r, dual_c> with one quadrature rule of
/// degree 2p + quad_margin.  Each entry accumulates in ascending
/// quadrature-point order, so the result is bit-reproducible and
/// independent of the order entries are computed in.
inline GramMatrix assemble_gram(const ShapeFamily& primal,
                                const ShapeFamily& dual, int p,
                                int quad_margin) {
  if (primal.element != dual.element)
    throw std::invalid_argument(
        "assemble_gram: families live on different elements");
  if (primal.value_dim != dual.value_dim)
    throw std::invalid_argument(
        "assemble_gram: value dimensions differ (" +
        std::to_string(primal.value_dim) + " vs " +
        std::to_string(dual.value_dim) + ")");
  if (p < 0 || quad_margin < 0)
    throw std::invalid_argument("assemble_gram: negative degree or margin");
  const int degree = 2 * p + quad_margin;
  const ElementQuadrature rule = element_quadrature(primal.element, degree);
  const std::size_t np = rule.points.size();
  std::vector<CollapsedPoint> cps(np);
  for (std::size_t q = 0; q < np; ++q)
    cps[q] = cartesian_to_duffy(primal.element, rule.points[q]);

  const std::size_t nr = primal.size(), nc = dual.size();
  std::vector<double> ptab(nr * np * 3), dtab(nc * np * 3);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t q = 0; q < np; ++q) {
      const VectorValue v = primal.eval(r, cps[q]);
      for (int d = 0; d < 3; ++d) ptab[(r * np + q) * 3 + d] = v.comp[d];
    }
  for (std::size_t c = 0; c < nc; ++c)
    for (std::size_t q = 0; q < np; ++q) {
      const VectorValue v = dual.eval(c, cps[q]);
      for (int d = 0; d < 3; ++d) dtab[(c * np + q) * 3 + d] = v.comp[d];
    }

  GramMatrix g;
  g.row_labels = primal.labels;
  g.col_labels = dual.labels;
  g.quadrature_degree = degree;
  g.values.assign(nr * nc, 0.0);
  for (std::size_t r = 0; r < nr; ++r)
    for (std::size_t c = 0; c < nc; ++c) {
      const double* pv = &ptab[r * np * 3];
      const double* dv = &dtab[c * np * 3];
      double acc = 0.0;
      for (std::size_t q = 0; q < np; ++q)
        acc += rule.weights[q] * (pv[q * 3] * dv[q * 3] +
                                  pv[q * 3 + 1] * dv[q * 3 + 1] +
                                  pv[q * 3 + 2] * dv[q * 3 + 2]);
      g.values[r * nc + c] = acc;
    }
  for (double v : g.values)
    if (!std::isfinite(v))
      throw std::runtime_error("assemble_gram: non-finite Gram entry");
  return g;
}

// ---------------------------------------------------------------------------
// Recombination solver.

/// Mixing data of one recombination block: primal types = A * aux
/// functions, D = measured aux Gram diagonals, and the solved dual mixing
/// B with A * diag(D) * B^T = I (so recombined duals = B * aux duals).
struct RecombinationSpec {
  std::size_t size = 0;
  std::vector<double> A;  // row-major size x size
  std::vector<double> D;  // diagonal entries
  std::vector<double> B;  // row-major, solved
  double residual = 0.0;  // max-norm of A * diag(D) * B^T - I
};

/// Solves B = (A * diag(D))^{-T} by Gauss-Jordan elimination with partial
/// pivoting.  `context` names the family block in error messages.
inline RecombinationSpec solve_recombination(const std::vector<double>& A,
                                             const std::vector<double>& D,
                                             const std::string& context = "") {
  const std::size_t k = D.size();
  const std::string where = context.empty() ? "" : " (" + context + ")";
  if (A.size() != k * k)
    throw std::invalid_argument("solve_recombination: A is not " +
                                std::to_string(k) + "x" + std::to_string(k) +
                                where);
  for (std::size_t i = 0; i < k; ++i)
    if (D[i] == 0.0)
      throw std::invalid_argument(
          "solve_recombination: zero Gram diagonal at position " +
          std::to_string(i) + where);

  RecombinationSpec spec;
  spec.size = k;
  spec.A = A;
  spec.D = D;

  // m = A * diag(D); inv accumulates m^{-1} from the identity.
  std::vector<double> m(k * k), inv(k * k, 0.0);
  double scale = 0.0;
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) {
      m[r * k + c] = A[r * k + c] * D[c];
      scale = std::max(scale, std::abs(m[r * k + c]));
    }
  for (std::size_t i = 0; i < k; ++i) inv[i * k + i] = 1.0;
  for (std::size_t col = 0; col < k; ++col) {
    std::size_t piv = col;
    for (std::size_t r = col + 1; r < k; ++r)
      if (std::abs(m[r * k + col]) > std::abs(m[piv * k + col])) piv = r;
    if (std::abs(m[piv * k + col]) <= 1e-13 * scale)
      throw std::invalid_argument(
          "solve_recombination: singular mixing matrix" + where);
    if (piv != col)
      for (std::size_t c = 0; c < k; ++c) {
        std::swap(m[piv * k + c], m[col * k + c]);
        std::swap(inv[piv * k + c], inv[col * k + c]);
      }
    const double d = m[col * k + col];
    for (std::size_t c = 0; c < k; ++c) {
      m[col * k + c] /= d;
      inv[col * k + c] /= d;
    }
    for (std::size_t r = 0; r < k; ++r) {
      if (r == col) continue;
      const double f = m[r * k + col];
      if (f == 0.0) continue;
      for (std::size_t c = 0; c < k; ++c) {
        m[r * k + c] -= f * m[col * k + c];
        inv[r * k + c] -= f * inv[col * k + c];
      }
    }
  }

  spec.B.resize(k * k);
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) spec.B[r * k + c] = inv[c * k + r];

  spec.residual = 0.0;
  for (std::size_t r = 0; r < k; ++r)
    for (std::size_t c = 0; c < k; ++c) {
      double acc = 0.0;
      for (std::size_t t = 0; t < k; ++t)
        acc += spec.A[r * k + t] * spec.D[t] * spec.B[c * k + t];
      spec.residual =
          std::max(spec.residual, std::abs(acc - (r == c ? 1.0 : 0.0)));
    }
  if (spec.residual > 1e-13)
    throw std::runtime_error(
        "solve_recombination: residual " + format_real(spec.residual) +
        " exceeds 1e-13" + where);
  return spec;
}

// ---------------------------------------------------------------------------
// Verification and sparsity.

/// Boolean sparsity mask; a cell is set where the entry survives the
/// relative threshold tol * max|entry|.
struct PatternMatrix {
  std::size_t rows = 0, cols = 0;
  std::vector<unsigned char> cells;  // row-major 0/1
  bool operator()(std::size_t r, std::size_t c) const {
    return cells[r * cols + c] != 0;
  }
};

inline PatternMatrix sparsity_pattern(const GramMatrix& gram, double tol) {
  double scale = 0.0;
  for (double v : gram.values) scale = std::max(scale, std::abs(v));
  PatternMatrix pat;
  pat.rows = gram.rows();
  pat.cols = gram.cols();
  pat.cells.resize(pat.rows * pat.cols);
  for (std::size_t i = 0; i < gram.values.size(); ++i)
    pat.cells[i] = std::abs(gram.values[i]) > tol * scale ? 1 : 0;
  return pat;
}

/// Pass/fail summary of a square Gram matrix.  max_offdiag_rel is the
/// largest off-diagonal magnitude relative to the largest diagonal
/// magnitude; pattern is the sparsity mask at the same tolerance.
struct BiorthReport {
  double max_offdiag_rel = 0.0;
  std::vector<double> diag_values;
  PatternMatrix pattern;
  bool pass = false;
};

/// Checks that a square Gram matrix is diagonal at the given relative
/// tolerance with no vanishing diagonal entry.  With require_unit_diagonal
/// the diagonal must additionally equal 1 within tol (the combined
/// primal/dual system claim).
inline BiorthReport verify_biorthogonality(const GramMatrix& gram, double tol,
                                           bool require_unit_diagonal = false) {
  if (gram.rows() != gram.cols())
    throw std::invalid_argument("verify_biorthogonality: gram is not square");
  if (tol <= 0.0)
    throw std::invalid_argument("verify_biorthogonality: tol must be > 0");
  const std::size_t n = gram.rows();
  BiorthReport rep;
  rep.diag_values.resize(n);
  double scale = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    rep.diag_values[i] = gram(i, i);
    scale = std::max(scale, std::abs(rep.diag_values[i]));
  }
  const double denom = scale > 0.0 ? scale : 1.0;
  double maxoff = 0.0;
  for (std::size_t r = 0; r < n; ++r)
    for (std::size_t c = 0; c < n; ++c)
      if (r != c) maxoff = std::max(maxoff, std::abs(gram(r, c)));
  rep.max_offdiag_rel = maxoff / denom;
  bool diag_ok = true;
  for (double d : rep.diag_values) {
    if (require_unit_diagonal)
      diag_ok = diag_ok && std::abs(d - 1.0) <= tol;
    else
      diag_ok = diag_ok && std::abs(d) > tol * denom;
  }
  rep.pattern = sparsity_pattern(gram, tol);
  rep.pass = rep.max_offdiag_rel <= tol && diag_ok;
  return rep;
}

// ---------------------------------------------------------------------------
// Writers.

/// CSV with quoted label headers (index labels contain commas).
inline void write_gram_csv(const GramMatrix& gram, std::ostream& os) {
  os << "\"\"";
  for (const std::string& label : gram.col_labels) os << ",\"" << label << '"';
  os << '\n';
  for (std::size_t r = 0; r < gram.rows(); ++r) {
    os << '"' << gram.row_labels[r] << '"';
    for (std::size_t c = 0; c < gram.cols(); ++c)
      os << ',' << format_real(gram(r, c));
    os << '\n';
  }
}

inline void write_pattern_csv(const PatternMatrix& pat, std::ostream& os) {
  for (std::size_t r = 0; r < pat.rows; ++r) {
    for (std::size_t c = 0; c < pat.cols; ++c) {
      if (c) os << ',';
      os << (pat(r, c) ? '1' : '0');
    }
    os << '\n';
  }
}

/// Plain PBM (P1) bitmap, 1 = marked entry; bit rows are split at 70
/// characters as the format requires.
inline void write_pattern_pbm(const PatternMatrix& pat, std::ostream& os) {
  os << "P1\n" << pat.cols << ' ' << pat.rows << '\n';
  for (std::size_t r = 0; r < pat.rows; ++r) {
    int line = 0;
    for (std::size_t c = 0; c < pat.cols; ++c) {
      if (line == 70) {
        os << '\n';
        line = 0;
      }
      os << (pat(r, c) ? '1' : '0');
      ++line;
    }
    os << '\n';
  }
}

/// JSON verification report {element, space, p, diag, max_offdiag_rel,
/// pass}.
inline void write_report_json(const BiorthReport& report, ElementKind element,
                              SpaceKind space, int p, std::ostream& os) {
  os << "{\n";
  os << "  \"element\": \"" << element_name(element) << "\",\n";
  os << "  \"space\": \"" << space_name(space) << "\",\n";
  os << "  \"p\": " << p << ",\n";
  os << "  \"diag\": [";
  for (std::size_t i = 0; i < report.diag_values.size(); ++i) {
    if (i) os << ", ";
    os << format_real(report.diag_values[i]);
  }
  os << "],\n";
  os << "  \"max_offdiag_rel\": " << format_real(report.max_offdiag_rel)
     << ",\n";
  os << "  \"pass\": " << (report.pass ? "true" : "false") << "\n";
  os << "}\n";
}

}  // namespace dualshapes

#endif  // DUALSHAPES_BIORTH_HPP
