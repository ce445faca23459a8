#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "dualshapes/biorth.hpp"
#include "json.hpp"
#include "oracle_helpers.hpp"

using Catch::Approx;
using Catch::Matchers::ContainsSubstring;
using namespace dualshapes;

namespace {

std::size_t pos_of(const std::vector<std::string>& labels,
                   const std::string& label) {
  const auto it = std::find(labels.begin(), labels.end(), label);
  REQUIRE(it != labels.end());
  return static_cast<std::size_t>(it - labels.begin());
}

double max_identity_deviation(const GramMatrix& g) {
  REQUIRE(g.rows() == g.cols());
  double dev = 0.0;
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (std::size_t c = 0; c < g.cols(); ++c)
      dev = std::max(dev, std::abs(g(r, c) - (r == c ? 1.0 : 0.0)));
  return dev;
}

GramMatrix hand_gram(std::vector<std::string> rows,
                     std::vector<std::string> cols,
                     std::vector<double> values) {
  GramMatrix g;
  g.row_labels = std::move(rows);
  g.col_labels = std::move(cols);
  g.values = std::move(values);
  return g;
}

}  // namespace

TEST_CASE("family descriptors carry labels, sizes, and value dimensions") {
  CHECK(std::string(element_name(ElementKind::quad)) == "quad");
  CHECK(std::string(element_name(ElementKind::hex)) == "hex");
  CHECK(std::string(element_name(ElementKind::triangle)) == "tri");
  CHECK(std::string(element_name(ElementKind::tetrahedron)) == "tet");
  CHECK(std::string(space_name(SpaceKind::h1)) == "h1");
  CHECK(std::string(space_name(SpaceKind::hcurl)) == "hcurl");

  const ShapeFamily qh1 = h1_primal_family(ElementKind::quad, 4);
  CHECK(qh1.size() == 9);
  CHECK(qh1.value_dim == 1);
  CHECK(qh1.space == "h1");
  CHECK(qh1.labels.front() == "quad/h1/2,2");
  CHECK(qh1.labels.back() == "quad/h1/4,4");

  const ShapeFamily th1 = h1_primal_family(ElementKind::tetrahedron, 4);
  CHECK(th1.size() == 1);
  CHECK(th1.labels.front() == "tet/h1/2,1,1");

  const ShapeFamily tp = hcurl_primal_family(ElementKind::triangle, 6);
  CHECK(tp.size() == 25);
  CHECK(tp.value_dim == 2);
  CHECK(tp.space == "hcurl");
  CHECK(tp.labels.front() == "tri/I/2,1");
  CHECK(tp.labels[20] == "tri/III/1,1");

  const ShapeFamily qp = hcurl_primal_family(ElementKind::quad, 4);
  CHECK(qp.size() == 24);
  CHECK(qp.labels[18] == "quad/III/2");
  CHECK(qp.labels[21] == "quad/III/6");

  const ShapeFamily ta = hcurl_aux_family(ElementKind::triangle, 6);
  CHECK(ta.size() == 20);
  CHECK(ta.labels.front() == "tri/auxI/2,1");

  const ShapeFamily td = hcurl_dual_aux_family(ElementKind::triangle, 6);
  CHECK(td.size() == 20);
  CHECK(td.labels.front() == "tri/B/2,1");
  const ShapeFamily tde = hcurl_dual_aux_family(ElementKind::triangle, 6, true);
  CHECK(tde.size() == 25);
  CHECK(tde.labels.front() == "tri/B/1,1");
  CHECK(tde.labels[5] == "tri/B/2,1");

  // On the quad the aligned ranges already cover the type-III partners.
  CHECK(hcurl_dual_aux_family(ElementKind::quad, 5, true).labels ==
        hcurl_dual_aux_family(ElementKind::quad, 5).labels);

  const ShapeFamily tetp = hcurl_primal_family(ElementKind::tetrahedron, 5);
  const ShapeFamily tete =
      hcurl_dual_aux_family(ElementKind::tetrahedron, 5, true);
  CHECK(tetp.size() == 18);
  CHECK(tete.size() == 18);
  CHECK(tetp.value_dim == 3);
  CHECK(hcurl_dual_aux_family(ElementKind::tetrahedron, 5).size() == 12);
  CHECK(tete.labels.front() == "tet/B/1,1,1");

  CHECK_THROWS_AS(hcurl_primal_family(ElementKind::hex, 4),
                  std::invalid_argument);
  CHECK_THROWS_AS(hcurl_dual_family(ElementKind::hex, 4, DualMode::oracle),
                  std::invalid_argument);

  CHECK(primal_family(ElementKind::quad, SpaceKind::h1, 4).labels ==
        qh1.labels);
  CHECK(primal_family(ElementKind::triangle, SpaceKind::hcurl, 6).labels ==
        tp.labels);
  CHECK(dual_family(ElementKind::triangle, SpaceKind::hcurl, 6,
                    DualMode::oracle)
            .labels == tp.labels);
  CHECK(dual_family(ElementKind::quad, SpaceKind::h1, 4, DualMode::paper)
            .labels == qh1.labels);
}

TEST_CASE("solve_recombination solves the mixing relation") {
  SECTION("identity in, identity out") {
    const RecombinationSpec spec =
        solve_recombination({1, 0, 0, 1}, {1, 1});
    CHECK(spec.size == 2);
    CHECK(spec.B == std::vector<double>{1, 0, 0, 1});
    CHECK(spec.residual == 0.0);
  }

  SECTION("two-type mixing has the closed-form solution") {
    const double d1 = -0.4, d2 = 0.25;
    const RecombinationSpec spec =
        solve_recombination({1, 1, 1, -1}, {d1, d2});
    CHECK(spec.B[0] == Approx(1.0 / (2.0 * d1)).epsilon(1e-15));
    CHECK(spec.B[1] == Approx(1.0 / (2.0 * d2)).epsilon(1e-15));
    CHECK(spec.B[2] == Approx(1.0 / (2.0 * d1)).epsilon(1e-15));
    CHECK(spec.B[3] == Approx(-1.0 / (2.0 * d2)).epsilon(1e-15));
  }

  SECTION("three-type mixing inverts the tet block") {
    const RecombinationSpec spec =
        solve_recombination({1, 1, 1, 1, -1, 1, 1, 1, -1}, {1, 1, 1});
    const std::vector<double> expect = {0.0, 0.5, 0.5,  0.5, -0.5,
                                        0.0, 0.5, 0.0,  -0.5};
    REQUIRE(spec.B.size() == expect.size());
    for (std::size_t i = 0; i < expect.size(); ++i)
      CHECK(spec.B[i] == Approx(expect[i]).margin(1e-15));
  }

  SECTION("random well-conditioned systems satisfy the residual bound") {
    oracle::Uniform rng(4101);
    for (int rep = 0; rep < 20; ++rep) {
      const std::size_t k = 4;
      std::vector<double> A(k * k), D(k);
      for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c)
          A[r * k + c] = (r == c ? 1.0 : 0.0) + 0.3 * rng(-1.0, 1.0);
      for (std::size_t i = 0; i < k; ++i)
        D[i] = (rng(0.0, 1.0) < 0.5 ? -1.0 : 1.0) * rng(0.5, 2.0);
      const RecombinationSpec spec = solve_recombination(A, D);
      CHECK(spec.residual <= 1e-13);
      // Recompute A*diag(D)*B^T independently of the solver's own check.
      for (std::size_t r = 0; r < k; ++r)
        for (std::size_t c = 0; c < k; ++c) {
          double acc = 0.0;
          for (std::size_t t = 0; t < k; ++t)
            acc += A[r * k + t] * D[t] * spec.B[c * k + t];
          CHECK(acc == Approx(r == c ? 1.0 : 0.0).margin(1e-13));
        }
    }
  }

  SECTION("bad inputs name the offending block") {
    CHECK_THROWS_WITH(
        solve_recombination({1, 1, 1, -1}, {1.0, 0.0}, "quad I/II block"),
        ContainsSubstring("zero Gram diagonal at position 1") &&
            ContainsSubstring("quad I/II block"));
    CHECK_THROWS_WITH(solve_recombination({1, 1, 1, 1}, {1.0, 2.0}),
                      ContainsSubstring("singular"));
    CHECK_THROWS_AS(solve_recombination({1, 0, 0}, {1.0, 1.0}),
                    std::invalid_argument);
  }

  SECTION("solver reproduces the curl dual combinations") {
    const std::vector<std::pair<ElementKind, CurlIndex>> probes = {
        {ElementKind::quad,
         {ElementKind::quad, CurlTag::I, 2, 3, 0}},
        {ElementKind::triangle,
         {ElementKind::triangle, CurlTag::I, 3, 2, 0}},
    };
    for (const auto& [element, base] : probes) {
      CurlIndex a1 = base, a2 = base;
      a1.tag = CurlTag::auxI;
      a2.tag = CurlTag::auxII;
      const double d1 = hcurl_measured_aux_diagonal(a1);
      const double d2 = hcurl_measured_aux_diagonal(a2);
      const RecombinationSpec spec =
          solve_recombination({1, 1, 1, -1}, {d1, d2});
      for (int row = 0; row < 2; ++row) {
        CurlIndex idx = base;
        idx.tag = row == 0 ? CurlTag::I : CurlTag::II;
        const std::vector<DualTerm> terms =
            hcurl_dual_terms(idx, DualMode::oracle);
        REQUIRE(terms.size() == 2);
        CHECK(terms[0].index.tag == CurlTag::B);
        CHECK(terms[0].coeff == Approx(spec.B[row * 2 + 0]).epsilon(1e-14));
        CHECK(terms[1].index.tag == CurlTag::C);
        CHECK(terms[1].coeff == Approx(spec.B[row * 2 + 1]).epsilon(1e-14));
      }
      (void)element;
    }

    const CurlIndex tbase{ElementKind::tetrahedron, CurlTag::I, 2, 1, 1};
    CurlIndex b1 = tbase, b2 = tbase, b3 = tbase;
    b1.tag = CurlTag::auxI;
    b2.tag = CurlTag::auxII;
    b3.tag = CurlTag::auxIII;
    const double d1 = hcurl_measured_aux_diagonal(b1);
    const double d2 = hcurl_measured_aux_diagonal(b2);
    const double d3 = hcurl_measured_aux_diagonal(b3);
    const RecombinationSpec spec = solve_recombination(
        {1, 1, 1, 1, -1, 1, 1, 1, -1}, {d1, d2, d3}, "tet I/II/III block");
    const double scale = std::max({std::abs(1.0 / d1), std::abs(1.0 / d2),
                                   std::abs(1.0 / d3)});
    // Row I hits only C and D, row II only B and C, row III only B and D;
    // the solver's zero must agree with the hand-coded combination.
    const std::vector<std::vector<std::pair<CurlTag, int>>> layout = {
        {{CurlTag::C, 1}, {CurlTag::D, 2}},
        {{CurlTag::B, 0}, {CurlTag::C, 1}},
        {{CurlTag::B, 0}, {CurlTag::D, 2}},
    };
    const CurlTag rows[] = {CurlTag::I, CurlTag::II, CurlTag::III};
    for (int row = 0; row < 3; ++row) {
      CurlIndex idx = tbase;
      idx.tag = rows[row];
      const std::vector<DualTerm> terms =
          hcurl_dual_terms(idx, DualMode::oracle);
      REQUIRE(terms.size() == 2);
      std::vector<bool> used(3, false);
      for (std::size_t t = 0; t < terms.size(); ++t) {
        CHECK(terms[t].index.tag == layout[row][t].first);
        const int col = layout[row][t].second;
        used[col] = true;
        CHECK(terms[t].coeff ==
              Approx(spec.B[row * 3 + col]).epsilon(1e-13));
      }
      for (int col = 0; col < 3; ++col)
        if (!used[col])
          CHECK(std::abs(spec.B[row * 3 + col]) <= 1e-12 * scale);
    }
  }
}

TEST_CASE("assemble_gram validates inputs and records its rule") {
  const ShapeFamily qp = h1_primal_family(ElementKind::quad, 3);
  const ShapeFamily qd = h1_dual_family(ElementKind::quad, 3, false);
  const ShapeFamily tp = h1_primal_family(ElementKind::triangle, 3);
  const ShapeFamily tv = hcurl_dual_aux_family(ElementKind::triangle, 3);

  CHECK_THROWS_WITH(assemble_gram(qp, h1_dual_family(ElementKind::triangle, 3, false), 3, 2),
                    ContainsSubstring("different elements"));
  CHECK_THROWS_WITH(assemble_gram(tp, tv, 3, 2),
                    ContainsSubstring("value dimensions differ"));
  CHECK_THROWS_AS(assemble_gram(qp, qd, -1, 2), std::invalid_argument);
  CHECK_THROWS_AS(assemble_gram(qp, qd, 3, -1), std::invalid_argument);

  const GramMatrix g = assemble_gram(qp, qd, 3, 4);
  CHECK(g.quadrature_degree == 10);
  CHECK(g.rows() == qp.size());
  CHECK(g.cols() == qd.size());
  CHECK(g.values.size() == g.rows() * g.cols());
  CHECK(g.row_labels == qp.labels);
  CHECK(g.col_labels == qd.labels);
}

TEST_CASE("quad scalar pairing is diagonal with the closed-form diagonal") {
  const int p = 4;
  const ShapeFamily primal = h1_primal_family(ElementKind::quad, p);
  const ShapeFamily dual = h1_dual_family(ElementKind::quad, p, false);
  const GramMatrix g = assemble_gram(primal, dual, p, 6);
  const std::vector<H1Index> indices = h1_indices(ElementKind::quad, p);
  double maxdiag = 0.0;
  for (std::size_t r = 0; r < g.rows(); ++r)
    maxdiag = std::max(maxdiag, std::abs(g(r, r)));
  for (std::size_t r = 0; r < g.rows(); ++r) {
    const int i = indices[r].i, j = indices[r].j;
    const double closed = 16.0 / ((2.0 * i - 1) * i * (2.0 * j - 1) * j);
    CHECK(g(r, r) == Approx(closed).epsilon(1e-13));
    for (std::size_t c = 0; c < g.cols(); ++c)
      if (c != r) CHECK(std::abs(g(r, c)) <= 1e-13 * maxdiag);
  }
}

TEST_CASE("normalized families compose to the identity") {
  struct Combo {
    ElementKind element;
    SpaceKind space;
    int p;
  };
  const std::vector<Combo> combos = {
      {ElementKind::quad, SpaceKind::h1, 6},
      {ElementKind::hex, SpaceKind::h1, 4},
      {ElementKind::triangle, SpaceKind::h1, 6},
      {ElementKind::tetrahedron, SpaceKind::h1, 5},
      {ElementKind::quad, SpaceKind::hcurl, 6},
      {ElementKind::triangle, SpaceKind::hcurl, 6},
      {ElementKind::tetrahedron, SpaceKind::hcurl, 5},
  };
  for (const Combo& combo : combos) {
    INFO("element " << element_name(combo.element) << " space "
                    << space_name(combo.space) << " p " << combo.p);
    const ShapeFamily primal =
        primal_family(combo.element, combo.space, combo.p);
    const ShapeFamily dual =
        dual_family(combo.element, combo.space, combo.p, DualMode::oracle);
    const GramMatrix g = assemble_gram(primal, dual, combo.p, 6);
    CHECK(max_identity_deviation(g) <= 1e-10);
    const BiorthReport rep = verify_biorthogonality(g, 1e-10, true);
    CHECK(rep.pass);
  }
}

TEST_CASE("doubling the quadrature margin does not move entries") {
  struct Setup {
    ShapeFamily primal;
    ShapeFamily dual;
    int p;
  };
  const std::vector<Setup> setups = {
      {hcurl_primal_family(ElementKind::triangle, 4),
       hcurl_dual_aux_family(ElementKind::triangle, 4, true), 4},
      {h1_primal_family(ElementKind::quad, 4),
       h1_dual_family(ElementKind::quad, 4, false), 4},
  };
  for (const Setup& s : setups) {
    const GramMatrix a = assemble_gram(s.primal, s.dual, s.p, 6);
    const GramMatrix b = assemble_gram(s.primal, s.dual, s.p, 12);
    double scale = 0.0;
    for (double v : a.values) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < a.values.size(); ++i)
      CHECK(std::abs(a.values[i] - b.values[i]) <= 1e-13 * scale);
  }
}

TEST_CASE("assembly is deterministic and order independent") {
  const ShapeFamily primal = hcurl_primal_family(ElementKind::triangle, 4);
  const ShapeFamily dual = hcurl_dual_aux_family(ElementKind::triangle, 4, true);
  const GramMatrix g1 = assemble_gram(primal, dual, 4, 6);
  const GramMatrix g2 = assemble_gram(primal, dual, 4, 6);
  CHECK(g1.values == g2.values);

  // Rows permuted at the family level land in permuted positions with
  // bit-identical values: entry accumulation never depends on neighbours.
  std::vector<std::size_t> perm(primal.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::mt19937 rng(913);
  std::shuffle(perm.begin(), perm.end(), rng);
  ShapeFamily shuffled = primal;
  for (std::size_t pos = 0; pos < perm.size(); ++pos)
    shuffled.labels[pos] = primal.labels[perm[pos]];
  shuffled.eval = [base = primal.eval, perm](std::size_t pos,
                                             const CollapsedPoint& pt) {
    return base(perm[pos], pt);
  };
  const GramMatrix gp = assemble_gram(shuffled, dual, 4, 6);
  for (std::size_t r = 0; r < gp.rows(); ++r)
    for (std::size_t c = 0; c < gp.cols(); ++c)
      CHECK(gp(r, c) == g1(perm[r], c));

  // A standalone single-entry integration in the same point order matches
  // the assembled value bit for bit.
  const ElementQuadrature rule = element_quadrature(ElementKind::triangle, 14);
  for (const auto& [r, c] : std::vector<std::pair<std::size_t, std::size_t>>{
           {0, 0}, {3, 7}, {g1.rows() - 1, g1.cols() - 1}}) {
    double acc = 0.0;
    for (std::size_t q = 0; q < rule.points.size(); ++q) {
      const CollapsedPoint cp =
          cartesian_to_duffy(ElementKind::triangle, rule.points[q]);
      acc += rule.weights[q] * dot(primal.eval(r, cp), dual.eval(c, cp));
    }
    CHECK(acc == g1(r, c));
  }

  std::ostringstream s1, s2;
  write_gram_csv(g1, s1);
  write_gram_csv(g2, s2);
  CHECK(s1.str() == s2.str());
}

TEST_CASE("verify_biorthogonality reports and classifies") {
  GramMatrix ident = hand_gram({"a", "b", "c"}, {"a", "b", "c"},
                               {1, 0, 0, 0, 1, 0, 0, 0, 1});
  const BiorthReport rep = verify_biorthogonality(ident, 1e-10);
  CHECK(rep.pass);
  CHECK(rep.max_offdiag_rel == 0.0);
  CHECK(rep.diag_values == std::vector<double>{1, 1, 1});
  for (std::size_t r = 0; r < 3; ++r)
    for (std::size_t c = 0; c < 3; ++c)
      CHECK(rep.pattern(r, c) == (r == c));

  GramMatrix offender = ident;
  offender.values[1] = 1e-3;
  const BiorthReport bad = verify_biorthogonality(offender, 1e-10);
  CHECK_FALSE(bad.pass);
  CHECK(bad.max_offdiag_rel == Approx(1e-3));

  const GramMatrix scaled =
      hand_gram({"a", "b"}, {"a", "b"}, {0.004, 0, 0, -2.0});
  CHECK(verify_biorthogonality(scaled, 1e-10).pass);
  CHECK_FALSE(verify_biorthogonality(scaled, 1e-10, true).pass);
  CHECK(verify_biorthogonality(ident, 1e-10, true).pass);

  const GramMatrix hollow = hand_gram({"a", "b"}, {"a", "b"}, {1, 0, 0, 0});
  CHECK_FALSE(verify_biorthogonality(hollow, 1e-10).pass);

  const GramMatrix rect = hand_gram({"a", "b"}, {"a"}, {1, 0});
  CHECK_THROWS_AS(verify_biorthogonality(rect, 1e-10), std::invalid_argument);
  CHECK_THROWS_AS(verify_biorthogonality(ident, 0.0), std::invalid_argument);
}

TEST_CASE("sparsity_pattern applies a relative threshold") {
  const GramMatrix g = hand_gram({"r0", "r1"}, {"c0", "c1"}, {5, 0.4, 0, 3});
  const PatternMatrix coarse = sparsity_pattern(g, 0.1);
  CHECK(coarse(0, 0));
  CHECK_FALSE(coarse(0, 1));  // 0.4 <= 0.1 * 5
  CHECK_FALSE(coarse(1, 0));
  CHECK(coarse(1, 1));
  const PatternMatrix fine = sparsity_pattern(g, 0.01);
  CHECK(fine(0, 1));  // 0.4 > 0.01 * 5

  const GramMatrix zero = hand_gram({"r"}, {"c"}, {0.0});
  CHECK_FALSE(sparsity_pattern(zero, 0.1)(0, 0));
}

TEST_CASE("triangle aux against raw duals pairs diagonally") {
  const int p = 6;
  const ShapeFamily aux = hcurl_aux_family(ElementKind::triangle, p);
  const ShapeFamily duals = hcurl_dual_aux_family(ElementKind::triangle, p);
  const GramMatrix g = assemble_gram(aux, duals, p, 6);
  REQUIRE(g.rows() == 20);
  REQUIRE(g.cols() == 20);
  const BiorthReport rep = verify_biorthogonality(g, 1e-9);
  CHECK(rep.pass);
  for (std::size_t r = 0; r < g.rows(); ++r)
    for (std::size_t c = 0; c < g.cols(); ++c)
      CHECK(rep.pattern(r, c) == (r == c));
}

TEST_CASE("triangle basis types couple to raw duals in the expected pattern") {
  const int p = 6;
  const ShapeFamily primal = hcurl_primal_family(ElementKind::triangle, p);
  const ShapeFamily duals = hcurl_dual_aux_family(ElementKind::triangle, p, true);
  REQUIRE(primal.size() == duals.size());
  const GramMatrix g = assemble_gram(primal, duals, p, 6);
  const PatternMatrix pat = sparsity_pattern(g, 1e-9);
  const std::vector<CurlIndex> rows = hcurl_primal_indices(ElementKind::triangle, p);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const CurlIndex& idx = rows[r];
    const std::string ij =
        std::to_string(idx.i) + "," + std::to_string(idx.j);
    if (idx.tag == CurlTag::I || idx.tag == CurlTag::II) {
      // Types I and II reduce to one B and one C dual at the same index.
      const std::size_t bcol = pos_of(duals.labels, "tri/B/" + ij);
      const std::size_t ccol = pos_of(duals.labels, "tri/C/" + ij);
      for (std::size_t c = 0; c < g.cols(); ++c)
        CHECK(pat(r, c) == (c == bcol || c == ccol));
    } else {
      // Type III rows touch only first-index B duals, at their own index
      // and possibly the next one (the printed B_{1l} pairing couples
      // neighbouring indices).
      REQUIRE(idx.tag == CurlTag::III);
      const std::size_t bcol =
          pos_of(duals.labels, "tri/B/1," + std::to_string(idx.j));
      CHECK(pat(r, bcol));
      for (std::size_t c = 0; c < g.cols(); ++c) {
        const bool super =
            idx.j + 1 <= p - 1 &&
            c == pos_of(duals.labels,
                        "tri/B/1," + std::to_string(idx.j + 1));
        if (c != bcol && !super) CHECK_FALSE(pat(r, c));
      }
    }
  }
}

TEST_CASE("writers emit stable bytes") {
  SECTION("gram csv") {
    const GramMatrix g =
        hand_gram({"tri/I/2,1", "tri/II/2,1"}, {"tri/B/2,1", "tri/C/2,1"},
                  {1.0, 0.25, 1.0 / 3.0, 0.0});
    std::ostringstream os;
    write_gram_csv(g, os);
    CHECK(os.str() ==
          "\"\",\"tri/B/2,1\",\"tri/C/2,1\"\n"
          "\"tri/I/2,1\",1,0.25\n"
          "\"tri/II/2,1\",0.33333333333333331,0\n");
  }

  SECTION("pattern csv and pbm") {
    PatternMatrix pat;
    pat.rows = 2;
    pat.cols = 3;
    pat.cells = {1, 0, 0, 0, 1, 0};
    std::ostringstream csv;
    write_pattern_csv(pat, csv);
    CHECK(csv.str() == "1,0,0\n0,1,0\n");
    std::ostringstream pbm;
    write_pattern_pbm(pat, pbm);
    CHECK(pbm.str() == "P1\n3 2\n100\n010\n");
  }

  SECTION("pbm rows split at 70 columns") {
    PatternMatrix wide;
    wide.rows = 1;
    wide.cols = 75;
    wide.cells.assign(75, 1);
    std::ostringstream pbm;
    write_pattern_pbm(wide, pbm);
    CHECK(pbm.str() ==
          "P1\n75 1\n" + std::string(70, '1') + "\n" + std::string(5, '1') +
              "\n");
  }

  SECTION("json report parses back") {
    const GramMatrix ident =
        hand_gram({"a", "b"}, {"a", "b"}, {1, 0, 0, 1});
    const BiorthReport rep = verify_biorthogonality(ident, 1e-10);
    std::ostringstream os;
    write_report_json(rep, ElementKind::triangle, SpaceKind::hcurl, 6, os);
    const auto j = nlohmann::json::parse(os.str());
    CHECK(j["element"] == "tri");
    CHECK(j["space"] == "hcurl");
    CHECK(j["p"] == 6);
    REQUIRE(j["diag"].size() == 2);
    CHECK(j["diag"][0].get<double>() == 1.0);
    CHECK(j["max_offdiag_rel"].get<double>() == 0.0);
    CHECK(j["pass"] == true);

    std::ostringstream again;
    write_report_json(rep, ElementKind::triangle, SpaceKind::hcurl, 6, again);
    CHECK(os.str() == again.str());
  }
}

TEST_CASE("seventeen digit formatting round-trips doubles") {
  CHECK(format_real(0.0) == "0");
  CHECK(format_real(1.0) == "1");
  CHECK(format_real(-0.5) == "-0.5");
  CHECK(format_real(1.0 / 3.0) == "0.33333333333333331");
  oracle::Uniform rng(2024);
  for (int rep = 0; rep < 200; ++rep) {
    const double mag = std::pow(10.0, rng(-12.0, 12.0));
    const double v = rng(-1.0, 1.0) * mag;
    CHECK(std::stod(format_real(v)) == v);
  }
}
