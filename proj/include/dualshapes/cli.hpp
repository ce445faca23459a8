#ifndef DUALSHAPES_CLI_HPP
#define DUALSHAPES_CLI_HPP

#include <cmath>
#include <fstream>
#include <iostream>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "dualshapes/biorth.hpp"
#include "dualshapes/project.hpp"

namespace dualshapes {

/// Parsed command-line configuration.  One process runs exactly one
/// command; identical configurations produce byte-identical output.
struct CliConfig {
  std::string command;  // verify|gram|sparsity|coeffs|project|tables
  ElementKind element = ElementKind::quad;
  SpaceKind space = SpaceKind::h1;
  int p = 6;
  double tol = 1e-10;
  std::string format = "csv";  // csv|json|pbm
  std::string out;             // output path; empty writes to stdout
  DualMode mode = DualMode::oracle;
  std::string which = "combined";   // gram/sparsity column set: combined|aux
  std::string function = "sinsin";  // project target: sinsin|poly|ones
};

inline ElementKind parse_element_name(const std::string& name) {
  if (name == "quad") return ElementKind::quad;
  if (name == "hex") return ElementKind::hex;
  if (name == "tri") return ElementKind::triangle;
  if (name == "tet") return ElementKind::tetrahedron;
  throw std::invalid_argument("unknown element: " + name);
}

inline SpaceKind parse_space_name(const std::string& name) {
  if (name == "h1") return SpaceKind::h1;
  if (name == "hcurl") return SpaceKind::hcurl;
  throw std::invalid_argument("unknown space: " + name);
}

inline DualMode parse_mode_name(const std::string& name) {
  if (name == "paper") return DualMode::paper;
  if (name == "oracle") return DualMode::oracle;
  throw std::invalid_argument("unknown mode: " + name);
}

namespace detail {

inline const char* mode_name(DualMode mode) {
  return mode == DualMode::paper ? "paper" : "oracle";
}

inline const char* verdict_name(AuditVerdict v) {
  switch (v) {
    case AuditVerdict::match: return "match";
    case AuditVerdict::sign_flip: return "sign_flip";
    case AuditVerdict::mismatch: return "mismatch";
  }
  return "unknown";
}

inline bool is_member(const std::string& value,
                      std::initializer_list<const char*> set) {
  for (const char* s : set)
    if (value == s) return true;
  return false;
}

}  // namespace detail

/// Rejects configurations outside the supported envelope before any work
/// starts.  Violations are usage errors (exit code 2), never partial runs.
inline void validate_config(const CliConfig& cfg) {
  if (!detail::is_member(cfg.command, {"verify", "gram", "sparsity", "coeffs",
                                       "project", "tables"}))
    throw std::invalid_argument("unknown command: " + cfg.command);
  if (cfg.p < 2) throw std::invalid_argument("--p must be at least 2");
  if (!(cfg.tol > 0.0)) throw std::invalid_argument("--tol must be positive");
  if (cfg.element == ElementKind::hex && cfg.space == SpaceKind::hcurl)
    throw std::invalid_argument(
        "unsupported combination: element hex has no hcurl basis");
  if (!detail::is_member(cfg.format, {"csv", "json", "pbm"}))
    throw std::invalid_argument("unknown format: " + cfg.format);
  if (!detail::is_member(cfg.which, {"combined", "aux"}))
    throw std::invalid_argument("unknown --which value: " + cfg.which);
  if (!detail::is_member(cfg.function, {"sinsin", "poly", "ones"}))
    throw std::invalid_argument("unknown --function value: " + cfg.function);
  if (cfg.command == "sparsity") {
    if (cfg.format == "json")
      throw std::invalid_argument("sparsity writes csv or pbm, not json");
  } else if (cfg.format == "pbm") {
    throw std::invalid_argument("--format pbm is only available for sparsity");
  }
  if (cfg.command == "coeffs" && cfg.space != SpaceKind::hcurl)
    throw std::invalid_argument("coeffs requires --space hcurl");
  if ((cfg.command == "gram" || cfg.command == "sparsity") &&
      cfg.which == "aux" && cfg.space != SpaceKind::hcurl)
    throw std::invalid_argument("--which aux requires --space hcurl");
}

namespace detail {

/// Gram matrix a command operates on.  "aux" pairs the auxiliary fields
/// with their aligned raw duals.  "combined" pairs the full basis with the
/// recombined duals; with raw_columns it pairs the full basis with the raw
/// dual set extended down to first index 1, which is the coupling figure
/// the sparsity command renders.
inline GramMatrix cli_gram(const CliConfig& cfg, bool raw_columns) {
  if (cfg.which == "aux")
    return assemble_gram(hcurl_aux_family(cfg.element, cfg.p),
                         hcurl_dual_aux_family(cfg.element, cfg.p), cfg.p, 6);
  if (raw_columns && cfg.space == SpaceKind::hcurl)
    return assemble_gram(hcurl_primal_family(cfg.element, cfg.p),
                         hcurl_dual_aux_family(cfg.element, cfg.p, true),
                         cfg.p, 6);
  return assemble_gram(primal_family(cfg.element, cfg.space, cfg.p),
                       dual_family(cfg.element, cfg.space, cfg.p, cfg.mode),
                       cfg.p, 6);
}

/// Built-in targets for the project command.  Every active component
/// carries the same scalar profile so runs are reproducible without an
/// input file.
inline FieldFunction builtin_function(const std::string& name, int value_dim,
                                      int dim) {
  constexpr double pi = 3.14159265358979323846;
  if (name == "ones")
    return [value_dim](const Point3&) {
      VectorValue v;
      v.dim = value_dim;
      for (int d = 0; d < value_dim; ++d) v.comp[d] = 1.0;
      return v;
    };
  if (name == "poly")
    return [value_dim, dim](const Point3& pt) {
      double s = pt[0] * pt[0] * pt[1] + 0.5 * pt[0];
      if (dim == 3) s += pt[0] * pt[1] * pt[2];
      VectorValue v;
      v.dim = value_dim;
      for (int d = 0; d < value_dim; ++d) v.comp[d] = s;
      return v;
    };
  if (name == "sinsin")
    return [value_dim, dim](const Point3& pt) {
      double s = std::sin(pi * pt[0]) * std::sin(pi * pt[1]);
      if (dim == 3) s *= std::sin(pi * pt[2]);
      VectorValue v;
      v.dim = value_dim;
      for (int d = 0; d < value_dim; ++d) v.comp[d] = s;
      return v;
    };
  throw std::invalid_argument("unknown function: " + name);
}

inline void write_audit_csv(const std::vector<AlphaAudit>& audit, int p,
                            std::ostream& os) {
  os << "index,paper,oracle,ratio,verdict\n";
  for (const AlphaAudit& row : audit) {
    os << '"' << curl_label(row.index, p) << "\"," << format_real(row.printed)
       << ',' << format_real(row.measured) << ',' << format_real(row.ratio)
       << ',' << verdict_name(row.verdict) << '\n';
  }
}

inline void write_audit_json(const std::vector<AlphaAudit>& audit,
                             ElementKind element, int p, std::ostream& os) {
  os << "{\n";
  os << "  \"element\": \"" << element_name(element) << "\",\n";
  os << "  \"space\": \"hcurl\",\n";
  os << "  \"p\": " << p << ",\n";
  os << "  \"entries\": [\n";
  for (std::size_t i = 0; i < audit.size(); ++i) {
    const AlphaAudit& row = audit[i];
    os << "    {\"index\": \"" << curl_label(row.index, p)
       << "\", \"paper\": " << format_real(row.printed)
       << ", \"oracle\": " << format_real(row.measured)
       << ", \"ratio\": " << format_real(row.ratio) << ", \"verdict\": \""
       << verdict_name(row.verdict) << "\"}";
    os << (i + 1 < audit.size() ? ",\n" : "\n");
  }
  os << "  ]\n";
  os << "}\n";
}

struct DiagonalRow {
  std::string label;
  double measured = 0.0;
  double closed = 0.0;
};

/// Normalization diagonals with their closed-form counterparts.  For h1
/// every basis function has one; for hcurl the rows are the audit slots.
inline std::vector<DiagonalRow> diagonal_rows(const CliConfig& cfg) {
  std::vector<DiagonalRow> rows;
  if (cfg.space == SpaceKind::h1) {
    for (const H1Index& idx : h1_indices(cfg.element, cfg.p))
      rows.push_back({h1_label(idx), h1_measured_diagonal(idx),
                      h1_closed_diagonal(idx)});
  } else {
    for (const AlphaAudit& row : hcurl_alpha_audit(cfg.element, cfg.p))
      rows.push_back(
          {curl_label(row.index, cfg.p), row.measured, row.printed});
  }
  return rows;
}

inline void write_diagonals_csv(const std::vector<DiagonalRow>& rows,
                                std::ostream& os) {
  os << "index,measured,closed,ratio\n";
  for (const DiagonalRow& row : rows) {
    os << '"' << row.label << "\"," << format_real(row.measured) << ','
       << format_real(row.closed) << ','
       << format_real(row.measured / row.closed) << '\n';
  }
}

inline void write_diagonals_json(const std::vector<DiagonalRow>& rows,
                                 const CliConfig& cfg, std::ostream& os) {
  os << "{\n";
  os << "  \"element\": \"" << element_name(cfg.element) << "\",\n";
  os << "  \"space\": \"" << space_name(cfg.space) << "\",\n";
  os << "  \"p\": " << cfg.p << ",\n";
  os << "  \"entries\": [\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << "    {\"index\": \"" << rows[i].label
       << "\", \"measured\": " << format_real(rows[i].measured)
       << ", \"closed\": " << format_real(rows[i].closed)
       << ", \"ratio\": " << format_real(rows[i].measured / rows[i].closed)
       << "}";
    os << (i + 1 < rows.size() ? ",\n" : "\n");
  }
  os << "  ]\n";
  os << "}\n";
}

inline void write_projection_csv(const ProjectionResult& result,
                                 std::ostream& os) {
  os << "index,coefficient\n";
  for (std::size_t i = 0; i < result.labels.size(); ++i)
    os << '"' << result.labels[i] << "\","
       << format_real(result.coefficients[i]) << '\n';
  os << "l2_error," << format_real(result.l2_error) << '\n';
  os << "linf_error_sampled," << format_real(result.linf_error_sampled)
     << '\n';
}

inline void write_verify_text(const BiorthReport& rep, const CliConfig& cfg,
                              std::size_t size, std::ostream& os) {
  double diag_err = 0.0;
  for (double d : rep.diag_values)
    diag_err = std::max(diag_err, std::abs(d - 1.0));
  os << "element," << element_name(cfg.element) << '\n';
  os << "space," << space_name(cfg.space) << '\n';
  os << "p," << cfg.p << '\n';
  os << "mode," << mode_name(cfg.mode) << '\n';
  os << "size," << size << '\n';
  os << "max_offdiag_rel," << format_real(rep.max_offdiag_rel) << '\n';
  os << "max_diag_error," << format_real(diag_err) << '\n';
  os << "pass," << (rep.pass ? "true" : "false") << '\n';
}

}  // namespace detail

/// Executes a validated configuration, writing to cfg.out if set and to
/// console otherwise.  Returns the process exit code: 0 on success, 1 when
/// verify finds a failing system.
inline int run_command(const CliConfig& cfg, std::ostream& console) {
  validate_config(cfg);
  std::ofstream file;
  if (!cfg.out.empty()) {
    file.open(cfg.out, std::ios::binary);
    if (!file)
      throw std::runtime_error("cannot open output file: " + cfg.out);
  }
  std::ostream& os = cfg.out.empty() ? console : file;

  if (cfg.command == "verify") {
    const GramMatrix g =
        assemble_gram(primal_family(cfg.element, cfg.space, cfg.p),
                      dual_family(cfg.element, cfg.space, cfg.p, cfg.mode),
                      cfg.p, 6);
    const BiorthReport rep = verify_biorthogonality(g, cfg.tol, true);
    if (cfg.format == "json")
      write_report_json(rep, cfg.element, cfg.space, cfg.p, os);
    else
      detail::write_verify_text(rep, cfg, g.rows(), os);
    return rep.pass ? 0 : 1;
  }
  if (cfg.command == "gram") {
    const GramMatrix g = detail::cli_gram(cfg, false);
    if (cfg.format == "json") {
      const bool unit = cfg.which == "combined";
      write_report_json(verify_biorthogonality(g, cfg.tol, unit), cfg.element,
                        cfg.space, cfg.p, os);
    } else {
      write_gram_csv(g, os);
    }
    return 0;
  }
  if (cfg.command == "sparsity") {
    const GramMatrix g = detail::cli_gram(cfg, true);
    const PatternMatrix pat = sparsity_pattern(g, cfg.tol);
    if (cfg.format == "pbm")
      write_pattern_pbm(pat, os);
    else
      write_pattern_csv(pat, os);
    return 0;
  }
  if (cfg.command == "coeffs") {
    const std::vector<AlphaAudit> audit = hcurl_alpha_audit(cfg.element, cfg.p);
    if (cfg.format == "json")
      detail::write_audit_json(audit, cfg.element, cfg.p, os);
    else
      detail::write_audit_csv(audit, cfg.p, os);
    return 0;
  }
  if (cfg.command == "tables") {
    const std::vector<detail::DiagonalRow> rows = detail::diagonal_rows(cfg);
    if (cfg.format == "json")
      detail::write_diagonals_json(rows, cfg, os);
    else
      detail::write_diagonals_csv(rows, os);
    return 0;
  }
  // validate_config leaves only "project".
  const int dim = element_dim(cfg.element);
  const int vdim = cfg.space == SpaceKind::h1 ? 1 : dim;
  const FieldFunction u = detail::builtin_function(cfg.function, vdim, dim);
  const FamilySpec family{cfg.element, cfg.space, cfg.p};
  const ProjectionResult result = project(u, family);
  if (cfg.format == "json")
    write_projection_json(result, family, os);
  else
    detail::write_projection_csv(result, os);
  return 0;
}

/// Full entry point: parses argv, runs the command, maps every parse or
/// domain error to the usage exit code.  Exit codes: 0 success, 1 failed
/// verification, 2 usage error.
inline int cli_main(int argc, const char* const* argv,
                    std::ostream& console = std::cout,
                    std::ostream& errs = std::cerr) {
  CliConfig cfg;
  std::string element = "quad";
  std::string space = "h1";
  std::string mode = "oracle";
  CLI::App app{"biorthogonal dual shape function toolkit"};
  app.add_option("command", cfg.command,
                 "one of verify|gram|sparsity|coeffs|project|tables")
      ->required()
      ->check(CLI::IsMember(
          {"verify", "gram", "sparsity", "coeffs", "project", "tables"}));
  app.add_option("--element", element, "reference element")
      ->check(CLI::IsMember({"quad", "hex", "tri", "tet"}));
  app.add_option("--space", space, "function space")
      ->check(CLI::IsMember({"h1", "hcurl"}));
  app.add_option("--p", cfg.p, "polynomial degree, at least 2");
  app.add_option("--tol", cfg.tol, "relative tolerance for checks");
  app.add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"csv", "json", "pbm"}));
  app.add_option("--out", cfg.out, "output file (default: stdout)");
  app.add_option("--mode", mode, "dual coefficient source")
      ->check(CLI::IsMember({"paper", "oracle"}));
  app.add_option("--which", cfg.which,
                 "gram/sparsity columns: recombined duals or raw aux duals")
      ->check(CLI::IsMember({"combined", "aux"}));
  app.add_option("--function", cfg.function, "project target function")
      ->check(CLI::IsMember({"sinsin", "poly", "ones"}));
  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e, console, errs);
  } catch (const CLI::ParseError& e) {
    errs << "error: " << e.what() << '\n';
    return 2;
  }
  cfg.element = parse_element_name(element);
  cfg.space = parse_space_name(space);
  cfg.mode = parse_mode_name(mode);
  try {
    return run_command(cfg, console);
  } catch (const std::exception& e) {
    errs << "error: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace dualshapes

#endif  // DUALSHAPES_CLI_HPP
