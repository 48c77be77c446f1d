#pragma once

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "matjet/matjet.hpp"

namespace matjet::cli {

// Exit codes: 0 success, 1 validation failure (bad input, hypothesis or law
// violation), 2 numerical failure (eigensolver, conditioning, clustering).

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_output(const std::string& text, const std::string& out_path,
                         std::ostream& fallback) {
  if (out_path.empty()) {
    fallback << text;
    if (text.empty() || text.back() != '\n') fallback << '\n';
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw ParseError("cannot write file: " + out_path);
  out << text;
}

inline std::vector<double> parse_point(const std::string& text) {
  std::vector<double> p;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      p.push_back(std::stod(item, &used));
      while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used])))
        ++used;
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ParseError("malformed coordinate '" + item + "' in point");
    }
  }
  if (p.empty()) throw ParseError("point must hold at least one coordinate");
  return p;
}

/// "axis:min:max:count[,...]" or "min:max:count[,...]"; the optional
/// leading label names the axis and is otherwise ignored.
inline GridSpec parse_grid(const std::string& text) {
  std::vector<GridAxis> axes;
  std::stringstream ss(text);
  std::string axis_text;
  while (std::getline(ss, axis_text, ',')) {
    std::vector<std::string> parts;
    std::stringstream as(axis_text);
    std::string part;
    while (std::getline(as, part, ':')) parts.push_back(part);
    std::size_t base = 0;
    if (parts.size() == 4) base = 1;
    else if (parts.size() != 3)
      throw ParseError("grid axis must be [label:]min:max:count");
    try {
      GridAxis axis;
      axis.min = std::stod(parts[base]);
      axis.max = std::stod(parts[base + 1]);
      axis.count = std::stoi(parts[base + 2]);
      axes.push_back(axis);
    } catch (const std::exception&) {
      throw ParseError("malformed grid axis '" + axis_text + "'");
    }
  }
  return GridSpec(axes);
}

inline std::vector<Expr> parse_expr_lines(const std::string& text, int arity) {
  std::vector<Expr> out;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    std::size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    if (line[begin] == '#') continue;
    std::size_t end = line.find_last_not_of(" \t\r");
    out.push_back(parse_expr(line.substr(begin, end - begin + 1), arity));
  }
  if (out.empty()) throw ParseError("expression list is empty");
  return out;
}

}  // namespace detail

inline int run(int argc, const char* const* argv, std::ostream& out,
               std::ostream& err) {
  CLI::App app{"Functional calculus on commuting matrix tuples: evaluate "
               "smooth expressions at tuples, sample spectral loci of matrix "
               "families, verify the ring-homomorphism laws"};
  app.require_subcommand(1);

  double tol = kDefaultTol;
  std::uint64_t seed = 0;
  std::string out_path;
  std::string format = "csv";

  // --- apply ---------------------------------------------------------------
  auto* cmd_apply = app.add_subcommand("apply", "evaluate an expression at a tuple");
  std::string apply_expr, apply_tuple;
  cmd_apply->add_option("--expr", apply_expr, "expression in y1..yn")->required();
  cmd_apply->add_option("--tuple", apply_tuple, "tuple JSON file")->required();
  auto* apply_tol = cmd_apply->add_option("--tol", tol, "tolerance");
  cmd_apply->add_option("--seed", seed, "random seed");
  cmd_apply->add_option("--out", out_path, "output path (default stdout)");

  // --- spectrum ------------------------------------------------------------
  auto* cmd_spectrum = app.add_subcommand("spectrum", "joint spectrum of a tuple");
  std::string spectrum_tuple;
  double cluster_radius = -1.0;
  cmd_spectrum->add_option("--tuple", spectrum_tuple, "tuple JSON file")->required();
  auto* spectrum_tol = cmd_spectrum->add_option("--tol", tol, "tolerance");
  cmd_spectrum->add_option("--seed", seed, "random seed");
  cmd_spectrum->add_option("--radius", cluster_radius, "clustering radius override");
  cmd_spectrum->add_option("--out", out_path, "output path (default stdout)");

  // --- verify --------------------------------------------------------------
  auto* cmd_verify =
      app.add_subcommand("verify", "check the ring-homomorphism laws on a tuple");
  std::string verify_tuple, verify_exprs;
  cmd_verify->add_option("--tuple", verify_tuple, "tuple JSON file")->required();
  cmd_verify->add_option("--exprs", verify_exprs,
                         "text file, one expression per line ('#' comments)")
      ->required();
  auto* verify_tol = cmd_verify->add_option("--tol", tol, "tolerance");
  cmd_verify->add_option("--seed", seed, "random seed");
  cmd_verify->add_option("--out", out_path, "output path (default stdout)");

  // --- family-scan ---------------------------------------------------------
  auto* cmd_scan = app.add_subcommand(
      "family-scan", "sample the spectral locus of a family over a grid");
  std::string scan_family, scan_grid, scan_expr;
  cmd_scan->add_option("--family", scan_family, "family JSON file")->required();
  cmd_scan->add_option("--grid", scan_grid, "grid \"[label:]min:max:count[,...]\"")
      ->required();
  cmd_scan->add_option("--expr", scan_expr,
                       "also evaluate this expression across the grid");
  auto* scan_tol = cmd_scan->add_option("--tol", tol, "tolerance");
  cmd_scan->add_option("--seed", seed, "random seed");
  cmd_scan->add_option("--out", out_path,
                       "output base path; writes <base>.csv/.json, "
                       "<base>.walls.json and <base>.values.json");
  cmd_scan->add_option("--format", format, "scan table format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  // --- divide --------------------------------------------------------------
  auto* cmd_divide =
      app.add_subcommand("divide", "univariate polynomial division");
  std::string divide_num, divide_den;
  cmd_divide->add_option("--num", divide_num, "dividend polynomial JSON file")
      ->required();
  cmd_divide->add_option("--den", divide_den, "divisor polynomial JSON file")
      ->required();
  cmd_divide->add_option("--out", out_path, "output path (default stdout)");

  // --- jet -----------------------------------------------------------------
  auto* cmd_jet = app.add_subcommand("jet", "truncated Taylor expansion");
  std::string jet_expr, jet_point;
  int jet_order = 0;
  cmd_jet->add_option("--expr", jet_expr, "expression in y1..yn")->required();
  cmd_jet->add_option("--point", jet_point, "expansion point \"c1,c2,...\"")
      ->required();
  cmd_jet->add_option("--order", jet_order, "truncation order")->required();
  cmd_jet->add_option("--out", out_path, "output path (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*cmd_apply) {
      MatrixTuple tuple = io::tuple_from_json(
          detail::read_file(apply_tuple), apply_tol->count() ? tol : -1.0);
      Expr f = parse_expr(apply_expr, tuple.n());
      DecomposeOptions opts;
      opts.seed = seed;
      AzumayaPoint point(std::move(tuple), opts);
      if (point.ill_conditioned())
        err << "warning: block basis condition number "
            << io::num(point.basis_condition()) << " exceeds 1e8\n";
      detail::write_output(io::to_json(apply(f, point)), out_path, out);
    } else if (*cmd_spectrum) {
      MatrixTuple tuple = io::tuple_from_json(
          detail::read_file(spectrum_tuple), spectrum_tol->count() ? tol : -1.0);
      DecomposeOptions opts;
      opts.seed = seed;
      opts.cluster_radius = cluster_radius;
      detail::write_output(io::to_json(joint_decompose(tuple, opts)), out_path, out);
    } else if (*cmd_verify) {
      MatrixTuple tuple = io::tuple_from_json(
          detail::read_file(verify_tuple), verify_tol->count() ? tol : -1.0);
      double law_tol = tuple.tol();
      std::vector<Expr> fs =
          detail::parse_expr_lines(detail::read_file(verify_exprs), tuple.n());
      DecomposeOptions opts;
      opts.seed = seed;
      AzumayaPoint point(std::move(tuple), opts);
      RingHomReport rep = verify_ring_hom(point, fs, seed);
      detail::write_output(io::to_json(rep, law_tol), out_path, out);
      if (!rep.pass(law_tol)) {
        err << "error: ring-homomorphism residual " << io::num(rep.max_residual())
            << " exceeds tol " << io::num(law_tol) << '\n';
        return 1;
      }
    } else if (*cmd_scan) {
      MatrixFamily family = io::family_from_json(detail::read_file(scan_family));
      GridSpec grid = detail::parse_grid(scan_grid);
      double scan_tolerance = scan_tol->count() ? tol : kDefaultTol;
      FamilyScan scan = sample_family(family, grid, scan_tolerance, seed);
      std::vector<WallCell> walls = wall_detect(scan, grid);
      std::string table = format == "csv" ? io::to_csv(scan, grid)
                                          : io::to_json(scan, grid);
      if (out_path.empty()) {
        out << table;
        err << "walls: " << walls.size() << ", defects: " << scan.defect_count
            << " (use --out to write walls/values files)\n";
      } else {
        detail::write_output(table, out_path + (format == "csv" ? ".csv" : ".json"),
                             out);
        detail::write_output(io::to_json(walls), out_path + ".walls.json", out);
        out << "scan: " << scan.samples.size() << " points, " << walls.size()
            << " walls, " << scan.defect_count << " defects\n";
      }
      if (!scan_expr.empty()) {
        Expr f = parse_expr(scan_expr, family.n());
        FamilyApplyResult values =
            family_apply(f, family, grid, scan_tolerance, seed);
        if (out_path.empty())
          detail::write_output(io::to_json(values), "", out);
        else
          detail::write_output(io::to_json(values), out_path + ".values.json", out);
      }
    } else if (*cmd_divide) {
      Poly num = io::poly_from_json(detail::read_file(divide_num));
      Poly den = io::poly_from_json(detail::read_file(divide_den));
      detail::write_output(io::to_json(poly_divide(num, den)), out_path, out);
    } else if (*cmd_jet) {
      std::vector<double> point = detail::parse_point(jet_point);
      if (jet_order < 0) throw ParseError("jet order must be nonnegative");
      Expr f = parse_expr(jet_expr, static_cast<int>(point.size()));
      detail::write_output(io::to_json(taylor_jet(f, point, jet_order)), out_path,
                           out);
    }
  } catch (const NumericalError& e) {
    err << "error: numerical: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}

}  // namespace matjet::cli
