#pragma once

#include <json.hpp>

#include <cstdio>
#include <string>
#include <vector>

#include "matjet/calculus.hpp"
#include "matjet/expr.hpp"
#include "matjet/family.hpp"
#include "matjet/hermite.hpp"
#include "matjet/jet.hpp"
#include "matjet/matrix_tuple.hpp"

namespace matjet::io {

// All numeric output is serialized with 17 significant digits, which
// round-trips doubles exactly; inputs are parsed with nlohmann::json.

inline std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// Input parsing.
// ---------------------------------------------------------------------------

namespace detail {

inline nlohmann::json parse(const std::string& text, const std::string& what) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) throw ParseError("malformed JSON in " + what);
  return j;
}

}  // namespace detail

/// {"r": int, "entries": [[[re, im], ...], ...]} row-major.
inline ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("r") || !j.contains("entries"))
    throw ParseError("matrix JSON needs fields \"r\" and \"entries\"");
  const int r = j.at("r").get<int>();
  if (r < 1) throw ParseError("matrix size must be >= 1");
  const auto& entries = j.at("entries");
  if (!entries.is_array() || static_cast<int>(entries.size()) != r)
    throw ParseError("matrix \"entries\" must hold r rows");
  ComplexMatrix m(r, r);
  for (int row = 0; row < r; ++row) {
    const auto& jrow = entries.at(row);
    if (!jrow.is_array() || static_cast<int>(jrow.size()) != r)
      throw ParseError("matrix row " + std::to_string(row) + " must hold r entries");
    for (int col = 0; col < r; ++col) {
      const auto& e = jrow.at(col);
      if (e.is_number()) {
        m(row, col) = std::complex<double>(e.get<double>(), 0.0);
      } else if (e.is_array() && e.size() == 2) {
        m(row, col) = std::complex<double>(e.at(0).get<double>(),
                                           e.at(1).get<double>());
      } else {
        throw ParseError("matrix entries must be [re, im] pairs");
      }
    }
  }
  return m;
}

/// {"n": int, "matrices": [...], "tol": real?}
inline MatrixTuple tuple_from_json(const std::string& text,
                                   double tol_override = -1.0) {
  nlohmann::json j = detail::parse(text, "matrix tuple");
  if (!j.is_object() || !j.contains("matrices"))
    throw ParseError("tuple JSON needs field \"matrices\"");
  const auto& jm = j.at("matrices");
  if (!jm.is_array() || jm.empty())
    throw ParseError("tuple \"matrices\" must be a nonempty array");
  if (j.contains("n") && j.at("n").get<int>() != static_cast<int>(jm.size()))
    throw ParseError("tuple field \"n\" disagrees with the matrix count");
  std::vector<ComplexMatrix> ms;
  ms.reserve(jm.size());
  for (const auto& one : jm) ms.push_back(matrix_from_json(one));
  double tol = tol_override > 0.0
                   ? tol_override
                   : (j.contains("tol") ? j.at("tol").get<double>() : kDefaultTol);
  return MatrixTuple(std::move(ms), tol);
}

/// {"base_dim": int, "n": int, "r": int,
///  "matrices": [[["expr", ...], ...], ...]}  (n matrices of r x r strings)
inline MatrixFamily family_from_json(const std::string& text) {
  nlohmann::json j = detail::parse(text, "matrix family");
  for (const char* field : {"base_dim", "n", "r", "matrices"})
    if (!j.contains(field))
      throw ParseError(std::string("family JSON needs field \"") + field + "\"");
  const int base_dim = j.at("base_dim").get<int>();
  const int n = j.at("n").get<int>();
  const int r = j.at("r").get<int>();
  const auto& jm = j.at("matrices");
  if (!jm.is_array() || static_cast<int>(jm.size()) != n)
    throw ParseError("family \"matrices\" must hold n matrices");
  std::vector<std::vector<std::vector<Expr>>> entries;
  for (const auto& mat : jm) {
    if (!mat.is_array() || static_cast<int>(mat.size()) != r)
      throw ParseError("family matrix must hold r rows");
    std::vector<std::vector<Expr>> rows;
    for (const auto& row : mat) {
      if (!row.is_array() || static_cast<int>(row.size()) != r)
        throw ParseError("family matrix row must hold r entries");
      std::vector<Expr> cells;
      for (const auto& cell : row) {
        if (!cell.is_string())
          throw ParseError("family entries must be expression strings");
        cells.push_back(parse_expr(cell.get<std::string>(), base_dim));
      }
      rows.push_back(std::move(cells));
    }
    entries.push_back(std::move(rows));
  }
  return MatrixFamily(base_dim, n, r, std::move(entries));
}

/// {"vars": int, "terms": [{"d": [...], "c": real}, ...]}
inline Poly poly_from_json(const std::string& text) {
  nlohmann::json j = detail::parse(text, "polynomial");
  if (!j.is_object() || !j.contains("vars") || !j.contains("terms"))
    throw ParseError("polynomial JSON needs fields \"vars\" and \"terms\"");
  Poly p(j.at("vars").get<int>());
  for (const auto& term : j.at("terms")) {
    if (!term.contains("d") || !term.contains("c"))
      throw ParseError("polynomial terms need fields \"d\" and \"c\"");
    std::vector<int> d = term.at("d").get<std::vector<int>>();
    p.add_term(d, term.at("c").get<double>());
  }
  return p;
}

// ---------------------------------------------------------------------------
// Output serialization.
// ---------------------------------------------------------------------------

inline std::string to_json(const ComplexMatrix& m) {
  std::string out = "{\"r\": " + std::to_string(m.rows()) + ", \"entries\": [";
  for (Eigen::Index row = 0; row < m.rows(); ++row) {
    if (row) out += ", ";
    out += '[';
    for (Eigen::Index col = 0; col < m.cols(); ++col) {
      if (col) out += ", ";
      out += '[' + num(m(row, col).real()) + ", " + num(m(row, col).imag()) + ']';
    }
    out += ']';
  }
  out += "]}";
  return out;
}

/// Jet as {"m": .., "k": .., "coeffs": [{"d": [..], "c": ..}, ..]}; the
/// degree-0 coefficient is always present, other zeros are omitted.
inline std::string to_json(const Jet& jet) {
  std::string out = "{\"m\": " + std::to_string(jet.gens()) +
                    ", \"k\": " + std::to_string(jet.order()) + ", \"coeffs\": [";
  bool first = true;
  const MultiIndexSet& set = jet.indices();
  for (int pos = 0; pos < jet.size(); ++pos) {
    if (pos != 0 && jet.coeff(pos) == 0.0) continue;
    if (!first) out += ", ";
    first = false;
    out += "{\"d\": [";
    auto d = set.at(pos);
    for (int i = 0; i < set.gens(); ++i) {
      if (i) out += ", ";
      out += std::to_string(d[i]);
    }
    out += "], \"c\": " + num(jet.coeff(pos)) + '}';
  }
  out += "]}";
  return out;
}

inline std::string to_json(const Poly& p) {
  std::string out = "{\"vars\": " + std::to_string(p.vars()) + ", \"terms\": [";
  bool first = true;
  for (const auto& [d, c] : p.terms()) {
    if (!first) out += ", ";
    first = false;
    out += "{\"d\": [";
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (i) out += ", ";
      out += std::to_string(d[i]);
    }
    out += "], \"c\": " + num(c) + '}';
  }
  out += "]}";
  return out;
}

inline std::string to_json(const JointSpectrum& spec) {
  std::string out = "{\"points\": [";
  for (std::size_t j = 0; j < spec.points.size(); ++j) {
    const SpectrumPoint& p = spec.points[j];
    if (j) out += ", ";
    out += "{\"lambda\": [";
    for (std::size_t i = 0; i < p.lambda.size(); ++i) {
      if (i) out += ", ";
      out += num(p.lambda[i]);
    }
    out += "], \"rank\": " + std::to_string(p.rank) +
           ", \"nilpotency\": " + std::to_string(p.nilpotency) +
           ", \"imag_projection\": " + num(p.imag_projection) +
           ", \"basis\": " + to_json(ComplexMatrix(p.basis)) + '}';
  }
  out += "], \"condition\": " + num(spec.basis_condition) +
         ", \"cluster_radius\": " + num(spec.cluster_radius) + '}';
  return out;
}

inline std::string to_json(const RingHomReport& rep, double tol) {
  return std::string("{\"unit\": ") + num(rep.unit) +
         ", \"additivity\": " + num(rep.additivity) +
         ", \"linearity\": " + num(rep.linearity) +
         ", \"multiplicativity\": " + num(rep.multiplicativity) +
         ", \"image_commutativity\": " + num(rep.image_commutativity) +
         ", \"center\": " + num(rep.center) +
         ", \"max_residual\": " + num(rep.max_residual()) +
         ", \"tol\": " + num(tol) +
         ", \"pass\": " + (rep.pass(tol) ? "true" : "false") + '}';
}

inline std::string to_json(const DivisionResult& div) {
  std::string out = "{\"quotient\": " + to_json(div.quotient) +
                    ", \"remainder\": " + to_json(div.remainder) + ", \"taps\": [";
  for (std::size_t i = 0; i < div.taps.size(); ++i) {
    if (i) out += ", ";
    out += num(div.taps[i]);
  }
  out += "]}";
  return out;
}

inline std::string to_json(const std::vector<WallCell>& walls) {
  std::string out = "[";
  for (std::size_t i = 0; i < walls.size(); ++i) {
    if (i) out += ", ";
    out += "{\"cell\": [" + std::to_string(walls[i].first) + ", " +
           std::to_string(walls[i].second) +
           "], \"axis\": " + std::to_string(walls[i].axis) + ", \"invariant\": \"" +
           walls[i].invariant + "\"}";
  }
  out += "]";
  return out;
}

namespace detail {

inline std::string csv_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += "\"\"";
    else out += c;
  }
  out += '"';
  return out;
}

inline std::string points_field(const JointSpectrum& spec) {
  std::string out;
  for (std::size_t j = 0; j < spec.points.size(); ++j) {
    const SpectrumPoint& p = spec.points[j];
    if (j) out += ';';
    for (std::size_t i = 0; i < p.lambda.size(); ++i) {
      if (i) out += ' ';
      out += num(p.lambda[i]);
    }
    out += ':' + std::to_string(p.rank) + ':' + std::to_string(p.nilpotency);
  }
  return out;
}

}  // namespace detail

/// One CSV row per grid point: index, base coordinates, status, fiber size
/// s, the spectral points as "lambda...:rank:nilpotency" separated by ';',
/// cond(B), and the defect message when the point failed.
inline std::string to_csv(const FamilyScan& scan, const GridSpec& grid) {
  std::string out = "index";
  for (int i = 0; i < grid.dims(); ++i) out += ",x" + std::to_string(i + 1);
  out += ",status,s,points,cond,defect\n";
  for (const SpectralSample& sample : scan.samples) {
    out += std::to_string(sample.index);
    for (double x : sample.point) out += ',' + num(x);
    if (sample.ok) {
      out += ",ok," + std::to_string(sample.point_count()) + ',' +
             detail::points_field(*sample.spectrum) + ',' +
             num(sample.spectrum->basis_condition) + ',';
    } else {
      out += ",defect,,,," + detail::csv_quote(sample.defect);
    }
    out += '\n';
  }
  return out;
}

inline std::string to_json(const FamilyScan& scan, const GridSpec& grid) {
  std::string out = "{\"total\": " + std::to_string(grid.total()) +
                    ", \"defects\": " + std::to_string(scan.defect_count) +
                    ", \"samples\": [";
  for (std::size_t i = 0; i < scan.samples.size(); ++i) {
    const SpectralSample& sample = scan.samples[i];
    if (i) out += ", ";
    out += "{\"index\": " + std::to_string(sample.index) + ", \"point\": [";
    for (std::size_t k = 0; k < sample.point.size(); ++k) {
      if (k) out += ", ";
      out += num(sample.point[k]);
    }
    out += ']';
    if (sample.ok) {
      out += ", \"spectrum\": " + to_json(*sample.spectrum);
    } else {
      out += ", \"defect\": " + nlohmann::json(sample.defect).dump();
    }
    out += '}';
  }
  out += "]}";
  return out;
}

inline std::string to_json(const FamilyApplyResult& result) {
  std::string out = "{\"values\": [";
  bool first = true;
  for (std::size_t i = 0; i < result.values.size(); ++i) {
    if (!first) out += ", ";
    first = false;
    if (result.values[i])
      out += to_json(*result.values[i]);
    else
      out += "null";
  }
  out += "], \"report\": {\"max_jump\": " + num(result.max_jump) +
         ", \"away_median\": " + num(result.away_median) +
         ", \"budget\": " + num(result.budget) + ", \"smooth\": " +
         (result.smooth_pass ? "true" : "false") +
         ", \"defects\": " + std::to_string(result.scan.defect_count) + "}}";
  return out;
}

inline std::string to_json(const AnnihilationReport& rep, double tol) {
  std::string out = "{\"normalized\": [";
  for (std::size_t i = 0; i < rep.normalized.size(); ++i) {
    if (i) out += ", ";
    out += num(rep.normalized[i]);
  }
  out += "], \"max_normalized\": " + num(rep.max_normalized) +
         ", \"tol\": " + num(tol) +
         ", \"pass\": " + (rep.pass ? "true" : "false") + '}';
  return out;
}

}  // namespace matjet::io
