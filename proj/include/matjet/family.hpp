#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "matjet/calculus.hpp"
#include "matjet/expr.hpp"
#include "matjet/matrix_tuple.hpp"

namespace matjet {

// ---------------------------------------------------------------------------
// Grids over the base.
// ---------------------------------------------------------------------------

struct GridAxis {
  double min = 0.0;
  double max = 1.0;
  int count = 2;
};

class GridSpec {
 public:
  explicit GridSpec(std::vector<GridAxis> axes) : axes_(std::move(axes)) {
    if (axes_.empty()) throw ShapeError("grid needs at least one axis");
    for (const GridAxis& a : axes_) {
      if (a.count < 2) throw ShapeError("grid axis counts must be >= 2");
      if (!(a.min < a.max)) throw ShapeError("grid axis must have min < max");
    }
    strides_.assign(axes_.size(), 1);
    for (int i = static_cast<int>(axes_.size()) - 2; i >= 0; --i)
      strides_[i] = strides_[i + 1] * axes_[i + 1].count;
  }

  int dims() const { return static_cast<int>(axes_.size()); }
  const std::vector<GridAxis>& axes() const { return axes_; }

  long total() const {
    long t = 1;
    for (const GridAxis& a : axes_) t *= a.count;
    return t;
  }

  double step(int axis) const {
    return (axes_[axis].max - axes_[axis].min) / (axes_[axis].count - 1);
  }

  long stride(int axis) const { return strides_[axis]; }

  /// Coordinates of the grid point at a flat index; the first axis varies
  /// slowest.
  std::vector<double> point(long index) const {
    std::vector<double> p(axes_.size());
    for (std::size_t i = 0; i < axes_.size(); ++i) {
      long coord = (index / strides_[i]) % axes_[i].count;
      p[i] = axes_[i].min + step(static_cast<int>(i)) * coord;
    }
    return p;
  }

  /// All adjacent pairs (a, b) along each axis, b = a + stride(axis).
  template <typename Fn>
  void for_each_edge(Fn&& fn) const {
    const long n = total();
    for (long a = 0; a < n; ++a) {
      for (std::size_t ax = 0; ax < axes_.size(); ++ax) {
        long coord = (a / strides_[ax]) % axes_[ax].count;
        if (coord + 1 < axes_[ax].count)
          fn(a, a + strides_[ax], static_cast<int>(ax));
      }
    }
  }

 private:
  std::vector<GridAxis> axes_;
  std::vector<long> strides_;
};

// ---------------------------------------------------------------------------
// MatrixFamily: matrix entries as expressions over base coordinates.
// ---------------------------------------------------------------------------

class MatrixFamily {
 public:
  MatrixFamily(int base_dim, int n, int r,
               std::vector<std::vector<std::vector<Expr>>> entries)
      : base_dim_(base_dim), n_(n), r_(r), entries_(std::move(entries)) {
    if (base_dim_ < 1 || n_ < 1 || r_ < 1)
      throw ShapeError("family dimensions must be positive");
    if (static_cast<int>(entries_.size()) != n_)
      throw ShapeError("family needs one entry matrix per coordinate");
    for (const auto& mat : entries_) {
      if (static_cast<int>(mat.size()) != r_)
        throw ShapeError("family entry matrix has wrong row count");
      for (const auto& row : mat) {
        if (static_cast<int>(row.size()) != r_)
          throw ShapeError("family entry matrix has wrong column count");
        for (const Expr& e : row)
          if (e.max_variable() > base_dim_)
            throw ShapeError("family entry references coordinate beyond the base "
                             "dimension");
      }
    }
  }

  int base_dim() const { return base_dim_; }
  int n() const { return n_; }
  int r() const { return r_; }
  const Expr& entry(int i, int row, int col) const { return entries_[i][row][col]; }

  /// Evaluate all entries at a base point; the result is validated as a
  /// commuting real-spectrum tuple and construction throws when the
  /// hypotheses fail there.
  MatrixTuple instantiate(std::span<const double> p, double tol = kDefaultTol) const {
    if (static_cast<int>(p.size()) != base_dim_)
      throw ShapeError("base point dimension mismatch");
    std::vector<ComplexMatrix> ms;
    ms.reserve(entries_.size());
    for (const auto& mat : entries_) {
      ComplexMatrix m(r_, r_);
      for (int row = 0; row < r_; ++row)
        for (int col = 0; col < r_; ++col)
          m(row, col) = eval_real(mat[row][col], p);
      ms.push_back(std::move(m));
    }
    return MatrixTuple(std::move(ms), tol);
  }

 private:
  int base_dim_;
  int n_;
  int r_;
  std::vector<std::vector<std::vector<Expr>>> entries_;
};

// ---------------------------------------------------------------------------
// Spectral-locus sampling.
// ---------------------------------------------------------------------------

/// Joint spectrum over one grid point, or the reason it could not be
/// computed there.
struct SpectralSample {
  long index = 0;
  std::vector<double> point;
  bool ok = false;
  std::string defect;
  std::optional<JointSpectrum> spectrum;

  int point_count() const { return static_cast<int>(spectrum->points.size()); }
};

struct FamilyScan {
  std::vector<SpectralSample> samples;  // ordered by grid index
  int defect_count = 0;
};

inline FamilyScan sample_family(const MatrixFamily& fam, const GridSpec& grid,
                                double tol = kDefaultTol, std::uint64_t seed = 0) {
  FamilyScan scan;
  const long total = grid.total();
  scan.samples.reserve(total);
  for (long idx = 0; idx < total; ++idx) {
    SpectralSample sample;
    sample.index = idx;
    sample.point = grid.point(idx);
    try {
      MatrixTuple tuple = fam.instantiate(sample.point, tol);
      DecomposeOptions opts;
      opts.seed = seed;
      sample.spectrum = joint_decompose(tuple, opts);
      sample.ok = true;
    } catch (const std::exception& e) {
      sample.defect = e.what();
      ++scan.defect_count;
    }
    scan.samples.push_back(std::move(sample));
  }
  return scan;
}

// ---------------------------------------------------------------------------
// Wall detection: grid cells where the fiber structure jumps.
// ---------------------------------------------------------------------------

struct WallCell {
  long first = 0;
  long second = 0;
  int axis = 0;
  std::string invariant;  // "points" or "nilpotency"
};

namespace family_detail {

inline std::vector<std::pair<int, int>> structure_key(const JointSpectrum& s) {
  std::vector<std::pair<int, int>> key;
  key.reserve(s.points.size());
  for (const SpectrumPoint& p : s.points) key.emplace_back(p.rank, p.nilpotency);
  std::sort(key.begin(), key.end());
  return key;
}

inline std::optional<std::string> invariant_change(const SpectralSample& a,
                                                   const SpectralSample& b) {
  if (!a.ok || !b.ok) return std::nullopt;
  if (a.point_count() != b.point_count()) return "points";
  if (structure_key(*a.spectrum) != structure_key(*b.spectrum))
    return "nilpotency";
  return std::nullopt;
}

}  // namespace family_detail

inline std::vector<WallCell> wall_detect(const FamilyScan& scan,
                                         const GridSpec& grid) {
  if (static_cast<long>(scan.samples.size()) != grid.total())
    throw ShapeError("scan does not cover the full grid");
  std::vector<WallCell> walls;
  grid.for_each_edge([&](long a, long b, int axis) {
    auto change = family_detail::invariant_change(scan.samples[a], scan.samples[b]);
    if (change) walls.push_back({a, b, axis, *change});
  });
  return walls;
}

// ---------------------------------------------------------------------------
// family_apply: evaluate f across the grid and grade the continuity of the
// result. Frames may jump at walls; the evaluated endomorphism should not.
// ---------------------------------------------------------------------------

struct FamilyApplyResult {
  std::vector<std::optional<ComplexMatrix>> values;  // by grid index
  FamilyScan scan;

  struct Jump {
    long first = 0;
    long second = 0;
    int axis = 0;
    double value = 0.0;  // max-abs entry difference across the edge
    bool wall = false;
  };
  std::vector<Jump> jumps;

  double max_jump = 0.0;
  double away_median = 0.0;  // median jump over non-wall edges
  double budget = 0.0;       // 3 * away_median (plus a rounding floor)
  bool smooth_pass = true;
};

inline FamilyApplyResult family_apply(const Expr& f, const MatrixFamily& fam,
                                      const GridSpec& grid,
                                      double tol = kDefaultTol,
                                      std::uint64_t seed = 0) {
  FamilyApplyResult result;
  const long total = grid.total();
  result.values.assign(total, std::nullopt);
  result.scan.samples.reserve(total);

  double value_scale = 0.0;
  for (long idx = 0; idx < total; ++idx) {
    SpectralSample sample;
    sample.index = idx;
    sample.point = grid.point(idx);
    try {
      MatrixTuple tuple = fam.instantiate(sample.point, tol);
      DecomposeOptions opts;
      opts.seed = seed;
      AzumayaPoint azpt(std::move(tuple), opts);
      sample.spectrum = azpt.spectrum();
      sample.ok = true;
      ComplexMatrix value = apply(f, azpt);
      value_scale = std::max(value_scale, value.cwiseAbs().maxCoeff());
      result.values[idx] = std::move(value);
    } catch (const std::exception& e) {
      sample.defect = e.what();
      ++result.scan.defect_count;
    }
    result.scan.samples.push_back(std::move(sample));
  }

  std::vector<double> away;
  grid.for_each_edge([&](long a, long b, int axis) {
    if (!result.values[a] || !result.values[b]) return;
    FamilyApplyResult::Jump jump;
    jump.first = a;
    jump.second = b;
    jump.axis = axis;
    jump.value = (*result.values[a] - *result.values[b]).cwiseAbs().maxCoeff();
    jump.wall = family_detail::invariant_change(result.scan.samples[a],
                                                result.scan.samples[b])
                    .has_value();
    if (!jump.wall) away.push_back(jump.value);
    result.max_jump = std::max(result.max_jump, jump.value);
    result.jumps.push_back(jump);
  });

  if (!away.empty()) {
    std::sort(away.begin(), away.end());
    result.away_median = away[away.size() / 2];
  }
  result.budget = 3.0 * result.away_median + 1e-12 * (1.0 + value_scale);
  result.smooth_pass = result.max_jump <= result.budget;
  return result;
}

}  // namespace matjet
