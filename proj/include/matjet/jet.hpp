#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <utility>
#include <vector>

#include "matjet/errors.hpp"

namespace matjet {

/// Enumeration of all multi-indices d over `gens` generators with total
/// degree |d| <= order, in graded lexicographic order (position 0 is the
/// zero index). Shared, immutable, cached per (gens, order).
class MultiIndexSet {
 public:
  MultiIndexSet(int gens, int order) : gens_(gens), order_(order) {
    if (gens < 0 || order < 0)
      throw ShapeError("generator count and order must be nonnegative");
    std::vector<int> current(static_cast<std::size_t>(gens), 0);
    for (int deg = 0; deg <= order; ++deg) emit(current, 0, deg);
    for (int pos = 0; pos < size(); ++pos)
      lookup_.emplace(index_vector(pos), pos);
  }

  int gens() const { return gens_; }
  int order() const { return order_; }
  int size() const { return static_cast<int>(degree_.size()); }

  std::span<const int> at(int pos) const {
    return {flat_.data() + static_cast<std::size_t>(pos) * gens_,
            static_cast<std::size_t>(gens_)};
  }

  int degree(int pos) const { return degree_[pos]; }

  /// Position of a multi-index, or -1 when its degree exceeds the order.
  int find(std::span<const int> d) const {
    auto it = lookup_.find(std::vector<int>(d.begin(), d.end()));
    return it == lookup_.end() ? -1 : it->second;
  }

  /// Position of at(p) + at(q), or -1 when the sum's degree exceeds order.
  int add(int p, int q) const {
    if (degree_[p] + degree_[q] > order_) return -1;
    std::vector<int> sum(static_cast<std::size_t>(gens_));
    auto dp = at(p), dq = at(q);
    for (int i = 0; i < gens_; ++i) sum[i] = dp[i] + dq[i];
    return lookup_.at(sum);
  }

  /// Position of at(p) - at(q), or -1 when any component would go negative.
  int sub(int p, int q) const {
    std::vector<int> d(static_cast<std::size_t>(gens_));
    auto dp = at(p), dq = at(q);
    for (int i = 0; i < gens_; ++i) {
      d[i] = dp[i] - dq[i];
      if (d[i] < 0) return -1;
    }
    return lookup_.at(d);
  }

  static std::shared_ptr<const MultiIndexSet> get(int gens, int order) {
    static std::mutex mutex;
    static std::map<std::pair<int, int>, std::shared_ptr<const MultiIndexSet>> cache;
    std::lock_guard<std::mutex> lock(mutex);
    auto& slot = cache[{gens, order}];
    if (!slot) slot = std::make_shared<MultiIndexSet>(gens, order);
    return slot;
  }

 private:
  void emit(std::vector<int>& current, int from, int remaining) {
    if (gens_ == 0) {
      if (remaining == 0) push(current);
      return;
    }
    if (from == gens_ - 1) {
      current[from] = remaining;
      push(current);
      current[from] = 0;
      return;
    }
    for (int v = remaining; v >= 0; --v) {
      current[from] = v;
      emit(current, from + 1, remaining - v);
      current[from] = 0;
    }
  }

  void push(const std::vector<int>& d) {
    flat_.insert(flat_.end(), d.begin(), d.end());
    int deg = 0;
    for (int v : d) deg += v;
    degree_.push_back(deg);
  }

  std::vector<int> index_vector(int pos) const {
    auto s = at(pos);
    return {s.begin(), s.end()};
  }

  int gens_;
  int order_;
  std::vector<int> flat_;
  std::vector<int> degree_;
  std::map<std::vector<int>, int> lookup_;
};

/// Element of R[t_1,...,t_m]/(t_1,...,t_m)^(k+1): a truncated multivariate
/// Taylor expansion with real coefficients indexed by multi-indices of
/// total degree <= k. Immutable value type; arithmetic preserves (m, k)
/// and drops every product term of total degree > k.
class Jet {
 public:
  Jet(int gens, int order)
      : set_(MultiIndexSet::get(gens, order)),
        coeffs_(static_cast<std::size_t>(set_->size()), 0.0) {}

  static Jet constant(int gens, int order, double value) {
    Jet j(gens, order);
    j.coeffs_[0] = value;
    return j;
  }

  /// The generator t_i (1-based); zero when the order is 0.
  static Jet generator(int gens, int order, int i) {
    if (i < 1 || i > gens) throw ShapeError("generator index out of range");
    Jet j(gens, order);
    if (order >= 1) {
      std::vector<int> d(static_cast<std::size_t>(gens), 0);
      d[i - 1] = 1;
      j.coeffs_[j.set_->find(d)] = 1.0;
    }
    return j;
  }

  /// base + t_i: the seed used to expand around a point.
  static Jet seed(int gens, int order, int i, double base) {
    Jet j = generator(gens, order, i);
    j.coeffs_[0] = base;
    return j;
  }

  int gens() const { return set_->gens(); }
  int order() const { return set_->order(); }
  const MultiIndexSet& indices() const { return *set_; }
  int size() const { return set_->size(); }

  double coeff(int pos) const { return coeffs_[pos]; }
  double& coeff(int pos) { return coeffs_[pos]; }

  double coeff(std::span<const int> d) const {
    int pos = set_->find(d);
    return pos < 0 ? 0.0 : coeffs_[pos];
  }

  void set_coeff(std::span<const int> d, double value) {
    int pos = set_->find(d);
    if (pos < 0) throw ShapeError("multi-index degree exceeds jet order");
    coeffs_[pos] = value;
  }

  bool same_shape(const Jet& other) const {
    return gens() == other.gens() && order() == other.order();
  }

  /// Degree-0 coefficient (the scalar part).
  double body() const { return coeffs_[0]; }

  /// Copy with the degree-0 coefficient zeroed (the nilpotent part).
  Jet soul() const {
    Jet s = *this;
    s.coeffs_[0] = 0.0;
    return s;
  }

  /// body() + soul() recombine to the jet itself, coefficient for
  /// coefficient.
  std::pair<double, Jet> split() const { return {body(), soul()}; }

  double max_abs() const {
    double m = 0.0;
    for (double c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  Jet& operator+=(const Jet& o) {
    require_shape(o);
    for (int p = 0; p < size(); ++p) coeffs_[p] += o.coeffs_[p];
    return *this;
  }

  Jet& operator-=(const Jet& o) {
    require_shape(o);
    for (int p = 0; p < size(); ++p) coeffs_[p] -= o.coeffs_[p];
    return *this;
  }

  Jet& operator*=(double s) {
    for (double& c : coeffs_) c *= s;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet& b) { return a += b; }
  friend Jet operator-(Jet a, const Jet& b) { return a -= b; }
  friend Jet operator*(Jet a, double s) { return a *= s; }
  friend Jet operator*(double s, Jet a) { return a *= s; }
  friend Jet operator-(Jet a) { return a *= -1.0; }

  friend Jet operator+(Jet a, double s) {
    a.coeffs_[0] += s;
    return a;
  }
  friend Jet operator+(double s, Jet a) { return std::move(a) + s; }

  /// Truncated product: coefficient convolution dropping degree > k.
  friend Jet operator*(const Jet& a, const Jet& b) {
    a.require_shape(b);
    Jet out(a.gens(), a.order());
    const MultiIndexSet& set = a.indices();
    for (int p = 0; p < a.size(); ++p) {
      if (a.coeffs_[p] == 0.0) continue;
      for (int q = 0; q < b.size(); ++q) {
        if (b.coeffs_[q] == 0.0) continue;
        int t = set.add(p, q);
        if (t >= 0) out.coeffs_[t] += a.coeffs_[p] * b.coeffs_[q];
      }
    }
    return out;
  }

  /// Truncated integer power, exponent >= 0.
  Jet pow(int exponent) const {
    if (exponent < 0) throw ShapeError("jet power must be nonnegative");
    Jet acc = constant(gens(), order(), 1.0);
    for (int i = 0; i < exponent; ++i) acc = acc * (*this);
    return acc;
  }

 private:
  void require_shape(const Jet& o) const {
    if (!same_shape(o))
      throw ShapeError("jet shape mismatch: (" + std::to_string(gens()) + "," +
                       std::to_string(order()) + ") vs (" +
                       std::to_string(o.gens()) + "," +
                       std::to_string(o.order()) + ")");
  }

  std::shared_ptr<const MultiIndexSet> set_;
  std::vector<double> coeffs_;
};

/// Quotient num/den of jets, den.body() != 0. Solved coefficient-wise in
/// graded order from the convolution identity den * result = num, so the
/// degree-0 coefficient is exactly num.body()/den.body().
inline Jet jet_div(const Jet& num, const Jet& den) {
  if (!num.same_shape(den)) throw ShapeError("jet shape mismatch in division");
  if (den.body() == 0.0)
    throw DomainError("division by a jet with zero body");
  const MultiIndexSet& set = num.indices();
  Jet out(num.gens(), num.order());
  for (int t = 0; t < num.size(); ++t) {
    double acc = num.coeff(t);
    for (int q = 0; q < num.size(); ++q) {
      if (set.degree(q) == 0) continue;
      int p = set.sub(t, q);
      if (p >= 0 && den.coeff(q) != 0.0) acc -= den.coeff(q) * out.coeff(p);
    }
    out.coeff(t) = acc / den.body();
  }
  return out;
}

/// Sum_{j=0..k} series[j] * soul(g)^j where series[j] = F^(j)(g.body())/j!.
/// The univariate composition underlying every elementary function on jets.
inline Jet jet_compose(std::span<const double> series, const Jet& g) {
  int k = g.order();
  if (static_cast<int>(series.size()) < k + 1)
    throw ShapeError("composition series shorter than jet order + 1");
  Jet soul = g.soul();
  Jet acc = Jet::constant(g.gens(), k, series[0]);
  Jet power = Jet::constant(g.gens(), k, 1.0);
  for (int j = 1; j <= k; ++j) {
    power = power * soul;
    acc += series[j] * power;
  }
  return acc;
}

/// Tuple (a_1,...,a_n) of jets sharing generator count and order: the
/// arguments fed to an expression evaluated in the truncated algebra.
class WeilTuple {
 public:
  explicit WeilTuple(std::vector<Jet> elements) : elements_(std::move(elements)) {
    if (elements_.empty()) throw ShapeError("WeilTuple needs at least one element");
    for (const Jet& j : elements_)
      if (!j.same_shape(elements_.front()))
        throw ShapeError("WeilTuple elements must share generator count and order");
  }

  int size() const { return static_cast<int>(elements_.size()); }
  int gens() const { return elements_.front().gens(); }
  int order() const { return elements_.front().order(); }
  const Jet& operator[](int i) const { return elements_[i]; }
  const std::vector<Jet>& elements() const { return elements_; }

 private:
  std::vector<Jet> elements_;
};

}  // namespace matjet
