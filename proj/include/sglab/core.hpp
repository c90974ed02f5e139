#pragma once

// Finite-dimensional substrate: elements, operators, sup-norms, LU solves and
// the spectral abscissa.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace sglab {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  DimensionMismatch(std::size_t expected, std::size_t got)
      : Error("dimension mismatch: expected " + std::to_string(expected) +
              ", got " + std::to_string(got)) {}
  explicit DimensionMismatch(const std::string& what) : Error(what) {}
};

class SingularOperator : public Error {
 public:
  explicit SingularOperator(const std::string& what, std::size_t pivot = 0)
      : Error(what), pivot_(pivot) {}
  std::size_t pivot() const noexcept { return pivot_; }

 private:
  std::size_t pivot_;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class RangeError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class Unsupported : public Error {
 public:
  using Error::Error;
};

namespace detail {
inline void require_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw DomainError(std::string(what) + ": non-finite entry");
  }
}
}  // namespace detail

/// A point x of the discretized space, stored as its coordinates.
class Element {
 public:
  Element() = default;
  explicit Element(std::size_t dim, double fill = 0.0) : values_(dim, fill) {
    if (dim == 0) throw DomainError("Element: dimension must be positive");
  }
  explicit Element(std::vector<double> values) : values_(std::move(values)) {
    if (values_.empty()) throw DomainError("Element: dimension must be positive");
    detail::require_finite(values_, "Element");
  }
  Element(std::initializer_list<double> values) : Element(std::vector<double>(values)) {}

  static Element basis(std::size_t dim, std::size_t i) {
    Element e(dim);
    e[i] = 1.0;
    return e;
  }

  std::size_t dim() const noexcept { return values_.size(); }
  double& operator[](std::size_t i) { return values_[i]; }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  const std::vector<double>& vec() const noexcept { return values_; }

  Element& operator+=(const Element& o) {
    check(o);
    for (std::size_t i = 0; i < dim(); ++i) values_[i] += o.values_[i];
    return *this;
  }
  Element& operator-=(const Element& o) {
    check(o);
    for (std::size_t i = 0; i < dim(); ++i) values_[i] -= o.values_[i];
    return *this;
  }
  Element& operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
  }
  // y += c * o
  Element& axpy(double c, const Element& o) {
    check(o);
    for (std::size_t i = 0; i < dim(); ++i) values_[i] += c * o.values_[i];
    return *this;
  }

  friend Element operator+(Element a, const Element& b) { return a += b; }
  friend Element operator-(Element a, const Element& b) { return a -= b; }
  friend Element operator*(double c, Element a) { return a *= c; }
  friend Element operator*(Element a, double c) { return a *= c; }
  friend bool operator==(const Element&, const Element&) = default;

 private:
  void check(const Element& o) const {
    if (o.dim() != dim()) throw DimensionMismatch(dim(), o.dim());
  }
  std::vector<double> values_;
};

/// Dense square matrix, row-major. Houses generators, resolvents and
/// semigroup snapshots alike.
class Operator {
 public:
  Operator() = default;
  explicit Operator(std::size_t dim) : dim_(dim), entries_(dim * dim, 0.0) {
    if (dim == 0) throw DomainError("Operator: dimension must be positive");
  }
  Operator(std::size_t dim, std::vector<double> row_major)
      : dim_(dim), entries_(std::move(row_major)) {
    if (dim == 0) throw DomainError("Operator: dimension must be positive");
    if (entries_.size() != dim * dim) throw DimensionMismatch(dim * dim, entries_.size());
    detail::require_finite(entries_, "Operator");
  }
  Operator(std::initializer_list<std::initializer_list<double>> rows) {
    dim_ = rows.size();
    if (dim_ == 0) throw DomainError("Operator: dimension must be positive");
    entries_.reserve(dim_ * dim_);
    for (const auto& r : rows) {
      if (r.size() != dim_) throw DomainError("Operator: matrix must be square");
      entries_.insert(entries_.end(), r.begin(), r.end());
    }
    detail::require_finite(entries_, "Operator");
  }

  static Operator zero(std::size_t n) { return Operator(n); }
  static Operator identity(std::size_t n) { return diag(std::vector<double>(n, 1.0)); }
  static Operator diag(const std::vector<double>& d) {
    Operator m(d.size());
    for (std::size_t i = 0; i < d.size(); ++i) m(i, i) = d[i];
    return m;
  }
  static Operator scalar(double a) { return Operator(1, {a}); }

  std::size_t dim() const noexcept { return dim_; }
  double& operator()(std::size_t i, std::size_t j) { return entries_[i * dim_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return entries_[i * dim_ + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(entries_).subspan(i * dim_, dim_);
  }
  const std::vector<double>& entries() const noexcept { return entries_; }

  Operator& operator+=(const Operator& o) {
    check(o);
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] += o.entries_[k];
    return *this;
  }
  Operator& operator-=(const Operator& o) {
    check(o);
    for (std::size_t k = 0; k < entries_.size(); ++k) entries_[k] -= o.entries_[k];
    return *this;
  }
  Operator& operator*=(double c) {
    for (double& v : entries_) v *= c;
    return *this;
  }
  /// this + c * I
  Operator shifted(double c) const {
    Operator m = *this;
    for (std::size_t i = 0; i < dim_; ++i) m(i, i) += c;
    return m;
  }
  Operator transposed() const {
    Operator m(dim_);
    for (std::size_t i = 0; i < dim_; ++i)
      for (std::size_t j = 0; j < dim_; ++j) m(j, i) = (*this)(i, j);
    return m;
  }

  friend Operator operator+(Operator a, const Operator& b) { return a += b; }
  friend Operator operator-(Operator a, const Operator& b) { return a -= b; }
  friend Operator operator*(double c, Operator a) { return a *= c; }
  friend Operator operator*(Operator a, double c) { return a *= c; }
  friend Operator operator*(const Operator& a, const Operator& b) {
    a.check(b);
    const std::size_t n = a.dim_;
    Operator c(n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t k = 0; k < n; ++k) {
        const double aik = a(i, k);
        if (aik == 0.0) continue;
        for (std::size_t j = 0; j < n; ++j) c(i, j) += aik * b(k, j);
      }
    return c;
  }
  friend bool operator==(const Operator&, const Operator&) = default;

 private:
  void check(const Operator& o) const {
    if (o.dim_ != dim_) throw DimensionMismatch(dim_, o.dim_);
  }
  std::size_t dim_ = 0;
  std::vector<double> entries_;
};

inline Element apply(const Operator& op, const Element& x) {
  if (op.dim() != x.dim()) throw DimensionMismatch(op.dim(), x.dim());
  const std::size_t n = op.dim();
  Element y(n);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    const auto r = op.row(i);
    for (std::size_t j = 0; j < n; ++j) s += r[j] * x[j];
    y[i] = s;
  }
  return y;
}

inline double sup_norm(const Element& x) {
  double m = 0.0;
  for (double v : x.values()) m = std::max(m, std::abs(v));
  return m;
}

/// Induced sup-norm: maximum absolute row sum.
inline double op_norm(const Operator& op) {
  double m = 0.0;
  for (std::size_t i = 0; i < op.dim(); ++i) {
    double s = 0.0;
    for (double v : op.row(i)) s += std::abs(v);
    m = std::max(m, s);
  }
  return m;
}

/// Logarithmic sup-norm max_i (a_ii + sum_{j != i} |a_ij|); ||exp(tA)|| <= exp(t * log_norm(A)).
inline double log_norm(const Operator& op) {
  double m = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < op.dim(); ++i) {
    double s = op(i, i);
    for (std::size_t j = 0; j < op.dim(); ++j)
      if (j != i) s += std::abs(op(i, j));
    m = std::max(m, s);
  }
  return m;
}

inline constexpr double kPivotTolerance = 1e-12;

/// LU factorization with partial pivoting. A pivot below kPivotTolerance
/// times the largest entry of the matrix is treated as singular.
class LuFactorization {
 public:
  explicit LuFactorization(const Operator& a) : a_(a), lu_(a), perm_(a.dim()) {
    const std::size_t n = a.dim();
    double scale = 0.0;
    for (double v : a.entries()) scale = std::max(scale, std::abs(v));
    const double tiny = kPivotTolerance * (scale > 0.0 ? scale : 1.0);
    for (std::size_t i = 0; i < n; ++i) perm_[i] = i;
    for (std::size_t k = 0; k < n; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < n; ++i)
        if (std::abs(lu_(i, k)) > std::abs(lu_(p, k))) p = i;
      if (!(std::abs(lu_(p, k)) > tiny))
        throw SingularOperator("operator is singular to tolerance at pivot " + std::to_string(k), k);
      if (p != k) {
        for (std::size_t j = 0; j < n; ++j) std::swap(lu_(p, j), lu_(k, j));
        std::swap(perm_[p], perm_[k]);
      }
      for (std::size_t i = k + 1; i < n; ++i) {
        const double f = lu_(i, k) / lu_(k, k);
        lu_(i, k) = f;
        if (f == 0.0) continue;
        for (std::size_t j = k + 1; j < n; ++j) lu_(i, j) -= f * lu_(k, j);
      }
    }
  }

  std::size_t dim() const noexcept { return lu_.dim(); }

  Element solve(const Element& b) const {
    if (b.dim() != dim()) throw DimensionMismatch(dim(), b.dim());
    Element y = substitute(b);
    // One step of iterative refinement.
    Element r = b - apply(a_, y);
    y += substitute(r);
    return y;
  }

 private:
  Element substitute(const Element& b) const {
    const std::size_t n = dim();
    Element y(n);
    for (std::size_t i = 0; i < n; ++i) {
      double s = b[perm_[i]];
      for (std::size_t j = 0; j < i; ++j) s -= lu_(i, j) * y[j];
      y[i] = s;
    }
    for (std::size_t i = n; i-- > 0;) {
      double s = y[i];
      for (std::size_t j = i + 1; j < n; ++j) s -= lu_(i, j) * y[j];
      y[i] = s / lu_(i, i);
    }
    return y;
  }

  Operator a_;
  Operator lu_;
  std::vector<std::size_t> perm_;
};

inline Element solve(const Operator& op, const Element& b) { return LuFactorization(op).solve(b); }

/// Largest real part of an eigenvalue (the growth bound of exp(tA) in finite dimensions).
inline double spectral_abscissa(const Operator& op) {
  const auto n = static_cast<Eigen::Index>(op.dim());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      m(i, j) = op(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
  Eigen::EigenSolver<Eigen::MatrixXd> es(m, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw ConvergenceError("spectral_abscissa: QR iteration did not converge");
  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) best = std::max(best, es.eigenvalues()[i].real());
  return best;
}

// JSON: {"values": [...]} and {"dim": n, "entries": [row-major]}.
inline void to_json(nlohmann::json& j, const Element& x) { j = nlohmann::json{{"values", x.vec()}}; }
inline void from_json(const nlohmann::json& j, Element& x) {
  x = Element(j.at("values").get<std::vector<double>>());
}
inline void to_json(nlohmann::json& j, const Operator& a) {
  j = nlohmann::json{{"dim", a.dim()}, {"entries", a.entries()}};
}
inline void from_json(const nlohmann::json& j, Operator& a) {
  a = Operator(j.at("dim").get<std::size_t>(), j.at("entries").get<std::vector<double>>());
}

/// Nested row arrays, the layout used by chain specs.
inline Operator operator_from_rows(const nlohmann::json& rows) {
  const std::size_t n = rows.size();
  std::vector<double> e;
  e.reserve(n * n);
  for (const auto& r : rows) {
    if (r.size() != n) throw DomainError("matrix must be square");
    for (const auto& v : r) e.push_back(v.get<double>());
  }
  return Operator(n, std::move(e));
}

inline nlohmann::json operator_to_rows(const Operator& a) {
  auto rows = nlohmann::json::array();
  for (std::size_t i = 0; i < a.dim(); ++i) {
    auto r = a.row(i);
    rows.push_back(std::vector<double>(r.begin(), r.end()));
  }
  return rows;
}

}  // namespace sglab
