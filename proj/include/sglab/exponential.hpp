#pragma once

// Exponential series S(t)x = sum_k t^k G^k x / k! for a bounded generator G.
//
// The series is summed for the shifted operator G + sI with
// s = max(0, max_i -G_ii), and the result is rescaled by exp(-st). For that
// shift the majorant growth rate c - s equals the logarithmic norm of G, so
// dissipative generators never sum terms that cancel catastrophically.

#include <cmath>
#include <limits>

#include "core.hpp"

namespace sglab {

struct SeriesOptions {
  /// Additive tail target, relative to 1 + ||x||.
  double tolerance = 1e-14;
  /// Sum the shifted series; false sums the plain Taylor series of G.
  bool shift = true;
  int max_terms = 20000;
};

struct SeriesResult {
  Element value;
  int terms = 0;
  double tail_bound = 0.0;
  double shift = 0.0;
  /// op_norm(G + shift * I), the rate of the exponential majorant.
  double majorant_rate = 0.0;
};

inline constexpr double kMaxSeriesExponent = 700.0;

/// Growth certificate e^{-omega t} ||T(t)x|| <= M ||x||. `certified` marks a
/// rigorous bound as opposed to an empirical grid fit.
struct TypeBound {
  double M = 1.0;
  double omega = 0.0;
  bool certified = false;
};

/// Rigorous (1, log_norm(G)) bound for exp(tG) in the sup-norm.
inline TypeBound certified_type_bound(const Operator& g) { return {1.0, log_norm(g), true}; }

inline void to_json(nlohmann::json& j, const TypeBound& b) {
  j = nlohmann::json{{"M", b.M}, {"omega", b.omega}, {"certified", b.certified}};
}
inline void from_json(const nlohmann::json& j, TypeBound& b) {
  b.M = j.at("M").get<double>();
  b.omega = j.at("omega").get<double>();
  b.certified = j.value("certified", false);
  if (!(b.M >= 1.0)) throw DomainError("TypeBound: M must be >= 1");
}

inline double series_shift(const Operator& g) {
  double s = 0.0;
  for (std::size_t i = 0; i < g.dim(); ++i) s = std::max(s, -g(i, i));
  return s;
}

namespace detail {
// log of exp(-shift t) * ||x|| * sum_{k > K} a^k / k!, a = t c, via the
// geometric majorant of the remainder; +inf while K + 2 <= a.
inline double log_series_tail(double a, int K, double shift_t, double xnorm) {
  if (xnorm == 0.0 || a == 0.0) return -std::numeric_limits<double>::infinity();
  const double ratio = a / (K + 2.0);
  if (ratio >= 1.0) return std::numeric_limits<double>::infinity();
  return -shift_t + std::log(xnorm) + (K + 1.0) * std::log(a) - std::lgamma(K + 2.0) -
         std::log1p(-ratio);
}
}  // namespace detail

inline SeriesResult exp_series_detailed(const Operator& g, double t, const Element& x,
                                        const SeriesOptions& opt = {}) {
  if (g.dim() != x.dim()) throw DimensionMismatch(g.dim(), x.dim());
  if (!(t >= 0.0) || !std::isfinite(t)) throw DomainError("exp_series: time must be finite and >= 0");
  SeriesResult out;
  out.shift = opt.shift ? series_shift(g) : 0.0;
  const Operator h = out.shift != 0.0 ? g.shifted(out.shift) : g;
  out.majorant_rate = op_norm(h);
  const double a = t * out.majorant_rate;
  if (a > kMaxSeriesExponent)
    throw RangeError("exp_series: t * op_norm = " + std::to_string(a) + " exceeds " +
                     std::to_string(kMaxSeriesExponent));
  if (t == 0.0) {
    out.value = x;
    return out;
  }
  const double xnorm = sup_norm(x);
  const double target = std::log(opt.tolerance * (1.0 + xnorm));
  const double st = out.shift * t;

  Element sum = x;
  Element term = x;
  int k = 0;
  double log_tail = detail::log_series_tail(a, k, st, xnorm);
  while (log_tail > target) {
    if (k >= opt.max_terms) throw ConvergenceError("exp_series: term limit reached");
    term = apply(h, term);
    term *= t / (k + 1.0);
    sum += term;
    ++k;
    log_tail = detail::log_series_tail(a, k, st, xnorm);
  }
  if (st != 0.0) sum *= std::exp(-st);
  out.value = std::move(sum);
  out.terms = k + 1;
  out.tail_bound = std::exp(log_tail);
  return out;
}

inline Element exp_series(const Operator& g, double t, const Element& x, const SeriesOptions& opt = {}) {
  return exp_series_detailed(g, t, x, opt).value;
}

/// exp(tG) as a matrix, column by column.
inline Operator exp_series_matrix(const Operator& g, double t, const SeriesOptions& opt = {}) {
  const std::size_t n = g.dim();
  Operator m(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Element col = exp_series(g, t, Element::basis(n, j), opt);
    for (std::size_t i = 0; i < n; ++i) m(i, j) = col[i];
  }
  return m;
}

}  // namespace sglab
