#pragma once

// Semigroup evaluation and trajectory diagnostics: the semigroup law, dyadic
// Cesaro averages, the averaging bound, integral identities and type fits.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "core.hpp"
#include "exponential.hpp"
#include "report.hpp"
#include "yosida.hpp"

namespace sglab {

enum class EvalStrategy { exponential_series, yosida_limit };

/// T(t) = exp(tG), evaluated either by the exponential series of G or by the
/// semigroup of a single large Yosida approximant.
class SemigroupHandle {
 public:
  explicit SemigroupHandle(Operator generator, EvalStrategy strategy = EvalStrategy::exponential_series,
                           double series_tolerance = 1e-14, int yosida_index = 1024)
      : generator_(std::move(generator)), strategy_(strategy), options_{series_tolerance} {
    if (strategy_ == EvalStrategy::yosida_limit) {
      const TypeBound b = certified_type_bound(generator_);
      yosida_omega_ = std::max(0.0, b.omega);
      yosida_ = yosida_approximant(generator_.shifted(-yosida_omega_), yosida_index);
    }
  }

  const Operator& generator() const noexcept { return generator_; }
  EvalStrategy strategy() const noexcept { return strategy_; }
  double series_tolerance() const noexcept { return options_.tolerance; }
  std::size_t dim() const noexcept { return generator_.dim(); }

  Element apply(double t, const Element& x) const {
    if (strategy_ == EvalStrategy::exponential_series) return exp_series(generator_, t, x, options_);
    Element y = exp_series(*yosida_, t, x, options_);
    if (yosida_omega_ != 0.0) y *= std::exp(yosida_omega_ * t);
    return y;
  }

  Operator matrix(double t) const {
    const std::size_t n = dim();
    Operator m(n);
    for (std::size_t j = 0; j < n; ++j) {
      const Element col = apply(t, Element::basis(n, j));
      for (std::size_t i = 0; i < n; ++i) m(i, j) = col[i];
    }
    return m;
  }

 private:
  Operator generator_;
  EvalStrategy strategy_;
  SeriesOptions options_;
  std::optional<Operator> yosida_;
  double yosida_omega_ = 0.0;
};

/// max over samples of ||T(t)T(s)x - T(t+s)x|| / max(1, ||x||).
inline CheckReport semigroup_law_check(const SemigroupHandle& h, double t, double s,
                                       const std::vector<Element>& samples, double tol = 1e-10) {
  if (!(t >= 0.0) || !(s >= 0.0)) throw DomainError("semigroup_law_check: times must be >= 0");
  CheckReport rep{"semigroup_law"};
  int worst = -1;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const Element& x = samples[k];
    const double dev = sup_norm(h.apply(t, h.apply(s, x)) - h.apply(t + s, x)) / std::max(1.0, sup_norm(x));
    if (worst < 0 || dev > rep.lhs) {
      rep.lhs = dev;
      worst = static_cast<int>(k);
    }
  }
  rep.rhs = tol;
  rep.pass = rep.lhs <= rep.rhs;
  rep.grid = nlohmann::json{{"t", t}, {"s", s}, {"samples", samples.size()}};
  rep.detail = nlohmann::json{{"worst_sample", worst}};
  return rep;
}

struct CesaroAverage {
  /// Extrapolated approximation of (1/r) int_0^r T(s)x ds.
  Element value;
  /// The plain dyadic Riemann sum 2^{-L} sum_{i < 2^L} T(i r / 2^L) x.
  Element riemann_sum;
  double error_estimate = 0.0;
  int levels = 0;
};

/// Dyadic Riemann sums at levels 0..L, with Richardson elimination of the
/// h, h^2, h^4, ... error terms of the left-endpoint rule.
inline CesaroAverage cesaro_average(const SemigroupHandle& h, double r, const Element& x, int levels) {
  if (!(r > 0.0)) throw DomainError("cesaro_average: r must be > 0");
  if (levels < 1 || levels > 24) throw DomainError("cesaro_average: levels must be in [1, 24]");
  const std::size_t points = std::size_t{1} << levels;
  const double dt = r / static_cast<double>(points);

  std::vector<Element> level_sums(static_cast<std::size_t>(levels) + 1, Element(x.dim()));
  Element y = x;
  for (std::size_t i = 0; i < points; ++i) {
    for (int j = 0; j <= levels; ++j) {
      const std::size_t stride = std::size_t{1} << (levels - j);
      if (i % stride == 0) level_sums[static_cast<std::size_t>(j)] += y;
    }
    if (i + 1 < points) y = h.apply(dt, y);
  }
  for (int j = 0; j <= levels; ++j) level_sums[static_cast<std::size_t>(j)] *= 1.0 / static_cast<double>(std::size_t{1} << j);

  // Richardson table over the last few levels.
  const int depth = std::min(levels, 5);
  auto power = [](int k) { return k == 1 ? 1 : 2 * (k - 1); };
  std::vector<Element> prev(level_sums.end() - depth - 1, level_sums.end());
  Element before_last = prev.back();
  for (int k = 1; k <= depth; ++k) {
    const double factor = std::ldexp(1.0, power(k)) - 1.0;
    std::vector<Element> next;
    for (std::size_t i = 1; i < prev.size(); ++i) {
      Element e = prev[i];
      e.axpy(1.0 / factor, prev[i] - prev[i - 1]);
      next.push_back(std::move(e));
    }
    before_last = prev.back();
    prev = std::move(next);
  }
  CesaroAverage out;
  out.value = prev.back();
  out.riemann_sum = level_sums.back();
  out.error_estimate = sup_norm(out.value - before_last);
  out.levels = levels;
  return out;
}

/// ||T(h)x_r - x_r|| <= (2h/r) sup_{s <= h + r} ||T(s)x||, the supremum taken
/// over a uniform grid with extra points in the first and last cells.
inline CheckReport averaging_bound_check(const SemigroupHandle& h, double r, double hstep, const Element& x,
                                         int grid_points = 64, int levels = 12) {
  if (!(hstep > 0.0 && hstep < r)) throw DomainError("averaging_bound_check: need 0 < h < r");
  const CesaroAverage avg = cesaro_average(h, r, x, levels);
  CheckReport rep{"averaging_bound"};
  rep.lhs = sup_norm(h.apply(hstep, avg.value) - avg.value);

  const double horizon = hstep + r;
  std::vector<double> times;
  for (int i = 0; i <= grid_points; ++i) times.push_back(horizon * i / grid_points);
  const double cell = horizon / grid_points;
  for (int i = 1; i < 8; ++i) {
    times.push_back(cell * i / 8.0);
    times.push_back(horizon - cell * i / 8.0);
  }
  std::sort(times.begin(), times.end());
  double sup = 0.0;
  double arg = 0.0;
  for (double s : times) {
    const double v = sup_norm(h.apply(s, x));
    if (v > sup) {
      sup = v;
      arg = s;
    }
  }
  rep.rhs = 2.0 * hstep / r * sup;
  rep.pass = rep.lhs <= rep.rhs;
  rep.grid = nlohmann::json{{"r", r}, {"h", hstep}, {"points", times.size()}};
  rep.detail = nlohmann::json{{"sup_trajectory", sup}, {"argsup", arg}, {"quadrature_error", avg.error_estimate}};
  return rep;
}

struct IntegralIdentities {
  /// ||A int_0^t T(s)x ds - (T(t)x - x)||
  double generator_outside = 0.0;
  /// ||int_0^t T(s)Ax ds - (T(t)x - x)||
  double generator_inside = 0.0;
  double quadrature_error = 0.0;
};

/// Both forms of T(t)x - x = A int_0^t T(s)x ds = int_0^t T(s)Ax ds.
inline IntegralIdentities integral_identities(const SemigroupHandle& h, double t, const Element& x, int levels = 12) {
  const Operator& a = h.generator();
  const Element increment = h.apply(t, x) - x;
  const CesaroAverage avg_x = cesaro_average(h, t, x, levels);
  const CesaroAverage avg_ax = cesaro_average(h, t, apply(a, x), levels);
  IntegralIdentities out;
  out.generator_outside = sup_norm(apply(a, t * avg_x.value) - increment);
  out.generator_inside = sup_norm(t * avg_ax.value - increment);
  out.quadrature_error = t * std::max(op_norm(a) * avg_x.error_estimate, avg_ax.error_estimate);
  return out;
}

/// Empirical (M, omega): M = max over the grid and samples of
/// e^{-omega t} ||T(t)x|| / ||x||, clamped to >= 1. Zero samples are skipped.
inline TypeBound fit_type_bound(const SemigroupHandle& h, double omega, double horizon,
                                const std::vector<Element>& samples, int points_per_unit = 64) {
  if (!(horizon > 0.0)) throw DomainError("fit_type_bound: horizon must be > 0");
  const int steps = std::max(1, static_cast<int>(std::ceil(horizon * points_per_unit)));
  const double dt = horizon / steps;
  double m = 1.0;
  for (const Element& x0 : samples) {
    const double xn = sup_norm(x0);
    if (xn == 0.0) continue;
    Element x = x0;
    for (int j = 0; j <= steps; ++j) {
      m = std::max(m, std::exp(-omega * j * dt) * sup_norm(x) / xn);
      if (j < steps) x = h.apply(dt, x);
    }
  }
  return {m, omega, false};
}

}  // namespace sglab
