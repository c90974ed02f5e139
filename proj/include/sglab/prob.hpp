#pragma once

// Exact tails for the distributions used by the dominating-variable
// constructions, Chernoff bounds, and stochastic-domination checks.
//
// tail(d, c) is P[X > c]: nonincreasing, right-continuous, in [0, 1]. Every
// distribution here lives on [0, inf) except possibly a point mass.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

#include "core.hpp"

namespace sglab {

struct Exponential {
  double rate = 1.0;
};
/// Integer shape, rate parametrization: density r^k s^{k-1} e^{-rs} / (k-1)!.
struct Gamma {
  int shape = 1;
  double rate = 1.0;
};
struct Poisson {
  double mean = 0.0;
};
/// ceil(Z / n) with Z ~ Poisson(n t).
struct CeilScaledPoisson {
  int n = 1;
  double t = 0.0;
};
/// P[Y > c] = 1 for c < 1/lambda0, exp(-phi_gamma(c, lambda0)) beyond.
struct GammaDominator {
  double lambda0 = 1.0;
};
/// Integer-valued, Y >= ceil(T), P[Y > k] = exp(-phi_poisson(k, T)) for k >= ceil(T).
struct PoissonDominator {
  double T = 1.0;
};
struct PointMass {
  double value = 0.0;
};

using Distribution =
    std::variant<Exponential, Gamma, Poisson, CeilScaledPoisson, GammaDominator, PoissonDominator, PointMass>;

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

/// phi(c, alpha) = c alpha - 1 - log(c alpha); nonnegative, zero at c alpha = 1.
inline double phi_gamma(double c, double alpha) {
  const double u = c * alpha;
  if (!(u > 0.0)) throw DomainError("phi_gamma: requires c * alpha > 0");
  const double d = u - 1.0;
  return d - std::log1p(d);
}

/// phi(a, b) = a log(a / b) - a + b.
inline double phi_poisson(double a, double b) {
  if (!(a > 0.0) || !(b > 0.0)) throw DomainError("phi_poisson: requires a > 0 and b > 0");
  return a * std::log(a / b) - a + b;
}

namespace detail {

inline double poisson_pmf(double mean, long k) {
  if (k < 0) return 0.0;
  if (mean == 0.0) return k == 0 ? 1.0 : 0.0;
  return std::exp(static_cast<double>(k) * std::log(mean) - mean - std::lgamma(static_cast<double>(k) + 1.0));
}

/// P[Z > m] for Z ~ Poisson(mean), m an integer.
inline double poisson_tail(double mean, long m) {
  if (m < 0) return 1.0;
  if (mean == 0.0) return 0.0;
  if (static_cast<double>(m) + 1.0 > mean) {
    double sum = 0.0;
    for (long k = m + 1;; ++k) {
      const double term = poisson_pmf(mean, k);
      sum += term;
      if (static_cast<double>(k) > mean && term <= 1e-18 * sum) break;
      if (term == 0.0 && static_cast<double>(k) > mean) break;
    }
    return std::min(1.0, sum);
  }
  double cdf = 0.0;
  for (long k = 0; k <= m; ++k) cdf += poisson_pmf(mean, k);
  return std::clamp(1.0 - cdf, 0.0, 1.0);
}

inline long floor_index(double c) { return static_cast<long>(std::floor(c)); }

}  // namespace detail

inline void validate(const Distribution& d) {
  std::visit(overloaded{
                 [](const Exponential& e) {
                   if (!(e.rate > 0.0)) throw DomainError("Exponential: rate must be > 0");
                 },
                 [](const Gamma& g) {
                   if (g.shape < 1 || !(g.rate > 0.0)) throw DomainError("Gamma: needs shape >= 1 and rate > 0");
                 },
                 [](const Poisson& p) {
                   if (!(p.mean >= 0.0) || !std::isfinite(p.mean)) throw DomainError("Poisson: mean must be >= 0");
                 },
                 [](const CeilScaledPoisson& b) {
                   if (b.n < 1 || !(b.t >= 0.0)) throw DomainError("CeilScaledPoisson: needs n >= 1 and t >= 0");
                 },
                 [](const GammaDominator& y) {
                   if (!(y.lambda0 > 0.0)) throw DomainError("GammaDominator: lambda0 must be > 0");
                 },
                 [](const PoissonDominator& y) {
                   if (!(y.T > 0.0)) throw DomainError("PoissonDominator: T must be > 0");
                 },
                 [](const PointMass& p) {
                   if (!std::isfinite(p.value)) throw DomainError("PointMass: value must be finite");
                 },
             },
             d);
}

/// P[X > c].
inline double tail(const Distribution& d, double c) {
  validate(d);
  return std::visit(
      overloaded{
          [c](const Exponential& e) { return c < 0.0 ? 1.0 : std::exp(-e.rate * c); },
          [c](const Gamma& g) {
            if (c <= 0.0) return 1.0;
            // P[Gamma(k, r) > c] = P[Poisson(rc) <= k - 1], summed term by term.
            double s = 0.0;
            for (long j = 0; j < g.shape; ++j) s += detail::poisson_pmf(g.rate * c, j);
            return std::min(1.0, s);
          },
          [c](const Poisson& p) { return c < 0.0 ? 1.0 : detail::poisson_tail(p.mean, detail::floor_index(c)); },
          [c](const CeilScaledPoisson& b) {
            if (c < 0.0) return 1.0;
            return detail::poisson_tail(b.n * b.t, b.n * detail::floor_index(c));
          },
          [c](const GammaDominator& y) {
            return c <= 1.0 / y.lambda0 ? 1.0 : std::exp(-phi_gamma(c, y.lambda0));
          },
          [c](const PoissonDominator& y) {
            const double start = std::ceil(y.T);
            if (c < start) return 1.0;
            return std::exp(-phi_poisson(std::floor(c), y.T));
          },
          [c](const PointMass& p) { return c < p.value ? 1.0 : 0.0; },
      },
      d);
}

/// Support on the integers (a point mass counts when its value is integral).
inline bool is_lattice(const Distribution& d) {
  return std::visit(overloaded{
                        [](const Poisson&) { return true; },
                        [](const CeilScaledPoisson&) { return true; },
                        [](const PoissonDominator&) { return true; },
                        [](const PointMass& p) { return p.value == std::floor(p.value); },
                        [](const auto&) { return false; },
                    },
                    d);
}

inline bool is_atomic(const Distribution& d) {
  return is_lattice(d) || std::holds_alternative<PointMass>(d);
}

/// P[X = k] for lattice distributions.
inline double pmf(const Distribution& d, long k) {
  if (!is_lattice(d)) throw Unsupported("pmf: distribution is not integer-valued");
  return std::max(0.0, tail(d, static_cast<double>(k) - 1.0) - tail(d, static_cast<double>(k)));
}

/// Lebesgue density for the continuous distributions.
inline double density(const Distribution& d, double x) {
  validate(d);
  return std::visit(overloaded{
                        [x](const Exponential& e) { return x < 0.0 ? 0.0 : e.rate * std::exp(-e.rate * x); },
                        [x](const Gamma& g) {
                          if (x <= 0.0) return g.shape == 1 && x == 0.0 ? g.rate : 0.0;
                          return std::exp(g.shape * std::log(g.rate) + (g.shape - 1) * std::log(x) - g.rate * x -
                                          std::lgamma(static_cast<double>(g.shape)));
                        },
                        [x](const GammaDominator& y) {
                          if (x <= 1.0 / y.lambda0) return 0.0;
                          return std::exp(-phi_gamma(x, y.lambda0)) * (y.lambda0 - 1.0 / x);
                        },
                        [](const auto&) -> double { throw Unsupported("density: distribution has atoms"); },
                    },
                    d);
}

/// Left end of the support.
inline double support_lower(const Distribution& d) {
  return std::visit(overloaded{
                        [](const GammaDominator& y) { return 1.0 / y.lambda0; },
                        [](const PoissonDominator& y) { return std::ceil(y.T); },
                        [](const PointMass& p) { return p.value; },
                        [](const auto&) { return 0.0; },
                    },
                    d);
}

/// Smallest c (to bisection accuracy, integral for lattice laws) with P[X > c] <= eps.
inline double upper_quantile(const Distribution& d, double eps) {
  if (std::holds_alternative<PointMass>(d)) return std::get<PointMass>(d).value;
  double lo = std::min(0.0, support_lower(d)) - 1.0;
  double hi = std::max(1.0, support_lower(d) + 1.0);
  while (tail(d, hi) > eps) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e12) throw ConvergenceError("upper_quantile: tail does not decay");
  }
  if (is_lattice(d)) {
    long a = static_cast<long>(std::floor(lo)), b = static_cast<long>(std::ceil(hi));
    while (b - a > 1) {
      const long mid = a + (b - a) / 2;
      (tail(d, static_cast<double>(mid)) > eps ? a : b) = mid;
    }
    return static_cast<double>(b);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi);
    (tail(d, mid) > eps ? lo : hi) = mid;
  }
  return hi;
}

inline double mean(const Distribution& d) {
  validate(d);
  return std::visit(overloaded{
                        [](const Exponential& e) { return 1.0 / e.rate; },
                        [](const Gamma& g) { return g.shape / g.rate; },
                        [](const Poisson& p) { return p.mean; },
                        [](const GammaDominator& y) { return 3.0 / y.lambda0; },
                        [](const PointMass& p) { return p.value; },
                        [&d](const auto&) {
                          // Nonnegative integer law: E[X] = sum_{k >= 0} P[X > k].
                          double s = 0.0;
                          for (long k = 0;; ++k) {
                            const double t = tail(d, static_cast<double>(k));
                            s += t;
                            if (t < 1e-17) break;
                          }
                          return s;
                        },
                    },
                    d);
}

/// P[ceil(X) = k] for k = 0..K, with K the first index where P[ceil(X) > K]
/// drops to eps. Requires support in [0, inf).
inline std::vector<double> ceil_cells(const Distribution& d, double eps = 1e-12) {
  validate(d);
  if (support_lower(d) < 0.0) throw Unsupported("ceil_cells: support extends below zero");
  std::vector<double> cells;
  double prev = tail(d, -1.0);
  for (long k = 0;; ++k) {
    const double cur = tail(d, static_cast<double>(k));
    cells.push_back(std::max(0.0, prev - cur));
    prev = cur;
    if (cur <= eps) break;
    if (k > 10'000'000) throw ConvergenceError("ceil_cells: tail does not decay");
  }
  return cells;
}

/// Masses of ceil(Z / n), Z ~ Poisson(n t), by regrouping Poisson masses:
/// cell 0 holds Z = 0 and cell l + 1 holds Z in {n l + 1, ..., n l + n}.
inline std::vector<double> ceil_scaled_poisson_pmf(int n, double t, double eps = 1e-16) {
  validate(CeilScaledPoisson{n, t});
  const double mu = n * t;
  std::vector<double> cells{detail::poisson_pmf(mu, 0)};
  double covered = cells.front();
  for (long l = 0; 1.0 - covered > eps || static_cast<double>(l * n) < mu; ++l) {
    double s = 0.0;
    for (long k = 1; k <= n; ++k) s += detail::poisson_pmf(mu, n * l + k);
    cells.push_back(s);
    covered += s;
    if (s == 0.0 && static_cast<double>(l * n) > mu) break;
  }
  return cells;
}

inline std::optional<double> log_mgf(const Distribution& d, double theta) {
  return std::visit(overloaded{
                        [theta](const Exponential& e) -> std::optional<double> {
                          if (theta >= e.rate) return std::nullopt;
                          return std::log(e.rate / (e.rate - theta));
                        },
                        [theta](const Gamma& g) -> std::optional<double> {
                          if (theta >= g.rate) return std::nullopt;
                          return g.shape * std::log(g.rate / (g.rate - theta));
                        },
                        [theta](const Poisson& p) -> std::optional<double> { return p.mean * std::expm1(theta); },
                        [theta](const PointMass& p) -> std::optional<double> { return theta * p.value; },
                        [](const auto&) -> std::optional<double> {
                          throw Unsupported("log_mgf: no closed-form Laplace transform for this distribution");
                        },
                    },
                    d);
}

inline double theta_max(const Distribution& d) {
  return std::visit(overloaded{
                        [](const Exponential& e) { return e.rate; },
                        [](const Gamma& g) { return g.rate; },
                        [](const auto&) { return std::numeric_limits<double>::infinity(); },
                    },
                    d);
}

struct ChernoffBound {
  double bound = 1.0;
  double theta = 0.0;
  /// c theta - log E e^{theta X} at the chosen theta.
  double rate = 0.0;
};

/// exp(-n sup_theta (c theta - log E e^{theta X})) bounds P[(1/n) sum X_i > c].
/// The concave rate is maximized by a grid scan and golden-section search on
/// (0, theta_max); every feasible theta gives a valid bound, so the best one
/// found is returned.
inline ChernoffBound chernoff_bound(const std::function<std::optional<double>(double)>& log_mgf_fn, double c, int n,
                                    double theta_limit) {
  if (n < 1) throw DomainError("chernoff_bound: n must be >= 1");
  if (!(theta_limit > 0.0)) throw DomainError("chernoff_bound: no feasible theta");
  auto rate = [&](double th) {
    const auto lm = log_mgf_fn(th);
    if (!lm || !std::isfinite(*lm)) return -std::numeric_limits<double>::infinity();
    return c * th - *lm;
  };
  double hi = theta_limit;
  if (!std::isfinite(hi)) {
    hi = 1.0;
    for (int k = 0; k < 60 && rate(2.0 * hi) > rate(hi); ++k) hi *= 2.0;
    hi *= 2.0;
  } else {
    hi *= 1.0 - 1e-12;
  }
  constexpr int kGrid = 256;
  double best_th = 0.0, best = 0.0;
  int best_i = -1;
  for (int i = 1; i <= kGrid; ++i) {
    const double th = hi * i / kGrid;
    const double r = rate(th);
    if (r > best) {
      best = r;
      best_th = th;
      best_i = i;
    }
  }
  if (best_i > 0) {
    double a = hi * (best_i - 1) / kGrid, b = hi * std::min(best_i + 1, kGrid) / kGrid;
    constexpr double g = 0.6180339887498949;
    double x1 = b - g * (b - a), x2 = a + g * (b - a);
    double f1 = rate(x1), f2 = rate(x2);
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, b); ++it) {
      if (f1 < f2) {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + g * (b - a);
        f2 = rate(x2);
      } else {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - g * (b - a);
        f1 = rate(x1);
      }
    }
    for (double th : {x1, x2}) {
      const double r = rate(th);
      if (r > best) {
        best = r;
        best_th = th;
      }
    }
  }
  bool any_feasible = false;
  for (int i = 1; i <= kGrid && !any_feasible; ++i) any_feasible = std::isfinite(rate(hi * i / kGrid));
  if (!any_feasible) throw DomainError("chernoff_bound: no feasible theta");
  return {std::exp(-n * best), best_th, best};
}

inline ChernoffBound chernoff_bound(const Distribution& d, double c, int n) {
  validate(d);
  return chernoff_bound([&d](double th) { return log_mgf(d, th); }, c, n, theta_max(d));
}

/// P[(1/n) sum_{i <= n} X_i > c] for iid X_i, where the sum has a closed
/// form: exponential and gamma sums are gamma, Poisson sums are Poisson.
inline double sample_mean_tail(const Distribution& d, int n, double c) {
  if (n < 1) throw DomainError("sample_mean_tail: n must be >= 1");
  validate(d);
  return std::visit(overloaded{
                        [&](const Exponential& e) { return tail(Gamma{n, n * e.rate}, c); },
                        [&](const Gamma& g) { return tail(Gamma{n * g.shape, n * g.rate}, c); },
                        [&](const Poisson& p) {
                          return c < 0.0 ? 1.0 : detail::poisson_tail(n * p.mean, detail::floor_index(n * c));
                        },
                        [&](const PointMass& p) { return tail(p, c); },
                        [](const auto&) -> double {
                          throw Unsupported("sample_mean_tail: no closed form for sums of this distribution");
                        },
                    },
                    d);
}

struct DominanceReport {
  bool dominates = false;
  /// min over the grid of P[X1 > c] - P[X2 > c]
  double worst_gap = 0.0;
  double worst_c = 0.0;
  std::size_t grid_points = 0;
  std::string method;
};

inline constexpr double kDominanceSlack = 1e-12;

namespace detail {

inline std::vector<double> dominance_grid(const Distribution& d1, const Distribution& d2) {
  const double upper = std::max(upper_quantile(d1, 1e-12), upper_quantile(d2, 1e-12));
  std::vector<double> grid{-1.0, 0.0, upper};
  if (is_atomic(d1) || is_atomic(d2)) {
    for (double k = -1.0; k <= std::ceil(upper); k += 1.0) grid.push_back(k);
  }
  if (!(is_lattice(d1) && is_lattice(d2))) {
    const double lo = std::max(1e-6 * upper, 1e-9);
    for (int i = 0; i < 512; ++i) grid.push_back(lo * std::pow(upper / lo, i / 511.0));
    for (int k = 1; k <= 12; ++k) {
      grid.push_back(upper_quantile(d1, std::pow(10.0, -k)));
      grid.push_back(upper_quantile(d2, std::pow(10.0, -k)));
    }
  }
  for (const auto* d : {&d1, &d2}) grid.push_back(support_lower(*d));
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

}  // namespace detail

/// Tail comparison P[X1 > c] >= P[X2 > c] - 1e-12 over a grid. Integer laws
/// are compared at every lattice point up to the 1e-12 tail; otherwise a
/// 512-point log grid plus decade quantiles is used, and for two continuous
/// laws each grid interval is searched for an interior minimum of the gap.
inline DominanceReport dominates(const Distribution& d1, const Distribution& d2,
                                 std::optional<std::vector<double>> grid = std::nullopt) {
  validate(d1);
  validate(d2);
  DominanceReport rep;
  const bool lattice = is_lattice(d1) && is_lattice(d2);
  const bool smooth = !is_atomic(d1) && !is_atomic(d2);
  const std::vector<double> cs = grid ? *grid : detail::dominance_grid(d1, d2);
  rep.method = grid ? "user-grid" : lattice ? "lattice-verified" : smooth ? "grid-verified+refined" : "grid-verified";
  rep.grid_points = cs.size();
  rep.worst_gap = std::numeric_limits<double>::infinity();
  auto gap = [&](double c) { return tail(d1, c) - tail(d2, c); };
  auto consider = [&](double c) {
    const double g = gap(c);
    if (g < rep.worst_gap) {
      rep.worst_gap = g;
      rep.worst_c = c;
    }
  };
  for (double c : cs) consider(c);
  if (smooth && !grid) {
    for (std::size_t i = 1; i < cs.size(); ++i) {
      double a = cs[i - 1], b = cs[i];
      constexpr double g = 0.6180339887498949;
      double x1 = b - g * (b - a), x2 = a + g * (b - a);
      double f1 = gap(x1), f2 = gap(x2);
      for (int it = 0; it < 40; ++it) {
        if (f1 > f2) {
          a = x1;
          x1 = x2;
          f1 = f2;
          x2 = a + g * (b - a);
          f2 = gap(x2);
        } else {
          b = x2;
          x2 = x1;
          f2 = f1;
          x1 = b - g * (b - a);
          f1 = gap(x1);
        }
      }
      consider(x1);
      consider(x2);
    }
  }
  rep.dominates = rep.worst_gap >= -kDominanceSlack;
  return rep;
}

/// Bounded increasing test functions for the expectation form of domination.
struct ConstantFn {
  double value = 0.0;
};
/// 1{x > threshold}
struct StepFn {
  double threshold = 0.0;
};
/// min(x, cap), clamped below at 0
struct CappedFn {
  double cap = 1.0;
};
struct CustomFn {
  std::function<double(double)> f;
  std::string name = "custom";
};
using TestFunction = std::variant<ConstantFn, StepFn, CappedFn, CustomFn>;

inline double evaluate(const TestFunction& fn, double x) {
  return std::visit(overloaded{
                        [](const ConstantFn& k) { return k.value; },
                        [x](const StepFn& s) { return x > s.threshold ? 1.0 : 0.0; },
                        [x](const CappedFn& m) { return std::clamp(x, 0.0, m.cap); },
                        [x](const CustomFn& c) { return c.f(x); },
                    },
                    fn);
}

/// E[fn(X)]: exact for constants and steps, summation for integer laws, and
/// composite Gauss-Legendre against the density otherwise.
inline double expectation(const Distribution& d, const TestFunction& fn) {
  validate(d);
  if (const auto* k = std::get_if<ConstantFn>(&fn)) return k->value;
  if (const auto* s = std::get_if<StepFn>(&fn)) return tail(d, s->threshold);
  if (const auto* p = std::get_if<PointMass>(&d)) return evaluate(fn, p->value);
  if (is_lattice(d)) {
    double e = 0.0;
    const long lo = static_cast<long>(std::floor(support_lower(d)));
    for (long k = lo;; ++k) {
      e += pmf(d, k) * evaluate(fn, static_cast<double>(k));
      if (tail(d, static_cast<double>(k)) < 1e-17) break;
    }
    return e;
  }
  const double lo = support_lower(d);
  const double hi = upper_quantile(d, 1e-17);
  std::vector<double> breaks{lo, hi};
  if (const auto* m = std::get_if<CappedFn>(&fn); m && m->cap > lo && m->cap < hi) breaks.push_back(m->cap);
  std::sort(breaks.begin(), breaks.end());
  static const double gx[8] = {-0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
                               0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
  static const double gw[8] = {0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
                               0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};
  double e = 0.0;
  for (std::size_t s = 1; s < breaks.size(); ++s) {
    const int panels = 2000;
    const double w = (breaks[s] - breaks[s - 1]) / panels;
    for (int p = 0; p < panels; ++p) {
      const double mid = breaks[s - 1] + (p + 0.5) * w;
      for (int k = 0; k < 8; ++k) {
        const double x = mid + 0.5 * w * gx[k];
        e += 0.5 * w * gw[k] * density(d, x) * evaluate(fn, x);
      }
    }
  }
  return e;
}

struct ExpectationRow {
  std::string function;
  double e1 = 0.0;
  double e2 = 0.0;
  bool pass = false;
};

inline std::string describe(const TestFunction& fn) {
  return std::visit(overloaded{
                        [](const ConstantFn& k) { return "const(" + std::to_string(k.value) + ")"; },
                        [](const StepFn& s) { return "step(" + std::to_string(s.threshold) + ")"; },
                        [](const CappedFn& m) { return "min(x," + std::to_string(m.cap) + ")"; },
                        [](const CustomFn& c) { return c.name; },
                    },
                    fn);
}

/// E[fn(X1)] >= E[fn(X2)] - 1e-9 for each bounded increasing fn.
inline std::vector<ExpectationRow> domination_expectation_check(const Distribution& d1, const Distribution& d2,
                                                                const std::vector<TestFunction>& fns) {
  std::vector<ExpectationRow> rows;
  for (const auto& fn : fns) {
    ExpectationRow r{describe(fn), expectation(d1, fn), expectation(d2, fn)};
    r.pass = r.e1 >= r.e2 - 1e-9;
    rows.push_back(std::move(r));
  }
  return rows;
}

struct DominatorCase {
  int n = 0;
  double param = 0.0;  // lambda or t
  DominanceReport report;
};

struct DominatorReport {
  std::vector<DominatorCase> cases;
  bool pass = false;
};

/// GammaDominator(lambda0) against Gamma(n, n lambda) for every listed pair.
inline DominatorReport gamma_dominator_check(double lambda0, const std::vector<int>& ns,
                                             const std::vector<double>& lambdas) {
  const Distribution y = GammaDominator{lambda0};
  validate(y);
  DominatorReport rep;
  rep.pass = true;
  for (double lambda : lambdas) {
    if (lambda < lambda0) throw DomainError("gamma_dominator_check: lambda below lambda0");
    for (int n : ns) {
      DominatorCase c{n, lambda, dominates(y, Gamma{n, n * lambda})};
      rep.pass = rep.pass && c.report.dominates;
      rep.cases.push_back(std::move(c));
    }
  }
  return rep;
}

/// PoissonDominator(T) against ceil(Poisson(n t) / n) for every listed pair.
inline DominatorReport poisson_dominator_check(double T, const std::vector<int>& ns, const std::vector<double>& ts) {
  const Distribution y = PoissonDominator{T};
  validate(y);
  DominatorReport rep;
  rep.pass = true;
  for (double t : ts) {
    if (t > T || t < 0.0) throw DomainError("poisson_dominator_check: t must lie in [0, T]");
    for (int n : ns) {
      DominatorCase c{n, t, dominates(y, CeilScaledPoisson{n, t})};
      rep.pass = rep.pass && c.report.dominates;
      rep.cases.push_back(std::move(c));
    }
  }
  return rep;
}

// Text form used on the command line: "exponential:1", "gamma:2,4",
// "poisson:2", "ceil-poisson:3,0.5", "gamma-dominator:1",
// "poisson-dominator:2", "point:1".
inline Distribution parse_distribution(const std::string& text) {
  const auto colon = text.find(':');
  if (colon == std::string::npos) throw DomainError("distribution '" + text + "': expected name:params");
  const std::string name = text.substr(0, colon);
  std::vector<double> args;
  std::stringstream ss(text.substr(colon + 1));
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      args.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw DomainError("distribution '" + text + "': bad number '" + item + "'");
    }
  }
  auto need = [&](std::size_t k) {
    if (args.size() != k) throw DomainError("distribution '" + text + "': expected " + std::to_string(k) + " parameters");
  };
  Distribution d;
  if (name == "exponential") {
    need(1);
    d = Exponential{args[0]};
  } else if (name == "gamma") {
    need(2);
    if (args[0] != std::floor(args[0])) throw DomainError("gamma shape must be an integer");
    d = Gamma{static_cast<int>(args[0]), args[1]};
  } else if (name == "poisson") {
    need(1);
    d = Poisson{args[0]};
  } else if (name == "ceil-poisson") {
    need(2);
    if (args[0] != std::floor(args[0])) throw DomainError("ceil-poisson n must be an integer");
    d = CeilScaledPoisson{static_cast<int>(args[0]), args[1]};
  } else if (name == "gamma-dominator") {
    need(1);
    d = GammaDominator{args[0]};
  } else if (name == "poisson-dominator") {
    need(1);
    d = PoissonDominator{args[0]};
  } else if (name == "point") {
    need(1);
    d = PointMass{args[0]};
  } else {
    throw DomainError("unknown distribution '" + name + "'");
  }
  validate(d);
  return d;
}

inline std::string to_string(const Distribution& d) {
  std::ostringstream os;
  os.precision(17);
  std::visit(overloaded{
                 [&](const Exponential& e) { os << "exponential:" << e.rate; },
                 [&](const Gamma& g) { os << "gamma:" << g.shape << ',' << g.rate; },
                 [&](const Poisson& p) { os << "poisson:" << p.mean; },
                 [&](const CeilScaledPoisson& b) { os << "ceil-poisson:" << b.n << ',' << b.t; },
                 [&](const GammaDominator& y) { os << "gamma-dominator:" << y.lambda0; },
                 [&](const PoissonDominator& y) { os << "poisson-dominator:" << y.T; },
                 [&](const PointMass& p) { os << "point:" << p.value; },
             },
             d);
  return os.str();
}

inline void to_json(nlohmann::json& j, const DominanceReport& r) {
  j = nlohmann::json{{"dominates", r.dominates},
                     {"worst_gap", r.worst_gap},
                     {"worst_c", r.worst_c},
                     {"grid_points", r.grid_points},
                     {"method", r.method}};
}

inline void to_json(nlohmann::json& j, const ChernoffBound& r) {
  j = nlohmann::json{{"bound", r.bound}, {"theta", r.theta}, {"rate", r.rate}};
}

inline void to_json(nlohmann::json& j, const DominatorReport& r) {
  auto cases = nlohmann::json::array();
  for (const auto& c : r.cases) cases.push_back({{"n", c.n}, {"param", c.param}, {"report", c.report}});
  j = nlohmann::json{{"cases", cases}, {"pass", r.pass}};
}

}  // namespace sglab
