#pragma once

// Yosida approximants A_n = n^2 R(n) - n = n A R(n), their semigroups, the
// Cauchy-difference certificate and the joint equi-continuity scan.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "core.hpp"
#include "exponential.hpp"

namespace sglab {

/// R(lambda) = (lambda - A)^{-1} as a matrix.
inline Operator resolvent_matrix(const Operator& a, double lambda) {
  const std::size_t d = a.dim();
  const LuFactorization lu(Operator::identity(d) * lambda - a);
  Operator r(d);
  for (std::size_t j = 0; j < d; ++j) {
    const Element col = lu.solve(Element::basis(d, j));
    for (std::size_t i = 0; i < d; ++i) r(i, j) = col[i];
  }
  return r;
}

inline constexpr double kApproximantIdentityTolerance = 1e-10;

/// n^2 R(n) - n I, after checking it against n A R(n).
inline Operator yosida_approximant(const Operator& a, double n) {
  if (!(n > 0.0)) throw DomainError("yosida_approximant: index must be positive");
  Operator r;
  try {
    r = resolvent_matrix(a, n);
  } catch (const SingularOperator& e) {
    throw SingularOperator("yosida_approximant: n = " + std::to_string(n) + " lies in the spectrum", e.pivot());
  }
  Operator resolvent_form = (n * n) * r - n * Operator::identity(a.dim());
  const Operator generator_form = n * (a * r);
  const double gap = op_norm(resolvent_form - generator_form);
  if (gap > kApproximantIdentityTolerance * std::max(1.0, op_norm(generator_form)))
    throw ConvergenceError("yosida_approximant: n^2 R(n) - n and n A R(n) differ by " + std::to_string(gap));
  return resolvent_form;
}

/// Approximants of the rescaled generator A - shift I, shift = max(0, omega),
/// for a list of indices. Semigroup outputs are multiplied back by e^{shift t}.
struct YosidaScheme {
  Operator generator;
  Operator rescaled;
  TypeBound bound;
  std::vector<int> indices;
  std::vector<Operator> approximants;
  double shift = 0.0;

  const Operator& approximant(int n) const {
    const auto it = std::find(indices.begin(), indices.end(), n);
    if (it == indices.end()) throw DomainError("YosidaScheme: index " + std::to_string(n) + " not in scheme");
    return approximants[static_cast<std::size_t>(it - indices.begin())];
  }
  /// Contraction case with a rigorous certificate.
  bool rigorous() const { return bound.certified && bound.M == 1.0; }
};

inline YosidaScheme make_yosida_scheme(const Operator& a, std::vector<int> indices, const TypeBound& bound) {
  const double shift = std::max(0.0, bound.omega);
  YosidaScheme s{a, a.shifted(-shift), bound, std::move(indices), {}, shift};
  s.approximants.reserve(s.indices.size());
  for (int n : s.indices) s.approximants.push_back(yosida_approximant(s.rescaled, n));
  return s;
}

inline YosidaScheme make_yosida_scheme(const Operator& a, std::vector<int> indices) {
  return make_yosida_scheme(a, std::move(indices), certified_type_bound(a));
}

/// T_n(t)x = e^{shift t} exp(t A_n) x.
inline Element yosida_semigroup(const YosidaScheme& s, int n, double t, const Element& x,
                                const SeriesOptions& opt = {}) {
  Element y = exp_series(s.approximant(n), t, x, opt);
  if (s.shift != 0.0) y *= std::exp(s.shift * t);
  return y;
}

struct YosidaLimit {
  Element value;
  int n = 0;
  int m = 0;
  /// t ||A_n x - A_m x||, bounds ||T_n(t)x - T_m(t)x||.
  double certificate = 0.0;
  /// t ||A_n x - A x||, bounds the gap to the limit semigroup.
  double limit_gap = 0.0;
  bool rigorous = false;
};

inline YosidaLimit yosida_limit(const YosidaScheme& s, double t, const Element& x, int n, int m,
                                const SeriesOptions& opt = {}) {
  if (!(t >= 0.0)) throw DomainError("yosida_limit: time must be >= 0");
  YosidaLimit out;
  out.n = std::max(n, m);
  out.m = std::min(n, m);
  out.value = yosida_semigroup(s, out.n, t, x, opt);
  const Element an_x = apply(s.approximant(out.n), x);
  const double growth = std::exp(s.shift * t);
  out.certificate = growth * t * sup_norm(an_x - apply(s.approximant(out.m), x));
  out.limit_gap = growth * t * sup_norm(an_x - apply(s.rescaled, x));
  out.rigorous = s.rigorous();
  return out;
}

struct YosidaTableRow {
  int n = 0;
  double certificate = 0.0;
  double true_error = 0.0;
};

/// Per index: certificate t ||A_n x - A x|| and the observed ||T_n(t)x - T(t)x||
/// against the exponential series of the generator itself.
inline std::vector<YosidaTableRow> yosida_convergence_table(const YosidaScheme& s, double t, const Element& x,
                                                            const SeriesOptions& opt = {}) {
  Element reference = exp_series(s.rescaled, t, x, opt);
  const double growth = std::exp(s.shift * t);
  reference *= growth;
  std::vector<YosidaTableRow> rows;
  const Element ax = apply(s.rescaled, x);
  for (int n : s.indices) {
    const Element tn = yosida_semigroup(s, n, t, x, opt);
    rows.push_back({n, growth * t * sup_norm(apply(s.approximant(n), x) - ax),
                    sup_norm(tn - reference)});
  }
  return rows;
}

struct EquicontinuityReport {
  /// sup_n sup_{k <= n} ||(n R(n))^k|| for the rescaled generator.
  double resolvent_bound = 0.0;
  /// sup over indices, grid times and samples of ||exp(t A_n) x|| / ||x|| (rescaled approximants).
  double sup_ratio = 0.0;
  int argmax_n = 0;
  double argmax_t = 0.0;
  double M = 1.0;
  bool resolvent_bound_ok = false;
  bool pass = false;
};

inline EquicontinuityReport joint_equicontinuity_scan(const YosidaScheme& s, double horizon, int points_per_unit,
                                                      const std::vector<Element>& samples,
                                                      const SeriesOptions& opt = {}) {
  EquicontinuityReport rep;
  rep.M = s.bound.M;
  const std::size_t d = s.generator.dim();
  const double slack = s.bound.M * (1.0 + 1e-9);

  for (int n : s.indices) {
    const LuFactorization lu(Operator::identity(d) * static_cast<double>(n) - s.rescaled);
    // Columns of (n R(n))^k, advanced one solve at a time.
    std::vector<Element> cols;
    for (std::size_t j = 0; j < d; ++j) cols.push_back(Element::basis(d, j));
    for (int k = 1; k <= n; ++k) {
      for (auto& c : cols) c = static_cast<double>(n) * lu.solve(c);
      double norm = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < d; ++j) row += std::abs(cols[j][i]);
        norm = std::max(norm, row);
      }
      rep.resolvent_bound = std::max(rep.resolvent_bound, norm);
    }
  }
  rep.resolvent_bound_ok = rep.resolvent_bound <= slack;

  const int steps = std::max(1, static_cast<int>(std::ceil(horizon * points_per_unit)));
  const double dt = horizon / steps;
  for (int n : s.indices) {
    const Operator& an = s.approximant(n);
    for (const Element& x0 : samples) {
      const double xn = sup_norm(x0);
      if (xn == 0.0) continue;
      Element x = x0;
      for (int j = 0; j <= steps; ++j) {
        const double ratio = sup_norm(x) / xn;
        if (ratio > rep.sup_ratio) {
          rep.sup_ratio = ratio;
          rep.argmax_n = n;
          rep.argmax_t = j * dt;
        }
        if (j < steps) x = exp_series(an, dt, x, opt);
      }
    }
  }
  rep.pass = rep.resolvent_bound_ok && rep.sup_ratio <= slack;
  return rep;
}

inline void to_json(nlohmann::json& j, const YosidaLimit& r) {
  j = nlohmann::json{{"value", r.value},       {"n", r.n},
                     {"m", r.m},               {"certificate", r.certificate},
                     {"limit_gap", r.limit_gap}, {"rigorous", r.rigorous}};
}
inline void to_json(nlohmann::json& j, const EquicontinuityReport& r) {
  j = nlohmann::json{{"resolvent_bound", r.resolvent_bound},
                     {"sup_ratio", r.sup_ratio},
                     {"argmax", {{"n", r.argmax_n}, {"t", r.argmax_t}}},
                     {"M", r.M},
                     {"resolvent_bound_ok", r.resolvent_bound_ok},
                     {"pass", r.pass}};
}

}  // namespace sglab
