#pragma once

// The resolvent R(lambda) = (lambda - A)^{-1}: as a Laplace-transform
// quadrature of the semigroup and as a direct solve, plus the power bounds of
// the generation theorem and the equivalent-norm estimate.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "core.hpp"
#include "exponential.hpp"
#include "semigroup.hpp"

namespace sglab {

namespace detail {

struct GaussRule {
  std::vector<double> nodes;    // on [-1, 1]
  std::vector<double> weights;
};

inline GaussRule gauss_legendre(int m) {
  GaussRule g{std::vector<double>(static_cast<std::size_t>(m)), std::vector<double>(static_cast<std::size_t>(m))};
  for (int i = 0; i < m; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (m + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= m; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
      }
      dp = m * (z * p0 - p1) / (z * z - 1.0);
      const double dz = p0 / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    g.nodes[static_cast<std::size_t>(i)] = -z;
    g.weights[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
  }
  return g;
}

inline LuFactorization factor_shifted(const Operator& a, double lambda, const char* who) {
  try {
    return LuFactorization(Operator::identity(a.dim()) * lambda - a);
  } catch (const SingularOperator& e) {
    throw SingularOperator(std::string(who) + ": lambda = " + std::to_string(lambda) + " lies in the spectrum",
                           e.pivot());
  }
}

}  // namespace detail

struct QuadratureSettings {
  int panels_per_unit = 4;
  int nodes_per_panel = 10;
  /// Absolute target, relative to 1 + ||x||.
  double tolerance = 1e-12;
};

struct ResolventQuadrature {
  Element value;
  double t_max = 0.0;
  int panels = 0;
  /// M ||x|| e^{-(lambda - omega) t_max} / (lambda - omega)
  double tail_bound = 0.0;
};

/// R(lambda)x = int_0^inf e^{-lambda t} T(t)x dt, truncated where the tail
/// bound from the type (M, omega) drops below half the tolerance.
inline ResolventQuadrature resolvent_quadrature(const SemigroupHandle& h, double lambda, const Element& x,
                                                const TypeBound& bound, const QuadratureSettings& qs = {}) {
  if (!(lambda > bound.omega))
    throw DomainError("resolvent_quadrature: lambda = " + std::to_string(lambda) +
                      " is not above the certified omega = " + std::to_string(bound.omega));
  const double gap = lambda - bound.omega;
  const double xnorm = sup_norm(x);
  const double target = 0.5 * qs.tolerance * (1.0 + xnorm);
  ResolventQuadrature out;
  out.value = Element(x.dim());
  if (xnorm == 0.0) return out;

  const double t_needed = std::max(0.0, std::log(bound.M * xnorm / (gap * target)) / gap);
  out.panels = std::max(1, static_cast<int>(std::ceil(t_needed * qs.panels_per_unit)));
  out.t_max = static_cast<double>(out.panels) / qs.panels_per_unit;
  out.tail_bound = bound.M * xnorm * std::exp(-gap * out.t_max) / gap;

  const detail::GaussRule rule = detail::gauss_legendre(qs.nodes_per_panel);
  const double width = 1.0 / qs.panels_per_unit;
  Element y = x;  // T(t_prev) x
  double t_prev = 0.0;
  for (int p = 0; p < out.panels; ++p) {
    const double left = p * width;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
      const double t = left + 0.5 * width * (rule.nodes[k] + 1.0);
      y = h.apply(t - t_prev, y);
      t_prev = t;
      out.value.axpy(0.5 * width * rule.weights[k] * std::exp(-lambda * t), y);
    }
  }
  return out;
}

inline Element resolvent_solve(const Operator& a, double lambda, const Element& x) {
  return detail::factor_shifted(a, lambda, "resolvent_solve").solve(x);
}

/// (n lambda' R(n lambda))^n x by n successive solves against one factorization.
inline Element resolvent_power(const Operator& a, double lambda, int n, const Element& x, double lambda_prime) {
  if (n < 1) throw DomainError("resolvent_power: n must be >= 1");
  const LuFactorization lu = detail::factor_shifted(a, n * lambda, "resolvent_power (step 1)");
  Element y = x;
  for (int k = 0; k < n; ++k) y = (n * lambda_prime) * lu.solve(y);
  return y;
}

inline Element resolvent_power(const Operator& a, double lambda, int n, const Element& x) {
  return resolvent_power(a, lambda, n, x, lambda);
}

struct HilleYosidaReport {
  /// Largest ||(n (lambda - omega) R(n lambda))^n x|| / ||x|| over the samples.
  double worst_ratio = 0.0;
  int argmax_n = 0;
  double argmax_lambda = 0.0;
  int argmax_sample = -1;
  /// Largest induced norm of (n (lambda - omega) R(n lambda))^n.
  double worst_operator_norm = 0.0;
  int argmax_norm_n = 0;
  double argmax_norm_lambda = 0.0;
  double M = 1.0;
  double omega = 0.0;
  bool pass = false;
};

/// Resolvent-power condition of the generation theorem in sup-norm form:
/// ||(n (lambda - omega) R(n lambda))^n|| <= M for n <= n_max, lambda in the grid.
inline HilleYosidaReport hille_yosida_check(const Operator& a, double M, double omega, int n_max,
                                            const std::vector<double>& lambda_grid,
                                            const std::vector<Element>& samples, double rel_tol = 1e-9) {
  if (n_max < 1 || n_max > 64) throw DomainError("hille_yosida_check: n_max must be in [1, 64]");
  HilleYosidaReport rep;
  rep.M = M;
  rep.omega = omega;
  const std::size_t d = a.dim();
  for (double lambda : lambda_grid) {
    if (!(lambda > omega)) throw DomainError("hille_yosida_check: lambda grid must lie above omega");
    for (int n = 1; n <= n_max; ++n) {
      LuFactorization lu = [&] {
        try {
          return LuFactorization(Operator::identity(d) * (n * lambda) - a);
        } catch (const SingularOperator& e) {
          throw SingularOperator("hille_yosida_check: n lambda = " + std::to_string(n * lambda) +
                                     " lies in the spectrum (n = " + std::to_string(n) +
                                     ", lambda = " + std::to_string(lambda) + ")",
                                 e.pivot());
        }
      }();
      const double scale = n * (lambda - omega);
      std::vector<Element> cols;
      for (std::size_t j = 0; j < d; ++j) cols.push_back(Element::basis(d, j));
      std::vector<Element> ys = samples;
      for (int k = 0; k < n; ++k) {
        for (auto& c : cols) c = scale * lu.solve(c);
        for (auto& y : ys) y = scale * lu.solve(y);
      }
      double norm = 0.0;
      for (std::size_t i = 0; i < d; ++i) {
        double row = 0.0;
        for (std::size_t j = 0; j < d; ++j) row += std::abs(cols[j][i]);
        norm = std::max(norm, row);
      }
      if (norm > rep.worst_operator_norm) {
        rep.worst_operator_norm = norm;
        rep.argmax_norm_n = n;
        rep.argmax_norm_lambda = lambda;
      }
      for (std::size_t s = 0; s < samples.size(); ++s) {
        const double xn = sup_norm(samples[s]);
        if (xn == 0.0) continue;
        const double ratio = sup_norm(ys[s]) / xn;
        if (ratio > rep.worst_ratio) {
          rep.worst_ratio = ratio;
          rep.argmax_n = n;
          rep.argmax_lambda = lambda;
          rep.argmax_sample = static_cast<int>(s);
        }
      }
    }
  }
  const double limit = M * (1.0 + rel_tol);
  rep.pass = rep.worst_operator_norm <= limit && rep.worst_ratio <= limit;
  return rep;
}

struct ResolventConvergenceRow {
  double lambda = 0.0;
  /// max over samples of ||lambda R(lambda) x - x||
  double error_x = 0.0;
  /// max over samples of ||lambda R(lambda) A x - A x||
  double error_ax = 0.0;
};

struct ResolventConvergenceReport {
  std::vector<ResolventConvergenceRow> rows;
  bool monotone = false;
  bool pass = false;
};

/// lambda R(lambda) x -> x and lambda R(lambda) A x -> A x along an
/// increasing lambda sequence. Passes iff both columns are nonincreasing and
/// the final errors are within tol times max ||Ax|| and max ||A^2 x||.
inline ResolventConvergenceReport resolvent_convergence_check(const Operator& a, const std::vector<double>& lambdas,
                                                              const std::vector<Element>& samples,
                                                              double tol = 1e-2) {
  ResolventConvergenceReport rep;
  double ax_norm = 0.0, a2x_norm = 0.0;
  for (const Element& x : samples) {
    const Element ax = apply(a, x);
    ax_norm = std::max(ax_norm, sup_norm(ax));
    a2x_norm = std::max(a2x_norm, sup_norm(apply(a, ax)));
  }
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    const double lambda = lambdas[i];
    if (i > 0 && !(lambda > lambdas[i - 1])) throw DomainError("resolvent_convergence_check: lambdas must increase");
    const LuFactorization lu = detail::factor_shifted(a, lambda, "resolvent_convergence_check");
    ResolventConvergenceRow row{lambda};
    for (const Element& x : samples) {
      const Element ax = apply(a, x);
      row.error_x = std::max(row.error_x, sup_norm(lambda * lu.solve(x) - x));
      row.error_ax = std::max(row.error_ax, sup_norm(lambda * lu.solve(ax) - ax));
    }
    rep.rows.push_back(row);
  }
  constexpr double slack = 1e-14;
  rep.monotone = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    if (rep.rows[i].error_x > rep.rows[i - 1].error_x + slack ||
        rep.rows[i].error_ax > rep.rows[i - 1].error_ax + slack)
      rep.monotone = false;
  }
  constexpr double floor = 1e-12;
  rep.pass = rep.monotone && !rep.rows.empty() && rep.rows.back().error_x <= tol * ax_norm + floor &&
             rep.rows.back().error_ax <= tol * a2x_norm + floor;
  return rep;
}

/// Grid supremum of ||mu^n R(mu)^n x|| over mu in the grid and 0 <= n <= n_max:
/// a lower estimate of the equivalent norm under which the resolvents contract.
inline double renorm_estimate(const Operator& a, const std::vector<double>& mu_grid, int n_max, const Element& x) {
  if (n_max < 0) throw DomainError("renorm_estimate: n_max must be >= 0");
  double best = sup_norm(x);
  for (double mu : mu_grid) {
    if (!(mu > 0.0)) throw DomainError("renorm_estimate: mu must be > 0");
    const LuFactorization lu = detail::factor_shifted(a, mu, "renorm_estimate");
    Element y = x;
    for (int n = 1; n <= n_max; ++n) {
      y = mu * lu.solve(y);
      best = std::max(best, sup_norm(y));
    }
  }
  return best;
}

enum class ResolventMethod { quadrature, direct_solve };

/// R(lambda) for one generator by either route. The quadrature route uses
/// the given type bound, or the certified (1, log_norm) bound when none is
/// given; lambda must lie above its omega.
class ResolventHandle {
 public:
  ResolventHandle(Operator generator, ResolventMethod method, std::optional<TypeBound> bound = std::nullopt,
                  QuadratureSettings settings = {})
      : semigroup_(std::move(generator)),
        method_(method),
        bound_(bound ? *bound : certified_type_bound(semigroup_.generator())),
        settings_(settings) {}

  ResolventMethod method() const noexcept { return method_; }
  const TypeBound& bound() const noexcept { return bound_; }
  const QuadratureSettings& settings() const noexcept { return settings_; }

  Element apply(double lambda, const Element& x) const {
    if (method_ == ResolventMethod::direct_solve) return resolvent_solve(semigroup_.generator(), lambda, x);
    return resolvent_quadrature(semigroup_, lambda, x, bound_, settings_).value;
  }

 private:
  SemigroupHandle semigroup_;
  ResolventMethod method_;
  TypeBound bound_;
  QuadratureSettings settings_;
};

inline void to_json(nlohmann::json& j, const HilleYosidaReport& r) {
  j = nlohmann::json{
      {"worst_ratio", r.worst_ratio},
      {"argmax", {{"n", r.argmax_n}, {"lambda", r.argmax_lambda}, {"sample", r.argmax_sample}}},
      {"worst_operator_norm", r.worst_operator_norm},
      {"argmax_operator_norm", {{"n", r.argmax_norm_n}, {"lambda", r.argmax_norm_lambda}}},
      {"M", r.M},
      {"omega", r.omega},
      {"pass", r.pass}};
}

inline void to_json(nlohmann::json& j, const ResolventConvergenceReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"lambda", row.lambda}, {"error_x", row.error_x}, {"error_ax", row.error_ax}});
  j = nlohmann::json{{"rows", rows}, {"monotone", r.monotone}, {"pass", r.pass}};
}

}  // namespace sglab
