#pragma once

// Continuous-time Markov chains on finite state spaces: exact jump-chain
// simulation, Monte Carlo transition estimates, martingale-problem residuals,
// compact containment and the generator-extension difference quotients.
//
// Every trajectory k of a batch draws from Philox stream k of the batch seed,
// so estimates do not depend on the number of worker threads.

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

#include "core.hpp"
#include "exponential.hpp"
#include "report.hpp"
#include "rng.hpp"

namespace sglab {

inline constexpr double kRowSumTolerance = 1e-12;

struct QValidation {
  bool valid = true;
  std::vector<std::string> issues;
};

/// Off-diagonal entries nonnegative, rows summing to zero.
inline QValidation validate_q(const Operator& q, double tol = kRowSumTolerance) {
  QValidation v;
  for (std::size_t i = 0; i < q.dim(); ++i) {
    double sum = 0.0, scale = 0.0;
    for (std::size_t j = 0; j < q.dim(); ++j) {
      sum += q(i, j);
      scale = std::max(scale, std::abs(q(i, j)));
      if (i != j && q(i, j) < 0.0)
        v.issues.push_back("negative rate q(" + std::to_string(i) + "," + std::to_string(j) + ")");
    }
    if (std::abs(sum) > tol * std::max(1.0, scale))
      v.issues.push_back("row " + std::to_string(i) + " sums to " + std::to_string(sum));
  }
  v.valid = v.issues.empty();
  return v;
}

inline void require_q(const Operator& q, const char* who) {
  const QValidation v = validate_q(q);
  if (!v.valid) throw DomainError(std::string(who) + ": not a Q-matrix (" + v.issues.front() + ")");
}

/// Rate matrix plus the metric and the states playing the role of infinity.
struct MarkovChain {
  Operator q;
  Operator metric;
  std::vector<std::size_t> boundary;

  std::size_t dim() const { return q.dim(); }
};

/// Discrete metric d(i, j) = 1{i != j}.
inline Operator discrete_metric(std::size_t n) {
  Operator d(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) d(i, j) = i == j ? 0.0 : 1.0;
  return d;
}

/// Right-continuous piecewise-constant path: states[k] is occupied on
/// [times[k], times[k + 1]), the last one until the horizon.
struct Trajectory {
  std::vector<double> times;
  std::vector<std::size_t> states;
  double horizon = 0.0;

  std::size_t jumps() const { return states.size() - 1; }

  std::size_t state_at(double t) const {
    const auto it = std::upper_bound(times.begin(), times.end(), t);
    return states[static_cast<std::size_t>(it - times.begin()) - 1];
  }

  /// int_s^t g(X(u)) du, exact along the path.
  double integral(const Element& g, double s, double t) const {
    double acc = 0.0;
    for (std::size_t k = 0; k < states.size(); ++k) {
      const double a = std::max(s, times[k]);
      const double b = std::min(t, k + 1 < times.size() ? times[k + 1] : horizon);
      if (b > a) acc += (b - a) * g[states[k]];
    }
    return acc;
  }
};

namespace detail {

/// Advances from state x at time t0; stops at the horizon or, if stop is
/// given, right after entering a state where stop returns true.
inline Trajectory simulate_path(const Operator& q, std::size_t x0, double horizon, Philox4x32& rng,
                                const std::function<bool(std::size_t)>& stop = {}) {
  Trajectory tr;
  tr.horizon = horizon;
  tr.times.push_back(0.0);
  tr.states.push_back(x0);
  double t = 0.0;
  std::size_t x = x0;
  while (true) {
    const double rate = -q(x, x);
    if (rate <= 0.0) break;
    t += rng.exponential(rate);
    if (t >= horizon) break;
    double u = rng.uniform() * rate;
    std::size_t next = x;
    for (std::size_t j = 0; j < q.dim(); ++j) {
      if (j == x || q(x, j) <= 0.0) continue;
      next = j;
      u -= q(x, j);
      if (u < 0.0) break;
    }
    x = next;
    tr.times.push_back(t);
    tr.states.push_back(x);
    if (stop && stop(x)) break;
  }
  return tr;
}

/// Runs body(k) for k in [0, count) over the given number of threads.
inline void for_each_index(std::size_t count, unsigned workers, const std::function<void(std::size_t)>& body) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  if (workers == 1) {
    for (std::size_t k = 0; k < count; ++k) body(k);
    return;
  }
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      for (std::size_t k = w; k < count; k += workers) body(k);
    });
  for (auto& th : pool) th.join();
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

/// Sample mean and standard error, reduced in index order. Identical values
/// give an SE of exactly zero.
inline MeanSe mean_se(const std::vector<double>& v) {
  MeanSe out;
  if (v.empty()) return out;
  const bool constant = std::all_of(v.begin(), v.end(), [&](double x) { return x == v.front(); });
  if (constant) {
    out.mean = v.front();
    return out;
  }
  double s = 0.0;
  for (double x : v) s += x;
  out.mean = s / static_cast<double>(v.size());
  if (v.size() < 2) return out;
  double ss = 0.0;
  for (double x : v) ss += (x - out.mean) * (x - out.mean);
  out.se = std::sqrt(ss / static_cast<double>(v.size() - 1) / static_cast<double>(v.size()));
  return out;
}

}  // namespace detail

/// Exact jump-chain path on [0, T]: holding time Exponential(-q_xx), jump
/// to j with probability q_xj / -q_xx.
inline Trajectory simulate(const Operator& q, std::size_t x0, double horizon, std::uint64_t seed,
                           std::uint64_t stream = 0) {
  require_q(q, "simulate");
  if (x0 >= q.dim()) throw RangeError("simulate: initial state out of range");
  if (!(horizon >= 0.0)) throw DomainError("simulate: horizon must be >= 0");
  Philox4x32 rng(seed, stream);
  return detail::simulate_path(q, x0, horizon, rng);
}

struct MonteCarloEstimate {
  double estimate = 0.0;
  double standard_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

/// Monte Carlo estimate of S(t)f(x0) = E_x0[f(X(t))].
inline MonteCarloEstimate transition_mc(const Operator& q, double t, const Element& f, std::size_t x0, std::size_t n,
                                        std::uint64_t seed, unsigned workers = 1) {
  require_q(q, "transition_mc");
  if (f.dim() != q.dim()) throw DimensionMismatch("transition_mc: f has wrong dimension");
  if (x0 >= q.dim()) throw RangeError("transition_mc: initial state out of range");
  if (n < 100) throw DomainError("transition_mc: needs at least 100 samples");
  std::vector<double> values(n);
  detail::for_each_index(n, workers, [&](std::size_t k) {
    Philox4x32 rng(seed, k);
    const Trajectory tr = detail::simulate_path(q, x0, t, rng);
    values[k] = f[tr.states.back()];
  });
  const auto ms = detail::mean_se(values);
  return {ms.mean, ms.se, n, seed};
}

inline constexpr double kMartingaleZ = 3.0;
inline constexpr double kMartingaleFloor = 1e-12;
inline constexpr std::size_t kMinConditionalSamples = 30;

enum class Verdict { pass, fail, inconclusive };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "inconclusive";
  }
}

struct MartingaleRow {
  double s = 0.0;
  double t = 0.0;
  std::size_t state = 0;
  double mean = 0.0;
  double standard_error = 0.0;
  std::size_t count = 0;
  /// |mean| / SE, zero when both vanish
  double z = 0.0;
  Verdict verdict = Verdict::inconclusive;
};

struct MartingaleReport {
  std::vector<MartingaleRow> rows;
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  double max_z = 0.0;
  std::size_t failures = 0;
  std::size_t inconclusive = 0;
  bool pass = false;
};

/// Residuals f(X(t)) - f(X(s)) - int_s^t Af(X(u)) du under the chain with
/// rates q, grouped by the exact state X(s) = y. A group passes when
/// |mean| <= 3 SE or |mean| <= 1e-12; groups with fewer than 30 paths are
/// inconclusive. The report passes iff no group fails.
inline MartingaleReport martingale_check(const Operator& q, const Element& f, const Element& af_claimed,
                                         const std::vector<std::pair<double, double>>& pairs, std::size_t x0,
                                         std::size_t n, std::uint64_t seed, unsigned workers = 1) {
  require_q(q, "martingale_check");
  if (f.dim() != q.dim() || af_claimed.dim() != q.dim())
    throw DimensionMismatch("martingale_check: f and Af must match the chain");
  if (x0 >= q.dim()) throw RangeError("martingale_check: initial state out of range");
  double horizon = 0.0;
  for (const auto& [s, t] : pairs) {
    if (!(s >= 0.0 && s < t)) throw DomainError("martingale_check: need 0 <= s < t");
    horizon = std::max(horizon, t);
  }
  std::vector<Trajectory> paths(n);
  detail::for_each_index(n, workers, [&](std::size_t k) {
    Philox4x32 rng(seed, k);
    paths[k] = detail::simulate_path(q, x0, horizon, rng);
  });

  MartingaleReport rep;
  rep.seed = seed;
  rep.samples = n;
  for (const auto& [s, t] : pairs) {
    std::map<std::size_t, std::vector<double>> groups;
    for (const Trajectory& tr : paths) {
      const std::size_t y = tr.state_at(s);
      groups[y].push_back(f[tr.state_at(t)] - f[y] - tr.integral(af_claimed, s, t));
    }
    for (const auto& [y, vals] : groups) {
      MartingaleRow row{s, t, y};
      const auto ms = detail::mean_se(vals);
      row.mean = ms.mean;
      row.standard_error = ms.se;
      row.count = vals.size();
      row.z = ms.se > 0.0 ? std::abs(ms.mean) / ms.se : (ms.mean == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
      if (row.count < kMinConditionalSamples) {
        row.verdict = Verdict::inconclusive;
        ++rep.inconclusive;
      } else {
        const bool ok = std::abs(row.mean) <= kMartingaleZ * row.standard_error || std::abs(row.mean) <= kMartingaleFloor;
        row.verdict = ok ? Verdict::pass : Verdict::fail;
        if (!ok) ++rep.failures;
        rep.max_z = std::max(rep.max_z, row.z);
      }
      rep.rows.push_back(row);
    }
  }
  rep.pass = rep.failures == 0;
  return rep;
}

struct ContainmentRow {
  std::size_t state = 0;
  double probability = 0.0;
  double standard_error = 0.0;
};

struct ContainmentReport {
  std::vector<ContainmentRow> rows;
  double min_probability = 1.0;
  double standard_error = 0.0;
  std::size_t argmin = 0;
  std::uint64_t seed = 0;
};

/// min over x in K of the Monte Carlo estimate of P_x[X(s) in Khat for all s <= T].
inline ContainmentReport compact_containment(const Operator& q, const std::vector<std::size_t>& k,
                                             const std::vector<std::size_t>& khat, double horizon, std::size_t n,
                                             std::uint64_t seed, unsigned workers = 1) {
  require_q(q, "compact_containment");
  std::vector<char> inside(q.dim(), 0);
  for (std::size_t i : khat) {
    if (i >= q.dim()) throw RangeError("compact_containment: state out of range");
    inside[i] = 1;
  }
  if (k.empty()) throw DomainError("compact_containment: K is empty");
  for (std::size_t i : k)
    if (i >= q.dim() || !inside[i]) throw DomainError("compact_containment: K must be a subset of Khat");
  ContainmentReport rep;
  rep.seed = seed;
  for (std::size_t x : k) {
    std::vector<double> stayed(n);
    detail::for_each_index(n, workers, [&](std::size_t j) {
      Philox4x32 rng(seed, j);
      const Trajectory tr = detail::simulate_path(q, x, horizon, rng, [&](std::size_t y) { return !inside[y]; });
      stayed[j] = inside[tr.states.back()] ? 1.0 : 0.0;
    });
    const auto ms = detail::mean_se(stayed);
    rep.rows.push_back({x, ms.mean, ms.se});
    if (rep.rows.size() == 1 || ms.mean < rep.min_probability) {
      rep.min_probability = ms.mean;
      rep.standard_error = ms.se;
      rep.argmin = x;
    }
  }
  return rep;
}

/// P_x[X(s) in Khat for all s <= T] from the exponential of q restricted to
/// Khat (mass leaving Khat is killed).
inline std::vector<double> containment_probability_exact(const Operator& q, const std::vector<std::size_t>& khat,
                                                         double horizon) {
  require_q(q, "containment_probability_exact");
  Operator sub(khat.size());
  for (std::size_t a = 0; a < khat.size(); ++a)
    for (std::size_t b = 0; b < khat.size(); ++b) sub(a, b) = q(khat[a], khat[b]);
  return exp_series(sub, horizon, Element(khat.size(), 1.0)).vec();
}

inline Operator transition_matrix(const Operator& q, double t) {
  require_q(q, "transition_matrix");
  return exp_series_matrix(q, t);
}

struct ExtensionRow {
  double t = 0.0;
  double error = 0.0;
  double bound = 0.0;
};

struct ExtensionReport {
  std::vector<ExtensionRow> rows;
  bool monotone = false;
  bool within_bound = false;
  bool pass = false;
};

inline constexpr double kTaylorBoundSlack = 1.01;

/// sup_{x in K} |(S(t)f - f)(x)/t - Qf(x)| along decreasing t, with S(t)
/// from the exponential series. Passes iff the errors do not increase and
/// the last one is within 1.01 (t/2) ||Q^2 f|| e^{t ||Q||}.
inline ExtensionReport generator_extension_check(const Operator& q, const Element& f,
                                                 const std::vector<std::size_t>& k, const std::vector<double>& ts) {
  if (f.dim() != q.dim()) throw DimensionMismatch("generator_extension_check: f has wrong dimension");
  if (ts.empty()) throw DomainError("generator_extension_check: empty time sequence");
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (!(ts[i] > 0.0) || (i > 0 && !(ts[i] < ts[i - 1])))
      throw DomainError("generator_extension_check: times must be positive and decreasing");
  for (std::size_t i : k)
    if (i >= q.dim()) throw RangeError("generator_extension_check: state out of range");
  const Element qf = apply(q, f);
  const double q2f = sup_norm(apply(q, qf));
  const double qn = op_norm(q);
  ExtensionReport rep;
  for (double t : ts) {
    const Element quotient = (1.0 / t) * (exp_series(q, t, f) - f);
    double e = 0.0;
    for (std::size_t i : k) e = std::max(e, std::abs(quotient[i] - qf[i]));
    rep.rows.push_back({t, e, 0.5 * t * q2f * std::exp(t * qn)});
  }
  rep.monotone = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) rep.monotone = rep.monotone && rep.rows[i].error <= rep.rows[i - 1].error;
  rep.within_bound = rep.rows.back().error <= kTaylorBoundSlack * rep.rows.back().bound;
  rep.pass = rep.monotone && rep.within_bound;
  return rep;
}

struct PreservationReport {
  double row_sum_error = 0.0;
  double min_entry = 0.0;
  bool stochastic = false;
  bool boundary_absorbing = false;
  /// max over boundary b and basis f vanishing on the boundary of |S(t)f(b)|
  double boundary_leak = 0.0;
  bool c0_preserved = false;
  bool pass = false;
};

/// Rows of e^{tQ} are probability vectors, and functions vanishing on the
/// boundary still vanish there after S(t).
inline PreservationReport c0_and_probability_preservation(const Operator& q, const std::vector<std::size_t>& boundary,
                                                          double t) {
  const Operator p = transition_matrix(q, t);
  const std::size_t n = q.dim();
  std::vector<char> on_boundary(n, 0);
  for (std::size_t b : boundary) {
    if (b >= n) throw RangeError("c0_and_probability_preservation: state out of range");
    on_boundary[b] = 1;
  }
  PreservationReport rep;
  rep.min_entry = p(0, 0);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      s += p(i, j);
      rep.min_entry = std::min(rep.min_entry, p(i, j));
    }
    rep.row_sum_error = std::max(rep.row_sum_error, std::abs(s - 1.0));
  }
  rep.stochastic = rep.row_sum_error <= 1e-10 && rep.min_entry >= -1e-10;
  rep.boundary_absorbing = true;
  for (std::size_t b : boundary)
    for (std::size_t j = 0; j < n; ++j) rep.boundary_absorbing = rep.boundary_absorbing && q(b, j) == 0.0;
  for (std::size_t b : boundary)
    for (std::size_t j = 0; j < n; ++j)
      if (!on_boundary[j]) rep.boundary_leak = std::max(rep.boundary_leak, std::abs(p(b, j)));
  rep.c0_preserved = rep.boundary_leak <= 1e-12;
  rep.pass = rep.stochastic && rep.c0_preserved;
  return rep;
}

/// Perturbation surrogate for weak continuity of x -> P_x:
/// ||e^{t(Q+E)} - e^{tQ}|| <= t ||E|| e^{t(||Q|| + ||E||)}.
inline CheckReport perturbation_continuity_check(const Operator& q, const Operator& e, double t) {
  CheckReport rep{"transition_perturbation"};
  rep.lhs = op_norm(exp_series_matrix(q + e, t) - exp_series_matrix(q, t));
  rep.rhs = t * op_norm(e) * std::exp(t * (op_norm(q) + op_norm(e)));
  rep.pass = rep.lhs <= rep.rhs * (1.0 + 1e-12) + 1e-14;
  rep.grid = nlohmann::json{{"t", t}};
  return rep;
}

inline void to_json(nlohmann::json& j, const MarkovChain& c) {
  j = nlohmann::json{{"q", operator_to_rows(c.q)}, {"metric", operator_to_rows(c.metric)}, {"boundary", c.boundary}};
}

/// "metric" defaults to the discrete metric and "boundary" to empty.
inline void from_json(const nlohmann::json& j, MarkovChain& c) {
  c.q = operator_from_rows(j.at("q"));
  require_q(c.q, "chain");
  c.metric = j.contains("metric") ? operator_from_rows(j.at("metric")) : discrete_metric(c.q.dim());
  if (c.metric.dim() != c.q.dim()) throw DimensionMismatch("chain: metric and q differ in size");
  c.boundary = j.value("boundary", std::vector<std::size_t>{});
  for (std::size_t b : c.boundary)
    if (b >= c.q.dim()) throw RangeError("chain: boundary state out of range");
}

inline void to_json(nlohmann::json& j, const Trajectory& tr) {
  j = nlohmann::json{{"times", tr.times}, {"states", tr.states}, {"horizon", tr.horizon}};
}

inline void to_json(nlohmann::json& j, const MonteCarloEstimate& m) {
  j = nlohmann::json{
      {"estimate", m.estimate}, {"standard_error", m.standard_error}, {"samples", m.samples}, {"seed", m.seed}};
}

inline void to_json(nlohmann::json& j, const MartingaleReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"s", row.s},
                    {"t", row.t},
                    {"state", row.state},
                    {"mean", row.mean},
                    {"standard_error", row.standard_error},
                    {"count", row.count},
                    {"z", std::isfinite(row.z) ? nlohmann::json(row.z) : nlohmann::json("inf")},
                    {"verdict", to_string(row.verdict)}});
  j = nlohmann::json{{"rows", rows},
                     {"seed", r.seed},
                     {"samples", r.samples},
                     {"max_z", std::isfinite(r.max_z) ? nlohmann::json(r.max_z) : nlohmann::json("inf")},
                     {"failures", r.failures},
                     {"inconclusive", r.inconclusive},
                     {"pass", r.pass}};
}

inline void to_json(nlohmann::json& j, const ContainmentReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows)
    rows.push_back({{"state", row.state}, {"probability", row.probability}, {"standard_error", row.standard_error}});
  j = nlohmann::json{{"rows", rows},
                     {"min_probability", r.min_probability},
                     {"standard_error", r.standard_error},
                     {"argmin", r.argmin},
                     {"seed", r.seed}};
}

inline void to_json(nlohmann::json& j, const ExtensionReport& r) {
  auto rows = nlohmann::json::array();
  for (const auto& row : r.rows) rows.push_back({{"t", row.t}, {"error", row.error}, {"bound", row.bound}});
  j = nlohmann::json{
      {"rows", rows}, {"monotone", r.monotone}, {"within_bound", r.within_bound}, {"pass", r.pass}};
}

inline void to_json(nlohmann::json& j, const PreservationReport& r) {
  j = nlohmann::json{{"row_sum_error", r.row_sum_error},
                     {"min_entry", r.min_entry},
                     {"stochastic", r.stochastic},
                     {"boundary_absorbing", r.boundary_absorbing},
                     {"boundary_leak", r.boundary_leak},
                     {"c0_preserved", r.c0_preserved},
                     {"pass", r.pass}};
}

}  // namespace sglab
