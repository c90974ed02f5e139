#pragma once

// Weighted-sup seminorms p(f) = max_m a_m max_{i in K_m} |f_i| over index
// sets of a finite grid, and truncated countable convex combinations of them.

#include <algorithm>
#include <cmath>
#include <vector>

#include "core.hpp"
#include "prob.hpp"
#include "report.hpp"

namespace sglab {

class SeminormSpec {
 public:
  SeminormSpec() = default;

  /// Weights must be positive and nonincreasing; sets nonempty and inside
  /// {0, ..., dim - 1}.
  SeminormSpec(std::size_t dim, std::vector<double> weights, std::vector<std::vector<std::size_t>> sets)
      : dim_(dim), weights_(std::move(weights)), sets_(std::move(sets)) {
    if (dim_ == 0) throw DomainError("SeminormSpec: dim must be >= 1");
    if (weights_.empty() || weights_.size() != sets_.size())
      throw DomainError("SeminormSpec: need one weight per set and at least one set");
    for (std::size_t m = 0; m < weights_.size(); ++m) {
      if (!(weights_[m] > 0.0) || !std::isfinite(weights_[m])) throw DomainError("SeminormSpec: weights must be > 0");
      if (m > 0 && weights_[m] > weights_[m - 1]) throw DomainError("SeminormSpec: weights must be nonincreasing");
      if (sets_[m].empty()) throw DomainError("SeminormSpec: empty index set");
      for (std::size_t i : sets_[m])
        if (i >= dim_) throw RangeError("SeminormSpec: index " + std::to_string(i) + " out of range");
    }
  }

  /// a * sup over all indices.
  static SeminormSpec scaled_sup(std::size_t dim, double weight = 1.0) {
    std::vector<std::size_t> all(dim);
    for (std::size_t i = 0; i < dim; ++i) all[i] = i;
    return SeminormSpec(dim, {weight}, {all});
  }

  std::size_t dim() const noexcept { return dim_; }
  const std::vector<double>& weights() const noexcept { return weights_; }
  const std::vector<std::vector<std::size_t>>& sets() const noexcept { return sets_; }
  double max_weight() const { return weights_.front(); }

 private:
  std::size_t dim_ = 0;
  std::vector<double> weights_;
  std::vector<std::vector<std::size_t>> sets_;
};

inline double eval_seminorm(const SeminormSpec& spec, const Element& f) {
  if (f.dim() != spec.dim()) throw DimensionMismatch("eval_seminorm: element has wrong dimension");
  double p = 0.0;
  for (std::size_t m = 0; m < spec.sets().size(); ++m) {
    double s = 0.0;
    for (std::size_t i : spec.sets()[m]) s = std::max(s, std::abs(f[i]));
    p = std::max(p, spec.weights()[m] * s);
  }
  return p;
}

inline bool in_N(const SeminormSpec& spec) { return spec.max_weight() <= 1.0; }

inline constexpr double kConvexWeightTolerance = 1e-12;

struct ConvexTerm {
  double weight = 0.0;
  SeminormSpec spec;
};

/// Finite part of a countable convex combination; the missing mass is kept
/// in tail_mass so that sum(weights) + tail_mass = 1.
class ConvexCombo {
 public:
  ConvexCombo() = default;
  ConvexCombo(std::vector<ConvexTerm> terms, double tail_mass) : terms_(std::move(terms)), tail_mass_(tail_mass) {
    if (terms_.empty()) throw DomainError("ConvexCombo: needs at least one term");
    if (!(tail_mass_ >= 0.0)) throw DomainError("ConvexCombo: tail_mass must be >= 0");
    double total = tail_mass_;
    for (const auto& t : terms_) {
      if (!(t.weight > 0.0 && t.weight <= 1.0)) throw DomainError("ConvexCombo: weights must lie in (0, 1]");
      if (!in_N(t.spec)) throw DomainError("ConvexCombo: every term must have max weight <= 1");
      if (t.spec.dim() != terms_.front().spec.dim()) throw DimensionMismatch("ConvexCombo: terms differ in dim");
      total += t.weight;
    }
    if (std::abs(total - 1.0) > kConvexWeightTolerance)
      throw DomainError("ConvexCombo: weights plus tail_mass must sum to 1");
  }

  const std::vector<ConvexTerm>& terms() const noexcept { return terms_; }
  double tail_mass() const noexcept { return tail_mass_; }
  std::size_t dim() const { return terms_.front().spec.dim(); }

 private:
  std::vector<ConvexTerm> terms_;
  double tail_mass_ = 0.0;
};

/// sum_k alpha_k p_k(f). The untruncated value lies within tail_mass * ||f||.
inline double combine(const ConvexCombo& combo, const Element& f) {
  double s = 0.0;
  for (const auto& t : combo.terms()) s += t.weight * eval_seminorm(t.spec, f);
  return s;
}

/// Largest observed p(f) / ||f|| over the samples (zero samples skipped)
/// against 1; passes iff the spec is in N and no sample exceeds 1.
inline CheckReport dominated_by_norm_check(const SeminormSpec& spec, const std::vector<Element>& samples) {
  CheckReport rep{"dominated_by_norm"};
  rep.rhs = 1.0;
  std::size_t violations = 0;
  for (const Element& f : samples) {
    const double n = sup_norm(f);
    const double p = eval_seminorm(spec, f);
    if (p > n) ++violations;
    if (n > 0.0) rep.lhs = std::max(rep.lhs, p / n);
  }
  rep.pass = in_N(spec) && violations == 0;
  rep.grid = nlohmann::json{{"samples", samples.size()}};
  rep.detail = nlohmann::json{{"in_N", in_N(spec)}, {"violations", violations}};
  return rep;
}

inline CheckReport dominated_by_norm_check(const ConvexCombo& combo, const std::vector<Element>& samples) {
  CheckReport rep{"convex_combination_dominated_by_norm"};
  rep.rhs = 1.0;
  std::size_t violations = 0;
  for (const Element& f : samples) {
    const double n = sup_norm(f);
    const double p = combine(combo, f);
    if (p > n * (1.0 + 1e-15)) ++violations;
    if (n > 0.0) rep.lhs = std::max(rep.lhs, p / n);
  }
  rep.pass = violations == 0;
  rep.grid = nlohmann::json{{"samples", samples.size()}};
  rep.detail = nlohmann::json{{"violations", violations}, {"terms", combo.terms().size()}};
  return rep;
}

inline constexpr double kMixtureTailCutoff = 1e-10;

/// E[q_{ceil(Z)}]: weight P[ceil(Z) = k] on seq[k] for k up to the first
/// index where P[ceil(Z) > k] <= 1e-10. Zero-weight cells are dropped.
inline ConvexCombo mixture_seminorm(const Distribution& dist, const std::vector<SeminormSpec>& seq) {
  const std::vector<double> cells = ceil_cells(dist, kMixtureTailCutoff);
  const double tail_mass = tail(dist, static_cast<double>(cells.size() - 1));
  if (seq.size() < cells.size())
    throw DomainError("mixture_seminorm: sequence has " + std::to_string(seq.size()) + " terms, need " +
                      std::to_string(cells.size()));
  std::vector<ConvexTerm> terms;
  for (std::size_t k = 0; k < cells.size(); ++k)
    if (cells[k] > 0.0) terms.push_back({cells[k], seq[k]});
  return ConvexCombo(std::move(terms), tail_mass);
}

struct StrictConvergence {
  bool bounded = false;
  bool converges = false;
  double sup_norm = 0.0;
  /// max_{i in K} |f_last - f|_i for each declared set K
  std::vector<double> final_errors;
  bool verdict = false;
};

/// Bounded-uniform-on-compacts criterion: sup_n ||f_n|| <= norm_bound and,
/// on each set of the family, the last term is within tol of the limit.
inline StrictConvergence strict_converges(const std::vector<Element>& seq, const Element& limit,
                                          const std::vector<std::vector<std::size_t>>& family, double norm_bound,
                                          double tol) {
  if (seq.empty()) throw DomainError("strict_converges: empty sequence");
  StrictConvergence out;
  for (const Element& f : seq) {
    if (f.dim() != limit.dim()) throw DimensionMismatch("strict_converges: dimension mismatch");
    out.sup_norm = std::max(out.sup_norm, sup_norm(f));
  }
  out.bounded = out.sup_norm <= norm_bound;
  out.converges = true;
  for (const auto& k : family) {
    double e = 0.0;
    for (std::size_t i : k) {
      if (i >= limit.dim()) throw RangeError("strict_converges: index out of range");
      e = std::max(e, std::abs(seq.back()[i] - limit[i]));
    }
    out.final_errors.push_back(e);
    out.converges = out.converges && e <= tol;
  }
  out.verdict = out.bounded && out.converges;
  return out;
}

inline void to_json(nlohmann::json& j, const SeminormSpec& s) {
  j = nlohmann::json{{"dim", s.dim()}, {"weights", s.weights()}, {"sets", s.sets()}};
}

/// "dim" is optional on input; it defaults to one past the largest index.
inline void from_json(const nlohmann::json& j, SeminormSpec& s) {
  const auto weights = j.at("weights").get<std::vector<double>>();
  const auto sets = j.at("sets").get<std::vector<std::vector<std::size_t>>>();
  std::size_t dim = 0;
  if (j.contains("dim")) {
    dim = j.at("dim").get<std::size_t>();
  } else {
    for (const auto& k : sets)
      for (std::size_t i : k) dim = std::max(dim, i + 1);
  }
  s = SeminormSpec(dim, weights, sets);
}

inline void to_json(nlohmann::json& j, const ConvexCombo& c) {
  auto terms = nlohmann::json::array();
  for (const auto& t : c.terms()) terms.push_back({{"weight", t.weight}, {"spec", t.spec}});
  j = nlohmann::json{{"terms", terms}, {"tail_mass", c.tail_mass()}};
}

inline void from_json(const nlohmann::json& j, ConvexCombo& c) {
  std::vector<ConvexTerm> terms;
  for (const auto& t : j.at("terms")) terms.push_back({t.at("weight").get<double>(), t.at("spec").get<SeminormSpec>()});
  c = ConvexCombo(std::move(terms), j.value("tail_mass", 0.0));
}

inline void to_json(nlohmann::json& j, const StrictConvergence& s) {
  j = nlohmann::json{{"bounded", s.bounded},
                     {"converges", s.converges},
                     {"sup_norm", s.sup_norm},
                     {"final_errors", s.final_errors},
                     {"verdict", s.verdict}};
}

}  // namespace sglab
