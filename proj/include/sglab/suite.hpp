#pragma once

// Config-driven runner. A TOML (or JSON) file declares a top-level seed, an
// optional default chain or operator, and a list of [[checks]]; every check
// yields one report entry and one CSV table. All parameters are parsed and
// validated before anything is computed, so a bad config never produces
// partial output.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>
#include <toml.hpp>

#include "core.hpp"
#include "exponential.hpp"
#include "markov.hpp"
#include "prob.hpp"
#include "resolvent.hpp"
#include "rng.hpp"
#include "semigroup.hpp"
#include "seminorm.hpp"
#include "yosida.hpp"

namespace sglab {

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Cells are numbers, booleans or strings; column order is fixed per check.
struct SuiteTable {
  std::vector<std::string> columns;
  std::vector<std::vector<nlohmann::json>> rows;
};

struct SuiteRow {
  std::string name;
  std::string check;
  std::string anchor;
  bool stochastic = false;
  bool pass = false;
  std::optional<std::uint64_t> seed;
  nlohmann::json result = nlohmann::json::object();
  SuiteTable table;
};

struct SuiteReport {
  std::vector<SuiteRow> rows;
  std::optional<std::uint64_t> seed;
  bool pass = true;
  int exit_code() const { return pass ? 0 : 1; }
};

struct SuiteOptions {
  /// Replaces the config's top-level seed; per-check seeds still win.
  std::optional<std::uint64_t> seed;
  /// Default tolerance for checks whose config sets none.
  std::optional<double> tol;
  unsigned workers = 1;
};

namespace detail {

inline nlohmann::json toml_to_json(const toml::node& node) {
  if (const auto* t = node.as_table()) {
    auto obj = nlohmann::json::object();
    for (auto&& [k, v] : *t) obj[std::string(k.str())] = toml_to_json(v);
    return obj;
  }
  if (const auto* a = node.as_array()) {
    auto arr = nlohmann::json::array();
    for (const auto& v : *a) arr.push_back(toml_to_json(v));
    return arr;
  }
  if (const auto* v = node.as_integer()) return v->get();
  if (const auto* v = node.as_floating_point()) return v->get();
  if (const auto* v = node.as_boolean()) return v->get();
  if (const auto* v = node.as_string()) return v->get();
  throw ConfigError("unsupported TOML value type (dates and times are not accepted)");
}

inline std::string format_cell(const nlohmann::json& v) {
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::isnan(d)) return "nan";
    if (std::isinf(d)) return d > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
  }
  if (v.is_number_integer() || v.is_number_unsigned()) return v.dump();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_string()) {
    const std::string s = v.get<std::string>();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
      if (c == '"') q += '"';
      q += c;
    }
    return q + "\"";
  }
  if (v.is_null()) return "";
  return v.dump();
}

/// Infinite doubles are not representable in JSON; report them as strings.
inline nlohmann::json finite_or_text(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace detail

/// Parses a .json file as JSON and anything else as TOML.
inline nlohmann::json load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  if (path.extension() == ".json") {
    try {
      return nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(path.string() + ": " + e.what());
    }
  }
  try {
    return detail::toml_to_json(toml::parse(in, path.string()));
  } catch (const toml::parse_error& e) {
    std::ostringstream os;
    os << path.string() << ":" << e.source().begin.line << ": " << e.description();
    throw ConfigError(os.str());
  }
}

inline std::string to_csv(const SuiteTable& t) {
  std::string out;
  for (std::size_t i = 0; i < t.columns.size(); ++i) out += (i ? "," : "") + t.columns[i];
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out += (i ? "," : "") + detail::format_cell(row[i]);
    out += '\n';
  }
  return out;
}

/// Typed access to one check's parameters. Every key must be consumed, so a
/// misspelled parameter is a config error rather than a silent default.
class CheckParams {
 public:
  CheckParams(const nlohmann::json& check, const nlohmann::json& root, std::filesystem::path base,
              const SuiteOptions& opts)
      : check_(check), root_(root), base_(std::move(base)), opts_(opts) {
    used_ = {"type", "name"};
  }

  bool has(const std::string& key) const { return check_.contains(key); }

  double number(const std::string& key, std::optional<double> def = std::nullopt) {
    if (!take(key)) return need(key, def);
    return get<double>(key);
  }
  int integer(const std::string& key, std::optional<int> def = std::nullopt) {
    if (!take(key)) return need(key, def);
    return get<int>(key);
  }
  bool boolean(const std::string& key, bool def) {
    if (!take(key)) return def;
    return get<bool>(key);
  }
  std::string text(const std::string& key, std::optional<std::string> def = std::nullopt) {
    if (!take(key)) return need(key, def);
    return get<std::string>(key);
  }
  std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> def = std::nullopt) {
    if (!take(key)) return need(key, def);
    return get<std::vector<double>>(key);
  }
  std::vector<int> integers(const std::string& key, std::optional<std::vector<int>> def = std::nullopt) {
    if (!take(key)) return need(key, def);
    return get<std::vector<int>>(key);
  }
  std::vector<std::size_t> indices(const std::string& key,
                                   std::optional<std::vector<std::size_t>> def = std::nullopt) {
    if (!take(key)) return need(key, def);
    return get<std::vector<std::size_t>>(key);
  }
  Distribution distribution(const std::string& key) {
    const Distribution d = parse_distribution(text(key));
    validate(d);
    return d;
  }
  const nlohmann::json& raw(const std::string& key) {
    if (!take(key)) throw ConfigError("missing parameter '" + key + "'");
    return check_.at(key);
  }

  /// Check tolerance, else the --tol override, else the check's default.
  double tolerance(double def) {
    if (take("tol")) return get<double>("tol");
    return opts_.tol ? *opts_.tol : def;
  }

  /// Inline "operator" rows, an "operator_file", the check's or the
  /// config's chain generator, or the config's default operator.
  Operator op() {
    if (take("operator")) return operator_from_rows(check_.at("operator"));
    if (take("operator_file")) return operator_from_document(load_relative(get<std::string>("operator_file")));
    if (has("chain") || has("chain_file")) return chain().q;
    if (root_.contains("operator")) return operator_from_rows(root_.at("operator"));
    if (root_.contains("chain")) return root_.at("chain").get<MarkovChain>().q;
    throw ConfigError("no operator: give 'operator', 'operator_file' or a chain");
  }

  MarkovChain chain() {
    if (take("chain")) return check_.at("chain").get<MarkovChain>();
    if (take("chain_file")) {
      const nlohmann::json doc = load_relative(get<std::string>("chain_file"));
      return (doc.contains("chain") ? doc.at("chain") : doc).get<MarkovChain>();
    }
    if (root_.contains("chain")) return root_.at("chain").get<MarkovChain>();
    throw ConfigError("no chain: give 'chain', 'chain_file' or a top-level [chain]");
  }

  Element element(const std::string& key, std::size_t dim, std::optional<Element> def = std::nullopt) {
    Element x = take(key) ? Element(get<std::vector<double>>(key)) : need(key, def);
    if (x.dim() != dim) throw DimensionMismatch("parameter '" + key + "': expected length " + std::to_string(dim));
    return x;
  }

  /// Explicit "samples" rows, or "random_samples" uniform draws on [-1, 1]^d
  /// from Philox stream k of "sample_seed".
  std::vector<Element> samples(std::size_t dim, int default_count = 8) {
    std::vector<Element> out;
    if (take("samples")) {
      for (const auto& v : check_.at("samples")) {
        out.emplace_back(v.get<std::vector<double>>());
        if (out.back().dim() != dim) throw DimensionMismatch("samples: expected length " + std::to_string(dim));
      }
      if (out.empty()) throw ConfigError("samples: empty list");
      return out;
    }
    const int count = integer("random_samples", default_count);
    if (count < 1) throw ConfigError("random_samples must be >= 1");
    const auto seed = static_cast<std::uint64_t>(integer("sample_seed", 1));
    for (int k = 0; k < count; ++k) {
      Philox4x32 rng(seed, static_cast<std::uint64_t>(k));
      Element x(dim);
      for (std::size_t i = 0; i < dim; ++i) x[i] = 2.0 * rng.uniform() - 1.0;
      out.push_back(std::move(x));
    }
    return out;
  }

  /// Check seed, else --seed, else the top-level seed.
  std::uint64_t seed() {
    if (take("seed")) return get<std::uint64_t>("seed");
    if (opts_.seed) return *opts_.seed;
    if (root_.contains("seed")) return root_.at("seed").get<std::uint64_t>();
    throw ConfigError("stochastic check needs a seed (per check, top-level, or --seed)");
  }

  unsigned workers() { return static_cast<unsigned>(integer("workers", static_cast<int>(opts_.workers))); }

  void require_all_used() const {
    for (const auto& [k, v] : check_.items())
      if (!used_.count(k)) throw ConfigError("unknown parameter '" + k + "'");
  }

 private:
  bool take(const std::string& key) {
    if (!check_.contains(key)) return false;
    used_.insert(key);
    return true;
  }
  template <class T>
  T get(const std::string& key) const {
    try {
      return check_.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw ConfigError("parameter '" + key + "' has the wrong type");
    }
  }
  template <class T>
  static T need(const std::string& key, const std::optional<T>& def) {
    if (!def) throw ConfigError("missing parameter '" + key + "'");
    return *def;
  }
  nlohmann::json load_relative(const std::string& file) const { return load_config(base_ / file); }
  static Operator operator_from_document(const nlohmann::json& doc) {
    if (doc.is_array()) return operator_from_rows(doc);
    if (doc.contains("operator")) return operator_from_rows(doc.at("operator"));
    if (doc.contains("q")) return operator_from_rows(doc.at("q"));
    if (doc.contains("entries")) return doc.get<Operator>();
    throw ConfigError("operator file: expected rows, 'operator', 'q' or 'entries'");
  }

  const nlohmann::json& check_;
  const nlohmann::json& root_;
  std::filesystem::path base_;
  const SuiteOptions& opts_;
  std::set<std::string> used_;
};

struct CheckOutcome {
  bool pass = false;
  nlohmann::json result = nlohmann::json::object();
  SuiteTable table;
};

using PreparedCheck = std::function<CheckOutcome()>;

struct CheckType {
  std::string anchor;
  bool stochastic = false;
  std::function<PreparedCheck(CheckParams&, std::optional<std::uint64_t>& seed)> prepare;
};

namespace detail {

inline Element alternating(std::size_t dim) {
  Element x(dim);
  for (std::size_t i = 0; i < dim; ++i) x[i] = i % 2 ? -1.0 : 1.0;
  return x;
}

inline Element state_values(std::size_t dim) {
  Element x(dim);
  for (std::size_t i = 0; i < dim; ++i) x[i] = static_cast<double>(i);
  return x;
}

inline std::vector<std::size_t> all_states(std::size_t dim) {
  std::vector<std::size_t> k(dim);
  for (std::size_t i = 0; i < dim; ++i) k[i] = i;
  return k;
}

inline std::vector<int> one_to(int n) {
  std::vector<int> v;
  for (int i = 1; i <= n; ++i) v.push_back(i);
  return v;
}

inline bool mc_agrees(double estimate, double se, double exact) {
  const double diff = std::abs(estimate - exact);
  return diff <= kMartingaleZ * se || diff <= kMartingaleFloor;
}

// Deterministic analytic checks.

inline PreparedCheck prepare_semigroup_law(CheckParams& p, std::optional<std::uint64_t>&) {
  SemigroupHandle h(p.op());
  const double t = p.number("t", 1.0), s = p.number("s", 0.5);
  if (!(t >= 0.0 && s >= 0.0)) throw DomainError("t and s must be >= 0");
  auto xs = p.samples(h.dim());
  const double tol = p.tolerance(1e-10);
  return [=] {
    const CheckReport r = semigroup_law_check(h, t, s, xs, tol);
    return CheckOutcome{r.pass, r, {{"t", "s", "deviation", "tol"}, {{t, s, r.lhs, tol}}}};
  };
}

inline PreparedCheck prepare_averaging_bound(CheckParams& p, std::optional<std::uint64_t>&) {
  SemigroupHandle h(p.op());
  const auto rs = p.numbers("r", std::vector<double>{1.0});
  const auto hs = p.numbers("h", std::vector<double>{0.1, 0.25, 0.5});
  for (double r : rs)
    for (double hh : hs)
      if (!(hh > 0.0 && hh < r)) throw DomainError("averaging_bound: need 0 < h < r for every pair");
  const int levels = p.integer("levels", 12);
  auto xs = p.samples(h.dim(), 4);
  return [=] {
    CheckOutcome out{true, nlohmann::json::array(), {{"r", "h", "sample", "lhs", "rhs"}, {}}};
    for (double r : rs)
      for (double hh : hs)
        for (std::size_t k = 0; k < xs.size(); ++k) {
          const CheckReport c = averaging_bound_check(h, r, hh, xs[k], 64, levels);
          out.pass = out.pass && c.pass;
          out.table.rows.push_back({r, hh, k, c.lhs, c.rhs});
        }
    out.result = {{"cases", out.table.rows.size()}};
    return out;
  };
}

inline PreparedCheck prepare_integral_identities(CheckParams& p, std::optional<std::uint64_t>&) {
  SemigroupHandle h(p.op());
  const auto ts = p.numbers("t", std::vector<double>{0.5, 1.0, 2.0});
  for (double t : ts)
    if (!(t > 0.0)) throw DomainError("integral_identities: t must be > 0");
  auto xs = p.samples(h.dim(), 4);
  const double tol = p.tolerance(1e-7);
  return [=] {
    CheckOutcome out{true, {}, {{"t", "sample", "generator_outside", "generator_inside", "tol"}, {}}};
    double worst = 0.0;
    for (double t : ts)
      for (std::size_t k = 0; k < xs.size(); ++k) {
        const IntegralIdentities r = integral_identities(h, t, xs[k]);
        const double scale = std::max(1.0, sup_norm(xs[k]));
        worst = std::max({worst, r.generator_outside / scale, r.generator_inside / scale});
        out.table.rows.push_back({t, k, r.generator_outside, r.generator_inside, tol * scale});
      }
    out.pass = worst <= tol;
    out.result = {{"worst_relative_deviation", worst}, {"tol", tol}};
    return out;
  };
}

inline PreparedCheck prepare_resolvent_consistency(CheckParams& p, std::optional<std::uint64_t>&) {
  const Operator a = p.op();
  TypeBound bound = certified_type_bound(a);
  if (p.has("M")) bound = {p.number("M"), p.number("omega"), false};
  const auto offsets = p.numbers("lambda_offsets", std::vector<double>{1.0, 2.0, 10.0});
  std::vector<double> lambdas;
  if (p.has("lambdas")) {
    lambdas = p.numbers("lambdas");
  } else {
    for (double o : offsets) lambdas.push_back(bound.omega + o);
  }
  for (double l : lambdas)
    if (!(l > bound.omega)) throw DomainError("resolvent_consistency: lambda must exceed omega");
  auto xs = p.samples(a.dim(), 4);
  const double tol = p.tolerance(1e-8);
  return [=] {
    SemigroupHandle h(a);
    CheckOutcome out{true, {}, {{"lambda", "sample", "relative_error", "t_max", "tail_bound"}, {}}};
    double worst = 0.0;
    for (double l : lambdas)
      for (std::size_t k = 0; k < xs.size(); ++k) {
        const ResolventQuadrature q = resolvent_quadrature(h, l, xs[k], bound);
        const Element direct = resolvent_solve(a, l, xs[k]);
        const double rel = sup_norm(q.value - direct) / std::max(sup_norm(direct), 1e-300);
        worst = std::max(worst, rel);
        out.table.rows.push_back({l, k, rel, q.t_max, q.tail_bound});
      }
    out.pass = worst <= tol;
    out.result = {{"worst_relative_error", worst}, {"tol", tol}, {"bound", bound}};
    return out;
  };
}

inline PreparedCheck prepare_hille_yosida(CheckParams& p, std::optional<std::uint64_t>&) {
  const Operator a = p.op();
  const double M = p.number("M", 1.0), omega = p.number("omega", 0.0);
  const int nmax = p.integer("nmax", 20);
  if (nmax < 1 || nmax > 64) throw DomainError("hille_yosida: nmax must be in [1, 64]");
  const auto grid = p.numbers("lambda_grid", std::vector<double>{0.5, 1.0, 2.0, 5.0});
  for (double l : grid)
    if (!(l > omega)) throw DomainError("hille_yosida: lambda grid must lie above omega");
  auto xs = p.samples(a.dim());
  const double tol = p.tolerance(1e-9);
  return [=] {
    const HilleYosidaReport r = hille_yosida_check(a, M, omega, nmax, grid, xs, tol);
    SuiteTable t{{"worst_ratio", "argmax_n", "argmax_lambda", "worst_operator_norm", "M", "omega"},
                 {{r.worst_ratio, r.argmax_n, r.argmax_lambda, r.worst_operator_norm, M, omega}}};
    return CheckOutcome{r.pass, r, t};
  };
}

inline PreparedCheck prepare_resolvent_convergence(CheckParams& p, std::optional<std::uint64_t>&) {
  const Operator a = p.op();
  const auto lambdas = p.numbers("lambdas", std::vector<double>{10.0, 100.0, 1000.0, 10000.0});
  auto xs = p.samples(a.dim(), 4);
  const double tol = p.tolerance(1e-2);
  return [=] {
    const ResolventConvergenceReport r = resolvent_convergence_check(a, lambdas, xs, tol);
    SuiteTable t{{"lambda", "error_x", "error_ax"}, {}};
    for (const auto& row : r.rows) t.rows.push_back({row.lambda, row.error_x, row.error_ax});
    return CheckOutcome{r.pass, r, t};
  };
}

inline PreparedCheck prepare_yosida(CheckParams& p, std::optional<std::uint64_t>&) {
  const Operator a = p.op();
  const auto indices = p.integers("indices", std::vector<int>{8, 16, 32, 64, 128});
  for (int n : indices)
    if (n < 1) throw DomainError("yosida: indices must be >= 1");
  const double t = p.number("t", 1.0);
  const Element x = p.element("x", a.dim(), alternating(a.dim()));
  return [=] {
    const YosidaScheme s = make_yosida_scheme(a, indices);
    const auto rows = yosida_convergence_table(s, t, x);
    const double floor = 1e-12 * (1.0 + sup_norm(x));
    CheckOutcome out{true, {}, {{"n", "certificate", "true_error"}, {}}};
    for (const auto& r : rows) {
      out.pass = out.pass && r.true_error <= r.certificate + floor;
      out.table.rows.push_back({r.n, r.certificate, r.true_error});
    }
    out.result = {{"rigorous", s.rigorous()}, {"bound", s.bound}, {"t", t}};
    return out;
  };
}

inline PreparedCheck prepare_equicontinuity(CheckParams& p, std::optional<std::uint64_t>&) {
  const Operator a = p.op();
  const auto indices = p.integers("indices", std::vector<int>{8, 16, 32, 64});
  const double horizon = p.number("horizon", 2.0);
  const int ppu = p.integer("points_per_unit", 16);
  if (!(horizon > 0.0) || ppu < 1) throw DomainError("equicontinuity: need horizon > 0 and points_per_unit >= 1");
  auto xs = p.samples(a.dim(), 4);
  return [=] {
    const EquicontinuityReport r = joint_equicontinuity_scan(make_yosida_scheme(a, indices), horizon, ppu, xs);
    SuiteTable t{{"resolvent_bound", "sup_ratio", "argmax_n", "argmax_t", "M"},
                 {{r.resolvent_bound, r.sup_ratio, r.argmax_n, r.argmax_t, r.M}}};
    return CheckOutcome{r.pass, r, t};
  };
}

// Probability checks.

inline PreparedCheck prepare_chernoff(CheckParams& p, std::optional<std::uint64_t>&) {
  const Distribution d = p.distribution("dist");
  const auto ns = p.integers("n", std::vector<int>{1, 2, 5, 10});
  for (int n : ns)
    if (n < 1) throw DomainError("chernoff: n must be >= 1");
  std::vector<double> cs;
  if (p.has("c")) {
    cs = p.numbers("c");
  } else {
    const double m = mean(d);
    const int points = p.integer("grid_points", 512);
    const double span = p.number("span", 4.0);
    for (int k = 1; k <= points; ++k) cs.push_back(m + span * std::max(m, 1.0) * k / points);
  }
  sample_mean_tail(d, 1, cs.front());  // rejects laws without a closed-form sample-mean tail
  return [=] {
    CheckOutcome out{true, {}, {{"n", "c", "exact_tail", "bound", "theta"}, {}}};
    std::size_t violations = 0;
    for (int n : ns)
      for (double c : cs) {
        const double exact = sample_mean_tail(d, n, c);
        const ChernoffBound b = chernoff_bound(d, c, n);
        if (exact > b.bound * (1.0 + 1e-12) + 1e-300) ++violations;
        out.table.rows.push_back({n, c, exact, b.bound, b.theta});
      }
    out.pass = violations == 0;
    out.result = {{"violations", violations}, {"cases", out.table.rows.size()}, {"dist", to_string(d)}};
    return out;
  };
}

inline PreparedCheck prepare_dominate(CheckParams& p, std::optional<std::uint64_t>&) {
  const Distribution d1 = p.distribution("d1"), d2 = p.distribution("d2");
  const bool expect = p.boolean("expect", true);
  return [=] {
    const DominanceReport r = dominates(d1, d2);
    SuiteTable t{{"worst_c", "worst_gap", "grid_points", "method", "dominates"},
                 {{r.worst_c, r.worst_gap, r.grid_points, r.method, r.dominates}}};
    nlohmann::json res = r;
    res["expect"] = expect;
    return CheckOutcome{r.dominates == expect, res, t};
  };
}

inline SuiteTable dominator_table(const DominatorReport& r, const std::string& param) {
  SuiteTable t{{"n", param, "worst_c", "worst_gap", "method", "dominates"}, {}};
  for (const auto& c : r.cases)
    t.rows.push_back({c.n, c.param, c.report.worst_c, c.report.worst_gap, c.report.method, c.report.dominates});
  return t;
}

inline PreparedCheck prepare_gamma_dominator(CheckParams& p, std::optional<std::uint64_t>&) {
  const double lambda0 = p.number("lambda0", 1.0);
  const auto ns = p.integers("n", one_to(10));
  const auto lambdas = p.numbers("lambdas", std::vector<double>{1.0, 2.0, 5.0});
  validate(GammaDominator{lambda0});
  for (double l : lambdas)
    if (l < lambda0) throw DomainError("gamma_dominator: every lambda must be >= lambda0");
  return [=] {
    const DominatorReport r = gamma_dominator_check(lambda0, ns, lambdas);
    return CheckOutcome{r.pass, {{"lambda0", lambda0}, {"cases", r.cases.size()}}, dominator_table(r, "lambda")};
  };
}

inline PreparedCheck prepare_poisson_dominator(CheckParams& p, std::optional<std::uint64_t>&) {
  const double T = p.number("T", 1.0);
  const auto ns = p.integers("n", one_to(10));
  const auto ts = p.numbers("t", std::vector<double>{0.25 * T, 0.5 * T, 0.75 * T, T});
  validate(PoissonDominator{T});
  for (double t : ts)
    if (!(t > 0.0 && t <= T)) throw DomainError("poisson_dominator: every t must lie in (0, T]");
  return [=] {
    const DominatorReport r = poisson_dominator_check(T, ns, ts);
    return CheckOutcome{r.pass, {{"T", T}, {"cases", r.cases.size()}}, dominator_table(r, "t")};
  };
}

// Seminorm checks.

inline PreparedCheck prepare_seminorm_domination(CheckParams& p, std::optional<std::uint64_t>&) {
  const SeminormSpec spec = p.raw("seminorm").get<SeminormSpec>();
  auto xs = p.samples(spec.dim(), 1000);
  return [=] {
    const CheckReport r = dominated_by_norm_check(spec, xs);
    SuiteTable t{{"samples", "max_ratio", "in_N", "violations"},
                 {{xs.size(), r.lhs, in_N(spec), r.detail.at("violations")}}};
    return CheckOutcome{r.pass, r, t};
  };
}

/// Prefix seminorms q_k(f) = max_{i <= min(k, dim - 1)} |f_i|, nondecreasing in k.
inline std::vector<SeminormSpec> prefix_sequence(std::size_t dim, std::size_t length) {
  std::vector<SeminormSpec> seq;
  for (std::size_t k = 0; k < length; ++k) {
    std::vector<std::size_t> set;
    for (std::size_t i = 0; i <= std::min(k, dim - 1); ++i) set.push_back(i);
    seq.emplace_back(dim, std::vector<double>{1.0}, std::vector<std::vector<std::size_t>>{set});
  }
  return seq;
}

/// E_high[q_ceil(Z)](f) >= E_low[q_ceil(Z)](f) for a nondecreasing sequence
/// when high dominates low, up to the truncated tail mass of high.
inline PreparedCheck prepare_mixture_monotone(CheckParams& p, std::optional<std::uint64_t>&) {
  const Distribution low = p.distribution("low"), high = p.distribution("high");
  const auto dim = static_cast<std::size_t>(p.integer("dim", 8));
  if (dim < 1) throw DomainError("mixture_monotone: dim must be >= 1");
  const std::size_t length =
      std::max(ceil_cells(low, kMixtureTailCutoff).size(), ceil_cells(high, kMixtureTailCutoff).size());
  const auto seq = prefix_sequence(dim, length);
  auto xs = p.samples(dim, 1000);
  return [=] {
    const ConvexCombo cl = mixture_seminorm(low, seq), ch = mixture_seminorm(high, seq);
    std::size_t violations = 0;
    double min_margin = std::numeric_limits<double>::infinity();
    for (const Element& f : xs) {
      const double n = sup_norm(f);
      const double margin = combine(ch, f) + ch.tail_mass() * n - combine(cl, f);
      min_margin = std::min(min_margin, margin);
      if (margin < -1e-12 * (1.0 + n)) ++violations;
    }
    const CheckReport nl = dominated_by_norm_check(cl, xs), nh = dominated_by_norm_check(ch, xs);
    violations += nl.pass ? 0 : 1;
    violations += nh.pass ? 0 : 1;
    SuiteTable t{{"samples", "violations", "min_margin", "tail_mass_low", "tail_mass_high"},
                 {{xs.size(), violations, min_margin, cl.tail_mass(), ch.tail_mass()}}};
    nlohmann::json res{{"violations", violations},
                       {"low", to_string(low)},
                       {"high", to_string(high)},
                       {"low_dominated_by_norm", nl.pass},
                       {"high_dominated_by_norm", nh.pass}};
    return CheckOutcome{violations == 0, res, t};
  };
}

// Markov checks.

inline PreparedCheck prepare_transition_mc(CheckParams& p, std::optional<std::uint64_t>& seed) {
  const MarkovChain c = p.chain();
  const double t = p.number("t", 1.0);
  const Element f = p.element("f", c.q.dim(), state_values(c.q.dim()));
  const auto x0 = static_cast<std::size_t>(p.integer("x0", 0));
  const auto n = static_cast<std::size_t>(p.integer("n", 10000));
  if (x0 >= c.q.dim()) throw RangeError("transition_mc: x0 out of range");
  if (n < 100) throw DomainError("transition_mc: n must be >= 100");
  seed = p.seed();
  const unsigned workers = p.workers();
  return [=, s = *seed] {
    const MonteCarloEstimate e = transition_mc(c.q, t, f, x0, n, s, workers);
    const double exact = exp_series(c.q, t, f)[x0];
    const bool ok = mc_agrees(e.estimate, e.standard_error, exact);
    SuiteTable tab{{"t", "x0", "estimate", "standard_error", "exact"},
                   {{t, x0, e.estimate, e.standard_error, exact}}};
    nlohmann::json res = e;
    res["exact"] = exact;
    return CheckOutcome{ok, res, tab};
  };
}

inline PreparedCheck prepare_martingale(CheckParams& p, std::optional<std::uint64_t>& seed) {
  const MarkovChain c = p.chain();
  const std::size_t d = c.q.dim();
  const Element f = p.element("f", d, state_values(d));
  const Element af = p.element("af", d, apply(c.q, f));
  std::vector<std::pair<double, double>> pairs{{0.0, 0.5}, {0.5, 1.0}, {0.0, 1.0}};
  if (p.has("pairs")) {
    pairs.clear();
    for (const auto& v : p.raw("pairs")) {
      const auto st = v.get<std::vector<double>>();
      if (st.size() != 2) throw ConfigError("pairs: each entry must be [s, t]");
      pairs.emplace_back(st[0], st[1]);
    }
  }
  for (const auto& [s, t] : pairs)
    if (!(s >= 0.0 && s < t)) throw DomainError("martingale: need 0 <= s < t");
  const auto x0 = static_cast<std::size_t>(p.integer("x0", 0));
  const auto n = static_cast<std::size_t>(p.integer("n", 10000));
  if (x0 >= d) throw RangeError("martingale: x0 out of range");
  seed = p.seed();
  const unsigned workers = p.workers();
  return [=, s = *seed] {
    const MartingaleReport r = martingale_check(c.q, f, af, pairs, x0, n, s, workers);
    SuiteTable t{{"s", "t", "state", "mean", "standard_error", "count", "z", "verdict"}, {}};
    for (const auto& row : r.rows)
      t.rows.push_back({row.s, row.t, row.state, row.mean, row.standard_error, row.count, finite_or_text(row.z),
                        to_string(row.verdict)});
    return CheckOutcome{r.pass, r, t};
  };
}

/// Passes iff every Monte Carlo probability agrees with the killed-chain
/// exponential within max(3 SE, 3 / n) and, when epsilon is given,
/// min p + 3 SE >= 1 - epsilon. The 3 / n floor is the rule-of-three
/// resolution of an indicator average whose sample is all ones or all zeros.
inline PreparedCheck prepare_containment(CheckParams& p, std::optional<std::uint64_t>& seed) {
  const MarkovChain c = p.chain();
  const auto k = p.indices("K");
  const auto khat = p.indices("Khat");
  const double horizon = p.number("T", 1.0);
  const std::optional<double> eps = p.has("epsilon") ? std::optional<double>(p.number("epsilon")) : std::nullopt;
  const auto n = static_cast<std::size_t>(p.integer("n", 10000));
  std::set<std::size_t> inside(khat.begin(), khat.end());
  if (k.empty()) throw DomainError("containment: K is empty");
  for (std::size_t i : khat)
    if (i >= c.q.dim()) throw RangeError("containment: Khat state out of range");
  for (std::size_t i : k)
    if (!inside.count(i)) throw DomainError("containment: K must be a subset of Khat");
  seed = p.seed();
  const unsigned workers = p.workers();
  return [=, s = *seed] {
    const ContainmentReport r = compact_containment(c.q, k, khat, horizon, n, s, workers);
    const std::vector<double> exact = containment_probability_exact(c.q, khat, horizon);
    SuiteTable t{{"state", "probability", "standard_error", "exact"}, {}};
    bool ok = true;
    for (const auto& row : r.rows) {
      const auto pos = static_cast<std::size_t>(std::find(khat.begin(), khat.end(), row.state) - khat.begin());
      ok = ok && (mc_agrees(row.probability, row.standard_error, exact[pos]) ||
                  std::abs(row.probability - exact[pos]) <= 3.0 / static_cast<double>(n));
      t.rows.push_back({row.state, row.probability, row.standard_error, exact[pos]});
    }
    nlohmann::json res = r;
    if (eps) {
      const bool held = r.min_probability + kMartingaleZ * r.standard_error >= 1.0 - *eps;
      res["epsilon"] = *eps;
      res["epsilon_held"] = held;
      ok = ok && held;
    }
    return CheckOutcome{ok, res, t};
  };
}

inline PreparedCheck prepare_extension(CheckParams& p, std::optional<std::uint64_t>&) {
  const MarkovChain c = p.chain();
  const std::size_t d = c.q.dim();
  const Element f = p.element("f", d, state_values(d));
  const auto k = p.indices("K", all_states(d));
  const auto ts = p.numbers("t", std::vector<double>{1.0, 0.1, 0.01, 0.001});
  for (std::size_t i = 0; i < ts.size(); ++i)
    if (!(ts[i] > 0.0) || (i > 0 && !(ts[i] < ts[i - 1])))
      throw DomainError("extension: t must be positive and decreasing");
  for (std::size_t i : k)
    if (i >= d) throw RangeError("extension: K state out of range");
  return [=] {
    const ExtensionReport r = generator_extension_check(c.q, f, k, ts);
    SuiteTable t{{"t", "error", "bound"}, {}};
    for (const auto& row : r.rows) t.rows.push_back({row.t, row.error, row.bound});
    return CheckOutcome{r.pass, r, t};
  };
}

inline PreparedCheck prepare_preservation(CheckParams& p, std::optional<std::uint64_t>&) {
  const MarkovChain c = p.chain();
  const double t = p.number("t", 1.0);
  if (!(t >= 0.0)) throw DomainError("preservation: t must be >= 0");
  return [=] {
    const PreservationReport r = c0_and_probability_preservation(c.q, c.boundary, t);
    SuiteTable tab{{"t", "row_sum_error", "min_entry", "boundary_leak", "stochastic", "c0_preserved"},
                   {{t, r.row_sum_error, r.min_entry, r.boundary_leak, r.stochastic, r.c0_preserved}}};
    return CheckOutcome{r.pass, r, tab};
  };
}

inline PreparedCheck prepare_perturbation(CheckParams& p, std::optional<std::uint64_t>&) {
  const MarkovChain c = p.chain();
  const Operator e = operator_from_rows(p.raw("perturbation"));
  if (e.dim() != c.q.dim()) throw DimensionMismatch("perturbation: size differs from the chain");
  const double t = p.number("t", 1.0);
  return [=] {
    const CheckReport r = perturbation_continuity_check(c.q, e, t);
    return CheckOutcome{r.pass, r, {{"t", "lhs", "rhs"}, {{t, r.lhs, r.rhs}}}};
  };
}

}  // namespace detail

inline const std::map<std::string, CheckType>& check_registry() {
  static const std::map<std::string, CheckType> registry{
      {"semigroup_law", {"semigroup property T(t)T(s) = T(t+s)", false, detail::prepare_semigroup_law}},
      {"averaging_bound", {"averaged element moves by at most (2h/r) sup ||T(s)x||", false,
                           detail::prepare_averaging_bound}},
      {"integral_identities", {"T(t)x - x equals A applied to the time integral", false,
                               detail::prepare_integral_identities}},
      {"resolvent_consistency", {"resolvent as Laplace transform of the semigroup", false,
                                 detail::prepare_resolvent_consistency}},
      {"hille_yosida", {"resolvent power bound of the generation theorem", false, detail::prepare_hille_yosida}},
      {"resolvent_convergence", {"lambda R(lambda) tends to the identity", false,
                                 detail::prepare_resolvent_convergence}},
      {"yosida", {"Yosida approximants converge with certificate t ||A_n x - A x||", false, detail::prepare_yosida}},
      {"equicontinuity", {"approximant semigroups are uniformly bounded", false, detail::prepare_equicontinuity}},
      {"chernoff", {"Chernoff bound on sample-mean tails", false, detail::prepare_chernoff}},
      {"dominate", {"stochastic dominance of tails", false, detail::prepare_dominate}},
      {"gamma_dominator", {"dominating law for averaged exponential clocks", false, detail::prepare_gamma_dominator}},
      {"poisson_dominator", {"dominating law for rescaled Poisson ceilings", false,
                             detail::prepare_poisson_dominator}},
      {"seminorm_domination", {"weighted-sup seminorm dominated by the norm", false,
                               detail::prepare_seminorm_domination}},
      {"mixture_monotone", {"mixture seminorm monotone under dominance", false, detail::prepare_mixture_monotone}},
      {"transition_mc", {"simulated transition expectation matches exp(tQ)f", true, detail::prepare_transition_mc}},
      {"martingale", {"f(X(t)) - f(X(0)) - int Af(X(s)) ds is a martingale", true, detail::prepare_martingale}},
      {"containment", {"paths from K stay in Khat up to time T", true, detail::prepare_containment}},
      {"extension", {"difference quotients converge to Qf", false, detail::prepare_extension}},
      {"preservation", {"transition operators are stochastic and keep boundary zeros", false,
                        detail::prepare_preservation}},
      {"perturbation", {"transition operators depend continuously on the rates", false,
                        detail::prepare_perturbation}},
  };
  return registry;
}

/// Throws ConfigError for any structural or parameter problem; check failures
/// are reported in the returned rows.
inline SuiteReport run_suite(const nlohmann::json& config, const std::filesystem::path& base_dir,
                             const SuiteOptions& opts = {}) {
  if (!config.is_object()) throw ConfigError("config must be a table");
  static const std::set<std::string> top_keys{"seed", "chain", "operator", "checks", "description"};
  for (const auto& [k, v] : config.items())
    if (!top_keys.count(k)) throw ConfigError("unknown top-level key '" + k + "'");

  SuiteReport report;
  try {
    if (opts.seed) {
      report.seed = opts.seed;
    } else if (config.contains("seed")) {
      report.seed = config.at("seed").get<std::uint64_t>();
    }
    if (config.contains("chain")) config.at("chain").get<MarkovChain>();
    if (config.contains("operator")) operator_from_rows(config.at("operator"));
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(std::string("top level: ") + e.what());
  }

  const nlohmann::json checks = config.value("checks", nlohmann::json::array());
  if (!checks.is_array()) throw ConfigError("'checks' must be an array of tables");

  std::vector<PreparedCheck> prepared;
  std::set<std::string> names;
  for (std::size_t i = 0; i < checks.size(); ++i) {
    const nlohmann::json& c = checks[i];
    const std::string where = "checks[" + std::to_string(i) + "]";
    if (!c.is_object() || !c.contains("type") || !c.at("type").is_string())
      throw ConfigError(where + ": each check needs a string 'type'");
    const std::string type = c.at("type").get<std::string>();
    const auto it = check_registry().find(type);
    if (it == check_registry().end()) throw ConfigError(where + ": unknown check type '" + type + "'");
    SuiteRow row;
    row.check = type;
    row.anchor = it->second.anchor;
    row.stochastic = it->second.stochastic;
    row.name = c.contains("name") && c.at("name").is_string() ? c.at("name").get<std::string>() : type;
    if (row.name.empty() || row.name.find_first_of("/\\") != std::string::npos)
      throw ConfigError(where + ": invalid name '" + row.name + "'");
    if (!names.insert(row.name).second)
      throw ConfigError(where + ": duplicate name '" + row.name + "' (set 'name' to disambiguate)");
    try {
      CheckParams params(c, config, base_dir, opts);
      prepared.push_back(it->second.prepare(params, row.seed));
      params.require_all_used();
    } catch (const ConfigError& e) {
      throw ConfigError(where + " (" + row.name + "): " + e.what());
    } catch (const std::exception& e) {
      throw ConfigError(where + " (" + row.name + "): " + e.what());
    }
    report.rows.push_back(std::move(row));
  }

  for (std::size_t i = 0; i < prepared.size(); ++i) {
    SuiteRow& row = report.rows[i];
    try {
      CheckOutcome out = prepared[i]();
      row.pass = out.pass;
      row.result = std::move(out.result);
      row.table = std::move(out.table);
    } catch (const Error& e) {
      row.pass = false;
      row.result = {{"error", e.what()}};
      row.table = {{"error"}, {{e.what()}}};
    }
    report.pass = report.pass && row.pass;
  }
  return report;
}

inline SuiteReport run_suite_file(const std::filesystem::path& path, const SuiteOptions& opts = {}) {
  return run_suite(load_config(path), path.parent_path(), opts);
}

inline void to_json(nlohmann::json& j, const SuiteRow& r) {
  j = nlohmann::json{{"name", r.name},         {"check", r.check}, {"anchor", r.anchor},
                     {"stochastic", r.stochastic}, {"pass", r.pass},   {"result", r.result},
                     {"table", r.name + ".csv"}};
  if (r.seed) j["seed"] = *r.seed;
}

inline void to_json(nlohmann::json& j, const SuiteReport& r) {
  j = nlohmann::json{{"checks", r.rows}, {"pass", r.pass}, {"exit_code", r.exit_code()}};
  j["seed"] = r.seed ? nlohmann::json(*r.seed) : nlohmann::json(nullptr);
}

/// Canonical form: sorted keys, two-space indent, trailing newline.
inline std::string canonical_json(const nlohmann::json& j) { return j.dump(2) + "\n"; }

/// report.json plus one <name>.csv per check.
inline void emit_tables(const SuiteReport& r, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  auto write = [](const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) throw Error("cannot write '" + p.string() + "'");
    out << text;
  };
  write(out_dir / "report.json", canonical_json(r));
  for (const auto& row : r.rows) write(out_dir / (row.name + ".csv"), to_csv(row.table));
}

}  // namespace sglab
