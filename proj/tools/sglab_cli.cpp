// Command-line front end. Check-style subcommands build a one-check suite
// config, so they share the report format and exit codes of `suite`:
// 0 all checks pass, 1 a check failed, 2 bad input.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <sglab/sglab.hpp>
#include <sglab/suite.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kExitConfig = 2;

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (const std::exception&) {
      throw sglab::ConfigError("cannot parse number '" + item + "'");
    }
    if (item.find_first_not_of(" \t", used) != std::string::npos)
      throw sglab::ConfigError("cannot parse number '" + item + "'");
    out.push_back(v);
  }
  if (out.empty()) throw sglab::ConfigError("empty list '" + text + "'");
  return out;
}

// "a,b;c,d" -> [[a, b], [c, d]]
json parse_rows(const std::string& text) {
  json rows = json::array();
  std::string row;
  std::istringstream in(text);
  while (std::getline(in, row, ';')) rows.push_back(parse_list(row));
  return rows;
}

std::string absolute(const std::string& p) { return fs::absolute(p).string(); }

/// Inputs shared by subcommands that need an operator or a chain.
struct Source {
  std::string file;
  std::string inline_rows;

  void add_operator(CLI::App* app) {
    app->add_option("--operator", file, "Operator file (rows, 'operator', 'q' or 'entries'; TOML or JSON)");
    app->add_option("--matrix", inline_rows, "Inline operator rows, e.g. \"-1,1;2,-2\"");
  }
  void add_chain(CLI::App* app) {
    app->add_option("--chain", file, "Chain file ('q', optional 'metric' and 'boundary')");
    app->add_option("--q", inline_rows, "Inline rate matrix rows, e.g. \"-1,1;2,-2\"");
  }
  void into_operator(json& check) const {
    if (!inline_rows.empty()) {
      check["operator"] = parse_rows(inline_rows);
    } else if (!file.empty()) {
      check["operator_file"] = absolute(file);
    } else {
      throw sglab::ConfigError("give --operator or --matrix");
    }
  }
  void into_chain(json& check) const {
    if (!inline_rows.empty()) {
      check["chain"] = json{{"q", parse_rows(inline_rows)}};
    } else if (!file.empty()) {
      check["chain_file"] = absolute(file);
    } else {
      throw sglab::ConfigError("give --chain or --q");
    }
  }
  sglab::Operator load_operator() const {
    json check = json::object();
    into_operator(check);
    if (check.contains("operator")) return sglab::operator_from_rows(check["operator"]);
    const json doc = sglab::load_config(file);
    if (doc.is_array()) return sglab::operator_from_rows(doc);
    for (const char* key : {"operator", "q"})
      if (doc.contains(key)) return sglab::operator_from_rows(doc.at(key));
    return doc.get<sglab::Operator>();
  }
  sglab::MarkovChain load_chain() const {
    if (!inline_rows.empty()) return json{{"q", parse_rows(inline_rows)}}.get<sglab::MarkovChain>();
    if (file.empty()) throw sglab::ConfigError("give --chain or --q");
    const json doc = sglab::load_config(file);
    return (doc.contains("chain") ? doc.at("chain") : doc).get<sglab::MarkovChain>();
  }
};

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  std::string out;
  unsigned workers = 1;

  void add(CLI::App* app, bool with_seed) {
    if (with_seed) app->add_option("--seed", seed, "Random seed");
    app->add_option("--tol", tol, "Tolerance override");
    app->add_option("--out", out, "Directory for report.json and CSV tables");
    if (with_seed) app->add_option("--workers", workers, "Worker threads (results do not depend on it)");
  }
  sglab::SuiteOptions options() const { return {seed, tol, workers}; }
};

void print_summary(const sglab::SuiteReport& r) {
  for (const auto& row : r.rows) std::printf("%s %s\n", row.pass ? "PASS" : "FAIL", row.name.c_str());
  std::printf("%s (%zu checks)\n", r.pass ? "ALL PASS" : "FAILED", r.rows.size());
}

int run_single(const json& check, const Common& common) {
  json config{{"checks", json::array({check})}};
  if (common.seed) config["seed"] = *common.seed;
  const sglab::SuiteReport r = sglab::run_suite(config, fs::current_path(), common.options());
  if (!common.out.empty()) sglab::emit_tables(r, common.out);
  std::cout << sglab::canonical_json(r.rows.front().result);
  std::cerr << (r.pass ? "PASS " : "FAIL ") << r.rows.front().name << "\n";
  return r.exit_code();
}

void write_or_print(const json& j, const std::string& out, const std::string& file) {
  if (out.empty()) {
    std::cout << sglab::canonical_json(j);
    return;
  }
  fs::create_directories(out);
  std::ofstream(fs::path(out) / file, std::ios::binary) << sglab::canonical_json(j);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sglab: finite-dimensional semigroup, resolvent and Markov-chain checks"};
  app.require_subcommand(1);
  std::function<int()> action;

  // generate
  Source gen_src;
  Common gen_common;
  double gen_t = 1.0;
  std::string gen_x;
  std::optional<double> gen_fit_omega;
  double gen_fit_horizon = 5.0;
  auto* gen = app.add_subcommand("generate", "Evaluate T(t)x = exp(tA)x (or the matrix) and optionally fit a type bound");
  gen_src.add_operator(gen);
  gen->add_option("--t", gen_t, "Time");
  gen->add_option("--x", gen_x, "Element as a comma list (default: whole matrix)");
  gen->add_option("--fit-omega", gen_fit_omega, "Fit M for this omega over unit vectors");
  gen->add_option("--fit-horizon", gen_fit_horizon, "Horizon for the fit");
  gen_common.add(gen, false);
  gen->callback([&] {
    action = [&] {
      const sglab::Operator a = gen_src.load_operator();
      if (!(gen_t >= 0.0)) throw sglab::ConfigError("--t must be >= 0");
      const sglab::SemigroupHandle h(a);
      json out{{"t", gen_t}, {"spectral_abscissa", sglab::spectral_abscissa(a)},
               {"certified", sglab::certified_type_bound(a)}};
      if (gen_x.empty()) {
        out["matrix"] = sglab::operator_to_rows(h.matrix(gen_t));
      } else {
        const sglab::Element x(parse_list(gen_x));
        if (x.dim() != a.dim()) throw sglab::ConfigError("--x has the wrong length");
        out["x"] = x.vec();
        out["value"] = h.apply(gen_t, x).vec();
      }
      if (gen_fit_omega) {
        std::vector<sglab::Element> basis;
        for (std::size_t i = 0; i < a.dim(); ++i) basis.push_back(sglab::Element::basis(a.dim(), i));
        out["fit"] = sglab::fit_type_bound(h, *gen_fit_omega, gen_fit_horizon, basis);
      }
      write_or_print(out, gen_common.out, "generate.json");
      return 0;
    };
  });

  // resolvent
  Source res_src;
  Common res_common;
  std::string res_lambdas, res_x;
  auto* res = app.add_subcommand("resolvent", "Compare the Laplace-transform quadrature of R(lambda)x with a direct solve");
  res_src.add_operator(res);
  res->add_option("--lambdas", res_lambdas, "Comma list of lambda (default omega + {1, 2, 10})");
  res->add_option("--x", res_x, "Element as a comma list (default: random samples)");
  res_common.add(res, false);
  res->callback([&] {
    action = [&] {
      json c{{"type", "resolvent_consistency"}};
      res_src.into_operator(c);
      if (!res_lambdas.empty()) c["lambdas"] = parse_list(res_lambdas);
      if (!res_x.empty()) c["samples"] = json::array({parse_list(res_x)});
      return run_single(c, res_common);
    };
  });

  // hille-yosida
  Source hy_src;
  Common hy_common;
  double hy_m = 1.0, hy_omega = 0.0;
  int hy_nmax = 20;
  std::string hy_grid = "0.5,1,2,5";
  auto* hy = app.add_subcommand("hille-yosida", "Check ||(n(lambda - omega)R(n lambda))^n|| <= M on a grid");
  hy_src.add_operator(hy);
  hy->add_option("--m", hy_m, "Constant M");
  hy->add_option("--omega", hy_omega, "Growth rate omega");
  hy->add_option("--nmax", hy_nmax, "Largest power n (<= 64)");
  hy->add_option("--lambda-grid", hy_grid, "Comma list of lambda");
  hy_common.add(hy, false);
  hy->callback([&] {
    action = [&] {
      json c{{"type", "hille_yosida"}, {"M", hy_m}, {"omega", hy_omega}, {"nmax", hy_nmax},
             {"lambda_grid", parse_list(hy_grid)}};
      hy_src.into_operator(c);
      return run_single(c, hy_common);
    };
  });

  // yosida
  Source yo_src;
  Common yo_common;
  double yo_t = 1.0;
  std::string yo_x, yo_indices = "8,16,32,64,128";
  auto* yo = app.add_subcommand("yosida", "Table of Yosida approximation errors against their certificates");
  yo_src.add_operator(yo);
  yo->add_option("--t", yo_t, "Time");
  yo->add_option("--x", yo_x, "Element as a comma list");
  yo->add_option("--indices", yo_indices, "Comma list of approximant indices");
  yo_common.add(yo, false);
  yo->callback([&] {
    action = [&] {
      json c{{"type", "yosida"}, {"t", yo_t}};
      yo_src.into_operator(c);
      std::vector<int> idx;
      for (double v : parse_list(yo_indices)) idx.push_back(static_cast<int>(v));
      c["indices"] = idx;
      if (!yo_x.empty()) c["x"] = parse_list(yo_x);
      json config{{"checks", json::array({c})}};
      const sglab::SuiteReport r = sglab::run_suite(config, fs::current_path(), yo_common.options());
      if (!yo_common.out.empty()) sglab::emit_tables(r, yo_common.out);
      std::cout << sglab::to_csv(r.rows.front().table);
      return r.exit_code();
    };
  });

  // chernoff
  Common ch_common;
  std::string ch_dist, ch_c, ch_n = "1";
  auto* ch = app.add_subcommand("chernoff", "Chernoff bound for the mean of n i.i.d. copies against the exact tail");
  ch->add_option("--dist", ch_dist, "Law, e.g. exponential:1, gamma:2,3, poisson:2")->required();
  ch->add_option("--c", ch_c, "Comma list of thresholds (default: grid above the mean)");
  ch->add_option("--n", ch_n, "Comma list of sample sizes");
  ch_common.add(ch, false);
  ch->callback([&] {
    action = [&] {
      json c{{"type", "chernoff"}, {"dist", ch_dist}};
      std::vector<int> ns;
      for (double v : parse_list(ch_n)) ns.push_back(static_cast<int>(v));
      c["n"] = ns;
      if (!ch_c.empty()) c["c"] = parse_list(ch_c);
      return run_single(c, ch_common);
    };
  });

  // dominate
  Common dom_common;
  std::string dom_d1, dom_d2;
  auto* dom = app.add_subcommand("dominate", "Decide whether P[X1 > c] >= P[X2 > c] for all c");
  dom->add_option("--d1", dom_d1, "Dominating law")->required();
  dom->add_option("--d2", dom_d2, "Dominated law")->required();
  dom_common.add(dom, false);
  dom->callback([&] {
    action = [&] { return run_single(json{{"type", "dominate"}, {"d1", dom_d1}, {"d2", dom_d2}}, dom_common); };
  });

  // markov-sim
  Source sim_src;
  Common sim_common;
  std::size_t sim_x0 = 0, sim_stream = 0;
  double sim_t = 1.0;
  auto* sim = app.add_subcommand("markov-sim", "Simulate one path of the chain on [0, T]");
  sim_src.add_chain(sim);
  sim->add_option("--x0", sim_x0, "Initial state");
  sim->add_option("--T", sim_t, "Horizon");
  sim->add_option("--stream", sim_stream, "Substream index");
  sim_common.add(sim, true);
  sim->callback([&] {
    action = [&] {
      if (!sim_common.seed) throw sglab::ConfigError("markov-sim needs --seed");
      const sglab::MarkovChain chain = sim_src.load_chain();
      const sglab::Trajectory tr = sglab::simulate(chain.q, sim_x0, sim_t, *sim_common.seed, sim_stream);
      json out = tr;
      out["seed"] = *sim_common.seed;
      out["stream"] = sim_stream;
      write_or_print(out, sim_common.out, "trajectory.json");
      return 0;
    };
  });

  // martingale-check
  Source mg_src;
  Common mg_common;
  std::string mg_f, mg_af, mg_pairs;
  std::size_t mg_x0 = 0, mg_n = 10000;
  auto* mg = app.add_subcommand("martingale-check", "Monte Carlo check of the martingale problem for (Q, f, Af)");
  mg_src.add_chain(mg);
  mg->add_option("--f", mg_f, "Function values (default: state index)");
  mg->add_option("--af", mg_af, "Claimed Af (default: Qf)");
  mg->add_option("--pairs", mg_pairs, "s1,t1;s2,t2;... (default 0,0.5;0.5,1;0,1)");
  mg->add_option("--x0", mg_x0, "Initial state");
  mg->add_option("--n", mg_n, "Number of paths");
  mg_common.add(mg, true);
  mg->callback([&] {
    action = [&] {
      json c{{"type", "martingale"}, {"x0", mg_x0}, {"n", mg_n}};
      mg_src.into_chain(c);
      if (!mg_f.empty()) c["f"] = parse_list(mg_f);
      if (!mg_af.empty()) c["af"] = parse_list(mg_af);
      if (!mg_pairs.empty()) c["pairs"] = parse_rows(mg_pairs);
      return run_single(c, mg_common);
    };
  });

  // containment
  Source ct_src;
  Common ct_common;
  std::string ct_k, ct_khat;
  double ct_t = 1.0;
  std::optional<double> ct_eps;
  std::size_t ct_n = 10000;
  auto* ct = app.add_subcommand("containment", "Probability that paths from K stay in Khat up to T");
  ct_src.add_chain(ct);
  ct->add_option("--K", ct_k, "Comma list of start states")->required();
  ct->add_option("--Khat", ct_khat, "Comma list of allowed states")->required();
  ct->add_option("--T", ct_t, "Horizon");
  ct->add_option("--epsilon", ct_eps, "Require min probability >= 1 - epsilon");
  ct->add_option("--n", ct_n, "Paths per start state");
  ct_common.add(ct, true);
  ct->callback([&] {
    action = [&] {
      json c{{"type", "containment"}, {"T", ct_t}, {"n", ct_n}};
      ct_src.into_chain(c);
      auto to_idx = [](const std::string& s) {
        std::vector<std::size_t> v;
        for (double d : parse_list(s)) {
          if (d < 0 || d != std::floor(d)) throw sglab::ConfigError("state indices must be nonnegative integers");
          v.push_back(static_cast<std::size_t>(d));
        }
        return v;
      };
      c["K"] = to_idx(ct_k);
      c["Khat"] = to_idx(ct_khat);
      if (ct_eps) c["epsilon"] = *ct_eps;
      return run_single(c, ct_common);
    };
  });

  // extension-check
  Source ex_src;
  Common ex_common;
  std::string ex_f, ex_k, ex_t = "1,0.1,0.01,0.001";
  auto* ex = app.add_subcommand("extension-check", "Difference quotients (S(t)f - f)/t against Qf on a set K");
  ex_src.add_chain(ex);
  ex->add_option("--f", ex_f, "Function values (default: state index)");
  ex->add_option("--K", ex_k, "Comma list of states (default: all)");
  ex->add_option("--t-seq", ex_t, "Decreasing comma list of times");
  ex_common.add(ex, false);
  ex->callback([&] {
    action = [&] {
      json c{{"type", "extension"}, {"t", parse_list(ex_t)}};
      ex_src.into_chain(c);
      if (!ex_f.empty()) c["f"] = parse_list(ex_f);
      if (!ex_k.empty()) {
        std::vector<std::size_t> k;
        for (double d : parse_list(ex_k)) k.push_back(static_cast<std::size_t>(d));
        c["K"] = k;
      }
      return run_single(c, ex_common);
    };
  });

  // suite
  Common su_common;
  std::string su_config;
  auto* su = app.add_subcommand("suite", "Run every check of a TOML or JSON config");
  su->add_option("--config", su_config, "Config file")->required();
  su_common.add(su, true);
  su->callback([&] {
    action = [&] {
      const sglab::SuiteReport r = sglab::run_suite_file(su_config, su_common.options());
      sglab::emit_tables(r, su_common.out.empty() ? std::string("sglab_report") : su_common.out);
      print_summary(r);
      return r.exit_code();
    };
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }
  try {
    return action();
  } catch (const sglab::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const sglab::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }
}
