#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wordperc/bounds.hpp"
#include "wordperc/emit.hpp"

using namespace wordperc;

namespace {

std::string read_text_file(const std::string& path) {
  std::ifstream ifs(path, std::ios::binary);
  if (!ifs) throw IoError("cannot read config file '" + path + "'");
  std::ostringstream os;
  os << ifs.rdbuf();
  return os.str();
}

void deliver(const RunConfig& cfg, const std::string& text) {
  if (cfg.out.empty()) {
    std::cout << text;
    if (!std::cout) throw IoError("failed while writing to stdout");
  } else {
    write_file(cfg.out, text);
  }
}

// The resolved config as '#' comment lines, the header of every plain-text
// and oriented-CSV output.  The estimate/sweep formats instead carry the
// parameters inside each record.
std::string commented_echo(const RunConfig& cfg) {
  std::string out;
  std::istringstream is(echo_config(cfg));
  std::string line;
  while (std::getline(is, line)) out += "# " + line + "\n";
  return out;
}

int cmd_estimate(const RunConfig& cfg) {
  if (cfg.format == "svg") throw ConfigError("estimate: svg plots a sweep; use the sweep subcommand");
  const EstimateRecord est = run(cfg.spec, cfg.trials, cfg.seed, cfg.workers);
  const std::vector<ResultRow> rows{{cfg.spec, est}};
  deliver(cfg, cfg.format == "csv" ? csv_text(rows) : jsonl_text(rows));
  return 0;
}

int cmd_sweep(const RunConfig& cfg) {
  if (cfg.sweep_key.empty()) throw ConfigError("sweep: sweep_key must be set");
  if (cfg.sweep_values.empty()) throw ConfigError("sweep: sweep_values must be nonempty");
  if (cfg.sweep_key == "out" || cfg.sweep_key == "format" || cfg.sweep_key.rfind("sweep", 0) == 0)
    throw ConfigError("sweep: cannot sweep key '" + cfg.sweep_key + "'");
  std::vector<ResultRow> rows;
  std::vector<SvgPoint> points;
  for (std::size_t i = 0; i < cfg.sweep_values.size(); ++i) {
    const std::string& value = cfg.sweep_values[i];
    RunConfig point = cfg;
    detail::apply_kv(point, cfg.sweep_key, value, "sweep value '" + value + "'");
    const EstimateRecord est = run(point.spec, point.trials, point.seed, point.workers);
    rows.push_back({point.spec, est});
    double x = double(i);
    try {
      x = detail::parse_real(value);
    } catch (const ConfigError&) {
    }
    points.push_back({x, est.p_hat, est.ci_lo, est.ci_hi});
  }
  if (cfg.format == "svg")
    deliver(cfg, svg_text(std::string(kind_name(cfg.spec.kind)) + ": p_hat vs " + cfg.sweep_key, cfg.sweep_key,
                          points, echo_config(cfg)));
  else
    deliver(cfg, cfg.format == "csv" ? csv_text(rows) : jsonl_text(rows));
  return 0;
}

int cmd_oracle(const RunConfig& cfg) {
  const ModelParams& mp = cfg.spec.params;
  mp.validate();
  cfg.spec.box.validate();
  if (cfg.spec.box.dim() != mp.d) throw ConfigError("oracle: box dimension != model d");
  Coords origin = Coords::zeros(int(mp.d));
  if (!cfg.origin.empty()) {
    if (cfg.origin.size() != mp.d)
      throw ConfigError("oracle: origin needs exactly " + std::to_string(mp.d) + " coordinates");
    for (std::size_t i = 0; i < cfg.origin.size(); ++i) origin[int(i)] = cfg.origin[i];
  }
  const Environment env{mp, cfg.spec.box, derive_seed(cfg.seed, 0, Stream::bond)};
  const SiteField sites{mp.d, mp.p, derive_seed(cfg.seed, 0, Stream::site)};
  const WordSet seen = seen_words(env, sites, origin, cfg.spec.L, cfg.spec.guards);
  std::string out = commented_echo(cfg);
  out += "length = " + std::to_string(cfg.spec.L) + "\n";
  out += "cardinality = " + std::to_string(seen.count()) + "\n";
  out += std::string("full = ") + (seen.is_full() ? "true" : "false") + "\n";
  if (cfg.print_hex) out += "words = " + seen.serialize() + "\n";
  deliver(cfg, out);
  return 0;
}

int cmd_explore(const RunConfig& cfg) {
  const Environment env{cfg.spec.params, cfg.spec.box, derive_seed(cfg.seed, 0, Stream::bond)};
  const SiteField sites{cfg.spec.params.d, cfg.spec.params.p, derive_seed(cfg.seed, 0, Stream::site)};
  const ExplorationResult res = explore(env, sites, cfg.spec.xi, cfg.spec.cp);
  std::string out = commented_echo(cfg);
  out += "black = " + std::to_string(res.a_set().size()) + "\n";
  out += "white = " + std::to_string(res.b_set().size()) + "\n";
  out += "height_truncated = " + std::to_string(res.height_truncated_total) + "\n";
  out += step_log_jsonl(res);
  deliver(cfg, out);
  return 0;
}

int cmd_oriented(RunConfig cfg) {
  if (cfg.mode == "event") cfg.spec.kind = ExperimentKind::oriented_event;
  std::string out = commented_echo(cfg);
  if (cfg.mode == "event") {
    const EstimateRecord est = run(cfg.spec, cfg.trials, cfg.seed, cfg.workers);
    out += oriented_csv({{cfg.spec.m, cfg.spec.gamma, to_string(cfg.spec.which), est.trials, est.successes, est.p_hat,
                          est.ci_lo, est.ci_hi}});
  } else if (cfg.mode == "decay") {
    std::vector<OrientedRow> rows;
    for (const DecayRow& r : decay_experiment(cfg.spec.gamma, cfg.m_list, cfg.trials, cfg.seed, cfg.workers))
      rows.push_back({r.m, cfg.spec.gamma, "ms_lt_4m", r.trials, r.successes, r.p_hat, r.ci_lo, r.ci_hi});
    out += oriented_csv(rows);
  } else if (cfg.mode == "domination") {
    const DominationCheck dc = domination_window_check(cfg.spec.gamma, cfg.spec.rho, cfg.spec.w, cfg.spec.t_burn,
                                                      cfg.trials, cfg.seed, cfg.workers);
    out += "trials = " + std::to_string(dc.trials) + "\n";
    out += "successes = " + std::to_string(dc.successes) + "\n";
    out += "p_hat = " + format_double(dc.p_hat) + "\n";
    out += "sigma = " + format_double(dc.sigma) + "\n";
    out += "threshold = " + format_double(dc.threshold) + "\n";
    out += std::string("passed = ") + (dc.passed ? "true" : "false") + "\n";
  } else {  // chain
    const std::int64_t half = std::int64_t(cfg.spec.t_burn + cfg.spec.w);
    ChainState st;
    st.x_lo = -half;
    st.active.assign(std::size_t(2 * half + 1), 1);
    const std::uint64_t s = derive_seed(cfg.seed, 0, Stream::oriented);
    out += "t,active_count\n";
    out += "0," + std::to_string(st.active_count()) + "\n";
    for (std::uint64_t t = 1; t <= cfg.spec.t_burn; ++t) {
      st = chain_step(st, cfg.spec.gamma, s);
      out += std::to_string(t) + "," + std::to_string(st.active_count()) + "\n";
    }
  }
  deliver(cfg, out);
  return 0;
}

int cmd_bounds(const RunConfig& cfg) {
  std::string out = commented_echo(cfg);
  out += "quantity,m,value\n";
  const double q = q_of_gamma(cfg.spec.gamma);
  out += "q_of_gamma,," + format_double(q) + "\n";
  for (std::uint64_t m : cfg.m_list) {
    out += "chernoff," + std::to_string(m) + "," + format_double(chernoff(cfg.beta, cfg.t, m)) + "\n";
    if (8 * m <= 10'000)
      out += "binom_tail," + std::to_string(m) + "," + format_double(exact_binom_tail(8 * m, cfg.beta, 4 * m)) + "\n";
    out += "contour," + std::to_string(m) + "," + format_double(contour_bound_shape(cfg.c, q, m)) + "\n";
  }
  if (cfg.a > 0) {
    const UnionBudget ub = union_budget(cfg.a);
    out += std::string("union_budget,,") + (ub.divergent ? "divergent" : format_double(ub.value)) + "\n";
  }
  deliver(cfg, out);
  return 0;
}

int dispatch(const std::string& name, const RunConfig& cfg) {
  if (name == "estimate") return cmd_estimate(cfg);
  if (name == "sweep") return cmd_sweep(cfg);
  if (name == "oracle") return cmd_oracle(cfg);
  if (name == "explore") return cmd_explore(cfg);
  if (name == "oriented") return cmd_oriented(cfg);
  return cmd_bounds(cfg);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"simulation and verification toolkit for word percolation"};
  app.require_subcommand(1);
  const std::map<std::string, std::string> help = {
      {"estimate", "run one experiment and emit csv or jsonl"},
      {"sweep", "re-run an experiment across sweep_values of sweep_key"},
      {"oracle", "exhaustive word set seen from one origin"},
      {"explore", "single exploration run with its step log"},
      {"oriented", "oriented-plane runs: mode = event | decay | domination | chain"},
      {"bounds", "closed-form bound values as csv"},
  };
  std::map<std::string, CLI::App*> subs;
  std::map<std::string, std::string> config_paths;
  for (const auto& [name, text] : help) {
    CLI::App* sub = app.add_subcommand(name, text);
    sub->allow_extras();
    sub->add_option("--config", config_paths[name], "config file of 'key = value' lines");
    subs[name] = sub;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    for (const auto& [name, sub] : subs)
      if (sub->parsed()) {
        const std::string& path = config_paths[name];
        const RunConfig cfg = parse_config(path.empty() ? "" : read_text_file(path), sub->remaining());
        return dispatch(name, cfg);
      }
  } catch (const ResourceError& e) {
    std::cerr << "resource: " << e.what() << "\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "io: " << e.what() << "\n";
    return 4;
  } catch (const ConfigError& e) {
    std::cerr << "config: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "config: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
