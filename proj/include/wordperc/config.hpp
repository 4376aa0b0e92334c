#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wordperc/mc.hpp"

// Flat key = value configuration covering every experiment knob plus the
// run-level settings (trials, seed, workers, output).  One registry drives
// parsing, flag overrides, and the echo: echo_config() emits a config file
// that parses back to the identical RunConfig, which is what makes every
// output self-describing.

namespace wordperc {

struct RunConfig {
  ExperimentSpec spec;
  std::uint64_t trials = 1000;
  std::uint64_t seed = 1;
  unsigned workers = 0;  // 0: environment variable, then hardware
  std::string out;       // empty: stdout
  std::string format = "csv";

  // sweep subcommand
  std::string sweep_key;
  std::vector<std::string> sweep_values;

  // oriented subcommand
  std::string mode = "event";  // event | decay | domination | chain
  std::vector<std::uint64_t> m_list{1, 2, 3};

  // oracle subcommand
  std::vector<std::int64_t> origin;  // empty: all zeros
  bool print_hex = false;

  // bounds subcommand
  double beta = 0.5;
  double t = 1.0;
  double c = 1.0;
  double a = 0.0;  // 0: skip the series-budget row
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && (s[b] == ' ' || s[b] == '\t')) ++b;
  while (e > b && (s[e - 1] == ' ' || s[e - 1] == '\t' || s[e - 1] == '\r')) --e;
  return s.substr(b, e - b);
}

inline std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  if (trim(s).empty()) return out;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(trim(cur));
  return out;
}

inline std::uint64_t parse_u64(const std::string& s) {
  try {
    if (s.empty() || s[0] == '-') throw std::invalid_argument("sign");
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected a nonnegative integer, got '" + s + "'");
  }
}

inline std::int64_t parse_i64(const std::string& s) {
  try {
    std::size_t pos = 0;
    const long long v = s.empty() ? throw std::invalid_argument("empty") : std::stoll(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected an integer, got '" + s + "'");
  }
}

inline double parse_real(const std::string& s) {
  try {
    std::size_t pos = 0;
    const double v = s.empty() ? throw std::invalid_argument("empty") : std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
}

inline double parse_prob(const std::string& s) {
  const double v = parse_real(s);
  if (v < 0.0 || v > 1.0) throw ConfigError("probability out of [0,1], got '" + s + "'");
  return v;
}

inline bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw ConfigError("expected true/false, got '" + s + "'");
}

struct ConfigKey {
  const char* name;
  std::function<void(RunConfig&, const std::string&)> set;
  std::function<std::string(const RunConfig&)> get;
};

inline const std::vector<ConfigKey>& config_registry() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> r;
    auto add = [&r](const char* name, std::function<void(RunConfig&, const std::string&)> set,
                    std::function<std::string(const RunConfig&)> get) {
      r.push_back({name, std::move(set), std::move(get)});
    };

    add("experiment", [](RunConfig& c, const std::string& v) { c.spec.kind = kind_from_name(v); },
        [](const RunConfig& c) { return std::string(kind_name(c.spec.kind)); });
    add("d", [](RunConfig& c, const std::string& v) { c.spec.params.d = unsigned(parse_u64(v)); },
        [](const RunConfig& c) { return std::to_string(c.spec.params.d); });
    add("p", [](RunConfig& c, const std::string& v) { c.spec.params.p = parse_prob(v); },
        [](const RunConfig& c) { return format_double(c.spec.params.p); });
    add("eps", [](RunConfig& c, const std::string& v) { c.spec.params.eps = parse_prob(v); },
        [](const RunConfig& c) { return format_double(c.spec.params.eps); });
    add("K", [](RunConfig& c, const std::string& v) { c.spec.params.K = parse_i64(v); },
        [](const RunConfig& c) { return std::to_string(c.spec.params.K); });
    add("pn", [](RunConfig& c, const std::string& v) { c.spec.params.pn = PnFamily::parse(v); },
        [](const RunConfig& c) { return c.spec.params.pn.to_string(); });
    add("box", [](RunConfig& c, const std::string& v) { c.spec.box = Box::parse(v); },
        [](const RunConfig& c) { return c.spec.box.to_string(); });
    add("L", [](RunConfig& c, const std::string& v) { c.spec.L = std::size_t(parse_u64(v)); },
        [](const RunConfig& c) { return std::to_string(c.spec.L); });
    add("word", [](RunConfig& c, const std::string& v) { c.spec.xi = Word::from_string(v); },
        [](const RunConfig& c) { return c.spec.xi.to_string(); });
    add("N", [](RunConfig& c, const std::string& v) { c.spec.cp.N = parse_u64(v); },
        [](const RunConfig& c) { return std::to_string(c.spec.cp.N); });
    add("M", [](RunConfig& c, const std::string& v) { c.spec.cp.M = parse_u64(v); },
        [](const RunConfig& c) { return std::to_string(c.spec.cp.M); });
    add("max_diag", [](RunConfig& c, const std::string& v) { c.spec.cp.max_diag = parse_u64(v); },
        [](const RunConfig& c) { return std::to_string(c.spec.cp.max_diag); });
    add("prefer_east_parent",
        [](RunConfig& c, const std::string& v) { c.spec.cp.prefer_east_parent = parse_bool(v); },
        [](const RunConfig& c) { return c.spec.cp.prefer_east_parent ? "true" : "false"; });
    add("step",
        [](RunConfig& c, const std::string& v) {
          if (v == "east") c.spec.step_kind = StepKind::east;
          else if (v == "north") c.spec.step_kind = StepKind::north;
          else throw ConfigError("expected east or north, got '" + v + "'");
        },
        [](const RunConfig& c) { return std::string(to_string(c.spec.step_kind)); });
    add("letter1",
        [](RunConfig& c, const std::string& v) { c.spec.letter1 = int(parse_u64(v)); },
        [](const RunConfig& c) { return std::to_string(c.spec.letter1); });
    add("letter2",
        [](RunConfig& c, const std::string& v) { c.spec.letter2 = int(parse_u64(v)); },
        [](const RunConfig& c) { return std::to_string(c.spec.letter2); });
    add("m", [](RunConfig& c, const std::string& v) { c.spec.m = parse_u64(v); },
        [](const RunConfig& c) { return std::to_string(c.spec.m); });
    add("eta", [](RunConfig& c, const std::string& v) { c.spec.eta = Word::from_string(v); },
        [](const RunConfig& c) { return c.spec.eta.to_string(); });
    add("gamma", [](RunConfig& c, const std::string& v) { c.spec.gamma = parse_prob(v); },
        [](const RunConfig& c) { return format_double(c.spec.gamma); });
    add("event",
        [](RunConfig& c, const std::string& v) {
          if (v == "E1") c.spec.which = ProofEvent::E1;
          else if (v == "E2") c.spec.which = ProofEvent::E2;
          else if (v == "E3") c.spec.which = ProofEvent::E3;
          else if (v == "E4") c.spec.which = ProofEvent::E4;
          else throw ConfigError("expected one of E1..E4, got '" + v + "'");
        },
        [](const RunConfig& c) { return std::string(to_string(c.spec.which)); });
    add("w_left", [](RunConfig& c, const std::string& v) { c.spec.w_left = parse_i64(v); },
        [](const RunConfig& c) { return std::to_string(c.spec.w_left); });
    add("e4_count",
        [](RunConfig& c, const std::string& v) {
          if (v == "middle") c.spec.e4_over_middle = true;
          else if (v == "full") c.spec.e4_over_middle = false;
          else throw ConfigError("expected middle or full, got '" + v + "'");
        },
        [](const RunConfig& c) { return std::string(c.spec.e4_over_middle ? "middle" : "full"); });
    add("rho", [](RunConfig& c, const std::string& v) { c.spec.rho = parse_prob(v); },
        [](const RunConfig& c) { return format_double(c.spec.rho); });
    add("w", [](RunConfig& c, const std::string& v) { c.spec.w = parse_u64(v); },
        [](const RunConfig& c) { return std::to_string(c.spec.w); });
    add("t_burn", [](RunConfig& c, const std::string& v) { c.spec.t_burn = parse_u64(v); },
        [](const RunConfig& c) { return std::to_string(c.spec.t_burn); });
    add("bond_seed",
        [](RunConfig& c, const std::string& v) { c.spec.quenched_bond_seed = parse_u64(v); },
        [](const RunConfig& c) {
          return c.spec.quenched_bond_seed ? std::to_string(*c.spec.quenched_bond_seed) : std::string();
        });
    add("guard_length",
        [](RunConfig& c, const std::string& v) { c.spec.guards.max_length = std::size_t(parse_u64(v)); },
        [](const RunConfig& c) { return std::to_string(c.spec.guards.max_length); });
    add("guard_bytes",
        [](RunConfig& c, const std::string& v) { c.spec.guards.max_bytes = parse_u64(v); },
        [](const RunConfig& c) { return std::to_string(c.spec.guards.max_bytes); });
    add("guard_paths",
        [](RunConfig& c, const std::string& v) { c.spec.guards.max_paths = parse_u64(v); },
        [](const RunConfig& c) { return std::to_string(c.spec.guards.max_paths); });
    add("trials", [](RunConfig& c, const std::string& v) { c.trials = parse_u64(v); },
        [](const RunConfig& c) { return std::to_string(c.trials); });
    add("seed", [](RunConfig& c, const std::string& v) { c.seed = parse_u64(v); },
        [](const RunConfig& c) { return std::to_string(c.seed); });
    add("workers", [](RunConfig& c, const std::string& v) { c.workers = unsigned(parse_u64(v)); },
        [](const RunConfig& c) { return std::to_string(c.workers); });
    add("out", [](RunConfig& c, const std::string& v) { c.out = v; },
        [](const RunConfig& c) { return c.out; });
    add("format",
        [](RunConfig& c, const std::string& v) {
          if (v != "csv" && v != "jsonl" && v != "svg") throw ConfigError("expected csv, jsonl or svg, got '" + v + "'");
          c.format = v;
        },
        [](const RunConfig& c) { return c.format; });
    add("sweep_key", [](RunConfig& c, const std::string& v) { c.sweep_key = v; },
        [](const RunConfig& c) { return c.sweep_key; });
    add("sweep_values", [](RunConfig& c, const std::string& v) { c.sweep_values = split_list(v); },
        [](const RunConfig& c) {
          std::string s;
          for (std::size_t i = 0; i < c.sweep_values.size(); ++i) s += (i ? "," : "") + c.sweep_values[i];
          return s;
        });
    add("mode",
        [](RunConfig& c, const std::string& v) {
          if (v != "event" && v != "decay" && v != "domination" && v != "chain")
            throw ConfigError("expected event, decay, domination or chain, got '" + v + "'");
          c.mode = v;
        },
        [](const RunConfig& c) { return c.mode; });
    add("m_list",
        [](RunConfig& c, const std::string& v) {
          c.m_list.clear();
          for (const std::string& item : split_list(v)) c.m_list.push_back(parse_u64(item));
        },
        [](const RunConfig& c) {
          std::string s;
          for (std::size_t i = 0; i < c.m_list.size(); ++i) s += (i ? "," : "") + std::to_string(c.m_list[i]);
          return s;
        });
    add("origin",
        [](RunConfig& c, const std::string& v) {
          c.origin.clear();
          for (const std::string& item : split_list(v)) c.origin.push_back(parse_i64(item));
        },
        [](const RunConfig& c) {
          std::string s;
          for (std::size_t i = 0; i < c.origin.size(); ++i) s += (i ? "," : "") + std::to_string(c.origin[i]);
          return s;
        });
    add("print_hex", [](RunConfig& c, const std::string& v) { c.print_hex = parse_bool(v); },
        [](const RunConfig& c) { return c.print_hex ? "true" : "false"; });
    add("beta", [](RunConfig& c, const std::string& v) { c.beta = parse_prob(v); },
        [](const RunConfig& c) { return format_double(c.beta); });
    add("t", [](RunConfig& c, const std::string& v) { c.t = parse_real(v); },
        [](const RunConfig& c) { return format_double(c.t); });
    add("c", [](RunConfig& c, const std::string& v) { c.c = parse_real(v); },
        [](const RunConfig& c) { return format_double(c.c); });
    add("a", [](RunConfig& c, const std::string& v) { c.a = parse_real(v); },
        [](const RunConfig& c) { return format_double(c.a); });
    return r;
  }();
  return keys;
}

inline const ConfigKey* find_key(const std::string& name) {
  for (const ConfigKey& k : config_registry())
    if (name == k.name) return &k;
  return nullptr;
}

inline void apply_kv(RunConfig& cfg, const std::string& key, const std::string& value, const std::string& where) {
  const ConfigKey* k = find_key(key);
  if (!k) throw ConfigError(where + ": unknown key '" + key + "'");
  try {
    k->set(cfg, value);
  } catch (const ConfigError& e) {
    throw ConfigError(where + ": key '" + key + "': " + e.what());
  }
}

}  // namespace detail

// `key = value` lines, '#' comments, then flags of the form key=value (an
// optional leading "--" is stripped).  Flags win over file values.
inline RunConfig parse_config(const std::string& file_text, const std::vector<std::string>& flags) {
  RunConfig cfg;
  std::size_t line_no = 0, pos = 0;
  while (pos <= file_text.size()) {
    const std::size_t nl = file_text.find('\n', pos);
    std::string line = file_text.substr(pos, nl == std::string::npos ? std::string::npos : nl - pos);
    pos = nl == std::string::npos ? file_text.size() + 1 : nl + 1;
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value', got '" + line + "'");
    detail::apply_kv(cfg, detail::trim(line.substr(0, eq)), detail::trim(line.substr(eq + 1)), where);
  }
  for (const std::string& raw : flags) {
    std::string flag = raw;
    if (flag.rfind("--", 0) == 0) flag = flag.substr(2);
    const std::size_t eq = flag.find('=');
    const std::string name = detail::trim(eq == std::string::npos ? flag : flag.substr(0, eq));
    const std::string where = "flag --" + name;
    if (eq == std::string::npos) throw ConfigError(where + ": expected key=value");
    detail::apply_kv(cfg, name, detail::trim(flag.substr(eq + 1)), where);
  }
  return cfg;
}

// The fully resolved configuration as a config file.  parse_config of this
// text reproduces `cfg` exactly; it is embedded in every output.
inline std::string echo_config(const RunConfig& cfg) {
  std::string out;
  for (const detail::ConfigKey& k : detail::config_registry()) {
    const std::string v = k.get(cfg);
    if (v.empty() && std::string(k.name) == "bond_seed") continue;  // unset optional
    out += std::string(k.name) + " = " + v + "\n";
  }
  return out;
}

}  // namespace wordperc
