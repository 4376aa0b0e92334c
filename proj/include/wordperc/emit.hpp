#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "wordperc/config.hpp"

// Result emission: a fixed-header CSV, JSON-lines records, and a minimal
// static SVG chart.  Records carry the parameters that shaped them, so any
// output row can be turned back into the run that produced it.

namespace wordperc {

struct ResultRow {
  ExperimentSpec spec;
  EstimateRecord est;
};

// Typed parameter map for one spec: exactly the knobs its kind consumes.
inline nlohmann::json param_json(const ExperimentSpec& s) {
  nlohmann::json j = nlohmann::json::object();
  const auto lattice = [&] {
    j["d"] = s.params.d;
    j["p"] = s.params.p;
    j["eps"] = s.params.eps;
    j["K"] = s.params.K;
    j["pn"] = s.params.pn.to_string();
    j["box"] = s.box.to_string();
  };
  const auto guards = [&] {
    j["guard_length"] = s.guards.max_length;
    j["guard_bytes"] = s.guards.max_bytes;
    j["guard_paths"] = s.guards.max_paths;
  };
  const auto coupling = [&] {
    j["N"] = s.cp.N;
    j["M"] = s.cp.M;
    j["prefer_east"] = s.cp.prefer_east_parent;
  };
  switch (s.kind) {
    case ExperimentKind::words_seen:
      lattice();
      guards();
      j["L"] = s.L;
      break;
    case ExperimentKind::single_word:
      lattice();
      j["word"] = s.xi.to_string();
      break;
    case ExperimentKind::black_step:
      lattice();
      coupling();
      j["which"] = to_string(s.step_kind);
      j["word"] = std::string{char('0' + s.letter1), char('0' + s.letter2)};
      break;
    case ExperimentKind::b_event:
    case ExperimentKind::b_prop_pair:
      lattice();
      coupling();
      j["max_diag"] = s.cp.max_diag;
      j["m"] = s.m;
      j["word"] = s.eta.to_string();
      break;
    case ExperimentKind::d_event:
      lattice();
      coupling();
      j["max_diag"] = s.cp.max_diag;
      j["m"] = s.m;
      break;
    case ExperimentKind::oriented_event:
      j["gamma"] = s.gamma;
      j["m"] = s.m;
      j["which"] = std::string(to_string(s.which));
      if (s.which == ProofEvent::E4) {
        j["w_left"] = s.effective_w_left();
        j["e4_count"] = s.e4_over_middle ? "middle" : "full";
      }
      break;
    case ExperimentKind::ms_count:
      j["gamma"] = s.gamma;
      j["m"] = s.m;
      break;
    case ExperimentKind::domination_window:
      j["gamma"] = s.gamma;
      j["rho"] = s.rho;
      j["w"] = s.w;
      j["t_burn"] = s.t_burn;
      break;
  }
  if (s.quenched_bond_seed) j["bond_seed"] = *s.quenched_bond_seed;
  return j;
}

namespace detail {

inline const std::vector<std::string>& csv_param_columns() {
  static const std::vector<std::string> cols = {"d", "p",  "eps",    "K",        "pn",          "L",   "m",
                                               "which", "gamma", "rho", "w", "t_burn", "N", "M", "max_diag",
                                               "prefer_east", "box", "word", "w_left", "e4_count"};
  return cols;
}

inline std::string csv_cell(const std::string& raw) {
  if (raw.find_first_of(",\"\n") == std::string::npos) return raw;
  std::string quoted = "\"";
  for (char ch : raw) {
    if (ch == '"') quoted += '"';
    quoted += ch;
  }
  return quoted + "\"";
}

inline std::string json_scalar_text(const nlohmann::json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  return v.dump();
}

inline std::string xml_escape(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char ch : s) {
    switch (ch) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += ch;
    }
  }
  return out;
}

}  // namespace detail

inline std::string csv_header() {
  std::string h = "experiment";
  for (const std::string& c : detail::csv_param_columns()) h += "," + c;
  return h + ",trials,successes,refused,p_hat,ci_lo,ci_hi,seed";
}

inline std::string csv_text(const std::vector<ResultRow>& rows) {
  std::string out = csv_header() + "\n";
  for (const ResultRow& row : rows) {
    const nlohmann::json params = param_json(row.spec);
    out += detail::csv_cell(row.est.experiment);
    for (const std::string& col : detail::csv_param_columns())
      out += "," + (params.contains(col) ? detail::csv_cell(detail::json_scalar_text(params[col])) : std::string());
    out += "," + std::to_string(row.est.trials);
    out += "," + std::to_string(row.est.successes);
    out += "," + std::to_string(row.est.refused);
    out += "," + format_double(row.est.p_hat);
    out += "," + format_double(row.est.ci_lo);
    out += "," + format_double(row.est.ci_hi);
    out += "," + std::to_string(row.est.master_seed) + "\n";
  }
  return out;
}

inline nlohmann::json to_json(const ResultRow& row) {
  nlohmann::json j;
  j["experiment"] = row.est.experiment;
  j["digest"] = row.est.digest;
  j["params"] = param_json(row.spec);
  j["trials"] = row.est.trials;
  j["successes"] = row.est.successes;
  j["refused"] = row.est.refused;
  j["p_hat"] = row.est.p_hat;
  j["ci_lo"] = row.est.ci_lo;
  j["ci_hi"] = row.est.ci_hi;
  j["seed"] = row.est.master_seed;
  j["wall_seconds"] = row.est.wall_seconds;
  return j;
}

inline EstimateRecord estimate_from_json(const nlohmann::json& j) {
  EstimateRecord est;
  est.experiment = j.at("experiment").get<std::string>();
  est.digest = j.at("digest").get<std::string>();
  est.trials = j.at("trials").get<std::uint64_t>();
  est.successes = j.at("successes").get<std::uint64_t>();
  est.refused = j.at("refused").get<std::uint64_t>();
  est.p_hat = j.at("p_hat").get<double>();
  est.ci_lo = j.at("ci_lo").get<double>();
  est.ci_hi = j.at("ci_hi").get<double>();
  est.master_seed = j.at("seed").get<std::uint64_t>();
  est.wall_seconds = j.at("wall_seconds").get<double>();
  return est;
}

inline std::string jsonl_text(const std::vector<ResultRow>& rows) {
  std::string out;
  for (const ResultRow& row : rows) out += to_json(row).dump() + "\n";
  return out;
}

struct SvgPoint {
  double x = 0.0;
  double p_hat = 0.0, ci_lo = 0.0, ci_hi = 1.0;
};

// 640x400 line chart of p_hat vs x with CI whiskers; y axis is always
// [0,1].  The resolved config rides along in <desc>.
inline std::string svg_text(const std::string& title, const std::string& x_label,
                            const std::vector<SvgPoint>& points, const std::string& config_echo) {
  if (points.empty()) throw ConfigError("svg: no records to plot");
  const double left = 60, right = 620, top = 30, bottom = 355;
  double x_min = points.front().x, x_max = points.front().x;
  for (const SvgPoint& p : points) {
    x_min = std::min(x_min, p.x);
    x_max = std::max(x_max, p.x);
  }
  if (x_max == x_min) {
    x_min -= 0.5;
    x_max += 0.5;
  }
  const auto sx = [&](double x) { return left + (x - x_min) / (x_max - x_min) * (right - left); };
  const auto sy = [&](double p) { return bottom - p * (bottom - top); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 640 400\" font-family=\"monospace\" font-size=\"12\">\n";
  s += "<desc>" + detail::xml_escape(config_echo) + "</desc>\n";
  s += "<text x=\"320\" y=\"18\" text-anchor=\"middle\">" + detail::xml_escape(title) + "</text>\n";
  s += "<line x1=\"60\" y1=\"355\" x2=\"620\" y2=\"355\" stroke=\"black\"/>\n";
  s += "<line x1=\"60\" y1=\"30\" x2=\"60\" y2=\"355\" stroke=\"black\"/>\n";
  for (double tick : {0.0, 0.5, 1.0}) {
    s += "<line x1=\"55\" y1=\"" + format_double(sy(tick)) + "\" x2=\"60\" y2=\"" + format_double(sy(tick)) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"50\" y=\"" + format_double(sy(tick) + 4) + "\" text-anchor=\"end\">" + format_double(tick) +
         "</text>\n";
  }
  s += "<text x=\"60\" y=\"375\" text-anchor=\"middle\">" + format_double(x_min) + "</text>\n";
  s += "<text x=\"620\" y=\"375\" text-anchor=\"middle\">" + format_double(x_max) + "</text>\n";
  s += "<text x=\"340\" y=\"392\" text-anchor=\"middle\">" + detail::xml_escape(x_label) + "</text>\n";

  std::string poly = "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (const SvgPoint& p : points) poly += format_double(sx(p.x)) + "," + format_double(sy(p.p_hat)) + " ";
  s += poly + "\"/>\n";
  for (const SvgPoint& p : points) {
    s += "<line class=\"ci\" x1=\"" + format_double(sx(p.x)) + "\" y1=\"" + format_double(sy(p.ci_lo)) + "\" x2=\"" +
         format_double(sx(p.x)) + "\" y2=\"" + format_double(sy(p.ci_hi)) + "\" stroke=\"gray\"/>\n";
    s += "<circle class=\"pt\" cx=\"" + format_double(sx(p.x)) + "\" cy=\"" + format_double(sy(p.p_hat)) +
         "\" r=\"3\" fill=\"steelblue\"/>\n";
  }
  s += "</svg>\n";
  return s;
}

// The oriented subcommand's fixed 8-column table.
struct OrientedRow {
  std::uint64_t m = 0;
  double gamma = 0.0;
  std::string event;
  std::uint64_t trials = 0, successes = 0;
  double p_hat = 0.0, ci_lo = 0.0, ci_hi = 1.0;
};

inline std::string oriented_csv(const std::vector<OrientedRow>& rows) {
  std::string out = "m,gamma,event,trials,successes,p_hat,ci_lo,ci_hi\n";
  for (const OrientedRow& r : rows) {
    out += std::to_string(r.m) + "," + format_double(r.gamma) + "," + detail::csv_cell(r.event) + "," +
           std::to_string(r.trials) + "," + std::to_string(r.successes) + "," + format_double(r.p_hat) + "," +
           format_double(r.ci_lo) + "," + format_double(r.ci_hi) + "\n";
  }
  return out;
}

inline void write_file(const std::string& path, const std::string& text) {
  std::ofstream ofs(path, std::ios::binary);
  if (!ofs) throw IoError("cannot open '" + path + "' for writing");
  ofs << text;
  ofs.flush();
  if (!ofs) throw IoError("failed while writing '" + path + "'");
}

}  // namespace wordperc
