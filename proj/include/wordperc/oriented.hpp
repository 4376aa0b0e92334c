#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wordperc/common.hpp"
#include "wordperc/model.hpp"

// Oriented site percolation on the plane: each vertex of a rectangle is
// occupied independently with probability gamma, and flow moves by +e1/+e2
// steps through occupied vertices.  Sources count as given: a path needs
// occupancy from its second vertex on, never at the source itself.
//
// On top of the raw reachability sit the proof-shaped objects: the boxes
// T_{m,1}/T_{m,2}, the events E1..E4, the count M_S over the middle of the
// diagonal at sum 16m-1, the diagonal Markov chain, and two packaged
// experiments (decay of P(M_S < 4m) in m, and a product-measure domination
// spot check).

namespace wordperc {

using V2 = std::array<std::int64_t, 2>;

struct Rect {
  std::int64_t x_lo = 0, x_hi = 0, y_lo = 0, y_hi = 0;  // inclusive

  void validate() const {
    if (x_lo > x_hi || y_lo > y_hi) throw std::invalid_argument("rect: empty region");
  }
  bool contains(std::int64_t x, std::int64_t y) const { return x >= x_lo && x <= x_hi && y >= y_lo && y <= y_hi; }
  std::uint64_t width() const { return std::uint64_t(x_hi - x_lo + 1); }
  std::uint64_t height() const { return std::uint64_t(y_hi - y_lo + 1); }
  std::uint64_t cells() const { return width() * height(); }
  std::string to_string() const {
    return "[" + std::to_string(x_lo) + "," + std::to_string(x_hi) + "]x[" + std::to_string(y_lo) + "," +
           std::to_string(y_hi) + "]";
  }
};

struct OrientedConfig {
  Rect region;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::uint8_t> occ;  // row-major over (x - x_lo) * height + (y - y_lo)

  std::size_t cell(std::int64_t x, std::int64_t y) const {
    return std::size_t(x - region.x_lo) * region.height() + std::size_t(y - region.y_lo);
  }
  bool occupied(std::int64_t x, std::int64_t y) const { return region.contains(x, y) && occ[cell(x, y)] != 0; }
  double occupied_fraction() const {
    std::uint64_t k = 0;
    for (std::uint8_t b : occ) k += b;
    return double(k) / double(occ.size());
  }
};

// Occupancy of (x, y) is uniform_at(seed, site id of (x, y)) < gamma, so
// configurations with shared seed are nested across gamma.
inline OrientedConfig sample_region(double gamma, const Rect& region, std::uint64_t seed) {
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("sample_region: gamma must be a probability");
  region.validate();
  if (region.cells() > (std::uint64_t(1) << 26))
    throw ResourceError("sample_region: region of " + std::to_string(region.cells()) +
                        " cells exceeds the 2^26 occupancy budget");
  OrientedConfig cfg;
  cfg.region = region;
  cfg.gamma = gamma;
  cfg.seed = seed;
  cfg.occ.assign(region.cells(), 0);
  for (std::int64_t x = region.x_lo; x <= region.x_hi; ++x)
    for (std::int64_t y = region.y_lo; y <= region.y_hi; ++y)
      cfg.occ[cfg.cell(x, y)] = to_unit_interval(site_hash(seed, Coords{x, y})) < gamma ? 1 : 0;
  return cfg;
}

// Mask over region cells of every vertex reachable from `sources`.  A
// vertex after the source must lie in the region, satisfy `constraint`
// (when given), and be occupied.  Sources inside the region are reachable
// as given, constraint-exempt.
inline std::vector<std::uint8_t> reachable_mask(const OrientedConfig& cfg, const std::vector<V2>& sources,
                                                const std::function<bool(std::int64_t, std::int64_t)>& constraint = {}) {
  std::vector<std::uint8_t> mask(cfg.occ.size(), 0);
  std::vector<V2> queue;
  for (const V2& s : sources) {
    if (!cfg.region.contains(s[0], s[1])) continue;
    std::uint8_t& m = mask[cfg.cell(s[0], s[1])];
    if (!m) {
      m = 1;
      queue.push_back(s);
    }
  }
  while (!queue.empty()) {
    const V2 v = queue.back();
    queue.pop_back();
    for (const V2 nxt : {V2{v[0] + 1, v[1]}, V2{v[0], v[1] + 1}}) {
      if (!cfg.region.contains(nxt[0], nxt[1])) continue;
      if (constraint && !constraint(nxt[0], nxt[1])) continue;
      if (!cfg.occupied(nxt[0], nxt[1])) continue;
      std::uint8_t& m = mask[cfg.cell(nxt[0], nxt[1])];
      if (!m) {
        m = 1;
        queue.push_back(nxt);
      }
    }
  }
  return mask;
}

inline std::vector<V2> reachable(const OrientedConfig& cfg, const std::vector<V2>& sources,
                                 const std::function<bool(std::int64_t, std::int64_t)>& constraint = {}) {
  const auto mask = reachable_mask(cfg, sources, constraint);
  std::vector<V2> out;
  for (std::int64_t x = cfg.region.x_lo; x <= cfg.region.x_hi; ++x)
    for (std::int64_t y = cfg.region.y_lo; y <= cfg.region.y_hi; ++y)
      if (mask[cfg.cell(x, y)]) out.push_back({x, y});
  return out;
}

// Quarter-plane diagonal at coordinate sum n-1 and its three parts by
// first coordinate, as flat vertex lists (mirrors the sets used by the
// exploration side, duplicated here to keep this header standalone).
inline std::vector<V2> plane_diagonal(std::uint64_t n, int part /* 0=full,1,2,3 */) {
  std::vector<V2> out;
  for (std::int64_t u = 0; u < std::int64_t(n); ++u) {
    const bool in1 = 4 * std::uint64_t(u) < n;
    const bool in3 = 4 * std::uint64_t(u) >= 3 * n;
    const bool in2 = !in1 && !in3;
    if (part == 0 || (part == 1 && in1) || (part == 2 && in2) || (part == 3 && in3))
      out.push_back({u, std::int64_t(n) - 1 - u});
  }
  return out;
}

struct ProofBoxes {
  std::uint64_t m = 0;
  std::int64_t w_left = 0;
  std::vector<V2> t1, t2;          // T_{m,1}, T_{m,2}
  std::vector<V2> script_line;     // the diagonal at sum 4m-1 extended w_left to the left
};

inline bool in_t1(std::uint64_t m, std::int64_t u, std::int64_t v) {
  return v >= std::int64_t(3 * m) && v < std::int64_t(4 * m) && u + v >= std::int64_t(4 * m) &&
         u + v < std::int64_t(16 * m);
}
inline bool in_t2(std::uint64_t m, std::int64_t u, std::int64_t v) { return in_t1(m, v, u); }

inline ProofBoxes proof_boxes(std::uint64_t m, std::int64_t w_left = -1) {
  if (m < 1) throw std::invalid_argument("proof_boxes: m must be positive");
  ProofBoxes pb;
  pb.m = m;
  pb.w_left = w_left < 0 ? std::int64_t(8 * m) : w_left;
  for (std::int64_t u = 0; u <= std::int64_t(13 * m); ++u)
    for (std::int64_t v = std::int64_t(3 * m); v < std::int64_t(4 * m); ++v) {
      if (in_t1(m, u, v)) pb.t1.push_back({u, v});
      if (in_t2(m, v, u)) pb.t2.push_back({v, u});
    }
  for (std::int64_t u = -pb.w_left; u < std::int64_t(4 * m); ++u)
    pb.script_line.push_back({u, std::int64_t(4 * m) - 1 - u});
  return pb;
}

// M_S: how many vertices of the middle part of the diagonal at sum 16m-1
// the source set S reaches.
inline std::uint64_t m_s(const OrientedConfig& cfg, std::uint64_t m, const std::vector<V2>& S);

namespace detail {
inline void require_region(const OrientedConfig& cfg, const Rect& need, const char* what) {
  if (cfg.region.x_lo <= need.x_lo && cfg.region.x_hi >= need.x_hi && cfg.region.y_lo <= need.y_lo &&
      cfg.region.y_hi >= need.y_hi)
    return;
  throw std::invalid_argument(std::string(what) + ": region " + cfg.region.to_string() + " must cover " +
                              need.to_string());
}
}  // namespace detail

inline std::uint64_t m_s(const OrientedConfig& cfg, std::uint64_t m, const std::vector<V2>& S) {
  if (m < 1) throw std::invalid_argument("m_s: m must be positive");
  for (const V2& s : S)
    if (s[0] + s[1] != std::int64_t(4 * m) - 1)
      throw std::invalid_argument("m_s: source off the diagonal at sum 4m-1");
  detail::require_region(cfg, Rect{std::int64_t(4 * m), std::int64_t(12 * m) - 1, std::int64_t(4 * m), std::int64_t(12 * m) - 1},
                         "m_s");
  const auto mask = reachable_mask(cfg, S);
  std::uint64_t count = 0;
  for (const V2& v : plane_diagonal(16 * m, 2))
    if (cfg.region.contains(v[0], v[1]) && mask[cfg.cell(v[0], v[1])]) ++count;
  return count;
}

enum class ProofEvent { E1, E2, E3, E4 };

inline const char* to_string(ProofEvent e) {
  switch (e) {
    case ProofEvent::E1: return "E1";
    case ProofEvent::E2: return "E2";
    case ProofEvent::E3: return "E3";
    default: return "E4";
  }
}

// Reach counts from the left-extended diagonal to the target diagonal at
// sum 16m-1, under both counting conventions: the whole quarter-plane
// diagonal and its middle part only.
struct LineFlow {
  std::uint64_t over_full_diagonal = 0;
  std::uint64_t over_middle = 0;
};

inline LineFlow line_flow_counts(const OrientedConfig& cfg, std::uint64_t m, std::int64_t w_left = -1) {
  const ProofBoxes pb = proof_boxes(m, w_left);
  const std::int64_t top = std::int64_t(16 * m) - 1;
  detail::require_region(cfg, Rect{-pb.w_left, top, 0, top + pb.w_left}, "line_flow_counts");
  const auto mask = reachable_mask(cfg, pb.script_line);
  LineFlow lf;
  for (const V2& v : plane_diagonal(16 * m, 0))
    if (mask[cfg.cell(v[0], v[1])]) ++lf.over_full_diagonal;
  for (const V2& v : plane_diagonal(16 * m, 2))
    if (mask[cfg.cell(v[0], v[1])]) ++lf.over_middle;
  return lf;
}

// E1: the first quarter of the diagonal at sum 4m-1 reaches sum 16m-1
//     inside T_{m,1}.
// E2: S reaches the diagonal at sum 16m-1 unconstrained.
// E3: mirror of E1 through T_{m,2}.
// E4: the left-extended diagonal reaches at least 4m vertices of the
//     diagonal at sum 16m-1; by default counted over the middle part (the
//     count that feeds the per-configuration implication below), with the
//     full-diagonal count available via e4_over_middle = false.
inline bool event_indicator(const OrientedConfig& cfg, std::uint64_t m, const std::vector<V2>& S, ProofEvent which,
                            std::int64_t w_left = -1, bool e4_over_middle = true) {
  if (m < 1) throw std::invalid_argument("event_indicator: m must be positive");
  const std::int64_t top = std::int64_t(16 * m) - 1;
  if (which == ProofEvent::E4) {
    const LineFlow lf = line_flow_counts(cfg, m, w_left);
    return (e4_over_middle ? lf.over_middle : lf.over_full_diagonal) >= 4 * m;
  }
  detail::require_region(cfg, Rect{0, top, 0, top}, "event_indicator");
  const auto target = plane_diagonal(16 * m, 0);
  auto hits_target = [&](const std::vector<std::uint8_t>& mask) {
    for (const V2& v : target)
      if (mask[cfg.cell(v[0], v[1])]) return true;
    return false;
  };
  switch (which) {
    case ProofEvent::E1:
      return hits_target(
          reachable_mask(cfg, plane_diagonal(4 * m, 1), [m](std::int64_t u, std::int64_t v) { return in_t1(m, u, v); }));
    case ProofEvent::E2: {
      for (const V2& s : S)
        if (s[0] + s[1] != std::int64_t(4 * m) - 1)
          throw std::invalid_argument("event_indicator: source off the diagonal at sum 4m-1");
      return hits_target(reachable_mask(cfg, S));
    }
    case ProofEvent::E3:
      return hits_target(
          reachable_mask(cfg, plane_diagonal(4 * m, 3), [m](std::int64_t u, std::int64_t v) { return in_t2(m, u, v); }));
    default:
      return false;  // unreachable
  }
}

// ---------------------------------------------------------------------------
// Diagonal Markov chain: active first-coordinates on successive diagonals.

struct ChainState {
  std::int64_t t = 0;
  std::int64_t x_lo = 0;                // first coordinate of active[0]
  std::vector<std::uint8_t> active;     // window of first-coordinates, vacant outside

  bool is_active(std::int64_t x) const {
    return x >= x_lo && x < x_lo + std::int64_t(active.size()) && active[std::size_t(x - x_lo)] != 0;
  }
  std::uint64_t active_count() const {
    std::uint64_t k = 0;
    for (std::uint8_t b : active) k += b;
    return k;
  }
};

// x is active at t+1 iff the site (x, t+1-x) is occupied and x or x-1 was
// active at t.  Occupancy reuses the site hash, so a chain with seed s
// walks exactly the configuration sample_region would draw with seed s.
inline ChainState chain_step(const ChainState& st, double gamma, std::uint64_t seed) {
  if (gamma < 0.0 || gamma > 1.0) throw std::invalid_argument("chain_step: gamma must be a probability");
  ChainState out;
  out.t = st.t + 1;
  out.x_lo = st.x_lo;
  out.active.assign(st.active.size(), 0);
  for (std::size_t k = 0; k < out.active.size(); ++k) {
    const std::int64_t x = st.x_lo + std::int64_t(k);
    if (!st.is_active(x) && !st.is_active(x - 1)) continue;
    if (to_unit_interval(site_hash(seed, Coords{x, out.t - x})) < gamma) out.active[k] = 1;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Packaged experiments.

struct DominationCheck {
  std::uint64_t trials = 0, successes = 0;
  double p_hat = 0.0, sigma = 0.0, threshold = 0.0;
  bool passed = false;
};

// Necessary condition for domination of the long-run chain law by the
// product measure at density rho: after t_burn steps from a full window,
// P(block {0..w-1} fully active) should not fall below rho^w by more than
// noise.  Passing is evidence, not proof.
inline DominationCheck domination_window_check(double gamma, double rho, std::uint64_t w, std::uint64_t t_burn,
                                               std::uint64_t trials, std::uint64_t seed, unsigned workers = 0) {
  if (gamma < 0.0 || gamma > 1.0 || rho < 0.0 || rho > 1.0)
    throw std::invalid_argument("domination_window_check: gamma and rho must be probabilities");
  if (w < 1 || w > 6) throw std::invalid_argument("domination_window_check: window size must be in 1..6");
  if (t_burn < w) throw std::invalid_argument("domination_window_check: t_burn must be at least the window size");
  if (trials < 1) throw std::invalid_argument("domination_window_check: trials must be positive");

  const std::int64_t half = std::int64_t(t_burn + w);
  const auto counts = run_trials(trials, workers, [&](std::uint64_t trial) {
    const std::uint64_t s = derive_seed(seed, trial, Stream::oriented);
    ChainState st;
    st.t = 0;
    st.x_lo = -half;
    st.active.assign(std::size_t(2 * half + 1), 1);
    for (std::uint64_t t = 0; t < t_burn; ++t) st = chain_step(st, gamma, s);
    for (std::uint64_t x = 0; x < w; ++x)
      if (!st.is_active(std::int64_t(x))) return TrialOutcome::failure;
    return TrialOutcome::success;
  });

  DominationCheck dc;
  dc.trials = trials;
  dc.successes = counts.successes;
  dc.p_hat = double(counts.successes) / double(trials);
  dc.sigma = std::sqrt(dc.p_hat * (1.0 - dc.p_hat) / double(trials));
  dc.threshold = std::pow(rho, double(w)) - 3.0 * dc.sigma;
  dc.passed = dc.p_hat >= dc.threshold;
  return dc;
}

struct DecayRow {
  std::uint64_t m = 0, trials = 0, successes = 0;
  double p_hat = 0.0, ci_lo = 0.0, ci_hi = 1.0;
};

// Estimates P(M_S < 4m) with S the middle of the diagonal at sum 4m-1,
// per m, on fresh quarter-plane windows below sum 16m.
inline std::vector<DecayRow> decay_experiment(double gamma, const std::vector<std::uint64_t>& m_list,
                                              std::uint64_t trials, std::uint64_t seed, unsigned workers = 0) {
  if (trials < 1) throw std::invalid_argument("decay_experiment: trials must be positive");
  std::vector<DecayRow> rows;
  for (std::uint64_t m : m_list) {
    if (m < 1) throw std::invalid_argument("decay_experiment: m must be positive");
    const std::int64_t top = std::int64_t(16 * m) - 1;
    const Rect region{0, top, 0, top};
    const std::vector<V2> S = plane_diagonal(4 * m, 2);
    const auto counts = run_trials(trials, workers, [&](std::uint64_t trial) {
      const OrientedConfig cfg = sample_region(gamma, region, derive_seed(seed, trial, Stream::oriented));
      return m_s(cfg, m, S) < 4 * m ? TrialOutcome::success : TrialOutcome::failure;
    });
    DecayRow row;
    row.m = m;
    row.trials = trials;
    row.successes = counts.successes;
    row.p_hat = double(counts.successes) / double(trials);
    const WilsonInterval ci = wilson_ci(counts.successes, trials);
    row.ci_lo = ci.lo;
    row.ci_hi = ci.hi;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace wordperc
