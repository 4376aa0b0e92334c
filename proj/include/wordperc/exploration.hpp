#pragma once

#include <array>
#include <cstdint>
#include <sstream>
#include <string>
#include <vector>

#include "wordperc/model.hpp"
#include "wordperc/words.hpp"

// Dynamical coupling on the quarter plane.  A word xi drives a growth
// process of "black" vertices x with heights psi(x): a candidate x with a
// black parent y turns black when some trial index i in its designated
// range finds matching site letters at heights psi(y)+i together with an
// open vertical edge at y and an open horizontal edge across to x.  East
// children (x = y + (1,0)) draw i from {1..N}, north children from
// {N+1..N+M}, so the two children of one parent never touch the same
// height.  Every vertex is tested at most once.
//
// Candidates are processed in ascending coordinate sum, ties by ascending
// first coordinate.  Parents at sum s-1 are all settled before any
// candidate at sum s runs, so the sweep below equals the
// earliest-candidate-first frontier rule.

namespace wordperc {

enum class StepKind : std::uint8_t { east, north };

inline const char* to_string(StepKind k) { return k == StepKind::east ? "east" : "north"; }

struct CouplingParams {
  std::uint64_t N = 1;          // east trial range {1..N}
  std::uint64_t M = 1;          // north trial range {N+1..N+M}
  std::uint64_t max_diag = 4;   // determine all vertices with coordinate sum < max_diag
  bool prefer_east_parent = true;

  void validate() const {
    if (N < 1 || M < 1) throw std::invalid_argument("coupling: N and M must be positive");
    if (max_diag < 1) throw std::invalid_argument("coupling: max_diag must be positive");
  }
};

enum class VStatus : std::uint8_t { undetermined, black, white };

struct StepRecord {
  std::uint64_t n = 0;  // 1-based step index
  std::array<std::int64_t, 2> x{}, y{};
  StepKind dir = StepKind::east;
  std::uint64_t i_or_fail = 0;  // chosen i, 0 on failure
  std::int64_t psi = -1;        // height of x when black, -1 otherwise
  std::uint64_t height_truncated = 0;  // trial indices unevaluable in a bounded box
};

struct ExplorationResult {
  std::uint64_t max_diag = 0;
  std::vector<VStatus> status;        // side*side grid, side = max_diag
  std::vector<std::int64_t> psi;      // -1 unless black
  std::vector<std::array<std::int64_t, 2>> parent;  // {-1,-1} unless black non-origin
  std::vector<StepRecord> steps;
  std::uint64_t height_truncated_total = 0;

  std::size_t cell(std::int64_t x1, std::int64_t x2) const { return std::size_t(x1) * max_diag + std::size_t(x2); }
  bool in_grid(std::int64_t x1, std::int64_t x2) const {
    return x1 >= 0 && x2 >= 0 && x1 + x2 < std::int64_t(max_diag);
  }
  VStatus status_at(std::int64_t x1, std::int64_t x2) const {
    return in_grid(x1, x2) ? status[cell(x1, x2)] : VStatus::undetermined;
  }
  bool black_at(std::int64_t x1, std::int64_t x2) const { return status_at(x1, x2) == VStatus::black; }
  std::int64_t psi_at(std::int64_t x1, std::int64_t x2) const { return psi[cell(x1, x2)]; }

  std::vector<std::array<std::int64_t, 2>> a_set() const { return collect(VStatus::black); }
  std::vector<std::array<std::int64_t, 2>> b_set() const { return collect(VStatus::white); }

 private:
  std::vector<std::array<std::int64_t, 2>> collect(VStatus want) const {
    std::vector<std::array<std::int64_t, 2>> out;
    for (std::int64_t s = 0; s < std::int64_t(max_diag); ++s)
      for (std::int64_t x1 = 0; x1 <= s; ++x1)
        if (status[cell(x1, s - x1)] == want) out.push_back({x1, s - x1});
    return out;
  }
};

// Exact probability that one fresh blackness determination succeeds:
// 1 - prod over the trial range of [1 - eps * p_i * P(letter_1) * P(letter_2)],
// with p_i = 0 beyond the truncation K.
inline double step_black_probability(const ModelParams& params, StepKind kind, std::uint64_t N, std::uint64_t M,
                                     int letter1, int letter2) {
  params.validate();
  if (N < 1 || M < 1) throw std::invalid_argument("step_black_probability: N and M must be positive");
  const double pl1 = letter1 ? params.p : 1.0 - params.p;
  const double pl2 = letter2 ? params.p : 1.0 - params.p;
  const std::uint64_t first = kind == StepKind::east ? 1 : N + 1;
  const std::uint64_t last = kind == StepKind::east ? N : N + M;
  double acc = 1.0;
  for (std::uint64_t i = first; i <= last; ++i) {
    const double pi = i <= std::uint64_t(params.K) ? params.pn.value(std::int64_t(i)) : 0.0;
    acc *= 1.0 - params.eps * pi * pl1 * pl2;
  }
  return 1.0 - acc;
}

inline ExplorationResult explore(const Environment& env, const SiteField& sites, const Word& xi,
                                 const CouplingParams& cp) {
  cp.validate();
  if (env.params.d != 3) throw std::invalid_argument("explore: needs a d=3 environment");
  if (sites.d != 3) throw std::invalid_argument("explore: needs a d=3 site field");
  if (xi.length() < 2 * cp.max_diag)
    throw std::invalid_argument("explore: word shorter than 2*max_diag letters");
  for (std::size_t i = 0; i < 2; ++i)
    if (env.box.widths[i] + 1 < std::int64_t(cp.max_diag))
      throw std::invalid_argument("explore: box width " + std::to_string(i + 1) + " below max_diag-1");

  const std::uint64_t side = cp.max_diag;
  ExplorationResult res;
  res.max_diag = side;
  res.status.assign(side * side, VStatus::undetermined);
  res.psi.assign(side * side, -1);
  res.parent.assign(side * side, {-1, -1});

  res.status[res.cell(0, 0)] = VStatus::black;
  res.psi[res.cell(0, 0)] = 0;

  const std::int64_t K = env.params.K;
  const bool lazy = env.box.lazy();
  const std::int64_t height = env.box.height;
  std::uint64_t step_no = 0;

  for (std::int64_t s = 1; s < std::int64_t(side); ++s) {
    for (std::int64_t x1 = 0; x1 <= s; ++x1) {
      const std::int64_t x2 = s - x1;
      // Parent preference: east kind means x = y + (1,0).
      std::array<std::int64_t, 2> east_p{x1 - 1, x2}, north_p{x1, x2 - 1};
      const bool east_ok = res.black_at(east_p[0], east_p[1]);
      const bool north_ok = res.black_at(north_p[0], north_p[1]);
      if (!east_ok && !north_ok) continue;
      const bool use_east = east_ok && (cp.prefer_east_parent || !north_ok);
      const std::array<std::int64_t, 2> y = use_east ? east_p : north_p;
      const StepKind kind = use_east ? StepKind::east : StepKind::north;
      const std::uint64_t first = kind == StepKind::east ? 1 : cp.N + 1;
      const std::uint64_t last = kind == StepKind::east ? cp.N : cp.N + cp.M;
      const std::int64_t psi_y = res.psi[res.cell(y[0], y[1])];
      const std::int64_t letter1 = xi.bit(std::size_t(2 * (s - 1)));      // xi_{2s'+1}, s' = parent sum = s-1
      const std::int64_t letter2 = xi.bit(std::size_t(2 * (s - 1) + 1));  // xi_{2s'+2}
      const int hdir = kind == StepKind::east ? 1 : 2;

      StepRecord rec;
      rec.n = ++step_no;
      rec.x = {x1, x2};
      rec.y = y;
      rec.dir = kind;

      for (std::uint64_t i = first; i <= last; ++i) {
        if (std::int64_t(i) > K) break;  // vertical edge can never open past the truncation
        const std::int64_t h = psi_y + std::int64_t(i);
        if (!lazy && h > height) {
          const std::uint64_t top = std::min<std::uint64_t>(last, std::uint64_t(K));
          rec.height_truncated += top - i + 1;
          break;
        }
        if (sites.label(Coords{y[0], y[1], h}) != letter1) continue;
        if (sites.label(Coords{x1, x2, h}) != letter2) continue;
        if (!env.edge_open(Edge{Coords{y[0], y[1], psi_y}, 3, std::int64_t(i)})) continue;
        if (!env.edge_open(Edge{Coords{y[0], y[1], h}, hdir, 1})) continue;
        rec.i_or_fail = i;
        rec.psi = h;
        break;
      }

      const std::size_t c = res.cell(x1, x2);
      if (rec.i_or_fail != 0) {
        res.status[c] = VStatus::black;
        res.psi[c] = rec.psi;
        res.parent[c] = y;
      } else {
        res.status[c] = VStatus::white;
      }
      res.height_truncated_total += rec.height_truncated;
      res.steps.push_back(rec);
    }
  }
  return res;
}

// L_n lives on coordinate sum n-1; its three parts split by first
// coordinate at n/4 and 3n/4.
struct DiagonalSets {
  std::uint64_t n = 0;
  std::vector<std::array<std::int64_t, 2>> full, part1, part2, part3;
};

inline DiagonalSets diagonal_sets(std::uint64_t n) {
  if (n < 1) throw std::invalid_argument("diagonal_sets: n must be positive");
  DiagonalSets ds;
  ds.n = n;
  for (std::int64_t v1 = 0; v1 < std::int64_t(n); ++v1) {
    const std::array<std::int64_t, 2> v{v1, std::int64_t(n) - 1 - v1};
    ds.full.push_back(v);
    if (4 * std::uint64_t(v1) < n)
      ds.part1.push_back(v);
    else if (4 * std::uint64_t(v1) < 3 * n)
      ds.part2.push_back(v);
    else
      ds.part3.push_back(v);
  }
  return ds;
}

// Black vertices of res on the middle part of L_n.
inline std::vector<std::array<std::int64_t, 2>> black_on_middle(const ExplorationResult& res, std::uint64_t n) {
  if (res.max_diag < n)
    throw std::invalid_argument("exploration stopped before diagonal " + std::to_string(n) +
                                "; rerun with max_diag >= " + std::to_string(n));
  std::vector<std::array<std::int64_t, 2>> out;
  for (const auto& v : diagonal_sets(n).part2)
    if (res.black_at(v[0], v[1])) out.push_back(v);
  return out;
}

inline std::vector<std::array<std::int64_t, 2>> gamma_set(const ExplorationResult& res, std::uint64_t m) {
  if (m < 1) throw std::invalid_argument("gamma_set: m must be positive");
  return black_on_middle(res, 4 * m);
}

inline bool b_event(const ExplorationResult& res, std::uint64_t m) { return gamma_set(res, m).size() >= m; }

// Conjunction of b_event over every driving prefix of length 8m-2,
// zero-padded out to the explored depth.  Enumeration is 2^{8m-2} words.
inline bool d_event(const Environment& env, const SiteField& sites, std::uint64_t m, const CouplingParams& cp,
                    std::uint64_t guard_max_m = 2) {
  if (m < 1) throw std::invalid_argument("d_event: m must be positive");
  if (m > guard_max_m)
    throw ResourceError("d_event: m=" + std::to_string(m) + " needs 2^" + std::to_string(8 * m - 2) +
                        " explorations; guard allows m <= " + std::to_string(guard_max_m));
  if (cp.max_diag < 4 * m) throw std::invalid_argument("d_event: max_diag must be at least 4m");
  for (const Word& eta : enumerate_xi(4 * m)) {
    const Word padded = eta.zero_padded(2 * cp.max_diag);
    if (!b_event(explore(env, sites, padded, cp), m)) return false;
  }
  return true;
}

// The open path in the 3-d lattice certifying that x is black: per ancestor
// step one vertical rise at the parent then one horizontal move to the
// child, ending at (x, psi(x)).  Site labels along it spell the xi prefix.
inline std::vector<Coords> witness_path(const ExplorationResult& res, std::array<std::int64_t, 2> x) {
  if (!res.in_grid(x[0], x[1]) || res.status_at(x[0], x[1]) != VStatus::black)
    throw std::invalid_argument("witness_path: vertex is not black");
  std::vector<std::array<std::int64_t, 2>> chain{x};
  while (!(chain.back()[0] == 0 && chain.back()[1] == 0)) chain.push_back(res.parent[res.cell(chain.back()[0], chain.back()[1])]);
  std::vector<Coords> path{Coords{0, 0, 0}};
  for (std::size_t k = chain.size() - 1; k-- > 0;) {
    const auto& child = chain[k];
    const auto& par = chain[k + 1];
    const std::int64_t h = res.psi_at(child[0], child[1]);
    path.push_back(Coords{par[0], par[1], h});
    path.push_back(Coords{child[0], child[1], h});
  }
  return path;
}

inline std::string step_log_jsonl(const ExplorationResult& res) {
  std::ostringstream out;
  for (const StepRecord& r : res.steps) {
    out << "{\"n\":" << r.n << ",\"x\":[" << r.x[0] << ',' << r.x[1] << "],\"y\":[" << r.y[0] << ',' << r.y[1]
        << "],\"direction\":\"" << to_string(r.dir) << "\",\"i_or_fail\":" << r.i_or_fail << ",\"psi\":" << r.psi;
    if (r.height_truncated) out << ",\"height_truncated\":" << r.height_truncated;
    out << "}\n";
  }
  return out.str();
}

}  // namespace wordperc
