#pragma once

#include <cstdint>
#include <vector>

#include "wordperc/model.hpp"
#include "wordperc/words.hpp"

// Which words does the environment show from a fixed start vertex?  A word
// xi_1..xi_L is seen when some oriented open path v_0 -> v_1 -> ... -> v_L
// from the start has site labels X(v_i) = xi_i for i >= 1 (the start's own
// label never matters).  Three routes to the same answer live here:
//
//   seen_words        dense dynamic program, the production path
//   sees_word         single-word frontier walk, independent cross-check
//   brute_force_seen  exhaustive path enumeration, the tiny-case anchor
//
// The DP runs backward over path positions: T_v holds every word readable
// from v in the remaining steps, and position j needs only positions j, j+1.
// Vertices are processed layer by layer in decreasing coordinate-sum order
// (every open edge strictly raises the coordinate sum, so layers are
// antichains).  Only vertices actually reachable from the start in the step
// budget are materialized, which keeps lazy-height boxes finite.

namespace wordperc {

struct SeenGuards {
  std::size_t max_length = 14;            // refuse longer words unless raised
  std::uint64_t max_bytes = 512ull << 20;  // DP allocation budget
  std::uint64_t max_paths = 1'000'000;     // brute-force enumeration budget
};

namespace detail {

// Sub-box of vertices reachable from `origin` within `steps` oriented moves:
// each short coordinate can rise at most `steps`, the long coordinate at
// most steps * K.  Dense row-major cell ids over that window.
struct ReachWindow {
  Coords origin;
  int d = 0;
  std::array<std::int64_t, kMaxDim> extent{};  // inclusive upper offsets
  std::array<std::uint64_t, kMaxDim> stride{};
  std::uint64_t cells = 0;

  ReachWindow(const Environment& env, const Coords& origin_, std::size_t steps) {
    origin = origin_;
    d = env.params.d;
    const auto& box = env.box;
    for (int i = 0; i + 1 < d; ++i)
      extent[i] = std::min<std::int64_t>(box.widths[size_t(i)] - origin[i], std::int64_t(steps));
    const std::int64_t climb = std::int64_t(steps) * std::max<std::int64_t>(env.params.K, 0);
    extent[d - 1] = box.lazy() ? climb : std::min<std::int64_t>(box.height - origin[d - 1], climb);
    std::uint64_t n = 1;
    for (int i = d - 1; i >= 0; --i) {
      stride[i] = n;
      const std::uint64_t span = std::uint64_t(extent[i] < 0 ? 0 : extent[i]) + 1;
      if (n > (std::uint64_t(1) << 40) / span)
        throw ResourceError("seen_words: reachable window of " + std::to_string(n) + " x " + std::to_string(span) +
                            " cells exceeds the index budget");
      n *= span;
    }
    cells = n;
  }

  bool inside(const Coords& v) const {
    for (int i = 0; i < d; ++i) {
      const std::int64_t off = v[i] - origin[i];
      if (off < 0 || off > extent[i]) return false;
    }
    return true;
  }
  std::uint64_t cell_of(const Coords& v) const {
    std::uint64_t id = 0;
    for (int i = 0; i < d; ++i) id += stride[i] * std::uint64_t(v[i] - origin[i]);
    return id;
  }
  Coords coords_of(std::uint64_t id) const {
    Coords v = Coords::zeros(d);
    for (int i = 0; i < d; ++i) {
      v[i] = origin[i] + std::int64_t(id / stride[i]);
      id %= stride[i];
    }
    return v;
  }
};

struct OpenOut {
  std::uint32_t target;  // cell id
  std::uint8_t label;
};

// Open out-edges of v whose head stays inside window and box, with the
// head's site label.  Enumeration order: short directions 1..d-1, then long
// jumps n = 1..K.
inline void open_out_edges(const Environment& env, const SiteField& sites, const ReachWindow& win, const Coords& v,
                           std::vector<OpenOut>& out) {
  out.clear();
  const int d = env.params.d;
  for (int dir = 1; dir < d; ++dir) {
    Edge e{v, dir, 1};
    Coords h = e.head();
    if (!win.inside(h) || !env.box.contains(h)) continue;
    if (env.edge_uniform(e) < env.params.eps)
      out.push_back({std::uint32_t(win.cell_of(h)), std::uint8_t(sites.label(h))});
  }
  const std::int64_t max_len = std::min<std::int64_t>(env.params.K, win.extent[d - 1] - (v[d - 1] - win.origin[d - 1]));
  for (std::int64_t n = 1; n <= max_len; ++n) {
    Edge e{v, d, n};
    if (env.edge_uniform(e) < env.edge_threshold(e)) {
      Coords h = e.head();
      if (!env.box.contains(h)) break;  // non-lazy box ran out of height
      out.push_back({std::uint32_t(win.cell_of(h)), std::uint8_t(sites.label(h))});
    }
  }
}

}  // namespace detail

// All words of length L seen from `origin`.
inline WordSet seen_words(const Environment& env, const SiteField& sites, const Coords& origin, std::size_t L,
                          const SeenGuards& guards = {}) {
  if (sites.d != env.params.d) throw std::invalid_argument("seen_words: site field dimension != model d");
  if (!env.box.contains(origin)) throw std::invalid_argument("seen_words: origin must lie in the box");
  if (L > guards.max_length)
    throw ResourceError("seen_words: length " + std::to_string(L) + " exceeds the guard (" +
                        std::to_string(guards.max_length) + "); raise max_length deliberately");
  WordSet trivial(0);
  trivial.insert(std::uint64_t(0));
  if (L == 0) return trivial;  // only the empty word

  detail::ReachWindow win(env, origin, L);

  // Forward pass: layers[j] = vertices reachable in exactly j steps.
  // Adjacency is sampled once per touched vertex and reused.
  std::vector<std::vector<std::uint32_t>> layers(L + 1);
  std::vector<std::int32_t> adj_first(win.cells, -1);
  std::vector<std::uint32_t> adj_count(win.cells, 0);
  std::vector<detail::OpenOut> pool;
  std::vector<std::int32_t> seen_stamp(win.cells, -1);
  std::vector<detail::OpenOut> scratch;

  layers[0].push_back(std::uint32_t(win.cell_of(origin)));
  for (std::size_t j = 0; j < L; ++j) {
    for (std::uint32_t cell : layers[j]) {
      if (adj_first[cell] < 0) {
        detail::open_out_edges(env, sites, win, win.coords_of(cell), scratch);
        adj_first[cell] = std::int32_t(pool.size());
        adj_count[cell] = std::uint32_t(scratch.size());
        pool.insert(pool.end(), scratch.begin(), scratch.end());
      }
      const auto* es = pool.data() + adj_first[cell];
      for (std::uint32_t k = 0; k < adj_count[cell]; ++k) {
        const std::uint32_t u = es[k].target;
        if (seen_stamp[u] != std::int32_t(j + 1)) {
          seen_stamp[u] = std::int32_t(j + 1);
          layers[j + 1].push_back(u);
        }
      }
    }
  }

  // Budget check: peak holds two adjacent DP layers.
  auto row_blocks = [](std::size_t len) { return std::size_t(1) << (len < 6 ? 0 : len - 6); };
  std::uint64_t peak = 0;
  for (std::size_t j = 0; j < L; ++j) {
    const std::uint64_t need = 8ull * (layers[j].size() * row_blocks(L - j) + layers[j + 1].size() * row_blocks(L - j - 1));
    peak = std::max(peak, need);
  }
  if (peak > guards.max_bytes)
    throw ResourceError("seen_words: DP needs " + std::to_string(peak) + " bytes (layer vertices x 2^length), budget " +
                        std::to_string(guards.max_bytes));

  // Backward pass.  rows[j] maps cell -> row in layer j's flat buffer.
  std::vector<std::int32_t> row_next(win.cells, -1), row_cur(win.cells, -1);
  for (std::size_t r = 0; r < layers[L].size(); ++r) row_next[layers[L][r]] = std::int32_t(r);
  std::vector<std::uint64_t> t_next(std::max<std::size_t>(1, layers[L].size()), 1ull);  // every T at position L = {empty}
  for (std::size_t jj = L; jj-- > 0;) {
    const std::size_t len = L - jj;            // word length held at position jj
    const std::size_t dst_blocks = row_blocks(len);
    const std::size_t src_blocks = row_blocks(len - 1);
    const std::uint64_t half_bits = std::uint64_t(1) << (len - 1);
    std::vector<std::uint64_t> t_cur(layers[jj].size() * dst_blocks, 0);
    for (std::uint32_t cell : layers[jj]) row_cur[cell] = -1;
    for (std::size_t r = 0; r < layers[jj].size(); ++r) row_cur[layers[jj][r]] = std::int32_t(r);
    for (std::size_t r = 0; r < layers[jj].size(); ++r) {
      const std::uint32_t cell = layers[jj][r];
      std::uint64_t* dst = t_cur.data() + r * dst_blocks;
      const auto* es = pool.data() + adj_first[cell];
      for (std::uint32_t k = 0; k < adj_count[cell]; ++k) {
        const std::int32_t sr = row_next[es[k].target];
        if (sr < 0) continue;  // unreachable at the next position: contributes nothing here
        const std::uint64_t* src = t_next.data() + std::size_t(sr) * src_blocks;
        if (half_bits >= 64) {
          std::uint64_t* d0 = dst + (es[k].label ? src_blocks : 0);
          for (std::size_t b = 0; b < src_blocks; ++b) d0[b] |= src[b];
        } else {
          dst[0] |= src[0] << (es[k].label ? half_bits : 0);
        }
      }
    }
    std::swap(row_next, row_cur);
    t_next = std::move(t_cur);
  }

  WordSet result(L);
  const std::int32_t origin_row = row_next[win.cell_of(origin)];
  if (origin_row >= 0) {
    const std::size_t nb = row_blocks(L);
    for (std::uint64_t idx = 0; idx < result.capacity(); ++idx)
      if ((t_next[std::size_t(origin_row) * nb + (idx >> 6)] >> (idx & 63)) & 1ull) result.insert(idx);
  }
  return result;
}

// Does the environment show this one word?  Forward frontier walk keeping
// only vertices whose label matches the next letter; shares nothing with the
// dynamic program above beyond the environment itself.
inline bool sees_word(const Environment& env, const SiteField& sites, const Coords& origin, const Word& xi) {
  if (sites.d != env.params.d) throw std::invalid_argument("sees_word: site field dimension != model d");
  if (!env.box.contains(origin)) throw std::invalid_argument("sees_word: origin must lie in the box");
  const std::size_t L = xi.length();
  if (L == 0) return true;
  detail::ReachWindow win(env, origin, L);
  std::vector<std::int32_t> stamp(win.cells, -1);
  std::vector<Coords> frontier{origin}, next;
  const int d = env.params.d;
  for (std::size_t step = 0; step < L; ++step) {
    const int want = xi.bit(step);
    next.clear();
    for (const Coords& v : frontier) {
      auto try_head = [&](const Edge& e) {
        Coords h = e.head();
        if (!win.inside(h) || !env.box.contains(h)) return;
        if (!env.edge_open(e)) return;
        if (sites.label(h) != want) return;
        const std::uint64_t cell = win.cell_of(h);
        if (stamp[cell] != std::int32_t(step)) {
          stamp[cell] = std::int32_t(step);
          next.push_back(h);
        }
      };
      for (int dir = 1; dir < d; ++dir) try_head(Edge{v, dir, 1});
      for (std::int64_t n = 1; n <= env.params.K; ++n) {
        Edge e{v, d, n};
        if (!win.inside(e.head())) break;
        try_head(e);
      }
    }
    if (next.empty()) return false;
    std::swap(frontier, next);
  }
  return true;
}

// Every word realized by exhaustively walking each oriented open path of
// length L.  The guard counts path extensions, so hopeless blowups refuse
// instead of spinning.
inline WordSet brute_force_seen(const Environment& env, const SiteField& sites, const Coords& origin, std::size_t L,
                                const SeenGuards& guards = {}) {
  if (!env.box.contains(origin)) throw std::invalid_argument("brute_force_seen: origin must lie in the box");
  WordSet result(L);
  if (L == 0) {
    result.insert(std::uint64_t(0));
    return result;
  }
  const int d = env.params.d;
  std::uint64_t visited = 0;
  std::vector<std::uint8_t> letters(L, 0);

  auto walk = [&](auto&& self, const Coords& v, std::size_t depth) -> void {
    if (++visited > guards.max_paths)
      throw ResourceError("brute_force_seen: more than " + std::to_string(guards.max_paths) +
                          " path extensions; shrink the box or word length");
    if (depth == L) {
      std::uint64_t idx = 0;
      for (std::size_t i = 0; i < L; ++i) idx = (idx << 1) | std::uint64_t(letters[i]);
      result.insert(idx);
      return;
    }
    auto follow = [&](const Edge& e) {
      Coords h = e.head();
      if (!env.box.contains(h)) return;
      if (!env.edge_open(e)) return;
      letters[depth] = std::uint8_t(sites.label(h));
      self(self, h, depth + 1);
    };
    for (int dir = 1; dir < d; ++dir) follow(Edge{v, dir, 1});
    const std::int64_t max_len =
        env.box.lazy() ? env.params.K : std::min<std::int64_t>(env.params.K, env.box.height - v[d - 1]);
    for (std::int64_t n = 1; n <= max_len; ++n) follow(Edge{v, d, n});
  };
  walk(walk, origin, 0);
  return result;
}

}  // namespace wordperc
