#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "wordperc/common.hpp"

// Long-range oriented percolation environment on the first-quadrant lattice
// in d dimensions.  The first d-1 directions carry unit "horizontal" edges
// open with probability eps; direction d carries edges of every length n >= 1,
// open with probability p_n (truncated to 0 beyond length K).  Site labels
// are iid Bernoulli(p).  Everything is sampled lazily: the state of a bond or
// site is a pure function of (seed, canonical object id), so environments of
// any size cost nothing until queried and coupled comparisons (same seed,
// different parameters) are exact.

namespace wordperc {

inline constexpr int kMaxDim = 6;

// Fixed-capacity coordinate tuple.  Coordinates are signed: the environment
// itself lives in the nonnegative quadrant, but flat-lattice helpers reuse
// the same id scheme with negative first coordinates.
struct Coords {
  std::array<std::int64_t, kMaxDim> c{};
  int d = 0;

  Coords() = default;
  Coords(std::initializer_list<std::int64_t> xs) {
    d = static_cast<int>(xs.size());
    int i = 0;
    for (auto x : xs) c[i++] = x;
  }
  static Coords zeros(int dim) {
    Coords v;
    v.d = dim;
    return v;
  }
  std::int64_t& operator[](int i) { return c[i]; }
  std::int64_t operator[](int i) const { return c[i]; }
  bool operator==(const Coords& o) const {
    if (d != o.d) return false;
    for (int i = 0; i < d; ++i)
      if (c[i] != o.c[i]) return false;
    return true;
  }
  std::int64_t coordinate_sum() const {
    std::int64_t s = 0;
    for (int i = 0; i < d; ++i) s += c[i];
    return s;
  }
  std::string to_string() const {
    std::string s = "(";
    for (int i = 0; i < d; ++i) {
      if (i) s += ",";
      s += std::to_string(c[i]);
    }
    return s + ")";
  }
};

// ---------------------------------------------------------------------------
// Connection probability family for the long direction.

class PnFamily {
 public:
  enum class Kind { Harmonic, Constant, Custom };

  static PnFamily harmonic(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("pn harmonic: c must be positive, got " + std::to_string(c));
    PnFamily f;
    f.kind_ = Kind::Harmonic;
    f.a_ = c;
    return f;
  }
  static PnFamily constant(double q) {
    if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("pn constant: q must lie in [0,1], got " + std::to_string(q));
    PnFamily f;
    f.kind_ = Kind::Constant;
    f.a_ = q;
    return f;
  }
  static PnFamily custom(std::vector<double> probs) {
    for (double q : probs)
      if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("pn custom: entries must lie in [0,1], got " + std::to_string(q));
    PnFamily f;
    f.kind_ = Kind::Custom;
    f.table_ = std::move(probs);
    return f;
  }

  Kind kind() const { return kind_; }

  // p_n for n >= 1; a custom list is 0 beyond its last entry.
  double value(std::int64_t n) const {
    if (n < 1) throw std::invalid_argument("pn_value: edge length must be >= 1");
    switch (kind_) {
      case Kind::Harmonic: return std::min(1.0, a_ / double(n));
      case Kind::Constant: return a_;
      case Kind::Custom: return n <= std::int64_t(table_.size()) ? table_[size_t(n - 1)] : 0.0;
    }
    return 0.0;
  }

  // sum_{i=1..n} p_i, the quantity whose divergence drives everything.
  double partial_sum(std::int64_t n) const {
    double s = 0.0;
    for (std::int64_t i = 1; i <= n; ++i) s += value(i);
    return s;
  }

  std::string to_string() const {
    std::ostringstream os;
    switch (kind_) {
      case Kind::Harmonic: os << "harmonic:" << format_double(a_); break;
      case Kind::Constant: os << "constant:" << format_double(a_); break;
      case Kind::Custom: {
        os << "custom:";
        for (size_t i = 0; i < table_.size(); ++i) os << (i ? "," : "") << format_double(table_[i]);
        break;
      }
    }
    return os.str();
  }

  // Inverse of to_string; rejects anything else.
  static PnFamily parse(const std::string& text);

 private:
  PnFamily() = default;
  Kind kind_ = Kind::Constant;
  double a_ = 0.0;
  std::vector<double> table_;
};

inline double pn_value(const PnFamily& f, std::int64_t n) { return f.value(n); }
inline double pn_partial_sum(const PnFamily& f, std::int64_t n) { return f.partial_sum(n); }

// ---------------------------------------------------------------------------
// Finite observation window.  widths: extents of the d-1 short directions;
// height: extent of the long direction, or lazy (unbounded above).  A vertex
// is inside when 0 <= x_i <= width_i and 0 <= x_d (<= height unless lazy).

struct Box {
  std::vector<std::int64_t> widths;
  std::int64_t height = 0;  // < 0 means lazy

  Box() = default;
  Box(std::vector<std::int64_t> w, std::int64_t h) : widths(std::move(w)), height(h) { validate(); }

  static Box lazy_height(std::vector<std::int64_t> w) { return Box(std::move(w), -1); }

  void validate() const {
    if (widths.empty() || int(widths.size()) + 1 > kMaxDim + 1)
      throw ConfigError("box: need between 1 and " + std::to_string(kMaxDim - 1) + " width entries");
    for (auto w : widths)
      if (w <= 0) throw ConfigError("box: widths must be positive");
    if (height == 0) throw ConfigError("box: height must be positive (or lazy)");
  }

  int dim() const { return int(widths.size()) + 1; }
  bool lazy() const { return height < 0; }

  bool contains(const Coords& v) const {
    if (v.d != dim()) return false;
    for (size_t i = 0; i < widths.size(); ++i)
      if (v[int(i)] < 0 || v[int(i)] > widths[i]) return false;
    std::int64_t h = v[dim() - 1];
    if (h < 0) return false;
    return lazy() || h <= height;
  }

  std::uint64_t vertex_count() const {
    if (lazy()) throw std::domain_error("box: vertex_count undefined for lazy height");
    std::uint64_t n = std::uint64_t(height) + 1;
    for (auto w : widths) n *= std::uint64_t(w) + 1;
    return n;
  }

  std::string to_string() const {
    std::string s;
    for (auto w : widths) s += std::to_string(w) + "x";
    s += lazy() ? "lazy" : std::to_string(height);
    return s;
  }
  static Box parse(const std::string& text);
};

// ---------------------------------------------------------------------------
// Model parameters.

struct ModelParams {
  int d = 3;
  double p = 0.5;    // P(site label = 1)
  double eps = 0.5;  // horizontal edge probability
  std::int64_t K = 1;  // truncation: vertical edges longer than K are closed
  PnFamily pn = PnFamily::constant(1.0);

  void validate() const {
    if (d < 2 || d > kMaxDim) throw ConfigError("model: d must lie in [2," + std::to_string(kMaxDim) + "]");
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("model: p must lie in [0,1]");
    if (!(eps >= 0.0 && eps <= 1.0)) throw ConfigError("model: eps must lie in [0,1]");
    if (K < 0) throw ConfigError("model: K must be >= 0");
  }
};

// ---------------------------------------------------------------------------
// Canonical object ids.
//
// A site id is the field sequence   [0, x_1, ..., x_d]
// and an edge id is                 [1, x_1, ..., x_d, direction, length]
// where (x_1..x_d) is the smaller endpoint, direction is 1-based and length
// is 1 for directions < d.  The byte-string form concatenates the fields as
// little-endian 64-bit words (negative coordinates two's-complement).  The
// hash is the iterated SplitMix64 absorption from common.hpp.

inline constexpr std::uint64_t kTagSite = 0;
inline constexpr std::uint64_t kTagEdge = 1;

struct Edge {
  Coords base;       // smaller endpoint
  int dir = 1;       // 1..d
  std::int64_t len = 1;

  Coords head() const {
    Coords h = base;
    h[dir - 1] += len;
    return h;
  }
};

inline void validate_edge_shape(int d, int dir, std::int64_t len) {
  if (dir < 1 || dir > d) throw std::invalid_argument("edge: direction must lie in [1,d]");
  if (len < 1) throw std::invalid_argument("edge: length must be >= 1");
  if (dir < d && len != 1) throw std::invalid_argument("edge: short directions only carry length-1 edges");
}

inline std::uint64_t site_hash(std::uint64_t seed, const Coords& v) {
  std::uint64_t h = hash_absorb(seed, kTagSite);
  for (int i = 0; i < v.d; ++i) h = hash_absorb(h, std::uint64_t(v[i]));
  return h;
}

inline std::uint64_t edge_hash(std::uint64_t seed, const Edge& e) {
  std::uint64_t h = hash_absorb(seed, kTagEdge);
  for (int i = 0; i < e.base.d; ++i) h = hash_absorb(h, std::uint64_t(e.base[i]));
  h = hash_absorb(h, std::uint64_t(e.dir));
  h = hash_absorb(h, std::uint64_t(e.len));
  return h;
}

inline std::vector<std::uint8_t> encode_site_id(const Coords& v) {
  std::vector<std::uint8_t> out;
  out.reserve(8 * size_t(v.d + 1));
  auto put = [&out](std::uint64_t w) {
    for (int b = 0; b < 8; ++b) out.push_back(std::uint8_t(w >> (8 * b)));
  };
  put(kTagSite);
  for (int i = 0; i < v.d; ++i) put(std::uint64_t(v[i]));
  return out;
}

inline std::vector<std::uint8_t> encode_edge_id(const Edge& e) {
  validate_edge_shape(e.base.d, e.dir, e.len);
  std::vector<std::uint8_t> out;
  out.reserve(8 * size_t(e.base.d + 3));
  auto put = [&out](std::uint64_t w) {
    for (int b = 0; b < 8; ++b) out.push_back(std::uint8_t(w >> (8 * b)));
  };
  put(kTagEdge);
  for (int i = 0; i < e.base.d; ++i) put(std::uint64_t(e.base[i]));
  put(std::uint64_t(e.dir));
  put(std::uint64_t(e.len));
  return out;
}

// Uniform [0,1) variate attached to a canonical object id byte string.
// Malformed ids (bad length, unknown tag, illegal edge shape) are errors.
inline double uniform_at(std::uint64_t seed, std::span<const std::uint8_t> object_id) {
  if (object_id.size() % 8 != 0 || object_id.empty())
    throw std::invalid_argument("uniform_at: object id must be a nonempty sequence of 64-bit fields");
  const size_t nf = object_id.size() / 8;
  std::vector<std::uint64_t> fields(nf);
  for (size_t i = 0; i < nf; ++i) {
    std::uint64_t w = 0;
    for (int b = 7; b >= 0; --b) w = (w << 8) | object_id[8 * i + size_t(b)];
    fields[i] = w;
  }
  const std::uint64_t tag = fields[0];
  if (tag == kTagSite) {
    const int d = int(nf) - 1;
    if (d < 2 || d > kMaxDim) throw std::invalid_argument("uniform_at: site id has unsupported dimension");
  } else if (tag == kTagEdge) {
    const int d = int(nf) - 3;
    if (d < 2 || d > kMaxDim) throw std::invalid_argument("uniform_at: edge id has unsupported dimension");
    const std::int64_t dir = std::int64_t(fields[size_t(nf) - 2]);
    const std::int64_t len = std::int64_t(fields[size_t(nf) - 1]);
    validate_edge_shape(d, int(dir), len);
  } else {
    throw std::invalid_argument("uniform_at: unknown object tag " + std::to_string(tag));
  }
  return to_unit_interval(hash_fields(seed, fields));
}

// ---------------------------------------------------------------------------
// Environment: bond configuration over a box.  Site labels live in SiteField
// so quenched experiments can fix bonds while resampling sites.

struct Environment {
  ModelParams params;
  Box box;
  std::uint64_t bond_seed = 0;

  Environment() = default;
  Environment(ModelParams mp, Box b, std::uint64_t seed) : params(std::move(mp)), box(std::move(b)), bond_seed(seed) {
    params.validate();
    box.validate();
    if (box.dim() != params.d) throw ConfigError("environment: box dimension != model d");
  }

  double edge_threshold(const Edge& e) const {
    if (e.dir < params.d) return params.eps;
    if (e.len > params.K) return 0.0;  // truncation
    return params.pn.value(e.len);
  }

  // Open/closed state of an oriented lattice edge.  The uniform is compared
  // against the (possibly truncated) threshold, so under a fixed seed the
  // open set grows monotonically with eps, K and pointwise p_n.
  bool edge_open(const Edge& e) const {
    if (e.base.d != params.d) throw std::invalid_argument("edge_open: edge dimension != model d");
    validate_edge_shape(params.d, e.dir, e.len);
    if (!box.contains(e.base) || !box.contains(e.head()))
      throw std::invalid_argument("edge_open: edge endpoints must lie in the box");
    return edge_uniform(e) < edge_threshold(e);
  }

  double edge_uniform(const Edge& e) const { return to_unit_interval(edge_hash(bond_seed, e)); }
};

inline bool edge_open(const Environment& env, const Edge& e) { return env.edge_open(e); }

struct SiteField {
  int d = 3;
  double p = 0.5;
  std::uint64_t site_seed = 0;

  SiteField() = default;
  SiteField(int dim, double prob, std::uint64_t seed) : d(dim), p(prob), site_seed(seed) {
    if (d < 2 || d > kMaxDim) throw ConfigError("sites: d must lie in [2," + std::to_string(kMaxDim) + "]");
    if (!(p >= 0.0 && p <= 1.0)) throw ConfigError("sites: p must lie in [0,1]");
  }

  // Letter at a vertex: 1 with probability p.
  int label(const Coords& v) const {
    if (v.d != d) throw std::invalid_argument("site_label: vertex dimension != d");
    return to_unit_interval(site_hash(site_seed, v)) < p ? 1 : 0;
  }
};

inline int site_label(const SiteField& sf, const Coords& v) { return sf.label(v); }

// ---------------------------------------------------------------------------
// Parsers (shared by CLI config and tests).

inline PnFamily PnFamily::parse(const std::string& text) {
  auto colon = text.find(':');
  const std::string head = text.substr(0, colon);
  const std::string rest = colon == std::string::npos ? std::string() : text.substr(colon + 1);
  auto to_double = [&text](const std::string& s) {
    try {
      size_t pos = 0;
      double v = std::stod(s, &pos);
      if (pos != s.size()) throw std::invalid_argument(s);
      return v;
    } catch (const std::exception&) {
      throw ConfigError("pn: malformed number in '" + text + "'");
    }
  };
  if (head == "harmonic") return PnFamily::harmonic(to_double(rest));
  if (head == "constant") return PnFamily::constant(to_double(rest));
  if (head == "custom") {
    std::vector<double> probs;
    std::string item;
    std::istringstream is(rest);
    while (std::getline(is, item, ','))
      if (!item.empty()) probs.push_back(to_double(item));
    if (probs.empty()) throw ConfigError("pn custom: need at least one entry");
    return PnFamily::custom(std::move(probs));
  }
  throw ConfigError("pn: expected harmonic:<c>, constant:<q> or custom:<p1,p2,...>, got '" + text + "'");
}

inline Box Box::parse(const std::string& text) {
  std::vector<std::string> parts{""};
  for (char ch : text) {
    if (ch == 'x') parts.push_back("");
    else parts.back() += ch;
  }
  if (parts.size() < 2) throw ConfigError("box: expected WxWx...xH like 3x3x6 or 24x24xlazy, got '" + text + "'");
  auto strict = [](const std::string& s, const char* what) -> std::int64_t {
    try {
      std::size_t pos = 0;
      const std::int64_t v = s.empty() ? throw std::invalid_argument("empty") : std::stoll(s, &pos);
      if (pos != s.size()) throw std::invalid_argument("trailing characters");
      return v;
    } catch (const std::exception&) {
      throw ConfigError("box: malformed " + std::string(what) + " '" + s + "'");
    }
  };
  Box b;
  for (size_t i = 0; i + 1 < parts.size(); ++i) b.widths.push_back(strict(parts[i], "width"));
  b.height = parts.back() == "lazy" ? -1 : strict(parts.back(), "height");
  b.validate();
  return b;
}

}  // namespace wordperc
