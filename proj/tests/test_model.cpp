#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "wordperc/model.hpp"

using namespace wordperc;

TEST_CASE("splitmix64 matches the published scramble", "[model]") {
  CHECK(splitmix64(0) == 0xE220A8397B1DCDAFull);
  CHECK(splitmix64(splitmix64(0)) != splitmix64(0));
}

TEST_CASE("site and edge hashes are pinned forever", "[model]") {
  const std::uint64_t h1 = site_hash(0xDEADBEEFull, Coords{1, 2, 3});
  CHECK(h1 == 0x696FABBCD38E6BEDull);
  CHECK(to_unit_interval(h1) == Catch::Approx(0.41186021194476441).epsilon(0).margin(1e-17));

  const std::uint64_t h2 = edge_hash(1, Edge{Coords{0, 0, 0}, 3, 5});
  CHECK(h2 == 0x27FDCD8B9E489750ull);
  CHECK(to_unit_interval(h2) == Catch::Approx(0.15621647509240888).epsilon(0).margin(1e-17));

  const std::uint64_t h3 = site_hash(99, Coords{-3, 4});
  CHECK(h3 == 0x061D0087D059C241ull);
  CHECK(to_unit_interval(h3) == Catch::Approx(0.023880036504443147).epsilon(0).margin(1e-17));
}

TEST_CASE("derived seeds are pinned and stream-separated", "[model]") {
  CHECK(derive_seed(42, 7, Stream::bond) == 0x45CCCA7ED54175FCull);
  CHECK(derive_seed(42, 7, Stream::bond) != derive_seed(42, 7, Stream::site));
  CHECK(derive_seed(42, 7, Stream::site) != derive_seed(42, 7, Stream::oriented));
  CHECK(derive_seed(42, 7, Stream::bond) != derive_seed(42, 8, Stream::bond));
  CHECK(derive_seed(42, 7, Stream::bond) != derive_seed(43, 7, Stream::bond));
}

TEST_CASE("byte-string ids and typed queries agree", "[model]") {
  const std::uint64_t seed = 0x1234ABCDull;
  for (std::int64_t a = -3; a <= 3; ++a)
    for (std::int64_t b = 0; b <= 4; ++b) {
      const Coords v{a, b, a + b + 7};
      const auto id = encode_site_id(v);
      CHECK(uniform_at(seed, id) == to_unit_interval(site_hash(seed, v)));
    }
  for (int dir = 1; dir <= 3; ++dir)
    for (std::int64_t len = 1; len <= (dir == 3 ? 4 : 1); ++len) {
      const Edge e{Coords{1, -2, 3}, dir, len};
      const auto id = encode_edge_id(e);
      CHECK(uniform_at(seed, id) == to_unit_interval(edge_hash(seed, e)));
    }
}

TEST_CASE("byte-string ids are validated", "[model]") {
  const std::vector<std::uint8_t> short_id{1, 2, 3};
  CHECK_THROWS_AS(uniform_at(0, short_id), std::invalid_argument);

  auto id = encode_site_id(Coords{1, 2, 3});
  id[0] = 9;  // unknown tag
  CHECK_THROWS_AS(uniform_at(0, id), std::invalid_argument);

  // Horizontal edges must have unit length.
  CHECK_THROWS_AS(uniform_at(0, encode_edge_id(Edge{Coords{0, 0, 0}, 1, 2})), std::invalid_argument);
  // Direction outside 1..d.
  CHECK_THROWS_AS(uniform_at(0, encode_edge_id(Edge{Coords{0, 0, 0}, 4, 1})), std::invalid_argument);
}

TEST_CASE("uniforms have the right first moment", "[model]") {
  double sum = 0;
  const int n = 1'000'000;
  for (int i = 0; i < n; ++i) sum += to_unit_interval(splitmix64(std::uint64_t(i)));
  const double mean = sum / n;
  const double four_sigma = 4.0 / std::sqrt(12.0 * n);
  CHECK(std::abs(mean - 0.5) < four_sigma);
}

TEST_CASE("open frequencies match thresholds", "[model]") {
  ModelParams mp;
  mp.d = 3;
  mp.eps = 0.3;
  mp.K = 4;
  mp.pn = PnFamily::constant(0.7);
  const Box box = Box::lazy_height({1000, 100});
  const Environment env(mp, box, 2024);

  int open = 0;
  const int n = 100'000;
  for (int i = 0; i < n; ++i) {
    const Edge e{Coords{i % 1000, (i / 1000) % 100, i}, 1, 1};
    open += env.edge_open(e) ? 1 : 0;
  }
  CHECK(std::abs(open / double(n) - 0.3) < 0.006);  // 4 sigma

  const SiteField sites(3, 0.5, 77);
  int ones = 0;
  for (int i = 0; i < n; ++i) ones += sites.label(Coords{i % 317, i % 211, i});
  CHECK(std::abs(ones / double(n) - 0.5) < 0.0064);  // 4 sigma
}

TEST_CASE("vertical edges beyond the truncation are closed", "[model]") {
  ModelParams mp;
  mp.d = 3;
  mp.K = 3;
  mp.pn = PnFamily::constant(1.0);
  const Environment env(mp, Box::lazy_height({5, 5}), 5);
  for (std::int64_t len = 1; len <= 8; ++len) {
    const Edge e{Coords{1, 1, 0}, 3, len};
    if (len <= 3) {
      CHECK(env.edge_threshold(e) == 1.0);
      CHECK(env.edge_open(e));
    } else {
      CHECK(env.edge_threshold(e) == 0.0);
      CHECK_FALSE(env.edge_open(e));
    }
  }
}

TEST_CASE("open sets are nested under parameter growth at fixed seed", "[model]") {
  const Box box = Box::lazy_height({50, 50});
  ModelParams lo;
  lo.d = 3;
  lo.eps = 0.2;
  lo.K = 2;
  lo.pn = PnFamily::harmonic(1.0);
  ModelParams hi = lo;
  hi.eps = 0.6;
  hi.K = 5;
  hi.pn = PnFamily::harmonic(2.0);
  const Environment env_lo(lo, box, 31337), env_hi(hi, box, 31337);

  for (int i = 0; i < 20'000; ++i) {
    const Coords base{i % 50, (i / 50) % 50, i % 97};
    const Edge h{base, 1 + (i % 2), 1};
    if (env_lo.edge_open(h)) CHECK(env_hi.edge_open(h));
    const Edge v{base, 3, 1 + (i % 6)};
    if (env_lo.edge_open(v)) CHECK(env_hi.edge_open(v));
  }
}

TEST_CASE("long-range families evaluate and print", "[model]") {
  const PnFamily h = PnFamily::harmonic(1.0);
  CHECK(h.value(1) == 1.0);
  CHECK(h.value(4) == 0.25);
  CHECK(h.partial_sum(4) == Catch::Approx(1.0 + 0.5 + 1.0 / 3.0 + 0.25));
  const PnFamily h3 = PnFamily::harmonic(3.0);
  CHECK(h3.value(2) == 1.0);  // capped at 1

  const PnFamily c = PnFamily::constant(0.25);
  CHECK(c.value(1) == 0.25);
  CHECK(c.value(1000) == 0.25);

  const PnFamily t = PnFamily::custom({0.5, 0.25});
  CHECK(t.value(1) == 0.5);
  CHECK(t.value(2) == 0.25);
  CHECK(t.value(3) == 0.0);

  for (const char* text : {"harmonic:1", "constant:0.25", "custom:0.5,0.25"}) {
    const PnFamily f = PnFamily::parse(text);
    CHECK(PnFamily::parse(f.to_string()).to_string() == f.to_string());
  }
  CHECK_THROWS_AS(PnFamily::parse("zipf:2"), ConfigError);
  CHECK_THROWS_AS(PnFamily::constant(1.5), ConfigError);
  CHECK_THROWS_AS(PnFamily::harmonic(-1.0), ConfigError);
}

TEST_CASE("boxes parse, print, and bound vertices", "[model]") {
  const Box b = Box::parse("3x3x6");
  CHECK(b.dim() == 3);
  CHECK_FALSE(b.lazy());
  CHECK(b.vertex_count() == 4 * 4 * 7);
  CHECK(b.contains(Coords{0, 0, 0}));
  CHECK(b.contains(Coords{3, 3, 6}));
  CHECK_FALSE(b.contains(Coords{4, 0, 0}));
  CHECK_FALSE(b.contains(Coords{0, 0, 7}));
  CHECK_FALSE(b.contains(Coords{-1, 0, 0}));
  CHECK(Box::parse(b.to_string()).to_string() == b.to_string());

  const Box lz = Box::parse("24x24xlazy");
  CHECK(lz.lazy());
  CHECK(lz.contains(Coords{0, 0, 1'000'000}));
  CHECK_THROWS_AS(lz.vertex_count(), std::domain_error);
  CHECK(Box::parse(lz.to_string()).to_string() == lz.to_string());

  CHECK_THROWS_AS(Box::parse("3x3x"), ConfigError);
  CHECK_THROWS_AS(Box::parse("0x3x6"), ConfigError);
  CHECK_THROWS_AS(Box::parse("nonsense"), ConfigError);
}

TEST_CASE("environments reject mismatched shapes", "[model]") {
  ModelParams mp;
  mp.d = 3;
  CHECK_THROWS_AS(Environment(mp, Box::parse("3x6"), 0), ConfigError);  // 2-d box, 3-d model
  const Environment env(mp, Box::parse("3x3x6"), 0);
  CHECK_THROWS_AS(env.edge_open(Edge{Coords{0, 0, 0}, 1, 2}), std::invalid_argument);
  CHECK_THROWS_AS(env.edge_open(Edge{Coords{3, 0, 0}, 1, 1}), std::invalid_argument);  // head leaves box
  const SiteField sites(3, 0.5, 1);
  CHECK_THROWS_AS(sites.label(Coords{1, 2}), std::invalid_argument);
}

TEST_CASE("model parameters are range-checked", "[model]") {
  ModelParams mp;
  mp.p = 1.5;
  CHECK_THROWS_AS(mp.validate(), ConfigError);
  mp.p = 0.5;
  mp.eps = -0.1;
  CHECK_THROWS_AS(mp.validate(), ConfigError);
  mp.eps = 0.5;
  mp.K = -1;
  CHECK_THROWS_AS(mp.validate(), ConfigError);
  mp.K = 1;
  mp.d = 9;
  CHECK_THROWS_AS(mp.validate(), ConfigError);
}

TEST_CASE("coordinates behave like small vectors", "[model]") {
  const Coords v{1, 2, 3};
  CHECK(v.d == 3);
  CHECK(v.coordinate_sum() == 6);
  CHECK(v.to_string() == "(1,2,3)");
  CHECK(v == Coords{1, 2, 3});
  CHECK_FALSE(v == Coords{1, 2, 4});
  CHECK(Coords::zeros(4).coordinate_sum() == 0);
}
