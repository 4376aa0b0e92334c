#include <catch2/catch_amalgamated.hpp>

#include "wordperc/oracle.hpp"

using namespace wordperc;

namespace {
ModelParams base_params() {
  ModelParams mp;
  mp.d = 3;
  mp.p = 0.5;
  mp.eps = 0.5;
  mp.K = 3;
  mp.pn = PnFamily::harmonic(1.0);
  return mp;
}
}  // namespace

TEST_CASE("no open edges means no words", "[oracle]") {
  ModelParams mp = base_params();
  mp.eps = 0.0;
  mp.K = 0;
  const Environment env(mp, Box::parse("3x3x6"), 1);
  const SiteField sites(3, 0.5, 2);
  CHECK(seen_words(env, sites, Coords::zeros(3), 1).count() == 0);
  CHECK(brute_force_seen(env, sites, Coords::zeros(3), 1).count() == 0);
}

TEST_CASE("the empty word is always seen", "[oracle]") {
  const Environment env(base_params(), Box::parse("3x3x6"), 1);
  const SiteField sites(3, 0.5, 2);
  const WordSet s = seen_words(env, sites, Coords::zeros(3), 0);
  CHECK(s.count() == 1);
  CHECK(s.is_full());
  CHECK(sees_word(env, sites, Coords::zeros(3), Word()));
}

TEST_CASE("full connectivity with constant letters sees exactly one word", "[oracle]") {
  ModelParams mp = base_params();
  mp.eps = 1.0;
  mp.p = 1.0;
  mp.K = 2;
  mp.pn = PnFamily::constant(1.0);
  const Environment env(mp, Box::parse("4x4x12"), 9);
  const SiteField sites(3, 1.0, 10);
  const WordSet s = seen_words(env, sites, Coords::zeros(3), 3);
  CHECK(s.count() == 1);
  CHECK(s.contains(Word::from_string("111")));
}

TEST_CASE("a single vertical chain spells a single word", "[oracle]") {
  ModelParams mp = base_params();
  mp.eps = 0.0;  // no horizontal moves at all
  mp.K = 1;
  mp.pn = PnFamily::constant(1.0);
  const Environment env(mp, Box::lazy_height({1, 1}), 4);
  const SiteField sites(3, 0.5, 5);
  std::string expect;
  for (int h = 1; h <= 3; ++h) expect += char('0' + sites.label(Coords{0, 0, h}));
  for (const WordSet& s : {seen_words(env, sites, Coords::zeros(3), 3), brute_force_seen(env, sites, Coords::zeros(3), 3)}) {
    CHECK(s.count() == 1);
    CHECK(s.contains(Word::from_string(expect)));
  }
}

TEST_CASE("dynamic program equals exhaustive path enumeration", "[oracle]") {
  const Box box = Box::parse("3x3x6");
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const Environment env(base_params(), box, derive_seed(77, seed, Stream::bond));
    const SiteField sites(3, 0.5, derive_seed(77, seed, Stream::site));
    const WordSet dp = seen_words(env, sites, Coords::zeros(3), 4);
    const WordSet bf = brute_force_seen(env, sites, Coords::zeros(3), 4);
    REQUIRE(dp == bf);
  }
}

TEST_CASE("dynamic program handles lazy boxes with large jumps", "[oracle]") {
  ModelParams mp = base_params();
  mp.K = 50;
  const Environment env(mp, Box::lazy_height({4, 4}), 123);
  const SiteField sites(3, 0.5, 456);
  CHECK(seen_words(env, sites, Coords::zeros(3), 3) == brute_force_seen(env, sites, Coords::zeros(3), 3));
}

TEST_CASE("single-word checks on degenerate environments", "[oracle]") {
  ModelParams mp = base_params();
  mp.eps = 1.0;
  mp.p = 0.0;
  mp.K = 0;
  const Environment env(mp, Box::parse("6x6x3"), 3);
  const SiteField sites(3, 0.0, 8);
  CHECK(sees_word(env, sites, Coords::zeros(3), Word::from_string("0000")));

  const SiteField ones(3, 1.0, 8);
  CHECK_FALSE(sees_word(env, ones, Coords::zeros(3), Word::from_string("0101")));
}

TEST_CASE("single-word walk agrees with set membership", "[oracle]") {
  const Box box = Box::parse("3x3x8");
  ModelParams mp = base_params();
  mp.K = 2;
  int inside = 0;
  for (std::uint64_t seed = 0; seed < 32; ++seed) {
    const Environment env(mp, box, derive_seed(5, seed, Stream::bond));
    const SiteField sites(3, 0.5, derive_seed(5, seed, Stream::site));
    const WordSet dp = seen_words(env, sites, Coords::zeros(3), 5);
    for (std::uint64_t idx = 0; idx < 32; ++idx) {
      const Word w = word_of(idx, 5);
      const bool member = dp.contains(w);
      REQUIRE(sees_word(env, sites, Coords::zeros(3), w) == member);
      inside += member ? 1 : 0;
    }
  }
  CHECK(inside > 0);  // the agreement must be exercised from both sides
}

TEST_CASE("seen sets grow with K and eps at fixed seeds", "[oracle]") {
  const Box box = Box::parse("3x3x12");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    ModelParams lo = base_params();
    lo.eps = 0.35;
    lo.K = 2;
    ModelParams hi_k = lo;
    hi_k.K = 5;
    ModelParams hi_e = lo;
    hi_e.eps = 0.8;
    const SiteField sites(3, 0.5, derive_seed(9, seed, Stream::site));
    const std::uint64_t bond = derive_seed(9, seed, Stream::bond);
    const WordSet s_lo = seen_words(Environment(lo, box, bond), sites, Coords::zeros(3), 4);
    CHECK(s_lo.subset_of(seen_words(Environment(hi_k, box, bond), sites, Coords::zeros(3), 4)));
    CHECK(s_lo.subset_of(seen_words(Environment(hi_e, box, bond), sites, Coords::zeros(3), 4)));
  }
}

TEST_CASE("prefixes of seen words are seen", "[oracle]") {
  const Box box = Box::parse("3x3x8");
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Environment env(base_params(), box, derive_seed(11, seed, Stream::bond));
    const SiteField sites(3, 0.5, derive_seed(11, seed, Stream::site));
    const WordSet s5 = seen_words(env, sites, Coords::zeros(3), 5);
    const WordSet s4 = seen_words(env, sites, Coords::zeros(3), 4);
    for (const Word& w : s5.to_words()) CHECK(s4.contains(w.prefix(4)));
  }
}

TEST_CASE("bigger boxes never lose words", "[oracle]") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const std::uint64_t bond = derive_seed(13, seed, Stream::bond);
    const SiteField sites(3, 0.5, derive_seed(13, seed, Stream::site));
    const WordSet small = seen_words(Environment(base_params(), Box::parse("2x2x4"), bond), sites, Coords::zeros(3), 4);
    const WordSet big = seen_words(Environment(base_params(), Box::parse("4x4x9"), bond), sites, Coords::zeros(3), 4);
    CHECK(small.subset_of(big));
  }
}

TEST_CASE("origin may sit anywhere inside the box", "[oracle]") {
  const Environment env(base_params(), Box::parse("5x5x10"), 21);
  const SiteField sites(3, 0.5, 22);
  const Coords origin{2, 1, 3};
  CHECK(seen_words(env, sites, origin, 3) == brute_force_seen(env, sites, origin, 3));
  CHECK_THROWS_AS(seen_words(env, sites, Coords{9, 0, 0}, 2), std::invalid_argument);
}

TEST_CASE("oracle guards refuse oversized requests by name", "[oracle]") {
  const Environment env(base_params(), Box::parse("3x3x6"), 1);
  const SiteField sites(3, 0.5, 2);

  CHECK_THROWS_AS(seen_words(env, sites, Coords::zeros(3), 15), ResourceError);  // default length guard

  SeenGuards tight;
  tight.max_length = 20;
  tight.max_bytes = 16;
  try {
    seen_words(env, sites, Coords::zeros(3), 8, tight);
    FAIL("memory guard did not trigger");
  } catch (const ResourceError& e) {
    CHECK(std::string(e.what()).find("bytes") != std::string::npos);
  }

  SeenGuards few_paths;
  few_paths.max_paths = 10;
  ModelParams mp = base_params();
  mp.eps = 1.0;
  mp.pn = PnFamily::constant(1.0);
  CHECK_THROWS_AS(brute_force_seen(Environment(mp, Box::parse("3x3x6"), 1), sites, Coords::zeros(3), 4, few_paths),
                  ResourceError);
}
