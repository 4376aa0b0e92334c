#include <catch2/catch_amalgamated.hpp>

#include <set>

#include "wordperc/words.hpp"

using namespace wordperc;

TEST_CASE("indexing is a bijection for short lengths", "[words]") {
  for (std::size_t len = 0; len <= 12; ++len) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t idx = 0; idx < (std::uint64_t(1) << len); ++idx) {
      const Word w = word_of(idx, len);
      REQUIRE(w.length() == len);
      REQUIRE(index_of(w) == idx);
      seen.insert(idx);
    }
    CHECK(seen.size() == (std::uint64_t(1) << len));
  }
}

TEST_CASE("indexing is MSB-first", "[words]") {
  CHECK(index_of(Word::from_string("100")) == 4);
  CHECK(index_of(Word::from_string("001")) == 1);
  CHECK(word_of(6, 3).to_string() == "110");
}

TEST_CASE("words validate and slice", "[words]") {
  CHECK_THROWS_AS(Word::from_string("10a"), ConfigError);
  const Word w = Word::from_string("1011");
  CHECK(w.prefix(2).to_string() == "10");
  CHECK(w.zero_padded(6).to_string() == "101100");
  CHECK(w.zero_padded(3).to_string() == "1011");  // never truncates
  CHECK_THROWS_AS(w.prefix(5), std::invalid_argument);
}

TEST_CASE("driving-word prefixes compose", "[words]") {
  const Word w = Word::from_string("1011");
  CHECK(sigma(w, 1).length() == 0);
  CHECK(sigma(w, 2).to_string() == "10");
  CHECK_THROWS_AS(sigma(w, 4), std::invalid_argument);  // needs 6 letters

  Word r(std::vector<std::uint8_t>(40, 0));
  {
    std::vector<std::uint8_t> bits;
    for (int i = 0; i < 40; ++i) bits.push_back(std::uint8_t((i * 7 + 3) % 5 < 2));
    r = Word(std::move(bits));
  }
  for (std::size_t n = 1; n <= 10; ++n)
    for (std::size_t m = n; m <= 15; ++m) CHECK(sigma(sigma(r, m), n) == sigma(r, n));
}

TEST_CASE("prepending a letter preserves cardinality", "[words]") {
  WordSet empty0(0);
  WordSet just_empty(0);
  just_empty.insert(std::uint64_t(0));
  CHECK(extend(1, just_empty).to_words().size() == 1);
  CHECK(extend(1, just_empty).contains(Word::from_string("1")));

  WordSet none(2);
  CHECK(extend(0, none).count() == 0);

  const WordSet all2 = WordSet::full(2);
  const WordSet ext = extend(1, all2);
  CHECK(ext.count() == 4);
  for (const Word& w : ext.to_words()) CHECK(w.bit(0) == 1);

  // Random sets at several lengths, both prepend branches.
  for (std::size_t len : {1u, 3u, 5u, 6u, 7u, 8u}) {
    WordSet s(len);
    for (std::uint64_t i = 0; i < s.capacity(); i += 3) s.insert(i);
    for (int b : {0, 1}) {
      const WordSet e = extend(b, s);
      CHECK(e.count() == s.count());
      for (std::uint64_t i = 0; i < s.capacity(); ++i)
        CHECK(e.contains((std::uint64_t(b) << len) | i) == s.contains(i));
    }
  }
}

TEST_CASE("word sets support algebra and round-trip text", "[words]") {
  WordSet a(3), b(3);
  a.insert(Word::from_string("101"));
  a.insert(Word::from_string("000"));
  b.insert(Word::from_string("101"));
  CHECK(b.subset_of(a));
  CHECK_FALSE(a.subset_of(b));
  b |= a;
  CHECK(b == a);
  CHECK(a.count() == 2);
  CHECK_FALSE(a.is_full());
  CHECK(WordSet::full(3).is_full());

  for (std::size_t len : {0u, 1u, 5u, 6u, 9u}) {
    WordSet s(len);
    for (std::uint64_t i = 0; i < s.capacity(); i += 5) s.insert(i);
    const WordSet back = WordSet::deserialize(s.serialize());
    CHECK(back == s);
  }
  CHECK(WordSet::deserialize("3:a1").serialize() == "3:a1");
  CHECK_THROWS_AS(WordSet::deserialize("nonsense"), ConfigError);
}

TEST_CASE("enumeration of driving words is exact", "[words]") {
  CHECK(enumerate_xi(1).size() == 1);
  CHECK(enumerate_xi(1).at(0).length() == 0);

  std::set<std::string> two;
  for (const Word& w : enumerate_xi(2)) two.insert(w.to_string());
  CHECK(two == std::set<std::string>{"00", "01", "10", "11"});

  std::set<std::string> four;
  for (const Word& w : enumerate_xi(4)) four.insert(w.to_string());
  CHECK(four.size() == 64);
  for (const auto& s : four) CHECK(s.size() == 6);
}

TEST_CASE("resource guards refuse oversized requests", "[words]") {
  CHECK_THROWS_AS(WordSet(40), ResourceError);
  CHECK_THROWS_AS(index_of(Word(std::vector<std::uint8_t>(70, 0))), ResourceError);
  CHECK_THROWS_AS(enumerate_xi(40), ResourceError);
}
