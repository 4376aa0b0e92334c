#pragma once

#include <bit>
#include <cstdint>
#include <string>
#include <vector>

#include "wordperc/common.hpp"

// Binary words and dense sets of words.  A set of length-L words is a 2^L-bit
// bitmap indexed MSB-first: word xi_1..xi_L maps to sum_i xi_i * 2^(L-i), so
// prepending a letter lands the old index in the lower or upper half of the
// doubled bitmap.  That makes the "prepend letter b to every word of a set"
// step of the seen-words recursion a single half-aligned OR.

namespace wordperc {

class Word {
 public:
  Word() = default;
  explicit Word(std::vector<std::uint8_t> bits) : bits_(std::move(bits)) {
    for (auto b : bits_)
      if (b > 1) throw std::invalid_argument("word: letters must be 0 or 1");
  }

  static Word from_string(const std::string& s) {
    std::vector<std::uint8_t> bits;
    bits.reserve(s.size());
    for (char ch : s) {
      if (ch != '0' && ch != '1') throw ConfigError("word: expected a string over {0,1}, got '" + s + "'");
      bits.push_back(ch == '1' ? 1 : 0);
    }
    return Word(std::move(bits));
  }

  std::size_t length() const { return bits_.size(); }
  // xi_{i+1}, zero-based access.
  int bit(std::size_t i) const { return bits_.at(i); }

  std::string to_string() const {
    std::string s;
    s.reserve(bits_.size());
    for (auto b : bits_) s += char('0' + b);
    return s;
  }

  Word prefix(std::size_t n) const {
    if (n > bits_.size()) throw std::invalid_argument("word: prefix longer than word");
    return Word(std::vector<std::uint8_t>(bits_.begin(), bits_.begin() + std::ptrdiff_t(n)));
  }

  // Append zeros until the word has at least n letters.
  Word zero_padded(std::size_t n) const {
    std::vector<std::uint8_t> bits = bits_;
    while (bits.size() < n) bits.push_back(0);
    return Word(std::move(bits));
  }

  bool operator==(const Word& o) const { return bits_ == o.bits_; }

 private:
  std::vector<std::uint8_t> bits_;
};

// MSB-first rank of a word among all words of its length.
inline std::uint64_t index_of(const Word& w) {
  if (w.length() > 62) throw ResourceError("index_of: words longer than 62 letters have no 64-bit rank");
  std::uint64_t idx = 0;
  for (std::size_t i = 0; i < w.length(); ++i) idx = (idx << 1) | std::uint64_t(w.bit(i));
  return idx;
}

inline Word word_of(std::uint64_t index, std::size_t length) {
  if (length > 62) throw ResourceError("word_of: length must be <= 62");
  if (length < 64 && index >> length)
    throw std::invalid_argument("word_of: index out of range for length");
  std::vector<std::uint8_t> bits(length);
  for (std::size_t i = 0; i < length; ++i) bits[i] = std::uint8_t((index >> (length - 1 - i)) & 1);
  return Word(std::move(bits));
}

// The truncation map: first 2(n-1) letters.
inline Word sigma(const Word& w, std::size_t n) {
  if (n < 1) throw std::invalid_argument("sigma: n must be >= 1");
  const std::size_t len = 2 * (n - 1);
  if (w.length() < len) throw std::invalid_argument("sigma: word shorter than 2(n-1)");
  return w.prefix(len);
}

// ---------------------------------------------------------------------------

class WordSet {
 public:
  WordSet() : WordSet(0) {}
  explicit WordSet(std::size_t length) : length_(length) {
    if (length > kMaxSetLength)
      throw ResourceError("word set: length " + std::to_string(length) + " exceeds the dense-bitmap guard (" +
                          std::to_string(kMaxSetLength) + ")");
    blocks_.assign(block_count(length), 0);
  }

  static constexpr std::size_t kMaxSetLength = 30;

  static WordSet full(std::size_t length) {
    WordSet s(length);
    for (auto& b : s.blocks_) b = ~0ull;
    s.trim();
    return s;
  }

  std::size_t length() const { return length_; }
  std::uint64_t capacity() const { return 1ull << length_; }

  bool contains(std::uint64_t idx) const {
    check_index(idx);
    return (blocks_[idx >> 6] >> (idx & 63)) & 1ull;
  }
  bool contains(const Word& w) const {
    if (w.length() != length_) return false;
    return contains(index_of(w));
  }

  void insert(std::uint64_t idx) {
    check_index(idx);
    blocks_[idx >> 6] |= 1ull << (idx & 63);
  }
  void insert(const Word& w) {
    if (w.length() != length_) throw std::invalid_argument("word set: word length mismatch");
    insert(index_of(w));
  }

  std::uint64_t count() const {
    std::uint64_t n = 0;
    for (auto b : blocks_) n += std::uint64_t(std::popcount(b));
    return n;
  }
  bool empty() const {
    for (auto b : blocks_)
      if (b) return false;
    return true;
  }
  bool is_full() const { return count() == capacity(); }

  WordSet& operator|=(const WordSet& o) {
    if (o.length_ != length_) throw std::invalid_argument("word set: union of mismatched lengths");
    for (std::size_t i = 0; i < blocks_.size(); ++i) blocks_[i] |= o.blocks_[i];
    return *this;
  }

  bool operator==(const WordSet& o) const { return length_ == o.length_ && blocks_ == o.blocks_; }

  // Is this a subset of o?
  bool subset_of(const WordSet& o) const {
    if (o.length_ != length_) return false;
    for (std::size_t i = 0; i < blocks_.size(); ++i)
      if (blocks_[i] & ~o.blocks_[i]) return false;
    return true;
  }

  // OR { b . w : w in src } into this set; src has length length()-1.  With
  // MSB-first indexing the image of src is exactly the b-th half of the
  // bitmap, so this is a block-aligned OR (or a shift for tiny sets).
  void or_prepended(int b, const WordSet& src) {
    if (b != 0 && b != 1) throw std::invalid_argument("word set: letter must be 0 or 1");
    if (length_ == 0 || src.length_ + 1 != length_)
      throw std::invalid_argument("word set: or_prepended needs a set one letter shorter");
    const std::uint64_t half = capacity() / 2;
    if (half >= 64) {
      const std::size_t off = b ? src.blocks_.size() : 0;
      for (std::size_t i = 0; i < src.blocks_.size(); ++i) blocks_[i + off] |= src.blocks_[i];
    } else {
      blocks_[0] |= src.blocks_[0] << (b ? half : 0);
    }
  }

  std::vector<Word> to_words() const {
    std::vector<Word> out;
    for (std::uint64_t i = 0; i < capacity(); ++i)
      if (contains(i)) out.push_back(word_of(i, length_));
    return out;
  }

  // "L:hex" with bitmap bytes low block first.
  std::string serialize() const {
    static const char* hexd = "0123456789abcdef";
    std::string s = std::to_string(length_) + ":";
    const std::uint64_t nbytes = std::max<std::uint64_t>(1, capacity() / 8);
    for (std::uint64_t i = 0; i < nbytes; ++i) {
      std::uint8_t byte = std::uint8_t(blocks_[i >> 3] >> (8 * (i & 7)));
      s += hexd[byte >> 4];
      s += hexd[byte & 15];
    }
    return s;
  }

  static WordSet deserialize(const std::string& text) {
    auto colon = text.find(':');
    if (colon == std::string::npos) throw ConfigError("word set: expected L:hex");
    std::size_t length = 0;
    try {
      length = std::stoul(text.substr(0, colon));
    } catch (const std::exception&) {
      throw ConfigError("word set: malformed length in '" + text + "'");
    }
    WordSet s(length);
    const std::string hex = text.substr(colon + 1);
    const std::uint64_t nbytes = std::max<std::uint64_t>(1, s.capacity() / 8);
    if (hex.size() != 2 * nbytes) throw ConfigError("word set: bitmap has wrong size for length");
    auto nib = [&](char ch) -> std::uint64_t {
      if (ch >= '0' && ch <= '9') return std::uint64_t(ch - '0');
      if (ch >= 'a' && ch <= 'f') return std::uint64_t(ch - 'a' + 10);
      throw ConfigError("word set: bad hex digit");
    };
    for (std::uint64_t i = 0; i < nbytes; ++i) {
      std::uint64_t byte = (nib(hex[2 * i]) << 4) | nib(hex[2 * i + 1]);
      s.blocks_[i >> 3] |= byte << (8 * (i & 7));
    }
    s.trim();
    return s;
  }

  const std::vector<std::uint64_t>& blocks() const { return blocks_; }

 private:
  static std::size_t block_count(std::size_t length) {
    const std::uint64_t bits = 1ull << length;
    return std::size_t((bits + 63) / 64);
  }
  void check_index(std::uint64_t idx) const {
    if (idx >= capacity()) throw std::invalid_argument("word set: index out of range");
  }
  void trim() {
    if (length_ < 6) blocks_[0] &= (1ull << capacity()) - 1ull;
  }

  std::size_t length_;
  std::vector<std::uint64_t> blocks_;
};

// { b . w : w in s } as a fresh set one letter longer.
inline WordSet extend(int b, const WordSet& s) {
  WordSet out(s.length() + 1);
  out.or_prepended(b, s);
  return out;
}

// ---------------------------------------------------------------------------
// The word family of stage n: all binary words of length 2(n-1), enumerated
// in MSB-first index order.  Refuses stages whose words exceed 30 letters.

class XiRange {
 public:
  explicit XiRange(std::size_t n) {
    if (n < 1) throw std::invalid_argument("xi range: n must be >= 1");
    length_ = 2 * (n - 1);
    if (length_ > 30)
      throw ResourceError("xi range: stage " + std::to_string(n) + " has words of " + std::to_string(length_) +
                          " letters, beyond the 30-letter enumeration guard");
  }

  std::size_t word_length() const { return length_; }
  std::uint64_t size() const { return 1ull << length_; }
  Word at(std::uint64_t i) const { return word_of(i, length_); }

  class iterator {
   public:
    iterator(const XiRange* r, std::uint64_t i) : r_(r), i_(i) {}
    Word operator*() const { return r_->at(i_); }
    iterator& operator++() {
      ++i_;
      return *this;
    }
    bool operator!=(const iterator& o) const { return i_ != o.i_; }

   private:
    const XiRange* r_;
    std::uint64_t i_;
  };
  iterator begin() const { return iterator(this, 0); }
  iterator end() const { return iterator(this, size()); }

 private:
  std::size_t length_;
};

inline XiRange enumerate_xi(std::size_t n) { return XiRange(n); }

}  // namespace wordperc
