#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace wordperc {

// Bad user-supplied configuration (CLI exit code 2).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// A guard refused to run a request that would exceed a resource budget
// (CLI exit code 3).  The message names the limiting quantity.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Filesystem failure while writing results (CLI exit code 4).
class IoError : public std::runtime_error {
 public:
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// ---------------------------------------------------------------------------
// Deterministic keyed hashing.
//
// All randomness in the library is a pure function of (seed, object id).  An
// object id is a sequence of 64-bit fields; the hash absorbs them with the
// canonical SplitMix64 scramble:
//
//   h_0 = seed,  h_{k+1} = splitmix64(h_k XOR field_k)
//
// splitmix64(z): z += 0x9E3779B97F4A7C15; z = (z^(z>>30))*0xBF58476D1CE4E5B9;
//                z = (z^(z>>27))*0x94D049BB133111EB; return z^(z>>31).
//
// This is fixed for all time; golden values in the test suite pin it.

constexpr std::uint64_t splitmix64(std::uint64_t z) noexcept {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

constexpr std::uint64_t hash_absorb(std::uint64_t h, std::uint64_t field) noexcept {
  return splitmix64(h ^ field);
}

constexpr std::uint64_t hash_fields(std::uint64_t seed, std::span<const std::uint64_t> fields) noexcept {
  std::uint64_t h = seed;
  for (std::uint64_t w : fields) h = hash_absorb(h, w);
  return h;
}

// Top 53 bits -> [0,1).  Exactly representable; identical on every platform.
constexpr double to_unit_interval(std::uint64_t h) noexcept {
  return double(h >> 11) * 0x1.0p-53;
}

// Shortest decimal form that parses back to the same double; every echoed
// parameter goes through here so configs round-trip bit for bit.
inline std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Independent randomness streams for one Monte Carlo trial.
enum class Stream : std::uint64_t { bond = 1, site = 2, oriented = 3 };

// Field tag 2 marks seed derivation; tags 0/1 are site/edge ids (model.hpp),
// so derived seeds can never collide structurally with environment queries.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t trial, Stream s) noexcept {
  const std::uint64_t f[3] = {2ull, trial, static_cast<std::uint64_t>(s)};
  return hash_fields(master, std::span<const std::uint64_t>(f, 3));
}

// ---------------------------------------------------------------------------
// Trial execution.

enum class TrialOutcome : std::uint8_t { failure = 0, success = 1, refused = 2 };

struct TrialCounts {
  std::uint64_t successes = 0;
  std::uint64_t refused = 0;
};

inline constexpr const char* kWorkersEnvVar = "WORDPERC_WORKERS";

// requested == 0 means "unspecified": consult WORDPERC_WORKERS, then the
// hardware.  Always returns >= 1.
inline unsigned resolve_workers(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv(kWorkersEnvVar)) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (end && *end == '\0' && v > 0 && v <= 4096) return static_cast<unsigned>(v);
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

// Wilson score interval for a binomial proportion at 95% coverage.
struct WilsonInterval {
  double lo = 0.0, hi = 1.0;
};

inline WilsonInterval wilson_ci(std::uint64_t successes, std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("wilson_ci: n must be positive");
  if (successes > n) throw std::invalid_argument("wilson_ci: successes exceed n");
  constexpr double z = 1.959963984540054;  // 97.5% normal quantile
  const double nn = double(n), ph = double(successes) / nn, z2 = z * z;
  const double denom = 1.0 + z2 / nn;
  const double center = ph + z2 / (2.0 * nn);
  const double spread = z * std::sqrt(ph * (1.0 - ph) / nn + z2 / (4.0 * nn * nn));
  return {(center - spread) / denom, (center + spread) / denom};
}

// Runs fn(trial) for trial in [0, trials) partitioned statically over worker
// threads.  Each trial's outcome must depend only on its index (callers key
// all randomness off derive_seed(master, trial, stream)), so the summed
// counts are identical for every worker count.
template <class Fn>
TrialCounts run_trials(std::uint64_t trials, unsigned workers, Fn&& fn) {
  workers = resolve_workers(workers);
  if (workers <= 1 || trials < 2) {
    TrialCounts c;
    for (std::uint64_t t = 0; t < trials; ++t) {
      TrialOutcome o = fn(t);
      if (o == TrialOutcome::success) ++c.successes;
      else if (o == TrialOutcome::refused) ++c.refused;
    }
    return c;
  }
  if (std::uint64_t(workers) > trials) workers = static_cast<unsigned>(trials);
  std::vector<TrialCounts> partial(workers);
  std::vector<std::thread> pool;
  pool.reserve(workers);
  const std::uint64_t base = trials / workers, rem = trials % workers;
  std::uint64_t lo = 0;
  for (unsigned w = 0; w < workers; ++w) {
    const std::uint64_t hi = lo + base + (w < rem ? 1 : 0);
    pool.emplace_back([&fn, &partial, w, lo, hi]() {
      TrialCounts c;
      for (std::uint64_t t = lo; t < hi; ++t) {
        TrialOutcome o = fn(t);
        if (o == TrialOutcome::success) ++c.successes;
        else if (o == TrialOutcome::refused) ++c.refused;
      }
      partial[w] = c;
    });
    lo = hi;
  }
  for (auto& th : pool) th.join();
  TrialCounts total;
  for (const auto& c : partial) {
    total.successes += c.successes;
    total.refused += c.refused;
  }
  return total;
}

}  // namespace wordperc
