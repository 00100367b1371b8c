#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

namespace siftcount {

struct SieveConfig {
  uint64_t segment_size = uint64_t{1} << 20;  // integers per segment, >= 2^10
  std::optional<std::filesystem::path> cache_dir;
  bool parallel = false;
  unsigned threads = 0;  // worker cap, 0 = hardware concurrency
};

// Ordered list of the primes up to an inclusive limit. Entries below 2^32
// live in 32-bit slots; anything above spills into a 64-bit tail, so the
// common case costs 4 bytes per prime.
class PrimeTable {
 public:
  PrimeTable() = default;
  PrimeTable(uint64_t limit, std::vector<uint32_t> small,
             std::vector<uint64_t> large)
      : limit_(limit), small_(std::move(small)), large_(std::move(large)) {}

  uint64_t limit() const { return limit_; }
  size_t size() const { return small_.size() + large_.size(); }
  bool empty() const { return size() == 0; }

  uint64_t operator[](size_t i) const {
    return i < small_.size() ? small_[i] : large_[i - small_.size()];
  }
  uint64_t back() const { return operator[](size() - 1); }

  // Number of primes <= y (y clamped to limit).
  size_t count_leq(uint64_t y) const;
  // Index of the first prime >= lo, or size() if none.
  size_t lower_bound(uint64_t lo) const;
  bool contains(uint64_t p) const;

  // f(p) over primes in [lo, hi], ascending.
  template <class F>
  void for_each_in(uint64_t lo, uint64_t hi, F&& f) const {
    size_t i = lower_bound(lo);
    size_t n = size();
    for (; i < n; ++i) {
      uint64_t p = operator[](i);
      if (p > hi) break;
      f(p);
    }
  }
  template <class F>
  void for_each(F&& f) const {
    for (uint32_t p : small_) f(static_cast<uint64_t>(p));
    for (uint64_t p : large_) f(p);
  }

 private:
  uint64_t limit_ = 0;
  std::vector<uint32_t> small_;
  std::vector<uint64_t> large_;
};

// Segmented sieve of Eratosthenes. Deterministic for any segment size and
// thread count; consults cfg.cache_dir when set (cache misses recompute and
// write back, corrupt caches are ignored). limit must be in [2, 2^40].
PrimeTable sieve_primes(uint64_t limit, const SieveConfig& cfg = {});

// Per-integer factor statistics over [lo, hi]:
//   omega[n-lo] = number of distinct prime factors of n (omega(1) = 0)
//   pplus[n-lo] = largest prime factor of n (pplus(1) = 0)
struct FactorStats {
  uint64_t lo = 0;
  uint64_t hi = 0;
  std::vector<uint8_t> omega;
  std::vector<uint64_t> pplus;

  uint32_t omega_of(uint64_t n) const { return omega[n - lo]; }
  uint64_t pplus_of(uint64_t n) const { return pplus[n - lo]; }
};

// Computes FactorStats by marking each base prime p <= sqrt(hi) across the
// interval and dividing it out; a residual cofactor > 1 is a prime factor
// above sqrt(hi). Requires base.limit >= sqrt(hi) and 1 <= lo <= hi.
FactorStats factor_stats(uint64_t lo, uint64_t hi, const PrimeTable& base,
                         const SieveConfig& cfg = {});

// Distinct-prime-factor count by plain trial division. Deliberately
// independent of the segmented path; used to validate it.
uint32_t omega_single(uint64_t n);

// Largest prime factor by trial division (0 for n = 1).
uint64_t pplus_single(uint64_t n);

// (prime, exponent) pairs of n in ascending prime order, by trial division.
std::vector<std::pair<uint64_t, uint32_t>> factorize(uint64_t n);

// Deterministic Miller-Rabin, correct for all 64-bit n.
bool is_prime_u64(uint64_t n);

// Prime cache: 16-byte header (magic "SCPT", u32 version, u64 limit)
// followed by the primes as 8-byte little-endian words.
std::filesystem::path prime_cache_path(const std::filesystem::path& dir,
                                       uint64_t limit);
bool save_prime_cache(const PrimeTable& table,
                      const std::filesystem::path& file);
std::optional<PrimeTable> load_prime_cache(const std::filesystem::path& file);

}  // namespace siftcount
