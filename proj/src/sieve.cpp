#include "siftcount/sieve.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <string>

#include "siftcount/util.hpp"

namespace siftcount {

namespace {

constexpr uint64_t kMaxLimit = uint64_t{1} << 40;
constexpr uint64_t kMinSegment = uint64_t{1} << 10;
constexpr char kCacheMagic[4] = {'S', 'C', 'P', 'T'};
constexpr uint32_t kCacheVersion = 1;

void check_config(const SieveConfig& cfg) {
  if (cfg.segment_size < kMinSegment)
    throw std::invalid_argument("segment_size must be >= 1024, got " +
                                std::to_string(cfg.segment_size));
}

// Flat sieve for the base primes (limit <= 2^20 in practice).
std::vector<uint64_t> simple_sieve(uint64_t limit) {
  std::vector<uint8_t> composite(limit + 1, 0);
  std::vector<uint64_t> primes;
  for (uint64_t i = 2; i <= limit; ++i) {
    if (composite[i]) continue;
    primes.push_back(i);
    for (uint64_t j = i * i; j <= limit; j += i) composite[j] = 1;
  }
  return primes;
}

struct SegmentPrimes {
  std::vector<uint32_t> small;
  std::vector<uint64_t> large;
};

// Sieve the odd numbers of [lo, hi] against base_odd (odd base primes).
void sieve_segment(uint64_t lo, uint64_t hi,
                   const std::vector<uint64_t>& base_odd,
                   SegmentPrimes& out) {
  if (lo <= 2 && 2 <= hi) out.small.push_back(2);
  // flags over odd values only: index i <-> value first_odd + 2i
  uint64_t first_odd = lo | 1;
  if (first_odd > hi) return;
  size_t n_odd = (hi - first_odd) / 2 + 1;
  std::vector<uint8_t> is_prime(n_odd, 1);

  for (uint64_t p : base_odd) {
    if (p * p > hi) break;
    uint64_t start = std::max(p * p, ((lo + p - 1) / p) * p);
    if ((start & 1) == 0) start += p;  // odd multiples only
    for (uint64_t m = start; m <= hi; m += 2 * p)
      is_prime[(m - first_odd) / 2] = 0;
  }
  if (first_odd == 1) is_prime[0] = 0;

  for (size_t i = 0; i < n_odd; ++i) {
    if (!is_prime[i]) continue;
    uint64_t p = first_odd + 2 * i;
    if (p <= UINT32_MAX)
      out.small.push_back(static_cast<uint32_t>(p));
    else
      out.large.push_back(p);
  }
}

}  // namespace

size_t PrimeTable::lower_bound(uint64_t lo) const {
  if (lo <= 2) return 0;
  if (lo <= UINT32_MAX) {
    auto it = std::lower_bound(small_.begin(), small_.end(),
                               static_cast<uint32_t>(lo));
    if (it != small_.end()) return static_cast<size_t>(it - small_.begin());
  }
  auto it = std::lower_bound(large_.begin(), large_.end(), lo);
  return small_.size() + static_cast<size_t>(it - large_.begin());
}

size_t PrimeTable::count_leq(uint64_t y) const {
  if (y >= limit_) return size();
  return lower_bound(y + 1);
}

bool PrimeTable::contains(uint64_t p) const {
  size_t i = lower_bound(p);
  return i < size() && operator[](i) == p;
}

PrimeTable sieve_primes(uint64_t limit, const SieveConfig& cfg) {
  if (limit < 2 || limit > kMaxLimit)
    throw std::out_of_range("sieve_primes: limit must be in [2, 2^40], got " +
                            std::to_string(limit));
  check_config(cfg);

  if (cfg.cache_dir) {
    auto cached = load_prime_cache(prime_cache_path(*cfg.cache_dir, limit));
    if (cached && cached->limit() == limit) return std::move(*cached);
  }

  std::vector<uint64_t> base = simple_sieve(isqrt_u64(limit));
  std::vector<uint64_t> base_odd(base.begin() + (base.empty() ? 0 : 1),
                                 base.end());

  uint64_t seg = cfg.segment_size;
  uint64_t n_segments = (limit - 2) / seg + 1;
  std::vector<SegmentPrimes> slots(n_segments);

  parallel_tasks(n_segments, cfg.parallel ? cfg.threads : 1, [&](uint64_t si) {
    uint64_t lo = 2 + si * seg;
    uint64_t hi = std::min(limit, lo + seg - 1);
    sieve_segment(lo, hi, base_odd, slots[si]);
  });

  size_t n_small = 0, n_large = 0;
  for (const auto& s : slots) {
    n_small += s.small.size();
    n_large += s.large.size();
  }
  std::vector<uint32_t> small;
  std::vector<uint64_t> large;
  small.reserve(n_small);
  large.reserve(n_large);
  for (auto& s : slots) {
    small.insert(small.end(), s.small.begin(), s.small.end());
    large.insert(large.end(), s.large.begin(), s.large.end());
    s.small.clear();
    s.small.shrink_to_fit();
    s.large.clear();
    s.large.shrink_to_fit();
  }

  PrimeTable table(limit, std::move(small), std::move(large));
  if (cfg.cache_dir)
    save_prime_cache(table, prime_cache_path(*cfg.cache_dir, limit));
  return table;
}

namespace {

// One contiguous block of the factor-stats computation.
void factor_stats_block(uint64_t lo, uint64_t hi, const PrimeTable& base,
                        uint8_t* omega, uint64_t* pplus) {
  size_t n = hi - lo + 1;
  std::vector<uint64_t> rem(n);
  for (size_t i = 0; i < n; ++i) rem[i] = lo + i;

  uint64_t root = isqrt_u64(hi);
  base.for_each_in(2, root, [&](uint64_t p) {
    for (uint64_t m = ((lo + p - 1) / p) * p; m <= hi; m += p) {
      size_t i = m - lo;
      omega[i] += 1;
      pplus[i] = p;
      do {
        rem[i] /= p;
      } while (rem[i] % p == 0);
    }
  });
  // anything left over is a single prime factor above sqrt(hi)
  for (size_t i = 0; i < n; ++i) {
    if (rem[i] > 1) {
      omega[i] += 1;
      pplus[i] = rem[i];
    }
  }
}

}  // namespace

FactorStats factor_stats(uint64_t lo, uint64_t hi, const PrimeTable& base,
                         const SieveConfig& cfg) {
  if (lo < 1 || lo > hi)
    throw std::invalid_argument("factor_stats: need 1 <= lo <= hi");
  check_config(cfg);
  uint64_t root = isqrt_u64(hi);
  if (base.limit() < root)
    throw std::invalid_argument(
        "factor_stats: base table limit " + std::to_string(base.limit()) +
        " is below sqrt(hi) = " + std::to_string(root));

  FactorStats st;
  st.lo = lo;
  st.hi = hi;
  size_t n = hi - lo + 1;
  st.omega.assign(n, 0);
  st.pplus.assign(n, 0);

  uint64_t block = cfg.segment_size;
  uint64_t n_blocks = (n - 1) / block + 1;
  parallel_tasks(n_blocks, cfg.parallel ? cfg.threads : 1, [&](uint64_t bi) {
    uint64_t blo = lo + bi * block;
    uint64_t bhi = std::min(hi, blo + block - 1);
    factor_stats_block(blo, bhi, base, st.omega.data() + (blo - lo),
                       st.pplus.data() + (blo - lo));
  });

  if (lo == 1) {
    st.omega[0] = 0;
    st.pplus[0] = 0;
  }
  return st;
}

uint32_t omega_single(uint64_t n) {
  if (n < 1) throw std::invalid_argument("omega_single: n must be >= 1");
  uint32_t count = 0;
  for (uint64_t d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    if (n % d) continue;
    ++count;
    do {
      n /= d;
    } while (n % d == 0);
  }
  if (n > 1) ++count;
  return count;
}

uint64_t pplus_single(uint64_t n) {
  uint64_t largest = 0;
  for (uint64_t d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    if (n % d) continue;
    largest = d;
    do {
      n /= d;
    } while (n % d == 0);
  }
  return n > 1 ? n : largest;
}

std::vector<std::pair<uint64_t, uint32_t>> factorize(uint64_t n) {
  std::vector<std::pair<uint64_t, uint32_t>> out;
  for (uint64_t d = 2; d * d <= n; d += (d == 2 ? 1 : 2)) {
    if (n % d) continue;
    uint32_t v = 0;
    do {
      n /= d;
      ++v;
    } while (n % d == 0);
    out.emplace_back(d, v);
  }
  if (n > 1) out.emplace_back(n, 1);
  return out;
}

namespace {

// cache words are little-endian on every platform
void put_le64(char* dst, uint64_t v) {
  for (int i = 0; i < 8; ++i) dst[i] = static_cast<char>((v >> (8 * i)) & 0xff);
}

uint64_t get_le64(const char* src) {
  uint64_t v = 0;
  for (int i = 0; i < 8; ++i)
    v |= static_cast<uint64_t>(static_cast<unsigned char>(src[i])) << (8 * i);
  return v;
}

void put_le32(char* dst, uint32_t v) {
  for (int i = 0; i < 4; ++i) dst[i] = static_cast<char>((v >> (8 * i)) & 0xff);
}

uint32_t get_le32(const char* src) {
  uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<uint32_t>(static_cast<unsigned char>(src[i])) << (8 * i);
  return v;
}

uint64_t mulmod_u64(uint64_t a, uint64_t b, uint64_t m) {
  return static_cast<uint64_t>(static_cast<__uint128_t>(a) * b % m);
}

uint64_t powmod_u64(uint64_t a, uint64_t e, uint64_t m) {
  uint64_t r = 1;
  a %= m;
  while (e) {
    if (e & 1) r = mulmod_u64(r, a, m);
    a = mulmod_u64(a, a, m);
    e >>= 1;
  }
  return r;
}

}  // namespace

bool is_prime_u64(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t p : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                     23ull, 29ull, 31ull, 37ull}) {
    if (n % p == 0) return n == p;
  }
  uint64_t d = n - 1;
  int s = 0;
  while ((d & 1) == 0) {
    d >>= 1;
    ++s;
  }
  // this base set is a proven witness set for every n < 3.3e24
  for (uint64_t a : {2ull, 3ull, 5ull, 7ull, 11ull, 13ull, 17ull, 19ull,
                     23ull, 29ull, 31ull, 37ull}) {
    uint64_t x = powmod_u64(a, d, n);
    if (x == 1 || x == n - 1) continue;
    bool witness = true;
    for (int i = 1; i < s; ++i) {
      x = mulmod_u64(x, x, n);
      if (x == n - 1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

std::filesystem::path prime_cache_path(const std::filesystem::path& dir,
                                       uint64_t limit) {
  return dir / ("primes_" + std::to_string(limit) + ".bin");
}

bool save_prime_cache(const PrimeTable& table,
                      const std::filesystem::path& file) {
  std::error_code ec;
  std::filesystem::create_directories(file.parent_path(), ec);
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) return false;

  char header[16];
  std::memcpy(header, kCacheMagic, 4);
  put_le32(header + 4, kCacheVersion);
  put_le64(header + 8, table.limit());
  out.write(header, sizeof(header));

  std::vector<char> buf;
  buf.reserve(8 << 16);
  table.for_each([&](uint64_t p) {
    char word[8];
    put_le64(word, p);
    buf.insert(buf.end(), word, word + 8);
    if (buf.size() >= (8u << 16)) {
      out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
      buf.clear();
    }
  });
  if (!buf.empty())
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  return static_cast<bool>(out);
}

std::optional<PrimeTable> load_prime_cache(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) return std::nullopt;

  char header[16];
  in.read(header, sizeof(header));
  if (!in || std::memcmp(header, kCacheMagic, 4) != 0) return std::nullopt;
  uint32_t version = get_le32(header + 4);
  uint64_t limit = get_le64(header + 8);
  if (version != kCacheVersion || limit < 2 || limit > kMaxLimit)
    return std::nullopt;

  std::vector<uint32_t> small;
  std::vector<uint64_t> large;
  uint64_t prev = 0;
  std::vector<char> buf(8 << 16);
  for (;;) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    auto got = in.gcount();
    if (got % 8 != 0) return std::nullopt;  // truncated record
    size_t n = static_cast<size_t>(got) / 8;
    for (size_t i = 0; i < n; ++i) {
      uint64_t p = get_le64(buf.data() + 8 * i);
      if (p <= prev || p > limit) return std::nullopt;
      prev = p;
      if (p <= UINT32_MAX)
        small.push_back(static_cast<uint32_t>(p));
      else
        large.push_back(p);
    }
    if (!in) break;
  }
  if (small.empty() || small.front() != 2) return std::nullopt;
  return PrimeTable(limit, std::move(small), std::move(large));
}

}  // namespace siftcount
