#pragma once

// Brute-force reference implementations for tests. Everything here is
// written for clarity over speed and stays independent of the library's
// sieve/enumeration code paths.

#include <cstdint>
#include <map>
#include <vector>

namespace oracle {

inline bool is_prime(uint64_t n) {
  if (n < 2) return false;
  for (uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

inline uint64_t prime_count(uint64_t limit) {
  uint64_t count = 0;
  for (uint64_t n = 2; n <= limit; ++n)
    if (is_prime(n)) ++count;
  return count;
}

inline std::vector<uint64_t> distinct_prime_factors(uint64_t n) {
  std::vector<uint64_t> ps;
  for (uint64_t d = 2; d * d <= n; ++d) {
    if (n % d) continue;
    ps.push_back(d);
    while (n % d == 0) n /= d;
  }
  if (n > 1) ps.push_back(n);
  return ps;
}

inline uint32_t omega(uint64_t n) {
  return static_cast<uint32_t>(distinct_prime_factors(n).size());
}

inline uint64_t pplus(uint64_t n) {
  auto ps = distinct_prime_factors(n);
  return ps.empty() ? 0 : ps.back();
}

inline uint64_t phi(uint64_t n) {
  uint64_t result = n;
  for (uint64_t p : distinct_prime_factors(n)) result -= result / p;
  return result;
}

// Exponent of the largest prime factor of n (0 for n = 1).
inline uint32_t top_prime_multiplicity(uint64_t n) {
  uint64_t p = pplus(n);
  if (p == 0) return 0;
  uint32_t v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return v;
}

}  // namespace oracle
