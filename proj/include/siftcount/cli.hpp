#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "siftcount/families.hpp"
#include "siftcount/weights.hpp"

namespace siftcount {

// Everything a run needs, filled from flags and/or a key=value config file.
struct RunConfig {
  std::string command;
  std::vector<uint64_t> xs;  // report accepts a comma list, others one value
  std::string family = "all";
  std::string weight = "unit-over-r";
  std::string primeset = "all";  // E used by the restricted weights
  std::string kind = "hr";       // hr | theorem
  double lambda = 1.0;
  double c1 = 1.0, c2 = 0.0;  // bound, hr kind
  double b = 1.0, c = 0.0;    // bound, theorem kind
  double lemma_c = -1.0;      // lemma constant; < 0 means fit it
  uint32_t lmax = 20;
  std::string format = "csv";  // csv | json
  std::string out_path;        // empty = stdout
  unsigned threads = 0;
  uint64_t segment_size = uint64_t{1} << 20;
  std::string cache_dir;  // falls back to $SIFTCOUNT_CACHE_DIR
};

// Exit codes: 0 success, 1 computational infeasibility, 2 usage error.
int run_cli(int argc, const char* const* argv);

// "123", "1e6", "25e2" -> exact integers; anything with a fractional
// mantissa, sign or overflow is rejected with std::invalid_argument.
uint64_t parse_scientific_u64(const std::string& s);
std::vector<uint64_t> parse_x_list(const std::string& s);

// "all" | "none" | "list(2,3)" | "mod(4:1,3)" | "comp(5,7)"
PrimeSet parse_primeset_spec(const std::string& s);

// "all" | "twin" | "shifted:a=<int>" | "qe:<primeset>"
// | "shifted-qe:a=<int>,<primeset>"
SiftedFamily parse_family_spec(const std::string& s);

// %.12g rendering used for every real emitted by the CLI.
std::string format_real(double v);

}  // namespace siftcount
