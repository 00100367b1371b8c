#include "siftcount/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "siftcount/envelopes.hpp"
#include "siftcount/lemma.hpp"
#include "siftcount/util.hpp"

namespace siftcount {

using nlohmann::json;

std::string format_real(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

namespace {

// Reals go through the same 12-significant-digit decimal in both formats,
// so CSV and JSON emissions of one run carry identical numbers.
json real12(double v) { return json::parse(format_real(v)); }

std::string render_cell(const json& cell) {
  if (cell.is_null()) return "";
  if (cell.is_string()) return cell.get<std::string>();
  if (cell.is_number_float()) return format_real(cell.get<double>());
  return cell.dump();
}

struct Output {
  std::vector<std::string> header;
  std::vector<json> rows;  // arrays aligned with header
  json meta = json::object();

  void add_row(std::initializer_list<json> cells) {
    rows.push_back(json::array());
    for (const auto& c : cells) rows.back().push_back(c);
  }

  std::string to_csv() const {
    std::ostringstream os;
    for (size_t i = 0; i < header.size(); ++i)
      os << header[i] << (i + 1 < header.size() ? "," : "");
    os << "\n";
    for (const auto& row : rows) {
      for (size_t i = 0; i < row.size(); ++i)
        os << render_cell(row[i]) << (i + 1 < row.size() ? "," : "");
      os << "\n";
    }
    return os.str();
  }

  std::string to_json() const {
    json doc = meta;
    doc["rows"] = json::array();
    for (const auto& row : rows) {
      json obj = json::object();
      for (size_t i = 0; i < row.size(); ++i) obj[header[i]] = row[i];
      doc["rows"].push_back(obj);
    }
    return doc.dump(2) + "\n";
  }
};

int emit(const Output& out, const RunConfig& cfg) {
  std::string text = cfg.format == "json" ? out.to_json() : out.to_csv();
  if (cfg.out_path.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(cfg.out_path, std::ios::binary | std::ios::trunc);
    if (!f) {
      std::cerr << "cannot open output file " << cfg.out_path << "\n";
      return 2;
    }
    f << text;
  }
  return 0;
}

SieveConfig sieve_config(const RunConfig& cfg) {
  SieveConfig s;
  s.segment_size = cfg.segment_size;
  s.threads = cfg.threads;
  s.parallel = cfg.threads != 1;
  std::string dir = cfg.cache_dir;
  if (dir.empty()) {
    const char* env = std::getenv("SIFTCOUNT_CACHE_DIR");
    if (env && *env) dir = env;
  }
  if (!dir.empty()) s.cache_dir = dir;
  return s;
}

uint64_t single_x(const RunConfig& cfg) {
  if (cfg.xs.size() != 1)
    throw std::invalid_argument("this command takes exactly one --x value");
  return cfg.xs[0];
}

// Smallest prime-table limit serving the command's histogram needs at x.
uint64_t table_limit_for(const SiftedFamily& F, uint64_t x, bool need_primes_to_x) {
  uint64_t lim = std::max<uint64_t>(F.prime_limit_needed(x), 16);
  lim = std::max(lim, isqrt_u64(x / F.s()) + 1);
  if (need_primes_to_x) lim = std::max(lim, x);
  return lim;
}

EnvelopeParams::Kind parse_kind(const std::string& kind) {
  if (kind == "hr") return EnvelopeParams::Kind::HR;
  if (kind == "theorem") return EnvelopeParams::Kind::Theorem;
  throw std::invalid_argument("unknown envelope kind '" + kind +
                              "' (expected hr or theorem)");
}

int cmd_sieve(const RunConfig& cfg) {
  uint64_t limit = single_x(cfg);
  auto scfg = sieve_config(cfg);
  PrimeTable table = sieve_primes(limit, scfg);
  Output out;
  out.meta["command"] = "sieve";
  out.meta["limit"] = limit;
  out.meta["pi"] = table.size();
  if (scfg.cache_dir)
    out.meta["cache"] = prime_cache_path(*scfg.cache_dir, limit).string();
  out.header = {"limit", "pi"};
  out.add_row({limit, table.size()});
  return emit(out, cfg);
}

int cmd_count(const RunConfig& cfg) {
  uint64_t x = single_x(cfg);
  SiftedFamily F = parse_family_spec(cfg.family);
  auto scfg = sieve_config(cfg);
  PrimeTable table = sieve_primes(table_limit_for(F, x, false), scfg);
  CountHistogram hist = count_histogram(F, x, table, scfg);

  Output out;
  out.meta["command"] = "count";
  out.meta["family"] = hist.family;
  out.meta["x"] = x;
  out.meta["s"] = hist.s;
  out.meta["total"] = hist.total;
  out.header = {"k", "n_k"};
  for (uint32_t k = 0; k < hist.counts.size(); ++k)
    out.add_row({k, hist.counts[k]});
  return emit(out, cfg);
}

// Gx for the configured weight at x (theorem kind only).
double gx_for(const RunConfig& cfg, uint64_t x, const PrimeTable& table) {
  Weight w = make_weight(cfg.weight, parse_primeset_spec(cfg.primeset));
  return big_G(w, x, table);
}

int cmd_fit(const RunConfig& cfg) {
  uint64_t x = single_x(cfg);
  SiftedFamily F = parse_family_spec(cfg.family);
  auto kind = parse_kind(cfg.kind);
  bool theorem = kind == EnvelopeParams::Kind::Theorem;
  auto scfg = sieve_config(cfg);
  PrimeTable table = sieve_primes(table_limit_for(F, x, theorem), scfg);
  CountHistogram hist = count_histogram(F, x, table, scfg);
  double gx = theorem ? gx_for(cfg, x, table) : 0.0;
  FitResult fit = fit_constants(hist, kind, cfg.lambda, gx);

  Output out;
  out.meta["command"] = "fit";
  out.meta["family"] = hist.family;
  out.meta["x"] = x;
  out.meta["kind"] = cfg.kind;
  out.meta["lambda"] = real12(theorem ? cfg.lambda : 1.0);
  if (theorem) {
    out.meta["weight"] = cfg.weight;
    out.meta["gx"] = real12(gx);
    out.meta["b"] = real12(fit.params.b);
    out.meta["c"] = real12(fit.params.c);
  } else {
    out.meta["c1"] = real12(fit.params.c1);
    out.meta["c2"] = real12(fit.params.c2);
  }
  out.meta["max_ratio"] = real12(fit.max_ratio);
  out.meta["argmax_k"] = fit.argmax_k;
  json per_k = json::object();
  for (auto [k, ratio] : fit.per_k_ratios)
    per_k[std::to_string(k)] = real12(ratio);
  out.meta["per_k_ratios"] = per_k;

  out.header = {"family",    "x",         "kind",     "lambda", "tight_const",
                "add_const", "max_ratio", "argmax_k", "k",      "ratio"};
  for (auto [k, ratio] : fit.per_k_ratios) {
    out.add_row({hist.family, x, cfg.kind, real12(cfg.lambda),
                 real12(theorem ? fit.params.b : fit.params.c1),
                 real12(theorem ? fit.params.c : fit.params.c2),
                 real12(fit.max_ratio), fit.argmax_k, k, real12(ratio)});
  }
  return emit(out, cfg);
}

int cmd_bound(const RunConfig& cfg) {
  uint64_t x = single_x(cfg);
  SiftedFamily F = parse_family_spec(cfg.family);
  auto kind = parse_kind(cfg.kind);
  bool theorem = kind == EnvelopeParams::Kind::Theorem;
  auto scfg = sieve_config(cfg);
  PrimeTable table = sieve_primes(table_limit_for(F, x, theorem), scfg);
  CountHistogram hist = count_histogram(F, x, table, scfg);
  double gx = theorem ? gx_for(cfg, x, table) : 0.0;

  EnvelopeParams params;
  params.kind = kind;
  params.lambda = cfg.lambda;
  params.c1 = cfg.c1;
  params.c2 = cfg.c2;
  params.b = cfg.b;
  params.c = cfg.c;
  FitResult eval = evaluate_envelope(params, hist, gx);

  Output out;
  out.meta["command"] = "bound";
  out.meta["family"] = hist.family;
  out.meta["x"] = x;
  out.meta["kind"] = cfg.kind;
  out.meta["max_ratio"] = real12(eval.max_ratio);
  out.meta["argmax_k"] = eval.argmax_k;
  out.header = {"k", "n_k", "envelope", "ratio"};
  for (uint32_t k = 0; k < hist.counts.size(); ++k) {
    if (k == 0 || hist.counts[k] == 0) {
      out.add_row({k, hist.counts[k], nullptr, nullptr});
    } else {
      out.add_row({k, hist.counts[k], real12(envelope_value(params, x, k, gx)),
                   real12(eval.per_k_ratios.at(k))});
    }
  }
  return emit(out, cfg);
}

int cmd_sieve_check(const RunConfig& cfg) {
  uint64_t x = single_x(cfg);
  SiftedFamily F = parse_family_spec(cfg.family);
  Weight w = make_weight(cfg.weight, parse_primeset_spec(cfg.primeset));
  auto scfg = sieve_config(cfg);
  PrimeTable table = sieve_primes(std::max<uint64_t>(x, 2), scfg);
  SieveCheckResult res = check_sieve_condition(F, w, cfg.lambda, x, table, scfg);

  Output out;
  out.meta["command"] = "sieve-check";
  out.meta["family"] = F.name();
  out.meta["weight"] = w.name();
  out.meta["lambda"] = real12(cfg.lambda);
  out.meta["x"] = x;
  out.meta["r_max"] = res.r_max;
  out.meta["feasible"] = res.feasible;
  out.header = {"r", "lhs", "g_r", "ratio"};
  if (res.feasible) {
    out.meta["b_star"] = real12(res.b_star);
    out.meta["argmax_r"] = res.argmax_r;
    for (const auto& row : res.worst)
      out.add_row({row.r, row.lhs, real12(row.g_r), real12(row.ratio)});
  } else {
    out.meta["infeasible_r"] = res.infeasible_r;
    out.meta["infeasible_lhs"] = res.infeasible_lhs;
    out.add_row({res.infeasible_r, res.infeasible_lhs, real12(0.0), nullptr});
  }
  int rc = emit(out, cfg);
  if (rc != 0) return rc;
  return res.feasible ? 0 : 1;
}

int cmd_lemma(const RunConfig& cfg) {
  uint64_t x = single_x(cfg);
  Weight w = make_weight(cfg.weight, parse_primeset_spec(cfg.primeset));
  auto scfg = sieve_config(cfg);
  PrimeTable table = sieve_primes(std::max<uint64_t>(x, 4), scfg);
  double c = cfg.lemma_c >= 0.0 ? cfg.lemma_c
                                : lemma_fit_c(x, cfg.lmax, w, cfg.lambda, table);

  Output out;
  out.meta["command"] = "lemma";
  out.meta["x"] = x;
  out.meta["weight"] = w.name();
  out.meta["lambda"] = real12(cfg.lambda);
  out.meta["c"] = real12(c);
  out.meta["ell_max"] = cfg.lmax;
  json jrows = json::array();
  out.header = {"ell", "sum", "bound", "ratio", "j", "q_j", "band_sum",
                "band_count"};
  for (uint32_t ell = 0; ell <= cfg.lmax; ++ell) {
    LemmaBound b = lemma_bound_check(x, ell, w, cfg.lambda, c, table);
    json bands = json::array();
    if (b.bands.empty()) {
      out.add_row({ell, real12(b.sum), real12(b.bound), real12(b.ratio),
                   nullptr, nullptr, nullptr, nullptr});
    }
    for (const auto& band : b.bands) {
      bands.push_back({{"j", band.j},
                       {"q_j", real12(band.q_j)},
                       {"sum", real12(band.sum)},
                       {"count", band.count}});
      out.add_row({ell, real12(b.sum), real12(b.bound), real12(b.ratio),
                   band.j, real12(band.q_j), real12(band.sum), band.count});
    }
    jrows.push_back({{"ell", ell},
                     {"sum", real12(b.sum)},
                     {"bound", real12(b.bound)},
                     {"ratio", real12(b.ratio)},
                     {"bands", bands}});
  }
  out.meta["lemma_rows"] = jrows;
  return emit(out, cfg);
}

int cmd_report(const RunConfig& cfg) {
  if (cfg.xs.empty())
    throw std::invalid_argument("report needs at least one --x value");
  std::vector<uint64_t> xs = cfg.xs;
  SiftedFamily F = parse_family_spec(cfg.family);
  auto kind = parse_kind(cfg.kind);
  bool theorem = kind == EnvelopeParams::Kind::Theorem;

  uint64_t limit = 2;
  for (uint64_t x : xs)
    limit = std::max(limit, table_limit_for(F, x, theorem));
  auto scfg = sieve_config(cfg);
  PrimeTable table = sieve_primes(limit, scfg);

  // constants are fitted at the first x and reused across the grid
  CountHistogram fit_hist = count_histogram(F, xs[0], table, scfg);
  double gx0 = theorem ? gx_for(cfg, xs[0], table) : 0.0;
  FitResult fit = fit_constants(fit_hist, kind, cfg.lambda, gx0);

  Output out;
  out.meta["command"] = "report";
  out.meta["family"] = F.name();
  out.meta["kind"] = cfg.kind;
  out.meta["fitted_at_x"] = xs[0];
  if (theorem) {
    out.meta["lambda"] = real12(cfg.lambda);
    out.meta["weight"] = cfg.weight;
    out.meta["b"] = real12(fit.params.b);
    out.meta["c"] = real12(fit.params.c);
  } else {
    out.meta["c1"] = real12(fit.params.c1);
    out.meta["c2"] = real12(fit.params.c2);
  }
  out.header = {"family", "x", "k", "n_k", "envelope", "ratio", "in_envelope"};
  json blocks = json::array();
  for (uint64_t x : xs) {
    CountHistogram hist =
        x == xs[0] ? fit_hist : count_histogram(F, x, table, scfg);
    double gx = theorem ? gx_for(cfg, x, table) : 0.0;
    FitResult eval = evaluate_envelope(fit.params, hist, gx);
    json block = {{"x", x}, {"max_ratio", real12(eval.max_ratio)}};
    for (uint32_t k = 0; k < hist.counts.size(); ++k) {
      // the k=0 bin (n = s) sits outside the envelope's claim
      if (k == 0 || hist.counts[k] == 0) {
        out.add_row({F.name(), x, k, hist.counts[k], nullptr, nullptr, 0});
      } else {
        out.add_row({F.name(), x, k, hist.counts[k],
                     real12(envelope_value(fit.params, x, k, gx)),
                     real12(eval.per_k_ratios.at(k)), 1});
      }
    }
    blocks.push_back(block);
  }
  out.meta["blocks"] = blocks;
  return emit(out, cfg);
}

}  // namespace

uint64_t parse_scientific_u64(const std::string& s) {
  auto fail = [&]() {
    throw std::invalid_argument("'" + s +
                                "' is not a plain or e-notation integer");
  };
  if (s.empty()) fail();
  size_t epos = s.find_first_of("eE");
  std::string mantissa = epos == std::string::npos ? s : s.substr(0, epos);
  std::string expstr = epos == std::string::npos ? "" : s.substr(epos + 1);
  if (mantissa.empty()) fail();
  if (mantissa.find('.') != std::string::npos)
    throw std::invalid_argument("'" + s + "': non-integral mantissa rejected");
  for (char ch : mantissa)
    if (!std::isdigit(static_cast<unsigned char>(ch))) fail();
  uint64_t value = 0;
  for (char ch : mantissa) {
    value = mul_capped(value, 10, UINT64_MAX / 2);
    if (value > UINT64_MAX / 4) fail();  // overflow
    value += static_cast<uint64_t>(ch - '0');
  }
  if (epos != std::string::npos) {
    if (expstr.empty()) fail();
    for (char ch : expstr)
      if (!std::isdigit(static_cast<unsigned char>(ch))) fail();
    if (expstr.size() > 2) fail();
    int exponent = std::stoi(expstr);
    for (int i = 0; i < exponent; ++i) {
      value = mul_capped(value, 10, UINT64_MAX / 2);
      if (value > UINT64_MAX / 4) fail();
    }
  }
  return value;
}

std::vector<uint64_t> parse_x_list(const std::string& s) {
  std::vector<uint64_t> xs;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) xs.push_back(parse_scientific_u64(item));
  if (xs.empty()) throw std::invalid_argument("empty --x list");
  return xs;
}

namespace {

std::vector<uint64_t> parse_int_list(const std::string& s) {
  std::vector<uint64_t> vals;
  if (s.empty()) return vals;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ','))
    vals.push_back(parse_scientific_u64(item));
  return vals;
}

// "name(args)" -> args, or nullopt when the shape does not match
std::optional<std::string> call_args(const std::string& s,
                                     const std::string& name) {
  if (s.size() < name.size() + 2 || s.compare(0, name.size(), name) != 0)
    return std::nullopt;
  if (s[name.size()] != '(' || s.back() != ')') return std::nullopt;
  return s.substr(name.size() + 1, s.size() - name.size() - 2);
}

}  // namespace

PrimeSet parse_primeset_spec(const std::string& s) {
  if (s == "all") return PrimeSet::all();
  if (s == "none") return PrimeSet::none();
  if (auto args = call_args(s, "list"))
    return PrimeSet::explicit_list(parse_int_list(*args));
  if (auto args = call_args(s, "comp"))
    return PrimeSet::complement_of(parse_int_list(*args));
  if (auto args = call_args(s, "mod")) {
    size_t colon = args->find(':');
    if (colon == std::string::npos)
      throw std::invalid_argument("mod primeset needs 'mod(m:r1,r2,...)'");
    uint64_t m = parse_scientific_u64(args->substr(0, colon));
    return PrimeSet::residues_mod(m, parse_int_list(args->substr(colon + 1)));
  }
  throw std::invalid_argument(
      "unknown primeset '" + s +
      "' (expected all, none, list(...), mod(m:...), comp(...))");
}

SiftedFamily parse_family_spec(const std::string& s) {
  if (s == "all") return SiftedFamily::all_integers();
  if (s == "twin") return SiftedFamily::twin_middles();
  auto parse_shift = [&](const std::string& body) {
    if (body.compare(0, 2, "a=") != 0)
      throw std::invalid_argument("family '" + s + "': expected a=<int>");
    size_t used = 0;
    int64_t a = std::stoll(body.substr(2), &used);
    if (used + 2 != body.size())
      throw std::invalid_argument("family '" + s + "': bad shift value");
    return a;
  };
  if (s.rfind("shifted:", 0) == 0)
    return SiftedFamily::shifted_primes(parse_shift(s.substr(8)));
  if (s.rfind("qe:", 0) == 0)
    return SiftedFamily::qe(parse_primeset_spec(s.substr(3)));
  if (s.rfind("shifted-qe:", 0) == 0) {
    std::string body = s.substr(11);
    size_t comma = body.find(',');
    if (comma == std::string::npos)
      throw std::invalid_argument("family '" + s +
                                  "': expected shifted-qe:a=<int>,<primeset>");
    int64_t a = parse_shift(body.substr(0, comma));
    return SiftedFamily::shifted_primes_qe(
        a, parse_primeset_spec(body.substr(comma + 1)));
  }
  throw std::invalid_argument(
      "unknown family '" + s +
      "' (expected all, twin, shifted:a=<int>, qe:<primeset>, "
      "shifted-qe:a=<int>,<primeset>)");
}

int run_cli(int argc, const char* const* argv) {
  RunConfig cfg;
  std::string x_arg;

  CLI::App app{"sieve-based counting of sifted sets by distinct prime "
               "factors, with bound envelopes"};
  app.set_config("--config", "", "key=value config file; flags win");
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("command", cfg.command,
                 "one of: sieve, count, bound, fit, sieve-check, lemma, "
                 "report")
      ->required()
      ->check(CLI::IsMember({"sieve", "count", "bound", "fit", "sieve-check",
                             "lemma", "report"}));
  app.add_option("--x", x_arg,
                 "upper limit; accepts 1e6 shorthand; report takes a comma "
                 "list")
      ->required();
  app.add_option("--family", cfg.family, "family spec (see README)");
  app.add_option("--weight", cfg.weight, "weight catalog name");
  app.add_option("--primeset", cfg.primeset,
                 "prime set backing restricted weights");
  app.add_option("--kind", cfg.kind, "envelope kind: hr | theorem")
      ->check(CLI::IsMember({"hr", "theorem"}));
  app.add_option("--lambda", cfg.lambda, "log exponent of the bound");
  app.add_option("--c1", cfg.c1, "hr envelope leading constant (bound)");
  app.add_option("--c2", cfg.c2, "hr envelope additive constant (bound)");
  app.add_option("--b", cfg.b, "theorem envelope leading constant (bound)");
  app.add_option("--c", cfg.c, "theorem envelope additive constant (bound)");
  app.add_option("--lemma-c", cfg.lemma_c,
                 "additive constant for lemma bounds; omit to fit it");
  app.add_option("--lmax", cfg.lmax, "largest ell for the lemma command");
  app.add_option("--format", cfg.format, "csv | json")
      ->check(CLI::IsMember({"csv", "json"}));
  app.add_option("--out", cfg.out_path, "output file (default stdout)");
  app.add_option("--threads", cfg.threads, "worker cap; 1 = sequential");
  app.add_option("--segment-size", cfg.segment_size,
                 "integers per sieve segment")
      ->check(CLI::Range(uint64_t{1} << 10, uint64_t{1} << 30));
  app.add_option("--cache-dir", cfg.cache_dir,
                 "prime cache directory (or $SIFTCOUNT_CACHE_DIR)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);  // help requested: exit 0
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  }

  try {
    cfg.xs = parse_x_list(x_arg);
    if (cfg.command == "sieve") return cmd_sieve(cfg);
    if (cfg.command == "count") return cmd_count(cfg);
    if (cfg.command == "bound") return cmd_bound(cfg);
    if (cfg.command == "fit") return cmd_fit(cfg);
    if (cfg.command == "sieve-check") return cmd_sieve_check(cfg);
    if (cfg.command == "lemma") return cmd_lemma(cfg);
    if (cfg.command == "report") return cmd_report(cfg);
    std::cerr << "unknown command " << cfg.command << "\n";
    return 2;
  } catch (const HypothesisViolation& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::out_of_range& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::domain_error& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    // computational failures (class violations, missing fit constants, ...)
    std::cerr << e.what() << "\n";
    return 1;
  }
}

}  // namespace siftcount
