#pragma once

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace sgi {

using BitVec = std::vector<std::uint8_t>;

inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Errors

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParseError : Error {
  int line = 0;
  struct Raw {};
  ParseError(const std::string& msg, int line_no)
      : Error("line " + std::to_string(line_no) + ": " + msg), line(line_no) {}
  ParseError(Raw, const std::string& full_msg, int line_no)
      : Error(full_msg), line(line_no) {}
};

struct StructuralError : Error { using Error::Error; };
struct AlignmentError : Error { using Error::Error; };
struct ContractError : Error { using Error::Error; };
struct GenerationError : Error { using Error::Error; };
struct DataError : Error { using Error::Error; };
struct SelectionError : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };

// ---------------------------------------------------------------------------
// Deterministic RNG. splitmix64 core so that streams are identical across
// platforms and standard-library implementations.

inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
  std::uint64_t s = a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
  return splitmix64(s);
}

inline std::uint64_t hash_str(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {
    // Warm up so that small seeds diverge immediately.
    splitmix64(state_);
  }

  std::uint64_t next_u64() { return splitmix64(state_); }

  // Uniform in [0, 1).
  double uniform01() { return double(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n == 0) throw ContractError("uniform_int: n must be > 0");
    std::uint64_t threshold = (0ULL - n) % n;  // rejection for unbiasedness
    for (;;) {
      std::uint64_t r = next_u64();
      if (r >= threshold) return r % n;
    }
  }

  // Gaussian via Box-Muller. sigma == 0 draws nothing and returns mu exactly.
  double normal(double mu, double sigma) {
    if (sigma == 0.0) return mu;
    if (have_spare_) {
      have_spare_ = false;
      return mu + sigma * spare_;
    }
    double u1 = 0.0;
    do { u1 = uniform01(); } while (u1 <= 0.0);
    double u2 = uniform01();
    double radius = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * 3.14159265358979323846 * u2;
    spare_ = radius * std::sin(theta);
    have_spare_ = true;
    return mu + sigma * radius * std::cos(theta);
  }

 private:
  std::uint64_t state_;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

// ---------------------------------------------------------------------------
// Softmax / sampling over possibly -inf-masked logits.

// Probabilities for finite entries; -inf entries get probability 0.
// Returns false when every entry is -inf.
inline bool masked_softmax(const std::vector<double>& logits,
                           std::vector<double>& probs) {
  probs.assign(logits.size(), 0.0);
  double mx = kNegInf;
  for (double l : logits) mx = std::max(mx, l);
  if (mx == kNegInf) return false;
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (logits[i] == kNegInf) continue;
    probs[i] = std::exp(logits[i] - mx);
    z += probs[i];
  }
  for (double& p : probs) p /= z;
  return true;
}

inline int sample_categorical(const std::vector<double>& probs, Rng& rng) {
  double u = rng.uniform01();
  double acc = 0.0;
  int last = -1;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last = int(i);
    if (u < acc) return last;
  }
  if (last < 0) throw ContractError("sample_categorical: empty distribution");
  return last;  // guard against rounding at acc ~ 1.0
}

inline int argmax_logit(const std::vector<double>& logits) {
  int best = -1;
  double bv = kNegInf;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (logits[i] != kNegInf && (best < 0 || logits[i] > bv)) {
      best = int(i);
      bv = logits[i];
    }
  }
  return best;  // -1 when all masked
}

// ---------------------------------------------------------------------------
// Shortest decimal representation that parses back to the same double.

inline std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline double parse_real(const std::string& tok, int line_no) {
  char* end = nullptr;
  double v = std::strtod(tok.c_str(), &end);
  if (end == tok.c_str() || *end != '\0')
    throw ParseError("bad real '" + tok + "'", line_no);
  return v;
}

inline long parse_int(const std::string& tok, int line_no) {
  char* end = nullptr;
  long v = std::strtol(tok.c_str(), &end, 10);
  if (end == tok.c_str() || *end != '\0')
    throw ParseError("bad integer '" + tok + "'", line_no);
  return v;
}

}  // namespace sgi
