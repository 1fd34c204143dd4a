#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace regimescope {

// Configuration problems (bad keys, invalid parameter ranges). CLI exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input data. CLI exit code 3.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  Vec2 operator*(double s) const { return {x * s, y * s}; }
  Vec2& operator+=(Vec2 o) {
    x += o.x;
    y += o.y;
    return *this;
  }
  Vec2& operator-=(Vec2 o) {
    x -= o.x;
    y -= o.y;
    return *this;
  }
  double norm2() const { return x * x + y * y; }
  double norm() const;
};

inline Vec2 operator-(Vec2 v) { return {-v.x, -v.y}; }

std::uint64_t splitmix64(std::uint64_t x);

// Derives an independent stream seed from (seed, stream, index). Used to give
// every particle / permutation replicate / run its own generator so results do
// not depend on iteration order.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index = 0);

// Deterministic generator with platform-independent uniform sampling
// (std::uniform_real_distribution is implementation-defined, so doubles are
// built from raw 53-bit draws instead).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix64(seed ^ 0x6a09e667f3bcc909ULL)) {}

  std::uint64_t next_u64();
  // Uniform on [0, 1).
  double uniform();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  // Uniform integer on [0, n), unbiased.
  std::uint64_t uniform_int(std::uint64_t n);

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::uint64_t state_;
};

// Runs fn(i) for i in [0, n). With threads <= 1 this is a plain loop; callers
// must write results to disjoint slots indexed by i so the schedule never
// affects the output.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

// Thread-count resolution: REGIMESCOPE_THREADS env var overrides the requested
// value; 0 means hardware concurrency.
unsigned resolve_threads(unsigned requested);

// double -> shortest decimal string that parses back to the same bits.
std::string format_double(double v);

}  // namespace regimescope
