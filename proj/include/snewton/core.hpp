#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace snewton {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

// Deterministic pseudo-random stream (splitmix64). All randomized pieces of
// the library draw from this generator so that runs are reproducible from a
// single integer seed, independent of platform and standard library.
//
// Stream definition, normative for fixture generators:
//   state <- state + 0x9E3779B97F4A7C15
//   z = state; z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
//   z = (z ^ (z >> 27)) * 0x94D049BB133111EB
//   output = z ^ (z >> 31)
// next_unit() = (output >> 11) * 2^-53, in [0, 1)
// next_symmetric() = 2 * next_unit() - 1, in [-1, 1)
// next_below(n) = rejection sampling: draw output until it is below
//   floor(2^64 / n) * n, then reduce modulo n.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double next_symmetric() { return 2.0 * next_unit() - 1.0; }

  // Uniform integer in [0, n), exact (no modulo bias).
  int next_below(int n) {
    if (n <= 0) throw std::invalid_argument("Rng::next_below: n must be positive");
    const std::uint64_t un = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = (UINT64_MAX / un) * un;
    std::uint64_t r;
    do {
      r = next_u64();
    } while (r >= limit);
    return static_cast<int>(r % un);
  }

  // Standard normal via Box-Muller; consumes two uniforms per pair.
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    const double u = 1.0 - next_unit();  // (0, 1], keeps log finite
    const double v = next_unit();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double theta = 2.0 * M_PI * v;
    spare_ = r * std::sin(theta);
    have_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t state_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

// tau distinct indices from {0,...,n-1}, uniform over all C(n,tau) subsets
// (first tau entries of a partial Fisher-Yates permutation), sorted ascending.
inline std::vector<int> sample_subset(Rng& rng, int n, int tau) {
  if (tau < 1 || tau > n) throw std::invalid_argument("sample_subset: tau out of range");
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  for (int j = 0; j < tau; ++j) {
    const int swap_with = j + rng.next_below(n - j);
    std::swap(idx[j], idx[swap_with]);
  }
  idx.resize(tau);
  std::sort(idx.begin(), idx.end());
  return idx;
}

inline bool all_finite(const Vector& x) { return x.allFinite(); }

inline long long binomial(int n, int k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  long long c = 1;
  for (int i = 1; i <= k; ++i) c = c * (n - k + i) / i;
  return c;
}

// Visits all k-subsets of {0..n-1} in lexicographic order.
template <typename Fn>
void for_each_subset(int n, int k, Fn&& fn) {
  std::vector<int> comb(k);
  std::iota(comb.begin(), comb.end(), 0);
  while (true) {
    fn(const_cast<const std::vector<int>&>(comb));
    int i = k - 1;
    while (i >= 0 && comb[i] == n - k + i) --i;
    if (i < 0) break;
    ++comb[i];
    for (int j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
  }
}

}  // namespace snewton
