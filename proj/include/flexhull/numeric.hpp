#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <unordered_map>
#include <utility>

namespace flexhull {

// Default tolerance for membership and equality checks. Checks are scaled:
// a quantity q is compared against tol * max(1, |reference|) so that both
// tiny and large magnitudes are treated sensibly.
inline constexpr double kDefaultTol = 1e-9;

// Looser tolerance for geometric identification: deduplicating vertex
// candidates, convex-hull membership, and weight sanity checks. These sit
// downstream of LP solves, so they must absorb more accumulated error than a
// single arithmetic comparison.
inline constexpr double kDedupeTol = 1e-7;

inline double scaled_tol(double tol, double reference) {
  return tol * std::max(1.0, std::abs(reference));
}

// Deterministic RNG used everywhere seeds appear in the public API.
//
// std::mt19937_64 has a fixed, portable output sequence, but the standard
// distributions (uniform_real_distribution etc.) do not; their results may
// differ across standard libraries. Since reproducibility of seeded runs is
// part of the contract, the few draw primitives needed are implemented here
// directly on top of the raw engine output.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo, hi).
  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform();
  }

  // Uniform integer in [0, n). Masked rejection sampling keeps the draw
  // exactly uniform and independent of the modulus.
  std::uint64_t index(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::index: n must be positive");
    std::uint64_t mask = n - 1;
    mask |= mask >> 1;
    mask |= mask >> 2;
    mask |= mask >> 4;
    mask |= mask >> 8;
    mask |= mask >> 16;
    mask |= mask >> 32;
    for (;;) {
      const std::uint64_t r = eng_() & mask;
      if (r < n) return r;
    }
  }

  std::uint64_t raw() { return eng_(); }

 private:
  std::mt19937_64 eng_;
};

// Sums count vectors provided by col(i) with a balanced binary tree.
// The split depends only on the window length, so windows of equal length
// reduce with identical association; replicated_pairwise_sum relies on this
// to reproduce the generic sum bit for bit on identical inputs.
template <class ColFn>
Eigen::VectorXd pairwise_sum(std::size_t count, ColFn&& col) {
  if (count == 0) {
    throw std::invalid_argument("pairwise_sum: empty input");
  }
  struct Impl {
    ColFn& fn;
    Eigen::VectorXd run(std::size_t begin, std::size_t len) {
      if (len == 1) return fn(begin);
      const std::size_t mid = len / 2;
      return run(begin, mid) + run(begin + mid, len - mid);
    }
  } impl{col};
  return impl.run(0, count);
}

// Sum of n copies of v with exactly the association pairwise_sum would use
// for n identical columns. Subtree values depend only on the subtree length,
// so memoizing on length is enough; cost is O(log n) vector additions.
inline Eigen::VectorXd replicated_pairwise_sum(std::size_t n,
                                               const Eigen::VectorXd& v) {
  if (n == 0) {
    throw std::invalid_argument("replicated_pairwise_sum: n must be positive");
  }
  std::unordered_map<std::size_t, Eigen::VectorXd> memo;
  struct Impl {
    const Eigen::VectorXd& v;
    std::unordered_map<std::size_t, Eigen::VectorXd>& memo;
    const Eigen::VectorXd& run(std::size_t len) {
      auto it = memo.find(len);
      if (it != memo.end()) return it->second;
      Eigen::VectorXd value;
      if (len == 1) {
        value = v;
      } else {
        const std::size_t mid = len / 2;
        value = run(mid) + run(len - mid);
      }
      return memo.emplace(len, std::move(value)).first->second;
    }
  } impl{v, memo};
  return impl.run(n);
}

// Worker count for parallel sections: hardware concurrency, optionally
// capped by the FLEXHULL_THREADS environment variable.
inline unsigned thread_count() {
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  if (const char* env = std::getenv("FLEXHULL_THREADS")) {
    try {
      const long parsed = std::stol(env);
      if (parsed >= 1 && static_cast<unsigned>(parsed) < hw) {
        hw = static_cast<unsigned>(parsed);
      }
      if (parsed < 1) hw = 1;
    } catch (const std::exception&) {
      // Unparseable values fall back to hardware concurrency.
    }
  }
  return hw;
}

}  // namespace flexhull
