#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <set>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "flexhull/correction.hpp"
#include "flexhull/extreme_actions.hpp"
#include "flexhull/numeric.hpp"
#include "flexhull/polytope.hpp"

namespace flexhull {

// The inner approximation in V-representation: aggregate vertex v^j per
// sampled sign vector j, stored column-wise, plus the optional trailing
// zero column (non-use of flexibility). Column c is the balanced pairwise
// sum of the per-device corrected actions for sign_vectors[c]; when
// per-device matrices are retained, summing their columns with the same
// pairwise reduction reproduces V bit for bit.
struct VertexMatrix {
  Eigen::MatrixXd columns;               // d x (g or g+1)
  std::vector<SignVector> sign_vectors;  // aligned with the first g columns
  bool has_zero_column = false;
  std::size_t n_devices = 0;

  // Retained per-device vertices (d x g each), empty unless requested.
  std::vector<Eigen::MatrixXd> per_device;
  // Identical-fleet fast path: one shared matrix standing for
  // shared_multiplicity devices. Unset (multiplicity 0) otherwise.
  Eigen::MatrixXd shared_per_device;
  std::size_t shared_multiplicity = 0;

  Eigen::Index g() const { return static_cast<Eigen::Index>(sign_vectors.size()); }
  Eigen::Index total_columns() const { return columns.cols(); }
  bool has_per_device() const {
    return !per_device.empty() || shared_multiplicity > 0;
  }
};

// Counters for the work actually performed by an aggregation call.
struct AggregateStats {
  long long vertex_evaluations = 0;
  long long corrections_applied = 0;
};

// Chooses the set J of sign vectors. Everything up to d = 8 is enumerated
// exhaustively (lexicographic, -1 before +1), as is any request with
// g >= 2^d. Otherwise exactly g distinct vectors are drawn uniformly
// without replacement, deterministically in the seed: dense requests
// (g within a factor two of 2^d, enumerable d) shuffle the full list and
// truncate, sparse requests draw-and-dedupe packed bit patterns.
inline std::vector<SignVector> sample_sign_vectors(int d, long long g,
                                                   std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("sample_sign_vectors: d must be >= 1");
  if (g < 1) throw std::invalid_argument("sample_sign_vectors: g must be >= 1");

  const bool enumerable = d <= 62;  // 2^d representable in long long
  const long long full = enumerable ? (1LL << d) : 0;

  auto from_index = [d](std::uint64_t idx) {
    SignVector j(static_cast<std::size_t>(d));
    for (int t = 0; t < d; ++t) {
      // Bit (d-1-t) drives entry t so that counting up through the indices
      // yields lexicographic order with -1 sorting before +1.
      j[static_cast<std::size_t>(t)] =
          ((idx >> (d - 1 - t)) & 1u) ? std::int8_t{1} : std::int8_t{-1};
    }
    return j;
  };

  if (d <= 8 || (enumerable && g >= full)) {
    std::vector<SignVector> all;
    all.reserve(static_cast<std::size_t>(full));
    for (long long i = 0; i < full; ++i) {
      all.push_back(from_index(static_cast<std::uint64_t>(i)));
    }
    return all;
  }

  Rng rng(seed);
  if (d <= 20 && 2 * g >= full) {
    // Dense draw: seeded Fisher-Yates over the full enumeration, truncated.
    // (std::shuffle is avoided: its pattern of engine calls is not pinned
    // by the standard, and seeded output must be reproducible.)
    std::vector<std::uint64_t> idx(static_cast<std::size_t>(full));
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    for (std::size_t i = idx.size() - 1; i > 0; --i) {
      std::swap(idx[i], idx[rng.index(i + 1)]);
    }
    std::vector<SignVector> out;
    out.reserve(static_cast<std::size_t>(g));
    for (long long i = 0; i < g; ++i) {
      out.push_back(from_index(idx[static_cast<std::size_t>(i)]));
    }
    return out;
  }

  // Sparse draw: sample packed d-bit patterns until g distinct ones
  // accumulate. Collisions are rare at this density, so expected work is
  // barely above g draws.
  const int words = (d + 63) / 64;
  std::set<std::vector<std::uint64_t>> seen;
  std::vector<SignVector> out;
  out.reserve(static_cast<std::size_t>(g));
  while (static_cast<long long>(out.size()) < g) {
    std::vector<std::uint64_t> pattern(static_cast<std::size_t>(words));
    for (int w = 0; w < words; ++w) {
      pattern[static_cast<std::size_t>(w)] = rng.raw();
    }
    const int tail_bits = d - 64 * (words - 1);
    if (tail_bits < 64) {
      pattern.back() &= (std::uint64_t{1} << tail_bits) - 1;
    }
    if (!seen.insert(pattern).second) continue;
    SignVector j(static_cast<std::size_t>(d));
    for (int t = 0; t < d; ++t) {
      const std::uint64_t word = pattern[static_cast<std::size_t>(t / 64)];
      j[static_cast<std::size_t>(t)] =
          ((word >> (t % 64)) & 1u) ? std::int8_t{1} : std::int8_t{-1};
    }
    out.push_back(std::move(j));
  }
  return out;
}

namespace detail {

inline void check_common_grid(const std::vector<StorageSpec>& specs) {
  if (specs.empty()) {
    throw std::invalid_argument("aggregate: need at least one device");
  }
  for (std::size_t i = 0; i < specs.size(); ++i) {
    specs[i].validate();
    if (specs[i].d != specs.front().d) {
      throw std::invalid_argument(
          "aggregate: device " + std::to_string(i) + " has d = " +
          std::to_string(specs[i].d) + ", device 0 has d = " +
          std::to_string(specs.front().d));
    }
    if (specs[i].dt != specs.front().dt) {
      throw std::invalid_argument(
          "aggregate: devices must share one time grid; device " +
          std::to_string(i) + " has dt = " + std::to_string(specs[i].dt));
    }
  }
}

inline void check_vertex_assumptions(const StorageSpec& spec, std::size_t i) {
  StorageSpec base = spec;
  base.s_f = base.s_min;
  if (!battery_satisfies_assumptions(base)) {
    throw std::invalid_argument(
        "aggregate: device " + std::to_string(i) +
        " violates the battery assumptions even with s_f relaxed to s_min "
        "(need x_max > 0 > x_min, s_min < s_max, alpha^d s0 >= s_min)");
  }
}

inline bool zero_profile_reaches_target(const StorageSpec& spec) {
  // With x = 0 the SoC decays to alpha^d s0; the zero profile is a valid
  // aggregate column only if every device still meets its final target.
  return std::pow(spec.alpha, spec.d) * spec.s0 >= spec.s_f;
}

}  // namespace detail

// Builds the vertex matrix for an explicit sign-vector list: for each j and
// each device, the greedy extreme action toward B(s0, s_min, p) followed by
// the lift to the device's true s_f; columns of V are the pairwise sums
// across devices. A zero column is appended when every device can afford to
// idle (alpha^d s0 >= s_f for all).
inline VertexMatrix aggregate(const std::vector<StorageSpec>& specs,
                              const std::vector<SignVector>& J,
                              bool retain_per_device = false,
                              AggregateStats* stats = nullptr) {
  detail::check_common_grid(specs);
  const int d = specs.front().d;
  const std::size_t n = specs.size();
  for (std::size_t i = 0; i < n; ++i) detail::check_vertex_assumptions(specs[i], i);
  if (J.empty()) throw std::invalid_argument("aggregate: empty sign-vector list");
  for (const SignVector& j : J) {
    if (static_cast<int>(j.size()) != d || !valid_sign_vector(j)) {
      throw std::invalid_argument(
          "aggregate: sign vectors must have d entries in {-1, +1}");
    }
  }

  const std::size_t g = J.size();
  bool zero_column = true;
  for (const StorageSpec& s : specs) {
    zero_column = zero_column && detail::zero_profile_reaches_target(s);
  }

  VertexMatrix vm;
  vm.sign_vectors = J;
  vm.has_zero_column = zero_column;
  vm.n_devices = n;
  vm.columns.resize(d, static_cast<Eigen::Index>(g) + (zero_column ? 1 : 0));
  if (retain_per_device) {
    vm.per_device.assign(n, Eigen::MatrixXd(d, static_cast<Eigen::Index>(g)));
  }

  std::atomic<long long> corrections{0};

  // Columns are independent; the per-device reduction inside a column is
  // sequential and balanced, so the result does not depend on how columns
  // are distributed over threads.
  auto run_range = [&](std::size_t lo, std::size_t hi) {
    Eigen::MatrixXd scratch(d, static_cast<Eigen::Index>(n));
    Eigen::VectorXd col(d);
    long long local_corrections = 0;
    for (std::size_t c = lo; c < hi; ++c) {
      for (std::size_t i = 0; i < n; ++i) {
        col.resize(d);
        detail::battery_vertex_into(specs[i], J[c], col);
        try {
          if (detail::correct_in_place(specs[i], col)) {
            ++local_corrections;
          }
        } catch (const std::runtime_error& e) {
          throw std::runtime_error("device " + std::to_string(i) + ": " +
                                   e.what());
        }
        scratch.col(static_cast<Eigen::Index>(i)) = col;
        if (retain_per_device) {
          vm.per_device[i].col(static_cast<Eigen::Index>(c)) = col;
        }
      }
      vm.columns.col(static_cast<Eigen::Index>(c)) = pairwise_sum(
          n, [&](std::size_t i) -> Eigen::VectorXd {
            return scratch.col(static_cast<Eigen::Index>(i));
          });
    }
    corrections.fetch_add(local_corrections, std::memory_order_relaxed);
  };

  const unsigned max_threads = thread_count();
  const bool serial = g * n < 4096 || max_threads <= 1;
  if (serial) {
    run_range(0, g);
  } else {
    const unsigned workers =
        std::min<unsigned>(max_threads, static_cast<unsigned>(g));
    std::vector<std::thread> pool;
    std::exception_ptr first_error;
    std::mutex error_mutex;
    const std::size_t chunk = (g + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
      const std::size_t lo = std::min<std::size_t>(w * chunk, g);
      const std::size_t hi = std::min<std::size_t>(lo + chunk, g);
      if (lo >= hi) break;
      pool.emplace_back([&, lo, hi] {
        try {
          run_range(lo, hi);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  if (zero_column) {
    vm.columns.col(static_cast<Eigen::Index>(g)).setZero();
  }
  if (stats) {
    stats->vertex_evaluations =
        static_cast<long long>(g) * static_cast<long long>(n);
    stats->corrections_applied = corrections.load();
  }
  return vm;
}

// Convenience overload: sample J from (d, g, seed) first.
inline VertexMatrix aggregate(const std::vector<StorageSpec>& specs,
                              long long g, std::uint64_t seed,
                              bool retain_per_device = false,
                              AggregateStats* stats = nullptr) {
  detail::check_common_grid(specs);
  return aggregate(specs, sample_sign_vectors(specs.front().d, g, seed),
                   retain_per_device, stats);
}

// Fast path for n copies of one device: the per-device matrix is computed
// once and every aggregate column is the n-fold replicated pairwise sum of
// the single-device column, which reproduces aggregate() on n copies bit
// for bit (equal-length reduction windows associate identically).
inline VertexMatrix aggregate_identical(const StorageSpec& spec, std::size_t n,
                                        long long g, std::uint64_t seed,
                                        bool retain_per_device = false,
                                        AggregateStats* stats = nullptr) {
  if (n < 1) {
    throw std::invalid_argument("aggregate_identical: n must be >= 1");
  }
  spec.validate();
  detail::check_vertex_assumptions(spec, 0);
  const std::vector<SignVector> J = sample_sign_vectors(spec.d, g, seed);
  const int d = spec.d;
  const std::size_t gs = J.size();
  const bool zero_column = detail::zero_profile_reaches_target(spec);

  VertexMatrix vm;
  vm.sign_vectors = J;
  vm.has_zero_column = zero_column;
  vm.n_devices = n;
  vm.columns.resize(d, static_cast<Eigen::Index>(gs) + (zero_column ? 1 : 0));

  Eigen::MatrixXd single(d, static_cast<Eigen::Index>(gs));
  long long corrections = 0;
  Eigen::VectorXd col(d);
  for (std::size_t c = 0; c < gs; ++c) {
    detail::battery_vertex_into(spec, J[c], col);
    if (detail::correct_in_place(spec, col)) ++corrections;
    single.col(static_cast<Eigen::Index>(c)) = col;
    vm.columns.col(static_cast<Eigen::Index>(c)) =
        replicated_pairwise_sum(n, col);
  }
  if (zero_column) {
    vm.columns.col(static_cast<Eigen::Index>(gs)).setZero();
  }
  if (retain_per_device) {
    vm.shared_per_device = std::move(single);
    vm.shared_multiplicity = n;
  }
  if (stats) {
    stats->vertex_evaluations = static_cast<long long>(gs);
    stats->corrections_applied = corrections;
  }
  return vm;
}

}  // namespace flexhull
