#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "flexhull/aggregation.hpp"
#include "flexhull/numeric.hpp"
#include "flexhull/simplex.hpp"

namespace flexhull {

// Convex-combination weights over a vertex matrix: alpha aligns with the
// sign-vector columns, zero_weight carries any mass on the zero column.
struct HullWeights {
  Eigen::VectorXd alpha;
  double zero_weight = 0.0;
};

struct DisaggregationResult {
  Eigen::MatrixXd schedules;  // d x n, column i = device i's profile (kW)
  Eigen::VectorXd aggregate;  // pairwise sum of the schedule columns
};

namespace detail {

inline void check_weights(const HullWeights& w, const VertexMatrix& vm,
                          double tol = kDedupeTol) {
  if (w.alpha.size() != vm.g()) {
    throw std::invalid_argument(
        "weights cover " + std::to_string(w.alpha.size()) +
        " columns, vertex matrix has g = " + std::to_string(vm.g()));
  }
  double sum = w.zero_weight;
  for (Eigen::Index k = 0; k < w.alpha.size(); ++k) {
    if (w.alpha(k) < -tol) {
      throw std::invalid_argument("weights must be nonnegative; entry " +
                                  std::to_string(k) + " is " +
                                  std::to_string(w.alpha(k)));
    }
    sum += w.alpha(k);
  }
  if (w.zero_weight < -tol) {
    throw std::invalid_argument("zero-column weight must be nonnegative");
  }
  if (w.zero_weight > tol && !vm.has_zero_column) {
    throw std::invalid_argument(
        "weights assign mass to a zero column the vertex matrix lacks");
  }
  if (std::abs(sum - 1.0) > tol) {
    throw std::invalid_argument("weights must sum to 1, got " +
                                std::to_string(sum));
  }
}

// sum_j alpha_j * M.col(j), reduced pairwise to keep the additivity between
// per-device schedules and the aggregate profile tight at fleet scale.
inline Eigen::VectorXd weighted_columns(const Eigen::MatrixXd& M,
                                        const Eigen::VectorXd& alpha) {
  return pairwise_sum(
      static_cast<std::size_t>(alpha.size()),
      [&](std::size_t k) -> Eigen::VectorXd {
        return alpha(static_cast<Eigen::Index>(k)) *
               M.col(static_cast<Eigen::Index>(k));
      });
}

}  // namespace detail

// Algorithm path from aggregate weights back to per-device schedules:
// device i receives sum_j alpha_j y~^j_i (the zero column contributes the
// zero profile everywhere). Each schedule is a convex combination of points
// of the device's feasible set, hence feasible, with no per-device solve.
inline DisaggregationResult disaggregate(const HullWeights& weights,
                                         const VertexMatrix& vm) {
  detail::check_weights(weights, vm);
  if (!vm.has_per_device()) {
    throw std::invalid_argument(
        "disaggregate: vertex matrix was built without per-device retention");
  }
  const Eigen::Index d = vm.columns.rows();
  const std::size_t n = vm.n_devices;

  DisaggregationResult out;
  out.schedules.resize(d, static_cast<Eigen::Index>(n));
  if (vm.shared_multiplicity > 0) {
    // Identical devices share one vertex matrix, so the combination is
    // computed once and replicated.
    const Eigen::VectorXd profile =
        detail::weighted_columns(vm.shared_per_device, weights.alpha);
    for (std::size_t i = 0; i < n; ++i) {
      out.schedules.col(static_cast<Eigen::Index>(i)) = profile;
    }
    out.aggregate = replicated_pairwise_sum(n, profile);
  } else {
    for (std::size_t i = 0; i < n; ++i) {
      out.schedules.col(static_cast<Eigen::Index>(i)) =
          detail::weighted_columns(vm.per_device[i], weights.alpha);
    }
    out.aggregate = pairwise_sum(n, [&](std::size_t i) -> Eigen::VectorXd {
      return out.schedules.col(static_cast<Eigen::Index>(i));
    });
  }
  return out;
}

// Recovers some convex weights reproducing x over the matrix columns (zero
// column included) by a pure feasibility solve; the returned weights are a
// basic solution, so at most d+1 of them are nonzero. Points outside the
// hull are reported, not approximated.
inline HullWeights weights_for_point(const Eigen::VectorXd& x,
                                     const VertexMatrix& vm) {
  const Eigen::Index d = vm.columns.rows();
  if (x.size() != d) {
    throw std::invalid_argument("weights_for_point: point has dimension " +
                                std::to_string(x.size()) + ", expected " +
                                std::to_string(d));
  }
  const Eigen::Index k = vm.total_columns();
  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(k);
  lp.A.resize(d + 1, k);
  lp.A.topRows(d) = vm.columns;
  lp.A.row(d).setOnes();
  lp.b.resize(d + 1);
  lp.b.head(d) = x;
  lp.b(d) = 1.0;
  lp.sense.assign(static_cast<std::size_t>(d + 1), RowSense::EQ);
  lp.lower = Eigen::VectorXd::Zero(k);
  lp.upper = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::infinity());

  const LpSolution sol = simplex_solve(lp);
  if (sol.status != SolveStatus::Optimal) {
    throw std::runtime_error(
        "outside-hull: the point cannot be written as a convex combination "
        "of the vertex-matrix columns");
  }
  HullWeights w;
  w.alpha = sol.x.head(vm.g());
  w.zero_weight = vm.has_zero_column ? sol.x(vm.g()) : 0.0;
  return w;
}

}  // namespace flexhull
