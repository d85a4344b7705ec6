#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "flexhull/numeric.hpp"
#include "flexhull/polytope.hpp"

namespace flexhull {

// One entry per period, each exactly -1 or +1: the direction in which that
// period's power is pushed.
using SignVector = std::vector<std::int8_t>;

inline bool valid_sign_vector(const SignVector& j) {
  if (j.empty()) return false;
  for (std::int8_t e : j) {
    if (e != -1 && e != 1) return false;
  }
  return true;
}

struct ExtremeAction {
  Eigen::VectorXd y;      // kW per period
  SignVector j;           // the sign vector that produced y
  std::size_t device_id = 0;
};

namespace detail {

// Greedy per-period extremization with a running SoC. For j_t = +1 the
// period charges at x_max unless that would push the SoC above s_max, in
// which case the rate is cut to land exactly on s_max; symmetrically for
// j_t = -1 against s_min.
inline void battery_vertex_into(const StorageSpec& spec, const SignVector& j,
                                Eigen::VectorXd& out) {
  double soc = spec.s0;
  for (int t = 0; t < spec.d; ++t) {
    const double carried = spec.alpha * soc;
    double y;
    if (j[static_cast<std::size_t>(t)] > 0) {
      y = spec.x_max;
      if (carried + y * spec.dt > spec.s_max) {
        y = (spec.s_max - carried) / spec.dt;
      }
    } else {
      y = spec.x_min;
      if (carried + y * spec.dt < spec.s_min) {
        y = (spec.s_min - carried) / spec.dt;
      }
    }
    soc = carried + y * spec.dt;
    out(t) = y;
  }
}

}  // namespace detail

// Greedy per-coordinate extremization over an arbitrary H-polytope: period
// t takes the largest (j_t = +1) or smallest (j_t = -1) value that keeps
// (y_1, ..., y_t, 0, ..., 0) inside p. The one-dimensional subproblem is
// solved in closed form by scanning rows: with the prefix fixed, each row k
// with A(k,t) != 0 bounds y_t by residual / coefficient; rows with
// A(k,t) = 0 constrain only the prefix and are skipped.
//
// The caller asserts that p has interior slack in every period and admits
// the zero profile (the battery family checked by
// battery_satisfies_assumptions always does). A violated assumption or an
// empty polytope surfaces as an empty feasible interval here.
inline ExtremeAction extreme_action_generic(const HPolytope& p,
                                            const SignVector& j,
                                            std::size_t device_id = 0) {
  p.validate();
  const Eigen::Index d = p.dim();
  if (static_cast<Eigen::Index>(j.size()) != d || !valid_sign_vector(j)) {
    throw std::invalid_argument(
        "extreme_action_generic: sign vector must have " + std::to_string(d) +
        " entries in {-1, +1}");
  }

  constexpr double inf = std::numeric_limits<double>::infinity();
  Eigen::VectorXd y = Eigen::VectorXd::Zero(d);
  // residual(k) = b_k - sum_{tau < t} A(k,tau) y_tau, updated incrementally.
  Eigen::VectorXd residual = p.b;

  for (Eigen::Index t = 0; t < d; ++t) {
    double upper = inf;
    double lower = -inf;
    for (Eigen::Index k = 0; k < p.rows(); ++k) {
      const double a = p.A(k, t);
      if (a > 0.0) {
        const double bound = residual(k) / a;
        if (bound < upper) upper = bound;
      } else if (a < 0.0) {
        const double bound = residual(k) / a;
        if (bound > lower) lower = bound;
      }
    }
    if (!std::isfinite(upper) || !std::isfinite(lower)) {
      throw std::runtime_error(
          "extreme-action-unbounded: period " + std::to_string(t + 1) +
          " has no finite bound; the input set is not a polytope");
    }
    const double slack = upper - lower;
    if (slack < -scaled_tol(kDefaultTol, std::max(std::abs(upper), std::abs(lower)))) {
      throw std::runtime_error(
          "extreme-action-infeasible: empty feasible interval at period " +
          std::to_string(t + 1) + " (lower=" + std::to_string(lower) +
          ", upper=" + std::to_string(upper) +
          "); assumptions violated or polytope empty");
    }
    if (slack < 0.0) {
      // Interval collapsed to a point up to rounding; take its midpoint so
      // neither bounding row is violated beyond half the rounding error.
      y(t) = 0.5 * (upper + lower);
    } else {
      y(t) = (j[static_cast<std::size_t>(t)] > 0) ? upper : lower;
    }
    residual -= p.A.col(t) * y(t);
  }
  return ExtremeAction{std::move(y), j, device_id};
}

// Closed-form extreme action for a battery, equivalent to
// extreme_action_generic on battery_polytope(spec with s_f = s_min) but in
// O(d) time: under the battery assumptions the binding row at period t is
// always the power bound or the period-t SoC bound in the pushed direction,
// so a running SoC suffices.
inline ExtremeAction battery_vertex(const StorageSpec& spec,
                                    const SignVector& j,
                                    std::size_t device_id = 0) {
  StorageSpec base = spec;
  base.s_f = base.s_min;  // the greedy scan targets the s_f = s_min set
  if (!battery_satisfies_assumptions(base)) {
    throw std::invalid_argument(
        "battery_vertex: spec must satisfy the battery assumptions with s_f "
        "treated as s_min (x_max > 0, x_min < 0, s_min < s_max, "
        "alpha^d s0 >= s_min)");
  }
  if (static_cast<int>(j.size()) != spec.d || !valid_sign_vector(j)) {
    throw std::invalid_argument(
        "battery_vertex: sign vector must have " + std::to_string(spec.d) +
        " entries in {-1, +1}");
  }
  Eigen::VectorXd y(spec.d);
  detail::battery_vertex_into(base, j, y);
  return ExtremeAction{std::move(y), j, device_id};
}

}  // namespace flexhull
