#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "flexhull/extreme_actions.hpp"
#include "flexhull/numeric.hpp"
#include "flexhull/polytope.hpp"

namespace flexhull {

struct CorrectedAction {
  Eigen::VectorXd y_tilde;          // kW per period, final SoC >= s_f
  ExtremeAction source;             // the uncorrected action
  bool corrected = false;           // y_tilde differs from source.y
  std::optional<int> correction_index;  // 1-based deepest period modified
};

namespace detail {

// Correction core, in place. Returns true when the lifting path ran (the
// final-SoC guard fired).
//
// If the profile already ends at or above s_f nothing happens. Otherwise a
// suffix of the profile is re-solved: for a growing block of periods ending
// just before the final one, every rate in the block is raised to the
// largest value the SoC ceiling admits (x_max, cut to land exactly on s_max,
// as in the greedy extremization), and the final period is then set to land
// exactly on s_f. The shallowest block whose final-period rate falls inside
// [x_min, x_max] wins. Raising a rate all the way to x_max regardless of the
// ceiling would inflate the intermediate SoC past s_max, so the cut is what
// keeps the lifted profile a member of the target set.
//
// Deepening the block by one period raises the SoC entering the final
// period by at most (x_max - x_min) * dt (the gain is capped at its first
// period and only shrinks under alpha and the ceiling), so the required
// final rate never jumps from above x_max to below x_min; the feasible
// window cannot be skipped. The deepest block realizes the maximum
// attainable final SoC, hence exhausting the walk proves the target set
// empty.
inline bool correct_in_place(const StorageSpec& spec, Eigen::VectorXd& y) {
  const int d = spec.d;

  // SoC after each period of the incoming profile. The block rewrites below
  // never touch periods before their start, so these prefix values stay
  // valid throughout the walk.
  Eigen::VectorXd soc(d);
  double s = spec.s0;
  for (int t = 0; t < d; ++t) {
    s = spec.alpha * s + y(t) * spec.dt;
    soc(t) = s;
  }

  const double target_tol = scaled_tol(kDefaultTol, spec.s_f);
  if (soc(d - 1) >= spec.s_f - target_tol) return false;

  // Accept a final-period rate slightly outside the bounds and clamp it
  // back in; rejecting a rate equal to a bound up to rounding would
  // spuriously deepen the block or exhaust the walk.
  const double rate_tol = scaled_tol(
      kDefaultTol, std::max(std::abs(spec.x_min), std::abs(spec.x_max)));

  double best_final = soc(d - 1);
  for (int first = d - 1; first >= 0; --first) {
    s = first == 0 ? spec.s0 : soc(first - 1);
    for (int t = first; t <= d - 2; ++t) {
      const double carried = spec.alpha * s;
      double rate = spec.x_max;
      if (carried + rate * spec.dt > spec.s_max) {
        rate = (spec.s_max - carried) / spec.dt;
      }
      y(t) = rate;
      s = carried + rate * spec.dt;
    }
    const double carried = spec.alpha * s;
    const double cand = (spec.s_f - carried) / spec.dt;
    if (cand >= spec.x_min - rate_tol && cand <= spec.x_max + rate_tol) {
      y(d - 1) = std::min(std::max(cand, spec.x_min), spec.x_max);
      return true;
    }
    best_final =
        carried +
        std::min(spec.x_max, (spec.s_max - carried) / spec.dt) * spec.dt;
  }

  throw std::runtime_error(
      "infeasible-target: cannot reach final SoC " + std::to_string(spec.s_f) +
      " (best attainable ends at " + std::to_string(best_final) +
      "); the target set is empty");
}

}  // namespace detail

// Lifts an extreme action of the s_f = s_min set into the set with minimum
// final energy s_f. See detail::correct_in_place for the walk; this wrapper
// adds the bookkeeping fields (what changed, and how deep the change went).
inline CorrectedAction correct(const StorageSpec& spec, ExtremeAction action) {
  spec.validate();
  if (action.y.size() != spec.d) {
    throw std::invalid_argument(
        "correct: action has " + std::to_string(action.y.size()) +
        " periods, spec has " + std::to_string(spec.d));
  }
  CorrectedAction out;
  out.y_tilde = action.y;
  detail::correct_in_place(spec, out.y_tilde);
  for (int t = 0; t < spec.d; ++t) {
    if (out.y_tilde(t) != action.y(t)) {
      out.corrected = true;
      out.correction_index = t + 1;
      break;
    }
  }
  out.source = std::move(action);
  return out;
}

}  // namespace flexhull
