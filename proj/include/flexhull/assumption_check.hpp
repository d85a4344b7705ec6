#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

#include "flexhull/numeric.hpp"
#include "flexhull/polytope.hpp"
#include "flexhull/simplex.hpp"

namespace flexhull {

// Outcome of the Monte-Carlo projection falsifier. A run that finds nothing
// reports "not falsified" (samples_tested says how hard it looked); it never
// claims the property holds.
struct ProjectionFalsifierReport {
  int samples_tested = 0;
  bool falsified = false;
  Eigen::VectorXd counterexample;  // feasible point whose prefix escapes
  int prefix_length = 0;           // 1-based t for which the prefix fails
};

// Searches for a feasible x such that (x_1, ..., x_t, 0, ..., 0) leaves the
// set for some t. For generic H-polytopes this prefix-feasibility property
// (the tail of the structural assumptions) has no tractable decision
// procedure, so it is probed by sampling.
//
// Sampling walks the polytope with hit-and-run: from a feasible point, draw
// a direction, intersect the chord with every row in closed form, and jump
// to a uniform point on the chord. Every iterate is feasible by
// construction, so no rejection is needed. The walk starts at the origin
// when feasible (it usually is for the sets of interest) and otherwise at a
// phase-1 vertex.
inline ProjectionFalsifierReport falsify_projection_property(
    const HPolytope& p, int samples, std::uint64_t seed,
    double tol = kDefaultTol) {
  p.validate();
  if (samples < 1) {
    throw std::invalid_argument("falsify_projection_property: samples must be >= 1");
  }
  const Eigen::Index d = p.dim();

  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  if (!contains(p, x, tol)) {
    LinearProgram lp;
    lp.c = Eigen::VectorXd::Zero(d);
    lp.A = p.A;
    lp.b = p.b;
    lp.sense.assign(static_cast<std::size_t>(p.rows()), RowSense::LE);
    lp.lower = Eigen::VectorXd::Constant(d, -std::numeric_limits<double>::infinity());
    lp.upper = Eigen::VectorXd::Constant(d, std::numeric_limits<double>::infinity());
    const LpSolution sol = simplex_solve(lp);
    if (sol.status != SolveStatus::Optimal) {
      throw std::runtime_error(
          "falsify_projection_property: the polytope is empty");
    }
    x = sol.x;
  }

  Rng rng(seed);
  ProjectionFalsifierReport report;
  constexpr int kBurnInSteps = 4;

  for (int s = 0; s < samples; ++s) {
    for (int step = 0; step < kBurnInSteps; ++step) {
      Eigen::VectorXd u(d);
      double norm = 0.0;
      do {
        for (Eigen::Index i = 0; i < d; ++i) u(i) = rng.uniform(-1.0, 1.0);
        norm = u.norm();
      } while (norm < 1e-6);
      u /= norm;

      // Chord of the line x + lambda*u inside the polytope.
      double lo = -std::numeric_limits<double>::infinity();
      double hi = std::numeric_limits<double>::infinity();
      const Eigen::VectorXd au = p.A * u;
      const Eigen::VectorXd residual = p.b - p.A * x;
      for (Eigen::Index k = 0; k < p.rows(); ++k) {
        if (au(k) > 1e-12) {
          hi = std::min(hi, residual(k) / au(k));
        } else if (au(k) < -1e-12) {
          lo = std::max(lo, residual(k) / au(k));
        }
      }
      if (!std::isfinite(lo) || !std::isfinite(hi)) {
        throw std::invalid_argument(
            "falsify_projection_property: set is unbounded along a sampled "
            "direction; not a polytope");
      }
      if (hi > lo) x += rng.uniform(lo, hi) * u;
    }

    ++report.samples_tested;
    for (int t = 1; t < d; ++t) {
      if (!contains(p, project_prefix(x, t), tol)) {
        report.falsified = true;
        report.counterexample = x;
        report.prefix_length = t;
        return report;
      }
    }
  }
  return report;
}

}  // namespace flexhull
