#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "flexhull/aggregation.hpp"
#include "flexhull/correction.hpp"
#include "flexhull/disaggregation.hpp"
#include "flexhull/numeric.hpp"
#include "flexhull/polytope.hpp"
#include "flexhull/simplex.hpp"

namespace flexhull {

enum class ObjectiveKind { Cost, Peak };

inline const char* objective_name(ObjectiveKind k) {
  return k == ObjectiveKind::Cost ? "cost" : "peak";
}

// Objective context shared by the hull, exact, and no-flexibility paths.
// Cost prices the summed grid exchange, peak measures its largest absolute
// power: cᵀ(x + Σq)·dt versus ||x + Σq||_inf, with x the aggregate profile
// and Σq the summed household demand.
struct ObjectiveSpec {
  ObjectiveKind kind = ObjectiveKind::Cost;
  Eigen::VectorXd prices;      // currency/kWh, used by Cost
  Eigen::VectorXd demand_sum;  // kW
  double dt = 1.0;             // h

  void validate(Eigen::Index d) const {
    if (demand_sum.size() != d) {
      throw std::invalid_argument("ObjectiveSpec: demand_sum must have " +
                                  std::to_string(d) + " entries, got " +
                                  std::to_string(demand_sum.size()));
    }
    if (kind == ObjectiveKind::Cost && prices.size() != d) {
      throw std::invalid_argument("ObjectiveSpec: prices must have " +
                                  std::to_string(d) + " entries, got " +
                                  std::to_string(prices.size()));
    }
    if (!(dt > 0.0) || !demand_sum.allFinite() ||
        (kind == ObjectiveKind::Cost && !prices.allFinite())) {
      throw std::invalid_argument("ObjectiveSpec: entries must be finite, dt positive");
    }
  }
};

struct HullSolution {
  double value = 0.0;
  HullWeights weights;
  Eigen::VectorXd argmin_profile;  // = V * weights
};

// Linear objective over a V-represented hull: the minimum sits on a column,
// so a single scan replaces the LP. Ties go to the lowest column index.
inline HullSolution min_cost_over_hull(const VertexMatrix& vm,
                                       const ObjectiveSpec& obj) {
  if (obj.kind != ObjectiveKind::Cost) {
    throw std::invalid_argument("min_cost_over_hull: objective kind must be Cost");
  }
  obj.validate(vm.columns.rows());
  const Eigen::Index k = vm.total_columns();
  Eigen::Index best = 0;
  double best_score = obj.prices.dot(vm.columns.col(0));
  for (Eigen::Index j = 1; j < k; ++j) {
    const double score = obj.prices.dot(vm.columns.col(j));
    if (score < best_score) {
      best_score = score;
      best = j;
    }
  }
  HullSolution sol;
  sol.weights.alpha = Eigen::VectorXd::Zero(vm.g());
  if (vm.has_zero_column && best == vm.g()) {
    sol.weights.zero_weight = 1.0;
  } else {
    sol.weights.alpha(best) = 1.0;
  }
  sol.argmin_profile = vm.columns.col(best);
  sol.value = obj.prices.dot(sol.argmin_profile + obj.demand_sum) * obj.dt;
  return sol;
}

// Peak shaving over the hull:
//   min t  s.t.  -t·1 <= V·alpha + q <= t·1,  sum(alpha) = 1,  alpha >= 0.
inline HullSolution min_peak_over_hull(const VertexMatrix& vm,
                                       const ObjectiveSpec& obj) {
  if (obj.kind != ObjectiveKind::Peak) {
    throw std::invalid_argument("min_peak_over_hull: objective kind must be Peak");
  }
  const Eigen::Index d = vm.columns.rows();
  obj.validate(d);
  const Eigen::Index k = vm.total_columns();

  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(k + 1);
  lp.c(k) = 1.0;
  lp.A = Eigen::MatrixXd::Zero(2 * d + 1, k + 1);
  lp.b.resize(2 * d + 1);
  lp.A.block(0, 0, d, k) = vm.columns;
  lp.A.block(d, 0, d, k) = -vm.columns;
  lp.A.col(k).head(2 * d).setConstant(-1.0);
  lp.b.head(d) = -obj.demand_sum;
  lp.b.segment(d, d) = obj.demand_sum;
  lp.A.row(2 * d).head(k).setOnes();
  lp.b(2 * d) = 1.0;
  lp.sense.assign(static_cast<std::size_t>(2 * d), RowSense::LE);
  lp.sense.push_back(RowSense::EQ);
  lp.lower = Eigen::VectorXd::Zero(k + 1);
  lp.upper = Eigen::VectorXd::Constant(k + 1, std::numeric_limits<double>::infinity());

  const LpSolution sol = simplex_solve(lp);
  if (sol.status != SolveStatus::Optimal) {
    throw std::runtime_error(
        std::string("min_peak_over_hull: solver returned ") +
        (sol.status == SolveStatus::Infeasible ? "Infeasible" : "Unbounded") +
        " on a problem that is feasible and bounded by construction");
  }
  HullSolution out;
  out.value = sol.x(k);
  out.weights.alpha = sol.x.head(vm.g());
  out.weights.zero_weight = vm.has_zero_column ? sol.x(vm.g()) : 0.0;
  out.argmin_profile = vm.columns * sol.x.head(k);
  return out;
}

// Centralized reference: optimize over the product of the device sets
// directly, stacking every device's H-representation into one LP on the
// per-device profiles x_i. Power bounds become variable bounds; the 2d SoC
// band rows per device are kept as constraint rows.
inline double exact_optimum(const std::vector<StorageSpec>& specs,
                            const ObjectiveSpec& obj) {
  detail::check_common_grid(specs);
  const int d = specs.front().d;
  const std::size_t n = specs.size();
  obj.validate(d);

  const bool peak = obj.kind == ObjectiveKind::Peak;
  const Eigen::Index nv = static_cast<Eigen::Index>(n) * d + (peak ? 1 : 0);
  const Eigen::Index band_rows = 2 * static_cast<Eigen::Index>(n) * d;
  const Eigen::Index nr = band_rows + (peak ? 2 * d : 0);

  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(nv);
  lp.A = Eigen::MatrixXd::Zero(nr, nv);
  lp.b.resize(nr);
  lp.sense.assign(static_cast<std::size_t>(nr), RowSense::LE);
  lp.lower.resize(nv);
  lp.upper.resize(nv);

  for (std::size_t i = 0; i < n; ++i) {
    const StorageSpec& s = specs[i];
    const Eigen::Index col0 = static_cast<Eigen::Index>(i) * d;
    const Eigen::Index row0 = 2 * static_cast<Eigen::Index>(i) * d;
    lp.lower.segment(col0, d).setConstant(s.x_min);
    lp.upper.segment(col0, d).setConstant(s.x_max);
    double alpha_t = 1.0;
    for (int t = 0; t < d; ++t) {
      alpha_t *= s.alpha;
      double coeff = 1.0;
      for (int tau = t; tau >= 0; --tau) {
        lp.A(row0 + t, col0 + tau) = coeff;
        lp.A(row0 + d + t, col0 + tau) = -coeff;
        coeff *= s.alpha;
      }
      lp.b(row0 + t) = (s.s_max - alpha_t * s.s0) / s.dt;
      const double floor_t = (t == d - 1) ? s.s_f : s.s_min;
      lp.b(row0 + d + t) = (alpha_t * s.s0 - floor_t) / s.dt;
    }
    if (obj.kind == ObjectiveKind::Cost) {
      lp.c.segment(col0, d) = obj.prices * obj.dt;
    }
  }

  if (peak) {
    const Eigen::Index tvar = nv - 1;
    lp.c(tvar) = 1.0;
    lp.lower(tvar) = 0.0;
    lp.upper(tvar) = std::numeric_limits<double>::infinity();
    for (int t = 0; t < d; ++t) {
      for (std::size_t i = 0; i < n; ++i) {
        lp.A(band_rows + t, static_cast<Eigen::Index>(i) * d + t) = 1.0;
        lp.A(band_rows + d + t, static_cast<Eigen::Index>(i) * d + t) = -1.0;
      }
      lp.A(band_rows + t, tvar) = -1.0;
      lp.A(band_rows + d + t, tvar) = -1.0;
      lp.b(band_rows + t) = -obj.demand_sum(t);
      lp.b(band_rows + d + t) = obj.demand_sum(t);
    }
  }

  const LpSolution sol = simplex_solve(lp);
  if (sol.status == SolveStatus::Infeasible) {
    throw std::runtime_error(
        "exact-infeasible: at least one device set is empty");
  }
  if (sol.status == SolveStatus::Unbounded) {
    throw std::runtime_error(
        "exact_optimum: unbounded objective over bounded device sets "
        "(numerical failure)");
  }
  if (obj.kind == ObjectiveKind::Cost) {
    return sol.objective + obj.prices.dot(obj.demand_sum) * obj.dt;
  }
  return sol.objective;
}

// Baseline with all flexibility switched off (x = 0).
inline double no_flex_value(const ObjectiveSpec& obj) {
  obj.validate(obj.demand_sum.size());
  if (obj.kind == ObjectiveKind::Cost) {
    return obj.prices.dot(obj.demand_sum) * obj.dt;
  }
  return obj.demand_sum.size() > 0 ? obj.demand_sum.cwiseAbs().maxCoeff() : 0.0;
}

// Unused Potential Ratio in percent: 0 means optimizing over the
// approximation matched the exact optimum, 100 means it was no better than
// not using flexibility at all.
inline double upr(double z_approx, double z_exact, double z_noflex,
                  double tol = kDefaultTol) {
  const double span = z_noflex - z_exact;
  const double scale =
      std::max({1.0, std::abs(z_noflex), std::abs(z_exact)});
  if (std::abs(span) <= tol * scale) {
    throw std::runtime_error(
        "degenerate-baseline: z_noflex and z_exact coincide (" +
        std::to_string(z_noflex) + " vs " + std::to_string(z_exact) +
        "); there is no flexibility potential to measure");
  }
  return 100.0 * (z_approx - z_exact) / span;
}

}  // namespace flexhull
