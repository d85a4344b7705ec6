#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <string>

#include "flexhull/numeric.hpp"

namespace flexhull {

// Parameters of one storage device over d periods of length dt hours.
// Power x(t) in kW is positive when charging; the stored energy follows
//   S(t) = alpha * S(t-1) + x(t) * dt,  S(0) = s0,
// with alpha in (0, 1] the per-period retention factor. The device must end
// at S(d) >= s_f and stay inside [s_min, s_max] throughout.
struct StorageSpec {
  double alpha = 1.0;
  double x_min = 0.0;  // kW, lower charging rate (negative = discharge)
  double x_max = 0.0;  // kW
  double s_min = 0.0;  // kWh
  double s_max = 0.0;  // kWh
  double dt = 1.0;     // h
  double s0 = 0.0;     // kWh
  double s_f = 0.0;    // kWh, minimum final stored energy
  int d = 0;           // number of periods

  void validate() const {
    auto fail = [](const std::string& msg) {
      throw std::invalid_argument("StorageSpec: " + msg);
    };
    if (d < 1) fail("d must be >= 1, got " + std::to_string(d));
    for (double v : {alpha, x_min, x_max, s_min, s_max, dt, s0, s_f}) {
      if (!std::isfinite(v)) fail("all parameters must be finite");
    }
    if (!(dt > 0.0)) fail("dt must be positive, got " + std::to_string(dt));
    if (!(alpha > 0.0 && alpha <= 1.0)) {
      fail("alpha must lie in (0, 1], got " + std::to_string(alpha));
    }
    if (x_min > x_max) fail("x_min must not exceed x_max");
    if (!(s_min <= s0 && s0 <= s_max)) {
      fail("s0 must lie in [s_min, s_max]");
    }
    if (!(s_min <= s_f && s_f <= s_max)) {
      fail("s_f must lie in [s_min, s_max]");
    }
  }
};

// A polyhedron {x in R^d : A x <= b}. All sets handled by this library are
// bounded, which is checked lazily (boundedness falls out of the battery
// construction; generic inputs are the caller's responsibility).
struct HPolytope {
  Eigen::MatrixXd A;  // k x d
  Eigen::VectorXd b;  // k

  Eigen::Index dim() const { return A.cols(); }
  Eigen::Index rows() const { return A.rows(); }

  void validate() const {
    if (A.rows() < 1 || A.cols() < 1) {
      throw std::invalid_argument("HPolytope: need at least one row and one column");
    }
    if (A.rows() != b.size()) {
      throw std::invalid_argument(
          "HPolytope: A has " + std::to_string(A.rows()) + " rows but b has " +
          std::to_string(b.size()) + " entries");
    }
    if (!A.allFinite() || !b.allFinite()) {
      throw std::invalid_argument("HPolytope: entries must be finite");
    }
  }
};

// H-representation of the feasible charging profiles of one device:
// exactly 4d rows, in the order
//   rows [0,   d):  -x(t) <= -x_min           (power lower bounds)
//   rows [d,  2d):   x(t) <=  x_max           (power upper bounds)
//   rows [2d, 3d):   sum_{tau<=t} alpha^(t-tau) x(tau) <= (s_max - alpha^t s0)/dt
//   rows [3d, 4d):  -sum_{tau<=t} alpha^(t-tau) x(tau) <= (alpha^t s0 - s_min)/dt,
//                   with s_f in place of s_min on the final row.
// The SoC rows are the unrolled dynamics: row t of the third block is row t
// of the lower-triangular Toeplitz matrix with first column (1, alpha, ...,
// alpha^(d-1)).
inline HPolytope battery_polytope(const StorageSpec& spec) {
  spec.validate();
  const int d = spec.d;
  HPolytope p;
  p.A = Eigen::MatrixXd::Zero(4 * d, d);
  p.b = Eigen::VectorXd::Zero(4 * d);

  p.A.block(0, 0, d, d) = -Eigen::MatrixXd::Identity(d, d);
  p.b.segment(0, d).setConstant(-spec.x_min);
  p.A.block(d, 0, d, d) = Eigen::MatrixXd::Identity(d, d);
  p.b.segment(d, d).setConstant(spec.x_max);

  double alpha_t = 1.0;  // alpha^t, updated as t advances
  for (int t = 0; t < d; ++t) {
    alpha_t *= spec.alpha;
    double coeff = 1.0;  // alpha^(t-tau), tau descending from t
    for (int tau = t; tau >= 0; --tau) {
      p.A(2 * d + t, tau) = coeff;
      p.A(3 * d + t, tau) = -coeff;
      coeff *= spec.alpha;
    }
    p.b(2 * d + t) = (spec.s_max - alpha_t * spec.s0) / spec.dt;
    const double floor_t = (t == d - 1) ? spec.s_f : spec.s_min;
    p.b(3 * d + t) = (alpha_t * spec.s0 - floor_t) / spec.dt;
  }
  return p;
}

// Row-wise membership test with per-row scaling: row k passes when
// (A x)_k <= b_k + tol * max(1, |b_k|).
inline bool contains(const HPolytope& p, const Eigen::VectorXd& x,
                     double tol = kDefaultTol) {
  if (x.size() != p.dim()) {
    throw std::invalid_argument(
        "contains: point has dimension " + std::to_string(x.size()) +
        ", polytope has " + std::to_string(p.dim()));
  }
  const Eigen::VectorXd ax = p.A * x;
  for (Eigen::Index k = 0; k < p.rows(); ++k) {
    if (ax(k) > p.b(k) + scaled_tol(tol, p.b(k))) return false;
  }
  return true;
}

// (x_1, ..., x_t, 0, ..., 0); t is 1-based and must address a coordinate.
inline Eigen::VectorXd project_prefix(const Eigen::VectorXd& x, int t) {
  if (t < 1 || t > x.size()) {
    throw std::out_of_range("project_prefix: t = " + std::to_string(t) +
                            " outside [1, " + std::to_string(x.size()) + "]");
  }
  Eigen::VectorXd out = Eigen::VectorXd::Zero(x.size());
  out.head(t) = x.head(t);
  return out;
}

// Stored-energy path S(1..d) induced by profile x.
inline Eigen::VectorXd soc_trajectory(const StorageSpec& spec,
                                      const Eigen::VectorXd& x) {
  if (x.size() != spec.d) {
    throw std::invalid_argument("soc_trajectory: profile has " +
                                std::to_string(x.size()) + " periods, spec has " +
                                std::to_string(spec.d));
  }
  Eigen::VectorXd s(spec.d);
  double soc = spec.s0;
  for (int t = 0; t < spec.d; ++t) {
    soc = spec.alpha * soc + x(t) * spec.dt;
    s(t) = soc;
  }
  return s;
}

// Sufficient condition under which the battery set is known to admit the
// greedy per-period extremization (interior slack in every period, zero
// profile feasible, prefixes of feasible profiles feasible):
//   x_max > 0, x_min < 0, s_min < s_max, alpha^d s0 >= s_min, s_f = s_min.
// Devices with s_f > s_min are handled by the correction step instead.
inline bool battery_satisfies_assumptions(const StorageSpec& spec) {
  spec.validate();
  return spec.x_max > 0.0 && spec.x_min < 0.0 && spec.s_min < spec.s_max &&
         std::pow(spec.alpha, spec.d) * spec.s0 >= spec.s_min &&
         spec.s_f == spec.s_min;
}

// Emptiness test via the max-charge policy: charge at x_max every period,
// clipping at s_max. The map S -> min(s_max, alpha S + x_max dt) is
// nondecreasing, so the resulting SoC path is pointwise maximal over all
// feasible profiles, and (as iterates of a monotone map) the path itself is
// monotone in t, which rules out an s_min dip that the final check would
// miss. Hence for devices that can discharge (x_min <= 0) the set is
// nonempty exactly when this path ends at or above s_f. Forced-charging
// devices (x_min > 0) can overshoot s_max in ways this trace does not see,
// but those fail the assumption check and never reach the aggregation path.
inline bool battery_nonempty(const StorageSpec& spec,
                             double tol = kDefaultTol) {
  spec.validate();
  double soc = spec.s0;
  for (int t = 0; t < spec.d; ++t) {
    double next = spec.alpha * soc + spec.x_max * spec.dt;
    if (next > spec.s_max) next = spec.s_max;
    soc = next;
  }
  return soc >= spec.s_f - scaled_tol(tol, spec.s_f);
}

}  // namespace flexhull
