#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "flexhull/numeric.hpp"

namespace flexhull {

enum class RowSense { LE, EQ, GE };
enum class SolveStatus { Optimal, Infeasible, Unbounded };

// min cᵀx  s.t.  A x {<=,=,>=} b  (row-wise senses),  lower <= x <= upper.
// Bound entries may be +-infinity.
struct LinearProgram {
  Eigen::VectorXd c;
  Eigen::MatrixXd A;
  std::vector<RowSense> sense;
  Eigen::VectorXd b;
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  void validate() const {
    const Eigen::Index m = A.rows();
    const Eigen::Index n = A.cols();
    if (n < 1) throw std::invalid_argument("LinearProgram: no variables");
    if (c.size() != n || lower.size() != n || upper.size() != n) {
      throw std::invalid_argument("LinearProgram: c/lower/upper must have one entry per column");
    }
    if (b.size() != m || static_cast<Eigen::Index>(sense.size()) != m) {
      throw std::invalid_argument("LinearProgram: b/sense must have one entry per row");
    }
    if (!c.allFinite()) throw std::invalid_argument("LinearProgram: objective must be finite");
    if (!A.allFinite() || !b.allFinite()) {
      throw std::invalid_argument("LinearProgram: A and b must be finite");
    }
    for (Eigen::Index j = 0; j < n; ++j) {
      if (std::isnan(lower(j)) || std::isnan(upper(j)) || lower(j) > upper(j)) {
        throw std::invalid_argument("LinearProgram: bounds of column " +
                                    std::to_string(j) + " are inconsistent");
      }
    }
  }
};

struct LpSolution {
  SolveStatus status = SolveStatus::Infeasible;
  double objective = std::numeric_limits<double>::quiet_NaN();
  Eigen::VectorXd x;  // empty unless Optimal
  long iterations = 0;
};

namespace detail {

// Dense two-phase primal simplex on the bounded-variable standard form.
//
// Every structural variable is transformed to a working variable z >= 0
// with an (optionally finite) upper bound: finite lower bounds shift,
// upper-bound-only variables mirror, free variables split into a positive
// and a negative part. Rows gain a slack (+1 for <=, -1 for >=), are
// negated if their shifted right-hand side is negative, and rows that end
// up without a +1 unit column receive a phase-1 artificial. Nonbasic
// variables rest at either bound; the tableau T = B^-1 W and both phases'
// reduced-cost rows are maintained by explicit pivots, and the vector of
// basic values is updated incrementally (it is not a tableau column, since
// nonbasics at their upper bound contribute).
class BoundedSimplex {
 public:
  BoundedSimplex(const LinearProgram& lp, double pivot_tol, double feas_tol)
      : lp_(lp), pivot_tol_(pivot_tol), feas_tol_(feas_tol) {}

  LpSolution solve() {
    build();
    LpSolution out;

    // Phase 1: drive the artificial variables to zero.
    if (n_art_ > 0) {
      run_phase(rc1_);
      double infeas = 0.0;
      for (Eigen::Index i = 0; i < m_; ++i) {
        if (basis_[i] >= art_begin_) infeas += xb_(i);
      }
      const double scale = std::max(1.0, rhs_scale_);
      if (infeas > feas_tol_ * scale) {
        out.status = SolveStatus::Infeasible;
        out.iterations = iterations_;
        return out;
      }
      pivot_out_artificials();
      for (Eigen::Index q = art_begin_; q < total_; ++q) ub_(q) = 0.0;
    }

    // Phase 2: optimize the real objective from the feasible basis.
    const bool unbounded = run_phase(rc2_);
    out.iterations = iterations_;
    if (unbounded) {
      out.status = SolveStatus::Unbounded;
      return out;
    }
    out.status = SolveStatus::Optimal;
    out.x = extract();
    out.objective = lp_.c.dot(out.x);
    return out;
  }

 private:
  enum class VarState : std::uint8_t { Low, Up, Basic };
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  // How a structural variable maps onto working variables.
  struct VarMap {
    enum class Kind : std::uint8_t { Shifted, Mirrored, Free } kind;
    Eigen::Index z;       // primary working index
    Eigen::Index z_neg;   // negative part (Free only)
    double offset;        // the finite bound used for shifting/mirroring
  };

  void build() {
    lp_.validate();
    const Eigen::Index m = lp_.A.rows();
    const Eigen::Index n = lp_.A.cols();
    m_ = m;

    // Working-variable count and the structural mapping.
    maps_.reserve(n);
    Eigen::Index nz = 0;
    for (Eigen::Index j = 0; j < n; ++j) {
      const bool lo = std::isfinite(lp_.lower(j));
      const bool hi = std::isfinite(lp_.upper(j));
      if (lo) {
        maps_.push_back({VarMap::Kind::Shifted, nz++, -1, lp_.lower(j)});
      } else if (hi) {
        maps_.push_back({VarMap::Kind::Mirrored, nz++, -1, lp_.upper(j)});
      } else {
        maps_.push_back({VarMap::Kind::Free, nz, nz + 1, 0.0});
        nz += 2;
      }
    }

    Eigen::Index n_slack = 0;
    for (RowSense s : lp_.sense) {
      if (s != RowSense::EQ) ++n_slack;
    }
    slack_begin_ = nz;
    art_begin_ = nz + n_slack;  // provisional; artificials appended below

    // Shifted right-hand side and working columns.
    Eigen::VectorXd rhs = lp_.b;
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(m, nz + n_slack);
    Eigen::VectorXd cz = Eigen::VectorXd::Zero(nz + n_slack);
    for (Eigen::Index j = 0; j < n; ++j) {
      const VarMap& vm = maps_[static_cast<std::size_t>(j)];
      switch (vm.kind) {
        case VarMap::Kind::Shifted:
          W.col(vm.z) = lp_.A.col(j);
          cz(vm.z) = lp_.c(j);
          rhs -= lp_.A.col(j) * vm.offset;
          break;
        case VarMap::Kind::Mirrored:
          W.col(vm.z) = -lp_.A.col(j);
          cz(vm.z) = -lp_.c(j);
          rhs -= lp_.A.col(j) * vm.offset;
          break;
        case VarMap::Kind::Free:
          W.col(vm.z) = lp_.A.col(j);
          W.col(vm.z_neg) = -lp_.A.col(j);
          cz(vm.z) = lp_.c(j);
          cz(vm.z_neg) = -lp_.c(j);
          break;
      }
    }

    ub_ = Eigen::VectorXd::Constant(nz + n_slack, kInf);
    for (Eigen::Index j = 0; j < n; ++j) {
      const VarMap& vm = maps_[static_cast<std::size_t>(j)];
      if (vm.kind == VarMap::Kind::Shifted && std::isfinite(lp_.upper(j))) {
        ub_(vm.z) = lp_.upper(j) - lp_.lower(j);
      }
    }

    // Slacks, row negation, and the initial basis.
    basis_.assign(static_cast<std::size_t>(m), -1);
    Eigen::Index next_slack = slack_begin_;
    std::vector<Eigen::Index> art_rows;
    for (Eigen::Index i = 0; i < m; ++i) {
      double slack_coeff = 0.0;
      Eigen::Index slack_idx = -1;
      if (lp_.sense[static_cast<std::size_t>(i)] != RowSense::EQ) {
        slack_idx = next_slack++;
        slack_coeff = (lp_.sense[static_cast<std::size_t>(i)] == RowSense::LE) ? 1.0 : -1.0;
      }
      if (rhs(i) < 0.0) {
        W.row(i) = -W.row(i);
        rhs(i) = -rhs(i);
        slack_coeff = -slack_coeff;
      }
      if (slack_idx >= 0) W(i, slack_idx) = slack_coeff;
      if (slack_coeff > 0.0) {
        basis_[static_cast<std::size_t>(i)] = slack_idx;
      } else {
        art_rows.push_back(i);
      }
    }

    n_art_ = static_cast<Eigen::Index>(art_rows.size());
    total_ = nz + n_slack + n_art_;
    T_.resize(m, total_);
    T_.setZero();
    T_.leftCols(nz + n_slack) = W;
    for (Eigen::Index k = 0; k < n_art_; ++k) {
      const Eigen::Index row = art_rows[static_cast<std::size_t>(k)];
      T_(row, art_begin_ + k) = 1.0;
      basis_[static_cast<std::size_t>(row)] = art_begin_ + k;
    }
    ub_.conservativeResize(total_);
    ub_.tail(n_art_).setConstant(kInf);

    state_.assign(static_cast<std::size_t>(total_), VarState::Low);
    for (Eigen::Index i = 0; i < m; ++i) {
      state_[static_cast<std::size_t>(basis_[static_cast<std::size_t>(i)])] = VarState::Basic;
    }

    xb_ = rhs;  // all nonbasics start at their lower bound (zero)
    rhs_scale_ = (m > 0) ? rhs.cwiseAbs().maxCoeff() : 0.0;

    // Reduced costs. Phase 1 prices sum of artificials: with artificial
    // rows basic at cost 1, rc1 = -sum of those rows over the other
    // columns. Phase 2 starts at rc2 = cz since slacks and artificials
    // carry zero cost.
    rc1_ = Eigen::VectorXd::Zero(total_);
    for (Eigen::Index i = 0; i < m; ++i) {
      if (basis_[static_cast<std::size_t>(i)] >= art_begin_) rc1_ -= T_.row(i);
    }
    for (Eigen::Index k = 0; k < n_art_; ++k) rc1_(art_begin_ + k) = 0.0;
    rc2_ = Eigen::VectorXd::Zero(total_);
    rc2_.head(nz + n_slack) = cz;

    iterations_ = 0;
    iteration_cap_ = 50 * static_cast<long>(m + total_) + 1000;
  }

  // Executes pivots until the phase's reduced costs are optimal.
  // Returns true when the phase detected an unbounded ray.
  bool run_phase(Eigen::VectorXd& rc) {
    long stagnant = 0;
    bool bland = false;
    for (;;) {
      if (++iterations_ > iteration_cap_) {
        throw std::runtime_error(
            "simplex: iteration limit exceeded (" +
            std::to_string(iteration_cap_) + "); the instance appears to cycle");
      }

      // Pricing. A variable at its lower bound improves by increasing when
      // its reduced cost is negative; one at its upper bound improves by
      // decreasing when its reduced cost is positive.
      Eigen::Index q = -1;
      int dir = 0;
      double best = pivot_tol_;
      for (Eigen::Index jj = 0; jj < art_begin_; ++jj) {  // artificials never enter
        const VarState st = state_[static_cast<std::size_t>(jj)];
        if (st == VarState::Basic) continue;
        if (ub_(jj) <= 0.0) continue;  // fixed at zero
        double violation = 0.0;
        int d = 0;
        if (st == VarState::Low && rc(jj) < -pivot_tol_) {
          violation = -rc(jj);
          d = +1;
        } else if (st == VarState::Up && rc(jj) > pivot_tol_) {
          violation = rc(jj);
          d = -1;
        } else {
          continue;
        }
        if (bland) {
          q = jj;
          dir = d;
          break;  // lowest eligible index
        }
        if (violation > best) {
          best = violation;
          q = jj;
          dir = d;
        }
      }
      if (q < 0) return false;  // phase optimal

      // Ratio test: the entering variable moves by delta away from its
      // bound; each basic variable moves by -dir * T(i,q) * delta and must
      // stay inside [0, ub]. The entering variable's own opposite bound
      // also limits delta (a "bound flip" when it wins).
      double delta = ub_(q);
      Eigen::Index leave_row = -1;
      double leave_pivot = 0.0;
      bool leaving_hits_upper = false;
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double a = T_(i, q);
        if (std::abs(a) <= pivot_tol_) continue;
        const double rate = -static_cast<double>(dir) * a;  // d(xb_i)/d(delta)
        double limit;
        bool hits_upper;
        if (rate < 0.0) {
          limit = xb_(i) / (-rate);
          hits_upper = false;
        } else {
          const double cap = ub_(basis_[static_cast<std::size_t>(i)]);
          if (!std::isfinite(cap)) continue;
          limit = (cap - xb_(i)) / rate;
          hits_upper = true;
        }
        if (limit < 0.0) limit = 0.0;  // rounding pushed xb past a bound
        const bool within_window =
            limit <= delta + 1e-12 * (1.0 + std::abs(delta));
        if (!within_window) continue;
        if (limit < delta - 1e-12 * (1.0 + std::abs(delta))) {
          delta = limit;
          leave_row = i;
          leave_pivot = a;
          leaving_hits_upper = hits_upper;
        } else if (leave_row >= 0) {
          // Near-tie: prefer the numerically safer (larger) pivot, or the
          // smallest basic index under Bland's rule.
          const bool take =
              bland ? basis_[static_cast<std::size_t>(i)] <
                          basis_[static_cast<std::size_t>(leave_row)]
                    : std::abs(a) > std::abs(leave_pivot);
          if (take) {
            delta = std::min(delta, limit);
            leave_row = i;
            leave_pivot = a;
            leaving_hits_upper = hits_upper;
          }
        } else if (limit <= delta) {
          delta = limit;
          leave_row = i;
          leave_pivot = a;
          leaving_hits_upper = hits_upper;
        }
      }

      if (!std::isfinite(delta)) return true;  // unbounded ray

      const double progress = best * delta;
      if (progress <= 1e-12) {
        if (++stagnant >= kDegenerateStreak) bland = true;
      } else {
        stagnant = 0;
        if (bland && progress > 1e-10) bland = false;
      }

      if (leave_row < 0) {
        // Bound flip: the entering variable crosses to its other bound.
        xb_ -= static_cast<double>(dir) * delta * T_.col(q);
        state_[static_cast<std::size_t>(q)] =
            (dir > 0) ? VarState::Up : VarState::Low;
        continue;
      }

      // Move, then swap basis roles and re-reduce the tableau.
      xb_ -= static_cast<double>(dir) * delta * T_.col(q);
      const Eigen::Index out_var = basis_[static_cast<std::size_t>(leave_row)];
      state_[static_cast<std::size_t>(out_var)] =
          leaving_hits_upper ? VarState::Up : VarState::Low;
      state_[static_cast<std::size_t>(q)] = VarState::Basic;
      basis_[static_cast<std::size_t>(leave_row)] = q;
      xb_(leave_row) = (dir > 0) ? delta : ub_(q) - delta;
      pivot(leave_row, q);
    }
  }

  void pivot(Eigen::Index r, Eigen::Index q) {
    T_.row(r) /= T_(r, q);
    T_(r, q) = 1.0;
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (i == r) continue;
      const double f = T_(i, q);
      if (f != 0.0) {
        T_.row(i) -= f * T_.row(r);
        T_(i, q) = 0.0;
      }
    }
    const double f1 = rc1_(q);
    if (f1 != 0.0) {
      rc1_ -= f1 * T_.row(r).transpose();
      rc1_(q) = 0.0;
    }
    const double f2 = rc2_(q);
    if (f2 != 0.0) {
      rc2_ -= f2 * T_.row(r).transpose();
      rc2_(q) = 0.0;
    }
  }

  // After phase 1, swap remaining basic artificials for structural or
  // slack variables where a usable pivot exists. Rows whose non-artificial
  // entries are all negligible are redundant; their artificial stays basic
  // at (numerical) zero and, with every pivot there below tolerance, can
  // never be displaced or grow again.
  void pivot_out_artificials() {
    for (Eigen::Index i = 0; i < m_; ++i) {
      if (basis_[static_cast<std::size_t>(i)] < art_begin_) continue;
      Eigen::Index q = -1;
      double best = pivot_tol_;
      for (Eigen::Index jj = 0; jj < art_begin_; ++jj) {
        if (state_[static_cast<std::size_t>(jj)] == VarState::Basic) continue;
        if (std::abs(T_(i, jj)) > best) {
          best = std::abs(T_(i, jj));
          q = jj;
        }
      }
      if (q < 0) continue;
      // The artificial sits at ~0, so the swap is degenerate: the entering
      // variable moves off its bound by ~0 and every other basic shifts by
      // ~0 as well.
      const double step = xb_(i) / T_(i, q);
      const Eigen::Index out_var = basis_[static_cast<std::size_t>(i)];
      for (Eigen::Index k = 0; k < m_; ++k) {
        if (k != i) xb_(k) -= step * T_(k, q);
      }
      xb_(i) = (state_[static_cast<std::size_t>(q)] == VarState::Up)
                   ? ub_(q) + step
                   : step;
      state_[static_cast<std::size_t>(out_var)] = VarState::Low;
      state_[static_cast<std::size_t>(q)] = VarState::Basic;
      basis_[static_cast<std::size_t>(i)] = q;
      pivot(i, q);
    }
  }

  Eigen::VectorXd extract() const {
    // Working-variable values: basics from xb_, nonbasics from their bound.
    Eigen::VectorXd z = Eigen::VectorXd::Zero(total_);
    for (Eigen::Index jj = 0; jj < total_; ++jj) {
      if (state_[static_cast<std::size_t>(jj)] == VarState::Up) z(jj) = ub_(jj);
    }
    for (Eigen::Index i = 0; i < m_; ++i) {
      z(basis_[static_cast<std::size_t>(i)]) = xb_(i);
    }
    Eigen::VectorXd x(lp_.A.cols());
    for (Eigen::Index j = 0; j < lp_.A.cols(); ++j) {
      const VarMap& vm = maps_[static_cast<std::size_t>(j)];
      switch (vm.kind) {
        case VarMap::Kind::Shifted:
          x(j) = vm.offset + z(vm.z);
          break;
        case VarMap::Kind::Mirrored:
          x(j) = vm.offset - z(vm.z);
          break;
        case VarMap::Kind::Free:
          x(j) = z(vm.z) - z(vm.z_neg);
          break;
      }
    }
    return x;
  }

  static constexpr long kDegenerateStreak = 64;

  const LinearProgram& lp_;
  double pivot_tol_;
  double feas_tol_;

  Eigen::Index m_ = 0;
  Eigen::Index slack_begin_ = 0;
  Eigen::Index art_begin_ = 0;
  Eigen::Index n_art_ = 0;
  Eigen::Index total_ = 0;
  std::vector<VarMap> maps_;
  Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> T_;
  Eigen::VectorXd xb_;
  Eigen::VectorXd ub_;
  Eigen::VectorXd rc1_;
  Eigen::VectorXd rc2_;
  std::vector<Eigen::Index> basis_;
  std::vector<VarState> state_;
  double rhs_scale_ = 0.0;
  long iterations_ = 0;
  long iteration_cap_ = 0;
};

}  // namespace detail

// Two-phase dense simplex with bounded variables. Dantzig pricing with a
// switch to Bland's rule after a streak of degenerate pivots guarantees
// termination in practice; an iteration cap backstops pathological inputs.
inline LpSolution simplex_solve(const LinearProgram& lp,
                                double pivot_tol = 1e-9,
                                double feas_tol = 1e-7) {
  detail::BoundedSimplex solver(lp, pivot_tol, feas_tol);
  return solver.solve();
}

}  // namespace flexhull
