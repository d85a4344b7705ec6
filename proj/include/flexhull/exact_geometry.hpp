#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "flexhull/numeric.hpp"
#include "flexhull/polytope.hpp"
#include "flexhull/simplex.hpp"

namespace flexhull {

// A finite point set, canonicalized: lexicographically sorted and
// deduplicated so that distinct entries are more than kDedupeTol apart
// in the L-infinity norm.
struct VertexSet {
  std::vector<Eigen::VectorXd> points;

  std::size_t size() const { return points.size(); }
};

namespace detail {

inline bool lex_less(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    if (a(i) < b(i)) return true;
    if (a(i) > b(i)) return false;
  }
  return false;
}

// Canonicalize: sort, then drop points within tol of an already-kept one.
// Sorting bounds the search to the window of kept points whose first
// coordinate is within tol, so this is near-linear for spread-out sets.
inline VertexSet canonical_vertex_set(std::vector<Eigen::VectorXd> pts,
                                      double tol = kDedupeTol) {
  std::sort(pts.begin(), pts.end(), lex_less);
  std::vector<Eigen::VectorXd> kept;
  kept.reserve(pts.size());
  for (const Eigen::VectorXd& p : pts) {
    bool dup = false;
    for (std::size_t k = kept.size(); k-- > 0;) {
      if (p(0) - kept[k](0) > tol) break;  // outside the sorted window
      if ((p - kept[k]).cwiseAbs().maxCoeff() <= tol) {
        dup = true;
        break;
      }
    }
    if (!dup) kept.push_back(p);
  }
  return VertexSet{std::move(kept)};
}

// Feasibility of x as a convex combination of the given points, decided by
// phase 1 of the simplex on {P beta = x, sum beta = 1, beta >= 0}.
inline bool in_convex_hull(const Eigen::VectorXd& x,
                           const std::vector<const Eigen::VectorXd*>& points) {
  if (points.empty()) return false;
  const Eigen::Index d = x.size();
  const Eigen::Index k = static_cast<Eigen::Index>(points.size());
  LinearProgram lp;
  lp.c = Eigen::VectorXd::Zero(k);
  lp.A.resize(d + 1, k);
  for (Eigen::Index j = 0; j < k; ++j) {
    lp.A.col(j).head(d) = *points[static_cast<std::size_t>(j)];
    lp.A(d, j) = 1.0;
  }
  lp.b.resize(d + 1);
  lp.b.head(d) = x;
  lp.b(d) = 1.0;
  lp.sense.assign(static_cast<std::size_t>(d + 1), RowSense::EQ);
  lp.lower = Eigen::VectorXd::Zero(k);
  lp.upper = Eigen::VectorXd::Constant(k, std::numeric_limits<double>::infinity());
  return simplex_solve(lp).status == SolveStatus::Optimal;
}

}  // namespace detail

// Exhaustive H-to-V conversion: solve every d-subset of rows as a linear
// system and keep the solutions that lie in the polytope. Intentionally
// combinatorial; the d <= 4 guard keeps it a test instrument rather than a
// production path.
inline VertexSet enumerate_vertices(const HPolytope& p) {
  p.validate();
  const Eigen::Index d = p.dim();
  if (d > 4) {
    throw std::invalid_argument(
        "enumerate_vertices: dimension " + std::to_string(d) +
        " exceeds the oracle guard (d <= 4)");
  }
  const Eigen::Index k = p.rows();
  std::vector<Eigen::VectorXd> found;

  std::vector<Eigen::Index> idx(static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) idx[static_cast<std::size_t>(i)] = i;
  Eigen::MatrixXd M(d, d);
  Eigen::VectorXd rhs(d);
  for (;;) {
    for (Eigen::Index i = 0; i < d; ++i) {
      M.row(i) = p.A.row(idx[static_cast<std::size_t>(i)]);
      rhs(i) = p.b(idx[static_cast<std::size_t>(i)]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    lu.setThreshold(1e-9);
    if (lu.isInvertible()) {
      Eigen::VectorXd x = lu.solve(rhs);
      // Discard solutions the factorization got wrong (ill conditioning);
      // the residual check is cheap at this scale.
      const double resid = (M * x - rhs).cwiseAbs().maxCoeff();
      if (resid <= scaled_tol(kDedupeTol, rhs.cwiseAbs().maxCoeff()) &&
          contains(p, x, kDedupeTol)) {
        found.push_back(std::move(x));
      }
    }
    // Next d-combination of row indices in lexicographic order.
    Eigen::Index pos = d - 1;
    while (pos >= 0 &&
           idx[static_cast<std::size_t>(pos)] == k - d + pos) {
      --pos;
    }
    if (pos < 0) break;
    ++idx[static_cast<std::size_t>(pos)];
    for (Eigen::Index i = pos + 1; i < d; ++i) {
      idx[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i - 1)] + 1;
    }
  }
  return detail::canonical_vertex_set(std::move(found));
}

// All sums picking one point from each set. The convex hull of the result
// equals the Minkowski sum of the hulls, and every vertex of that sum
// appears in the result; interior sums are kept (callers filter with
// is_vertex_of_hull).
inline VertexSet minkowski_vertex_candidates(const std::vector<VertexSet>& sets) {
  if (sets.empty()) {
    throw std::invalid_argument("minkowski_vertex_candidates: no sets given");
  }
  const Eigen::Index d = sets.front().points.empty()
                             ? 0
                             : sets.front().points.front().size();
  double product = 1.0;
  for (const VertexSet& s : sets) {
    if (s.points.empty()) return VertexSet{};  // empty summand, empty sum
    if (s.points.front().size() != d) {
      throw std::invalid_argument(
          "minkowski_vertex_candidates: sets must share one dimension");
    }
    product *= static_cast<double>(s.points.size());
    if (product > 1e6) {
      throw std::invalid_argument(
          "minkowski_vertex_candidates: candidate count exceeds the 10^6 guard");
    }
  }

  std::vector<Eigen::VectorXd> sums;
  sums.reserve(static_cast<std::size_t>(product));
  std::vector<std::size_t> pick(sets.size(), 0);
  for (;;) {
    Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
    for (std::size_t i = 0; i < sets.size(); ++i) {
      s += sets[i].points[pick[i]];
    }
    sums.push_back(std::move(s));
    std::size_t pos = sets.size();
    while (pos-- > 0) {
      if (++pick[pos] < sets[pos].points.size()) break;
      pick[pos] = 0;
      if (pos == 0) {
        return detail::canonical_vertex_set(std::move(sums));
      }
    }
  }
}

// Membership of x in the convex hull of the candidate points.
inline bool hull_contains(const Eigen::VectorXd& x, const VertexSet& candidates) {
  std::vector<const Eigen::VectorXd*> all;
  all.reserve(candidates.points.size());
  for (const Eigen::VectorXd& p : candidates.points) all.push_back(&p);
  return detail::in_convex_hull(x, all);
}

// x is a vertex of conv(candidates) iff it coincides with a candidate
// (within tol) and cannot be written as a convex combination of the
// candidates that are not near-duplicates of it.
inline bool is_vertex_of_hull(const Eigen::VectorXd& x,
                              const VertexSet& candidates,
                              double tol = kDedupeTol) {
  bool near_candidate = false;
  std::vector<const Eigen::VectorXd*> others;
  others.reserve(candidates.points.size());
  for (const Eigen::VectorXd& p : candidates.points) {
    if ((p - x).cwiseAbs().maxCoeff() <= tol) {
      near_candidate = true;
    } else {
      others.push_back(&p);
    }
  }
  if (!near_candidate) return false;
  if (others.empty()) return true;
  return !detail::in_convex_hull(x, others);
}

// No point of the set lies in the convex hull of the others.
inline bool convex_independent(const VertexSet& points) {
  if (points.points.empty()) {
    throw std::invalid_argument("convex_independent: empty set");
  }
  for (std::size_t i = 0; i < points.points.size(); ++i) {
    std::vector<const Eigen::VectorXd*> others;
    others.reserve(points.points.size() - 1);
    for (std::size_t j = 0; j < points.points.size(); ++j) {
      if (j != i) others.push_back(&points.points[j]);
    }
    if (others.empty()) return true;  // singleton
    if (detail::in_convex_hull(points.points[i], others)) return false;
  }
  return true;
}

}  // namespace flexhull
