#pragma once

// Convenience umbrella for the whole library. Individual headers are cheap
// to include on their own; pulling everything in costs little beyond Eigen.

#include "flexhull/aggregation.hpp"
#include "flexhull/assumption_check.hpp"
#include "flexhull/benchmark.hpp"
#include "flexhull/correction.hpp"
#include "flexhull/disaggregation.hpp"
#include "flexhull/exact_geometry.hpp"
#include "flexhull/extreme_actions.hpp"
#include "flexhull/io.hpp"
#include "flexhull/numeric.hpp"
#include "flexhull/optimization.hpp"
#include "flexhull/polytope.hpp"
#include "flexhull/scenario.hpp"
#include "flexhull/simplex.hpp"
