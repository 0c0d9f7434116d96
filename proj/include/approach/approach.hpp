#pragma once

// Umbrella header: the full approachability toolkit.

#include "approach/common.hpp"
#include "approach/conditions.hpp"
#include "approach/convex.hpp"
#include "approach/counterexample.hpp"
#include "approach/game.hpp"
#include "approach/incomplete_info.hpp"
#include "approach/json_io.hpp"
#include "approach/linalg.hpp"
#include "approach/lp.hpp"
#include "approach/polytope.hpp"
#include "approach/qp.hpp"
#include "approach/rng.hpp"
#include "approach/simulator.hpp"
#include "approach/solvers.hpp"
#include "approach/strategies.hpp"
