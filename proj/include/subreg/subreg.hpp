#pragma once

// Umbrella header.

#include "bench.hpp"
#include "io.hpp"
#include "lovasz.hpp"
#include "maxflow.hpp"
#include "min_norm_point.hpp"
#include "path.hpp"
#include "prox.hpp"
#include "recovery.hpp"
#include "set_function.hpp"
#include "sfm.hpp"
#include "solver.hpp"
#include "subset.hpp"
#include "types.hpp"
