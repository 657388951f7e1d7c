#pragma once

#include "ccalloc/allocators/allocate.hpp"
#include "ccalloc/ams.hpp"
#include "ccalloc/bvls.hpp"
#include "ccalloc/core.hpp"
#include "ccalloc/harness/config.hpp"
#include "ccalloc/harness/csv.hpp"
#include "ccalloc/harness/monte_carlo.hpp"
#include "ccalloc/harness/stationary.hpp"
#include "ccalloc/harness/timesim.hpp"
#include "ccalloc/linalg.hpp"
#include "ccalloc/steady_state.hpp"
#include "ccalloc/weighting.hpp"
