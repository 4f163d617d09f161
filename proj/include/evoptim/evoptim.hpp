#pragma once

#include "evoptim/batch.hpp"
#include "evoptim/benchmarks.hpp"
#include "evoptim/config.hpp"
#include "evoptim/dataset.hpp"
#include "evoptim/error.hpp"
#include "evoptim/evolution.hpp"
#include "evoptim/experiment.hpp"
#include "evoptim/metrics.hpp"
#include "evoptim/mlp.hpp"
#include "evoptim/optimizers.hpp"
#include "evoptim/params.hpp"
#include "evoptim/problem.hpp"
#include "evoptim/rng.hpp"
#include "evoptim/thread_pool.hpp"
