#pragma once

#include "bppc/rng.hpp"
#include "bppc/instance.hpp"
#include "bppc/pricing_problem.hpp"
#include "bppc/simplex.hpp"
#include "bppc/pricing_exact.hpp"
#include "bppc/features.hpp"
#include "bppc/linear_model.hpp"
#include "bppc/sampling_aco.hpp"
#include "bppc/cg_engine.hpp"
#include "bppc/training.hpp"
#include "bppc/branch_and_price.hpp"
#include "bppc/bench.hpp"
