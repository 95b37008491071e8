#pragma once

// Umbrella header for the differentially private rank aggregation
// library: pulls in every module.

#include "rankagg/apx_median.hpp"
#include "rankagg/combiner.hpp"
#include "rankagg/dataset_io.hpp"
#include "rankagg/dp.hpp"
#include "rankagg/errors.hpp"
#include "rankagg/experiment.hpp"
#include "rankagg/footrule.hpp"
#include "rankagg/generators.hpp"
#include "rankagg/kemeny_large_n.hpp"
#include "rankagg/kemeny_small_n.hpp"
#include "rankagg/matching.hpp"
#include "rankagg/pairwise.hpp"
#include "rankagg/random.hpp"
#include "rankagg/ranking.hpp"
#include "rankagg/vecagg.hpp"
#include "rankagg/wfas.hpp"
